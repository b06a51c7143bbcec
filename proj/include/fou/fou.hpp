#pragma once

#include "fou/analytics.hpp"
#include "fou/ensemble_io.hpp"
#include "fou/errors.hpp"
#include "fou/kernels.hpp"
#include "fou/montecarlo.hpp"
#include "fou/quadrature.hpp"
#include "fou/simulate.hpp"
#include "fou/validation.hpp"
#include "fou/version.hpp"
