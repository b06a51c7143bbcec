#pragma once

// Exact-in-law Gaussian path sampling on time grids and the pathwise OU
// construction X_t = N_t - theta e^{-theta t} int_0^t e^{theta r} N_r dr.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fou/analytics.hpp"
#include "fou/errors.hpp"
#include "fou/kernels.hpp"

namespace fou {

class Grid {
public:
    /// n points from t0 to t1 inclusive, equally spaced.
    static Grid uniform(double t0, double t1, int n) {
        if (!(t0 >= 0.0) || !(t1 > t0) || n < 2 || !std::isfinite(t1)) {
            throw DomainError("uniform grid needs 0 <= t0 < t1 and n >= 2");
        }
        std::vector<double> pts(static_cast<std::size_t>(n));
        const double dt = (t1 - t0) / (n - 1);
        for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = t0 + dt * i;
        pts.back() = t1;
        Grid g;
        g.points_ = std::move(pts);
        g.uniform_ = true;
        g.dt_ = dt;
        return g;
    }

    /// Arbitrary strictly increasing points in [0, inf). The uniform flag is
    /// set when the spacings agree to 1e-12 relative.
    static Grid from_points(std::vector<double> pts) {
        if (pts.size() < 2) throw DomainError("grid needs at least two points");
        if (!(pts.front() >= 0.0)) throw DomainError("grid points must be >= 0");
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!(pts[i] > pts[i - 1]) || !std::isfinite(pts[i])) {
                throw DomainError("grid points must be finite and strictly increasing");
            }
        }
        Grid g;
        const double dt = (pts.back() - pts.front()) / static_cast<double>(pts.size() - 1);
        bool uniform = true;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (std::abs(pts[i] - pts[i - 1] - dt) > 1e-12 * std::max(1.0, pts.back())) uniform = false;
        }
        g.points_ = std::move(pts);
        g.uniform_ = uniform;
        g.dt_ = uniform ? dt : 0.0;
        return g;
    }

    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] int size() const { return static_cast<int>(points_.size()); }
    [[nodiscard]] double t0() const { return points_.front(); }
    [[nodiscard]] double t1() const { return points_.back(); }
    [[nodiscard]] bool is_uniform() const { return uniform_; }
    /// Spacing of a uniform grid, 0 otherwise.
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] double operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }

    /// Index of grid time t. Matches to 1e-9 of the local spacing; anything
    /// else is off-grid and rejected.
    [[nodiscard]] int index_of(double t) const {
        const auto it = std::lower_bound(points_.begin(), points_.end(), t);
        const double tol = 1e-9 * std::max(1.0, std::abs(t)) +
                           (uniform_ ? 1e-9 * dt_ : 0.0);
        for (auto cand : {it, it == points_.begin() ? it : it - 1}) {
            if (cand != points_.end() && std::abs(*cand - t) <= tol) {
                return static_cast<int>(cand - points_.begin());
            }
        }
        std::ostringstream os;
        os << "time " << t << " is not on the grid";
        throw DomainError(os.str());
    }

private:
    std::vector<double> points_;
    bool uniform_ = false;
    double dt_ = 0.0;
};

using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PathEnsemble {
    Grid grid;
    /// n_paths x grid.size(), one path per row.
    PathMatrix paths;
    std::uint64_t seed = 0;
    /// What the rows hold, e.g. "fbm(H=0.7)" or "first:fbm(H=0.7):theta=1".
    std::string label;
    /// Sampling route actually used.
    std::string method;
    /// Fallbacks and other diagnostics raised while sampling.
    std::vector<std::string> notes;

    [[nodiscard]] int n_paths() const { return static_cast<int>(paths.rows()); }
};

enum class SamplingMethod { automatic, circulant, dense, pathwise };

struct SamplingOptions {
    SamplingMethod method = SamplingMethod::automatic;
    /// Worker threads; results do not depend on it.
    int threads = 1;
    QuadConfig quad{1e-11, 1e-15, 4000, 0.0};
};

/// a_t = gamma e^{t / gamma}.
inline double time_change(double gamma, double t) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("time change needs gamma in (0, 1)");
    return gamma * std::exp(t / gamma);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent generator for path i of a run seeded with `seed`; it does not
/// depend on how many paths are drawn or on which thread draws them.
inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream = 0) {
    const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(path * 0x632BE59BD9B4E019ULL + stream));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

template <class Body>
void parallel_for_paths(int n_paths, int threads, Body&& body) {
    threads = std::max(1, std::min(threads, n_paths));
    if (threads == 1) {
        for (int i = 0; i < n_paths; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n_paths; i += threads) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Lower Cholesky factor of a covariance matrix, adding a diagonal jitter
/// that escalates from 1e-14 to 1e-10 of the mean variance when needed.
inline Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& c, std::vector<std::string>* notes) {
    const double scale = c.diagonal().mean();
    const Eigen::Index n = c.rows();
    for (double eps : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
        Eigen::MatrixXd m = c;
        if (eps > 0.0) m.diagonal().array() += eps * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() == Eigen::Success) {
            if (eps > 0.0 && notes) {
                std::ostringstream os;
                os << "cholesky jitter " << eps << " x mean variance";
                notes->push_back(os.str());
            }
            Eigen::MatrixXd l = llt.matrixL();
            return l;
        }
    }
    std::ostringstream os;
    os << "covariance matrix of size " << n << " is not positive semidefinite within the jitter budget";
    throw NumericError(os.str());
}

/// Sample paths with covariance c over `active` grid columns (others stay 0).
inline void sample_dense(PathMatrix& out, const Eigen::MatrixXd& c, const std::vector<int>& active,
                         std::uint64_t seed, int threads, std::vector<std::string>* notes,
                         std::uint64_t stream = 0) {
    const Eigen::MatrixXd l = robust_cholesky(c, notes);
    const Eigen::Index m = l.rows();
    parallel_for_paths(static_cast<int>(out.rows()), threads, [&](int i) {
        auto rng = path_rng(seed, static_cast<std::uint64_t>(i), stream);
        std::normal_distribution<double> normal;
        Eigen::VectorXd z(m);
        for (Eigen::Index j = 0; j < m; ++j) z(j) = normal(rng);
        const Eigen::VectorXd x = l.triangularView<Eigen::Lower>() * z;
        for (Eigen::Index j = 0; j < m; ++j) out(i, active[static_cast<std::size_t>(j)]) = x(j);
    });
}

/// Square roots of the (scaled) eigenvalues of the minimal power-of-two
/// circulant embedding of a stationary autocovariance, or nothing when the
/// embedding is not nonnegative definite within tolerance.
struct CirculantFactor {
    std::vector<double> sqrt_eig;
    int m = 0;
};

template <class Autocov>
std::optional<CirculantFactor> circulant_factor(int m, Autocov&& acov, std::vector<std::string>* notes) {
    int half = 1;
    while (half < m) half *= 2;
    const int n = 2 * half;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(n));
    for (int k = 0; k <= half; ++k) c[static_cast<std::size_t>(k)] = acov(k);
    for (int k = half + 1; k < n; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(n - k)];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lam;
    fft.fwd(lam, c);
    double total = 0.0;
    double negative = 0.0;
    for (const auto& v : lam) {
        total += std::abs(v.real());
        if (v.real() < 0.0) negative -= v.real();
    }
    if (negative > 1e-8 * total) {
        if (notes) {
            std::ostringstream os;
            os << "circulant embedding has negative eigenvalue mass " << negative / total
               << "; fell back to dense factorization";
            notes->push_back(os.str());
        }
        return std::nullopt;
    }
    if (negative > 0.0 && notes) {
        std::ostringstream os;
        os << "circulant embedding: clipped negative eigenvalue mass " << negative / total;
        notes->push_back(os.str());
    }
    CirculantFactor f;
    f.m = m;
    f.sqrt_eig.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        f.sqrt_eig[static_cast<std::size_t>(k)] =
            std::sqrt(std::max(0.0, lam[static_cast<std::size_t>(k)].real()) / n);
    }
    return f;
}

/// Paths whose increments over consecutive grid cells form the stationary
/// sequence of the factor; column 0 is zero.
inline void sample_circulant_increments(PathMatrix& out, const CirculantFactor& f, std::uint64_t seed,
                                        int threads) {
    const int n = static_cast<int>(f.sqrt_eig.size());
    const int workers = std::max(1, std::min(threads, static_cast<int>(out.rows())));
    std::vector<Eigen::FFT<double>> ffts(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    auto work = [&](int w) {
        try {
            std::vector<std::complex<double>> in(static_cast<std::size_t>(n));
            std::vector<std::complex<double>> spec;
            for (int i = w; i < out.rows(); i += workers) {
                auto rng = path_rng(seed, static_cast<std::uint64_t>(i));
                std::normal_distribution<double> normal;
                for (int k = 0; k < n; ++k) {
                    const double a = normal(rng);
                    const double b = normal(rng);
                    in[static_cast<std::size_t>(k)] = f.sqrt_eig[static_cast<std::size_t>(k)] * std::complex<double>(a, b);
                }
                ffts[static_cast<std::size_t>(w)].fwd(spec, in);
                double acc = 0.0;
                out(i, 0) = 0.0;
                for (int j = 0; j < f.m; ++j) {
                    acc += spec[static_cast<std::size_t>(j)].real();
                    out(i, j + 1) = acc;
                }
            }
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Dense sampling of a process with covariance `kernel` at the grid points,
/// leaving zero-variance points at 0.
template <class Kernel>
void sample_from_kernel(PathMatrix& out, const Grid& grid, Kernel&& kernel, std::uint64_t seed, int threads,
                        std::vector<std::string>* notes, std::uint64_t stream = 0) {
    std::vector<int> active;
    for (int i = 0; i < grid.size(); ++i) {
        if (kernel(grid[i], grid[i]) > 0.0) active.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = kernel(grid[active[static_cast<std::size_t>(a)]], grid[active[static_cast<std::size_t>(b)]]);
            c(a, b) = v;
            c(b, a) = v;
        }
    }
    sample_dense(out, c, active, seed, threads, notes, stream);
}

inline bool circulant_ready(const Grid& grid) { return grid.is_uniform() && grid.t0() == 0.0; }

}  // namespace detail

/// Centered Gaussian paths of fBm, subfBm or bifBm on the grid. fBm on a
/// uniform grid starting at 0 goes through circulant embedding of fractional
/// Gaussian noise; everything else through a Cholesky factor of the
/// covariance matrix.
inline PathEnsemble sample_gaussian(const ProcessSpec& p0, const Grid& grid, int n_paths, std::uint64_t seed,
                                    const SamplingOptions& opt = {}) {
    validate(p0);
    if (!is_gaussian(p0)) throw DomainError("path sampling of Hermite processes of order >= 2 is not supported");
    if (n_paths < 0) throw DomainError("n_paths must be >= 0");
    if (opt.method == SamplingMethod::pathwise) throw DomainError("pathwise sampling applies to second-kind noise");
    const ProcessSpec p = canonical(std::holds_alternative<Hermite>(p0) ? ProcessSpec{Fbm{hurst(p0)}} : p0);
    PathEnsemble e;
    e.grid = grid;
    e.seed = seed;
    e.label = to_string(p0);
    e.paths = PathMatrix::Zero(n_paths, grid.size());
    const bool stationary = std::holds_alternative<Fbm>(p);
    bool want_circulant = stationary && detail::circulant_ready(grid);
    if (opt.method == SamplingMethod::circulant && !want_circulant) {
        throw DomainError("circulant embedding needs fBm on a uniform grid starting at 0");
    }
    if (opt.method == SamplingMethod::dense) want_circulant = false;
    if (n_paths == 0) {
        e.method = want_circulant ? "circulant" : "dense";
        return e;
    }
    if (want_circulant) {
        const double h = hurst(p);
        const double d = grid.dt();
        const double scale = std::pow(d, 2 * h);
        auto acov = [h, scale](int k) {
            const double kk = k;
            return 0.5 * scale *
                   (std::pow(kk + 1, 2 * h) + std::pow(std::abs(kk - 1), 2 * h) - 2 * std::pow(kk, 2 * h));
        };
        if (auto f = detail::circulant_factor(grid.size() - 1, acov, &e.notes)) {
            detail::sample_circulant_increments(e.paths, *f, seed, opt.threads);
            e.method = "circulant";
            return e;
        }
    }
    detail::sample_from_kernel(
        e.paths, grid, [&p](double s, double t) { return cov(p, s, t); }, seed, opt.threads, &e.notes);
    e.method = "dense";
    return e;
}

namespace detail {

/// X_t = N_t - theta J_t with J_t = e^{-theta t} int_0^t e^{theta r} N_r dr,
/// J advanced cell by cell with the trapezoidal rule.
inline PathEnsemble ou_from_noise(const PathEnsemble& noise, double theta, const std::string& label) {
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (noise.grid.size() < 2) throw DomainError("grid too coarse");
    if (noise.grid.t0() != 0.0) throw DomainError("the OU construction needs a grid starting at 0");
    for (Eigen::Index i = 0; i < noise.paths.rows(); ++i) {
        if (noise.paths(i, 0) != 0.0) throw DomainError("driver paths must start at 0");
    }
    PathEnsemble out = noise;
    out.label = label;
    if (theta == 0.0) return out;
    const Grid& g = noise.grid;
    const int n = g.size();
    std::vector<double> decay(static_cast<std::size_t>(n));
    for (int k = 1; k < n; ++k) decay[static_cast<std::size_t>(k)] = std::exp(-theta * (g[k] - g[k - 1]));
    for (Eigen::Index i = 0; i < noise.paths.rows(); ++i) {
        double j = 0.0;
        out.paths(i, 0) = 0.0;
        for (int k = 1; k < n; ++k) {
            const double dk = g[k] - g[k - 1];
            const double e = decay[static_cast<std::size_t>(k)];
            j = e * j + 0.5 * dk * (e * noise.paths(i, k - 1) + noise.paths(i, k));
            out.paths(i, k) = noise.paths(i, k) - theta * j;
        }
    }
    return out;
}

}  // namespace detail

/// First-kind OU paths from driver paths G.
inline PathEnsemble ou_first_kind(const PathEnsemble& driver, double theta) {
    std::ostringstream os;
    os.precision(17);
    os << "first:" << driver.label << ":theta=" << theta;
    return detail::ou_from_noise(driver, theta, os.str());
}

/// Second-kind noise Y(1) on the grid (Y_0 = 0 when the grid starts at 0).
///
/// automatic: circulant embedding of the stationary increments on uniform grids
/// from 0, otherwise dense factorization of R_Y. pathwise: Y = L + eta built
/// from base paths sampled at the time-changed points a_{t_i}, with eta by the
/// trapezoidal rule.
inline PathEnsemble second_kind_noise(const ProcessSpec& base, const Grid& grid, int n_paths, std::uint64_t seed,
                                      const SamplingOptions& opt = {}) {
    detail::require_second_kind_base(base);
    if (n_paths < 0) throw DomainError("n_paths must be >= 0");
    const ProcessSpec p = canonical(base);
    PathEnsemble e;
    e.grid = grid;
    e.seed = seed;
    e.label = "Y1:" + to_string(base);
    e.paths = PathMatrix::Zero(n_paths, grid.size());
    const QuadConfig& q = opt.quad;

    if (opt.method == SamplingMethod::pathwise) {
        if (grid.t0() != 0.0) throw DomainError("pathwise construction needs a grid starting at 0");
        const double g = holder_exponent(p);
        const int n = grid.size();
        std::vector<double> a(static_cast<std::size_t>(n) + 1);
        a[0] = time_change(g, 0.0);
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) + 1] = time_change(g, grid[i]);
        // Base points: a_0 followed by the grid images (a_0 may coincide with the first).
        std::vector<double> pts;
        pts.push_back(a[0]);
        for (int i = 0; i < n; ++i) {
            if (a[static_cast<std::size_t>(i) + 1] > pts.back()) pts.push_back(a[static_cast<std::size_t>(i) + 1]);
        }
        const Grid base_grid = Grid::from_points(pts);
        PathMatrix u = PathMatrix::Zero(n_paths, base_grid.size());
        if (n_paths > 0) {
            detail::sample_from_kernel(
                u, base_grid, [&p](double s, double t) { return cov(p, s, t); }, seed, opt.threads, &e.notes);
        }
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = base_grid.index_of(a[static_cast<std::size_t>(i) + 1]);
        for (int r = 0; r < n_paths; ++r) {
            const double u0 = u(r, 0);
            double eta = 0.0;
            double prev = 0.0;
            for (int i = 0; i < n; ++i) {
                const double cur = std::exp(-grid[i]) * u(r, idx[static_cast<std::size_t>(i)]);
                if (i > 0) eta += 0.5 * (grid[i] - grid[i - 1]) * (prev + cur);
                e.paths(r, i) = cur - u0 + eta;
                prev = cur;
            }
        }
        e.method = "pathwise";
        return e;
    }

    bool want_circulant = detail::circulant_ready(grid);
    if (opt.method == SamplingMethod::circulant && !want_circulant) {
        throw DomainError("circulant embedding needs a uniform grid starting at 0");
    }
    if (opt.method == SamplingMethod::dense) want_circulant = false;
    if (n_paths == 0) {
        e.method = want_circulant ? "circulant" : "dense";
        return e;
    }
    if (want_circulant) {
        const double d = grid.dt();
        auto acov = [&](int k) { return second_kind_increment_cov(p, d, k, q); };
        if (auto f = detail::circulant_factor(grid.size() - 1, acov, &e.notes)) {
            detail::sample_circulant_increments(e.paths, *f, seed, opt.threads);
            e.method = "circulant";
            return e;
        }
    }
    // Increment variance v at every lag |t_i - t_j| and every t_i.
    std::vector<double> xs;
    for (int i = 0; i < grid.size(); ++i) {
        xs.push_back(grid[i]);
        for (int j = 0; j < i; ++j) xs.push_back(grid[i] - grid[j]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const std::vector<double> vs = second_kind_increment_variance_table(p, xs, q);
    auto v = [&](double x) {
        const auto it = std::lower_bound(xs.begin(), xs.end(), x);
        return vs[static_cast<std::size_t>(it - xs.begin())];
    };
    detail::sample_from_kernel(
        e.paths, grid, [&](double s, double t) { return 0.5 * (v(s) + v(t) - v(std::abs(t - s))); }, seed,
        opt.threads, &e.notes);
    e.method = "dense";
    return e;
}

/// Second-kind OU paths from Y(1) paths.
inline PathEnsemble ou_second_kind(const PathEnsemble& noise, double theta) {
    std::ostringstream os;
    os.precision(17);
    os << "second:" << noise.label << ":theta=" << theta;
    return detail::ou_from_noise(noise, theta, os.str());
}

/// Noise paths for either kind.
inline PathEnsemble sample_noise(const OUSpec& ou, const Grid& grid, int n_paths, std::uint64_t seed,
                                 const SamplingOptions& opt = {}) {
    validate(ou);
    return ou.kind == NoiseKind::first ? sample_gaussian(ou.process, grid, n_paths, seed, opt)
                                       : second_kind_noise(ou.process, grid, n_paths, seed, opt);
}

/// OU paths X on the grid, started at X_0 = 0.
inline PathEnsemble sample_ou(const OUSpec& ou, const Grid& grid, int n_paths, std::uint64_t seed,
                              const SamplingOptions& opt = {}) {
    const PathEnsemble noise = sample_noise(ou, grid, n_paths, seed, opt);
    return ou.kind == NoiseKind::first ? ou_first_kind(noise, ou.theta) : ou_second_kind(noise, ou.theta);
}

/// Approximately stationary paths Z on a uniform grid: the OU equation is run
/// from time -burn_in (rounded up to whole grid steps) and the tail is kept.
/// The second-moment bias is of order e^{-theta burn_in}. A non-positive
/// burn_in is rejected; pass nothing for the default 20 / theta.
inline PathEnsemble stationary_path(const OUSpec& ou, const Grid& grid, int n_paths, std::uint64_t seed,
                                    std::optional<double> burn_in = std::nullopt,
                                    const SamplingOptions& opt = {}) {
    validate(ou);
    if (!(ou.theta > 0.0)) throw DomainError("stationary paths need theta > 0");
    if (!has_stationary_solution(ou)) {
        throw DomainError("non-stationary driver: " + to_string(ou.process) + " has no stationary solution");
    }
    const double b = burn_in.value_or(20.0 / ou.theta);
    if (!(b > 0.0)) throw DomainError("burn_in must be positive");
    if (!grid.is_uniform()) throw DomainError("stationary paths need a uniform grid");
    const double d = grid.dt();
    const int lead = static_cast<int>(std::ceil(b / d - 1e-9));
    const int total = lead + grid.size();
    const Grid ext = Grid::uniform(0.0, d * (total - 1), total);
    const PathEnsemble x = sample_ou(ou, ext, n_paths, seed, opt);
    PathEnsemble z;
    z.grid = grid;
    z.seed = seed;
    z.method = x.method;
    z.notes = x.notes;
    std::ostringstream os;
    os.precision(17);
    os << "Z:" << to_string(ou) << ":burn_in=" << lead * d;
    z.label = os.str();
    z.paths = x.paths.rightCols(grid.size());
    return z;
}

}  // namespace fou
