#pragma once

// Ensemble files and summaries.
//
// Binary layout (little-endian host order):
//   "FOUENS01" | u64 seed | u64 n_paths | u64 n_points
//   | u64 len + label | u64 len + method | n_points doubles (grid)
//   | n_paths * n_points doubles (row-major paths)

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fou/errors.hpp"
#include "fou/simulate.hpp"

namespace fou {

namespace detail {

inline constexpr char kEnsembleMagic[8] = {'F', 'O', 'U', 'E', 'N', 'S', '0', '1'};

inline void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

inline std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw NumericError("ensemble file truncated");
    return v;
}

inline void put_string(std::ostream& os, const std::string& s) {
    put_u64(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& is) {
    const std::uint64_t n = get_u64(is);
    if (n > (1u << 20)) throw NumericError("ensemble file corrupt: oversized string field");
    std::string s(n, '\0');
    if (!is.read(s.data(), static_cast<std::streamsize>(n))) throw NumericError("ensemble file truncated");
    return s;
}

}  // namespace detail

inline void write_ensemble(const PathEnsemble& e, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("cannot open for writing: " + path);
    os.write(detail::kEnsembleMagic, sizeof detail::kEnsembleMagic);
    detail::put_u64(os, e.seed);
    detail::put_u64(os, static_cast<std::uint64_t>(e.paths.rows()));
    detail::put_u64(os, static_cast<std::uint64_t>(e.grid.size()));
    detail::put_string(os, e.label);
    detail::put_string(os, e.method);
    os.write(reinterpret_cast<const char*>(e.grid.points().data()),
             static_cast<std::streamsize>(e.grid.points().size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(e.paths.data()),
             static_cast<std::streamsize>(e.paths.size() * sizeof(double)));
    if (!os) throw NumericError("write failed: " + path);
}

inline PathEnsemble read_ensemble(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("cannot open ensemble file: " + path);
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, detail::kEnsembleMagic, sizeof magic) != 0) {
        throw DomainError("not an ensemble file: " + path);
    }
    PathEnsemble e;
    e.seed = detail::get_u64(is);
    const std::uint64_t rows = detail::get_u64(is);
    const std::uint64_t cols = detail::get_u64(is);
    if (cols == 0 || cols > (1u << 26) || rows > (1u << 26)) throw NumericError("ensemble file corrupt: bad shape");
    e.label = detail::get_string(is);
    e.method = detail::get_string(is);
    std::vector<double> pts(cols);
    if (!is.read(reinterpret_cast<char*>(pts.data()), static_cast<std::streamsize>(cols * sizeof(double)))) {
        throw NumericError("ensemble file truncated");
    }
    e.grid = Grid::from_points(std::move(pts));
    e.paths.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!is.read(reinterpret_cast<char*>(e.paths.data()),
                 static_cast<std::streamsize>(rows * cols * sizeof(double)))) {
        throw NumericError("ensemble file truncated");
    }
    return e;
}

/// Long-format CSV: path,t,value.
inline void write_ensemble_csv(const PathEnsemble& e, std::ostream& os) {
    os << "path,t,value\n";
    os << std::setprecision(17);
    for (Eigen::Index r = 0; r < e.paths.rows(); ++r) {
        for (int i = 0; i < e.grid.size(); ++i) os << r << ',' << e.grid[i] << ',' << e.paths(r, i) << '\n';
    }
}

struct EnsembleSummary {
    std::uint64_t n_paths = 0;
    std::uint64_t n_points = 0;
    /// Mean and second moment at the last grid point, across paths.
    double terminal_mean = 0.0;
    double terminal_second_moment = 0.0;
    double max_abs = 0.0;
    /// FNV-1a over the raw bytes of the path matrix.
    std::uint64_t checksum = 0;

    bool operator==(const EnsembleSummary&) const = default;
};

inline std::uint64_t fnv1a(const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline EnsembleSummary summarize(const PathEnsemble& e) {
    EnsembleSummary s;
    s.n_paths = static_cast<std::uint64_t>(e.paths.rows());
    s.n_points = static_cast<std::uint64_t>(e.paths.cols());
    if (e.paths.size() > 0) {
        const auto last = e.paths.col(e.paths.cols() - 1);
        s.terminal_mean = last.mean();
        s.terminal_second_moment = last.squaredNorm() / static_cast<double>(last.size());
        s.max_abs = e.paths.cwiseAbs().maxCoeff();
    }
    s.checksum = fnv1a(e.paths.data(), static_cast<std::size_t>(e.paths.size()) * sizeof(double));
    return s;
}

}  // namespace fou
