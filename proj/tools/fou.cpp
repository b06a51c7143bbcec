// fou: batch front-end for covariance tables, regime classification,
// path simulation and the validation suites.
//
// Every run writes <results>.manifest.json next to its results; `fou replay`
// reruns a manifest and compares the results byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fou/fou.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProcessArgs {
    std::string process = "fbm";
    double hurst = 0.5;
    double k = 1.0;
    int order = 1;
    std::string kind = "first";
    double theta = 1.0;
};

struct Options {
    std::string output_dir;
    std::string format = "csv";
    std::string out;
    int threads = 1;

    ProcessArgs proc;
    std::vector<double> lags;
    std::optional<double> s;
    std::vector<double> times;
    double rel_tol = 1e-10;

    double horizon = 10.0;
    int points = 1001;
    int paths = 1000;
    std::uint64_t seed = 1;
    std::string method = "automatic";
    bool stationary = false;
    std::optional<double> burn_in;
    bool noise_only = false;
    std::string csv;

    std::string suite = "all";
    double budget = 1.0;
    std::string ensemble;
    std::string summary;

    double dt = 1.0 / 64;

    std::string manifest;
};

fou::ProcessSpec make_process(const ProcessArgs& a) {
    fou::ProcessSpec p;
    if (a.process == "fbm") {
        p = fou::Fbm{a.hurst};
    } else if (a.process == "subfbm") {
        p = fou::SubFbm{a.hurst};
    } else if (a.process == "bifbm") {
        p = fou::BiFbm{a.hurst, a.k};
    } else if (a.process == "hermite") {
        p = fou::Hermite{a.order, a.hurst};
    } else {
        throw UsageError("unknown process: " + a.process);
    }
    fou::validate(p);
    return p;
}

fou::OUSpec make_ou(const ProcessArgs& a) {
    fou::OUSpec ou{a.kind == "second" ? fou::NoiseKind::second : fou::NoiseKind::first, make_process(a), a.theta};
    fou::validate(ou);
    return ou;
}

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// Tabular output in CSV (header row) or JSON lines.
class Table {
public:
    explicit Table(std::vector<std::string> cols) : cols_(std::move(cols)) {}

    void row(const std::vector<json>& values) { rows_.push_back(values); }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            for (const auto& r : rows_) {
                json j = json::object();
                for (std::size_t i = 0; i < cols_.size(); ++i) j[cols_[i]] = r[i];
                os << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
            }
            return;
        }
        for (std::size_t i = 0; i < cols_.size(); ++i) os << (i ? "," : "") << cols_[i];
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                if (r[i].is_number_float()) {
                    os << num(r[i].get<double>());
                } else if (r[i].is_string()) {
                    os << csv_field(r[i].get<std::string>());
                } else {
                    os << r[i].dump();
                }
            }
            os << '\n';
        }
    }

private:
    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

    std::vector<std::string> cols_;
    std::vector<std::vector<json>> rows_;
};

// `--config file` lines of key=value become `--key value` unless the key was
// given on the command line. Blank lines and lines starting with '#' are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (path.empty()) return out;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : out) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        }
        if (given) continue;
        if (value == "true") {
            out.push_back(flag);
        } else if (value != "false") {
            out.push_back(flag + "=" + value);
        }
    }
    return out;
}

std::string default_output_dir() {
    if (const char* env = std::getenv("FOU_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

std::string results_path(const Options& o, const std::string& sub, const std::string& ext) {
    if (!o.out.empty()) return o.out;
    return (fs::path(o.output_dir) / (sub + "." + ext)).string();
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fou::fnv1a(bytes.data(), bytes.size());
    return os.str();
}

void write_manifest(const std::string& results, const std::vector<std::string>& args, const std::string& sub,
                    const Options& o, const json& extra) {
    json m;
    m["tool"] = "fou";
    m["version"] = fou::kVersion;
    m["subcommand"] = sub;
    m["args"] = args;
    m["seed"] = o.seed;
    m["threads"] = o.threads;
    m["results"] = fs::path(results).filename().string();
    m["results_checksum"] = file_checksum(results);
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream os(results + ".manifest.json");
    os << m.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write manifest for " + results);
}

template <class Body>
void emit(const std::string& path, Body&& body) {
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    body(os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

fou::QuadConfig quad(const Options& o) {
    fou::QuadConfig q;
    q.rel_tol = o.rel_tol;
    q.abs_tol = 1e-15;
    q.max_subdivisions = 4000;
    q.validate();
    return q;
}

json regime_json(const fou::OUSpec& ou, const fou::QuadConfig& q) {
    const fou::AsymptoticRegime r = fou::classify_regime(ou);
    json j;
    j["process"] = fou::to_string(ou);
    switch (r.kind) {
        case fou::RegimeKind::power_law:
            j["kind"] = "power";
            j["exponent"] = r.exponent;
            break;
        case fou::RegimeKind::exponential:
            j["kind"] = "exp";
            j["rate"] = r.rate;
            j["poly_degree"] = r.poly_degree;
            j["boundary"] = r.boundary;
            break;
        case fou::RegimeKind::closed:
            j["kind"] = "closed";
            j["rate"] = r.rate;
            j["closed_form"] = r.closed_form;
            break;
    }
    j["constant"] = r.constant(q);
    return j;
}

int run_cov(const Options& o, const std::vector<std::string>& args) {
    const fou::OUSpec ou = make_ou(o.proc);
    const fou::QuadConfig q = quad(o);
    const std::string path = results_path(o, "cov", o.format);
    if (!o.lags.empty() && o.s) throw UsageError("cov takes either --lags or --s with --times");
    if (o.lags.empty() && !o.s) throw UsageError("cov needs --lags, or --s with --times");
    Table table = o.s ? Table({"s", "t", "value"}) : Table({"lag", "value"});
    if (o.s) {
        if (o.times.empty()) throw UsageError("--s needs --times");
        for (double t : o.times) table.row({*o.s, t, fou::ou_cov(ou, *o.s, t, q)});
    } else {
        for (double lag : o.lags) table.row({lag, fou::stationary_autocov(ou, lag, q)});
    }
    emit(path, [&](std::ostream& os) { table.write(os, o.format); });
    write_manifest(path, args, "cov", o, {});
    table.write(std::cout, o.format);
    return kExitOk;
}

int run_regime(const Options& o, const std::vector<std::string>& args) {
    const fou::OUSpec ou = make_ou(o.proc);
    const json j = regime_json(ou, quad(o));
    const std::string path = results_path(o, "regime", "json");
    emit(path, [&](std::ostream& os) { os << j.dump() << '\n'; });
    write_manifest(path, args, "regime", o, {});
    std::cout << j.dump() << '\n';
    return kExitOk;
}

fou::SamplingOptions sampling(const Options& o) {
    fou::SamplingOptions opt;
    opt.threads = o.threads;
    if (o.method == "automatic") {
        opt.method = fou::SamplingMethod::automatic;
    } else if (o.method == "circulant") {
        opt.method = fou::SamplingMethod::circulant;
    } else if (o.method == "dense") {
        opt.method = fou::SamplingMethod::dense;
    } else if (o.method == "pathwise") {
        opt.method = fou::SamplingMethod::pathwise;
    } else {
        throw UsageError("unknown method: " + o.method);
    }
    return opt;
}

json summary_json(const fou::EnsembleSummary& s) {
    json j;
    j["n_paths"] = s.n_paths;
    j["n_points"] = s.n_points;
    j["terminal_mean"] = num(s.terminal_mean);
    j["terminal_second_moment"] = num(s.terminal_second_moment);
    j["max_abs"] = num(s.max_abs);
    j["checksum"] = s.checksum;
    return j;
}

int run_simulate(const Options& o, const std::vector<std::string>& args) {
    const fou::OUSpec ou = make_ou(o.proc);
    if (o.points < 2) throw UsageError("--points must be >= 2");
    if (!(o.horizon > 0.0)) throw UsageError("--T must be positive");
    if (o.paths < 0) throw UsageError("--paths must be >= 0");
    const fou::Grid grid = fou::Grid::uniform(0.0, o.horizon, o.points);
    const fou::SamplingOptions opt = sampling(o);
    fou::PathEnsemble e;
    if (o.stationary) {
        e = fou::stationary_path(ou, grid, o.paths, o.seed, o.burn_in, opt);
    } else if (o.noise_only) {
        e = fou::sample_noise(ou, grid, o.paths, o.seed, opt);
    } else {
        e = fou::sample_ou(ou, grid, o.paths, o.seed, opt);
    }
    const std::string path = results_path(o, "ensemble", "fouens");
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    fou::write_ensemble(e, path);
    if (!o.csv.empty()) emit(o.csv, [&](std::ostream& os) { fou::write_ensemble_csv(e, os); });
    const json summary = summary_json(fou::summarize(e));
    json extra;
    extra["summary"] = summary;
    extra["method"] = e.method;
    extra["notes"] = e.notes;
    write_manifest(path, args, "simulate", o, extra);
    json out = summary;
    out["file"] = path;
    out["method"] = e.method;
    std::cout << out.dump() << '\n';
    for (const auto& n : e.notes) std::cerr << "note: " << n << '\n';
    return kExitOk;
}

int run_decay(const Options& o, const std::vector<std::string>& args) {
    const fou::OUSpec ou = make_ou(o.proc);
    if (o.lags.empty()) throw UsageError("decay needs --lags");
    const auto rows = fou::decay_study(ou, o.lags, o.paths, o.seed, o.dt, o.burn_in, sampling(o), quad(o));
    std::string regime = "closed";
    switch (fou::classify_regime(ou).kind) {
        case fou::RegimeKind::power_law: regime = "power"; break;
        case fou::RegimeKind::exponential: regime = "exp"; break;
        case fou::RegimeKind::closed: break;
    }
    Table table({"lag", "value", "std_error", "analytic", "regime"});
    for (const auto& r : rows) table.row({r.lag, r.estimate.value, r.estimate.std_error, r.analytic, regime});
    const std::string path = results_path(o, "decay", o.format);
    emit(path, [&](std::ostream& os) { table.write(os, o.format); });
    write_manifest(path, args, "decay", o, {});
    table.write(std::cout, o.format);
    return kExitOk;
}

// Re-reads an ensemble and compares its summary with the recorded one.
fou::Check ensemble_check(const Options& o) {
    const fou::PathEnsemble e = fou::read_ensemble(o.ensemble);
    std::string summary_file = o.summary.empty() ? o.ensemble + ".manifest.json" : o.summary;
    std::ifstream in(summary_file);
    if (!in) throw UsageError("cannot read summary: " + summary_file);
    json recorded = json::parse(in);
    if (recorded.contains("summary")) recorded = recorded["summary"];
    const json now = summary_json(fou::summarize(e));
    fou::Check c;
    c.name = "ensemble summary reproduces " + fs::path(o.ensemble).filename().string();
    c.passed = now == recorded;
    c.detail = c.passed ? "bit-exact" : "recorded " + recorded.dump() + " vs " + now.dump();
    return c;
}

int run_validate(const Options& o, const std::vector<std::string>& args) {
    std::vector<std::string> suites;
    if (o.suite == "all") {
        suites = fou::suite_names();
    } else if (!o.suite.empty() && o.suite != "none") {
        const auto& known = fou::suite_names();
        if (std::find(known.begin(), known.end(), o.suite) == known.end()) {
            throw UsageError("unknown suite: " + o.suite);
        }
        suites.push_back(o.suite);
    }
    if (!(o.budget > 0.0)) throw UsageError("--budget must be positive");
    const fou::ValidationBudget budget{o.budget, o.threads};
    Table table({"suite", "check", "passed", "measured", "target", "tolerance", "detail"});
    int failures = 0;
    auto add = [&](const std::string& suite, const fou::Check& c) {
        table.row({suite, c.name, c.passed, c.measured, c.target, c.tolerance, c.detail});
        failures += c.passed ? 0 : 1;
    };
    for (const auto& name : suites) {
        const fou::SuiteReport r = fou::run_suite(name, budget);
        for (const auto& c : r.checks) add(r.suite, c);
        std::cerr << r.suite << ": " << (r.checks.size() - static_cast<std::size_t>(r.failures())) << "/"
                  << r.checks.size() << " passed in " << std::fixed << std::setprecision(1) << r.seconds << " s\n";
    }
    if (!o.ensemble.empty()) add("ensemble", ensemble_check(o));
    const std::string path = results_path(o, "validate", o.format);
    emit(path, [&](std::ostream& os) { table.write(os, o.format); });
    json extra;
    extra["failures"] = failures;
    write_manifest(path, args, "validate", o, extra);
    table.write(std::cout, o.format);
    return failures == 0 ? kExitOk : kExitFailure;
}

int dispatch(const std::vector<std::string>& args);

int run_replay(const Options& o) {
    std::ifstream in(o.manifest);
    if (!in) throw UsageError("cannot read manifest: " + o.manifest);
    const json m = json::parse(in);
    std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
    const fs::path dir = fs::path(o.manifest).parent_path();
    const fs::path original = (dir.empty() ? fs::path(".") : dir) / m.at("results").get<std::string>();
    const fs::path replayed = original.string() + ".replay";
    // Rerun with the output redirected next to the original.
    std::vector<std::string> rerun;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out" || args[i] == "--csv") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0 || args[i].rfind("--csv=", 0) == 0) continue;
        rerun.push_back(args[i]);
    }
    rerun.push_back("--out=" + replayed.string());
    std::streambuf* saved = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    int code = kExitFailure;
    try {
        code = dispatch(rerun);
    } catch (...) {
        std::cout.rdbuf(saved);
        throw;
    }
    std::cout.rdbuf(saved);
    const std::string expected = m.at("results_checksum").get<std::string>();
    const std::string got = file_checksum(replayed.string());
    json j;
    j["manifest"] = o.manifest;
    j["replayed"] = replayed.string();
    j["expected_checksum"] = expected;
    j["checksum"] = got;
    j["identical"] = expected == got;
    j["exit_code"] = code;
    std::cout << j.dump() << '\n';
    return expected == got ? kExitOk : kExitFailure;
}

void add_process_options(CLI::App* sub, Options& o) {
    sub->add_option("--process", o.proc.process, "fbm | subfbm | bifbm | hermite")
        ->check(CLI::IsMember({"fbm", "subfbm", "bifbm", "hermite"}));
    sub->add_option("--H,--hurst", o.proc.hurst, "Hurst parameter");
    sub->add_option("--K", o.proc.k, "bifBm exponent K");
    sub->add_option("--q,--order", o.proc.order, "Hermite order");
    sub->add_option("--kind", o.proc.kind, "first | second")->check(CLI::IsMember({"first", "second"}));
    sub->add_option("--theta", o.proc.theta, "mean-reversion rate");
}

void add_output_options(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out, "results file (default <output-dir>/<command>.<ext>)");
    sub->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

int dispatch(const std::vector<std::string>& raw) {
    const std::vector<std::string> args = expand_config(raw);
    Options o;
    o.output_dir = default_output_dir();

    CLI::App app{"Ornstein-Uhlenbeck processes driven by fractional-type noise"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(fou::kVersion));
    app.add_option("--output-dir", o.output_dir, "default directory for results (env FOU_OUTPUT_DIR)");
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));

    auto* cov = app.add_subcommand("cov", "stationary autocovariance by lag, or E[X_s X_t]");
    add_process_options(cov, o);
    add_output_options(cov, o);
    cov->add_option("--lags,--lag", o.lags, "lags for E[Z_t Z_0]")->delimiter(',');
    cov->add_option("--s", o.s, "first time for E[X_s X_t]");
    cov->add_option("--times", o.times, "second times for E[X_s X_t]")->delimiter(',');
    cov->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");

    auto* regime = app.add_subcommand("regime", "large-lag decay law of the autocovariance");
    add_process_options(regime, o);
    regime->add_option("--out", o.out, "results file");
    regime->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");

    auto* sim = app.add_subcommand("simulate", "sample an ensemble of paths");
    add_process_options(sim, o);
    sim->add_option("--out", o.out, "ensemble file (default <output-dir>/ensemble.fouens)");
    sim->add_option("--T", o.horizon, "horizon");
    sim->add_option("--points", o.points, "grid points including t=0");
    sim->add_option("--paths", o.paths, "number of paths");
    sim->add_option("--seed", o.seed, "seed");
    sim->add_option("--method", o.method, "automatic | circulant | dense | pathwise");
    sim->add_flag("--stationary", o.stationary, "sample the stationary solution");
    sim->add_option("--burn-in", o.burn_in, "burn-in for --stationary (default 20/theta)");
    sim->add_flag("--noise", o.noise_only, "write the driving noise instead of X");
    sim->add_option("--csv", o.csv, "also write the paths as long-format CSV");

    auto* decay = app.add_subcommand("decay", "Monte-Carlo lag covariances next to the analytic values");
    add_process_options(decay, o);
    add_output_options(decay, o);
    decay->add_option("--lags", o.lags, "lags (multiples of --dt)")->delimiter(',')->required();
    decay->add_option("--paths", o.paths, "number of paths");
    decay->add_option("--seed", o.seed, "seed");
    decay->add_option("--dt", o.dt, "grid step");
    decay->add_option("--burn-in", o.burn_in, "burn-in (default 20/theta)");
    decay->add_option("--method", o.method, "automatic | circulant | dense | pathwise");
    decay->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");

    auto* val = app.add_subcommand("validate", "run validation suites");
    add_output_options(val, o);
    val->add_option("--suite", o.suite, "identities | quadrature | closed_form | asymptotics | montecarlo | all | none");
    val->add_option("--budget", o.budget, "Monte-Carlo workload scale (1 = full)");
    val->add_option("--ensemble", o.ensemble, "ensemble file to re-read and check against its summary");
    val->add_option("--summary", o.summary, "summary or manifest JSON (default <ensemble>.manifest.json)");

    auto* replay = app.add_subcommand("replay", "rerun a manifest and compare results byte for byte");
    replay->add_option("manifest", o.manifest, "manifest JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (cov->parsed()) return run_cov(o, args);
    if (regime->parsed()) return run_regime(o, args);
    if (sim->parsed()) return run_simulate(o, args);
    if (decay->parsed()) return run_decay(o, args);
    if (val->parsed()) return run_validate(o, args);
    return run_replay(o);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fou::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fou::SingularityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
