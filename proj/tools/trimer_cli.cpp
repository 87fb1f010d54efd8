// Command-line front end: steady states, phase sweeps, exact-bath runs and
// derived studies, written as CSV tables plus a JSON run manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "trimer/analysis.hpp"
#include "trimer/closed.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace trimer;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct Settings {
    TrimerParams p;
    ExactOptions exact;
    std::string out_dir;
    // Subcommand extras.
    int points = 61;
    std::string solver = "lindblad";
    int site = 2;
    double jt_max = 6.0;
    double lo = 0.2, hi = 1.6, tol = 0.02;
    std::vector<double> ratios{0.1, 0.6, 1.2};
    int grid_n = 41;
    double grid_range = 0.3;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void load_config(const std::string& path, Settings& s) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const std::map<std::string, double*> keys{
        {"omega", &s.p.omega},       {"J", &s.p.J},
        {"theta", &s.p.theta},       {"gamma", &s.p.gamma},
        {"T_hot", &s.p.T_hot},       {"T_cold", &s.p.T_cold},
        {"delta", &s.p.delta},       {"eps", &s.p.eps},
        {"omega_c", &s.exact.omega_c}, {"t_ss", &s.exact.t_ss},
        {"jt_max", &s.jt_max},       {"lo", &s.lo},
        {"hi", &s.hi},               {"tol", &s.tol},
        {"grid_range", &s.grid_range}};
    const std::map<std::string, int*> int_keys{{"bath_N", &s.exact.N},
                                               {"points", &s.points},
                                               {"site", &s.site},
                                               {"grid_n", &s.grid_n}};
    for (const auto& [key, value] : j.items()) {
        if (auto it = keys.find(key); it != keys.end()) {
            if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
            *it->second = value.get<double>();
        } else if (auto ii = int_keys.find(key); ii != int_keys.end()) {
            if (!value.is_number_integer())
                throw ConfigError("config key '" + key + "' must be an integer");
            *ii->second = value.get<int>();
        } else if (key == "out_dir") {
            s.out_dir = value.get<std::string>();
        } else if (key == "solver") {
            s.solver = value.get<std::string>();
        } else if (key == "ratios") {
            s.ratios = value.get<std::vector<double>>();
        } else {
            throw ConfigError("unknown config key: '" + key + "'");
        }
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

class CsvWriter {
  public:
    CsvWriter(const fs::path& path, const std::string& units,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw std::ios_base::failure("cannot open output file: " + path.string());
        out_ << "# units: " << units << "\n";
        for (size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i)
            out_ << fmt(values[i]) << (i + 1 < values.size() ? "," : "\n");
    }
    void close() {
        out_.close();
        if (out_.fail()) throw std::ios_base::failure("write failure on CSV output");
    }

  private:
    std::ofstream out_;
};

json params_json(const Settings& s) {
    json j;
    j["omega"] = s.p.omega;
    j["J"] = s.p.J;
    j["theta"] = s.p.theta;
    j["gamma"] = s.p.gamma;
    j["T_hot"] = s.p.T_hot;
    j["T_cold"] = s.p.T_cold;
    j["delta"] = s.p.delta;
    j["eps"] = s.p.eps;
    return j;
}

json exact_json(const Settings& s) {
    json j;
    j["bath_N"] = s.exact.N;
    j["omega_c"] = s.exact.omega_c > 0 ? s.exact.omega_c : 3.0 * s.p.omega;
    j["t_ss"] = s.exact.t_ss > 0 ? s.exact.t_ss : 6.0 / s.p.gamma;
    return j;
}

void write_manifest(const fs::path& path, const std::string& command, json resolved,
                    const std::vector<std::string>& outputs, double wall_s) {
    json m;
    m["command"] = command;
    m["solver_version"] = kVersion;
    m["parameters"] = std::move(resolved);
    m["outputs"] = outputs;
    m["wall_time_s"] = wall_s;
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open manifest: " + path.string());
    out << m.dump(2) << "\n";
    if (out.fail()) throw std::ios_base::failure("write failure on manifest");
}

fs::path resolve_out_dir(Settings& s) {
    if (s.out_dir.empty()) {
        if (const char* env = std::getenv("TRIMER_OUT_DIR")) s.out_dir = env;
    }
    if (s.out_dir.empty()) s.out_dir = ".";
    fs::path dir(s.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory: " + dir.string());
    return dir;
}

std::vector<double> steady_row(double theta, const SteadyStateReport& r,
                               const TrimerParams& p) {
    const double gw = p.gamma * p.omega;
    return {theta,
            r.current_21 / p.J,
            r.current_23 / p.J,
            r.current_13 / p.J,
            r.heat_currents[0] / gw,
            r.heat_currents[1] / gw,
            r.heat_currents[2] / gw,
            r.T_eff[0] / p.omega,
            r.T_eff[1] / p.omega,
            r.T_eff[2] / p.omega,
            r.entropy_production / gw};
}

const std::vector<std::string> kSteadyCols{
    "theta", "J21", "J23", "J13", "JQ1", "JQ2", "JQ3",
    "Teff1", "Teff2", "Teff3", "entropy_production"};
const char* kSteadyUnits =
    "theta rad; J* in units of J; JQ* and entropy_production in units of "
    "gamma*omega; Teff* in units of omega";

int run_steady(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const auto gauge = LinkPhaseAssignment::default_gauge(s.p.theta);
    const SteadyStateReport r = steady_state(s.p, gauge);
    CsvWriter csv(dir / "steady.csv", kSteadyUnits, kSteadyCols);
    csv.row(steady_row(s.p.theta, r, s.p));
    csv.close();
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "steady_manifest.json", cmd_name, params_json(s),
                   {"steady.csv"}, wall);
    std::cout << "steady: J13/J = " << fmt(r.current_13 / s.p.J) << "\n";
    return 0;
}

int run_sweep(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const auto thetas = theta_grid(s.points);
    json resolved = params_json(s);
    resolved["points"] = s.points;
    resolved["solver"] = s.solver;
    if (s.solver == "lindblad") {
        const auto sweep = sweep_theta_lindblad(s.p, thetas);
        CsvWriter csv(dir / "sweep_theta.csv", kSteadyUnits, kSteadyCols);
        for (size_t i = 0; i < sweep.size(); ++i)
            csv.row(steady_row(thetas[i], sweep[i], s.p));
        csv.close();
    } else if (s.solver == "exact") {
        resolved.update(exact_json(s));
        const auto sweep = sweep_theta_exact(s.p, thetas, s.exact);
        CsvWriter csv(dir / "sweep_theta.csv",
                      "theta rad; J* in units of J; drift relative",
                      {"theta", "J21", "J23", "J13", "drift"});
        for (size_t i = 0; i < sweep.size(); ++i)
            csv.row({thetas[i], sweep[i].current_21 / s.p.J, sweep[i].current_23 / s.p.J,
                     sweep[i].current_13 / s.p.J, sweep[i].drift});
        csv.close();
    } else {
        throw ConfigError("solver must be 'lindblad' or 'exact'");
    }
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "sweep_theta_manifest.json", cmd_name, resolved,
                   {"sweep_theta.csv"}, wall);
    return 0;
}

int run_closed(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    std::vector<double> times(static_cast<size_t>(s.points));
    for (int i = 0; i < s.points; ++i)
        times[static_cast<size_t>(i)] = s.jt_max * i / (s.points - 1) / s.p.J;
    const auto gauge = LinkPhaseAssignment::default_gauge(s.p.theta);
    const ClosedRun run = evolve_closed(s.p, gauge, s.site, times);
    CsvWriter csv(dir / "closed.csv", "t in 1/J (Jt column dimensionless); J* in units of J",
                  {"Jt", "J21", "J23", "J13", "n1", "n2", "n3"});
    for (size_t k = 0; k < times.size(); ++k)
        csv.row({times[k] * s.p.J, run.currents[k][0] / s.p.J, run.currents[k][1] / s.p.J,
                 run.currents[k][2] / s.p.J, run.populations[k][0], run.populations[k][1],
                 run.populations[k][2]});
    csv.close();
    json resolved = params_json(s);
    resolved["site"] = s.site;
    resolved["points"] = s.points;
    resolved["jt_max"] = s.jt_max;
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "closed_manifest.json", cmd_name, resolved, {"closed.csv"}, wall);
    return 0;
}

int run_exact(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const auto gauge = LinkPhaseAssignment::default_gauge(s.p.theta);
    const ExactCurrents c = quasi_steady_currents(s.p, gauge, s.exact);
    CsvWriter csv(dir / "exact.csv", "theta rad; J* in units of J; times in 1/omega",
                  {"theta", "J21", "J23", "J13", "drift", "t_ss", "t_recurrence"});
    csv.row({s.p.theta, c.current_21 / s.p.J, c.current_23 / s.p.J, c.current_13 / s.p.J,
             c.drift, c.t_ss, c.t_recurrence});
    csv.close();
    json resolved = params_json(s);
    resolved.update(exact_json(s));
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "exact_manifest.json", cmd_name, resolved, {"exact.csv"}, wall);
    std::cout << "exact: J13/J = " << fmt(c.current_13 / s.p.J) << "\n";
    return 0;
}

int run_critical(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const CriticalRatio cr = find_critical_ratio(s.p, s.lo, s.hi, s.tol, s.exact);
    CsvWriter csv(dir / "critical_ratio.csv", "ratio = J/gamma; J13 in units of J",
                  {"ratio", "J13"});
    for (const auto& [r, v] : cr.evaluations) csv.row({r, v});
    csv.close();
    json resolved = params_json(s);
    resolved.update(exact_json(s));
    resolved["lo"] = s.lo;
    resolved["hi"] = s.hi;
    resolved["tol"] = s.tol;
    resolved["critical_ratio"] = cr.ratio;
    resolved["bracket"] = {cr.lo, cr.hi};
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "critical_ratio_manifest.json", cmd_name, resolved,
                   {"critical_ratio.csv"}, wall);
    std::cout << "critical ratio J/gamma = " << fmt(cr.ratio) << "\n";
    return 0;
}

int run_fidelity(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const auto pts = fidelity_comparison(s.p, s.ratios, theta_grid(s.points), s.exact);
    CsvWriter csv(dir / "fidelity.csv", "ratio = J/gamma; theta rad; fidelity in [0, 1]",
                  {"ratio", "theta", "fidelity"});
    for (const auto& pt : pts) csv.row({pt.ratio, pt.theta, pt.fidelity});
    csv.close();
    json resolved = params_json(s);
    resolved.update(exact_json(s));
    resolved["ratios"] = s.ratios;
    resolved["points"] = s.points;
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "fidelity_manifest.json", cmd_name, resolved, {"fidelity.csv"},
                   wall);
    return 0;
}

int run_error_grid(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    const ErrorGrid grid = error_grid(s.p, s.grid_n, s.grid_n, s.grid_range);
    CsvWriter csv(dir / "error_grid.csv",
                  "delta, eps dimensionless; dark_leak = |J13(pi)|/J; swap_ratio "
                  "= J23(2pi)/J21(pi)",
                  {"delta", "eps", "dark_leak", "swap_ratio"});
    for (size_t i = 0; i < grid.deltas.size(); ++i)
        for (size_t j = 0; j < grid.epss.size(); ++j)
            csv.row({grid.deltas[i], grid.epss[j],
                     grid.dark_leak(static_cast<int>(i), static_cast<int>(j)),
                     grid.swap_ratio(static_cast<int>(i), static_cast<int>(j))});
    csv.close();
    json resolved = params_json(s);
    resolved["grid_n"] = s.grid_n;
    resolved["grid_range"] = s.grid_range;
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "error_grid_manifest.json", cmd_name, resolved,
                   {"error_grid.csv"}, wall);
    return 0;
}

int run_benchmark(Settings& s, const std::string& cmd_name) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = resolve_out_dir(s);
    if (s.p.theta == 0.0) s.p.theta = std::numbers::pi / 2.0;
    const BenchmarkReport rep = benchmark_exact(s.p, s.exact);
    CsvWriter csv(dir / "benchmark.csv",
                  "x = omega_c/omega, N, or t_ss*gamma per table; J13 in units of J; "
                  "deviation relative to the master equation",
                  {"table", "x", "J13", "deviation"});
    auto rows = [&](double tag, const std::vector<BenchmarkRow>& table) {
        for (const auto& r : table) csv.row({tag, r.x, r.current_13 / s.p.J, r.deviation});
    };
    rows(0, rep.omega_c_scan);  // table 0: cutoff scan
    rows(1, rep.size_scan);     // table 1: bath size scan
    rows(2, rep.time_scan);     // table 2: plateau time scan
    csv.close();
    json resolved = params_json(s);
    resolved.update(exact_json(s));
    resolved["reference_J13"] = rep.reference_13 / s.p.J;
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir / "benchmark_manifest.json", cmd_name, resolved, {"benchmark.csv"},
                   wall);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-controlled heat transport in a three-mode bosonic loop"};
    app.require_subcommand(1);

    Settings s;
    std::string config_path;

    // Config file loads first so explicit flags can override it.
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            load_config(config_path, s);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
    }

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--omega", s.p.omega, "mode frequency");
        cmd->add_option("--J", s.p.J, "hopping amplitude");
        cmd->add_option("--theta", s.p.theta, "loop phase in radians");
        cmd->add_option("--gamma", s.p.gamma, "bath coupling rate");
        cmd->add_option("--T-hot", s.p.T_hot, "hot bath temperature");
        cmd->add_option("--T-cold", s.p.T_cold, "cold bath temperature");
        cmd->add_option("--delta", s.p.delta, "hopping imbalance");
        cmd->add_option("--eps", s.p.eps, "damping imbalance");
        cmd->add_option("--out", s.out_dir, "output directory (or TRIMER_OUT_DIR)");
    };
    auto add_exact = [&](CLI::App* cmd) {
        cmd->add_option("--bath-N", s.exact.N, "bath modes per reservoir");
        cmd->add_option("--omega-c", s.exact.omega_c, "bath cutoff frequency");
        cmd->add_option("--t-ss", s.exact.t_ss, "quasi-steady sampling time");
        cmd->add_flag("--ignore-recurrence-guard", s.exact.ignore_recurrence_guard,
                      "allow t_ss past the recurrence estimate");
    };

    CLI::App* steady = app.add_subcommand("steady", "single master-equation steady state");
    add_common(steady);

    CLI::App* sweep = app.add_subcommand("sweep-theta", "steady-state sweep over the loop phase");
    add_common(sweep);
    add_exact(sweep);
    sweep->add_option("--points", s.points, "grid points over [0, 2 pi]");
    sweep->add_option("--solver", s.solver, "lindblad or exact");

    CLI::App* closed = app.add_subcommand("closed", "unitary single-excitation run");
    add_common(closed);
    closed->add_option("--site", s.site, "initially excited site (1-3)");
    closed->add_option("--points", s.points, "time samples");
    closed->add_option("--jt-max", s.jt_max, "end time in units of 1/J");

    CLI::App* exact = app.add_subcommand("exact", "finite-bath quasi-steady currents");
    add_common(exact);
    add_exact(exact);

    CLI::App* critical = app.add_subcommand("critical-ratio",
                                            "bisect the current-reversal coupling");
    add_common(critical);
    add_exact(critical);
    critical->add_option("--lo", s.lo, "bracket low end (J/gamma)");
    critical->add_option("--hi", s.hi, "bracket high end (J/gamma)");
    critical->add_option("--tol", s.tol, "bracket width tolerance");

    CLI::App* fidelity = app.add_subcommand("fidelity",
                                            "reduced-state fidelity, both solvers");
    add_common(fidelity);
    add_exact(fidelity);
    fidelity->add_option("--ratios", s.ratios, "J/gamma values");
    fidelity->add_option("--points", s.points, "theta grid points");

    CLI::App* egrid = app.add_subcommand("error-grid", "fabrication-error sensitivity grid");
    add_common(egrid);
    egrid->add_option("--grid-n", s.grid_n, "points per axis");
    egrid->add_option("--range", s.grid_range, "half-width of the delta/eps axes");

    CLI::App* bench = app.add_subcommand("benchmark", "exact-bath convergence tables");
    add_common(bench);
    add_exact(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        s.p.validate();
        if (steady->parsed()) return run_steady(s, "steady");
        if (sweep->parsed()) return run_sweep(s, "sweep-theta");
        if (closed->parsed()) return run_closed(s, "closed");
        if (exact->parsed()) return run_exact(s, "exact");
        if (critical->parsed()) return run_critical(s, "critical-ratio");
        if (fidelity->parsed()) return run_fidelity(s, "fidelity");
        if (egrid->parsed()) return run_error_grid(s, "error-grid");
        if (bench->parsed()) return run_benchmark(s, "benchmark");
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
