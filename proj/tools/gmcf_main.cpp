// Command-line surface: profile construction, boundary-angle speed selection,
// initial-boundary-value evolution, parameter sweeps and the verification
// suite. Emits CSV/JSON plus gnuplot-ready .plt scripts.

#include "gmcf/diagnostics.hpp"
#include "gmcf/evolve.hpp"
#include "gmcf/io.hpp"
#include "gmcf/profile.hpp"
#include "gmcf/speed.hpp"
#include "gmcf/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDegenerate = 3;

struct CommonArgs {
    int dim = 2;
    double alpha = 1.0;
    std::string alpha_odd;  // "q/p"
    double b = 0.0;
    double k = 1.0;
    std::string k_inf;  // "+" or "-"
    std::string config_path;
    std::string out_dir = ".";
    unsigned long long seed = 20260809ULL;
};

void add_param_flags(CLI::App* cmd, CommonArgs& a, bool with_k) {
    cmd->add_option("--n", a.dim, "space dimension N >= 2");
    cmd->add_option("--alpha", a.alpha, "curvature power");
    cmd->add_option("--alpha-odd", a.alpha_odd, "odd-rational power q/p (e.g. 1/3)");
    cmd->add_option("--b", a.b, "driving force");
    if (with_k) {
        cmd->add_option("--k", a.k, "boundary slope at the wall");
        cmd->add_option("--k-inf", a.k_inf, "infinite boundary slope: + or -")
            ->check(CLI::IsMember({"+", "-"}));
    }
    cmd->add_option("--config", a.config_path, "JSON config file (flags override)");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--seed", a.seed, "seed recorded in outputs and used by randomized runs");
}

// config file < flags; the env var overrides the output root
json load_config(const CommonArgs& a) {
    json cfg = json::object();
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in) throw gmcf::DomainError("config file not found: " + a.config_path);
        in >> cfg;
    }
    return cfg;
}

template <typename T>
T cfg_or(const json& cfg, const std::string& key, T flag_value, const CLI::App* cmd,
         const std::string& flag) {
    if (cmd->count(flag) == 0 && cfg.contains(key)) return cfg[key].get<T>();
    return flag_value;
}

gmcf::FlowParams resolve_params(const CommonArgs& a, const json& cfg, const CLI::App* cmd,
                                bool with_k) {
    CommonArgs r = a;
    r.dim = cfg_or(cfg, "dim", a.dim, cmd, "--n");
    r.alpha = cfg_or(cfg, "alpha", a.alpha, cmd, "--alpha");
    r.b = cfg_or(cfg, "b", a.b, cmd, "--b");
    if (with_k) r.k = cfg_or(cfg, "k", a.k, cmd, "--k");
    std::string odd = a.alpha_odd;
    if (cmd->count("--alpha-odd") == 0 && cfg.contains("alpha_odd") && cfg["alpha_odd"].is_string())
        odd = cfg["alpha_odd"].get<std::string>();

    std::optional<gmcf::OddRational> alpha_odd;
    if (!odd.empty()) {
        int q = 0, p = 0;
        if (std::sscanf(odd.c_str(), "%d/%d", &q, &p) != 2)
            throw gmcf::DomainError("--alpha-odd expects q/p");
        alpha_odd = gmcf::OddRational{q, p};
    }
    gmcf::BoundarySlope k = gmcf::BoundarySlope::finite(r.k);
    if (with_k && !a.k_inf.empty())
        k = a.k_inf == "+" ? gmcf::BoundarySlope::pos_inf() : gmcf::BoundarySlope::neg_inf();
    return gmcf::make_params(r.dim, r.alpha, r.b, k, alpha_odd);
}

fs::path resolve_out_dir(const CommonArgs& a) {
    fs::path dir = a.out_dir;
    if (const char* root = std::getenv("GMCF_OUTPUT_ROOT"))
        dir = fs::path(root) / dir;
    fs::create_directories(dir);
    return dir;
}

json resolved_config(const gmcf::FlowParams& p, const CommonArgs& a, json extra) {
    json cfg;
    cfg["params"] = gmcf::to_json(p);
    cfg["out_dir"] = a.out_dir;
    cfg["seed"] = a.seed;
    for (auto& [key, val] : extra.items()) cfg[key] = val;
    return cfg;
}

void write_plt(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << "# gnuplot script\n" << body;
}

int fail_code(const std::exception& ex) {
    if (dynamic_cast<const gmcf::SignLoss*>(&ex)) return kExitDegenerate;
    if (dynamic_cast<const gmcf::DomainError*>(&ex) || dynamic_cast<const gmcf::RegimeError*>(&ex) ||
        dynamic_cast<const gmcf::CompatibilityError*>(&ex) ||
        dynamic_cast<const gmcf::NotApplicable*>(&ex))
        return kExitInvalid;
    return kExitNumeric;
}

void report_error(const std::exception& ex, int code) {
    std::fprintf(stderr, "error: code=%d reason=%s\n", code, ex.what());
}

// --- profile ---------------------------------------------------------------

int cmd_profile(const CommonArgs& args, const CLI::App* cmd, double c, double r_max, double tol) {
    const json cfg = load_config(args);
    const auto params = resolve_params(args, cfg, cmd, false);
    const auto dir = resolve_out_dir(args);

    gmcf::IntegratorOptions o;
    o.tol = tol;
    o.r_max = r_max;
    auto sol = gmcf::solve_profile(params, c);

    gmcf::write_profile_csv(sol, dir / "profile.csv");
    gmcf::write_json_doc(dir / "profile.json",
                         resolved_config(params, args, {{"c", c}, {"r_max", r_max}, {"tol", tol}}),
                         gmcf::profile_to_json(sol));
    write_plt(dir / "profile.plt",
              "set datafile separator ','\n"
              "set xlabel 'r'\nset ylabel 'phi'\n"
              "plot 'profile.csv' using 1:4 with lines title 'phi(r)', \\\n"
              "     'profile.csv' using 1:3 with lines title 'psi(r)'\n");
    std::printf("profile: regime=%s nodes=%ld r_end=%s%s\n", to_string(sol.regime).c_str(),
                sol.r.size(), gmcf::format_sig(sol.r_end()).c_str(),
                sol.r_inf ? (" r_inf=" + gmcf::format_sig(*sol.r_inf)).c_str() : "");
    return kExitOk;
}

// --- speed -------------------------------------------------------------------

int cmd_speed(const CommonArgs& args, const CLI::App* cmd, double tol_c) {
    const json cfg = load_config(args);
    const auto params = resolve_params(args, cfg, cmd, true);
    const auto dir = resolve_out_dir(args);

    const auto adm = gmcf::admissibility(params);
    if (!adm.ok) throw gmcf::DomainError(adm.rejection);

    gmcf::SpeedOptions o;
    o.tol_c = tol_c;
    auto res = gmcf::translating_solution(params, o);
    gmcf::write_profile_csv(res.profile, dir / "speed_profile.csv");
    gmcf::write_json_doc(dir / "speed.json",
                         resolved_config(params, args, {{"tol_c", tol_c}}),
                         gmcf::speed_to_json(res, "speed_profile.csv"));
    std::printf("speed: case=%c c_tilde=%s residual=%s\n", gmcf::case_letter(res.case_tag),
                gmcf::format_sig(res.c_tilde).c_str(), gmcf::format_sig(res.residual).c_str());
    return kExitOk;
}

// --- evolve ------------------------------------------------------------------

int cmd_evolve(const CommonArgs& args, const CLI::App* cmd, const std::string& preset,
               const std::string& u0_csv, int segments, double t_final, double observe_dt,
               bool allow_none, bool monitor_intersections) {
    const json cfg = load_config(args);
    const auto params = resolve_params(args, cfg, cmd, true);
    const auto dir = resolve_out_dir(args);
    if (!params.k.is_finite())
        throw gmcf::DomainError("evolve: the boundary slope must be finite");
    const double k = params.k.value();

    auto sel = gmcf::translating_solution(params);
    auto ref = gmcf::make_ts_reference(sel.c_tilde, sel.profile, segments);

    Eigen::ArrayXd u0;
    if (!u0_csv.empty()) {
        std::ifstream in(u0_csv);
        if (!in) throw gmcf::DomainError("cannot open u0 file: " + u0_csv);
        std::vector<double> vals;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
            const auto comma = line.find_last_of(',');
            vals.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
        }
        u0 = Eigen::Map<Eigen::ArrayXd>(vals.data(), static_cast<long>(vals.size()));
        segments = static_cast<int>(u0.size()) - 1;
        ref = gmcf::make_ts_reference(sel.c_tilde, sel.profile, segments);
    } else if (preset == "ts") {
        u0 = ref.phi;
    } else if (preset == "quadratic") {
        u0.resize(segments + 1);
        for (int i = 0; i <= segments; ++i) {
            const double r = static_cast<double>(i) / segments;
            u0[i] = 0.5 * k * r * r;
        }
    } else if (preset == "perturbed-ts") {
        u0 = ref.phi;
        for (int i = 0; i <= segments; ++i) {
            const double r = static_cast<double>(i) / segments;
            u0[i] += 0.1 * std::pow(1.0 - r * r, 2.0);
        }
    } else {
        throw gmcf::DomainError("unknown preset '" + preset + "' (ts, quadratic, perturbed-ts)");
    }

    auto st = gmcf::init_state(u0, params);
    gmcf::EvolveOptions eo;
    eo.t_final = t_final;
    eo.observe_dt = observe_dt;
    eo.allow_unmatched_hypothesis = allow_none;

    gmcf::TrajectoryWriter traj(dir / "trajectory.csv");
    std::vector<gmcf::Observer*> observers{&traj};
    std::optional<gmcf::IntersectionMonitor> mon;
    if (monitor_intersections) {
        // family speed between the selected speed and the driving force
        const double c_mon = params.b + 0.1 * (sel.c_tilde - params.b);
        gmcf::IntegratorOptions po;
        po.r_max = 1.0;
        auto fam = gmcf::integrate_zeta(params, c_mon, po);
        Eigen::ArrayXd fam_phi(segments + 1);
        for (int i = 0; i <= segments; ++i)
            fam_phi[i] = fam.phi_at(static_cast<double>(i) / segments);
        const double spread = (u0 - fam_phi).abs().maxCoeff() + 0.5;
        std::vector<double> shifts;
        for (int j = -4; j <= 4; ++j) shifts.push_back(spread * j / 4.0);
        mon.emplace(fam_phi, c_mon, shifts);
        observers.push_back(&*mon);
    }

    auto run = gmcf::evolve(std::move(st), eo, ref, observers);

    const json run_cfg = resolved_config(
        params, args,
        {{"preset", preset}, {"segments", segments}, {"t_final", t_final},
         {"observe_dt", observe_dt}, {"c_tilde", sel.c_tilde}});
    gmcf::write_json_doc(dir / "convergence.json", run_cfg,
                         gmcf::convergence_to_json(run.convergence));
    auto rep = gmcf::assemble_report(run.snapshots, params.k.sign(),
                                     {{0.0, t_final / 2.0}, {0.0, t_final}});
    gmcf::write_json_doc(dir / "estimates.json", run_cfg, gmcf::estimate_report_to_json(rep));
    if (mon)
        gmcf::write_json_doc(dir / "events.json", run_cfg,
                             gmcf::events_to_json(mon->trace().violations));
    write_plt(dir / "convergence.plt",
              "set datafile separator ','\nset xlabel 't'\nset logscale y\n"
              "plot 'convergence.csv' using 1:2 with lines title 'oscillation'\n");
    {
        std::ofstream out(dir / "convergence.csv", std::ios::binary);
        out << "t,oscillation,raw,offset\n";
        for (const auto& s : run.convergence.samples)
            out << gmcf::format_sig(s.t) << ',' << gmcf::format_sig(s.oscillation) << ','
                << gmcf::format_sig(s.raw) << ',' << gmcf::format_sig(s.offset) << '\n';
    }

    std::printf("evolve: hypothesis=%s t=%s steps=%ld oscillation=%s\n",
                to_string(run.hypothesis).c_str(), gmcf::format_sig(run.state.t).c_str(),
                run.state.step_count,
                gmcf::format_sig(run.convergence.samples.back().oscillation).c_str());
    return kExitOk;
}

// --- sweep -------------------------------------------------------------------

int cmd_sweep(const CommonArgs& args, const CLI::App* cmd, const std::string& var, double from,
              double to, int count, int jobs) {
    const json cfg = load_config(args);
    const auto params = resolve_params(args, cfg, cmd, true);
    const auto dir = resolve_out_dir(args);
    if (count <= 0) throw gmcf::DomainError("sweep: empty grid");
    if (var != "c" && var != "k" && var != "b")
        throw gmcf::DomainError("sweep: --var must be c, k or b");
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;

    struct Row {
        double value = 0.0;
        std::string kind;
        double c_tilde = std::nan("");
        double r_inf = std::nan("");
        std::string regime;
        bool ok = false;
        std::string error;
    };
    std::vector<Row> rows(count);

    auto value_at = [&](int i) {
        return count == 1 ? from : from + (to - from) * i / (count - 1.0);
    };

    auto work = [&](int i) {
        Row row;
        row.value = value_at(i);
        try {
            if (var == "c") {
                auto sol = gmcf::integrate_zeta(params, row.value);
                row.regime = to_string(sol.regime);
                row.kind = "profile";
                if (gmcf::finite_radius(sol.regime) && sol.hit_cutoff)
                    row.r_inf = gmcf::estimate_r_infinity(sol).first;
                row.ok = true;
            } else {
                gmcf::FlowParams p = params;
                if (var == "k")
                    p.k = gmcf::BoundarySlope::finite(row.value);
                else
                    p.b = row.value;
                auto res = gmcf::find_speed(p);
                row.kind = "speed";
                row.c_tilde = res.c_tilde;
                row.regime = std::string(1, gmcf::case_letter(res.case_tag));
                row.ok = true;
            }
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        rows[i] = std::move(row);
    };

    std::vector<std::future<void>> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
        pool.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        }));
    for (auto& f : pool) f.get();

    {
        std::ofstream out(dir / "sweep.csv", std::ios::binary);
        out << var << ",c_tilde,r_inf,regime,ok\n";
        for (const auto& row : rows)
            out << gmcf::format_sig(row.value) << ',' << gmcf::format_sig(row.c_tilde) << ','
                << gmcf::format_sig(row.r_inf) << ',' << row.regime << ','
                << (row.ok ? "1" : "0") << '\n';
    }
    write_plt(dir / "sweep.plt",
              "set datafile separator ','\nset xlabel '" + var + "'\n" +
                  "plot 'sweep.csv' using 1:" + (var == "c" ? std::string("3") : std::string("2")) +
                  " with linespoints title '" + (var == "c" ? "R_inf" : "c_tilde") + "'\n");
    gmcf::write_json_doc(dir / "sweep.json",
                         resolved_config(params, args,
                                         {{"var", var}, {"from", from}, {"to", to},
                                          {"count", count}, {"jobs", jobs}}),
                         json{{"rows", count}});
    const long bad = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.ok; });
    std::printf("sweep: %d points, %ld failed\n", count, bad);
    return kExitOk;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const CommonArgs& args, bool quick, const std::vector<std::string>& only) {
    const auto dir = resolve_out_dir(args);
    gmcf::VerifyOptions o;
    o.quick = quick;
    o.seed = args.seed;
    for (const auto& sel : only) {
        bool matched = false;
        for (const auto& [id, name] : gmcf::acceptance_names()) {
            if (sel == std::to_string(id) || name.find(sel) != std::string::npos) {
                o.only.push_back(id);
                matched = true;
            }
        }
        if (!matched) throw gmcf::DomainError("verify: unknown criterion '" + sel + "'");
    }

    const auto results = gmcf::run_acceptance(o);
    json report = json::array();
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %2d %-52s %7.2f s  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.seconds, r.detail.c_str());
        report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                          {"seconds", r.seconds}, {"limit_seconds", r.limit_seconds},
                          {"detail", r.detail}, {"data", r.data}});
        all = all && r.pass;
    }
    json cfg;
    cfg["quick"] = quick;
    cfg["seed"] = args.seed;
    gmcf::write_json_doc(dir / "verify.json", cfg, report);
    std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
    return all ? kExitOk : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"translating solutions of the generalized curvature flow V = H^alpha + b "
                 "in the unit cylinder"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* profile = app.add_subcommand("profile", "integrate one translating-wave profile");
    double c = 1.0, r_max = 0.0, tol = 1e-10;
    add_param_flags(profile, args, false);
    profile->add_option("--c", c, "propagation speed");
    profile->add_option("--r-max", r_max, "radius cap (0 = automatic)");
    profile->add_option("--tol", tol, "integrator tolerance");

    auto* speed = app.add_subcommand("speed", "select the speed matching the boundary slope");
    double tol_c = 1e-10;
    add_param_flags(speed, args, true);
    speed->add_option("--tol-c", tol_c, "bisection tolerance (relative)");

    auto* evolve = app.add_subcommand("evolve", "run the initial-boundary-value problem");
    std::string preset = "ts", u0_csv;
    int segments = 256;
    double t_final = 5.0, observe_dt = 0.25;
    bool allow_none = false, monitor = false;
    add_param_flags(evolve, args, true);
    evolve->add_option("--preset", preset, "initial data: ts, quadratic, perturbed-ts");
    evolve->add_option("--u0", u0_csv, "initial data CSV (last column = u, one row per node)");
    evolve->add_option("--grid", segments, "grid segments (>= 64)");
    evolve->add_option("--t-final", t_final, "final time");
    evolve->add_option("--observe-dt", observe_dt, "snapshot cadence");
    evolve->add_flag("--allow-unmatched", allow_none, "continue when no hypothesis matches");
    evolve->add_flag("--monitor-intersections", monitor, "log intersection counts vs a TS family");

    auto* sweep = app.add_subcommand("sweep", "sweep a parameter and tabulate c_tilde / R_inf");
    std::string var = "c";
    double from = 0.1, to = 5.0;
    int count = 0, jobs = 0;
    add_param_flags(sweep, args, true);
    sweep->add_option("--var", var, "swept variable: c, k or b");
    sweep->add_option("--from", from, "range start");
    sweep->add_option("--to", to, "range end");
    sweep->add_option("--count", count, "number of grid points");
    sweep->add_option("--jobs", jobs, "worker count (0 = hardware)");

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    bool quick = false;
    std::vector<std::string> only;
    add_param_flags(verify, args, false);
    verify->add_flag("--quick", quick, "coarse grids and reduced counts (documented in output)");
    verify->add_option("--only", only, "criterion ids or name fragments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (profile->parsed()) return cmd_profile(args, profile, c, r_max, tol);
        if (speed->parsed()) return cmd_speed(args, speed, tol_c);
        if (evolve->parsed())
            return cmd_evolve(args, evolve, preset, u0_csv, segments, t_final, observe_dt,
                              allow_none, monitor);
        if (sweep->parsed()) return cmd_sweep(args, sweep, var, from, to, count, jobs);
        if (verify->parsed()) return cmd_verify(args, quick, only);
    } catch (const std::exception& ex) {
        const int code = fail_code(ex);
        report_error(ex, code);
        return code;
    }
    return kExitInvalid;
}
