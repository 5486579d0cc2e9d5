#include "gmcf/io.hpp"

#include <cstdio>

namespace gmcf {

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

nlohmann::json to_json(const FlowParams& params) {
    nlohmann::json j;
    j["dim"] = params.dim;
    j["alpha"] = params.alpha;
    if (params.alpha_odd) j["alpha_odd"] = {params.alpha_odd->q, params.alpha_odd->p};
    j["b"] = params.b;
    switch (params.k.kind()) {
        case BoundarySlope::Kind::Finite: j["k"] = params.k.value(); break;
        case BoundarySlope::Kind::PosInf: j["k"] = "+inf"; break;
        case BoundarySlope::Kind::NegInf: j["k"] = "-inf"; break;
    }
    return j;
}

FlowParams params_from_json(const nlohmann::json& j) {
    std::optional<OddRational> odd;
    if (j.contains("alpha_odd"))
        odd = OddRational{j["alpha_odd"][0].get<int>(), j["alpha_odd"][1].get<int>()};
    BoundarySlope k = BoundarySlope::finite(0.0);
    if (j.contains("k")) {
        if (j["k"].is_string()) {
            const std::string s = j["k"].get<std::string>();
            if (s == "+inf" || s == "inf")
                k = BoundarySlope::pos_inf();
            else if (s == "-inf")
                k = BoundarySlope::neg_inf();
            else
                throw DomainError("params: unrecognized k value '" + s + "'");
        } else {
            k = BoundarySlope::finite(j["k"].get<double>());
        }
    }
    return make_params(j.value("dim", 2), j.value("alpha", 1.0), j.value("b", 0.0), k, odd);
}

void write_profile_csv(const ProfileSolution& sol, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());
    out << "r,zeta,psi,phi\n";
    for (long i = 0; i < sol.r.size(); ++i)
        out << format_sig(sol.r[i]) << ',' << format_sig(sol.zeta[i]) << ','
            << format_sig(sol.psi[i]) << ',' << format_sig(sol.phi[i]) << '\n';
}

nlohmann::json profile_to_json(const ProfileSolution& sol) {
    nlohmann::json j;
    j["params"] = to_json(sol.params);
    j["c"] = sol.c;
    j["regime"] = to_string(sol.regime);
    j["regime_inequalities"] = describe(sol.regime);
    if (sol.r_inf) {
        j["r_inf"] = *sol.r_inf;
        j["r_inf_bracket"] = {sol.r_inf_bracket->lo, sol.r_inf_bracket->hi};
    } else {
        j["r_inf"] = nullptr;
    }
    if (sol.phi_end) j["phi_end"] = *sol.phi_end;
    j["integrator"] = {{"form", sol.eps_form ? "psi_eps" : "zeta"},
                       {"eps", sol.eps},
                       {"tol", sol.tol_used},
                       {"steps_accepted", sol.steps_accepted},
                       {"steps_rejected", sol.steps_rejected},
                       {"hit_cutoff", sol.hit_cutoff},
                       {"stiff_switched", sol.stiff_switched},
                       {"r_end", sol.r_end()},
                       {"nodes", sol.r.size()}};
    if (sol.cross_check) {
        j["cross_check"] = {{"epsilons", sol.cross_check->epsilons},
                            {"deviations", sol.cross_check->deviations},
                            {"tolerance", sol.cross_check->tolerance},
                            {"monotone", sol.cross_check->monotone}};
    }
    return j;
}

nlohmann::json speed_to_json(const SpeedResult& result, const std::string& profile_csv_path) {
    nlohmann::json j;
    j["params"] = to_json(result.params);
    j["case"] = std::string(1, case_letter(result.case_tag));
    j["c_tilde"] = result.c_tilde;
    j["iterations"] = result.iterations;
    j["residual"] = result.residual;
    j["profile_csv_path"] = profile_csv_path;
    return j;
}

nlohmann::json convergence_to_json(const ConvergenceRecord& record) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : record.samples)
        rows.push_back({{"t", s.t},
                        {"raw", s.raw},
                        {"centered", s.centered},
                        {"oscillation", s.oscillation},
                        {"offset", s.offset},
                        {"front_height", s.front_height}});
    return rows;
}

nlohmann::json estimate_report_to_json(const EstimateReport& report) {
    nlohmann::json j;
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : report.windows)
        ws.push_back({{"t_begin", w.t_begin},
                      {"t_end", w.t_end},
                      {"M0", w.M0},
                      {"M1", w.M1},
                      {"M2", w.M2},
                      {"V_lo", w.V_lo},
                      {"V_hi", w.V_hi},
                      {"H_lo", w.H_lo},
                      {"H_hi", w.H_hi}});
    j["windows"] = ws;
    j["growth_flagged"] = report.growth_flagged;
    j["worst_growth"] = report.worst_growth;
    return j;
}

nlohmann::json events_to_json(const std::vector<MonitorEvent>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : events)
        arr.push_back({{"t", e.t}, {"monitor", e.monitor}, {"detail", e.detail}, {"value", e.value}});
    return arr;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open " + path.string());
    out_ << "t,r,u,ur,urr,H\n";
}

void TrajectoryWriter::sample(const EvolutionState& st) {
    for (long i = 0; i < st.r.size(); ++i)
        out_ << format_sig(st.t) << ',' << format_sig(st.r[i]) << ',' << format_sig(st.u[i]) << ','
             << format_sig(st.ur[i]) << ',' << format_sig(st.urr[i]) << ',' << format_sig(st.H[i])
             << '\n';
}

void write_json_doc(const std::filesystem::path& path, const nlohmann::json& config,
                    const nlohmann::json& payload) {
    nlohmann::json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = config;
    doc["result"] = payload;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());
    out << doc.dump(2) << '\n';
}

} // namespace gmcf
