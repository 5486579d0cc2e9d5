#include "gmcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gmcf {

EstimateReport assemble_report(const std::vector<SnapshotStats>& snapshots, int sign_k,
                               const std::vector<std::pair<double, double>>& windows) {
    if (windows.size() < 2)
        throw DomainError("assemble_report: at least two time windows required");
    if (snapshots.empty()) throw DomainError("assemble_report: no snapshots");

    EstimateReport rep;
    const double s = sign_k >= 0 ? 1.0 : -1.0;
    for (auto [t0, t1] : windows) {
        WindowExtrema w;
        w.t_begin = t0;
        w.t_end = t1;
        bool any = false;
        for (const auto& snap : snapshots) {
            if (snap.t < t0 - 1e-12 || snap.t > t1 + 1e-12) continue;
            const double h_lo = s > 0 ? snap.H_min : -snap.H_max;
            const double h_hi = s > 0 ? snap.H_max : -snap.H_min;
            const double m1 = std::max(std::abs(snap.ur_min), std::abs(snap.ur_max));
            if (!any) {
                w.M0 = snap.dev0_absmax;
                w.M1 = m1;
                w.M2 = snap.urr_absmax;
                w.V_lo = snap.ut_min;
                w.V_hi = snap.ut_max;
                w.H_lo = h_lo;
                w.H_hi = h_hi;
                any = true;
            } else {
                w.M0 = std::max(w.M0, snap.dev0_absmax);
                w.M1 = std::max(w.M1, m1);
                w.M2 = std::max(w.M2, snap.urr_absmax);
                w.V_lo = std::min(w.V_lo, snap.ut_min);
                w.V_hi = std::max(w.V_hi, snap.ut_max);
                w.H_lo = std::min(w.H_lo, h_lo);
                w.H_hi = std::max(w.H_hi, h_hi);
            }
        }
        if (!any) throw DomainError("assemble_report: a window holds no snapshot");
        rep.windows.push_back(w);
    }

    // uniform-in-time bounds admit no growth from window to window
    auto growth_up = [](double early, double late) {
        return (late - early) / std::max(std::abs(early), 1e-12);
    };
    for (std::size_t i = 1; i < rep.windows.size(); ++i) {
        const auto& a = rep.windows[i - 1];
        const auto& b = rep.windows[i];
        double g = std::max({growth_up(a.M0, b.M0), growth_up(a.M1, b.M1),
                             growth_up(a.M2, b.M2), growth_up(b.V_lo, a.V_lo),
                             growth_up(a.V_hi, b.V_hi), growth_up(b.H_lo, a.H_lo),
                             growth_up(a.H_hi, b.H_hi)});
        rep.worst_growth = std::max(rep.worst_growth, g);
    }
    rep.growth_flagged = rep.worst_growth > 0.01;
    return rep;
}

int sign_changes(const Eigen::ArrayXd& f) {
    const double band = 1e-12 * f.abs().maxCoeff();
    int count = 0;
    int prev = 0;
    for (long i = 0; i < f.size(); ++i) {
        const int s = f[i] > band ? 1 : (f[i] < -band ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

IntersectionMonitor::IntersectionMonitor(Eigen::ArrayXd phi_mon, double c,
                                         std::vector<double> shifts)
    : phi_(std::move(phi_mon)) {
    trace_.c = c;
    trace_.shifts = std::move(shifts);
}

void IntersectionMonitor::sample(const EvolutionState& state) {
    if (phi_.size() != state.u.size())
        throw GridMismatch("intersection monitor: family grid size mismatch");
    std::vector<int> row;
    row.reserve(trace_.shifts.size());
    const Eigen::ArrayXd base = state.u - phi_ - trace_.c * state.t;
    for (std::size_t j = 0; j < trace_.shifts.size(); ++j) {
        const int n = sign_changes(base - trace_.shifts[j]);
        if (!trace_.counts.empty() && n > trace_.counts.back()[j])
            trace_.violations.push_back({state.t, "intersection_count",
                                         "count increased for shift " +
                                             std::to_string(trace_.shifts[j]),
                                         static_cast<double>(n)});
        row.push_back(n);
    }
    trace_.times.push_back(state.t);
    trace_.counts.push_back(std::move(row));
}

OracleEquivalenceReport oracle_equivalence(const FlowParams& params, double c,
                                           const IntegratorOptions& opts) {
    OracleEquivalenceReport rep;
    rep.epsilons = {1e-2, 1e-3, 1e-4};

    ProfileSolution base = integrate_zeta(params, c, opts);
    double r_edge = base.r_end();
    if (finite_radius(base.regime) && base.hit_cutoff)
        r_edge = estimate_r_infinity(base).first;

    std::vector<ProfileSolution> eps_sols;
    for (double eps : rep.epsilons) {
        IntegratorOptions o = opts;
        o.r_max = std::min(opts.r_max > 0 ? opts.r_max : r_edge, r_edge);
        eps_sols.push_back(integrate_psi_epsilon(params, c, eps, o));
    }

    const int n_samp = 129;
    for (const auto& es : eps_sols) {
        const double hi = std::min({0.9 * r_edge, 0.98 * es.r_end(), base.r_end()});
        double dev = 0.0, worst_r = 0.0;
        for (int j = 1; j <= n_samp; ++j) {
            const double rj = hi * j / n_samp;
            const double d = std::abs(es.psi_at(rj) - base.psi_at(rj));
            if (d > dev) {
                dev = d;
                worst_r = rj;
            }
        }
        rep.deviations.push_back(dev);
        rep.worst_radius = worst_r;
    }
    rep.monotone =
        rep.deviations[0] >= rep.deviations[1] && rep.deviations[1] >= rep.deviations[2];

    double gap = 0.0;
    {
        const auto& mid = eps_sols[1];
        const auto& fine = eps_sols[2];
        const double hi =
            std::min({0.9 * r_edge, 0.98 * mid.r_end(), 0.98 * fine.r_end(), base.r_end()});
        for (int j = 1; j <= n_samp; ++j) {
            const double rj = hi * j / n_samp;
            gap = std::max(gap, std::abs(mid.psi_at(rj) - fine.psi_at(rj)));
        }
    }
    rep.tolerance = std::max(10.0 * opts.tol, gap);
    rep.pass = rep.monotone && rep.deviations[2] <= rep.tolerance;
    if (!rep.pass)
        throw CrossCheckFailure("integrator equivalence failed near r = " +
                                std::to_string(rep.worst_radius) +
                                " (deviation " + std::to_string(rep.deviations[2]) + ")");
    return rep;
}

} // namespace gmcf
