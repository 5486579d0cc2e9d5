#pragma once

// Cross-cutting monitors: multi-integrator equivalence, intersection-count
// traces against a translating-solution family, and the assembly of observed
// uniform-bound reports.

#include "gmcf/core.hpp"
#include "gmcf/evolve.hpp"
#include "gmcf/profile.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gmcf {

// ---------------------------------------------------------------------------
// Observed uniform-in-time bounds
// ---------------------------------------------------------------------------

struct WindowExtrema {
    double t_begin = 0.0, t_end = 0.0;
    double M0 = 0.0;              // sup |u - c t|
    double M1 = 0.0;              // sup |u_r|
    double M2 = 0.0;              // sup |u_rr|
    double V_lo = 0.0, V_hi = 0.0;  // inf/sup of u_t
    double H_lo = 0.0, H_hi = 0.0;  // inf/sup of H sgn(k)
};

struct EstimateReport {
    std::vector<WindowExtrema> windows;
    bool growth_flagged = false;  // an extremum moved > 1% between windows
    double worst_growth = 0.0;
};

/// Extrema per requested time window from run snapshots; flags growth of any
/// bound beyond 1% from each window to the next (windows are expected
/// nested, e.g. [0, T/2] then [0, T]).
EstimateReport assemble_report(const std::vector<SnapshotStats>& snapshots, int sign_k,
                               const std::vector<std::pair<double, double>>& windows);

// ---------------------------------------------------------------------------
// Intersection counting
// ---------------------------------------------------------------------------

/// Transversal sign changes of f over the grid; values within the dead band
/// 1e-12 * max|f| are treated as zero and skipped.
int sign_changes(const Eigen::ArrayXd& f);

struct MonitorEvent {
    double t = 0.0;
    std::string monitor;
    std::string detail;
    double value = 0.0;
};

struct IntersectionTrace {
    double c = 0.0;               // family speed
    std::vector<double> shifts;   // vertical offsets d
    std::vector<double> times;
    std::vector<std::vector<int>> counts;    // one row per time
    std::vector<MonitorEvent> violations;    // count increases (logged, not fatal)
};

/// Observer counting sign changes of u(.,t) - (phi_mon + c t + d) for a
/// family of shifts d; count increases are logged as events.
class IntersectionMonitor : public Observer {
public:
    IntersectionMonitor(Eigen::ArrayXd phi_mon, double c, std::vector<double> shifts);
    void sample(const EvolutionState& state) override;
    const IntersectionTrace& trace() const { return trace_; }

private:
    Eigen::ArrayXd phi_;
    IntersectionTrace trace_;
};

// ---------------------------------------------------------------------------
// Integrator equivalence
// ---------------------------------------------------------------------------

struct OracleEquivalenceReport {
    std::vector<double> epsilons;
    std::vector<double> deviations;  // max |psi_eps - psi| on the shared interval
    double tolerance = 0.0;
    double worst_radius = 0.0;
    bool monotone = false;
    bool pass = false;
};

/// Profiles at eps in {1e-2, 1e-3, 1e-4} against the zeta-form profile:
/// deviations must decrease monotonically in eps and the finest one must lie
/// within max(10 tol, the gap between the two finest regularizations).
/// Throws CrossCheckFailure (naming the worst radius) when violated.
OracleEquivalenceReport oracle_equivalence(const FlowParams& params, double c,
                                           const IntegratorOptions& opts = {});

} // namespace gmcf
