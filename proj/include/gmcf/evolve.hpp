#pragma once

// Method-of-lines evolution of u_t = (H^alpha + b) sqrt(1 + u_r^2) on the
// unit ball with u_r(0) = 0, u_r(1) = k: RK2 in time, second-order central
// differences with ghost nodes in space.

#include "gmcf/core.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace gmcf {

enum class HypothesisTag { A, B, C, D, None };

std::string to_string(HypothesisTag tag);

struct EvolutionState {
    FlowParams params;
    Eigen::ArrayXd r;  // uniform nodes 0 = r_0 < ... < r_M = 1
    Eigen::ArrayXd u;
    double t = 0.0;
    long step_count = 0;

    // caches, consistent with u after init_state and every accepted step
    Eigen::ArrayXd ur, urr, H, ut;

    double dr() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }
    long nodes() const { return r.size(); }
};

/// Samples u0 on a uniform grid with M segments (M >= 64), verifies the
/// endpoint compatibility u0'(0) = 0, u0'(1) = k to O(dr) by one-sided
/// differences, and builds the derivative caches.
EvolutionState init_state(const std::function<double(double)>& u0, const FlowParams& params,
                          int segments);

/// Same from dense nodal samples (size = segments + 1).
EvolutionState init_state(const Eigen::ArrayXd& u0, const FlowParams& params);

/// The first matching initial-data hypothesis, or None.
HypothesisTag check_hypotheses(const EvolutionState& state);

/// Largest stable explicit step: cfl * dr^2 * min(xi^2 / (alpha |H|^{alpha-1})).
double cfl_time_step(const EvolutionState& state, double cfl = 0.2);

/// One RK2 step. Throws CFLViolation when dt exceeds the stability bound and
/// SignLoss when H degenerates (approaches zero or changes sign) on the grid.
void step(EvolutionState& state, double dt);

/// The translating solution the run is compared against.
struct TsReference {
    double c_tilde = 0.0;
    Eigen::ArrayXd phi;  // profile sampled on the evolution grid
};

struct ConvergenceSample {
    double t = 0.0;
    double raw = 0.0;          // sup |u - phi - c t|
    double centered = 0.0;     // sup |u - phi - c t - mean|
    double oscillation = 0.0;  // sup - inf of (u - phi - c t)
    double offset = 0.0;       // spatial mean of (u - phi - c t)
    double front_height = 0.0; // u(0, t)
};

struct ConvergenceRecord {
    std::vector<ConvergenceSample> samples;

    /// Front speed (u(0,t2) - u(0,t1)) / (t2 - t1) from the nearest samples.
    double front_speed(double t_from, double t_to) const;
};

/// Grid-wise extrema of one snapshot, the raw material of estimate reports.
struct SnapshotStats {
    double t = 0.0;
    double dev0_absmax = 0.0;  // sup |u - c t| (0 when no reference speed)
    double ur_min = 0.0, ur_max = 0.0;
    double urr_absmax = 0.0;
    double ut_min = 0.0, ut_max = 0.0;
    double H_min = 0.0, H_max = 0.0;
};

/// Pull-based observer invoked synchronously at snapshot times.
struct Observer {
    virtual ~Observer() = default;
    virtual void sample(const EvolutionState& state) = 0;
};

struct EvolveOptions {
    double t_final = 1.0;
    double cfl = 0.2;
    double observe_dt = 0.05;
    bool allow_unmatched_hypothesis = false;
};

struct EvolveResult {
    EvolutionState state;
    HypothesisTag hypothesis = HypothesisTag::None;
    ConvergenceRecord convergence;
    std::vector<SnapshotStats> snapshots;
};

/// Steps to t_final with the CFL-bounded dt, sampling records and observers
/// at the configured cadence (always including t = 0 and the final time).
EvolveResult evolve(EvolutionState state, const EvolveOptions& opts,
                    const std::optional<TsReference>& ts = std::nullopt,
                    const std::vector<Observer*>& observers = {});

/// (raw deviation, oscillation) of u - phi - c t against the reference.
std::pair<double, double> convergence_metric(const EvolutionState& state, const TsReference& ts);

/// TS profile resampled onto a uniform M-segment grid.
TsReference make_ts_reference(double c_tilde, const class ProfileSolution& profile, int segments);

} // namespace gmcf
