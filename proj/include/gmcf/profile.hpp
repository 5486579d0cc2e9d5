#pragma once

// Translating-wave profiles Phi(r; c, b): integration of the first-order
// profile ODE in its zeta form (primary) and epsilon-regularized psi form
// (oracle), maximal-radius estimation and the closed-form asymptotics.

#include "gmcf/core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace gmcf {

struct IntegratorOptions {
    double dr_init = 0.0;       // first step; 0 = auto from the series scale
    double tol = 1e-10;         // local error tolerance (adaptive controller)
    double zeta_cutoff = 1e-6;  // stop when |zeta| >= 1 - zeta_cutoff
    double r_max = 0.0;         // radius cap; 0 = auto (natural blow-up span,
                                //   or 10 in the infinite-radius regimes)
    double dr_max = 0.0;        // max step; 0 = auto (span/512)
};

struct RadiusBracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Comparison record between the zeta-form profile and its eps-regularized
/// approximations (deviations measured in psi on the shared interval).
struct CrossCheck {
    std::vector<double> epsilons;
    std::vector<double> deviations;
    double tolerance = 0.0;  // max(10*tol, gap between the two finest eps)
    bool monotone = false;   // deviations decrease as eps decreases
};

/// A sampled profile. Grids are the accepted integration nodes, r[0] = 0.
struct ProfileSolution {
    FlowParams params;
    double c = 0.0;
    RegimeTag regime = RegimeTag::CEqB;

    Eigen::ArrayXd r, zeta, psi, phi;

    std::optional<double> r_inf;                 // estimated maximal radius
    std::optional<RadiusBracket> r_inf_bracket;  // [cutoff node, extrapolate + step]
    std::optional<double> phi_end;               // Phi(R_inf - 0)

    // integrator metadata
    bool eps_form = false;   // true when produced by the regularized psi form
    double eps = 0.0;
    double tol_used = 0.0;
    double last_step = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    bool hit_cutoff = false;
    bool stiff_switched = false;  // implicit fallback engaged at least once

    std::optional<CrossCheck> cross_check;

    double r_end() const { return r.size() ? r[r.size() - 1] : 0.0; }

    /// Cubic Hermite interpolation on the stored nodes.
    double psi_at(double radius) const;
    double phi_at(double radius) const;
    double zeta_at(double radius) const;

private:
    friend ProfileSolution finalize_solution(ProfileSolution sol);
    Eigen::ArrayXd psi_deriv_;   // dPsi/dr at nodes, for Hermite evaluation
    Eigen::ArrayXd zeta_deriv_;  // dzeta/dr at nodes
};

/// Proved enclosure of R_inf for the finite-radius regimes; throws
/// NotApplicable otherwise. eps_form selects the regularized-problem bounds.
RadiusBracket r_infinity_theory_bounds(const FlowParams& params, double c,
                                       RegimeTag regime, bool eps_form = false);

/// Primary construction: adaptive integration of the zeta equation
///   zeta' = spow(c sqrt(1-zeta^2) - b, 1/alpha) - (N-1) zeta / r
/// from the series start at r = 0, stopping at the cutoff or r_max.
/// Does not attach r_inf / phi_end (see solve_profile).
ProfileSolution integrate_zeta(const FlowParams& params, double c,
                               const IntegratorOptions& opts = {});

/// Oracle: the eps-regularized psi equation integrated as a regular IVP.
ProfileSolution integrate_psi_epsilon(const FlowParams& params, double c, double eps,
                                      const IntegratorOptions& opts = {});

/// integrate_zeta + regime tag + R_inf estimate + endpoint value + the
/// eps-oracle cross-check at eps in {1e-2, 1e-3, 1e-4}.
ProfileSolution solve_profile(const FlowParams& params, double c,
                              const IntegratorOptions& opts = {});

/// Extrapolated maximal radius from the endpoint slope law
///   1 - |zeta| ~ L (R_inf - r),  L = |b|^{1/alpha} - (N-1)/R_inf,
/// solved self-consistently; bracket clamped to the proved bounds.
std::pair<double, RadiusBracket> estimate_r_infinity(const ProfileSolution& sol);

/// Closed-form asymptote: for b = 0 the power-law height
/// c r^{alpha+1} / ((alpha+1)(N-1)^alpha); for c > b > 0 the limit slope
/// sqrt(c^2-b^2)/b. NotApplicable in other regimes.
double asymptotic_value(const FlowParams& params, double c, double r);

/// Psi0 * r - Phi(r) for a cone-regime profile (positive, unbounded for
/// 0 < alpha <= 1).
double v_shape_defect(const ProfileSolution& sol, double r);

struct MonotonicityReport {
    Eigen::ArrayXd radii;
    Eigen::ArrayXd margins;  // psi(r; c2) - psi(r; c1), expected > 0
    std::optional<double> r_inf_c1, r_inf_c2;
    bool r_inf_ordered = true;
};

/// Verifies the strict ordering of profiles in c at the sample radii and the
/// R_inf ordering in the finite-radius regimes. Throws OrderingViolation
/// (carrying the radius) when the ordering fails beyond integrator tolerance.
MonotonicityReport monotonicity_probe(const FlowParams& params, double c1, double c2,
                                      const Eigen::ArrayXd& r_samples,
                                      const IntegratorOptions& opts = {});

} // namespace gmcf
