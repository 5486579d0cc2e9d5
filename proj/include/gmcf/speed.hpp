#pragma once

// Boundary-angle matching: the unique speed c with Psi(1; c, b) = k, the
// radius-matching problem R_inf(c, b) = R, and the selected translating
// solution on the unit cylinder.

#include "gmcf/core.hpp"
#include "gmcf/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gmcf {

/// Admissibility cases for the boundary-angle problem.
enum class SpeedCase { A, B, C, D };

char case_letter(SpeedCase c);

struct Admissibility {
    bool ok = false;
    SpeedCase tag = SpeedCase::A;
    bool degenerate_flat = false;  // b > 0 = k with alpha = 1 (flat profile)
    std::string rejection;         // the violated inequality, when !ok
};

/// Classifies (b, k) into the cases
///   (a) b = 0 < k
///   (b) b < 0 < k with (-b)^{1/a} sqrt(1+k^2) < k N   (k = +inf allowed)
///   (c) b > 0, k > 0                                   (k = 0 only for a = 1)
///   (d) odd a, b > 0 > k with b^{1/a} sqrt(1+k^2) > -k N  (k = -inf allowed)
/// Rejections carry the violated inequality as text.
Admissibility admissibility(const FlowParams& params);

struct BracketStep {
    double c_lo = 0.0;
    double c_hi = 0.0;
    double psi1_mid = 0.0;  // Psi(1; c_mid, b), +/-inf when blown up inside
};

struct SpeedOptions {
    double tol_c = 1e-10;       // relative bracket width target
    double tol_k = 0.0;         // boundary mismatch; 0 = auto 1e-8 max(1,|k|)
    double ode_tol = 1e-10;     // integrator tolerance per evaluation
    bool use_eps_oracle = false;  // root-find on the regularized integrator
    double eps_oracle = 1e-8;     // its regularization parameter
    bool secant = true;           // secant refinement inside small brackets
};

struct SpeedResult {
    FlowParams params;
    SpeedCase case_tag = SpeedCase::A;
    double c_tilde = 0.0;
    double residual = 0.0;  // |Psi(1) - k| or |R_inf - 1|
    long iterations = 0;
    std::vector<BracketStep> bracket_history;
    ProfileSolution profile;  // restricted to [0, 1]
};

/// Psi(1; c, b): the profile slope at the cylinder wall, with the signed
/// infinity of the regime when the gradient blows up at or before r = 1.
double psi_at_wall(const FlowParams& params, double c, double ode_tol = 1e-10,
                   double k_scale = 1.0);

/// An initial sign-changing bracket for c -> Psi(1; c, b) - k.
std::pair<double, double> bracket_speed(const FlowParams& params, const SpeedOptions& opts = {});

/// Bisection (secant-refined) for the unique speed with Psi(1; c, b) = k;
/// for k = +/-inf roots R_inf(c, b) = 1 instead.
SpeedResult find_speed(const FlowParams& params, const SpeedOptions& opts = {});

/// The unique c with R_inf(c, b) = R. Requires b < 0 with
/// R in ((N-1)(-b)^{-1/a}, N(-b)^{-1/a}), or odd-alpha b > 0 with
/// R > N b^{-1/a}.
double find_speed_for_radius(const FlowParams& params, double R, const SpeedOptions& opts = {});

/// find_speed + the fully cross-checked profile on [0, 1]; the returned
/// profile satisfies Phi(0) = Phi'(0) = 0 and Phi'(1) = k within tol_k.
SpeedResult translating_solution(const FlowParams& params, const SpeedOptions& opts = {});

} // namespace gmcf
