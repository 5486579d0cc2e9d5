#include "gmcf/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gmcf {

namespace {

// dzeta/dr with the blow-up mapped to |zeta| -> 1.
struct ZetaOde {
    double c, b, e;
    int dim;
    PowerSpec spec;

    double f(double r, double z) const {
        const double s2 = std::max(0.0, (1.0 - z) * (1.0 + z));
        return signed_pow(c * std::sqrt(s2) - b, e, spec) - (dim - 1) * z / r;
    }
    double dfdy(double r, double z) const {
        const double s2 = std::max(1e-300, (1.0 - z) * (1.0 + z));
        const double s = std::sqrt(s2);
        const double arg = c * s - b;
        const double dp = (arg == 0.0) ? 0.0 : e * std::pow(std::abs(arg), e - 1.0);
        return dp * (-c * z / s) - (dim - 1) / r;
    }
    // dPhi/dr = Psi(zeta)
    double quad(double, double z) const {
        const double s2 = std::max(1e-300, (1.0 - z) * (1.0 + z));
        return z / std::sqrt(s2);
    }
    double psi_of_state(double z) const { return quad(0.0, z); }
    bool valid(double z) const { return std::abs(z) < 1.0; }
};

// dpsi/dr of the eps-regularized problem (regular at r = 0).
struct PsiEpsOde {
    double c, b, e, eps;
    int dim;
    PowerSpec spec;

    double f(double r, double psi) const {
        const double s2 = 1.0 + psi * psi;
        const double s = std::sqrt(s2);
        const double F = signed_pow(c / s - b, e, spec) * s - (dim - 1) * psi / (r + eps);
        return s2 * F;
    }
    double dfdy(double r, double psi) const {
        const double s2 = 1.0 + psi * psi;
        const double s = std::sqrt(s2);
        const double arg = c / s - b;
        const double K = signed_pow(arg, e, spec) * s;
        const double dp = (arg == 0.0) ? 0.0 : e * std::pow(std::abs(arg), e - 1.0);
        const double dK = dp * (-c * psi / (s2 * s)) * s + signed_pow(arg, e, spec) * (psi / s);
        const double inner = K - (dim - 1) * psi / (r + eps);
        return 2.0 * psi * inner + s2 * (dK - (dim - 1) / (r + eps));
    }
    double quad(double, double psi) const { return psi; }
    double psi_of_state(double y) const { return y; }
    bool valid(double y) const { return std::isfinite(y); }
};

// Dormand-Prince 5(4) on the pair (driver state, Phi quadrature).
struct Dopri5Result {
    double y, phi, err;
};

template <class Ode>
Dopri5Result dopri5_step(const Ode& ode, double r, double y, double phi, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double d1 = 71.0 / 57600, d3 = -71.0 / 16695, d4 = 71.0 / 1920,
                            d5 = -17253.0 / 339200, d6 = 22.0 / 525, d7 = -1.0 / 40;

    const double k1y = ode.f(r, y), k1p = ode.quad(r, y);
    double yy = y + h * a21 * k1y;
    const double k2y = ode.f(r + c2 * h, yy);  // quadrature weight of stage 2 is zero
    yy = y + h * (a31 * k1y + a32 * k2y);
    const double k3y = ode.f(r + c3 * h, yy), k3p = ode.quad(r + c3 * h, yy);
    yy = y + h * (a41 * k1y + a42 * k2y + a43 * k3y);
    const double k4y = ode.f(r + c4 * h, yy), k4p = ode.quad(r + c4 * h, yy);
    yy = y + h * (a51 * k1y + a52 * k2y + a53 * k3y + a54 * k4y);
    const double k5y = ode.f(r + c5 * h, yy), k5p = ode.quad(r + c5 * h, yy);
    yy = y + h * (a61 * k1y + a62 * k2y + a63 * k3y + a64 * k4y + a65 * k5y);
    const double k6y = ode.f(r + h, yy), k6p = ode.quad(r + h, yy);

    const double y5 = y + h * (b1 * k1y + b3 * k3y + b4 * k4y + b5 * k5y + b6 * k6y);
    const double p5 = phi + h * (b1 * k1p + b3 * k3p + b4 * k4p + b5 * k5p + b6 * k6p);
    const double k7y = ode.f(r + h, y5), k7p = ode.quad(r + h, y5);

    const double ey = h * (d1 * k1y + d3 * k3y + d4 * k4y + d5 * k5y + d6 * k6y + d7 * k7y);
    const double ep = h * (d1 * k1p + d3 * k3p + d4 * k4p + d5 * k5p + d6 * k6p + d7 * k7p);
    return {y5, p5, std::max(std::abs(ey), std::abs(ep))};
}

// Implicit Euler with damped Newton kept inside the state's validity range;
// returns false when the iteration stalls so the caller can shrink the step.
template <class Ode>
bool implicit_euler(const Ode& ode, double r1, double y0, double h, double tol, double& out) {
    double y = y0 + h * ode.f(r1 - h, y0);  // explicit predictor
    if (!ode.valid(y)) y = y0;
    for (int it = 0; it < 40; ++it) {
        const double F = y - y0 - h * ode.f(r1, y);
        const double J = 1.0 - h * ode.dfdy(r1, y);
        if (J == 0.0 || !std::isfinite(F)) return false;
        double dy = -F / J;
        int damp = 0;
        while (!ode.valid(y + dy) && damp++ < 50) dy *= 0.5;
        if (damp >= 50) return false;
        y += dy;
        if (std::abs(dy) <= std::max(1e-15, 0.05 * tol * (1.0 + std::abs(y)))) {
            out = y;
            return ode.valid(y);
        }
    }
    return false;
}

// One step of implicit Euler with Richardson extrapolation (order 2,
// strongly damping). Provides the midpoint state for the Phi quadrature.
template <class Ode>
bool stiff_step(const Ode& ode, double r, double y, double h, double tol,
                double& y_new, double& y_mid, double& err) {
    double yf = 0.0, yh1 = 0.0, yh2 = 0.0;
    if (!implicit_euler(ode, r + h, y, h, tol, yf)) return false;
    if (!implicit_euler(ode, r + 0.5 * h, y, 0.5 * h, tol, yh1)) return false;
    if (!implicit_euler(ode, r + h, yh1, 0.5 * h, tol, yh2)) return false;
    y_new = 2.0 * yh2 - yf;
    if (!ode.valid(y_new)) return false;
    y_mid = yh1;
    err = std::abs(yh2 - yf);
    return true;
}

struct RawResult {
    std::vector<double> r, y, phi;
    bool hit_cutoff = false;
    bool stiff_used = false;
    double last_step = 0.0;
    long accepted = 0, rejected = 0;
};

// Adaptive driver: explicit DOPRI5 pair, switching to the implicit stepper
// when the accuracy-selected step is stability-limited (large |df/dy| h).
template <class Ode>
RawResult run_adaptive(const Ode& ode, double r0, double y0, double phi0, double r_stop,
                       double stop_level,  // stop when |y| >= stop_level (0 = no event)
                       const IntegratorOptions& opts, double h0, double h_max) {
    RawResult out;
    out.r.push_back(r0);
    out.y.push_back(y0);
    out.phi.push_back(phi0);

    const double h_floor = 1e-14 * std::max(r_stop, 1e-6);
    double r = r0, y = y0, phi = phi0;
    double h = std::min(h0, h_max);
    bool stiff = false;

    auto scale = [&](double a, double b2) { return opts.tol * (1.0 + std::max(std::abs(a), std::abs(b2))); };

    while (r < r_stop * (1.0 - 1e-15)) {
        h = std::min({h, h_max, r_stop - r});
        if (h < h_floor)
            throw StepFailure("profile integration: step size underflow at r = " + std::to_string(r));

        double y_new = 0.0, phi_new = 0.0, err = 0.0;
        bool accepted = false;

        if (!stiff) {
            const auto s = dopri5_step(ode, r, y, phi, h);
            err = s.err / scale(y, s.y);
            if (std::isfinite(err) && err <= 1.0) {
                y_new = s.y;
                phi_new = s.phi;
                accepted = true;
            }
            const double fac = std::isfinite(err) && err > 0.0
                                   ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0)
                                   : (std::isfinite(err) ? 5.0 : 0.2);
            const double h_next = h * fac;
            if (accepted) {
                // stability limited? hand the tail to the implicit stepper
                const double lam = std::abs(ode.dfdy(r + h, y_new));
                if (lam * std::min(h_next, h_max) > 4.0) stiff = true;
            }
            if (!accepted) { ++out.rejected; h = h_next; continue; }
            out.last_step = h;
            h = h_next;
        } else {
            out.stiff_used = true;
            double y_mid = 0.0, d = 0.0;
            if (!stiff_step(ode, r, y, h, opts.tol, y_new, y_mid, d)) {
                ++out.rejected;
                h *= 0.3;
                continue;
            }
            err = d / scale(y, y_new);
            if (!(std::isfinite(err) && err <= 1.0)) {
                ++out.rejected;
                h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.5), 0.1, 0.5);
                continue;
            }
            // Simpson on the half-step states keeps the quadrature high order
            phi_new = phi + (h / 6.0) * (ode.quad(r, y) + 4.0 * ode.quad(r + 0.5 * h, y_mid) +
                                         ode.quad(r + h, y_new));
            accepted = true;
            out.last_step = h;
            const double fac = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.5), 0.2, 4.0) : 4.0;
            h = h * fac;
            if (std::abs(ode.dfdy(r + out.last_step, y_new)) * out.last_step < 0.5) stiff = false;
        }

        const double h_used = out.last_step;

        // event: |y| reached the stop level inside this step -> land on it
        if (stop_level > 0.0 && std::abs(y_new) >= stop_level) {
            auto trial = [&](double ht, double& yt, double& pt) {
                if (!stiff) {
                    const auto s = dopri5_step(ode, r, y, phi, ht);
                    yt = s.y;
                    pt = s.phi;
                    return true;
                }
                double ym = 0.0, d = 0.0;
                if (!stiff_step(ode, r, y, ht, opts.tol, yt, ym, d)) return false;
                pt = phi + (ht / 6.0) * (ode.quad(r, y) + 4.0 * ode.quad(r + 0.5 * ht, ym) +
                                         ode.quad(r + ht, yt));
                return true;
            };
            double lo = 0.0, hi = h_used;
            double y_land = y_new, phi_land = phi_new;
            for (int it = 0; it < 80 && (hi - lo) > 1e-6 * h_used + 1e-300; ++it) {
                const double hm = 0.5 * (lo + hi);
                double yt = 0.0, pt = 0.0;
                if (!trial(hm, yt, pt)) break;
                if (std::abs(yt) >= stop_level) {
                    hi = hm;
                    y_land = yt;
                    phi_land = pt;
                } else {
                    lo = hm;
                }
            }
            r += hi;
            out.last_step = hi;
            out.r.push_back(r);
            out.y.push_back(y_land);
            out.phi.push_back(phi_land);
            ++out.accepted;
            out.hit_cutoff = true;
            return out;
        }

        r += h_used;
        y = y_new;
        phi = phi_new;
        out.r.push_back(r);
        out.y.push_back(y);
        out.phi.push_back(phi);
        ++out.accepted;
    }
    return out;
}

Eigen::ArrayXd to_array(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<long>(v.size()));
}

// zeta(r) = a1 r + a3 r^3 near the origin; fixes the removable singularity.
struct SeriesStart {
    double a1 = 0.0, a3 = 0.0;
};

SeriesStart zeta_series(const FlowParams& p, double c) {
    SeriesStart s;
    const double e = 1.0 / p.alpha;
    s.a1 = signed_pow(c - p.b, e, p.power_spec()) / p.dim;
    if (c != p.b) {
        const double f2 = -(c / (2.0 * p.alpha)) * std::pow(std::abs(c - p.b), e - 1.0);
        s.a3 = f2 * s.a1 * s.a1 / (p.dim + 2);
    }
    return s;
}

ProfileSolution flat_solution(const FlowParams& params, double c, const IntegratorOptions& opts) {
    ProfileSolution sol;
    sol.params = params;
    sol.c = c;
    sol.regime = RegimeTag::CEqB;
    const int n = 33;
    sol.r = Eigen::ArrayXd::LinSpaced(n, 0.0, std::max(opts.r_max, 1.0));
    sol.zeta = Eigen::ArrayXd::Zero(n);
    sol.psi = Eigen::ArrayXd::Zero(n);
    sol.phi = Eigen::ArrayXd::Zero(n);
    sol.tol_used = opts.tol;
    return finalize_solution(std::move(sol));
}

double blowup_span(const FlowParams& p, double c, RegimeTag regime) {
    const auto th = r_infinity_theory_bounds(p, c, regime, false);
    return th.hi;
}

} // namespace

RadiusBracket r_infinity_theory_bounds(const FlowParams& params, double c, RegimeTag regime,
                                       bool eps_form) {
    const double e = 1.0 / params.alpha;
    const int n = params.dim;
    if (regime == RegimeTag::BNeg) {
        const double b = params.b;
        if (eps_form)
            return {std::pow(c - b, -e), std::pow(-b, -e) * (n + std::log(2.0))};
        return {n * std::pow(c - b, -e), n * std::pow(-b, -e)};
    }
    if (regime == RegimeTag::BGtCPos) {
        if (eps_form)  // no proved enclosure for the regularized concave problem
            return {0.0, std::numeric_limits<double>::infinity()};
        const double b = params.b;
        return {params.dim * std::pow(b, -e), params.dim * std::pow(b - c, -e)};
    }
    throw NotApplicable("R_inf bounds exist only in the finite-radius regimes");
}

ProfileSolution integrate_zeta(const FlowParams& params, double c, const IntegratorOptions& opts) {
    params.validate();
    if (c < 0.0) throw DomainError("integrate_zeta: speed must be >= 0");
    if (!(opts.tol > 0.0) || !(opts.zeta_cutoff > 0.0 && opts.zeta_cutoff < 1.0))
        throw DomainError("integrate_zeta: invalid integrator options");
    const RegimeTag regime = classify_regime(params, c);
    if (regime == RegimeTag::CEqB) return flat_solution(params, c, opts);

    // r_max = 0 means auto: the natural span in blow-up regimes, 10 otherwise.
    const bool blowup = finite_radius(regime);
    double span;
    if (blowup) {
        const double natural = 1.05 * blowup_span(params, c, regime);
        span = opts.r_max > 0.0 ? std::min(opts.r_max, natural) : natural;
    } else {
        span = opts.r_max > 0.0 ? opts.r_max : 10.0;
    }
    if (!(span > 0.0)) throw DomainError("integrate_zeta: r_max must be positive");

    const ZetaOde ode{c, params.b, 1.0 / params.alpha, params.dim, params.power_spec()};
    const auto series = zeta_series(params, c);
    const double a1 = series.a1;

    double h0 = opts.dr_init > 0.0 ? opts.dr_init
                                   : std::min(3e-3 / std::max(std::abs(a1), 1e-12), 0.05 * span);
    h0 = std::min(h0, 0.5 * span);
    const double z0 = a1 * h0 + series.a3 * h0 * h0 * h0;
    const double phi0 = 0.5 * a1 * h0 * h0 + 0.25 * (series.a3 + 0.5 * a1 * a1 * a1) * std::pow(h0, 4);

    // the cutoff is a blow-up detector; asymptotic regimes run to the cap
    const double stop_level = blowup ? 1.0 - opts.zeta_cutoff : 0.0;
    const double h_max = opts.dr_max > 0.0 ? opts.dr_max : span / 512.0;
    auto raw = run_adaptive(ode, h0, z0, phi0, span, stop_level, opts,
                            std::min(h0, h_max), h_max);

    if (blowup && !raw.hit_cutoff && raw.r.back() >= 1.02 * blowup_span(params, c, regime))
        throw BlowupUndetected("finite-radius regime reached the radius cap without gradient blow-up");

    ProfileSolution sol;
    sol.params = params;
    sol.c = c;
    sol.regime = regime;
    const long n = static_cast<long>(raw.r.size()) + 1;
    sol.r.resize(n);
    sol.zeta.resize(n);
    sol.phi.resize(n);
    sol.r[0] = 0.0;
    sol.zeta[0] = 0.0;
    sol.phi[0] = 0.0;
    sol.r.tail(n - 1) = to_array(raw.r);
    sol.zeta.tail(n - 1) = to_array(raw.y);
    sol.phi.tail(n - 1) = to_array(raw.phi);
    sol.psi = sol.zeta / ((1.0 - sol.zeta) * (1.0 + sol.zeta)).max(1e-300).sqrt();
    sol.tol_used = opts.tol;
    sol.last_step = raw.last_step;
    sol.steps_accepted = raw.accepted;
    sol.steps_rejected = raw.rejected;
    sol.hit_cutoff = raw.hit_cutoff;
    sol.stiff_switched = raw.stiff_used;
    return finalize_solution(std::move(sol));
}

ProfileSolution integrate_psi_epsilon(const FlowParams& params, double c, double eps,
                                      const IntegratorOptions& opts) {
    params.validate();
    if (!(eps > 0.0)) throw DomainError("integrate_psi_epsilon: eps must be positive");
    if (c < 0.0) throw DomainError("integrate_psi_epsilon: speed must be >= 0");
    const RegimeTag regime = classify_regime(params, c);
    if (regime == RegimeTag::BGtCPos && !params.alpha_odd)
        throw RegimeError("regularized oracle in the concave regime requires odd alpha");
    if (regime == RegimeTag::CEqB) {
        auto sol = flat_solution(params, c, opts);
        sol.eps_form = true;
        sol.eps = eps;
        return sol;
    }

    const bool blowup = finite_radius(regime);
    double span;
    if (blowup && regime == RegimeTag::BNeg) {
        const auto th = r_infinity_theory_bounds(params, c, regime, true);
        span = opts.r_max > 0.0 ? std::min(opts.r_max, 1.05 * th.hi) : 1.05 * th.hi;
    } else if (blowup) {
        const auto th = r_infinity_theory_bounds(params, c, regime, false);
        span = opts.r_max > 0.0 ? std::min(opts.r_max, 1.10 * th.hi) : 1.10 * th.hi;
    } else {
        span = opts.r_max > 0.0 ? opts.r_max : 10.0;
    }

    const PsiEpsOde ode{c, params.b, 1.0 / params.alpha, eps, params.dim, params.power_spec()};
    const double cut = 1.0 - opts.zeta_cutoff;
    const double psi_cap = cut / std::sqrt((1.0 - cut) * (1.0 + cut));
    const double stop_level = blowup ? psi_cap : 0.0;

    const double h_max = opts.dr_max > 0.0 ? opts.dr_max : span / 512.0;
    const double h0 = opts.dr_init > 0.0 ? opts.dr_init : std::min(1e-4 * span, h_max);
    auto raw = run_adaptive(ode, 0.0, 0.0, 0.0, span, stop_level, opts, h0, h_max);

    if (blowup && regime == RegimeTag::BNeg && !raw.hit_cutoff &&
        raw.r.back() >= 1.02 * r_infinity_theory_bounds(params, c, regime, true).hi)
        throw BlowupUndetected("regularized problem reached the radius cap without blow-up");

    ProfileSolution sol;
    sol.params = params;
    sol.c = c;
    sol.regime = regime;
    sol.r = to_array(raw.r);
    sol.psi = to_array(raw.y);
    sol.phi = to_array(raw.phi);
    sol.zeta = sol.psi / (1.0 + sol.psi.square()).sqrt();
    sol.eps_form = true;
    sol.eps = eps;
    sol.tol_used = opts.tol;
    sol.last_step = raw.last_step;
    sol.steps_accepted = raw.accepted;
    sol.steps_rejected = raw.rejected;
    sol.hit_cutoff = raw.hit_cutoff;
    sol.stiff_switched = raw.stiff_used;
    return finalize_solution(std::move(sol));
}

std::pair<double, RadiusBracket> estimate_r_infinity(const ProfileSolution& sol) {
    if (!finite_radius(sol.regime))
        throw NotApplicable("R_inf is infinite in regime " + to_string(sol.regime));
    if (!sol.hit_cutoff)
        throw NotApplicable("integration did not reach the gradient blow-up cutoff");

    const double e = 1.0 / sol.params.alpha;
    const double babs = std::abs(sol.params.b);
    const double shift = sol.eps_form ? sol.eps : 0.0;
    const double rc = sol.r_end();
    const double delta = 1.0 - std::abs(sol.zeta[sol.zeta.size() - 1]);

    // Solve (R - rc) L(R) = delta with L(R) = |b|^{1/a} - (N-1)/(R+shift).
    // L > 0 requires R above the degenerate radius, where the left side is
    // increasing; the root handles both the ordinary landing (rc close to R)
    // and slow nullcline approaches (rc well short of R).
    const double r_deg = (sol.params.dim - 1) * std::pow(babs, -e) - shift;
    const double lo0 = std::max(rc, r_deg) * (1.0 + 1e-15);
    auto gap = [&](double R) {
        return (R - rc) * (std::pow(babs, e) - (sol.params.dim - 1) / (R + shift)) - delta;
    };
    double blo = lo0, bhi = std::max(lo0 * (1.0 + delta), lo0 + delta);
    for (int it = 0; it < 200 && gap(bhi) < 0.0; ++it) bhi = lo0 + 2.0 * (bhi - lo0);
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (blo + bhi);
        (gap(mid) < 0.0 ? blo : bhi) = mid;
    }
    double R = 0.5 * (blo + bhi);

    const auto th = r_infinity_theory_bounds(sol.params, sol.c, sol.regime, sol.eps_form);
    double lo = std::max(rc, th.lo);
    double hi = std::min(std::max(R + sol.last_step, lo), th.hi);
    if (hi < lo) hi = lo;
    const double r_inf = std::clamp(R, lo, hi);
    return {r_inf, RadiusBracket{lo, hi}};
}

namespace {

// Tail of Phi over [rc, R_inf) from the endpoint model |zeta| = 1 - L rho;
// midpoint rule in sqrt(rho), exact for the rho^{-1/2} singularity of Psi.
double phi_tail(double rho_c, double L, int panels = 64) {
    if (!(rho_c > 0.0) || !(L > 0.0)) return 0.0;
    const double smax = std::sqrt(rho_c);
    const double ds = smax / panels;
    double acc = 0.0;
    for (int j = 0; j < panels; ++j) {
        const double s = (j + 0.5) * ds;
        const double lr = std::min(L * s * s, 1.0 - 1e-12);
        acc += 2.0 * (1.0 - lr) / std::sqrt(L * (2.0 - lr));
    }
    return acc * ds;
}

} // namespace

ProfileSolution solve_profile(const FlowParams& params, double c, const IntegratorOptions& opts) {
    ProfileSolution sol = integrate_zeta(params, c, opts);
    if (sol.regime == RegimeTag::CEqB) return sol;

    if (finite_radius(sol.regime) && sol.hit_cutoff) {
        auto [r_inf, bracket] = estimate_r_infinity(sol);
        sol.r_inf = r_inf;
        sol.r_inf_bracket = bracket;
        const double e = 1.0 / params.alpha;
        const double L = std::pow(std::abs(params.b), e) - (params.dim - 1) / r_inf;
        const double tail = phi_tail(std::max(r_inf - sol.r_end(), 0.0), std::max(L, 1e-300));
        const double sign = sol.regime == RegimeTag::BGtCPos ? -1.0 : 1.0;
        sol.phi_end = sol.phi[sol.phi.size() - 1] + sign * tail;
    }

    // cross-check against the regularized oracle on the shared interval
    const std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
    CrossCheck cc;
    cc.epsilons = epsilons;
    const double r_edge = sol.r_inf ? *sol.r_inf : sol.r_end();
    std::vector<ProfileSolution> eps_sols;
    for (double eps : epsilons) {
        IntegratorOptions o = opts;
        o.r_max = std::min(opts.r_max > 0 ? opts.r_max : r_edge, r_edge);
        eps_sols.push_back(integrate_psi_epsilon(params, c, eps, o));
    }
    const int n_samp = 129;
    for (std::size_t i = 0; i < eps_sols.size(); ++i) {
        const auto& es = eps_sols[i];
        const double hi = std::min({0.9 * r_edge, 0.98 * es.r_end(), sol.r_end()});
        double dev = 0.0;
        for (int j = 1; j <= n_samp; ++j) {
            const double rj = hi * j / n_samp;
            dev = std::max(dev, std::abs(es.psi_at(rj) - sol.psi_at(rj)));
        }
        cc.deviations.push_back(dev);
    }
    cc.monotone = cc.deviations[0] >= cc.deviations[1] && cc.deviations[1] >= cc.deviations[2];
    // distance to the limit is controlled by the gap between the two finest
    // regularizations (the eps-profiles decrease monotonically to the limit)
    {
        const auto& fine = eps_sols[2];
        const auto& mid = eps_sols[1];
        const double hi = std::min({0.9 * r_edge, 0.98 * fine.r_end(), 0.98 * mid.r_end(),
                                    sol.r_end()});
        double gap = 0.0;
        for (int j = 1; j <= n_samp; ++j) {
            const double rj = hi * j / n_samp;
            gap = std::max(gap, std::abs(mid.psi_at(rj) - fine.psi_at(rj)));
        }
        cc.tolerance = std::max(10.0 * opts.tol, gap);
    }
    if (cc.deviations[2] > cc.tolerance)
        throw CrossCheckFailure("zeta-form and regularized profiles disagree: dev = " +
                                std::to_string(cc.deviations[2]) +
                                ", tol = " + std::to_string(cc.tolerance));
    sol.cross_check = cc;
    return sol;
}

double asymptotic_value(const FlowParams& params, double c, double r) {
    params.validate();
    if (c < 0.0) throw DomainError("asymptotic_value: speed must be >= 0");
    if (params.b == 0.0) {
        const double pref = c / ((params.alpha + 1.0) * std::pow(params.dim - 1.0, params.alpha));
        return pref * std::pow(r, params.alpha + 1.0);
    }
    if (c > params.b && params.b > 0.0)
        return std::sqrt(c * c - params.b * params.b) / params.b;
    throw NotApplicable("no closed-form asymptote in regime " +
                        to_string(classify_regime(params, c)));
}

double v_shape_defect(const ProfileSolution& sol, double r) {
    if (sol.regime != RegimeTag::CGtBPos)
        throw NotApplicable("V-shape defect is defined in the cone regime only");
    const double psi0 = std::sqrt(sol.c * sol.c - sol.params.b * sol.params.b) / sol.params.b;
    return psi0 * r - sol.phi_at(r);
}

MonotonicityReport monotonicity_probe(const FlowParams& params, double c1, double c2,
                                      const Eigen::ArrayXd& r_samples,
                                      const IntegratorOptions& opts) {
    if (!(0.0 <= c1 && c1 < c2))
        throw DomainError("monotonicity_probe: requires 0 <= c1 < c2");
    ProfileSolution s1 = integrate_zeta(params, c1, opts);
    ProfileSolution s2 = integrate_zeta(params, c2, opts);

    MonotonicityReport rep;
    const double shared = 0.999 * std::min(s1.r_end(), s2.r_end());
    std::vector<double> rr, mm;
    const double tol_v = 50.0 * opts.tol;
    for (long i = 0; i < r_samples.size(); ++i) {
        const double r = r_samples[i];
        if (!(r > 0.0) || r > shared) continue;
        const double m = s2.psi_at(r) - s1.psi_at(r);
        if (m < -tol_v * (1.0 + std::abs(s1.psi_at(r))))
            throw OrderingViolation("profile ordering in c violated at r = " + std::to_string(r), r);
        rr.push_back(r);
        mm.push_back(m);
    }
    rep.radii = to_array(rr);
    rep.margins = to_array(mm);

    if (finite_radius(s1.regime) && s1.hit_cutoff && s2.hit_cutoff) {
        rep.r_inf_c1 = estimate_r_infinity(s1).first;
        rep.r_inf_c2 = estimate_r_infinity(s2).first;
        if (s1.regime == RegimeTag::BNeg)
            rep.r_inf_ordered = *rep.r_inf_c2 < *rep.r_inf_c1;
        else
            rep.r_inf_ordered = *rep.r_inf_c2 > *rep.r_inf_c1;
        if (!rep.r_inf_ordered)
            throw OrderingViolation("R_inf ordering in c violated", *rep.r_inf_c1);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

ProfileSolution finalize_solution(ProfileSolution sol) {
    const long n = sol.r.size();
    sol.psi_deriv_.resize(n);
    sol.zeta_deriv_.resize(n);
    const double e = 1.0 / sol.params.alpha;
    const auto spec = sol.params.power_spec();
    const double c = sol.c, b = sol.params.b;
    const int dim = sol.params.dim;
    if (sol.regime == RegimeTag::CEqB) {
        sol.psi_deriv_.setZero();
        sol.zeta_deriv_.setZero();
        return sol;
    }
    if (!sol.eps_form) {
        const ZetaOde ode{c, b, e, dim, spec};
        sol.psi_deriv_[0] = signed_pow(c - b, e, spec) / dim;
        sol.zeta_deriv_[0] = sol.psi_deriv_[0];
        for (long i = 1; i < n; ++i) {
            const double z = sol.zeta[i];
            const double s2 = std::max(1e-300, (1.0 - z) * (1.0 + z));
            sol.zeta_deriv_[i] = ode.f(sol.r[i], z);
            sol.psi_deriv_[i] = sol.zeta_deriv_[i] / (s2 * std::sqrt(s2));
        }
    } else {
        const PsiEpsOde ode{c, b, e, sol.eps, dim, spec};
        for (long i = 0; i < n; ++i) {
            sol.psi_deriv_[i] = ode.f(sol.r[i], sol.psi[i]);
            const double s2 = 1.0 + sol.psi[i] * sol.psi[i];
            sol.zeta_deriv_[i] = sol.psi_deriv_[i] / (s2 * std::sqrt(s2));
        }
    }
    return sol;
}

namespace {

double hermite(double t, double h, double y0, double y1, double d0, double d1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

long locate(const Eigen::ArrayXd& x, double q) {
    const long n = x.size();
    const double* begin = x.data();
    long i = static_cast<long>(std::upper_bound(begin, begin + n, q) - begin) - 1;
    return std::clamp(i, 0L, n - 2);
}

} // namespace

double ProfileSolution::psi_at(double radius) const {
    const long n = r.size();
    if (n < 2 || radius < -1e-12 || radius > r[n - 1] * (1.0 + 1e-12) + 1e-300)
        throw DomainError("psi_at: radius outside the profile range");
    radius = std::clamp(radius, 0.0, r[n - 1]);
    const long i = locate(r, radius);
    const double h = r[i + 1] - r[i];
    return hermite((radius - r[i]) / h, h, psi[i], psi[i + 1], psi_deriv_[i], psi_deriv_[i + 1]);
}

double ProfileSolution::phi_at(double radius) const {
    const long n = r.size();
    if (n < 2 || radius < -1e-12 || radius > r[n - 1] * (1.0 + 1e-12) + 1e-300)
        throw DomainError("phi_at: radius outside the profile range");
    radius = std::clamp(radius, 0.0, r[n - 1]);
    const long i = locate(r, radius);
    const double h = r[i + 1] - r[i];
    return hermite((radius - r[i]) / h, h, phi[i], phi[i + 1], psi[i], psi[i + 1]);
}

double ProfileSolution::zeta_at(double radius) const {
    const long n = r.size();
    if (n < 2 || radius < -1e-12 || radius > r[n - 1] * (1.0 + 1e-12) + 1e-300)
        throw DomainError("zeta_at: radius outside the profile range");
    radius = std::clamp(radius, 0.0, r[n - 1]);
    const long i = locate(r, radius);
    const double h = r[i + 1] - r[i];
    return hermite((radius - r[i]) / h, h, zeta[i], zeta[i + 1], zeta_deriv_[i], zeta_deriv_[i + 1]);
}

} // namespace gmcf
