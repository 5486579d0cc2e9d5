#include "gmcf/speed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double auto_tol_k(const FlowParams& params, const SpeedOptions& opts) {
    if (opts.tol_k > 0.0) return opts.tol_k;
    const double kmag = params.k.is_finite() ? std::abs(params.k.value()) : 1.0;
    return 1e-8 * std::max(1.0, kmag);
}

IntegratorOptions wall_options(double ode_tol, double k_scale) {
    IntegratorOptions o;
    o.tol = ode_tol;
    o.r_max = 1.0;
    // keep the blow-up detector above the slope being matched
    o.zeta_cutoff = std::min(1e-6, 0.1 / (1.0 + k_scale * k_scale));
    return o;
}

double signed_infinity(RegimeTag regime) {
    return regime == RegimeTag::BGtCPos ? -kInf : kInf;
}

// Estimated gradient blow-up radius of the c-profile (cutoff-extrapolated).
double radius_estimate(const FlowParams& params, double c, double ode_tol) {
    IntegratorOptions o;
    o.tol = ode_tol;
    o.r_max = 0.0;  // natural span
    auto sol = integrate_zeta(params, c, o);
    return estimate_r_infinity(sol).first;
}

} // namespace

char case_letter(SpeedCase c) {
    switch (c) {
        case SpeedCase::A: return 'a';
        case SpeedCase::B: return 'b';
        case SpeedCase::C: return 'c';
        case SpeedCase::D: return 'd';
    }
    return '?';
}

Admissibility admissibility(const FlowParams& params) {
    params.validate();
    Admissibility adm;
    const double e = 1.0 / params.alpha;
    const double b = params.b;
    const auto& k = params.k;

    if (b == 0.0) {
        if (k.is_finite() && k.value() > 0.0) {
            adm.ok = true;
            adm.tag = SpeedCase::A;
            return adm;
        }
        adm.rejection = "case (a) requires b = 0 < k with k finite";
        return adm;
    }

    if (b < 0.0) {
        if (k.kind() == BoundarySlope::Kind::PosInf) {
            const double root = std::pow(-b, e);
            if (!(root < params.dim)) {
                adm.rejection = "case (b), k = inf: requires (-b)^(1/alpha) < N";
                return adm;
            }
            if (!(root > params.dim - 1)) {
                // the blow-up radius never drops to 1 when the endpoint slope
                // degenerates first; R_inf(c,b) > (N-1)(-b)^(-1/alpha) >= 1
                adm.rejection =
                    "case (b), k = inf: unattainable, requires (-b)^(1/alpha) > N-1 "
                    "(blow-up radius is bounded below by (N-1)(-b)^(-1/alpha))";
                return adm;
            }
            adm.ok = true;
            adm.tag = SpeedCase::B;
            return adm;
        }
        if (k.is_finite() && k.value() > 0.0) {
            const double kv = k.value();
            if (std::pow(-b, e) * std::sqrt(1.0 + kv * kv) < kv * params.dim) {
                adm.ok = true;
                adm.tag = SpeedCase::B;
                return adm;
            }
            adm.rejection = "case (b): violated (-b)^(1/alpha) sqrt(1+k^2) < k N";
            return adm;
        }
        adm.rejection = "b < 0 requires k > 0";
        return adm;
    }

    // b > 0
    if (k.is_finite() && k.value() > 0.0) {
        adm.ok = true;
        adm.tag = SpeedCase::C;
        return adm;
    }
    if (k.is_finite() && k.value() == 0.0) {
        if (params.alpha == 1.0) {
            adm.ok = true;
            adm.tag = SpeedCase::C;
            adm.degenerate_flat = true;
            return adm;
        }
        adm.rejection = "b > 0 = k: flat profile is degenerate unless alpha = 1";
        return adm;
    }
    // k < 0 or k = -inf
    if (!params.alpha_odd) {
        adm.rejection = "case (d) requires odd-rational alpha";
        return adm;
    }
    if (k.kind() == BoundarySlope::Kind::NegInf) {
        if (std::pow(b, e) > params.dim) {
            adm.ok = true;
            adm.tag = SpeedCase::D;
            return adm;
        }
        adm.rejection = "case (d), k = -inf: requires b^(1/alpha) > N";
        return adm;
    }
    const double kv = k.value();
    if (std::pow(b, e) * std::sqrt(1.0 + kv * kv) > -kv * params.dim) {
        adm.ok = true;
        adm.tag = SpeedCase::D;
        return adm;
    }
    adm.rejection = "case (d): violated b^(1/alpha) sqrt(1+k^2) > -k N";
    return adm;
}

double psi_at_wall(const FlowParams& params, double c, double ode_tol, double k_scale) {
    const RegimeTag regime = classify_regime(params, c);
    if (regime == RegimeTag::CEqB) return 0.0;
    auto sol = integrate_zeta(params, c, wall_options(ode_tol, k_scale));
    if (sol.hit_cutoff && sol.r_end() <= 1.0 + 1e-12) return signed_infinity(regime);
    return sol.psi[sol.psi.size() - 1];
}

namespace {

double psi_eps_at_wall(const FlowParams& params, double c, double eps, double ode_tol,
                       double k_scale) {
    const RegimeTag regime = classify_regime(params, c);
    if (regime == RegimeTag::CEqB) return 0.0;
    auto sol = integrate_psi_epsilon(params, c, eps, wall_options(ode_tol, k_scale));
    if (sol.hit_cutoff && sol.r_end() <= 1.0 + 1e-12) return signed_infinity(regime);
    return sol.psi[sol.psi.size() - 1];
}

} // namespace

std::pair<double, double> bracket_speed(const FlowParams& params, const SpeedOptions& opts) {
    const auto adm = admissibility(params);
    if (!adm.ok) throw DomainError("bracket_speed: " + adm.rejection);
    if (!params.k.is_finite())
        throw NotApplicable("bracket_speed: infinite k is bracketed on the radius instead");
    const double k = params.k.value();
    const double e_alpha = params.alpha;
    const double na = std::pow(static_cast<double>(params.dim), e_alpha);
    auto G = [&](double c) { return psi_at_wall(params, c, opts.ode_tol, k) - k; };

    switch (adm.tag) {
        case SpeedCase::A:
            return {0.0, na * std::sqrt(1.0 + k * k)};
        case SpeedCase::C:
            return {params.b, (na + params.b) * std::sqrt(1.0 + k * k)};
        case SpeedCase::B: {
            double hi = std::max({1.0, std::abs(params.b), k});
            for (int j = 0; j < 60; ++j) {
                if (G(hi) > 0.0) return {0.0, hi};
                hi *= 2.0;
            }
            throw BracketFailure("case (b): no upper speed found by geometric march");
        }
        case SpeedCase::D: {
            double hi = 0.0, lo = 0.0;
            for (int j = 1; j < 60; ++j) {
                const double c = params.b * (1.0 - std::pow(2.0, -j));
                if (G(c) > 0.0) { hi = c; break; }
            }
            if (hi == 0.0) throw BracketFailure("case (d): no upper speed found");
            for (int j = 2; j < 200; ++j) {
                const double c = params.b * std::pow(2.0, -j);
                if (c >= hi) continue;
                if (G(c) < 0.0) { lo = c; break; }
                if (j == 199) throw BracketFailure("case (d): no lower speed found");
            }
            return {lo, hi};
        }
    }
    throw BracketFailure("unreachable");
}

namespace {

SpeedResult flat_speed_result(const FlowParams& params) {
    SpeedResult res;
    res.params = params;
    res.case_tag = SpeedCase::C;
    res.c_tilde = params.b;
    res.residual = 0.0;
    IntegratorOptions o;
    o.r_max = 1.0;
    res.profile = integrate_zeta(params, params.b, o);
    return res;
}

// Root of R_inf(c, b) = 1 for the infinite-slope cases.
SpeedResult find_speed_radius_mode(const FlowParams& params, const Admissibility& adm,
                                   const SpeedOptions& opts) {
    const bool decreasing = adm.tag == SpeedCase::B;  // R_inf falls with c for b < 0
    auto Rhat = [&](double c) { return radius_estimate(params, c, opts.ode_tol); };

    double lo = 0.0, hi = 0.0;
    if (decreasing) {
        hi = std::max(1.0, std::abs(params.b));
        int j = 0;
        for (; j < 60 && Rhat(hi) > 1.0; ++j) hi *= 2.0;
        if (j == 60) throw BracketFailure("k = inf: R_inf stayed above 1");
    } else {
        // b > c > 0: R_inf grows from N b^{-1/alpha} toward infinity as c -> b
        lo = 0.0;
        int j = 1;
        for (; j < 60; ++j) {
            hi = params.b * (1.0 - std::pow(2.0, -j));
            if (Rhat(hi) > 1.0) break;
        }
        if (j == 60) throw BracketFailure("k = -inf: R_inf stayed below 1");
    }

    SpeedResult res;
    res.params = params;
    res.case_tag = adm.tag;
    const double tol_R = 1e-8;
    double r_mid = 0.0, c_mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        c_mid = 0.5 * (lo + hi);
        r_mid = Rhat(c_mid);
        res.bracket_history.push_back({lo, hi, r_mid});
        ++res.iterations;
        const bool go_right = decreasing ? (r_mid > 1.0) : (r_mid < 1.0);
        (go_right ? lo : hi) = c_mid;
        if (hi - lo <= opts.tol_c * std::max(1.0, c_mid) && std::abs(r_mid - 1.0) <= tol_R) break;
    }
    res.c_tilde = c_mid;
    res.residual = std::abs(r_mid - 1.0);
    if (res.residual > 10.0 * tol_R)
        throw NonMonotone("k = inf root: radius residual did not converge, got " +
                          std::to_string(r_mid));
    IntegratorOptions o;
    o.tol = opts.ode_tol;
    o.r_max = 0.0;
    res.profile = integrate_zeta(params, res.c_tilde, o);
    return res;
}

} // namespace

SpeedResult find_speed(const FlowParams& params, const SpeedOptions& opts) {
    const auto adm = admissibility(params);
    if (!adm.ok) throw DomainError("find_speed: " + adm.rejection);
    if (adm.degenerate_flat) return flat_speed_result(params);
    if (!params.k.is_finite()) return find_speed_radius_mode(params, adm, opts);

    const double k = params.k.value();
    const double tol_k = auto_tol_k(params, opts);
    auto G = [&](double c) {
        return (opts.use_eps_oracle
                    ? psi_eps_at_wall(params, c, opts.eps_oracle, opts.ode_tol, k)
                    : psi_at_wall(params, c, opts.ode_tol, k)) -
               k;
    };

    auto [lo, hi] = bracket_speed(params, opts);
    double g_lo = -kInf, g_hi = kInf;  // signs known from the bracket contract

    SpeedResult res;
    res.params = params;
    res.case_tag = adm.tag;

    double c_best = 0.5 * (lo + hi), g_best = kInf;
    const double slack = 1e-6;
    for (int it = 0; it < 300; ++it) {
        double c_mid;
        const double width = hi - lo;
        if (opts.secant && std::isfinite(g_lo) && std::isfinite(g_hi) &&
            width < 1e-3 * std::max(1.0, hi) && g_hi > g_lo) {
            c_mid = lo + width * (-g_lo) / (g_hi - g_lo);
            c_mid = std::clamp(c_mid, lo + 0.05 * width, hi - 0.05 * width);
        } else {
            c_mid = 0.5 * (lo + hi);
        }
        const double g_mid = G(c_mid);
        ++res.iterations;
        res.bracket_history.push_back({lo, hi, g_mid + k});
        // the wall slope is strictly increasing in c
        if (std::isfinite(g_mid)) {
            if ((std::isfinite(g_lo) && g_mid < g_lo - slack * (1.0 + std::abs(g_lo))) ||
                (std::isfinite(g_hi) && g_mid > g_hi + slack * (1.0 + std::abs(g_hi))))
                throw NonMonotone("wall slope not monotone in c at c = " + std::to_string(c_mid));
        }
        if (g_mid < 0.0) {
            lo = c_mid;
            g_lo = g_mid;
        } else {
            hi = c_mid;
            g_hi = g_mid;
        }
        if (std::abs(g_mid) < std::abs(g_best)) {
            c_best = c_mid;
            g_best = g_mid;
        }
        if (hi - lo <= opts.tol_c * std::max(1.0, c_mid) && std::abs(g_best) <= tol_k) break;
    }
    if (!(std::abs(g_best) <= 10.0 * std::max(tol_k, 1e-12)))
        throw Error("find_speed: boundary mismatch did not converge, residual " +
                    std::to_string(g_best));

    res.c_tilde = c_best;
    res.residual = std::abs(g_best);
    IntegratorOptions o = wall_options(opts.ode_tol, k);
    res.profile = integrate_zeta(params, res.c_tilde, o);
    return res;
}

double find_speed_for_radius(const FlowParams& params, double R, const SpeedOptions& opts) {
    params.validate();
    const double e = 1.0 / params.alpha;
    bool decreasing;
    if (params.b < 0.0) {
        const double lo_r = (params.dim - 1) * std::pow(-params.b, -e);
        const double hi_r = params.dim * std::pow(-params.b, -e);
        if (!(R > lo_r && R < hi_r))
            throw DomainError("find_speed_for_radius: attainable radii for b < 0 are (" +
                              std::to_string(lo_r) + ", " + std::to_string(hi_r) + ")");
        decreasing = true;
    } else if (params.b > 0.0 && params.alpha_odd) {
        const double lo_r = params.dim * std::pow(params.b, -e);
        if (!(R > lo_r))
            throw DomainError("find_speed_for_radius: attainable radii for b > c > 0 are (" +
                              std::to_string(lo_r) + ", inf)");
        decreasing = false;
    } else {
        throw DomainError("find_speed_for_radius: requires b < 0, or b > 0 with odd alpha");
    }

    auto Rhat = [&](double c) { return radius_estimate(params, c, opts.ode_tol); };
    double lo = 0.0, hi = 0.0;
    if (decreasing) {
        hi = std::max(1.0, std::abs(params.b));
        int j = 0;
        for (; j < 60 && Rhat(hi) > R; ++j) hi *= 2.0;
        if (j == 60) throw BracketFailure("radius root: R_inf stayed above the target");
    } else {
        int j = 1;
        for (; j < 60; ++j) {
            hi = params.b * (1.0 - std::pow(2.0, -j));
            if (Rhat(hi) > R) break;
        }
        if (j == 60) throw BracketFailure("radius root: R_inf stayed below the target");
    }

    const double tol_R = 1e-8 * std::max(1.0, R);
    double c_mid = 0.5 * (lo + hi), r_mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        c_mid = 0.5 * (lo + hi);
        r_mid = Rhat(c_mid);
        const bool go_right = decreasing ? (r_mid > R) : (r_mid < R);
        (go_right ? lo : hi) = c_mid;
        if (hi - lo <= opts.tol_c * std::max(1.0, c_mid) && std::abs(r_mid - R) <= tol_R) break;
    }
    if (std::abs(r_mid - R) > 10.0 * tol_R)
        throw NonMonotone("radius root: residual did not converge");
    return c_mid;
}

SpeedResult translating_solution(const FlowParams& params, const SpeedOptions& opts) {
    SpeedResult res = find_speed(params, opts);
    if (params.k.is_finite() && !(admissibility(params).degenerate_flat)) {
        IntegratorOptions o = wall_options(opts.ode_tol, params.k.value());
        res.profile = solve_profile(params, res.c_tilde, o);
        const double k = params.k.value();
        const double tol_k = auto_tol_k(params, opts);
        const double wall = res.profile.psi[res.profile.psi.size() - 1];
        if (std::abs(wall - k) > 10.0 * tol_k)
            throw Error("translating_solution: wall slope mismatch " + std::to_string(wall - k));
    }
    return res;
}

} // namespace gmcf
