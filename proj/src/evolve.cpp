#include "gmcf/evolve.hpp"

#include "gmcf/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmcf {

namespace {

// Derivative and curvature caches from u with ghost nodes enforcing
// u_r(0) = 0 and u_r(1) = k.
void compute_fields(const FlowParams& params, const Eigen::ArrayXd& r, const Eigen::ArrayXd& u,
                    Eigen::ArrayXd& ur, Eigen::ArrayXd& urr, Eigen::ArrayXd& H,
                    Eigen::ArrayXd& ut) {
    const long n = u.size();
    const long m = n - 2;  // interior count
    const double dr = r[1] - r[0];
    const double k = params.k.value();

    ur.resize(n);
    urr.resize(n);
    H.resize(n);

    ur[0] = 0.0;
    ur[n - 1] = k;
    ur.segment(1, m) = (u.segment(2, m) - u.segment(0, m)) / (2.0 * dr);

    urr.segment(1, m) = (u.segment(2, m) - 2.0 * u.segment(1, m) + u.segment(0, m)) / (dr * dr);
    // axis: the symmetric ghost is second order (odd derivatives vanish)
    urr[0] = 2.0 * (u[1] - u[0]) / (dr * dr);
    // wall: one-sided second-order closure consistent with u_r(1) = k (the
    // symmetric ghost u_{M+1} = u_{M-1} + 2 dr k is only first order here)
    urr[n - 1] =
        (-3.5 * u[n - 1] + 4.0 * u[n - 2] - 0.5 * u[n - 3] + 3.0 * dr * k) / (dr * dr);

    const Eigen::ArrayXd s2 = 1.0 + ur.square();
    const Eigen::ArrayXd s = s2.sqrt();
    H[0] = params.dim * urr[0];
    H.tail(n - 1) = urr.tail(n - 1) / (s2.tail(n - 1) * s.tail(n - 1)) +
                    (params.dim - 1) * ur.tail(n - 1) / (r.tail(n - 1) * s.tail(n - 1));

    Eigen::ArrayXd Ha(n);
    if (params.alpha == 1.0) {
        Ha = H;
    } else {
        const auto spec = params.power_spec();
        const double a = params.alpha;
        Ha = H.unaryExpr([&](double h) { return signed_pow(h, a, spec); });
    }
    ut = (Ha + params.b) * s;
}

void refresh(EvolutionState& st) {
    compute_fields(st.params, st.r, st.u, st.ur, st.urr, st.H, st.ut);
}

void check_parabolicity(const Eigen::ArrayXd& H, const Eigen::ArrayXd& u, double dr) {
    // curvatures below the second-difference roundoff are numerically flat
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (1.0 + u.abs().maxCoeff()) / (dr * dr);
    const double hmax = H.abs().maxCoeff();
    if (hmax <= noise) return;
    const double band = std::max(1e-8 * hmax, noise);
    if (H.abs().minCoeff() < band || (H.minCoeff() < -band && H.maxCoeff() > band))
        throw SignLoss("mean curvature lost its sign on the grid");
}

double end_slope_tolerance(double dr, double k, double second_diff) {
    return dr * (1.0 + std::abs(k) + 1.5 * std::abs(second_diff)) + 1e-12;
}

} // namespace

std::string to_string(HypothesisTag tag) {
    switch (tag) {
        case HypothesisTag::A: return "A";
        case HypothesisTag::B: return "B";
        case HypothesisTag::C: return "C";
        case HypothesisTag::D: return "D";
        case HypothesisTag::None: return "none";
    }
    return "?";
}

EvolutionState init_state(const Eigen::ArrayXd& u0, const FlowParams& params) {
    params.validate();
    if (!params.k.is_finite())
        throw DomainError("init_state: the evolution needs a finite boundary slope");
    const long n = u0.size();
    if (n < 65) throw DomainError("init_state: at least 64 grid segments required");

    EvolutionState st;
    st.params = params;
    st.r = Eigen::ArrayXd::LinSpaced(n, 0.0, 1.0);
    st.u = u0;
    const double dr = st.dr();
    const double k = params.k.value();

    // endpoint compatibility to O(dr) by one-sided differences
    const double slope0 = (u0[1] - u0[0]) / dr;
    const double d2_0 = (u0[2] - 2 * u0[1] + u0[0]) / (dr * dr);
    if (std::abs(slope0) > end_slope_tolerance(dr, 0.0, d2_0))
        throw CompatibilityError("initial data violates u'(0) = 0, one-sided slope " +
                                 std::to_string(slope0));
    const double slope1 = (u0[n - 1] - u0[n - 2]) / dr;
    const double d2_1 = (u0[n - 1] - 2 * u0[n - 2] + u0[n - 3]) / (dr * dr);
    if (std::abs(slope1 - k) > end_slope_tolerance(dr, k, d2_1))
        throw CompatibilityError("initial data violates u'(1) = k, one-sided slope " +
                                 std::to_string(slope1));

    refresh(st);
    return st;
}

EvolutionState init_state(const std::function<double(double)>& u0, const FlowParams& params,
                          int segments) {
    if (segments < 64) throw DomainError("init_state: at least 64 grid segments required");
    Eigen::ArrayXd samples(segments + 1);
    for (int i = 0; i <= segments; ++i)
        samples[i] = u0(static_cast<double>(i) / segments);
    return init_state(samples, params);
}

HypothesisTag check_hypotheses(const EvolutionState& st) {
    const auto& p = st.params;
    if (!p.k.is_finite()) return HypothesisTag::None;
    const double k = p.k.value();
    const double e = 1.0 / p.alpha;
    const auto spec = p.power_spec();

    const double hmin = st.H.minCoeff();
    const double hmax = st.H.maxCoeff();
    const double urr_min = st.urr.minCoeff();
    const double urr_max = st.urr.maxCoeff();

    auto ha_plus_b_positive = [&] {
        double worst = 1e300;
        for (long i = 0; i < st.H.size(); ++i)
            worst = std::min(worst, signed_pow(st.H[i], p.alpha, spec) + p.b);
        return worst > 0.0;
    };

    if (p.b == 0.0 && k > 0.0 && hmin > 0.0) return HypothesisTag::A;
    if (p.b < 0.0 && k > 0.0 && std::pow(-p.b, e) * std::sqrt(1 + k * k) < k * p.dim &&
        hmin > 0.0 && ha_plus_b_positive())
        return HypothesisTag::B;
    if (p.b > 0.0 && k > 0.0 && urr_min > 0.0) return HypothesisTag::C;
    if (p.alpha_odd && p.b > 0.0 && k < 0.0 &&
        std::pow(p.b, e) * std::sqrt(1 + k * k) > -k * p.dim && urr_max < 0.0 && hmax < 0.0 &&
        ha_plus_b_positive())
        return HypothesisTag::D;
    return HypothesisTag::None;
}

double cfl_time_step(const EvolutionState& st, double cfl) {
    const auto& p = st.params;
    const double dr = st.dr();
    double coef_max = 0.0;
    for (long i = 0; i < st.H.size(); ++i) {
        const double s2 = 1.0 + st.ur[i] * st.ur[i];
        const double h = std::abs(st.H[i]);
        const double coef = p.alpha * std::pow(h, p.alpha - 1.0) / s2;
        coef_max = std::max(coef_max, coef);
    }
    if (!(coef_max > 1e-300)) return 0.05;  // no diffusion (flat, alpha >= 1)
    return cfl * dr * dr / coef_max;
}

void step(EvolutionState& st, double dt) {
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    if (dt > cfl_time_step(st, 0.2) * (1.0 + 1e-9))
        throw CFLViolation("step: dt exceeds the stability bound");

    check_parabolicity(st.H, st.u, st.dr());

    // Heun: the boundary conditions enter through the ghost differences
    Eigen::ArrayXd u1 = st.u + dt * st.ut;
    Eigen::ArrayXd ur1, urr1, H1, ut1;
    compute_fields(st.params, st.r, u1, ur1, urr1, H1, ut1);
    check_parabolicity(H1, u1, st.dr());

    st.u += 0.5 * dt * (st.ut + ut1);
    st.t += dt;
    ++st.step_count;
    refresh(st);
    if (!st.u.allFinite()) throw NonFinite("step: solution overflowed");
}

double ConvergenceRecord::front_speed(double t_from, double t_to) const {
    auto nearest = [&](double t) {
        const ConvergenceSample* best = nullptr;
        for (const auto& s : samples)
            if (!best || std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
        return best;
    };
    const auto* a = nearest(t_from);
    const auto* b = nearest(t_to);
    if (!a || !b || a == b) throw DomainError("front_speed: not enough samples");
    return (b->front_height - a->front_height) / (b->t - a->t);
}

std::pair<double, double> convergence_metric(const EvolutionState& st, const TsReference& ts) {
    if (ts.phi.size() != st.u.size())
        throw GridMismatch("convergence_metric: reference grid size mismatch");
    const Eigen::ArrayXd dev = st.u - ts.phi - ts.c_tilde * st.t;
    return {dev.abs().maxCoeff(), dev.maxCoeff() - dev.minCoeff()};
}

namespace {

ConvergenceSample make_sample(const EvolutionState& st, const TsReference& ts) {
    ConvergenceSample s;
    s.t = st.t;
    const Eigen::ArrayXd dev = st.u - ts.phi - ts.c_tilde * st.t;
    s.raw = dev.abs().maxCoeff();
    s.offset = dev.mean();
    s.centered = (dev - s.offset).abs().maxCoeff();
    s.oscillation = dev.maxCoeff() - dev.minCoeff();
    s.front_height = st.u[0];
    return s;
}

SnapshotStats make_stats(const EvolutionState& st, const std::optional<TsReference>& ts) {
    SnapshotStats s;
    s.t = st.t;
    if (ts) s.dev0_absmax = (st.u - ts->c_tilde * st.t).abs().maxCoeff();
    s.ur_min = st.ur.minCoeff();
    s.ur_max = st.ur.maxCoeff();
    s.urr_absmax = st.urr.abs().maxCoeff();
    s.ut_min = st.ut.minCoeff();
    s.ut_max = st.ut.maxCoeff();
    s.H_min = st.H.minCoeff();
    s.H_max = st.H.maxCoeff();
    return s;
}

} // namespace

EvolveResult evolve(EvolutionState state, const EvolveOptions& opts,
                    const std::optional<TsReference>& ts, const std::vector<Observer*>& observers) {
    if (ts && ts->phi.size() != state.u.size())
        throw GridMismatch("evolve: reference grid size mismatch");

    EvolveResult out;
    out.hypothesis = check_hypotheses(state);
    if (out.hypothesis == HypothesisTag::None && !opts.allow_unmatched_hypothesis)
        throw DomainError("evolve: initial data matches no estimate hypothesis "
                          "(pass allow_unmatched_hypothesis to continue)");

    auto observe = [&](const EvolutionState& st) {
        if (ts) out.convergence.samples.push_back(make_sample(st, *ts));
        out.snapshots.push_back(make_stats(st, ts));
        for (auto* obs : observers) obs->sample(st);
    };

    observe(state);
    double next_obs = opts.observe_dt;
    while (state.t < opts.t_final * (1.0 - 1e-12)) {
        const double bound = cfl_time_step(state, opts.cfl);
        double dt = std::min(bound, opts.t_final - state.t);
        bool at_obs = false;
        if (state.t + dt >= next_obs - 1e-14) {
            dt = std::min(dt, next_obs - state.t);
            at_obs = state.t + dt >= next_obs - 1e-14;
        }
        step(state, dt);
        if (at_obs) {
            observe(state);
            while (next_obs <= state.t + 1e-14) next_obs += opts.observe_dt;
        }
    }
    if (out.snapshots.empty() || out.snapshots.back().t < state.t - 1e-14) observe(state);
    out.state = std::move(state);
    return out;
}

TsReference make_ts_reference(double c_tilde, const ProfileSolution& profile, int segments) {
    TsReference ts;
    ts.c_tilde = c_tilde;
    ts.phi.resize(segments + 1);
    for (int i = 0; i <= segments; ++i)
        ts.phi[i] = profile.phi_at(static_cast<double>(i) / segments);
    return ts;
}

} // namespace gmcf
