#include <doctest.h>

#include "gmcf/profile.hpp"

#include <cmath>

using namespace gmcf;

namespace {
const IntegratorOptions kDefault{};
}

TEST_CASE("degenerate probe c=0, b=-1: exact linear zeta and sphere-cap phi") {
    auto p = make_params(2, 1.0, -1.0);
    auto sol = solve_profile(p, 0.0);
    REQUIRE(sol.regime == RegimeTag::BNeg);
    REQUIRE(sol.hit_cutoff);

    double worst_z = 0.0, worst_phi = 0.0, worst_psi = 0.0;
    for (double r = 0.0; r <= 1.9; r += 0.01) {
        const double z_exact = r / 2.0;
        const double phi_exact = 2.0 - std::sqrt(4.0 - r * r);
        const double psi_exact = z_exact / std::sqrt(1.0 - z_exact * z_exact);
        worst_z = std::max(worst_z, std::abs(sol.zeta_at(r) - z_exact));
        worst_phi = std::max(worst_phi, std::abs(sol.phi_at(r) - phi_exact));
        worst_psi = std::max(worst_psi, std::abs(sol.psi_at(r) - psi_exact));
    }
    CHECK(worst_z < 1e-8);
    CHECK(worst_phi < 1e-8);
    CHECK(worst_psi < 1e-6);  // slope magnifies near the rim

    // zeta exact at the stored nodes
    for (long i = 0; i < sol.r.size(); ++i)
        CHECK(std::abs(sol.zeta[i] - sol.r[i] / 2.0) < 1e-9);

    REQUIRE(sol.r_inf.has_value());
    CHECK(std::abs(*sol.r_inf - 2.0) < 1e-4);
    CHECK(sol.r_inf_bracket->lo <= *sol.r_inf);
    CHECK(sol.r_inf_bracket->hi >= *sol.r_inf);
    CHECK(sol.r_inf_bracket->hi <= 2.0 + 1e-12);

    // endpoint value: Phi(2-0) = 2 for the sphere cap
    REQUIRE(sol.phi_end.has_value());
    CHECK(std::abs(*sol.phi_end - 2.0) < 1e-3);
}

TEST_CASE("flat profile when c = b") {
    auto p = make_params(3, 2.0, 3.0);
    auto sol = integrate_zeta(p, 3.0);
    CHECK(sol.regime == RegimeTag::CEqB);
    CHECK(sol.psi.abs().maxCoeff() <= 1e-12);
    CHECK(sol.phi.abs().maxCoeff() <= 1e-12);
}

TEST_CASE("R_inf bracket within the proved bounds, b=-1 c=1") {
    auto p = make_params(2, 1.0, -1.0);
    auto sol = solve_profile(p, 1.0);
    REQUIRE(sol.r_inf_bracket.has_value());
    CHECK(sol.r_inf_bracket->lo >= 1.0 - 1e-9);  // N (c-b)^{-1/alpha} = 1
    CHECK(sol.r_inf_bracket->hi <= 2.0 + 1e-9);  // N (-b)^{-1/alpha} = 2
}

TEST_CASE("sandwich bounds for b <= 0 at every node") {
    for (auto [b, c, alpha, dim] : {std::tuple{-1.0, 1.0, 1.0, 2}, std::tuple{-0.5, 2.0, 2.0, 3},
                                    std::tuple{0.0, 1.5, 0.5, 2}}) {
        auto p = make_params(dim, alpha, b);
        auto sol = integrate_zeta(p, c, {});
        const double e = 1.0 / alpha;
        const double up = std::pow(c - b, e) / dim;
        const double lo = b < 0 ? std::pow(-b, e) / dim : 0.0;
        for (long i = 0; i < sol.r.size(); ++i) {
            CHECK(sol.zeta[i] <= up * sol.r[i] + 1e-9);
            CHECK(sol.zeta[i] >= lo * sol.r[i] - 1e-9);
        }
    }
}

TEST_CASE("regime shape: signs and monotonicity of psi") {
    auto pneg = make_params(2, 1.0, -1.0);
    auto s1 = integrate_zeta(pneg, 1.0);
    for (long i = 2; i < s1.r.size(); ++i) {
        CHECK(s1.psi[i] > 0.0);
        CHECK(s1.psi[i] > s1.psi[i - 1]);
    }

    auto podd = make_params(2, 1.0 / 3.0, 2.0, BoundarySlope::finite(-1.0), OddRational{1, 3});
    auto s2 = integrate_zeta(podd, 1.0);
    CHECK(s2.regime == RegimeTag::BGtCPos);
    REQUIRE(s2.hit_cutoff);
    for (long i = 2; i < s2.r.size(); ++i) {
        CHECK(s2.psi[i] < 0.0);
        CHECK(s2.psi[i] < s2.psi[i - 1]);
    }
    auto [rinf, br] = estimate_r_infinity(s2);
    const auto th = r_infinity_theory_bounds(podd, 1.0, RegimeTag::BGtCPos);
    CHECK(br.lo >= th.lo - 1e-9);
    CHECK(br.hi <= th.hi + 1e-9);
    CHECK(rinf >= br.lo);
    CHECK(rinf <= br.hi);
}

TEST_CASE("algebraic consistency psi = zeta/sqrt(1-zeta^2) at nodes") {
    auto p = make_params(3, 1.0, -0.7);
    auto sol = integrate_zeta(p, 0.9);
    for (long i = 0; i < sol.r.size(); ++i) {
        const double z = sol.zeta[i];
        CHECK(std::abs(sol.psi[i] - z / std::sqrt((1 - z) * (1 + z))) <=
              1e-12 * (1.0 + std::abs(sol.psi[i])));
        CHECK(std::abs(z) < 1.0);
    }
}

TEST_CASE("epsilon oracle: slope at origin, monotonicity in eps, radius bracket") {
    auto p = make_params(2, 1.0, -1.0);
    const double c = 1.0;

    // psi_eps'(0) = (c - b)^{1/alpha} for every eps (Richardson quotient:
    // psi'' ~ -(N-1) psi'(0)/eps makes the plain ratio first-order in h/eps)
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        auto se = integrate_psi_epsilon(p, c, eps);
        const double h = 1e-8;
        const double d = (4.0 * se.psi_at(h) - se.psi_at(2.0 * h)) / (2.0 * h);
        CHECK(d == doctest::Approx(2.0).epsilon(1e-6));
    }

    // strictly increasing in eps at shared radii
    auto sa = integrate_psi_epsilon(p, c, 1e-3);
    auto sb = integrate_psi_epsilon(p, c, 1e-2);
    const double hi = 0.9 * std::min(sa.r_end(), sb.r_end());
    for (int j = 1; j <= 50; ++j) {
        const double r = hi * j / 50;
        CHECK(sb.psi_at(r) > sa.psi_at(r));
    }

    // blow-up radius within the regularized-problem bounds
    REQUIRE(sa.hit_cutoff);
    auto [rinf, br] = estimate_r_infinity(sa);
    CHECK(br.lo >= std::pow(c - p.b, -1.0) - 1e-9);              // (c-b)^{-1/alpha}
    CHECK(br.hi <= std::pow(-p.b, -1.0) * (2 + std::log(2.0)) + 1e-9);
    CHECK(rinf < 2.0);  // below the singular-problem radius
}

TEST_CASE("chain of forms: eps profiles decrease onto the zeta profile") {
    auto p = make_params(2, 1.0, -1.0);
    auto sol = solve_profile(p, 1.0);
    REQUIRE(sol.cross_check.has_value());
    const auto& cc = *sol.cross_check;
    CHECK(cc.monotone);
    CHECK(cc.deviations[0] > cc.deviations[1]);
    CHECK(cc.deviations[1] > cc.deviations[2]);
    CHECK(cc.deviations[2] <= cc.tolerance);

    // eps profile sits above the limit profile (positive-curvature regime)
    auto se = integrate_psi_epsilon(p, 1.0, 1e-3);
    const double hi = std::min({0.9 * sol.r_end(), 0.95 * se.r_end()});
    for (int j = 1; j <= 40; ++j) {
        const double r = hi * j / 40;
        CHECK(se.psi_at(r) > sol.psi_at(r));
    }
}

TEST_CASE("eps deviation small for b=0, alpha=2, N=3 on [0,1]") {
    auto p = make_params(3, 2.0, 0.0);
    IntegratorOptions o;
    o.r_max = 1.0;
    auto sol = solve_profile(p, 1.0, o);
    REQUIRE(sol.cross_check.has_value());
    CHECK(sol.cross_check->deviations[2] < 1e-3);  // measured ~3.8e-5
    CHECK(sol.cross_check->deviations[2] < 1e-4);
}

TEST_CASE("b=0 asymptotics: quadratic growth for alpha=1, N=2") {
    auto p = make_params(2, 1.0, 0.0);
    IntegratorOptions o;
    o.r_max = 200.0;
    auto sol = integrate_zeta(p, 1.0, o);
    CHECK(std::abs(sol.phi_at(200.0) / (0.5 * 200.0 * 200.0) - 1.0) < 0.02);
}

TEST_CASE("cone slope limit and V-shape defect, b=3 c=5") {
    IntegratorOptions o;
    o.r_max = 400.0;
    const double psi0 = 4.0 / 3.0;

    for (int dim : {2, 3}) {
        auto p = make_params(dim, 1.0, 3.0);
        auto sol = integrate_zeta(p, 5.0, o);
        CHECK(sol.regime == RegimeTag::CGtBPos);
        const double d200 = std::abs(sol.psi_at(200.0) - psi0);
        const double d400 = std::abs(sol.psi_at(400.0) - psi0);
        CHECK(d400 < d200);  // monotone approach to the limit slope
        // approach rate ~ (N-1) c / (b^2 r)
        const double expect = (dim - 1) * 5.0 / (9.0 * 200.0);
        CHECK(d200 == doctest::Approx(expect).epsilon(0.05));
    }

    // reference value from an independent high-order integration
    auto p3 = make_params(3, 1.0, 3.0);
    auto s3 = integrate_zeta(p3, 5.0, o);
    CHECK(s3.psi_at(200.0) == doctest::Approx(1.3277925421351475).epsilon(1e-6));

    auto p2 = make_params(2, 1.0, 3.0);
    auto s2 = integrate_zeta(p2, 5.0, o);
    CHECK(v_shape_defect(s2, 0.0) == doctest::Approx(0.0));
    double prev = 0.0;
    for (double r = 5.0; r <= 320.0; r *= 2.0) {
        const double d = v_shape_defect(s2, r);
        CHECK(d > prev);
        prev = d;
    }
    // doubling increments: measured ~0.38, spec floor 0.05
    for (double r : {10.0, 20.0, 40.0}) {
        const double inc = v_shape_defect(s2, 2 * r) - v_shape_defect(s2, r);
        CHECK(inc > 0.05);
        CHECK(inc == doctest::Approx(0.382).epsilon(0.02));
    }
}

TEST_CASE("asymptotic_value closed forms") {
    auto p = make_params(3, 1.0, 0.0);
    CHECK(asymptotic_value(p, 2.0, 3.0) == doctest::Approx(0.5 * 9.0));
    CHECK(asymptotic_value(p, 0.0, 7.0) == 0.0);

    auto pc = make_params(2, 1.0, 3.0);
    CHECK(asymptotic_value(pc, 5.0, 1.0) == doctest::Approx(4.0 / 3.0));

    auto pn = make_params(2, 1.0, -1.0);
    CHECK_THROWS_AS(asymptotic_value(pn, 1.0, 1.0), NotApplicable);
}

TEST_CASE("estimate_r_infinity: monotone decrease in c toward the slope-degenerate radius") {
    // As c grows the trajectory rides the zeta nullcline and blows up just
    // above (N-1)(-b)^{-1/alpha}; R_inf decreases to that radius, not to 0.
    auto p = make_params(2, 1.0, -1.0);
    double prev = 10.0;
    for (double c : {10.0, 100.0, 1000.0}) {
        auto sol = integrate_zeta(p, c, {});
        auto [rinf, br] = estimate_r_infinity(sol);
        CHECK(rinf < prev);
        prev = rinf;
    }
    CHECK(std::abs(prev - 1.0) < 0.01);  // (N-1)(-b)^{-1/alpha} = 1 here

    auto pflat = make_params(2, 1.0, 0.0);
    auto s0 = integrate_zeta(pflat, 1.0, {});
    CHECK_THROWS_AS(estimate_r_infinity(s0), NotApplicable);
}

TEST_CASE("concave regime: maximal radius grows toward the flat limit") {
    auto p = make_params(2, 1.0 / 3.0, 1.0, BoundarySlope::finite(-1.0), OddRational{1, 3});
    double prev = 0.0;
    for (double c : {0.3, 0.6, 0.9}) {
        auto sol = integrate_zeta(p, c, {});
        REQUIRE(sol.hit_cutoff);
        auto [rinf, br] = estimate_r_infinity(sol);
        CHECK(rinf > prev);
        prev = rinf;
    }
    CHECK(prev > 2.0);  // beyond R_inf(0, b) = N b^{-1/alpha} = 2
}

TEST_CASE("monotonicity probe") {
    auto p = make_params(2, 1.0, -1.0);
    Eigen::ArrayXd rs = Eigen::ArrayXd::LinSpaced(9, 0.1, 0.9);
    auto rep = monotonicity_probe(p, 1.0, 2.0, rs);
    CHECK((rep.margins > 0.0).all());
    REQUIRE(rep.r_inf_c1.has_value());
    CHECK(*rep.r_inf_c2 < *rep.r_inf_c1);

    auto podd = make_params(2, 1.0 / 3.0, 1.0, BoundarySlope::finite(-1.0), OddRational{1, 3});
    auto rep2 = monotonicity_probe(podd, 0.3, 0.6, rs);
    CHECK((rep2.margins > 0.0).all());  // psi increasing = less negative
    REQUIRE(rep2.r_inf_c1.has_value());
    REQUIRE(rep2.r_inf_c2.has_value());
    CHECK(*rep2.r_inf_c2 > *rep2.r_inf_c1);

    CHECK_THROWS_AS(monotonicity_probe(p, 2.0, 1.0, rs), DomainError);
}

TEST_CASE("ODE residual shrinks at second order under step halving") {
    auto p = make_params(2, 1.0, -1.0);
    const double c = 1.0;
    auto residual_max = [&](double h) {
        IntegratorOptions o;
        o.tol = 1e-3;  // step size pinned by dr_max, not accuracy
        o.dr_max = h;
        o.r_max = 1.2;
        auto sol = integrate_zeta(p, c, o);
        double worst = 0.0;
        for (long i = 1; i + 1 < sol.r.size(); ++i) {
            if (sol.r[i] < 0.05 || std::abs(sol.zeta[i]) > 0.95) continue;
            const double dpsi = (sol.psi[i + 1] - sol.psi[i - 1]) / (sol.r[i + 1] - sol.r[i - 1]);
            const double psi = sol.psi[i], r = sol.r[i];
            const double s2 = 1.0 + psi * psi;
            const double rhs = std::pow(c / std::sqrt(s2) - p.b, 1.0) * std::sqrt(s2);
            const double res = dpsi / s2 + (p.dim - 1) * psi / r - rhs;
            worst = std::max(worst, std::abs(res));
        }
        return worst;
    };
    const double r1 = residual_max(1.0 / 64);
    const double r2 = residual_max(1.0 / 128);
    CHECK(r2 < r1);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.5));  // centered-difference order
    CHECK(r1 < 10.0 * (1.0 / 64) * (1.0 / 64) * 64.0);    // C h^2 with moderate C
}

TEST_CASE("endpoint square-root law near the cutoff") {
    auto p = make_params(2, 1.0, -1.0);
    auto sol = integrate_zeta(p, 1.0, {});
    REQUIRE(sol.hit_cutoff);
    auto [rinf, br] = estimate_r_infinity(sol);
    const double L = std::pow(-p.b, 1.0) - (p.dim - 1) / rinf;
    const double rho_c = rinf - sol.r_end();
    int checked = 0;
    for (long i = sol.r.size() - 1; i >= 0; --i) {
        const double rho = rinf - sol.r[i];
        if (rho > 10.0 * std::max(rho_c, 1e-6)) break;
        const double ratio = (1.0 - std::abs(sol.zeta[i])) / rho;
        CHECK(ratio == doctest::Approx(L).epsilon(0.10));
        ++checked;
    }
    CHECK(checked >= 3);
}
