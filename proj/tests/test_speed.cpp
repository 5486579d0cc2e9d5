#include <doctest.h>

#include "gmcf/speed.hpp"

#include <cmath>
#include <random>

using namespace gmcf;

TEST_CASE("admissibility cases and rejections") {
    CHECK(admissibility(make_params(2, 1.0, 0.0, BoundarySlope::finite(1.0))).tag == SpeedCase::A);

    auto b_ok = admissibility(make_params(2, 1.0, -1.0, BoundarySlope::finite(1.0)));
    CHECK(b_ok.ok);
    CHECK(b_ok.tag == SpeedCase::B);

    auto b_bad = admissibility(make_params(2, 1.0, -8.0, BoundarySlope::finite(1.0)));
    CHECK(!b_bad.ok);
    CHECK(b_bad.rejection.find("(-b)^(1/alpha)") != std::string::npos);

    CHECK(admissibility(make_params(2, 1.0, 3.0, BoundarySlope::finite(2.0))).tag == SpeedCase::C);

    // b^{1/alpha} sqrt(1+k^2) = sqrt(2) < 3 = -k N: rejected
    auto d_bad = admissibility(
        make_params(3, 1.0 / 3.0, 1.0, BoundarySlope::finite(-1.0), OddRational{1, 3}));
    CHECK(!d_bad.ok);

    auto d_ok = admissibility(
        make_params(2, 1.0 / 3.0, 3.0, BoundarySlope::finite(-1.0), OddRational{1, 3}));
    CHECK(d_ok.ok);
    CHECK(d_ok.tag == SpeedCase::D);

    // infinite slopes
    auto binf = admissibility(make_params(2, 1.0, -1.5, BoundarySlope::pos_inf()));
    CHECK(binf.ok);
    auto binf_deg = admissibility(make_params(2, 1.0, -1.0, BoundarySlope::pos_inf()));
    CHECK(!binf_deg.ok);  // (-b)^{1/alpha} = N-1: slope-degenerate radius
    auto dinf = admissibility(
        make_params(2, 1.0 / 3.0, 2.0, BoundarySlope::neg_inf(), OddRational{1, 3}));
    CHECK(dinf.ok);  // b^{1/alpha} = 8 > 2

    // flat boundary
    CHECK(admissibility(make_params(2, 1.0, 3.0, BoundarySlope::finite(0.0))).degenerate_flat);
    CHECK(!admissibility(make_params(2, 2.0, 3.0, BoundarySlope::finite(0.0))).ok);
}

TEST_CASE("bracket_speed endpoints") {
    auto pa = make_params(2, 1.0, 0.0, BoundarySlope::finite(1.0));
    auto [alo, ahi] = bracket_speed(pa);
    CHECK(alo == 0.0);
    CHECK(ahi == doctest::Approx(2.0 * std::sqrt(2.0)));

    auto pc = make_params(2, 1.0, 3.0, BoundarySlope::finite(2.0));
    auto [clo, chi] = bracket_speed(pc);
    CHECK(clo == 3.0);
    CHECK(chi == doctest::Approx(5.0 * std::sqrt(5.0)));
}

TEST_CASE("find_speed reproduces independently computed reference speeds") {
    // reference values from a high-order integrator + bisection, tol 1e-12
    auto r1 = find_speed(make_params(2, 1.0, 0.0, BoundarySlope::finite(1.0)));
    CHECK(r1.c_tilde == doctest::Approx(1.6751890680538633).epsilon(1e-7));
    CHECK(r1.residual <= 1e-8);
    CHECK(r1.case_tag == SpeedCase::A);
    CHECK(r1.c_tilde < 2.0 * std::sqrt(2.0));

    auto r2 = find_speed(make_params(2, 1.0, 3.0, BoundarySlope::finite(1.0)));
    CHECK(r2.c_tilde == doctest::Approx(5.499049703674081).epsilon(1e-7));
    CHECK(r2.c_tilde > 3.0);

    auto r3 = find_speed(make_params(2, 1.0, -1.0, BoundarySlope::finite(1.0)));
    CHECK(r3.c_tilde == doctest::Approx(0.48332808235521085).epsilon(1e-7));

    auto r4 = find_speed(
        make_params(2, 1.0 / 3.0, 3.0, BoundarySlope::finite(-1.0), OddRational{1, 3}));
    CHECK(r4.c_tilde == doctest::Approx(2.067131841807617).epsilon(1e-6));
    CHECK(r4.case_tag == SpeedCase::D);

    // bracket widths strictly decrease
    for (std::size_t i = 1; i < r1.bracket_history.size(); ++i) {
        const auto& a = r1.bracket_history[i - 1];
        const auto& b = r1.bracket_history[i];
        CHECK(b.c_hi - b.c_lo < a.c_hi - a.c_lo);
    }
}

TEST_CASE("small-angle law: c_tilde -> b as k -> 0+ in case (c)") {
    double prev = 1e9;
    for (double k : {1e-1, 1e-2, 1e-3}) {
        auto r = find_speed(make_params(2, 1.0, 3.0, BoundarySlope::finite(k)));
        const double excess = r.c_tilde - 3.0;
        CHECK(excess > 0.0);
        CHECK(excess < prev);
        prev = excess;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("degenerate flat selection at k = 0, alpha = 1") {
    auto r = find_speed(make_params(2, 1.0, 3.0, BoundarySlope::finite(0.0)));
    CHECK(r.c_tilde == 3.0);
    CHECK(r.profile.psi.abs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(find_speed(make_params(2, 2.0, 3.0, BoundarySlope::finite(0.0))), DomainError);
}

TEST_CASE("infinite boundary slope roots the blow-up radius at the wall") {
    auto p = make_params(2, 1.0, -1.5, BoundarySlope::pos_inf());
    auto r = find_speed(p);
    CHECK(r.residual <= 1e-7);
    REQUIRE(r.profile.hit_cutoff);
    auto [rinf, br] = estimate_r_infinity(r.profile);
    CHECK(rinf == doctest::Approx(1.0).epsilon(1e-6));

    // same speed through the radius-matching problem
    const double c_radius = find_speed_for_radius(p, 1.0);
    CHECK(c_radius == doctest::Approx(r.c_tilde).epsilon(1e-6));

    // slope-degenerate instance is rejected rather than failing to bracket
    CHECK_THROWS_AS(find_speed(make_params(2, 1.0, -1.0, BoundarySlope::pos_inf())), DomainError);
}

TEST_CASE("find_speed_for_radius limits and domain") {
    auto p = make_params(2, 1.0, -1.0);
    // R -> N(-b)^{-1/alpha} = 2 from below forces c -> 0
    const double c195 = find_speed_for_radius(p, 1.95);
    const double c15 = find_speed_for_radius(p, 1.5);
    CHECK(c195 < c15);
    CHECK(c195 < 0.2);
    // attainable range excludes the slope-degenerate radius (N-1)(-b)^{-1/a} = 1
    CHECK_THROWS_AS(find_speed_for_radius(p, 1.0), DomainError);
    CHECK_THROWS_AS(find_speed_for_radius(p, 0.5), DomainError);
    CHECK_THROWS_AS(find_speed_for_radius(p, 2.5), DomainError);

    auto podd = make_params(2, 1.0 / 3.0, 1.0, BoundarySlope::finite(-1.0), OddRational{1, 3});
    // R -> N b^{-1/alpha} = 2 from above forces c -> 0
    const double c205 = find_speed_for_radius(podd, 2.05);
    const double c30 = find_speed_for_radius(podd, 3.0);
    CHECK(c205 < c30);
    CHECK(c205 < 0.2);
    CHECK_THROWS_AS(find_speed_for_radius(podd, 1.9), DomainError);
}

TEST_CASE("regularized-oracle re-solve moves the speed by < 1e-6 relative") {
    auto p = make_params(2, 1.0, 0.0, BoundarySlope::finite(1.0));
    auto base = find_speed(p);
    SpeedOptions o;
    o.use_eps_oracle = true;
    auto check = find_speed(p, o);
    CHECK(std::abs(check.c_tilde - base.c_tilde) <= 1e-6 * base.c_tilde);
}

TEST_CASE("translating_solution meets the wall slope") {
    auto p = make_params(2, 1.0, 0.0, BoundarySlope::finite(1.0));
    auto ts = translating_solution(p);
    const auto& prof = ts.profile;
    CHECK(prof.phi[0] == 0.0);
    CHECK(prof.psi[0] == 0.0);
    CHECK(prof.psi_at(1.0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(prof.cross_check.has_value());
}

TEST_CASE("wall slope is strictly monotone across brackets (random instances)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uk(0.4, 2.0), ub(0.3, 2.5), uu(0.1, 0.8);
    int done = 0;
    for (int trial = 0; trial < 40 && done < 20; ++trial) {
        FlowParams p;
        const int form = trial % 4;
        const double k = uk(rng);
        if (form == 0) p = make_params(2 + trial % 3, 1.0, 0.0, BoundarySlope::finite(k));
        if (form == 1) p = make_params(2, 1.0, -uu(rng), BoundarySlope::finite(k));
        if (form == 2) p = make_params(2 + trial % 2, 1.0, ub(rng), BoundarySlope::finite(k));
        if (form == 3)
            p = make_params(2, 3.0, 1.5 + ub(rng), BoundarySlope::finite(-k), OddRational{3, 1});
        auto adm = admissibility(p);
        if (!adm.ok) continue;
        auto [lo, hi] = bracket_speed(p);
        double prev = -1e300;
        for (int i = 1; i <= 10; ++i) {
            const double c = lo + (hi - lo) * i / 11.0;
            const double v = psi_at_wall(p, c, 1e-10, k);
            if (std::isfinite(prev) && std::isfinite(v)) CHECK(v > prev);
            prev = v;
        }
        ++done;
    }
    CHECK(done >= 15);
}
