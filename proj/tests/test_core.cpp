#include <doctest.h>

#include "gmcf/core.hpp"

#include <cmath>
#include <random>

using namespace gmcf;

TEST_CASE("signed_pow basics") {
    const PowerSpec odd{1.0 / 3.0, true};
    const PowerSpec plain{1.0 / 3.0, false};
    CHECK(signed_pow(8.0, 1.0 / 3.0, odd) == doctest::Approx(2.0));
    CHECK(signed_pow(-8.0, 1.0 / 3.0, odd) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(signed_pow(-8.0, 1.0 / 3.0, plain), DomainError);
    CHECK(signed_pow(0.0, 0.5, plain) == 0.0);
    CHECK(signed_pow(4.0, 0.5, plain) == doctest::Approx(2.0));
}

TEST_CASE("signed_pow round trip and monotonicity") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    const double exps[] = {1.0 / 3.0, 3.0, 5.0 / 3.0, 1.0 / 5.0, 7.0};
    for (double e : exps) {
        const PowerSpec sp{e, true};
        for (int i = 0; i < 200; ++i) {
            const double x = ux(rng);
            const double y = signed_pow(signed_pow(x, e, sp), 1.0 / e, sp);
            CHECK(std::abs(y - x) <= 1e-12 * std::max(1.0, std::abs(x)));
            // composing the power with its inverse preserves the sign
            if (x != 0.0) CHECK(y * x > 0.0);
        }
        // monotone increasing in x
        double prev = signed_pow(-10.0, e, sp);
        for (double x = -9.5; x <= 10.0; x += 0.5) {
            const double v = signed_pow(x, e, sp);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("curvature_radial at the axis and on flat graphs") {
    CHECK(curvature_radial(0.0, 0.0, 0.7, 3) == doctest::Approx(3 * 0.7));
    CHECK(curvature_radial(0.5, 0.0, 0.0, 4) == 0.0);
    CHECK(curvature_radial(2.0, 0.0, 0.0, 2) == 0.0);
    CHECK_THROWS_AS(curvature_radial(0.0, 0.1, 0.0, 2), DomainError);
    CHECK_THROWS_AS(curvature_radial(-1.0, 0.0, 0.0, 2), DomainError);
}

TEST_CASE("curvature_radial on the sphere cap equals N/R") {
    // u(r) = -sqrt(R^2 - r^2): exact derivatives and a finite-difference oracle
    const double R = 2.0;
    auto u = [&](double r) { return -std::sqrt(R * R - r * r); };
    for (int dim : {2, 3, 4}) {
        for (double r = 0.1; r < 0.9 * R; r += 0.17) {
            const double ur = r / std::sqrt(R * R - r * r);
            const double urr = R * R / std::pow(R * R - r * r, 1.5);
            CHECK(std::abs(curvature_radial(r, ur, urr, dim) - dim / R) < 1e-10);

            const double h = 1e-5;
            const double ur_fd = (u(r + h) - u(r - h)) / (2 * h);
            const double urr_fd = (u(r + h) - 2 * u(r) + u(r - h)) / (h * h);
            CHECK(std::abs(curvature_radial(r, ur_fd, urr_fd, dim) - dim / R) < 1e-5);
        }
    }
}

TEST_CASE("curvature_radial is continuous at r -> 0 on radial polynomials") {
    // u = a2 r^2 + a4 r^4: u_r(0) = 0, H(0) = N * 2 a2
    const double a2 = 0.35, a4 = -0.2;
    for (int dim : {2, 3}) {
        const double h0 = dim * 2 * a2;
        for (int k = 2; k <= 8; ++k) {
            const double r = std::pow(10.0, -k);
            const double ur = 2 * a2 * r + 4 * a4 * r * r * r;
            const double urr = 2 * a2 + 12 * a4 * r * r;
            // quadratic approach to the axis limit
            CHECK(std::abs(curvature_radial(r, ur, urr, dim) - h0) < 20.0 * r * r + 1e-14);
        }
    }
}

TEST_CASE("classify_regime") {
    auto p0 = make_params(2, 1.0, 0.0);
    CHECK(classify_regime(p0, 1.0) == RegimeTag::BZero);

    auto p1 = make_params(2, 1.0, 3.0);
    CHECK(classify_regime(p1, 5.0) == RegimeTag::CGtBPos);
    CHECK(classify_regime(p1, 3.0) == RegimeTag::CEqB);
    CHECK(classify_regime(p1, 3.0 + 1e-14) == RegimeTag::CEqB);  // inside tolerance

    auto podd = make_params(2, 1.0 / 3.0, 5.0, BoundarySlope::finite(1.0), OddRational{1, 3});
    CHECK(classify_regime(podd, 3.0) == RegimeTag::BGtCPos);

    auto p2 = make_params(2, 0.5, 5.0);
    CHECK_THROWS_AS(classify_regime(p2, 3.0), RegimeError);

    auto p3 = make_params(3, 2.0, -1.0);
    CHECK(classify_regime(p3, 0.5) == RegimeTag::BNeg);
}

TEST_CASE("FlowParams validation") {
    CHECK_THROWS_AS(make_params(1, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_params(2, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_params(2, 0.5, 0.0, BoundarySlope::finite(1.0), OddRational{1, 2}),
                    DomainError);
    CHECK_THROWS_AS(make_params(2, 0.5, 0.0, BoundarySlope::finite(1.0), OddRational{1, 3}),
                    DomainError);  // 1/3 != 0.5
    CHECK_NOTHROW(make_params(2, 3.0, 0.0, BoundarySlope::finite(1.0), OddRational{3, 1}));
}

TEST_CASE("BoundarySlope extended values") {
    auto kinf = BoundarySlope::pos_inf();
    CHECK(!kinf.is_finite());
    CHECK(kinf.sign() == 1);
    CHECK_THROWS_AS(kinf.value(), DomainError);
    CHECK(BoundarySlope::neg_inf().sign() == -1);
    CHECK(BoundarySlope::finite(-2.0).value() == -2.0);
}
