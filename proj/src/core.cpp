#include "gmcf/core.hpp"

#include <cmath>

namespace gmcf {

double signed_pow(double x, double e, const PowerSpec& spec) {
    if (x >= 0.0) {
        if (e == 1.0) return x;
        return std::pow(x, e);
    }
    if (!spec.odd_rational)
        throw DomainError("signed_pow: negative base requires odd-rational exponent semantics");
    if (e == 1.0) return x;
    return -std::pow(-x, e);
}

std::string BoundarySlope::str() const {
    switch (kind_) {
        case Kind::PosInf: return "+inf";
        case Kind::NegInf: return "-inf";
        default: break;
    }
    return std::to_string(value_);
}

void FlowParams::validate() const {
    if (dim < 2) throw DomainError("FlowParams: dimension must be >= 2");
    if (!(alpha > 0.0)) throw DomainError("FlowParams: alpha must be positive");
    if (alpha_odd) {
        const auto& [q, p] = *alpha_odd;
        if (q <= 0 || p <= 0 || q % 2 == 0 || p % 2 == 0)
            throw DomainError("FlowParams: alpha_odd requires positive odd q and p");
        const double ratio = static_cast<double>(q) / static_cast<double>(p);
        if (std::abs(ratio - alpha) > 1e-14 * std::max(1.0, std::abs(alpha)))
            throw DomainError("FlowParams: q/p does not match alpha");
    }
}

FlowParams make_params(int dim, double alpha, double b, BoundarySlope k,
                       std::optional<OddRational> alpha_odd) {
    FlowParams p;
    p.dim = dim;
    p.alpha = alpha;
    p.alpha_odd = alpha_odd;
    p.b = b;
    p.k = k;
    p.validate();
    return p;
}

std::string to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::BZero: return "b_zero";
        case RegimeTag::BNeg: return "b_neg";
        case RegimeTag::CGtBPos: return "c_gt_b_pos";
        case RegimeTag::CEqB: return "c_eq_b";
        case RegimeTag::BGtCPos: return "b_gt_c_pos";
    }
    return "?";
}

std::string describe(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::BZero: return "b = 0, c > 0";
        case RegimeTag::BNeg: return "b < 0";
        case RegimeTag::CGtBPos: return "c > b > 0";
        case RegimeTag::CEqB: return "c = b";
        case RegimeTag::BGtCPos: return "b > c > 0 (odd alpha)";
    }
    return "?";
}

bool finite_radius(RegimeTag tag) {
    return tag == RegimeTag::BNeg || tag == RegimeTag::BGtCPos;
}

RegimeTag classify_regime(const FlowParams& params, double c) {
    params.validate();
    if (c < 0.0) throw DomainError("classify_regime: speed must be >= 0");
    const double b = params.b;
    if (std::abs(c - b) <= regime_eq_tolerance(b)) return RegimeTag::CEqB;
    if (b == 0.0) return RegimeTag::BZero;
    if (b < 0.0) return RegimeTag::BNeg;
    if (c > b) return RegimeTag::CGtBPos;
    if (!params.alpha_odd)
        throw RegimeError("regime b > c > 0 requires odd-rational alpha");
    return RegimeTag::BGtCPos;
}

double curvature_radial(double r, double ur, double urr, int dim) {
    if (r < 0.0) throw DomainError("curvature_radial: r must be >= 0");
    if (r == 0.0) {
        if (ur != 0.0)
            throw DomainError("curvature_radial: radial symmetry requires u_r(0) = 0");
        return dim * urr;
    }
    const double s2 = 1.0 + ur * ur;
    const double s = std::sqrt(s2);
    return urr / (s2 * s) + (dim - 1) * ur / (r * s);
}

} // namespace gmcf
