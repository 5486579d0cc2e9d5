#pragma once

// Shared domain types for the radial curvature-flow solver: flow parameters,
// power semantics for H^alpha, regime classification and the radial mean
// curvature operator.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace gmcf {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct RegimeError : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };

// Integration / numeric failures
struct StepFailure : Error { using Error::Error; };
struct BlowupUndetected : Error { using Error::Error; };
struct CrossCheckFailure : Error { using Error::Error; };
struct BracketFailure : Error { using Error::Error; };
struct NonMonotone : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };

struct OrderingViolation : Error {
    double radius;
    OrderingViolation(const std::string& msg, double r) : Error(msg), radius(r) {}
};

// Evolution failures
struct CompatibilityError : Error { using Error::Error; };
struct SignLoss : Error { using Error::Error; };
struct CFLViolation : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Power semantics
// ---------------------------------------------------------------------------

/// alpha = q/p with q, p positive odd integers; makes x -> x^alpha odd.
struct OddRational {
    int q = 1;
    int p = 1;
};

/// How powers of (possibly negative) bases are evaluated.
struct PowerSpec {
    double alpha = 1.0;
    bool odd_rational = false;
};

/// x^e with odd-rational sign semantics: sign(x)*|x|^e when odd_rational,
/// otherwise defined for x >= 0 only.
double signed_pow(double x, double e, const PowerSpec& spec);

// ---------------------------------------------------------------------------
// Boundary slope (finite value or an explicit +/- infinity)
// ---------------------------------------------------------------------------

class BoundarySlope {
public:
    enum class Kind { Finite, PosInf, NegInf };

    BoundarySlope() = default;
    static BoundarySlope finite(double v) { return BoundarySlope(Kind::Finite, v); }
    static BoundarySlope pos_inf() { return BoundarySlope(Kind::PosInf, 0.0); }
    static BoundarySlope neg_inf() { return BoundarySlope(Kind::NegInf, 0.0); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }

    /// Finite value; throws for the infinite variants.
    double value() const {
        if (!is_finite()) throw DomainError("BoundarySlope: infinite slope has no finite value");
        return value_;
    }

    /// Sign of the slope (+1, -1, or 0), defined for all variants.
    int sign() const {
        if (kind_ == Kind::PosInf) return 1;
        if (kind_ == Kind::NegInf) return -1;
        return value_ > 0 ? 1 : (value_ < 0 ? -1 : 0);
    }

    std::string str() const;

private:
    BoundarySlope(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

// ---------------------------------------------------------------------------
// Flow parameters
// ---------------------------------------------------------------------------

/// The problem instance (dim, alpha, b, k) plus power semantics.
struct FlowParams {
    int dim = 2;                            // space dimension N >= 2
    double alpha = 1.0;                     // curvature power, > 0
    std::optional<OddRational> alpha_odd;   // present iff alpha = q/p, q,p odd
    double b = 0.0;                         // driving force
    BoundarySlope k = BoundarySlope::finite(1.0);

    PowerSpec power_spec() const { return PowerSpec{alpha, alpha_odd.has_value()}; }

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

FlowParams make_params(int dim, double alpha, double b,
                       BoundarySlope k = BoundarySlope::finite(1.0),
                       std::optional<OddRational> alpha_odd = std::nullopt);

// ---------------------------------------------------------------------------
// Regimes
// ---------------------------------------------------------------------------

enum class RegimeTag {
    BZero,     // b = 0, c > 0
    BNeg,      // b < 0
    CGtBPos,   // c > b > 0
    CEqB,      // c = b > 0 (flat profile), also covers c = b = 0
    BGtCPos,   // b > c > 0, needs odd-rational alpha
};

std::string to_string(RegimeTag tag);

/// Inequalities defining the tag, for reports.
std::string describe(RegimeTag tag);

/// True for the gradient-blow-up regimes (finite maximal radius).
bool finite_radius(RegimeTag tag);

/// Tolerance used to collapse c ~ b onto the flat regime.
inline double regime_eq_tolerance(double b) {
    return 1e-12 * std::max(1.0, std::abs(b));
}

/// The unique regime of (params, c). Throws RegimeError when the negative
/// curvature regime is selected without odd-rational alpha.
RegimeTag classify_regime(const FlowParams& params, double c);

// ---------------------------------------------------------------------------
// Radial mean curvature
// ---------------------------------------------------------------------------

/// H = u_rr/(1+u_r^2)^{3/2} + (N-1) u_r / (r sqrt(1+u_r^2)); the quotient is
/// removable at r=0 where H = N u_rr (requires u_r = 0 there).
double curvature_radial(double r, double ur, double urr, int dim);

} // namespace gmcf
