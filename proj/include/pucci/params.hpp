#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "pucci/error.hpp"

namespace pucci {

/// Which extremal operator: M+ weights positive eigenvalues by Lambda, M- by lambda.
enum class Operator { Plus, Minus };

inline std::string_view to_string(Operator op) { return op == Operator::Plus ? "plus" : "minus"; }

inline Operator parse_operator(std::string_view s) {
    if (s == "plus" || s == "+") return Operator::Plus;
    if (s == "minus" || s == "-") return Operator::Minus;
    throw InvalidParams("unknown operator '" + std::string(s) + "' (expected plus|minus)");
}

/// Relative tolerance under which lambda and Lambda are treated as equal (Laplacian case).
inline constexpr double kEqualEllipticityTol = 1e-12;

/// Problem data for -M±(D²u) = u^p with ellipticity constants 0 < lambda <= Lambda.
struct Params {
    double lambda = 1.0;
    double Lambda = 1.0;
    int dim = 3;
    Operator op = Operator::Plus;

    bool laplacian() const { return std::abs(Lambda - lambda) <= kEqualEllipticityTol * Lambda; }

    /// Coefficient in front of the Hessian where u is concave (all eigenvalues negative).
    double inner_coef() const { return op == Operator::Plus ? lambda : Lambda; }
    /// Coefficient in front of u'' where u is convex and decreasing (the Ñ-dimensional regime).
    double outer_coef() const { return op == Operator::Plus ? Lambda : lambda; }

    Params with_op(Operator o) const {
        Params q = *this;
        q.op = o;
        return q;
    }
};

/// (λ/Λ)(N−1)+1 for M+, (Λ/λ)(N−1)+1 for M−; no validation.
inline double dimension_like_unchecked(const Params& prm) {
    const double ratio = prm.op == Operator::Plus ? prm.lambda / prm.Lambda : prm.Lambda / prm.lambda;
    return ratio * (prm.dim - 1) + 1.0;
}

inline void validate(const Params& prm) {
    if (!(prm.lambda > 0.0) || !std::isfinite(prm.lambda))
        throw InvalidParams("lambda must be a positive finite number");
    if (!(prm.Lambda >= prm.lambda) || !std::isfinite(prm.Lambda))
        throw InvalidParams("Lambda must be finite and >= lambda");
    if (prm.dim < 3) throw InvalidParams("dim must be an integer >= 3");
    const double nt = dimension_like_unchecked(prm);
    if (!(nt > 2.0))
        throw InvalidParams("dimension-like number " + std::to_string(nt) + " <= 2 for operator " +
                            std::string(to_string(prm.op)));
}

/// Dimension-like number Ñ governing the convex (outer) regime of radial solutions.
inline double dimension_like(const Params& prm) {
    validate(prm);
    return dimension_like_unchecked(prm);
}

/// Open interval known to contain the critical exponent, or the exact value when λ = Λ.
struct ExponentBracket {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> exact;  // set iff λ = Λ

    bool is_exact() const { return exact.has_value(); }
};

inline double sobolev_exponent(int dim) { return (dim + 2.0) / (dim - 2.0); }

inline ExponentBracket exponent_bracket(const Params& prm) {
    const double nt = dimension_like(prm);
    const double n = prm.dim;
    ExponentBracket b;
    if (prm.laplacian()) {
        b.exact = sobolev_exponent(prm.dim);
        b.lo = b.hi = *b.exact;
        return b;
    }
    if (prm.op == Operator::Plus) {
        b.lo = std::max(nt / (nt - 2.0), (n + 2.0) / (n - 2.0));
        b.hi = (nt + 2.0) / (nt - 2.0);
    } else {
        b.lo = (nt + 2.0) / (nt - 2.0);
        b.hi = (n + 2.0) / (n - 2.0);
    }
    return b;
}

/// Shrinks an open bracket inward by a relative margin so neither endpoint is ever shot.
inline std::pair<double, double> shrink_inward(double lo, double hi, double rel_margin = 1e-9) {
    const double w = (hi - lo) * rel_margin;
    return {lo + w, hi - w};
}

/// Exponent-dependent constants of the Emden–Fowler transform and the weighted energy.
struct ExponentConstants {
    double p = 0.0;
    double lambda1 = 0.0;  // decay rate of the fast mode, negative above Ñ/(Ñ−2)
    double lambda2 = 0.0;  // 2/(p−1)
    double gamma = 0.0;    // weight exponent 2(p+1)/(p−1) − N
};

inline ExponentConstants exponent_constants(const Params& prm, double p) {
    if (!(p > 1.0)) throw InvalidParams("exponent p must exceed 1");
    const double nt = dimension_like(prm);
    ExponentConstants c;
    c.p = p;
    c.lambda1 = -(p * (nt - 2.0) - nt) / (p - 1.0);
    c.lambda2 = 2.0 / (p - 1.0);
    c.gamma = 2.0 * (p + 1.0) / (p - 1.0) - prm.dim;
    return c;
}

}  // namespace pucci
