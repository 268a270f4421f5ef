#pragma once

// Meromorphic functions on the trivial family: expansions, orders, logarithmic derivatives.

#include <string>
#include <utility>
#include <vector>

#include "supercurve/superalgebra.hpp"

namespace supercurve {

using SuperLaurent = SuperElem<LaurentSeries>;

/// Componentwise Laurent expansion at a point, in t = z - P or t = 1/z at infinity.
struct LaurentExpansion {
    PointP1 point;
    SuperLaurent value;

    /// Coefficient of t^n as an element of Lambda.
    SuperElement coeff(int n) const {
        SuperElement r(value.context());
        for (int k = 0; k < value.size(); ++k)
            if (!value[k].is_zero()) r[k] = value[k].coeff(n);
        return r;
    }
    /// Smallest exponent with a nonzero coefficient in some component.
    int valuation() const {
        int v = LaurentSeries::kExact;
        for (int k = 0; k < value.size(); ++k) v = std::min(v, value[k].valuation());
        return v;
    }
    int precision() const {
        int p = LaurentSeries::kExact;
        for (int k = 0; k < value.size(); ++k) p = std::min(p, value[k].prec);
        return p;
    }
};

/// Expansion with all exponents up to and including `order`.
inline LaurentExpansion laurent_expand(const SuperRationalFunction& f, const PointP1& p, int order) {
    return {p, f.map([&](const RationalFunction& r) { return r.laurent(p, order + 1); })};
}

/// Residue of the one-form f dz at P, componentwise (infinity via w = 1/z).
inline SuperElement residue_dz(const SuperRationalFunction& f, const PointP1& p) {
    return f.map([&](const RationalFunction& r) { return r.residue(p); });
}

inline bool is_meromorphic_unit(const SuperRationalFunction& f) {
    return f.parity() == 0 && !f.reduced().is_zero();
}

inline void require_unit(const SuperRationalFunction& f, const char* op) {
    if (f.parity() != 0) throw AlgebraError(std::string(op) + ": function is not even");
    if (f.reduced().is_zero()) throw AlgebraError(std::string(op) + ": function is nilpotent");
}

/// Order of the reduced component at P.
inline int order_at(const SuperRationalFunction& f, const PointP1& p) {
    require_unit(f, "order_at");
    return f.reduced().order_at(p);
}

/// f'/f.
inline SuperRationalFunction dlog(const SuperRationalFunction& f) {
    require_unit(f, "dlog");
    return z_derivative(f) * f.invert_unit();
}

/// Terminating exponential of a nilpotent even element.
template <typename C>
SuperElem<C> exp_nilpotent(const SuperElem<C>& x) {
    if (!x.reduced().is_zero()) throw AlgebraError("exp_nilpotent: argument is not nilpotent");
    SuperElem<C> result(x.context(), C(Scalar(1)));
    SuperElem<C> term = result;
    for (long k = 1; k < 64; ++k) {
        term = (term * x).scaled(C(Scalar::frac(1, k)));
        if (term.is_zero()) return result;
        result += term;
    }
    throw AlgebraError("exp_nilpotent: series did not terminate");
}

/// Terminating logarithm log(1 + nu) of a nilpotent nu.
template <typename C>
SuperElem<C> log_one_plus(const SuperElem<C>& nu) {
    if (!nu.reduced().is_zero()) throw AlgebraError("log_one_plus: argument is not nilpotent");
    SuperElem<C> result(nu.context());
    SuperElem<C> power(nu.context(), C(Scalar(1)));
    for (long k = 1; k < 64; ++k) {
        power = power * nu;
        if (power.is_zero()) return result;
        result += power.scaled(C(Scalar::frac(k % 2 ? 1 : -1, k)));
    }
    throw AlgebraError("log_one_plus: series did not terminate");
}

/// f = f_red * exp(lambda) with lambda nilpotent.
struct LogDecomposition {
    RationalFunction reduced_part;
    SuperRationalFunction nilpotent_log;
};

inline LogDecomposition log_decompose(const SuperRationalFunction& f) {
    require_unit(f, "log_decompose");
    RationalFunction red = f.reduced();
    SuperRationalFunction nu = f.scaled(RationalFunction(Scalar(1)) / red);
    nu[0] = RationalFunction();
    return {red, log_one_plus(nu)};
}

/// Constant Lambda element times the rational function r.
inline SuperRationalFunction times_function(const SuperElement& a, const RationalFunction& r) {
    return a.map([&](const Scalar& s) { return r.scaled(s); });
}

inline SuperRationalFunction srf_constant(const ContextPtr& ctx, const Scalar& s) {
    return SuperRationalFunction(ctx, RationalFunction(s));
}

inline SuperRationalFunction srf_z(const ContextPtr& ctx) { return SuperRationalFunction(ctx, RationalFunction::z()); }

}  // namespace supercurve
