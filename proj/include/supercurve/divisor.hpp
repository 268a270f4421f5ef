#pragma once

// Cartier divisors on a supercurve: degree, associated line bundle, triviality, the Abel map
// and effective representatives.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "supercurve/curve.hpp"

namespace supercurve {

/// Local equations f_P (even meromorphic units) at finitely many finite points.
struct CartierDivisor {
    std::map<PointP1, SRF> equations;

    /// mult * [a] with local equation (z - a)^mult.
    static CartierDivisor point(const ContextPtr& ctx, const Scalar& a, int mult) {
        return {{{PointP1(a), SRF(ctx, RationalFunction::power_at(a, mult))}}};
    }

    std::vector<PointP1> support() const {
        std::vector<PointP1> out;
        for (const auto& [p, f] : equations) out.push_back(p);
        return out;
    }

    friend CartierDivisor operator+(const CartierDivisor& a, const CartierDivisor& b) {
        CartierDivisor out = a;
        for (const auto& [p, f] : b.equations) {
            auto it = out.equations.find(p);
            if (it == out.equations.end()) out.equations.emplace(p, f);
            else it->second = it->second * f;
        }
        return out;
    }
    CartierDivisor operator-() const {
        CartierDivisor out;
        for (const auto& [p, f] : equations) out.equations.emplace(p, f.invert_unit());
        return out;
    }
    friend CartierDivisor operator-(const CartierDivisor& a, const CartierDivisor& b) { return a + (-b); }
};

/// Local equations must be even units at finite points away from the chart support.
inline void validate_divisor(const SuperCurve& x, const CartierDivisor& d) {
    for (const auto& [p, f] : d.equations) {
        if (p.is_infinity()) throw AlgebraError("divisor: point at infinity is not supported");
        if (x.has_chart(p)) throw AlgebraError("divisor: point " + p.str() + " carries a chart");
        if (!is_meromorphic_unit(f)) throw AlgebraError("divisor: local equation at " + p.str() + " is not an even unit");
    }
}

/// Sum of orders of the reduced local equations.
inline int reduced_degree(const CartierDivisor& d) {
    int n = 0;
    for (const auto& [p, f] : d.equations) n += order_at(f, p);
    return n;
}

/// Degree as sum_P res_P dlog(f_P); the value must be an integer in C.
inline int degree(const CartierDivisor& d) {
    if (d.equations.empty()) return 0;
    const ContextPtr& ctx = d.equations.begin()->second.context();
    SuperElement total(ctx);
    for (const auto& [p, f] : d.equations) total += residue_dz(dlog(f), p);
    for (int k = 1; k < total.size(); ++k)
        if (!total[k].is_zero()) throw AlgebraError("degree: residue sum has a nilpotent or odd part");
    const Scalar& s = total[0];
    if (!s.is_real() || s.re().get_den() != 1) throw AlgebraError("degree: residue sum " + s.str() + " is not an integer");
    return static_cast<int>(s.re().get_num().get_si());
}

/// O(D): sections g with f_P g regular at P.
inline BundleData line_bundle_of(const SuperCurve& x, const CartierDivisor& d) {
    validate_divisor(x, d);
    std::map<PointP1, SRF> xi;
    for (const auto& [p, f] : d.equations) xi.emplace(p, f.invert_unit());
    return BundleData(x, std::move(xi));
}

/// Reduced degree of O(xi): minus the orders of the reduced multipliers.
inline int reduced_degree(const BundleData& l) {
    int n = 0;
    for (const auto& [p, xi] : l.multipliers()) n -= order_at(xi, p);
    return n;
}

namespace detail {

/// An even global section with nonzero reduced part, if any.
inline std::optional<SRF> unit_section(const BundleData& l, const TruncationBounds& b) {
    SectionSpace s = h0(l, b);
    for (std::size_t i = 0; i < s.basis.size(); ++i)
        if (s.module.parity[i] == 0 && !s.basis[i].reduced().is_zero()) return s.basis[i];
    return std::nullopt;
}

}  // namespace detail

struct TrivialityResult {
    bool trivial = false;
    std::optional<SRF> witness;  // g with T_P(g) a unit at every point
};

/// O(xi) is trivial iff some even section has nonzero reduced part and reduced degree 0.
inline TrivialityResult is_trivial(const BundleData& l, const TruncationBounds& b = {}) {
    if (reduced_degree(l) != 0) return {};
    auto g = detail::unit_section(l, b);
    if (!g) return {};
    for (const auto& p : l.support()) {
        SRF u = l.transform(p).apply(*g);
        if (!is_regular_at(u, p) || u.reduced().order_at(p) != 0) throw AlgebraError("is_trivial: witness fails at " + p.str());
    }
    return {true, g};
}

inline TrivialityResult is_trivial(const SuperCurve& x, const CartierDivisor& d, const TruncationBounds& b = {}) {
    return is_trivial(line_bundle_of(x, d), b);
}

struct EffectivityResult {
    bool effective = false;
    std::optional<SRF> witness;  // a non-nilpotent global section
};

inline EffectivityResult has_effective_representative(const BundleData& l, const TruncationBounds& b = {}) {
    if (reduced_degree(l) < 0) return {};
    auto g = detail::unit_section(l, b);
    if (!g) return {};
    return {true, g};
}

inline EffectivityResult has_effective_representative(const SuperCurve& x, const CartierDivisor& d, const TruncationBounds& b = {}) {
    return has_effective_representative(line_bundle_of(x, d), b);
}

/// Values of the Abel map on a scalar basis of H^0(Ber).
struct AbelResult {
    std::vector<SRF> basis;
    std::vector<LogElement> values;
    bool is_zero() const {
        return std::all_of(values.begin(), values.end(), [](const LogElement& v) { return v.is_zero(); });
    }
};

inline std::vector<Scalar> finite_values(const std::vector<PointP1>& pts) {
    std::vector<Scalar> out;
    for (const auto& p : pts)
        if (!p.is_infinity()) out.push_back(p.value());
    return out;
}

/// sum_P res_P L(log f_P) with L a lift of omega vanishing on constants.
inline LogElement abel_value(const SRF& h, const CartierDivisor& d, const std::vector<Scalar>& marked,
                             const std::vector<Scalar>& pole_points) {
    DifferentialOperator l = lift_to_Dsharp(BerSection{h}, marked, pole_points);
    LogElement total(h.ctx().base.dim());
    for (const auto& [p, f] : d.equations) total += apply_to_log(l, f).residue(p);
    return total;
}

/// Marked points: the support of D plus `extra_marked`, all away from the chart support.
inline AbelResult abel(const SuperCurve& x, const CartierDivisor& d, const TruncationBounds& b = {},
                       const std::vector<PointP1>& extra_marked = {}) {
    validate_divisor(x, d);
    if (degree(d) != 0) throw AlgebraError("abel: divisor has nonzero degree");
    std::set<PointP1> u;
    for (const auto& p : d.support()) u.insert(p);
    for (const auto& p : extra_marked) {
        if (p.is_infinity() || x.has_chart(p)) throw AlgebraError("abel: marked point " + p.str() + " is not admissible");
        u.insert(p);
    }
    AbelResult r;
    r.basis = h0_ber(BundleData(x), b).basis;
    std::vector<Scalar> poles = finite_values(x.support());
    std::vector<Scalar> marked = finite_values({u.begin(), u.end()});
    for (const auto& h : r.basis) r.values.push_back(abel_value(h, d, marked, poles));
    return r;
}

}  // namespace supercurve
