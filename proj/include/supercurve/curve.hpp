#pragma once

// Supercurves over P^1 given by chart automorphisms at finitely many points, rank-one twists,
// truncated repartition cohomology and the residue pairing.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "supercurve/berezin.hpp"

namespace supercurve {

using SRF = SuperRationalFunction;

/// X = (P^1, O) where near P a function f is a section iff chart_P(f) is regular at P.
class SuperCurve {
public:
    SuperCurve() = default;
    explicit SuperCurve(ContextPtr ctx) : ctx_(std::move(ctx)) {}
    SuperCurve(ContextPtr ctx, std::map<PointP1, LocalAutomorphism> charts) : ctx_(std::move(ctx)), charts_(std::move(charts)) {
        for (const auto& [p, a] : charts_)
            if (a.context()->components() != ctx_->components() || a.context()->q != ctx_->q)
                throw AlgebraError("SuperCurve: chart at " + p.str() + " uses a different algebra");
    }

    const ContextPtr& context() const { return ctx_; }
    const BaseAlgebra& base() const { return ctx_->base; }
    int q() const { return ctx_->q; }
    const std::map<PointP1, LocalAutomorphism>& charts() const { return charts_; }

    LocalAutomorphism chart(const PointP1& p) const {
        auto it = charts_.find(p);
        return it == charts_.end() ? LocalAutomorphism::identity(ctx_) : it->second;
    }
    bool has_chart(const PointP1& p) const { return charts_.count(p) && !charts_.at(p).is_identity(); }
    std::vector<PointP1> support() const {
        std::vector<PointP1> out;
        for (const auto& [p, a] : charts_)
            if (!a.is_identity()) out.push_back(p);
        return out;
    }

private:
    ContextPtr ctx_;
    std::map<PointP1, LocalAutomorphism> charts_;
};

/// The twist O(xi): near P, f is a section iff xi_P^{-1} chart_P(f) is regular at P.
class BundleData {
public:
    BundleData() = default;
    explicit BundleData(SuperCurve c) : curve_(std::move(c)) {}
    BundleData(SuperCurve c, std::map<PointP1, SRF> xi) : curve_(std::move(c)), xi_(std::move(xi)) {
        for (const auto& [p, f] : xi_)
            if (!is_meromorphic_unit(f)) throw AlgebraError("BundleData: multiplier at " + p.str() + " is not an even unit");
    }

    const SuperCurve& curve() const { return curve_; }
    const ContextPtr& context() const { return curve_.context(); }
    const std::map<PointP1, SRF>& multipliers() const { return xi_; }
    SRF multiplier(const PointP1& p) const {
        auto it = xi_.find(p);
        return it == xi_.end() ? SRF(context(), RationalFunction(Scalar(1))) : it->second;
    }

    /// Points where the chart or the multiplier is nontrivial.
    std::vector<PointP1> support() const {
        std::set<PointP1> s;
        for (const auto& p : curve_.support()) s.insert(p);
        for (const auto& [p, f] : xi_)
            if (!(f == SRF(context(), RationalFunction(Scalar(1))))) s.insert(p);
        return {s.begin(), s.end()};
    }

    /// T_P(f) = xi_P^{-1} chart_P(f).
    LocalOperator transform(const PointP1& p) const { return LocalOperator(multiplier(p).invert_unit(), curve_.chart(p)); }
    /// T_P^{-1}(g) = chart_P^{-1}(xi_P g).
    LocalOperator inverse_transform(const PointP1& p) const {
        LocalAutomorphism inv = curve_.chart(p).inverse();
        return LocalOperator(inv.apply(multiplier(p)), inv);
    }

private:
    SuperCurve curve_;
    std::map<PointP1, SRF> xi_;
};

inline bool is_regular_at(const SRF& f, const PointP1& p) {
    for (int k = 0; k < f.size(); ++k)
        if (!f[k].is_zero() && f[k].order_at(p) < 0) return false;
    return true;
}

/// Smallest order of a component at P (kExact for zero).
inline int valuation_at(const SRF& f, const PointP1& p) {
    int v = LaurentSeries::kExact;
    for (int k = 0; k < f.size(); ++k)
        if (!f[k].is_zero()) v = std::min(v, f[k].order_at(p));
    return v;
}

inline bool stalk_member(const SRF& f, const PointP1& p, const BundleData& l) { return is_regular_at(l.transform(p).apply(f), p); }

struct TruncationBounds {
    int pole_order = 0;                 // 0 selects the automatic bound
    std::vector<PointP1> extra_points;  // added to the working point set
    int scale = 1;                      // multiplies the pole order
};

/// A space of global functions with its B-module structure.
struct SectionSpace {
    BModuleRep module;
    std::vector<SRF> basis;  // one function per scalar basis vector
    int pole_order = 0;
    std::vector<PointP1> points;
};

/// A class in H^1 represented by a single-point repartition.
struct RepartitionRep {
    PointP1 point;
    int exponent = 0;
    int component = 0;
    SRF value;
};

struct H1Space {
    BModuleRep module;
    std::vector<RepartitionRep> reps;
    int pole_order = 0;
    std::vector<PointP1> points;
};

namespace detail {

/// Candidate scalar function (z - Q)^{-k} or z^k.
struct Candidate {
    std::optional<Scalar> pole;
    int k = 0;

    RationalFunction value() const {
        return pole ? RationalFunction::power_at(*pole, -k) : RationalFunction::power_at(Scalar(0), k);
    }
    auto key() const { return std::make_tuple(pole.has_value(), pole.value_or(Scalar(0)), k); }
    friend bool operator<(const Candidate& a, const Candidate& b) { return a.key() < b.key(); }
    friend bool operator==(const Candidate& a, const Candidate& b) { return a.key() == b.key(); }
};

/// Deterministic fresh points avoiding a given set.
inline std::vector<PointP1> fresh_points(const std::vector<PointP1>& avoid, int count) {
    std::vector<PointP1> out;
    for (long n = 7; static_cast<int>(out.size()) < count; n += 4) {
        PointP1 p(Scalar(Rational(n, 3), Rational(1, n)));
        if (std::find(avoid.begin(), avoid.end(), p) == avoid.end()) out.push_back(p);
    }
    return out;
}

/// Exponent of the residue coefficient and its sign: t^{-1} at finite points, -w^{1} at infinity.
inline std::pair<int, int> residue_slot(const PointP1& p) { return p.is_infinity() ? std::make_pair(1, -1) : std::make_pair(-1, 1); }

/// Coefficients of left multiplication by the basis element a of B on component indices.
inline std::vector<std::pair<int, Scalar>> left_mult(const SuperContext& cx, int a, int comp) {
    std::vector<std::pair<int, Scalar>> out;
    const int b = cx.b_of(comp);
    const unsigned s = cx.mask_of(comp);
    for (const auto& t : cx.base.product(a, b)) out.emplace_back(cx.index(t.index, s), t.coeff);
    return out;
}

/// Working data shared by the cohomology computations.
class Workspace {
public:
    Workspace(const BundleData& l, std::vector<PointP1> points) : l_(l), ctx_(l.context()), points_(std::move(points)) {
        for (const auto& p : points_) {
            t_.push_back(l.transform(p));
            tinv_.push_back(l.inverse_transform(p));
        }
    }

    const std::vector<PointP1>& points() const { return points_; }
    const LocalOperator& t(std::size_t i) const { return t_[i]; }
    const LocalOperator& tinv(std::size_t i) const { return tinv_[i]; }
    const ContextPtr& ctx() const { return ctx_; }
    const BundleData& bundle() const { return l_; }

    /// max_j (j - val(E_j)) over b = 1 masks: how much the operator can worsen a pole.
    static int slack(const LocalOperator& op, const PointP1& p) {
        const auto& cx = *op.context();
        int m = 0;
        for (unsigned s = 0; s < (1u << cx.q); ++s) {
            const auto& e = op.terms(cx.index(0, s));
            for (std::size_t j = 0; j < e.size(); ++j) {
                int v = valuation_at(e[j], p);
                if (v < LaurentSeries::kExact) m = std::max(m, static_cast<int>(j) - v);
            }
        }
        return m;
    }
    int slack(std::size_t i) const { return std::max(slack(t_[i], points_[i]), slack(tinv_[i], points_[i])); }
    int max_slack() const {
        int m = 0;
        for (std::size_t i = 0; i < points_.size(); ++i) m = std::max(m, slack(i));
        return m;
    }

    std::vector<Candidate> candidates(int n) const {
        std::vector<Candidate> out;
        for (int k = 0; k <= n; ++k) out.push_back({std::nullopt, k});
        for (const auto& p : points_)
            if (!p.is_infinity())
                for (int k = 1; k <= n; ++k) out.push_back({p.value(), k});
        return out;
    }

    /// Principal part of T_P(theta_S u) at each point: entries ((point, exponent, component), value).
    using PPEntry = std::pair<std::tuple<int, int, int>, Scalar>;
    std::vector<PPEntry> principal_image(const Candidate& c, unsigned mask, int max_pole) const {
        std::vector<PPEntry> out;
        RationalFunction u = c.value();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const PointP1& p = points_[i];
            const auto& e = expansions_T(i, mask, max_pole);
            std::map<std::pair<int, int>, Scalar> acc;
            RationalFunction uj = u;
            for (std::size_t j = 0; j < e.size(); ++j) {
                if (j > 0) uj = uj.derivative();
                if (uj.is_zero()) break;
                int a = e[j].second;
                if (a >= LaurentSeries::kExact) continue;
                int vu = uj.order_at(p);
                if (a + vu >= 0) continue;
                LaurentSeries us = uj.laurent(p, 1 - a);
                const SuperLaurent& ej = e[j].first;
                for (int k = 0; k < ej.size(); ++k) {
                    if (ej[k].is_zero()) continue;
                    LaurentSeries prod = ej[k] * us;
                    if (prod.prec < 0) throw AlgebraError("principal_image: insufficient expansion precision");
                    for (int n = prod.start; n < std::min(prod.end(), 0); ++n) {
                        const Scalar& x = prod.c[static_cast<std::size_t>(n - prod.start)];
                        if (!x.is_zero()) acc[{n, k}] += x;
                    }
                }
            }
            for (const auto& [nk, x] : acc)
                if (!x.is_zero()) out.push_back({{static_cast<int>(i), nk.first, nk.second}, x});
        }
        return out;
    }

    /// Residues res_P ber(theta_S u * T_P^{-1}(theta_S' t^k)) for all P, S', k <= kmax(P):
    /// entries ((point, S', k, B-component), value).
    using BerEntry = std::pair<std::tuple<int, int, int, int>, Scalar>;
    std::vector<BerEntry> ber_image(const Candidate& c, unsigned mask, int max_pole) const {
        std::vector<BerEntry> out;
        const auto& cx = *ctx_;
        RationalFunction u = c.value();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const PointP1& p = points_[i];
            auto [r, sgn] = residue_slot(p);
            const auto& tests = ber_tests(i, mask, max_pole);
            int vu = u.order_at(p);
            int need = r - tests.min_valuation + 1;
            LaurentSeries us = u.laurent(p, need);
            for (const auto& tcase : tests.cases) {
                for (int b = 0; b < cx.base.dim(); ++b) {
                    const LaurentSeries& y = tcase.y[static_cast<std::size_t>(b)];
                    if (y.known_zero()) continue;
                    if (vu + y.valuation() > r) continue;
                    Scalar acc(0);
                    for (int n = us.start; n < us.end(); ++n) {
                        const Scalar& un = us.c[static_cast<std::size_t>(n - us.start)];
                        if (un.is_zero()) continue;
                        int m = r - n;
                        if (m < y.start) break;
                        acc += un * y.coeff(m);
                    }
                    if (!acc.is_zero()) out.push_back({{static_cast<int>(i), static_cast<int>(tcase.test_mask), tcase.k, b}, sgn < 0 ? -acc : acc});
                }
            }
        }
        return out;
    }

    int ber_test_order(std::size_t i, int max_pole) const {
        const auto& tests = ber_tests(i, 0, max_pole);
        return tests.kmax;
    }

private:
    using ExpansionList = std::vector<std::pair<SuperLaurent, int>>;  // (expansion, valuation)

    const ExpansionList& expansions_T(std::size_t i, unsigned mask, int max_pole) const {
        auto key = std::make_tuple(i, mask, max_pole);
        auto it = t_cache_.find(key);
        if (it != t_cache_.end()) return it->second;
        const auto& e = t_[i].terms(ctx_->index(0, mask));
        ExpansionList out;
        for (std::size_t j = 0; j < e.size(); ++j) {
            int prec = max_pole + static_cast<int>(j) + 2;
            LaurentExpansion x = laurent_expand(e[j], points_[i], prec - 1);
            out.emplace_back(x.value, x.valuation());
        }
        return t_cache_.emplace(key, std::move(out)).first->second;
    }

    struct BerTestCase {
        unsigned test_mask;
        int k;
        std::vector<LaurentSeries> y;  // per B basis element: theta-free series
    };
    struct BerTests {
        std::vector<BerTestCase> cases;
        int min_valuation = 0;
        int kmax = 0;
    };

    const BerTests& ber_tests(std::size_t i, unsigned mask, int max_pole) const {
        auto key = std::make_tuple(i, mask, max_pole);
        auto it = ber_cache_.find(key);
        if (it != ber_cache_.end()) return it->second;
        const auto& cx = *ctx_;
        const PointP1& p = points_[i];
        auto [r, sgn] = residue_slot(p);
        const int prec_y = r + max_pole + 2;
        SRF theta_s = SRF::basis(ctx_, 0, mask);
        BerTests out;
        // Y[S'][j] = ber(theta_S E^-_{S',j}) expanded at P
        std::vector<std::vector<std::pair<std::vector<LaurentSeries>, int>>> ys(1u << cx.q);
        int minval = 0;
        int jmax = 0;
        for (unsigned sp = 0; sp < (1u << cx.q); ++sp) {
            const auto& e = tinv_[i].terms(cx.index(0, sp));
            jmax = std::max(jmax, static_cast<int>(e.size()));
            for (const auto& ej : e) {
                SRF y = (theta_s * ej).berezin_top();
                std::vector<LaurentSeries> comps;
                int v = LaurentSeries::kExact;
                for (int b = 0; b < cx.base.dim(); ++b) {
                    const RationalFunction& rb = y.at(b, 0);
                    comps.push_back(rb.is_zero() ? LaurentSeries() : rb.laurent(p, prec_y));
                    if (!rb.is_zero()) v = std::min(v, rb.order_at(p));
                }
                if (v < LaurentSeries::kExact) minval = std::min(minval, v);
                ys[sp].emplace_back(std::move(comps), v);
            }
        }
        out.min_valuation = minval;
        out.kmax = max_pole + 2 + jmax - minval;
        for (unsigned sp = 0; sp < (1u << cx.q); ++sp)
            for (int k = 0; k <= out.kmax; ++k) {
                BerTestCase tc{sp, k, std::vector<LaurentSeries>(static_cast<std::size_t>(cx.base.dim()))};
                for (std::size_t j = 0; j < ys[sp].size(); ++j) {
                    // d^j/dz^j of t^k as c * t^s
                    Scalar coef(1);
                    int shift = 0;
                    bool zero = false;
                    if (p.is_infinity()) {
                        for (int m = 0; m < static_cast<int>(j); ++m) coef *= Scalar(-k - m);
                        shift = k + static_cast<int>(j);
                    } else {
                        if (static_cast<int>(j) > k) zero = true;
                        for (int m = 0; m < static_cast<int>(j); ++m) coef *= Scalar(k - m);
                        shift = k - static_cast<int>(j);
                    }
                    if (zero || coef.is_zero()) continue;
                    for (int b = 0; b < cx.base.dim(); ++b) {
                        const LaurentSeries& yb = ys[sp][j].first[static_cast<std::size_t>(b)];
                        if (yb.is_zero()) continue;
                        LaurentSeries shifted = yb.scaled(coef);
                        shifted.start += shift;
                        shifted.prec += shift;
                        tc.y[static_cast<std::size_t>(b)] += shifted;
                    }
                }
                out.cases.push_back(std::move(tc));
            }
        return ber_cache_.emplace(key, std::move(out)).first->second;
    }

    BundleData l_;
    ContextPtr ctx_;
    std::vector<PointP1> points_;
    std::vector<LocalOperator> t_, tinv_;
    mutable std::map<std::tuple<std::size_t, unsigned, int>, ExpansionList> t_cache_;
    mutable std::map<std::tuple<std::size_t, unsigned, int>, BerTests> ber_cache_;
};

/// Columns indexed by (candidate, b, S).
struct ColumnSpace {
    std::vector<Candidate> cands;
    int nb = 1;
    int nm = 1;
    int size() const { return static_cast<int>(cands.size()) * nb * nm; }
    int index(int ci, int b, unsigned s) const { return (ci * nb + b) * nm + static_cast<int>(s); }
    int cand_of(int col) const { return col / (nb * nm); }
    int b_of(int col) const { return (col / nm) % nb; }
    unsigned mask_of(int col) const { return static_cast<unsigned>(col % nm); }

    SRF function(const ContextPtr& ctx, const SparseVec& v) const {
        SRF f(ctx);
        for (const auto& [col, x] : v) {
            const int k = ctx->index(b_of(col), mask_of(col));
            f[k] = f[k] + cands[static_cast<std::size_t>(cand_of(col))].value().scaled(x);
        }
        return f;
    }
    std::vector<int> parities(const SuperContext& cx, int shift) const {
        std::vector<int> p(static_cast<std::size_t>(size()));
        for (int c = 0; c < size(); ++c) p[static_cast<std::size_t>(c)] = (cx.base.parity(b_of(c)) + std::popcount(mask_of(c)) + shift) % 2;
        return p;
    }
    AmbientAction action(const SuperContext& cx) const {
        return [this, &cx](int a, int col) {
            SparseVec out;
            std::map<int, Scalar> m;
            for (const auto& t : cx.base.product(a, b_of(col))) m[index(cand_of(col), t.index, mask_of(col))] += t.coeff;
            return sparse_from_map(m);
        };
    }
};

/// Left multiplication by basis element b (with an optional sign) applied to component-keyed data.
template <typename Key, typename CompOf, typename WithComp>
std::vector<std::pair<Key, Scalar>> multiply_entries(const SuperContext& cx, int b, const std::vector<std::pair<Key, Scalar>>& in,
                                                     CompOf comp_of, WithComp with_comp, bool base_only) {
    std::vector<std::pair<Key, Scalar>> out;
    for (const auto& [key, x] : in) {
        int comp = comp_of(key);
        if (base_only) {
            for (const auto& t : cx.base.product(b, comp)) out.emplace_back(with_comp(key, t.index), t.coeff * x);
        } else {
            for (const auto& [c2, y] : left_mult(cx, b, comp)) out.emplace_back(with_comp(key, c2), y * x);
        }
    }
    return out;
}

template <typename Key>
SparseVec to_sparse(const std::vector<std::pair<Key, Scalar>>& entries, const std::map<Key, int>& index) {
    std::map<int, Scalar> m;
    for (const auto& [k, x] : entries) m[index.at(k)] += x;
    return sparse_from_map(m);
}

struct KernelResult {
    ColumnSpace cols;
    std::vector<SparseVec> kernel;
    SectionSpace space;
};

inline std::vector<PointP1> working_points(const BundleData& l, const TruncationBounds& b) {
    std::set<PointP1> s;
    for (const auto& p : l.support()) s.insert(p);
    for (const auto& p : b.extra_points) s.insert(p);
    s.insert(PointP1::infinity());
    return {s.begin(), s.end()};
}

inline int auto_pole_order(const Workspace& ws) { return std::max(3, ws.max_slack() + 2); }

/// Global functions with T_P(f) regular at every working point.
inline KernelResult h0_kernel(const Workspace& ws, int n) {
    const auto& cx = *ws.ctx();
    KernelResult res;
    res.cols = {ws.candidates(n), cx.base.dim(), 1 << cx.q};
    using Key = std::tuple<int, int, int>;
    std::vector<std::vector<std::pair<Key, Scalar>>> base_images;
    std::set<Key> keys;
    for (std::size_t ci = 0; ci < res.cols.cands.size(); ++ci)
        for (int s = 0; s < res.cols.nm; ++s) {
            auto img = ws.principal_image(res.cols.cands[ci], static_cast<unsigned>(s), n);
            base_images.push_back(img);
        }
    std::vector<std::vector<std::pair<Key, Scalar>>> full(static_cast<std::size_t>(res.cols.size()));
    for (std::size_t ci = 0; ci < res.cols.cands.size(); ++ci)
        for (int b = 0; b < res.cols.nb; ++b)
            for (int s = 0; s < res.cols.nm; ++s) {
                const auto& img = base_images[ci * static_cast<std::size_t>(res.cols.nm) + static_cast<std::size_t>(s)];
                auto e = multiply_entries<Key>(cx, b, img, [](const Key& k) { return std::get<2>(k); },
                                              [](const Key& k, int c) { return Key{std::get<0>(k), std::get<1>(k), c}; }, false);
                for (const auto& [k, x] : e) keys.insert(k);
                full[static_cast<std::size_t>(res.cols.index(static_cast<int>(ci), b, static_cast<unsigned>(s)))] = std::move(e);
            }
    std::map<Key, int> index;
    for (const auto& k : keys) index.emplace(k, static_cast<int>(index.size()));
    std::vector<SparseVec> images;
    for (const auto& e : full) images.push_back(to_sparse(e, index));
    res.kernel = kernel_of_columns(images);
    return res;
}

inline SectionSpace sections_from_kernel(const Workspace& ws, KernelResult& kr, int parity_shift, int n) {
    const auto& cx = *ws.ctx();
    SectionSpace sp;
    sp.module = submodule_rep(kr.kernel, kr.cols.parities(cx, parity_shift), kr.cols.action(cx), cx.base.dim());
    for (const auto& v : kr.kernel) sp.basis.push_back(kr.cols.function(ws.ctx(), v));
    sp.pole_order = n;
    sp.points = ws.points();
    return sp;
}

/// f with res_P ber(f g) = 0 for all g in the twisted stalks at every working point.
inline KernelResult ber_kernel(const Workspace& ws, int n,
                               const std::map<PointP1, SRF>* rhs_tails = nullptr, std::optional<SparseVec>* solution = nullptr) {
    const auto& cx = *ws.ctx();
    KernelResult res;
    res.cols = {ws.candidates(n), cx.base.dim(), 1 << cx.q};
    using Key = std::tuple<int, int, int, int>;
    std::vector<std::vector<std::pair<Key, Scalar>>> full(static_cast<std::size_t>(res.cols.size()));
    std::set<Key> keys;
    for (std::size_t ci = 0; ci < res.cols.cands.size(); ++ci)
        for (int s = 0; s < res.cols.nm; ++s) {
            auto img = ws.ber_image(res.cols.cands[ci], static_cast<unsigned>(s), n);
            for (int b = 0; b < res.cols.nb; ++b) {
                // ber(b X) = (-1)^{q|b|} b ber(X)
                auto e = multiply_entries<Key>(cx, b, img, [](const Key& k) { return std::get<3>(k); },
                                              [](const Key& k, int c) { return Key{std::get<0>(k), std::get<1>(k), std::get<2>(k), c}; }, true);
                if (cx.base.parity(b) && (cx.q % 2))
                    for (auto& [k, x] : e) x = -x;
                for (const auto& [k, x] : e) keys.insert(k);
                full[static_cast<std::size_t>(res.cols.index(static_cast<int>(ci), b, static_cast<unsigned>(s)))] = std::move(e);
            }
        }
    std::vector<std::pair<Key, Scalar>> rhs;
    if (rhs_tails) {
        // residues of the given tails against the same test functions (exact computation)
        for (std::size_t i = 0; i < ws.points().size(); ++i) {
            const PointP1& p = ws.points()[i];
            auto it = rhs_tails->find(p);
            if (it == rhs_tails->end()) continue;
            int kmax = ws.ber_test_order(i, n);
            for (unsigned sp = 0; sp < (1u << cx.q); ++sp)
                for (int k = 0; k <= kmax; ++k) {
                    RationalFunction tk = p.is_infinity() ? RationalFunction::power_at(Scalar(0), -k) : RationalFunction::power_at(p.value(), k);
                    SRF g = ws.tinv(i).apply(SRF::basis(ws.ctx(), 0, sp, tk));
                    SuperElement r = residue_dz((it->second * g).berezin_top(), p);
                    for (int b = 0; b < cx.base.dim(); ++b)
                        if (!r.at(b, 0).is_zero()) {
                            Key key{static_cast<int>(i), static_cast<int>(sp), k, b};
                            keys.insert(key);
                            rhs.emplace_back(key, r.at(b, 0));
                        }
                }
        }
    }
    std::map<Key, int> index;
    for (const auto& k : keys) index.emplace(k, static_cast<int>(index.size()));
    std::vector<SparseVec> images;
    for (const auto& e : full) images.push_back(to_sparse(e, index));
    res.kernel = kernel_of_columns(images);
    if (solution) {
        // solve sum x_c images_c = rhs
        Echelon e;
        for (std::size_t c = 0; c < images.size(); ++c) e.insert(images[c], SparseVec{{static_cast<int>(c), Scalar(1)}});
        SparseVec v = to_sparse(rhs, index), tag;
        e.reduce(v, &tag);
        if (v.empty()) *solution = sparse_scaled(tag, Scalar(-1));
        else solution->reset();
    }
    return res;
}

struct H1Result {
    H1Space space;
    Echelon image;                                  // echelon form of the image, low coordinates last
    std::map<std::tuple<int, int, int, int>, int> index;  // (group, point, exponent, component)
};

inline H1Result h1_compute(const Workspace& ws, int n1) {
    const auto& cx = *ws.ctx();
    const int n2 = n1 + ws.max_slack() + 2;
    ColumnSpace cols{ws.candidates(n2), cx.base.dim(), 1 << cx.q};
    using Key = std::tuple<int, int, int, int>;
    auto group_key = [&](int pt, int e, int comp) { return Key{-e > n1 ? 0 : 1, pt, e, comp}; };
    std::set<Key> keys;
    const int ncomp = cx.components();
    for (std::size_t i = 0; i < ws.points().size(); ++i)
        for (int e = -n1; e <= -1; ++e)
            for (int c = 0; c < ncomp; ++c) keys.insert(group_key(static_cast<int>(i), e, c));
    std::vector<std::vector<std::pair<Key, Scalar>>> full(static_cast<std::size_t>(cols.size()));
    for (std::size_t ci = 0; ci < cols.cands.size(); ++ci)
        for (int s = 0; s < cols.nm; ++s) {
            auto img = ws.principal_image(cols.cands[ci], static_cast<unsigned>(s), n2);
            std::vector<std::pair<Key, Scalar>> base;
            for (const auto& [k, x] : img) base.emplace_back(group_key(std::get<0>(k), std::get<1>(k), std::get<2>(k)), x);
            for (int b = 0; b < cols.nb; ++b) {
                auto e = multiply_entries<Key>(cx, b, base, [](const Key& k) { return std::get<3>(k); },
                                              [](const Key& k, int c) { return Key{std::get<0>(k), std::get<1>(k), std::get<2>(k), c}; }, false);
                for (const auto& [k, x] : e) keys.insert(k);
                full[static_cast<std::size_t>(cols.index(static_cast<int>(ci), b, static_cast<unsigned>(s)))] = std::move(e);
            }
        }
    H1Result res;
    for (const auto& k : keys) res.index.emplace(k, static_cast<int>(res.index.size()));
    for (const auto& e : full) res.image.insert(to_sparse(e, res.index));
    std::vector<int> parity(res.index.size());
    std::vector<Key> key_of(res.index.size());
    std::vector<int> low;
    for (const auto& [k, idx] : res.index) {
        parity[static_cast<std::size_t>(idx)] = cx.parity_of(std::get<3>(k));
        key_of[static_cast<std::size_t>(idx)] = k;
        if (std::get<0>(k) == 1) low.push_back(idx);
    }
    AmbientAction act = [&](int a, int coord) {
        const Key& k = key_of[static_cast<std::size_t>(coord)];
        std::map<int, Scalar> m;
        for (const auto& [c2, y] : left_mult(cx, a, std::get<3>(k))) m[res.index.at(Key{std::get<0>(k), std::get<1>(k), std::get<2>(k), c2})] += y;
        return sparse_from_map(m);
    };
    QuotientRep q = quotient_rep(low, res.image, parity, act, cx.base.dim());
    res.space.module = std::move(q.module);
    for (int coord : q.basis_coords) {
        const Key& k = key_of[static_cast<std::size_t>(coord)];
        std::size_t pi = static_cast<std::size_t>(std::get<1>(k));
        const PointP1& p = ws.points()[pi];
        int e = std::get<2>(k), comp = std::get<3>(k);
        RationalFunction te = p.is_infinity() ? RationalFunction::power_at(Scalar(0), -e) : RationalFunction::power_at(p.value(), e);
        SRF val = ws.tinv(pi).apply(SRF::basis(ws.ctx(), cx.b_of(comp), cx.mask_of(comp), te));
        res.space.reps.push_back({p, e, comp, val});
    }
    res.space.pole_order = n1;
    res.space.points = ws.points();
    return res;
}

/// Candidate coordinates of each basis vector translated into another column space.
inline bool spans_equal(const KernelResult& small, const KernelResult& big) {
    if (small.kernel.size() != big.kernel.size()) return false;
    std::map<Candidate, int> big_index;
    for (std::size_t i = 0; i < big.cols.cands.size(); ++i) big_index.emplace(big.cols.cands[i], static_cast<int>(i));
    Echelon e;
    for (const auto& v : big.kernel) e.insert(v);
    for (const auto& v : small.kernel) {
        std::map<int, Scalar> m;
        for (const auto& [col, x] : v) {
            auto it = big_index.find(small.cols.cands[static_cast<std::size_t>(small.cols.cand_of(col))]);
            if (it == big_index.end()) return false;
            m[big.cols.index(it->second, small.cols.b_of(col), small.cols.mask_of(col))] += x;
        }
        if (!e.contains(sparse_from_map(m))) return false;
    }
    return true;
}

inline TruncationBounds doubled(const BundleData& l, const TruncationBounds& b, int n) {
    TruncationBounds out = b;
    out.pole_order = 2 * n;
    out.scale = 1;
    auto pts = working_points(l, b);
    for (const auto& p : fresh_points(pts, 2)) out.extra_points.push_back(p);
    return out;
}

}  // namespace detail

class TruncationError : public AlgebraError {
public:
    using AlgebraError::AlgebraError;
};

/// Resolved truncation: the working points and the pole cap.
inline int resolve_pole_order(const BundleData& l, const TruncationBounds& b) {
    if (b.scale < 1) throw AlgebraError("TruncationBounds: scale must be positive");
    if (b.pole_order > 0) return b.pole_order * b.scale;
    detail::Workspace ws(l, detail::working_points(l, b));
    return detail::auto_pole_order(ws) * b.scale;
}

/// H^0 of the twist, checked against a computation with doubled pole cap and two extra points.
inline SectionSpace h0(const BundleData& l, const TruncationBounds& b = {}) {
    const int n = resolve_pole_order(l, b);
    detail::Workspace ws(l, detail::working_points(l, b));
    auto kr = detail::h0_kernel(ws, n);
    TruncationBounds b2 = detail::doubled(l, b, n);
    detail::Workspace ws2(l, detail::working_points(l, b2));
    auto kr2 = detail::h0_kernel(ws2, b2.pole_order);
    if (!detail::spans_equal(kr, kr2)) throw TruncationError("h0: result changes under bound doubling; increase the pole order");
    return detail::sections_from_kernel(ws, kr, 0, n);
}

/// H^0(Ber (x) L^{-1}) as the annihilator of R(gamma, xi); parities are those of f [dz d/dtheta].
inline SectionSpace h0_ber(const BundleData& l, const TruncationBounds& b = {}) {
    const int n = resolve_pole_order(l, b);
    detail::Workspace ws(l, detail::working_points(l, b));
    auto kr = detail::ber_kernel(ws, n);
    TruncationBounds b2 = detail::doubled(l, b, n);
    detail::Workspace ws2(l, detail::working_points(l, b2));
    auto kr2 = detail::ber_kernel(ws2, b2.pole_order);
    if (!detail::spans_equal(kr, kr2)) throw TruncationError("h0_ber: result changes under bound doubling; increase the pole order");
    return detail::sections_from_kernel(ws, kr, ws.ctx()->q % 2, n);
}

/// H^1 as principal parts modulo global functions, checked against doubled bounds.
inline H1Space h1(const BundleData& l, const TruncationBounds& b = {}) {
    const int n = resolve_pole_order(l, b);
    detail::Workspace ws(l, detail::working_points(l, b));
    auto r = detail::h1_compute(ws, n);
    TruncationBounds b2 = detail::doubled(l, b, n);
    detail::Workspace ws2(l, detail::working_points(l, b2));
    auto r2 = detail::h1_compute(ws2, b2.pole_order);
    if (r.space.module.dim() != r2.space.module.dim())
        throw TruncationError("h1: dimension changes under bound doubling; increase the pole order");
    // the small representatives remain independent classes in the large computation
    Echelon classes;
    for (const auto& rep : r.space.reps) {
        std::size_t pi2 = static_cast<std::size_t>(std::find(ws2.points().begin(), ws2.points().end(), rep.point) - ws2.points().begin());
        SparseVec v{{r2.index.at({1, static_cast<int>(pi2), rep.exponent, rep.component}), Scalar(1)}};
        r2.image.reduce(v);
        classes.insert(v);
    }
    if (classes.rank() != r.space.module.dim()) throw TruncationError("h1: representatives degenerate under bound doubling");
    return r.space;
}

/// B-valued matrix sum_P res_P ber(f_i g_j).
struct PairingMatrix {
    std::vector<std::vector<SuperElement>> entries;  // [f index][g index]
    int rows() const { return static_cast<int>(entries.size()); }
    int cols() const { return entries.empty() ? 0 : static_cast<int>(entries[0].size()); }

    /// Scalar matrix with one row per (f, B-component) and one column per g.
    DenseMatrix scalar_rows(const SuperContext& cx) const {
        const int nb = cx.base.dim();
        DenseMatrix m(rows() * nb, cols());
        for (int i = 0; i < rows(); ++i)
            for (int j = 0; j < cols(); ++j)
                for (int b = 0; b < nb; ++b) m(i * nb + b, j) = entries[i][j].at(b, 0);
        return m;
    }
    /// Scalar matrix with one row per (g, B-component) and one column per f.
    DenseMatrix scalar_cols(const SuperContext& cx) const {
        const int nb = cx.base.dim();
        DenseMatrix m(cols() * nb, rows());
        for (int i = 0; i < rows(); ++i)
            for (int j = 0; j < cols(); ++j)
                for (int b = 0; b < nb; ++b) m(j * nb + b, i) = entries[i][j].at(b, 0);
        return m;
    }
};

inline SuperElement pair_with_repartition(const SRF& f, const RepartitionRep& g) {
    return residue_dz((f * g.value).berezin_top(), g.point);
}

inline PairingMatrix serre_pairing(const std::vector<SRF>& f_basis, const std::vector<RepartitionRep>& g_basis) {
    PairingMatrix m;
    for (const auto& f : f_basis) {
        std::vector<SuperElement> row;
        for (const auto& g : g_basis) row.push_back(pair_with_repartition(f, g));
        m.entries.push_back(std::move(row));
    }
    return m;
}

struct DualityReport {
    int h1_even = 0, h1_odd = 0, h0ber_even = 0, h0ber_odd = 0;
    bool annihilates = false;  // pairing vanishes on R(gamma, xi) and on global functions
    bool injective = false;    // H^1 -> Hom(H^0(Ber (x) L^-1), B)
    bool frobenius = false;
    bool perfect = false;      // both maps injective and dimensions equal (meaningful for Frobenius B)
    bool stable = false;       // unchanged under bound doubling
    int pairing_rank = 0;
    PairingMatrix pairing;
    std::vector<std::string> notes;
};

namespace detail {

/// Pairing of f with local sections T_P^{-1}(theta_S t^k) and with random global functions.
inline bool pairing_annihilates(const BundleData& l, const SectionSpace& ber, int kmax) {
    const auto& ctx = l.context();
    for (const auto& f : ber.basis)
        for (const auto& p : ber.points) {
            LocalOperator ti = l.inverse_transform(p);
            for (unsigned s = 0; s < (1u << ctx->q); ++s)
                for (int k = 0; k <= kmax; ++k) {
                    RationalFunction tk = p.is_infinity() ? RationalFunction::power_at(Scalar(0), -k) : RationalFunction::power_at(p.value(), k);
                    SRF g = ti.apply(SRF::basis(ctx, 0, s, tk));
                    if (!residue_dz((f * g).berezin_top(), p).is_zero()) return false;
                }
        }
    // global functions with poles in the working set pair to zero (sum of all residues)
    std::vector<RationalFunction> globals{RationalFunction(Scalar(1)), RationalFunction::z(), RationalFunction::z() * RationalFunction::z()};
    for (const auto& p : ber.points)
        if (!p.is_infinity()) globals.push_back(RationalFunction::power_at(p.value(), -2) + RationalFunction::power_at(p.value(), -1));
    for (const auto& f : ber.basis)
        for (const auto& u : globals)
            for (unsigned s = 0; s < (1u << ctx->q); ++s) {
                SRF g = SRF::basis(ctx, 0, s, u);
                SuperElement total(ctx);
                for (const auto& p : ber.points) total += residue_dz((f * g).berezin_top(), p);
                if (!total.is_zero()) return false;
            }
    return true;
}

}  // namespace detail

inline DualityReport verify_duality(const BundleData& l, const TruncationBounds& b = {}) {
    DualityReport rep;
    const auto& cx = *l.context();
    rep.frobenius = cx.base.is_frobenius();
    SectionSpace ber;
    H1Space hh;
    try {
        ber = h0_ber(l, b);
        hh = h1(l, b);
        rep.stable = true;
    } catch (const TruncationError& e) {
        rep.notes.push_back(e.what());
        return rep;
    }
    rep.h1_even = hh.module.dim_even();
    rep.h1_odd = hh.module.dim_odd();
    rep.h0ber_even = ber.module.dim_even();
    rep.h0ber_odd = ber.module.dim_odd();
    rep.annihilates = detail::pairing_annihilates(l, ber, ber.pole_order + 2);
    rep.pairing = serre_pairing(ber.basis, hh.reps);
    const int dim_h1 = hh.module.dim(), dim_ber = ber.module.dim();
    rep.pairing_rank = dim_h1 == 0 ? 0 : rep.pairing.scalar_rows(cx).rank();
    rep.injective = rep.pairing_rank == dim_h1;
    const int rank_other = dim_ber == 0 ? 0 : rep.pairing.scalar_cols(cx).rank();
    rep.perfect = rep.injective && rank_other == dim_ber && dim_ber == dim_h1;
    return rep;
}

/// Comparison of a computation with one at doubled pole order and two extra points.
struct StabilityReport {
    bool h0 = false;       // equal spans of global sections
    bool h0_ber = false;   // equal spans of Berezinian sections
    bool h1 = false;       // equal dimensions, old classes a basis of the new space
    bool pairing = false;  // old pairing matrix = C * new matrix * D^T after basis matching
    bool all() const { return h0 && h0_ber && h1 && pairing; }
};

inline StabilityReport truncation_stability(const BundleData& l, const TruncationBounds& b = {}) {
    StabilityReport rep;
    const int n = resolve_pole_order(l, b);
    TruncationBounds b2 = detail::doubled(l, b, n);
    detail::Workspace ws(l, detail::working_points(l, b)), ws2(l, detail::working_points(l, b2));
    rep.h0 = detail::spans_equal(detail::h0_kernel(ws, n), detail::h0_kernel(ws2, b2.pole_order));
    auto kb = detail::ber_kernel(ws, n), kb2 = detail::ber_kernel(ws2, b2.pole_order);
    rep.h0_ber = detail::spans_equal(kb, kb2);
    auto r = detail::h1_compute(ws, n), r2 = detail::h1_compute(ws2, b2.pole_order);

    // D: coordinates of the old classes in the new quotient basis
    std::map<int, int> basis_pos;
    for (std::size_t k = 0; k < r2.space.reps.size(); ++k) {
        const auto& g = r2.space.reps[k];
        int pi = static_cast<int>(std::find(ws2.points().begin(), ws2.points().end(), g.point) - ws2.points().begin());
        basis_pos[r2.index.at({1, pi, g.exponent, g.component})] = static_cast<int>(k);
    }
    std::vector<std::vector<Scalar>> dmat;
    Echelon classes;
    bool ok = r.space.module.dim() == r2.space.module.dim();
    for (const auto& g : r.space.reps) {
        int pi = static_cast<int>(std::find(ws2.points().begin(), ws2.points().end(), g.point) - ws2.points().begin());
        SparseVec v{{r2.index.at({1, pi, g.exponent, g.component}), Scalar(1)}};
        r2.image.reduce(v);
        std::vector<Scalar> row(r2.space.reps.size(), Scalar(0));
        for (const auto& [c, x] : v) {
            auto it = basis_pos.find(c);
            if (it == basis_pos.end()) ok = false;
            else row[static_cast<std::size_t>(it->second)] = x;
        }
        classes.insert(v);
        dmat.push_back(std::move(row));
    }
    rep.h1 = ok && classes.rank() == r.space.module.dim();
    if (!rep.h0_ber || !rep.h1) return rep;

    // C: old Berezinian basis in terms of the new one
    std::map<detail::Candidate, int> big_index;
    for (std::size_t i = 0; i < kb2.cols.cands.size(); ++i) big_index.emplace(kb2.cols.cands[i], static_cast<int>(i));
    Echelon e;
    for (std::size_t k = 0; k < kb2.kernel.size(); ++k) e.insert(kb2.kernel[k], SparseVec{{static_cast<int>(k), Scalar(1)}});
    std::vector<std::vector<Scalar>> cmat;
    for (const auto& v : kb.kernel) {
        std::map<int, Scalar> m;
        for (const auto& [col, x] : v)
            m[kb2.cols.index(big_index.at(kb.cols.cands[static_cast<std::size_t>(kb.cols.cand_of(col))]), kb.cols.b_of(col), kb.cols.mask_of(col))] += x;
        SparseVec w = sparse_from_map(m), tag;
        e.reduce(w, &tag);
        if (!w.empty()) return rep;
        std::vector<Scalar> row(kb2.kernel.size(), Scalar(0));
        for (const auto& [k, x] : tag) row[static_cast<std::size_t>(k)] = -x;
        cmat.push_back(std::move(row));
    }
    std::vector<SRF> f_old, f_new;
    for (const auto& v : kb.kernel) f_old.push_back(kb.cols.function(ws.ctx(), v));
    for (const auto& v : kb2.kernel) f_new.push_back(kb2.cols.function(ws2.ctx(), v));
    PairingMatrix p_old = serre_pairing(f_old, r.space.reps), p_new = serre_pairing(f_new, r2.space.reps);
    rep.pairing = true;
    for (std::size_t i = 0; i < f_old.size(); ++i)
        for (std::size_t j = 0; j < r.space.reps.size(); ++j) {
            SuperElement acc(l.context());
            for (std::size_t k = 0; k < f_new.size(); ++k) {
                if (cmat[i][k].is_zero()) continue;
                for (std::size_t m = 0; m < r2.space.reps.size(); ++m)
                    if (!dmat[j][m].is_zero()) acc += p_new.entries[k][m].scaled(cmat[i][k] * dmat[j][m]);
            }
            if (!(acc == p_old.entries[i][j])) rep.pairing = false;
        }
    return rep;
}

/// Local principal-part data of a Berezinian section: germs p_P understood modulo holomorphic ones.
using PrincipalParts = std::map<PointP1, SRF>;

/// sum_P res_P ber(p_P g) = 0 for all g in H^0(O).
inline bool principal_part_solvable(const PrincipalParts& p, const SuperCurve& x, const TruncationBounds& b = {}) {
    BundleData triv(x);
    SectionSpace glob = h0(triv, b);
    for (const auto& g : glob.basis) {
        SuperElement total(x.context());
        for (const auto& [pt, f] : p) total += residue_dz((f * g).berezin_top(), pt);
        if (!total.is_zero()) return false;
    }
    return true;
}

/// A global f [dz d/dtheta] with f - p_P holomorphic at each P in the support of p and f
/// holomorphic elsewhere, if one exists within the truncation.
inline std::optional<SRF> principal_part_witness(const PrincipalParts& p, const SuperCurve& x, const TruncationBounds& b = {}) {
    BundleData triv(x);
    TruncationBounds bb = b;
    for (const auto& [pt, f] : p) bb.extra_points.push_back(pt);
    int n = resolve_pole_order(triv, bb);
    for (const auto& [pt, f] : p)
        if (!f.is_zero()) n = std::max(n, 2 - valuation_at(f, pt));
    detail::Workspace ws(triv, detail::working_points(triv, bb));
    std::optional<SparseVec> sol;
    auto kr = detail::ber_kernel(ws, n, &p, &sol);
    if (!sol) return std::nullopt;
    SRF f = kr.cols.function(ws.ctx(), *sol);
    // exact verification of the local conditions
    for (std::size_t i = 0; i < ws.points().size(); ++i) {
        const PointP1& pt = ws.points()[i];
        SRF diff = f;
        if (auto it = p.find(pt); it != p.end()) diff -= it->second;
        LocalOperator ti = triv.inverse_transform(pt);
        for (unsigned s = 0; s < (1u << ws.ctx()->q); ++s)
            for (int k = 0; k <= ws.ber_test_order(i, n); ++k) {
                RationalFunction tk = pt.is_infinity() ? RationalFunction::power_at(Scalar(0), -k) : RationalFunction::power_at(pt.value(), k);
                if (!residue_dz((diff * ti.apply(SRF::basis(ws.ctx(), 0, s, tk))).berezin_top(), pt).is_zero())
                    throw AlgebraError("principal_part_witness: solution fails an exact local check");
            }
    }
    return f;
}

}  // namespace supercurve
