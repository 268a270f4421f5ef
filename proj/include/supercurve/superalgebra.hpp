#pragma once

// The base algebra B and the Grassmann extension B[theta_1..theta_q], with
// coefficients either in Q(i) (constants) or in Q(i)(z) (the function field).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "supercurve/polynomial.hpp"

namespace supercurve {

/// A generator of a preset base algebra: odd generators square to zero, even ones
/// satisfy x^nilpotency = 0.
struct Generator {
    std::string name;
    int parity = 1;
    int nilpotency = 2;
};

/// Finite-dimensional local supercommutative algebra with basis[0] = 1.
class BaseAlgebra {
public:
    struct Term {
        int index;
        Scalar coeff;
    };
    using Product = std::vector<Term>;

    BaseAlgebra() : BaseAlgebra(std::vector<Generator>{}) {}

    /// Tensor product of Grassmann algebras and truncated polynomial algebras.
    explicit BaseAlgebra(std::vector<Generator> gens) : generators_(std::move(gens)) {
        for (const auto& g : generators_) {
            if (g.parity == 1 && g.nilpotency != 2) throw AlgebraError("odd generator must have nilpotency 2");
            if (g.nilpotency < 2) throw AlgebraError("generator nilpotency must be at least 2");
        }
        build_presets();
    }

    /// Arbitrary structure constants; validated (associative, unital, supercommutative, local).
    BaseAlgebra(std::vector<std::string> names, std::vector<int> parity, std::vector<std::vector<Product>> table)
        : names_(std::move(names)), parity_(std::move(parity)), table_(std::move(table)) {
        validate();
    }

    static BaseAlgebra complex() { return BaseAlgebra(); }
    static BaseAlgebra grassmann(const std::vector<std::string>& names) {
        std::vector<Generator> g;
        for (const auto& n : names) g.push_back({n, 1, 2});
        return BaseAlgebra(std::move(g));
    }
    static BaseAlgebra truncated(const std::string& name, int nilpotency) {
        return BaseAlgebra(std::vector<Generator>{{name, 0, nilpotency}});
    }
    static BaseAlgebra tensor(const BaseAlgebra& a, const BaseAlgebra& b) {
        if (a.generators_.empty() && a.dim() > 1) throw AlgebraError("tensor: only preset algebras");
        if (b.generators_.empty() && b.dim() > 1) throw AlgebraError("tensor: only preset algebras");
        auto g = a.generators_;
        g.insert(g.end(), b.generators_.begin(), b.generators_.end());
        return BaseAlgebra(std::move(g));
    }

    int dim() const { return static_cast<int>(names_.size()); }
    int parity(int i) const { return parity_[static_cast<std::size_t>(i)]; }
    const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
    const Product& product(int i, int j) const { return table_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const std::vector<Generator>& generators() const { return generators_; }
    bool is_grassmann() const {
        return std::all_of(generators_.begin(), generators_.end(), [](const Generator& g) { return g.parity == 1; }) &&
               (dim() == (1 << generators_.size()));
    }

    /// Basis index of a named generator, or -1.
    int generator_index(const std::string& n) const {
        for (int i = 0; i < dim(); ++i)
            if (names_[static_cast<std::size_t>(i)] == n) return i;
        return -1;
    }

    /// Smallest k with (maximal ideal)^k = 0.
    int nilpotency_index() const { return nil_index_; }

    /// Frobenius test for a local algebra: the socle {x : m x = 0} is one-dimensional.
    bool is_frobenius() const;

private:
    void build_presets();
    void validate();
    void compute_nilpotency();

    std::vector<Generator> generators_;
    std::vector<std::string> names_;
    std::vector<int> parity_;
    std::vector<std::vector<Product>> table_;
    int nil_index_ = 1;
};

inline void BaseAlgebra::build_presets() {
    // Monomials as exponent vectors, ordered by total degree then lexicographically.
    std::vector<std::vector<int>> monos{{}};
    monos[0].assign(generators_.size(), 0);
    for (std::size_t g = 0; g < generators_.size(); ++g) {
        std::vector<std::vector<int>> next;
        for (const auto& m : monos)
            for (int e = 0; e < generators_[g].nilpotency; ++e) {
                auto mm = m;
                mm[g] = e;
                next.push_back(mm);
            }
        monos = std::move(next);
    }
    auto total = [](const std::vector<int>& m) {
        int s = 0;
        for (int e : m) s += e;
        return s;
    };
    std::stable_sort(monos.begin(), monos.end(), [&](const auto& a, const auto& b) {
        if (total(a) != total(b)) return total(a) < total(b);
        return a > b;
    });
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < monos.size(); ++i) index[monos[i]] = static_cast<int>(i);
    names_.clear();
    parity_.clear();
    for (const auto& m : monos) {
        std::string n;
        int par = 0;
        for (std::size_t g = 0; g < generators_.size(); ++g) {
            if (m[g] == 0) continue;
            if (!n.empty()) n += "*";
            n += generators_[g].name;
            if (m[g] > 1) n += "^" + std::to_string(m[g]);
            par += generators_[g].parity * m[g];
        }
        names_.push_back(n.empty() ? "1" : n);
        parity_.push_back(par % 2);
    }
    const auto d = monos.size();
    table_.assign(d, std::vector<Product>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const auto& a = monos[i];
            const auto& b = monos[j];
            std::vector<int> c(a.size());
            bool zero = false;
            for (std::size_t g = 0; g < a.size(); ++g) {
                c[g] = a[g] + b[g];
                if (c[g] >= generators_[g].nilpotency) zero = true;
            }
            if (zero) continue;
            // sign: move each odd generator of b left past the odd generators of a with larger index
            int swaps = 0;
            for (std::size_t h = 0; h < b.size(); ++h) {
                if (generators_[h].parity == 0 || b[h] == 0) continue;
                for (std::size_t g = h + 1; g < a.size(); ++g)
                    if (generators_[g].parity == 1 && a[g] == 1) ++swaps;
            }
            table_[i][j].push_back({index[c], Scalar(swaps % 2 ? -1 : 1)});
        }
    compute_nilpotency();
}

inline void BaseAlgebra::validate() {
    const int d = dim();
    if (d == 0 || static_cast<int>(parity_.size()) != d || static_cast<int>(table_.size()) != d)
        throw AlgebraError("BaseAlgebra: inconsistent table sizes");
    auto dense = [&](const Product& p) {
        std::vector<Scalar> v(static_cast<std::size_t>(d), Scalar(0));
        for (const auto& t : p) {
            if (t.index < 0 || t.index >= d) throw AlgebraError("BaseAlgebra: basis index out of range");
            v[static_cast<std::size_t>(t.index)] += t.coeff;
        }
        return v;
    };
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(table_[static_cast<std::size_t>(i)].size()) != d) throw AlgebraError("BaseAlgebra: ragged table");
        // unit
        auto l = dense(product(0, i));
        auto r = dense(product(i, 0));
        for (int k = 0; k < d; ++k) {
            Scalar e(k == i ? 1 : 0);
            if (!(l[static_cast<std::size_t>(k)] == e) || !(r[static_cast<std::size_t>(k)] == e))
                throw AlgebraError("BaseAlgebra: basis[0] is not a unit");
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto ij = dense(product(i, j));
            auto ji = dense(product(j, i));
            Scalar s(((parity(i) * parity(j)) % 2) ? -1 : 1);
            for (int k = 0; k < d; ++k) {
                if (!(ij[static_cast<std::size_t>(k)] == s * ji[static_cast<std::size_t>(k)]))
                    throw AlgebraError("BaseAlgebra: table is not supercommutative");
                if (!ij[static_cast<std::size_t>(k)].is_zero() && parity(k) != (parity(i) + parity(j)) % 2)
                    throw AlgebraError("BaseAlgebra: product does not respect parity");
            }
            for (int k = 0; k < d; ++k) {
                // (ij)k == i(jk)
                std::vector<Scalar> left(static_cast<std::size_t>(d), Scalar(0)), right(static_cast<std::size_t>(d), Scalar(0));
                for (int m = 0; m < d; ++m) {
                    if (ij[static_cast<std::size_t>(m)].is_zero()) continue;
                    for (const auto& t : product(m, k)) left[static_cast<std::size_t>(t.index)] += ij[static_cast<std::size_t>(m)] * t.coeff;
                }
                auto jk = dense(product(j, k));
                for (int m = 0; m < d; ++m) {
                    if (jk[static_cast<std::size_t>(m)].is_zero()) continue;
                    for (const auto& t : product(i, m)) right[static_cast<std::size_t>(t.index)] += jk[static_cast<std::size_t>(m)] * t.coeff;
                }
                if (left != right) throw AlgebraError("BaseAlgebra: table is not associative");
            }
        }
    for (int i = 1; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (const auto& t : product(i, j))
                if (t.index == 0 && !t.coeff.is_zero())
                    throw AlgebraError("BaseAlgebra: span of non-unit basis elements is not an ideal");
    compute_nilpotency();
}

inline void BaseAlgebra::compute_nilpotency() {
    const int d = dim();
    // Powers of the maximal ideal m = span(basis[1..]), tracked as spanning sets of dense vectors.
    std::vector<std::vector<Scalar>> power;
    for (int i = 1; i < d; ++i) {
        std::vector<Scalar> v(static_cast<std::size_t>(d), Scalar(0));
        v[static_cast<std::size_t>(i)] = Scalar(1);
        power.push_back(v);
    }
    int k = 1;
    while (!power.empty()) {
        if (k > d + 1) throw AlgebraError("BaseAlgebra: algebra is not local (maximal ideal not nilpotent)");
        std::vector<std::vector<Scalar>> next;
        for (const auto& v : power)
            for (int i = 1; i < d; ++i) {
                std::vector<Scalar> w(static_cast<std::size_t>(d), Scalar(0));
                bool nz = false;
                for (int m = 0; m < d; ++m) {
                    if (v[static_cast<std::size_t>(m)].is_zero()) continue;
                    for (const auto& t : product(m, i)) {
                        w[static_cast<std::size_t>(t.index)] += v[static_cast<std::size_t>(m)] * t.coeff;
                        nz = true;
                    }
                }
                if (nz && std::any_of(w.begin(), w.end(), [](const Scalar& s) { return !s.is_zero(); }))
                    next.push_back(std::move(w));
            }
        // keep a basis only (Gaussian elimination on rows)
        std::vector<std::vector<Scalar>> basis;
        for (auto& v : next) {
            for (const auto& b : basis) {
                int p = 0;
                while (b[static_cast<std::size_t>(p)].is_zero()) ++p;
                if (!v[static_cast<std::size_t>(p)].is_zero()) {
                    Scalar f = v[static_cast<std::size_t>(p)] / b[static_cast<std::size_t>(p)];
                    for (int m = 0; m < d; ++m) v[static_cast<std::size_t>(m)] -= f * b[static_cast<std::size_t>(m)];
                }
            }
            if (std::any_of(v.begin(), v.end(), [](const Scalar& s) { return !s.is_zero(); })) basis.push_back(v);
        }
        // re-reduce earlier basis vectors against later pivots is unnecessary for counting
        power = std::move(basis);
        ++k;
    }
    nil_index_ = k;
}

inline bool BaseAlgebra::is_frobenius() const {
    const int d = dim();
    // socle = kernel of x -> (basis_i * x)_{i>=1}; solve by elimination on a (d*(d-1)) x d system
    std::vector<std::vector<Scalar>> rows;
    for (int i = 1; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            std::vector<Scalar> row(static_cast<std::size_t>(d), Scalar(0));
            for (int j = 0; j < d; ++j)
                for (const auto& t : product(i, j))
                    if (t.index == k) row[static_cast<std::size_t>(j)] += t.coeff;
            rows.push_back(row);
        }
    int rank = 0;
    std::vector<bool> used(rows.size(), false);
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!used[r] && !rows[r][static_cast<std::size_t>(c)].is_zero()) {
                piv = static_cast<int>(r);
                break;
            }
        if (piv < 0) continue;
        used[static_cast<std::size_t>(piv)] = true;
        ++rank;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(piv) || rows[r][static_cast<std::size_t>(c)].is_zero()) continue;
            Scalar f = rows[r][static_cast<std::size_t>(c)] / rows[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)];
            for (int m = 0; m < d; ++m) rows[r][static_cast<std::size_t>(m)] -= f * rows[static_cast<std::size_t>(piv)][static_cast<std::size_t>(m)];
        }
    }
    return d - rank == 1;
}

/// Shared description of Lambda[B,q]: the base algebra plus the number of odd coordinates.
struct SuperContext {
    BaseAlgebra base;
    int q = 1;

    SuperContext(BaseAlgebra b, int q_) : base(std::move(b)), q(q_) {
        if (q < 0 || q > 6) throw AlgebraError("SuperContext: q out of supported range");
        const int n = 1 << q;
        merge_sign.assign(static_cast<std::size_t>(n * n), 0);
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                if (s & t) continue;
                // theta_S theta_T: count pairs (i in S, j in T) with i > j
                int inv = 0;
                for (int i = 0; i < q; ++i)
                    if (s >> i & 1)
                        for (int j = 0; j < i; ++j)
                            if (t >> j & 1) ++inv;
                merge_sign[static_cast<std::size_t>(s * n + t)] = (inv % 2) ? -1 : 1;
            }
    }

    int components() const { return base.dim() << q; }
    int index(int b, unsigned mask) const { return (b << q) | static_cast<int>(mask); }
    int b_of(int idx) const { return idx >> q; }
    unsigned mask_of(int idx) const { return static_cast<unsigned>(idx) & ((1u << q) - 1); }
    int parity_of(int idx) const { return (base.parity(b_of(idx)) + std::popcount(mask_of(idx))) % 2; }
    unsigned top_mask() const { return (1u << q) - 1; }

    std::vector<int> merge_sign;  // 0 if overlapping
};

using ContextPtr = std::shared_ptr<const SuperContext>;

inline ContextPtr make_context(BaseAlgebra b, int q) { return std::make_shared<const SuperContext>(std::move(b), q); }

/// Element of Lambda = B[theta] (x) C, stored densely over the basis b * theta_S.
template <typename C>
class SuperElem {
public:
    using Coeff = C;

    SuperElem() = default;
    explicit SuperElem(ContextPtr ctx) : ctx_(std::move(ctx)), c_(static_cast<std::size_t>(ctx_->components())) {}
    SuperElem(ContextPtr ctx, const C& scalar) : SuperElem(std::move(ctx)) { c_[0] = scalar; }

    static SuperElem basis(ContextPtr ctx, int b, unsigned mask, const C& coeff = C(Scalar(1))) {
        SuperElem e(ctx);
        e.c_[static_cast<std::size_t>(ctx->index(b, mask))] = coeff;
        return e;
    }
    static SuperElem theta(ContextPtr ctx, int i) { return basis(ctx, 0, 1u << (i - 1)); }
    static SuperElem gen(ContextPtr ctx, const std::string& name) {
        int b = ctx->base.generator_index(name);
        if (b < 0) throw AlgebraError("unknown base generator '" + name + "'");
        return basis(ctx, b, 0);
    }

    const ContextPtr& context() const { return ctx_; }
    const SuperContext& ctx() const { return *ctx_; }
    int size() const { return static_cast<int>(c_.size()); }
    const C& operator[](int idx) const { return c_[static_cast<std::size_t>(idx)]; }
    C& operator[](int idx) { return c_[static_cast<std::size_t>(idx)]; }
    const C& at(int b, unsigned mask) const { return c_[static_cast<std::size_t>(ctx_->index(b, mask))]; }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const C& x) { return x.is_zero(); });
    }

    /// 0 or 1 for homogeneous elements, -1 if mixed; zero counts as even.
    int parity() const {
        int p = -2;
        for (int i = 0; i < size(); ++i) {
            if (c_[static_cast<std::size_t>(i)].is_zero()) continue;
            int q = ctx_->parity_of(i);
            if (p == -2) p = q;
            else if (p != q) return -1;
        }
        return p == -2 ? 0 : p;
    }
    SuperElem part(int par) const {
        SuperElem r(ctx_);
        for (int i = 0; i < size(); ++i)
            if (ctx_->parity_of(i) == par) r.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
        return r;
    }
    SuperElem even_part() const { return part(0); }
    SuperElem odd_part() const { return part(1); }

    SuperElem operator-() const {
        SuperElem r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    SuperElem& operator+=(const SuperElem& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!o.c_[i].is_zero()) c_[i] = c_[i] + o.c_[i];
        return *this;
    }
    SuperElem& operator-=(const SuperElem& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!o.c_[i].is_zero()) c_[i] = c_[i] - o.c_[i];
        return *this;
    }
    friend SuperElem operator+(SuperElem a, const SuperElem& b) { return a += b; }
    friend SuperElem operator-(SuperElem a, const SuperElem& b) { return a -= b; }

    /// Multiply every component by an even coefficient.
    SuperElem scaled(const C& s) const {
        SuperElem r(ctx_);
        if (s.is_zero()) return r;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].is_zero()) r.c_[i] = c_[i] * s;
        return r;
    }

    friend SuperElem operator*(const SuperElem& a, const SuperElem& b) {
        a.check(b);
        const SuperContext& cx = *a.ctx_;
        SuperElem r(a.ctx_);
        const int n = a.size();
        const int nm = 1 << cx.q;
        for (int i = 0; i < n; ++i) {
            const C& x = a.c_[static_cast<std::size_t>(i)];
            if (x.is_zero()) continue;
            const int bi = cx.b_of(i);
            const unsigned si = cx.mask_of(i);
            const int si_par = std::popcount(si) % 2;
            for (int j = 0; j < n; ++j) {
                const C& y = b.c_[static_cast<std::size_t>(j)];
                if (y.is_zero()) continue;
                const unsigned sj = cx.mask_of(j);
                if (si & sj) continue;
                const int bj = cx.b_of(j);
                const auto& prod = cx.base.product(bi, bj);
                if (prod.empty()) continue;
                int sign = cx.merge_sign[static_cast<std::size_t>(static_cast<int>(si) * nm + static_cast<int>(sj))];
                if (si_par && cx.base.parity(bj)) sign = -sign;
                C xy = x * y;
                if (sign < 0) xy = -xy;
                for (const auto& t : prod) {
                    C term = t.coeff.is_one() ? xy : (t.coeff == Scalar(-1) ? -xy : xy * C(t.coeff));
                    auto& slot = r.c_[static_cast<std::size_t>(cx.index(t.index, si | sj))];
                    slot = slot + term;
                }
            }
        }
        return r;
    }
    SuperElem& operator*=(const SuperElem& o) { return *this = *this * o; }

    friend bool operator==(const SuperElem& a, const SuperElem& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    /// Left derivation d/dtheta_i (1-based) with Koszul signs through odd coefficients.
    SuperElem theta_derivative(int i) const {
        if (i < 1 || i > ctx_->q) throw AlgebraError("theta_derivative: index out of range");
        const unsigned bit = 1u << (i - 1);
        SuperElem r(ctx_);
        for (int k = 0; k < size(); ++k) {
            const C& x = c_[static_cast<std::size_t>(k)];
            if (x.is_zero()) continue;
            const unsigned s = ctx_->mask_of(k);
            if (!(s & bit)) continue;
            const int b = ctx_->b_of(k);
            int before = std::popcount(s & (bit - 1));
            int sign = (before % 2) ? -1 : 1;
            if (ctx_->base.parity(b)) sign = -sign;
            r.c_[static_cast<std::size_t>(ctx_->index(b, s & ~bit))] = sign < 0 ? -x : x;
        }
        return r;
    }

    /// Applies d/dtheta_1 first, then d/dtheta_2, ..., d/dtheta_q; result is theta-free.
    SuperElem berezin_top() const {
        SuperElem r(ctx_);
        const unsigned top = ctx_->top_mask();
        const int q = ctx_->q;
        for (int b = 0; b < ctx_->base.dim(); ++b) {
            const C& x = at(b, top);
            if (x.is_zero()) continue;
            // each step moves the derivative past b only (the leading theta is removed)
            int sign = (ctx_->base.parity(b) && (q % 2)) ? -1 : 1;
            r.c_[static_cast<std::size_t>(ctx_->index(b, 0))] = sign < 0 ? -x : x;
        }
        return r;
    }

    /// Component along the unit with no theta: the image modulo nilpotents.
    const C& reduced() const { return c_[0]; }

    /// Nilpotent part (everything except the reduced component).
    SuperElem nilpotent_part() const {
        SuperElem r = *this;
        r.c_[0] = C();
        return r;
    }

    bool is_theta_free() const {
        for (int k = 0; k < size(); ++k)
            if (ctx_->mask_of(k) != 0 && !c_[static_cast<std::size_t>(k)].is_zero()) return false;
        return true;
    }

    /// Even element with invertible reduced component; terminating geometric series.
    SuperElem invert_unit() const {
        if (parity() == 1) throw AlgebraError("invert_unit: element is odd");
        if (parity() == -1) throw AlgebraError("invert_unit: element is not homogeneous even");
        if (c_[0].is_zero()) throw AlgebraError("invert_unit: reduction modulo nilpotents vanishes");
        C inv0 = C(Scalar(1)) / c_[0];
        SuperElem n = nilpotent_part().scaled(-inv0);  // -n / a0
        SuperElem result(ctx_, inv0);
        SuperElem power(ctx_, C(Scalar(1)));
        for (int k = 0; k < 64; ++k) {
            power = power * n;
            if (power.is_zero()) return result;
            result += power.scaled(inv0);
        }
        throw AlgebraError("invert_unit: nilpotent part did not terminate");
    }

    /// Apply f to every coefficient.
    template <typename F>
    auto map(F&& f) const {
        using D = std::decay_t<decltype(f(std::declval<const C&>()))>;
        SuperElem<D> r(ctx_);
        for (int k = 0; k < size(); ++k)
            if (!c_[static_cast<std::size_t>(k)].is_zero()) r[k] = f(c_[static_cast<std::size_t>(k)]);
        return r;
    }

    std::string str() const {
        std::string out;
        for (int k = 0; k < size(); ++k) {
            const C& x = c_[static_cast<std::size_t>(k)];
            if (x.is_zero()) continue;
            std::string mon;
            int b = ctx_->b_of(k);
            if (b != 0) mon = ctx_->base.name(b);
            unsigned s = ctx_->mask_of(k);
            for (int i = 0; i < ctx_->q; ++i)
                if (s >> i & 1) mon += (mon.empty() ? "" : "*") + std::string("theta") + std::to_string(i + 1);
            std::string cs = x.str();
            bool simple = cs.find_first_of("+-/(", 1) == std::string::npos;
            std::string term = mon.empty() ? cs : ((cs == "1") ? mon : ((simple ? cs : "(" + cs + ")") + "*" + mon));
            if (!out.empty()) out += " + ";
            out += term;
        }
        return out.empty() ? "0" : out;
    }

private:
    void check(const SuperElem& o) const {
        if (ctx_.get() != o.ctx_.get() && !(ctx_->base.dim() == o.ctx_->base.dim() && ctx_->q == o.ctx_->q))
            throw AlgebraError("SuperElem: mismatched contexts");
    }
    ContextPtr ctx_;
    std::vector<C> c_;
};

using SuperElement = SuperElem<Scalar>;
using SuperRationalFunction = SuperElem<RationalFunction>;

/// The scalar part of a theta-free constant element modulo nilpotents.
inline Scalar reduce(const SuperElement& a) { return a.reduced(); }

inline SuperRationalFunction lift_constant(const SuperElement& a) {
    return a.map([](const Scalar& s) { return RationalFunction(s); });
}

/// d/dz componentwise.
inline SuperRationalFunction z_derivative(const SuperRationalFunction& f) {
    return f.map([](const RationalFunction& r) { return r.derivative(); });
}

}  // namespace supercurve
