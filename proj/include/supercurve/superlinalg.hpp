#pragma once

// Exact linear algebra: sparse echelon forms over Q(i), finite-dimensional B-modules
// with explicit scalar bases, even determinants and Berezinians of supermatrices.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supercurve/superalgebra.hpp"

namespace supercurve {

// ---------------------------------------------------------------------------
// Sparse vectors and incremental echelon bases
// ---------------------------------------------------------------------------

/// Sorted (index, nonzero value) pairs.
using SparseVec = std::vector<std::pair<int, Scalar>>;

inline SparseVec sparse_from_map(const std::map<int, Scalar>& m) {
    SparseVec v;
    v.reserve(m.size());
    for (const auto& [k, x] : m)
        if (!x.is_zero()) v.emplace_back(k, x);
    return v;
}

inline SparseVec sparse_axpy(const SparseVec& a, const Scalar& s, const SparseVec& b) {
    // a + s*b
    SparseVec r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.emplace_back(b[j].first, s * b[j].second);
            ++j;
        } else {
            Scalar v = a[i].second + s * b[j].second;
            if (!v.is_zero()) r.emplace_back(a[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return r;
}

inline SparseVec sparse_scaled(SparseVec v, const Scalar& s) {
    if (s.is_zero()) return {};
    for (auto& [k, x] : v) x *= s;
    return v;
}

inline Scalar sparse_get(const SparseVec& v, int k) {
    auto it = std::lower_bound(v.begin(), v.end(), k, [](const auto& p, int key) { return p.first < key; });
    return (it != v.end() && it->first == k) ? it->second : Scalar(0);
}

/// Echelon basis of a subspace; each row has leading coefficient 1 at its pivot. Rows may carry a
/// tag vector recording the combination of inserted vectors that produced them.
class Echelon {
public:
    struct Row {
        SparseVec v;
        SparseVec tag;
    };

    /// Fully reduces v (and its tag) against the rows: afterwards v has no pivot coordinates.
    void reduce(SparseVec& v, SparseVec* tag = nullptr) const {
        std::size_t pos = 0;
        while (pos < v.size()) {
            auto it = rows_.find(v[pos].first);
            if (it == rows_.end()) {
                ++pos;
                continue;
            }
            Scalar c = -v[pos].second;
            if (tag) *tag = sparse_axpy(*tag, c, it->second.tag);
            v = sparse_axpy(v, c, it->second.v);
            // coordinate at pos is now eliminated; entries before pos are untouched
        }
    }

    /// Inserts v; returns true if it enlarged the span. If it did not, `tag` (when given)
    /// receives the dependency combination.
    bool insert(SparseVec v, SparseVec tag = {}, SparseVec* dependency = nullptr) {
        reduce(v, &tag);
        if (v.empty()) {
            if (dependency) *dependency = std::move(tag);
            return false;
        }
        Scalar inv = v.front().second.inverse();
        v = sparse_scaled(std::move(v), inv);
        tag = sparse_scaled(std::move(tag), inv);
        int p = v.front().first;
        // keep rows fully reduced: eliminate the new pivot from existing rows
        for (auto& [q, row] : rows_) {
            Scalar c = sparse_get(row.v, p);
            if (c.is_zero()) continue;
            row.v = sparse_axpy(row.v, -c, v);
            row.tag = sparse_axpy(row.tag, -c, tag);
        }
        rows_.emplace(p, Row{std::move(v), std::move(tag)});
        return true;
    }

    bool contains(SparseVec v) const {
        reduce(v);
        return v.empty();
    }

    int rank() const { return static_cast<int>(rows_.size()); }
    bool is_pivot(int k) const { return rows_.count(k) > 0; }
    const std::map<int, Row>& rows() const { return rows_; }

private:
    std::map<int, Row> rows_;
};

/// Kernel of the linear map whose j-th column is images[j]; basis vectors in source coordinates.
inline std::vector<SparseVec> kernel_of_columns(const std::vector<SparseVec>& images) {
    Echelon e;
    std::vector<SparseVec> ker;
    for (std::size_t j = 0; j < images.size(); ++j) {
        SparseVec dep;
        if (!e.insert(images[j], SparseVec{{static_cast<int>(j), Scalar(1)}}, &dep)) ker.push_back(std::move(dep));
    }
    return ker;
}

// ---------------------------------------------------------------------------
// Dense matrices over Q(i)
// ---------------------------------------------------------------------------

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Scalar> a;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c), Scalar(0)) {}
    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
        return m;
    }
    Scalar& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
    const Scalar& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }

    friend DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
        if (x.cols != y.rows) throw AlgebraError("DenseMatrix: shape mismatch");
        DenseMatrix r(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                if (x(i, k).is_zero()) continue;
                for (int j = 0; j < y.cols; ++j)
                    if (!y(k, j).is_zero()) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }
    friend bool operator==(const DenseMatrix& x, const DenseMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
    SparseVec column(int j) const {
        SparseVec v;
        for (int i = 0; i < rows; ++i)
            if (!(*this)(i, j).is_zero()) v.emplace_back(i, (*this)(i, j));
        return v;
    }
    std::vector<SparseVec> columns() const {
        std::vector<SparseVec> out;
        for (int j = 0; j < cols; ++j) out.push_back(column(j));
        return out;
    }
    int rank() const {
        Echelon e;
        for (int j = 0; j < cols; ++j) e.insert(column(j));
        return e.rank();
    }
};

// ---------------------------------------------------------------------------
// B-modules with explicit scalar bases
// ---------------------------------------------------------------------------

/// A finitely generated B-module stored as a Z/2-graded scalar space with B-action matrices.
struct BModuleRep {
    std::vector<int> parity;           // per scalar basis vector
    std::vector<DenseMatrix> action;   // action[b] column j = coordinates of basis_b * e_j

    int dim() const { return static_cast<int>(parity.size()); }
    int dim_even() const { return static_cast<int>(std::count(parity.begin(), parity.end(), 0)); }
    int dim_odd() const { return dim() - dim_even(); }

    /// Checks that the action matrices represent the structure constants of B.
    void validate(const BaseAlgebra& b) const {
        const int n = dim();
        if (static_cast<int>(action.size()) != b.dim()) throw AlgebraError("BModuleRep: wrong number of action matrices");
        if (!(action[0] == DenseMatrix::identity(n))) throw AlgebraError("BModuleRep: unit does not act as identity");
        for (int i = 0; i < b.dim(); ++i)
            for (int j = 0; j < b.dim(); ++j) {
                DenseMatrix lhs = action[static_cast<std::size_t>(i)] * action[static_cast<std::size_t>(j)];
                DenseMatrix rhs(n, n);
                for (const auto& t : b.product(i, j))
                    for (std::size_t k = 0; k < rhs.a.size(); ++k) rhs.a[k] += t.coeff * action[static_cast<std::size_t>(t.index)].a[k];
                if (!(lhs == rhs)) throw AlgebraError("BModuleRep: action violates structure constants");
            }
    }

    /// Minimal number of B-generators: dim of M / m M.
    int generator_count() const {
        Echelon mm;
        for (std::size_t b = 1; b < action.size(); ++b)
            for (int j = 0; j < dim(); ++j) mm.insert(action[b].column(j));
        return dim() - mm.rank();
    }

    /// Basis indices whose images span M / m M (greedy over the canonical basis).
    std::vector<int> generators() const {
        Echelon mm;
        for (std::size_t b = 1; b < action.size(); ++b)
            for (int j = 0; j < dim(); ++j) mm.insert(action[b].column(j));
        std::vector<int> out;
        for (int j = 0; j < dim(); ++j)
            if (mm.insert(SparseVec{{j, Scalar(1)}})) out.push_back(j);
        return out;
    }

    bool is_free(int base_dim) const { return generator_count() * base_dim == dim(); }
};

/// Action on an ambient space given implicitly (image of a coordinate unit vector under basis_b).
using AmbientAction = std::function<SparseVec(int b, int coord)>;

/// The submodule spanned by `basis` (vectors in ambient coordinates, assumed B-stable) with
/// its induced action. Basis vectors must be parity-homogeneous.
inline BModuleRep submodule_rep(const std::vector<SparseVec>& basis, const std::vector<int>& ambient_parity,
                                const AmbientAction& act, int base_dim) {
    BModuleRep m;
    const int n = static_cast<int>(basis.size());
    Echelon e;
    for (int j = 0; j < n; ++j) {
        int par = -1;
        for (const auto& [k, x] : basis[static_cast<std::size_t>(j)]) {
            int p = ambient_parity[static_cast<std::size_t>(k)];
            if (par == -1) par = p;
            else if (par != p) throw AlgebraError("submodule_rep: basis vector is not homogeneous");
        }
        m.parity.push_back(par < 0 ? 0 : par);
        if (!e.insert(basis[static_cast<std::size_t>(j)], SparseVec{{j, Scalar(1)}}))
            throw AlgebraError("submodule_rep: basis vectors are dependent");
    }
    m.action.assign(static_cast<std::size_t>(base_dim), DenseMatrix(n, n));
    for (int b = 0; b < base_dim; ++b)
        for (int j = 0; j < n; ++j) {
            std::map<int, Scalar> img;
            for (const auto& [k, x] : basis[static_cast<std::size_t>(j)])
                for (const auto& [kk, y] : act(b, k)) img[kk] += x * y;
            SparseVec v = sparse_from_map(img);
            SparseVec tag;
            e.reduce(v, &tag);
            if (!v.empty()) throw AlgebraError("submodule_rep: span is not B-stable");
            for (const auto& [i, c] : tag) m.action[static_cast<std::size_t>(b)](i, j) = -c;
        }
    return m;
}

/// Quotient of a coordinate subspace (the coordinates listed in `coords`) by the span of the rows
/// of `sub` whose pivots lie in `coords`. The quotient basis is the set of non-pivot coordinates.
struct QuotientRep {
    BModuleRep module;
    std::vector<int> basis_coords;  // ambient coordinate of each quotient basis vector
};

inline QuotientRep quotient_rep(const std::vector<int>& coords, const Echelon& sub, const std::vector<int>& ambient_parity,
                                const AmbientAction& act, int base_dim) {
    QuotientRep q;
    std::map<int, int> index;
    for (int c : coords)
        if (!sub.is_pivot(c)) {
            index[c] = static_cast<int>(q.basis_coords.size());
            q.basis_coords.push_back(c);
            q.module.parity.push_back(ambient_parity[static_cast<std::size_t>(c)]);
        }
    const int n = static_cast<int>(q.basis_coords.size());
    q.module.action.assign(static_cast<std::size_t>(base_dim), DenseMatrix(n, n));
    for (int b = 0; b < base_dim; ++b)
        for (int j = 0; j < n; ++j) {
            SparseVec v = act(b, q.basis_coords[static_cast<std::size_t>(j)]);
            sub.reduce(v);
            for (const auto& [k, x] : v) {
                auto it = index.find(k);
                if (it == index.end()) throw AlgebraError("quotient_rep: action leaves the coordinate subspace");
                q.module.action[static_cast<std::size_t>(b)](it->second, j) = x;
            }
        }
    return q;
}

/// A parity-preserving B-linear map between module representations.
struct BLinearMap {
    BModuleRep source;
    BModuleRep target;
    DenseMatrix matrix;  // target.dim x source.dim

    void check() const {
        if (matrix.rows != target.dim() || matrix.cols != source.dim()) throw AlgebraError("BLinearMap: shape mismatch");
        for (std::size_t b = 0; b < source.action.size(); ++b)
            if (!(target.action[b] * matrix == matrix * source.action[b]))
                throw AlgebraError("BLinearMap: map is not B-linear");
        for (int i = 0; i < matrix.rows; ++i)
            for (int j = 0; j < matrix.cols; ++j)
                if (!matrix(i, j).is_zero() && target.parity[static_cast<std::size_t>(i)] != source.parity[static_cast<std::size_t>(j)])
                    throw AlgebraError("BLinearMap: map does not preserve parity");
    }
};

inline AmbientAction dense_action(const BModuleRep& m) {
    return [&m](int b, int coord) { return m.action[static_cast<std::size_t>(b)].column(coord); };
}

inline BModuleRep kernel(const BLinearMap& f) {
    f.check();
    auto ker = kernel_of_columns(f.matrix.columns());
    return submodule_rep(ker, f.source.parity, dense_action(f.source), static_cast<int>(f.source.action.size()));
}

inline BModuleRep cokernel(const BLinearMap& f) {
    f.check();
    Echelon im;
    for (const auto& c : f.matrix.columns()) im.insert(c);
    std::vector<int> coords;
    for (int i = 0; i < f.target.dim(); ++i) coords.push_back(i);
    return quotient_rep(coords, im, f.target.parity, dense_action(f.target), static_cast<int>(f.target.action.size())).module;
}

/// M / span(vectors); the span must be a submodule.
inline BModuleRep quotient(const BModuleRep& m, const std::vector<SparseVec>& vectors) {
    Echelon sub;
    for (const auto& v : vectors) sub.insert(v);
    // closure check
    for (const auto& [p, row] : sub.rows())
        for (std::size_t b = 0; b < m.action.size(); ++b) {
            std::map<int, Scalar> img;
            for (const auto& [k, x] : row.v)
                for (const auto& [kk, y] : m.action[b].column(k)) img[kk] += x * y;
            if (!sub.contains(sparse_from_map(img))) throw AlgebraError("quotient: span is not a submodule");
        }
    std::vector<int> coords;
    for (int i = 0; i < m.dim(); ++i) coords.push_back(i);
    return quotient_rep(coords, sub, m.parity, dense_action(m), static_cast<int>(m.action.size())).module;
}

/// Free module B^(r|s) in the basis (b * e_k).
inline BModuleRep free_module(const BaseAlgebra& base, int even_rank, int odd_rank) {
    BModuleRep m;
    const int d = base.dim();
    const int r = even_rank + odd_rank;
    for (int k = 0; k < r; ++k)
        for (int b = 0; b < d; ++b) m.parity.push_back((base.parity(b) + (k >= even_rank ? 1 : 0)) % 2);
    m.action.assign(static_cast<std::size_t>(d), DenseMatrix(r * d, r * d));
    for (int a = 0; a < d; ++a)
        for (int k = 0; k < r; ++k)
            for (int b = 0; b < d; ++b)
                for (const auto& t : base.product(a, b)) m.action[static_cast<std::size_t>(a)](k * d + t.index, k * d + b) += t.coeff;
    return m;
}

// ---------------------------------------------------------------------------
// Even determinants and Berezinians
// ---------------------------------------------------------------------------

template <typename C>
using ElemMatrix = std::vector<std::vector<SuperElem<C>>>;

namespace detail {

template <typename C>
SuperElem<C> det_cofactor(const ElemMatrix<C>& m, const ContextPtr& ctx) {
    const std::size_t n = m.size();
    if (n == 0) return SuperElem<C>(ctx, C(Scalar(1)));
    if (n == 1) return m[0][0];
    SuperElem<C> acc(ctx);
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        ElemMatrix<C> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<SuperElem<C>> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        SuperElem<C> term = m[0][j] * det_cofactor(minor, ctx);
        if (j % 2) acc -= term;
        else acc += term;
    }
    return acc;
}

}  // namespace detail

/// Determinant of a square matrix with even entries (a commutative ring). Elimination pivots on
/// units; a column without a unit pivot is finished by cofactor expansion.
template <typename C>
SuperElem<C> det_even(ElemMatrix<C> m, const ContextPtr& ctx) {
    const std::size_t n = m.size();
    for (const auto& row : m) {
        if (row.size() != n) throw AlgebraError("det_even: matrix is not square");
        for (const auto& x : row)
            if (x.parity() != 0) throw AlgebraError("det_even: entries must be even");
    }
    SuperElem<C> det(ctx, C(Scalar(1)));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = n;
        for (std::size_t r = col; r < n; ++r)
            if (!m[r][col].reduced().is_zero()) {
                piv = r;
                break;
            }
        if (piv == n) {
            ElemMatrix<C> rest;
            for (std::size_t r = col; r < n; ++r) rest.emplace_back(m[r].begin() + static_cast<long>(col), m[r].end());
            return det * detail::det_cofactor(rest, ctx);
        }
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det = det * m[col][col];
        SuperElem<C> inv = m[col][col].invert_unit();
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col].is_zero()) continue;
            SuperElem<C> f = m[r][col] * inv;
            for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
        }
    }
    return det;
}

/// Inverse of a matrix with even entries whose reduction is invertible.
template <typename C>
ElemMatrix<C> inverse_even(ElemMatrix<C> m, const ContextPtr& ctx) {
    const std::size_t n = m.size();
    ElemMatrix<C> inv(n, std::vector<SuperElem<C>>(n, SuperElem<C>(ctx)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = SuperElem<C>(ctx, C(Scalar(1)));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = n;
        for (std::size_t r = col; r < n; ++r)
            if (!m[r][col].reduced().is_zero()) {
                piv = r;
                break;
            }
        if (piv == n) throw AlgebraError("inverse_even: matrix is not invertible");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        SuperElem<C> p = m[col][col].invert_unit();
        for (std::size_t k = 0; k < n; ++k) {
            m[col][k] = p * m[col][k];
            inv[col][k] = p * inv[col][k];
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            SuperElem<C> f = m[r][col];
            for (std::size_t k = 0; k < n; ++k) {
                m[r][k] -= f * m[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

template <typename C>
ElemMatrix<C> mat_mul(const ElemMatrix<C>& a, const ElemMatrix<C>& b, const ContextPtr& ctx) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    ElemMatrix<C> r(n, std::vector<SuperElem<C>>(m, SuperElem<C>(ctx)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

/// Square supermatrix of shape (p|s)x(p|s): [[A, Bo],[Co, D]] with A, D even and Bo, Co odd.
template <typename C>
struct SuperMatrix {
    ContextPtr ctx;
    ElemMatrix<C> a, b_blk, c_blk, d;

    int even_size() const { return static_cast<int>(a.size()); }
    int odd_size() const { return static_cast<int>(d.size()); }

    /// Full (p+s)x(p+s) matrix.
    ElemMatrix<C> full() const {
        const int p = even_size(), s = odd_size();
        ElemMatrix<C> m(static_cast<std::size_t>(p + s), std::vector<SuperElem<C>>(static_cast<std::size_t>(p + s), SuperElem<C>(ctx)));
        for (int i = 0; i < p + s; ++i)
            for (int j = 0; j < p + s; ++j) {
                const auto& blk = i < p ? (j < p ? a : b_blk) : (j < p ? c_blk : d);
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    blk[static_cast<std::size_t>(i < p ? i : i - p)][static_cast<std::size_t>(j < p ? j : j - p)];
            }
        return m;
    }
    static SuperMatrix from_full(const ContextPtr& ctx, const ElemMatrix<C>& m, int p) {
        SuperMatrix r{ctx, {}, {}, {}, {}};
        const int n = static_cast<int>(m.size());
        auto block = [&](int r0, int r1, int c0, int c1) {
            ElemMatrix<C> out;
            for (int i = r0; i < r1; ++i)
                out.emplace_back(m[static_cast<std::size_t>(i)].begin() + c0, m[static_cast<std::size_t>(i)].begin() + c1);
            return out;
        };
        r.a = block(0, p, 0, p);
        r.b_blk = block(0, p, p, n);
        r.c_blk = block(p, n, 0, p);
        r.d = block(p, n, p, n);
        return r;
    }

    void check_parity() const {
        auto all = [](const ElemMatrix<C>& m, int par) {
            for (const auto& row : m)
                for (const auto& x : row)
                    if (!x.is_zero() && x.parity() != par) return false;
            return true;
        };
        if (!all(a, 0) || !all(d, 0)) throw AlgebraError("SuperMatrix: diagonal blocks must be even");
        if (!all(b_blk, 1) || !all(c_blk, 1)) throw AlgebraError("SuperMatrix: off-diagonal blocks must be odd");
    }

    friend SuperMatrix operator*(const SuperMatrix& x, const SuperMatrix& y) {
        return from_full(x.ctx, mat_mul(x.full(), y.full(), x.ctx), x.even_size());
    }
};

/// Ber(M) = det(A - B D^{-1} C) / det(D).
template <typename C>
SuperElem<C> berezinian(const SuperMatrix<C>& m) {
    m.check_parity();
    const auto& ctx = m.ctx;
    SuperElem<C> det_d = det_even(m.d, ctx);
    if (det_d.reduced().is_zero()) throw AlgebraError("berezinian: odd-odd block is not invertible");
    ElemMatrix<C> schur = m.a;
    if (m.odd_size() > 0 && m.even_size() > 0) {
        auto d_inv = inverse_even(m.d, ctx);
        auto corr = mat_mul(mat_mul(m.b_blk, d_inv, ctx), m.c_blk, ctx);
        for (std::size_t i = 0; i < schur.size(); ++i)
            for (std::size_t j = 0; j < schur.size(); ++j) schur[i][j] -= corr[i][j];
    }
    return det_even(schur, ctx) * det_d.invert_unit();
}

}  // namespace supercurve
