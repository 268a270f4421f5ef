#pragma once

// Berezinian sections and their residues, local automorphisms of the trivial family and the
// change-of-variables law, differential operators with values in one-forms, lifts of Berezinian
// sections to such operators and their evaluation on logarithms.

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "supercurve/superfunction.hpp"
#include "supercurve/superlinalg.hpp"

namespace supercurve {

// ---------------------------------------------------------------------------
// Berezinian sections
// ---------------------------------------------------------------------------

/// omega = h [dz d/dtheta_1 ... d/dtheta_q]
struct BerSection {
    SuperRationalFunction h;
};

/// Berezin integral of h followed by the residue of the resulting dz-form.
inline SuperElement residue(const BerSection& w, const PointP1& p) { return residue_dz(w.h.berezin_top(), p); }

// ---------------------------------------------------------------------------
// Local automorphisms
// ---------------------------------------------------------------------------

class LocalAutomorphism;

/// The operator f -> mu * alpha(f) for an automorphism alpha and an even multiplier mu.
/// alpha(b theta_S u(z)) = b alpha(theta_S) sum_j u^(j)(z) nu^j / j!  with nu = alpha(z) - z.
class LocalOperator {
public:
    LocalOperator(SuperRationalFunction mu, const LocalAutomorphism& alpha);

    SuperRationalFunction apply(const SuperRationalFunction& f) const {
        SuperRationalFunction r(ctx_);
        for (int k = 0; k < f.size(); ++k) {
            if (f[k].is_zero()) continue;
            RationalFunction u = f[k];
            const auto& e = terms(k);
            for (std::size_t j = 0; j < e.size(); ++j) {
                if (j > 0) u = u.derivative();
                if (u.is_zero()) break;
                if (!e[j].is_zero()) r += e[j].scaled(u);
            }
        }
        return r;
    }

    /// E_{k,j} = mu * basis_k(alpha) * nu^j / j!; the component index k encodes (b, S).
    const std::vector<SuperRationalFunction>& terms(int k) const {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const SuperContext& cx = *ctx_;
        SuperRationalFunction head = mu_ * SuperRationalFunction::basis(ctx_, cx.b_of(k), 0) * theta_images_[cx.mask_of(k)];
        std::vector<SuperRationalFunction> out;
        for (const auto& n : nu_powers_) out.push_back(head * n);
        return cache_.emplace(k, std::move(out)).first->second;
    }

    const ContextPtr& context() const { return ctx_; }

private:
    ContextPtr ctx_;
    SuperRationalFunction mu_;
    std::vector<SuperRationalFunction> theta_images_;  // alpha(theta_S) per mask
    std::vector<SuperRationalFunction> nu_powers_;     // nu^j / j!
    mutable std::map<int, std::vector<SuperRationalFunction>> cache_;
};

/// A ring automorphism of Lambda (x) Q(i)(z) fixing B and reducing to the identity.
class LocalAutomorphism {
public:
    LocalAutomorphism() = default;
    LocalAutomorphism(SuperRationalFunction z_image, std::vector<SuperRationalFunction> theta_images)
        : ctx_(z_image.context()), z_(std::move(z_image)), th_(std::move(theta_images)) {
        validate();
    }

    static LocalAutomorphism identity(const ContextPtr& ctx) {
        std::vector<SuperRationalFunction> th;
        for (int i = 1; i <= ctx->q; ++i) th.push_back(SuperRationalFunction::theta(ctx, i));
        return LocalAutomorphism(srf_z(ctx), std::move(th));
    }

    const ContextPtr& context() const { return ctx_; }
    const SuperRationalFunction& z_image() const { return z_; }
    const std::vector<SuperRationalFunction>& theta_images() const { return th_; }

    bool is_identity() const { return *this == identity(ctx_); }

    /// Reduced linear part: M_ij = coefficient of theta_j in the image of theta_i.
    std::vector<std::vector<RationalFunction>> linear_part() const {
        const int q = ctx_->q;
        std::vector<std::vector<RationalFunction>> m(static_cast<std::size_t>(q), std::vector<RationalFunction>(static_cast<std::size_t>(q)));
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) m[i][j] = th_[static_cast<std::size_t>(i)].at(0, 1u << j);
        return m;
    }

    SuperRationalFunction apply(const SuperRationalFunction& f) const { return op().apply(f); }

    /// (a * b)(f) = a(b(f)).
    friend LocalAutomorphism compose(const LocalAutomorphism& a, const LocalAutomorphism& b) {
        std::vector<SuperRationalFunction> th;
        for (const auto& t : b.th_) th.push_back(a.apply(t));
        return LocalAutomorphism(a.apply(b.z_), std::move(th));
    }

    /// Inverse by fixed-point iteration along the nilpotent filtration, verified exactly.
    LocalAutomorphism inverse() const {
        const int q = ctx_->q;
        SuperRationalFunction z = srf_z(ctx_);
        SuperRationalFunction n = z_ - z;
        auto m = linear_part();
        std::vector<SuperRationalFunction> r;
        for (int i = 0; i < q; ++i) {
            SuperRationalFunction lin(ctx_);
            for (int j = 0; j < q; ++j) lin += SuperRationalFunction::theta(ctx_, j + 1).scaled(m[i][j]);
            r.push_back(th_[static_cast<std::size_t>(i)] - lin);
        }
        LocalAutomorphism beta = identity(ctx_);
        for (int iter = 0; iter < 64; ++iter) {
            SuperRationalFunction nz = z - beta.apply(n);
            ElemMatrix<RationalFunction> mb(static_cast<std::size_t>(q), std::vector<SuperRationalFunction>(static_cast<std::size_t>(q), SuperRationalFunction(ctx_)));
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) mb[i][j] = beta.apply(SuperRationalFunction(ctx_, m[i][j]));
            auto minv = inverse_even(mb, ctx_);
            std::vector<SuperRationalFunction> nt;
            for (int i = 0; i < q; ++i) {
                SuperRationalFunction acc(ctx_);
                for (int j = 0; j < q; ++j)
                    acc += minv[i][j] * (SuperRationalFunction::theta(ctx_, j + 1) - beta.apply(r[static_cast<std::size_t>(j)]));
                nt.push_back(acc);
            }
            LocalAutomorphism next;
            next.ctx_ = ctx_;
            next.z_ = std::move(nz);
            next.th_ = std::move(nt);
            if (next == beta) break;
            beta = std::move(next);
        }
        beta.validate();
        if (!compose(beta, *this).is_identity() || !compose(*this, beta).is_identity())
            throw AlgebraError("LocalAutomorphism::inverse: iteration did not converge to an inverse");
        return beta;
    }

    friend bool operator==(const LocalAutomorphism& a, const LocalAutomorphism& b) { return a.z_ == b.z_ && a.th_ == b.th_; }

    std::string str() const {
        std::string out = "z -> " + z_.str();
        for (std::size_t i = 0; i < th_.size(); ++i) out += "; theta" + std::to_string(i + 1) + " -> " + th_[i].str();
        return out;
    }

    const LocalOperator& op() const {
        if (!op_) op_ = std::make_shared<LocalOperator>(SuperRationalFunction(ctx_, RationalFunction(Scalar(1))), *this);
        return *op_;
    }

private:
    void validate() const {
        if (!ctx_) throw AlgebraError("LocalAutomorphism: missing context");
        if (static_cast<int>(th_.size()) != ctx_->q) throw AlgebraError("LocalAutomorphism: need one image per odd coordinate");
        if (z_.parity() != 0) throw AlgebraError("LocalAutomorphism: image of z is not even");
        if (!(z_.reduced() == RationalFunction::z())) throw AlgebraError("LocalAutomorphism: image of z does not reduce to z");
        for (const auto& t : th_)
            if (t.parity() != 1 || t.is_zero()) throw AlgebraError("LocalAutomorphism: image of theta is not odd");
        const int q = ctx_->q;
        if (q > 0) {
            auto m = linear_part();
            ElemMatrix<RationalFunction> em;
            auto cq = make_context(BaseAlgebra::complex(), 0);
            for (const auto& row : m) {
                std::vector<SuperElem<RationalFunction>> r;
                for (const auto& x : row) r.emplace_back(cq, x);
                em.push_back(std::move(r));
            }
            if (det_even(em, cq).reduced().is_zero()) throw AlgebraError("LocalAutomorphism: linear part is not invertible");
        }
    }

    ContextPtr ctx_;
    SuperRationalFunction z_;
    std::vector<SuperRationalFunction> th_;
    mutable std::shared_ptr<LocalOperator> op_;
};

inline LocalOperator::LocalOperator(SuperRationalFunction mu, const LocalAutomorphism& alpha)
    : ctx_(alpha.context()), mu_(std::move(mu)) {
    const int q = ctx_->q;
    const unsigned nm = 1u << q;
    theta_images_.assign(nm, SuperRationalFunction(ctx_));
    theta_images_[0] = SuperRationalFunction(ctx_, RationalFunction(Scalar(1)));
    for (unsigned s = 1; s < nm; ++s) {
        // theta_S = theta_{i1} ... theta_{ik} in increasing order; peel off the lowest index
        int low = std::countr_zero(s);
        theta_images_[s] = alpha.theta_images()[static_cast<std::size_t>(low)] * theta_images_[s & (s - 1)];
    }
    SuperRationalFunction nu = alpha.z_image() - srf_z(ctx_);
    SuperRationalFunction p(ctx_, RationalFunction(Scalar(1)));
    for (long j = 0; j < 64 && !p.is_zero(); ++j) {
        nu_powers_.push_back(p);
        p = (p * nu).scaled(RationalFunction(Scalar::frac(1, j + 1)));
    }
}

// ---------------------------------------------------------------------------
// Super Jacobian and change of variables
// ---------------------------------------------------------------------------

/// Right derivative f <- d/dtheta_i, for homogeneous f: (-1)^(|f|+1) times the left derivative.
inline SuperRationalFunction right_theta_derivative(const SuperRationalFunction& f, int i) {
    SuperRationalFunction r(f.context());
    for (int par = 0; par < 2; ++par) {
        SuperRationalFunction d = f.part(par).theta_derivative(i);
        r += par == 0 ? -d : d;
    }
    return r;
}

/// Rows (w, eta_1..eta_q), columns (z, theta_1..theta_q); theta-columns use right derivatives.
inline SuperMatrix<RationalFunction> super_jacobian(const LocalAutomorphism& s) {
    const auto& ctx = s.context();
    const int q = ctx->q;
    SuperMatrix<RationalFunction> m{ctx, {}, {}, {}, {}};
    m.a = {{z_derivative(s.z_image())}};
    m.b_blk.assign(1, {});
    for (int j = 1; j <= q; ++j) m.b_blk[0].push_back(right_theta_derivative(s.z_image(), j));
    for (int i = 0; i < q; ++i) {
        const auto& eta = s.theta_images()[static_cast<std::size_t>(i)];
        m.c_blk.push_back({z_derivative(eta)});
        std::vector<SuperRationalFunction> row;
        for (int j = 1; j <= q; ++j) row.push_back(right_theta_derivative(eta, j));
        m.d.push_back(std::move(row));
    }
    return m;
}

/// Pulls back h [dw d/deta] along sigma: (z, theta) -> (w, eta).
inline BerSection change_of_variables(const BerSection& w, const LocalAutomorphism& sigma) {
    SuperRationalFunction ber = berezinian(super_jacobian(sigma));
    if (ber.reduced().is_zero()) throw AlgebraError("change_of_variables: Jacobian is not invertible");
    return {sigma.apply(w.h) * ber};
}

// ---------------------------------------------------------------------------
// Functions with logarithmic parts
// ---------------------------------------------------------------------------

/// B-valued exact residues with symbolic logarithms: one LogScalar per basis element of B.
struct LogElement {
    std::vector<LogScalar> c;

    LogElement() = default;
    explicit LogElement(int base_dim) : c(static_cast<std::size_t>(base_dim)) {}
    static LogElement from(const SuperElement& e) {
        const auto& cx = e.ctx();
        LogElement r(cx.base.dim());
        for (int b = 0; b < cx.base.dim(); ++b) r.c[static_cast<std::size_t>(b)] = LogScalar(e.at(b, 0));
        return r;
    }
    bool is_zero() const {
        return std::all_of(c.begin(), c.end(), [](const LogScalar& x) { return x.is_zero(); });
    }
    bool has_logs() const {
        return std::any_of(c.begin(), c.end(), [](const LogScalar& x) { return x.has_logs(); });
    }
    LogElement& operator+=(const LogElement& o) {
        if (c.size() < o.c.size()) c.resize(o.c.size());
        for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    LogElement operator-() const {
        LogElement r = *this;
        for (auto& x : r.c) x = -x;
        return r;
    }
    friend LogElement operator+(LogElement a, const LogElement& b) { return a += b; }
    friend LogElement operator-(LogElement a, const LogElement& b) { return a += -b; }
    friend bool operator==(const LogElement& a, const LogElement& b) { return (a - b).is_zero(); }

    /// The element of B when no logarithms occur.
    SuperElement rational(const ContextPtr& ctx) const {
        if (has_logs()) throw AlgebraError("LogElement: value carries logarithms");
        SuperElement r(ctx);
        for (std::size_t b = 0; b < c.size(); ++b) r[ctx->index(static_cast<int>(b), 0)] = c[b].rational_part();
        return r;
    }

    std::string str(const BaseAlgebra& base) const {
        std::string out;
        for (std::size_t b = 0; b < c.size(); ++b) {
            if (c[b].is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += "(" + c[b].str() + ")";
            if (b != 0) out += "*" + base.name(static_cast<int>(b));
        }
        return out.empty() ? "0" : out;
    }
};

/// F = R + sum_a log(z - a) * R_a with R, R_a super rational functions.
struct LogFunction {
    SuperRationalFunction rational;
    std::map<Scalar, SuperRationalFunction> logs;

    LogFunction() = default;
    LogFunction(SuperRationalFunction r) : rational(std::move(r)) {}  // NOLINT(google-explicit-constructor)

    const ContextPtr& context() const { return rational.context(); }

    bool is_zero() const {
        if (!rational.is_zero()) return false;
        for (const auto& [a, r] : logs)
            if (!r.is_zero()) return false;
        return true;
    }
    void prune() {
        for (auto it = logs.begin(); it != logs.end();) it = it->second.is_zero() ? logs.erase(it) : std::next(it);
    }
    LogFunction& operator+=(const LogFunction& o) {
        rational += o.rational;
        for (const auto& [a, r] : o.logs) {
            auto it = logs.find(a);
            if (it == logs.end()) logs.emplace(a, r);
            else it->second += r;
        }
        prune();
        return *this;
    }
    LogFunction operator-() const {
        LogFunction r = *this;
        r.rational = -r.rational;
        for (auto& [a, x] : r.logs) x = -x;
        return r;
    }
    friend LogFunction operator+(LogFunction a, const LogFunction& b) { return a += b; }
    friend LogFunction operator-(LogFunction a, const LogFunction& b) { return a += -b; }
    friend bool operator==(const LogFunction& a, const LogFunction& b) { return (a - b).is_zero(); }

    /// F * s
    LogFunction times(const SuperRationalFunction& s) const {
        LogFunction r(rational * s);
        for (const auto& [a, x] : logs) r.logs.emplace(a, x * s);
        r.prune();
        return r;
    }
    /// s * F
    LogFunction left_times(const SuperRationalFunction& s) const {
        LogFunction r(s * rational);
        for (const auto& [a, x] : logs) r.logs.emplace(a, s * x);
        r.prune();
        return r;
    }
    LogFunction part(int par) const {
        LogFunction r(rational.part(par));
        for (const auto& [a, x] : logs) r.logs.emplace(a, x.part(par));
        r.prune();
        return r;
    }
    LogFunction z_derivative() const {
        LogFunction r(supercurve::z_derivative(rational));
        for (const auto& [a, x] : logs) {
            r.rational += x.scaled(RationalFunction::power_at(a, -1));
            r.logs.emplace(a, supercurve::z_derivative(x));
        }
        r.prune();
        return r;
    }
    LogFunction theta_derivative(int i) const {
        LogFunction r(rational.theta_derivative(i));
        for (const auto& [a, x] : logs) r.logs.emplace(a, x.theta_derivative(i));
        r.prune();
        return r;
    }
    std::vector<Scalar> branch_points() const {
        std::vector<Scalar> out;
        for (const auto& [a, x] : logs)
            if (!x.is_zero()) out.push_back(a);
        return out;
    }

    /// Residue of the theta-free part of F dz at a finite point distinct from the branch points.
    LogElement residue(const PointP1& p) const {
        const auto& cx = context()->base;
        LogElement out = LogElement::from(residue_dz(rational, p));
        if (logs.empty()) return out;
        if (p.is_infinity()) throw AlgebraError("LogFunction::residue: logarithmic coefficient at infinity");
        for (const auto& [a, x] : logs) {
            Scalar d = p.value() - a;
            if (d.is_zero()) throw AlgebraError("LogFunction::residue: point is a branch point");
            LogScalar log_d = formal_log(d);
            for (int b = 0; b < cx.dim(); ++b) {
                const RationalFunction& rb = x.at(b, 0);
                if (rb.is_zero()) continue;
                LaurentSeries s = rb.laurent(p, 0);
                LogScalar acc = log_d.scaled(s.coeff(-1));
                // log(z - a) = log(d) + sum_{n>=1} (-1)^{n+1} t^n / (n d^n)
                Scalar dn(1);
                for (int n = 1; -1 - n >= s.start; ++n) {
                    dn *= d;
                    Scalar coef = Scalar::frac(n % 2 ? 1 : -1, n) / dn;
                    acc += LogScalar(coef * s.coeff(-1 - n));
                }
                out.c[static_cast<std::size_t>(b)] += acc;
            }
        }
        return out;
    }

    std::string str() const {
        std::string out = rational.str();
        for (const auto& [a, x] : logs) out += " + log(z - (" + a.str() + "))*(" + x.str() + ")";
        return out;
    }
};

/// Polynomial part plus principal parts at the given points; the denominator must split over them.
struct PartialFractions {
    Polynomial poly;
    std::map<Scalar, std::vector<Scalar>> tails;  // tails[a][k-1] = coefficient of (z - a)^{-k}
};

inline PartialFractions partial_fractions(const RationalFunction& r, const std::vector<Scalar>& points) {
    PartialFractions pf;
    Polynomial check(Scalar(1));
    RationalFunction rest = r;
    for (const auto& a : points) {
        if (pf.tails.count(a)) continue;
        int m = r.den().root_multiplicity(a);
        if (m == 0) continue;
        for (int k = 0; k < m; ++k) check = check * Polynomial::linear(a);
        LaurentSeries s = r.laurent(PointP1(a), 0);
        std::vector<Scalar> tail(static_cast<std::size_t>(m), Scalar(0));
        for (int k = 1; k <= m; ++k) {
            tail[static_cast<std::size_t>(k - 1)] = s.coeff(-k);
            rest -= RationalFunction::power_at(a, -k).scaled(s.coeff(-k));
        }
        pf.tails.emplace(a, std::move(tail));
    }
    if (!(check == r.den())) throw AlgebraError("partial_fractions: denominator does not split over the given points");
    if (!rest.is_polynomial()) throw AlgebraError("partial_fractions: internal error, remainder is not polynomial");
    pf.poly = rest.num();
    return pf;
}

/// An antiderivative: rational part plus log coefficients (the residues).
inline std::pair<RationalFunction, std::map<Scalar, Scalar>> antiderivative(const RationalFunction& r, const std::vector<Scalar>& points) {
    PartialFractions pf = partial_fractions(r, points);
    std::vector<Scalar> ic(static_cast<std::size_t>(pf.poly.degree() + 2), Scalar(0));
    for (int k = 0; k <= pf.poly.degree(); ++k) ic[static_cast<std::size_t>(k + 1)] = pf.poly.coeff(k) / Scalar(k + 1);
    RationalFunction out{Polynomial(std::move(ic))};
    std::map<Scalar, Scalar> logs;
    for (const auto& [a, tail] : pf.tails) {
        for (std::size_t k = 2; k <= tail.size(); ++k)
            out += RationalFunction::power_at(a, 1 - static_cast<int>(k)).scaled(tail[k - 1] / Scalar(1 - static_cast<long>(k)));
        if (!tail[0].is_zero()) logs.emplace(a, tail[0]);
    }
    return {out, logs};
}

inline LogFunction antiderivative(const SuperRationalFunction& f, const std::vector<Scalar>& points) {
    LogFunction out{SuperRationalFunction(f.context())};
    for (int k = 0; k < f.size(); ++k) {
        if (f[k].is_zero()) continue;
        auto [rat, logs] = antiderivative(f[k], points);
        out.rational[k] = rat;
        for (const auto& [a, c] : logs) {
            auto it = out.logs.try_emplace(a, SuperRationalFunction(f.context())).first;
            it->second[k] = RationalFunction(c);
        }
    }
    return out;
}

/// A one-form dz * a + sum_j dtheta_j * b_j.
struct OneForm {
    LogFunction dz;
    std::vector<LogFunction> dtheta;

    static OneForm zero(const ContextPtr& ctx) {
        return {LogFunction(SuperRationalFunction(ctx)), std::vector<LogFunction>(static_cast<std::size_t>(ctx->q), LogFunction(SuperRationalFunction(ctx)))};
    }
    LogFunction& component(int target) { return target == 0 ? dz : dtheta[static_cast<std::size_t>(target - 1)]; }
    bool is_zero() const {
        return dz.is_zero() && std::all_of(dtheta.begin(), dtheta.end(), [](const LogFunction& x) { return x.is_zero(); });
    }
    OneForm& operator+=(const OneForm& o) {
        dz += o.dz;
        for (std::size_t j = 0; j < dtheta.size(); ++j) dtheta[j] += o.dtheta[j];
        return *this;
    }
    friend OneForm operator-(OneForm a, const OneForm& b) {
        a.dz += -b.dz;
        for (std::size_t j = 0; j < a.dtheta.size(); ++j) a.dtheta[j] += -b.dtheta[j];
        return a;
    }

    /// d(alpha) = 0: d/dtheta_j a = d/dz b_j and d/dtheta_i b_j + d/dtheta_j b_i = 0.
    bool is_closed() const {
        const int q = static_cast<int>(dtheta.size());
        for (int j = 1; j <= q; ++j)
            if (!(dz.theta_derivative(j) == dtheta[static_cast<std::size_t>(j - 1)].z_derivative())) return false;
        for (int i = 1; i <= q; ++i)
            for (int j = i; j <= q; ++j)
                if (!(dtheta[static_cast<std::size_t>(j - 1)].theta_derivative(i) + dtheta[static_cast<std::size_t>(i - 1)].theta_derivative(j)).is_zero())
                    return false;
        return true;
    }

    /// Residue of a closed form: that of the theta-free part of the dz coefficient.
    LogElement residue(const PointP1& p) const { return dz.residue(p); }
};

// ---------------------------------------------------------------------------
// Differential operators
// ---------------------------------------------------------------------------

/// d/dtheta_j composed on the left of d/dtheta_T (T in increasing order, largest applied first):
/// returns the sign and the merged mask, or sign 0 when j is in T.
inline std::pair<int, unsigned> prepend_theta(int j, unsigned t) {
    const unsigned bit = 1u << (j - 1);
    if (t & bit) return {0, t};
    int before = std::popcount(t & (bit - 1));
    return {before % 2 ? -1 : 1, t | bit};
}

/// d/dtheta_T applied to f.
inline SuperRationalFunction apply_theta_derivs(SuperRationalFunction f, unsigned t, int q) {
    for (int i = q; i >= 1; --i)
        if (t >> (i - 1) & 1) f = f.theta_derivative(i);
    return f;
}

/// Sum of terms coeff * d^k/dz^k d/dtheta_T placed in a target component (0 = dz, j = dtheta_j,
/// -1 = function-valued).
class DifferentialOperator {
public:
    struct Key {
        int target;
        int z_order;
        unsigned theta_mask;
        auto operator<=>(const Key&) const = default;
    };

    explicit DifferentialOperator(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    const ContextPtr& context() const { return ctx_; }
    const std::map<Key, LogFunction>& terms() const { return terms_; }

    void add(int target, int z_order, unsigned theta_mask, const LogFunction& coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{target, z_order, theta_mask}, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    DifferentialOperator& operator+=(const DifferentialOperator& o) {
        for (const auto& [k, c] : o.terms_) add(k.target, k.z_order, k.theta_mask, c);
        return *this;
    }
    friend DifferentialOperator operator-(DifferentialOperator a, const DifferentialOperator& b) {
        for (const auto& [k, c] : b.terms_) a.add(k.target, k.z_order, k.theta_mask, -c);
        return a;
    }

    bool is_one_form_valued() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.target >= 0; });
    }
    int z_order() const {
        int m = 0;
        for (const auto& [k, c] : terms_) m = std::max(m, k.z_order);
        return m;
    }
    /// Membership in the kernel of L -> L(1).
    bool annihilates_constants() const {
        return std::none_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.z_order == 0 && t.first.theta_mask == 0; });
    }
    std::vector<Scalar> branch_points() const {
        std::vector<Scalar> out;
        for (const auto& [k, c] : terms_)
            for (const auto& a : c.branch_points())
                if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        return out;
    }

    OneForm apply(const SuperRationalFunction& g) const {
        if (!is_one_form_valued()) throw AlgebraError("DifferentialOperator::apply: operator is not one-form valued");
        OneForm out = OneForm::zero(ctx_);
        for (const auto& [k, c] : terms_) {
            SuperRationalFunction x = apply_theta_derivs(g, k.theta_mask, ctx_->q);
            for (int n = 0; n < k.z_order; ++n) x = z_derivative(x);
            out.component(k.target) += c.times(x);
        }
        return out;
    }

    /// Function-valued application (target -1 terms only).
    LogFunction apply_function(const SuperRationalFunction& g) const {
        LogFunction out{SuperRationalFunction(ctx_)};
        for (const auto& [k, c] : terms_) {
            if (k.target != -1) throw AlgebraError("apply_function: operator has one-form components");
            SuperRationalFunction x = apply_theta_derivs(g, k.theta_mask, ctx_->q);
            for (int n = 0; n < k.z_order; ++n) x = z_derivative(x);
            out += c.times(x);
        }
        return out;
    }

    /// d o V for a function-valued operator V.
    static DifferentialOperator d_compose(const DifferentialOperator& v) {
        const int q = v.ctx_->q;
        DifferentialOperator out(v.ctx_);
        for (const auto& [k, c] : v.terms_) {
            if (k.target != -1) throw AlgebraError("d_compose: operator must be function-valued");
            out.add(0, k.z_order, k.theta_mask, c.z_derivative());
            out.add(0, k.z_order + 1, k.theta_mask, c);
            for (int j = 1; j <= q; ++j) {
                out.add(j, k.z_order, k.theta_mask, c.theta_derivative(j));
                auto [sign, mask] = prepend_theta(j, k.theta_mask);
                if (sign == 0) continue;
                for (int par = 0; par < 2; ++par) {
                    LogFunction cp = c.part(par);
                    if (cp.is_zero()) continue;
                    out.add(j, k.z_order, mask, (sign * (par ? -1 : 1)) < 0 ? -cp : cp);
                }
            }
        }
        return out;
    }

    std::string str() const {
        std::string out;
        for (const auto& [k, c] : terms_) {
            if (!out.empty()) out += "\n";
            out += (k.target == 0 ? std::string("dz") : k.target < 0 ? std::string("fn") : "dtheta" + std::to_string(k.target));
            out += " * (" + c.str() + ") * Dz^" + std::to_string(k.z_order) + " * Dtheta[" + std::to_string(k.theta_mask) + "]";
        }
        return out.empty() ? "0" : out;
    }

private:
    ContextPtr ctx_;
    std::map<Key, LogFunction> terms_;
};

/// Operator g -> dz * berezin_top(h g) written as sum_T c_T d/dtheta_T by probing on theta_R.
inline DifferentialOperator berezin_operator(const SuperRationalFunction& h) {
    const auto& ctx = h.context();
    const int q = ctx->q;
    const unsigned nm = 1u << q;
    std::vector<unsigned> masks;
    for (unsigned r = 0; r < nm; ++r) masks.push_back(r);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
    std::map<unsigned, SuperRationalFunction> coeff;
    for (unsigned r : masks) {
        SuperRationalFunction th = SuperRationalFunction::basis(ctx, 0, r);
        SuperRationalFunction rest = (h * th).berezin_top();
        for (const auto& [t, c] : coeff)
            if ((t & r) == t) rest -= c * apply_theta_derivs(th, t, q);
        SuperRationalFunction self = apply_theta_derivs(th, r, q);  // +-1
        Scalar s = self.reduced().constant_value();
        coeff.emplace(r, rest.scaled(RationalFunction(s)));
    }
    DifferentialOperator op(ctx);
    for (const auto& [t, c] : coeff) op.add(0, 0, t, LogFunction(c));
    return op;
}

/// Convex-hull test: does the leftward horizontal ray from a meet the hull of the points?
inline bool ray_meets_hull(const Scalar& a, const std::vector<Scalar>& pts) {
    const Rational y0 = a.im();
    std::optional<Rational> xmin;
    auto consider = [&](const Rational& x) {
        if (!xmin || x < *xmin) xmin = x;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].im() == y0) consider(pts[i].re());
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Rational y1 = pts[i].im(), y2 = pts[j].im();
            if ((y1 - y0) * (y2 - y0) < 0) {
                Rational t = (y0 - y1) / (y2 - y1);
                consider(pts[i].re() + t * (pts[j].re() - pts[i].re()));
            }
        }
    }
    return xmin && *xmin <= a.re();
}

/// L = [dz d/dtheta] o h - d o H with H' = berezin_top(h); L(1) = 0 and pi(L) = omega.
inline DifferentialOperator lift_to_Dsharp(const BerSection& w, const std::vector<Scalar>& marked,
                                           const std::vector<Scalar>& pole_points) {
    const auto& ctx = w.h.context();
    for (const auto& u : marked)
        for (int k = 0; k < w.h.size(); ++k)
            if (!w.h[k].is_zero() && w.h[k].order_at(PointP1(u)) < 0)
                throw AlgebraError("lift_to_Dsharp: section has a pole at a marked point " + u.str());
    LogFunction big_h = antiderivative(w.h.berezin_top(), pole_points);
    for (const auto& a : big_h.branch_points())
        if (ray_meets_hull(a, marked))
            throw AlgebraError("lift_to_Dsharp: log branch cut from " + a.str() + " meets the working region");
    DifferentialOperator v(ctx);
    v.add(-1, 0, 0, big_h);
    return berezin_operator(w.h) - DifferentialOperator::d_compose(v);
}

/// L(log f) for L annihilating constants: log f = log f_red + lambda.
inline OneForm apply_to_log(const DifferentialOperator& l, const SuperRationalFunction& f) {
    if (!l.annihilates_constants()) throw AlgebraError("apply_to_log: operator does not annihilate constants");
    auto dec = log_decompose(f);
    const auto& ctx = l.context();
    SuperRationalFunction dlog_red(ctx, dec.reduced_part.derivative() / dec.reduced_part);
    OneForm out = OneForm::zero(ctx);
    for (const auto& [k, c] : l.terms()) {
        if (k.target < 0) throw AlgebraError("apply_to_log: operator is not one-form valued");
        SuperRationalFunction x = apply_theta_derivs(dec.nilpotent_log, k.theta_mask, ctx->q);
        for (int n = 0; n < k.z_order; ++n) x = z_derivative(x);
        if (k.theta_mask == 0) {
            SuperRationalFunction y = dlog_red;
            for (int n = 1; n < k.z_order; ++n) y = z_derivative(y);
            x += y;
        }
        out.component(k.target) += c.times(x);
    }
    return out;
}

}  // namespace supercurve
