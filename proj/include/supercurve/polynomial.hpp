#pragma once

// Univariate polynomials and rational functions in z over Q(i), and truncated
// Laurent series at points of the projective line.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supercurve/scalars.hpp"

namespace supercurve {

class Polynomial {
public:
    Polynomial() = default;
    Polynomial(Scalar c) {  // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) c_.push_back(std::move(c));
    }
    explicit Polynomial(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial z() { return Polynomial(std::vector<Scalar>{Scalar(0), Scalar(1)}); }
    static Polynomial monomial(const Scalar& c, int degree) {
        std::vector<Scalar> v(static_cast<std::size_t>(degree) + 1, Scalar(0));
        v.back() = c;
        return Polynomial(std::move(v));
    }
    /// (z - a)
    static Polynomial linear(const Scalar& a) { return Polynomial(std::vector<Scalar>{-a, Scalar(1)}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Scalar>& coeffs() const { return c_; }
    Scalar coeff(int k) const { return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Scalar(0); }
    const Scalar& lead() const { return c_.back(); }
    bool is_constant() const { return c_.size() <= 1; }

    Polynomial operator-() const {
        Polynomial r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Scalar(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Scalar(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, Scalar(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(r));
    }
    Polynomial scaled(const Scalar& s) const {
        if (s.is_zero()) return {};
        Polynomial r = *this;
        for (auto& x : r.c_) x *= s;
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    /// Quotient and remainder.
    static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
        if (b.is_zero()) throw AlgebraError("Polynomial: division by zero polynomial");
        if (a.degree() < b.degree()) return {Polynomial(), a};
        std::vector<Scalar> rem = a.c_;
        std::vector<Scalar> quo(a.c_.size() - b.c_.size() + 1, Scalar(0));
        Scalar inv = b.lead().inverse();
        for (int k = a.degree() - b.degree(); k >= 0; --k) {
            Scalar q = rem[static_cast<std::size_t>(k + b.degree())] * inv;
            if (q.is_zero()) continue;
            for (int j = 0; j <= b.degree(); ++j) rem[static_cast<std::size_t>(k + j)] -= q * b.c_[static_cast<std::size_t>(j)];
            quo[static_cast<std::size_t>(k)] = std::move(q);
        }
        return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
    }

    Polynomial monic() const { return is_zero() ? *this : scaled(lead().inverse()); }

    static Polynomial gcd(Polynomial a, Polynomial b) {
        while (!b.is_zero()) {
            auto r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Scalar> r(c_.size() - 1, Scalar(0));
        for (std::size_t k = 1; k < c_.size(); ++k) r[k - 1] = c_[k] * Scalar(static_cast<long>(k));
        return Polynomial(std::move(r));
    }

    Scalar operator()(const Scalar& x) const {
        Scalar acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc *= x;
            acc += *it;
        }
        return acc;
    }

    /// p(a + t) as a polynomial in t.
    Polynomial taylor_shift(const Scalar& a) const {
        std::vector<Scalar> r = c_;
        if (a.is_zero()) return *this;
        const int n = static_cast<int>(r.size());
        for (int i = 0; i < n; ++i)
            for (int j = n - 2; j >= i; --j) r[static_cast<std::size_t>(j)] += a * r[static_cast<std::size_t>(j + 1)];
        return Polynomial(std::move(r));
    }

    /// Coefficients reversed at the given length: t^len * p(1/t).
    Polynomial reversed() const {
        std::vector<Scalar> r(c_.rbegin(), c_.rend());
        return Polynomial(std::move(r));
    }

    /// Multiplicity of the root a.
    int root_multiplicity(const Scalar& a) const {
        if (is_zero()) throw AlgebraError("root_multiplicity of zero polynomial");
        Polynomial s = taylor_shift(a);
        int k = 0;
        while (s.coeff(k).is_zero()) ++k;
        return k;
    }

    std::string str(const std::string& var = "z") const {
        if (is_zero()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            const Scalar& c = c_[static_cast<std::size_t>(k)];
            if (c.is_zero()) continue;
            std::string cs = c.is_real() ? c.str() : "(" + c.str() + ")";
            std::string term;
            if (k == 0) {
                term = cs;
            } else {
                std::string mon = var + (k > 1 ? "^" + std::to_string(k) : "");
                if (c.is_one()) term = mon;
                else if (c == Scalar(-1)) term = "-" + mon;
                else term = cs + "*" + mon;
            }
            if (!out.empty() && term[0] != '-') out += "+";
            out += term;
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<Scalar> c_;
};

/// A point of P^1 with coordinate in Q(i), or the point at infinity.
class PointP1 {
public:
    PointP1() = default;
    PointP1(Scalar a) : finite_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
    PointP1(long a) : finite_(Scalar(a)) {}        // NOLINT(google-explicit-constructor)
    static PointP1 infinity() {
        PointP1 p;
        p.finite_.reset();
        return p;
    }
    bool is_infinity() const { return !finite_.has_value(); }
    const Scalar& value() const {
        if (!finite_) throw AlgebraError("PointP1: infinity has no finite coordinate");
        return *finite_;
    }
    friend bool operator==(const PointP1& a, const PointP1& b) { return a.finite_ == b.finite_; }
    /// Finite points ordered by coordinate; infinity last.
    friend bool operator<(const PointP1& a, const PointP1& b) {
        if (a.is_infinity()) return false;
        if (b.is_infinity()) return true;
        return *a.finite_ < *b.finite_;
    }
    std::string str() const { return finite_ ? finite_->str() : "inf"; }

private:
    std::optional<Scalar> finite_{Scalar(0)};
};

/// Truncated Laurent series sum_{n < prec} c_n t^n; coefficients below `start` vanish.
struct LaurentSeries {
    /// Precision of exact (non-truncated) data.
    static constexpr int kExact = 1 << 28;

    int start = kExact;
    std::vector<Scalar> c;  // exponents start .. start + c.size() - 1
    int prec = kExact;      // exclusive bound of known exponents

    LaurentSeries() = default;
    LaurentSeries(Scalar a) : start(0), c{std::move(a)} { normalize(); }  // NOLINT(google-explicit-constructor)
    LaurentSeries(int start_, std::vector<Scalar> coeffs, int prec_) : start(start_), c(std::move(coeffs)), prec(prec_) {}

    static LaurentSeries zero(int prec) { return {prec, {}, prec}; }
    static LaurentSeries monomial(const Scalar& a, int exponent, int prec) {
        LaurentSeries s{exponent, {}, prec};
        if (exponent < prec) s.c.push_back(a);
        s.normalize();
        return s;
    }

    int end() const { return start + static_cast<int>(c.size()); }

    Scalar coeff(int n) const {
        if (n >= prec) throw AlgebraError("LaurentSeries: coefficient beyond truncation order");
        if (n < start || n >= end()) return Scalar(0);
        return c[static_cast<std::size_t>(n - start)];
    }

    /// Exponent of the first nonzero coefficient, or prec if none is known.
    int valuation() const {
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!c[k].is_zero()) return start + static_cast<int>(k);
        return prec;
    }

    bool known_zero() const { return valuation() >= prec; }
    /// Exactly zero (no truncation).
    bool is_zero() const { return c.empty() && prec >= kExact; }
    bool is_one() const { return start == 0 && c.size() == 1 && c[0].is_one() && prec >= kExact; }
    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
        return a.prec == b.prec && a.c == b.c && (a.c.empty() || a.start == b.start);
    }
    std::string str(const std::string& var = "t") const {
        std::string out;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k].is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += "(" + c[k].str() + ")*" + var + "^" + std::to_string(start + static_cast<int>(k));
        }
        if (prec < kExact) out += (out.empty() ? "" : " + ") + std::string("O(") + var + "^" + std::to_string(prec) + ")";
        return out.empty() ? "0" : out;
    }

    void normalize() {
        if (end() > prec) c.resize(static_cast<std::size_t>(std::max(0, prec - start)));
        std::size_t lead = 0;
        while (lead < c.size() && c[lead].is_zero()) ++lead;
        if (lead == c.size()) {
            c.clear();
            start = prec;
            return;
        }
        if (lead > 0) {
            c.erase(c.begin(), c.begin() + static_cast<long>(lead));
            start += static_cast<int>(lead);
        }
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    LaurentSeries& operator+=(const LaurentSeries& o) {
        int p = std::min(prec, o.prec);
        int lo = std::min(start, o.start);
        int hi = std::max(end(), o.end());
        hi = std::min(hi, p);
        std::vector<Scalar> r(static_cast<std::size_t>(std::max(0, hi - lo)), Scalar(0));
        for (int n = lo; n < hi; ++n) {
            Scalar v(0);
            if (n >= start && n < end()) v += c[static_cast<std::size_t>(n - start)];
            if (n >= o.start && n < o.end()) v += o.c[static_cast<std::size_t>(n - o.start)];
            r[static_cast<std::size_t>(n - lo)] = std::move(v);
        }
        start = lo;
        c = std::move(r);
        prec = p;
        normalize();
        return *this;
    }
    LaurentSeries scaled(const Scalar& s) const {
        LaurentSeries r = *this;
        for (auto& x : r.c) x *= s;
        r.normalize();
        return r;
    }
    LaurentSeries operator-() const { return scaled(Scalar(-1)); }
    friend LaurentSeries operator+(LaurentSeries a, const LaurentSeries& b) { return a += b; }
    friend LaurentSeries operator-(LaurentSeries a, const LaurentSeries& b) { return a += -b; }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        if (a.is_zero() || b.is_zero()) return {};
        int va = a.valuation(), vb = b.valuation();
        const bool ea = a.prec >= kExact, eb = b.prec >= kExact;
        int p = kExact;
        if (!ea) p = std::min(p, a.prec + vb);
        if (!eb) p = std::min(p, b.prec + va);
        if (a.known_zero() || b.known_zero()) return {p, {}, p};
        LaurentSeries r{va + vb, {}, p};
        int n_terms = std::max(0, std::min(p, a.end() + b.end()) - (va + vb));
        r.c.assign(static_cast<std::size_t>(n_terms), Scalar(0));
        for (int i = va; i < a.end(); ++i) {
            const Scalar& x = a.c[static_cast<std::size_t>(i - a.start)];
            if (x.is_zero()) continue;
            for (int j = vb; j < b.end() && i + j < p; ++j) {
                const Scalar& y = b.c[static_cast<std::size_t>(j - b.start)];
                if (y.is_zero()) continue;
                r.c[static_cast<std::size_t>(i + j - r.start)] += x * y;
            }
        }
        r.normalize();
        return r;
    }

    /// d/dt
    LaurentSeries derivative() const {
        LaurentSeries r{start - 1, {}, prec >= kExact ? kExact : prec - 1};
        r.c.reserve(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) r.c.push_back(c[k] * Scalar(start + static_cast<long>(k)));
        r.normalize();
        return r;
    }

    /// Series with truncation lowered to `p`.
    LaurentSeries truncated(int p) const {
        LaurentSeries r = *this;
        r.prec = std::min(prec, p);
        r.normalize();
        return r;
    }
};

/// Exact p/q with q monic and gcd(p, q) = 1.
class RationalFunction {
public:
    RationalFunction() : num_(), den_(Scalar(1)) {}
    RationalFunction(Scalar c) : num_(std::move(c)), den_(Scalar(1)) {}          // NOLINT
    RationalFunction(long c) : num_(Scalar(c)), den_(Scalar(1)) {}               // NOLINT
    RationalFunction(Polynomial p) : num_(std::move(p)), den_(Scalar(1)) {}      // NOLINT
    RationalFunction(Polynomial p, Polynomial q) : num_(std::move(p)), den_(std::move(q)) { reduce(); }

    static RationalFunction z() { return RationalFunction(Polynomial::z()); }
    /// (z - a)^k for any integer k.
    static RationalFunction power_at(const Scalar& a, int k) {
        Polynomial base = Polynomial::linear(a);
        Polynomial p(Scalar(1));
        for (int i = 0; i < std::abs(k); ++i) p = p * base;
        return k >= 0 ? RationalFunction(p) : RationalFunction(Polynomial(Scalar(1)), p, true);
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }
    bool is_constant() const { return den_.degree() == 0 && num_.degree() <= 0; }
    Scalar constant_value() const { return num_.coeff(0); }

    RationalFunction operator-() const { return RationalFunction(-num_, den_, true); }
    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
        return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.is_constant()) return RationalFunction(b.num_.scaled(a.constant_value()), b.den_, true);
        if (b.is_constant()) return RationalFunction(a.num_.scaled(b.constant_value()), a.den_, true);
        return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
        if (b.is_zero()) throw AlgebraError("RationalFunction: division by zero");
        return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
    }
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
    RationalFunction scaled(const Scalar& s) const {
        if (s.is_zero()) return {};
        return RationalFunction(num_.scaled(s), den_, true);
    }
    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    RationalFunction derivative() const {
        if (is_polynomial()) return RationalFunction(num_.derivative());
        return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    /// Value at a finite point where the function is regular.
    Scalar operator()(const Scalar& x) const {
        Scalar d = den_(x);
        if (d.is_zero()) throw AlgebraError("RationalFunction: evaluation at a pole");
        return num_(x) / d;
    }

    /// Order of vanishing at P (negative for poles); at infinity in the parameter 1/z.
    int order_at(const PointP1& p) const {
        if (is_zero()) throw AlgebraError("order_at: zero function");
        if (p.is_infinity()) return den_.degree() - num_.degree();
        return num_.root_multiplicity(p.value()) - den_.root_multiplicity(p.value());
    }

    /// Laurent expansion in t = z - P (or t = 1/z at infinity), exponents < prec.
    LaurentSeries laurent(const PointP1& p, int prec) const {
        if (is_zero()) return LaurentSeries();
        Polynomial a, b;
        int shift = 0;
        if (p.is_infinity()) {
            a = num_.reversed();
            b = den_.reversed();
            shift = den_.degree() - num_.degree();
        } else {
            a = num_.taylor_shift(p.value());
            b = den_.taylor_shift(p.value());
            int va = 0, vb = 0;
            while (a.coeff(va).is_zero()) ++va;
            while (b.coeff(vb).is_zero()) ++vb;
            std::vector<Scalar> ac(a.coeffs().begin() + va, a.coeffs().end());
            std::vector<Scalar> bc(b.coeffs().begin() + vb, b.coeffs().end());
            a = Polynomial(std::move(ac));
            b = Polynomial(std::move(bc));
            shift = va - vb;
        }
        LaurentSeries s{shift, {}, prec};
        int n = prec - shift;
        if (n <= 0) {
            s.start = prec;
            return s;
        }
        // power-series division a / b with b(0) != 0
        Scalar inv = b.coeff(0).inverse();
        s.c.assign(static_cast<std::size_t>(n), Scalar(0));
        for (int k = 0; k < n; ++k) {
            Scalar acc = a.coeff(k);
            for (int j = 1; j <= std::min(k, b.degree()); ++j) acc -= b.coeff(j) * s.c[static_cast<std::size_t>(k - j)];
            s.c[static_cast<std::size_t>(k)] = acc * inv;
        }
        s.normalize();
        return s;
    }

    /// Residue of the one-form f dz at P; at infinity uses dz = -w^{-2} dw.
    Scalar residue(const PointP1& p) const {
        if (is_zero()) return Scalar(0);
        if (p.is_infinity()) {
            // -coeff of z^{-1} at infinity = -coeff of w^{1} in the w-expansion
            return -laurent(p, 2).coeff(1);
        }
        if (den_.root_multiplicity(p.value()) == 0) return Scalar(0);
        return laurent(p, 0).coeff(-1);
    }

    /// Finite poles as distinct roots of the denominator, found over Q(i) from the data points
    /// supplied by the caller; returns the candidates that are genuine poles.
    std::vector<Scalar> poles_among(const std::vector<Scalar>& candidates) const {
        std::vector<Scalar> out;
        for (const auto& a : candidates)
            if (den_(a).is_zero()) out.push_back(a);
        return out;
    }

    std::string str() const {
        if (is_polynomial()) return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

private:
    RationalFunction(Polynomial p, Polynomial q, bool /*already_reduced*/) : num_(std::move(p)), den_(std::move(q)) {
        if (num_.is_zero()) den_ = Polynomial(Scalar(1));
    }
    void reduce() {
        if (den_.is_zero()) throw AlgebraError("RationalFunction: zero denominator");
        if (num_.is_zero()) {
            den_ = Polynomial(Scalar(1));
            return;
        }
        if (den_.degree() > 0 && num_.degree() > 0) {
            Polynomial g = Polynomial::gcd(num_, den_);
            if (g.degree() > 0) {
                num_ = Polynomial::divmod(num_, g).first;
                den_ = Polynomial::divmod(den_, g).first;
            }
        }
        Scalar l = den_.lead();
        if (!l.is_one()) {
            Scalar inv = l.inverse();
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }
    Polynomial num_;
    Polynomial den_;
};

}  // namespace supercurve
