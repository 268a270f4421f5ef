#pragma once

// Exact scalars: Gaussian rationals Q(i) and a formal-logarithm extension.

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace supercurve {

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Element a + b i of Q(i). Both parts are kept canonical by GMP.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(Rational re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
    GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return {Rational(0), Rational(1)}; }
    static GaussianRational frac(long num, long den) { return Rational(num, den); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational operator-() const { return {-re_, -im_}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        if (sgn(o.im_) != 0) im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        if (sgn(o.im_) != 0) im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        if (sgn(im_) == 0 && sgn(o.im_) == 0) {
            re_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw AlgebraError("GaussianRational: division by zero");
        if (sgn(im_) == 0 && sgn(o.im_) == 0) {
            re_ /= o.re_;
            return *this;
        }
        Rational n = o.norm();
        Rational r = (re_ * o.re_ + im_ * o.im_) / n;
        Rational m = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }

    GaussianRational inverse() const {
        GaussianRational one(1);
        one /= *this;
        return one;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend std::strong_ordering operator<=>(const GaussianRational& a, const GaussianRational& b) {
        int c = cmp(a.re_, b.re_);
        if (c == 0) c = cmp(a.im_, b.im_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    /// Renders as "a", "bi", "a+bi" or "a-bi"; unit imaginary coefficients print as "i".
    std::string str() const {
        if (sgn(im_) == 0) return re_.get_str();
        std::string imag;
        Rational mag = abs(im_);
        imag = (mag == 1) ? "i" : mag.get_str() + "i";
        if (sgn(re_) == 0) return (sgn(im_) < 0 ? "-" : "") + imag;
        return re_.get_str() + (sgn(im_) < 0 ? "-" : "+") + imag;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& g) { return os << g.str(); }

using Scalar = GaussianRational;

/// Gaussian integer with big-integer parts; used as the key of Log symbols.
struct GaussianInteger {
    Integer re{0};
    Integer im{0};

    Integer norm() const { return re * re + im * im; }
    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

    friend GaussianInteger operator*(const GaussianInteger& a, const GaussianInteger& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const GaussianInteger& a, const GaussianInteger& b) {
        return a.re == b.re && a.im == b.im;
    }

    /// Exact division; returns false if b does not divide a.
    static bool divides(const GaussianInteger& a, const GaussianInteger& b, GaussianInteger& quotient) {
        // a / b = a * conj(b) / N(b)
        Integer n = b.norm();
        Integer r = a.re * b.re + a.im * b.im;
        Integer m = a.im * b.re - a.re * b.im;
        if (!mpz_divisible_p(r.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(m.get_mpz_t(), n.get_mpz_t()))
            return false;
        quotient.re = r / n;
        quotient.im = m / n;
        return true;
    }

    std::string str() const { return GaussianRational(Rational(re), Rational(im)).str(); }
};

/// Order on normalized primes: by norm, then real part, then imaginary part.
struct GaussianPrimeLess {
    bool operator()(const GaussianInteger& a, const GaussianInteger& b) const {
        Integer na = a.norm(), nb = b.norm();
        if (na != nb) return na < nb;
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    }
};

namespace detail {

/// First-quadrant associate: re > 0, im >= 0. Returns the power k with g = i^k * result.
inline std::pair<GaussianInteger, int> first_quadrant_associate(GaussianInteger g) {
    int k = 0;
    // Multiplying by -i rotates clockwise; g = i^k * result after the loop.
    while (!(sgn(g.re) > 0 && sgn(g.im) >= 0)) {
        g = GaussianInteger{g.im, -g.re};
        ++k;
        if (k > 4) throw AlgebraError("first_quadrant_associate: zero input");
    }
    return {g, k % 4};
}

inline std::vector<Integer> rational_prime_factors(Integer n) {
    std::vector<Integer> out;
    if (n < 0) n = -n;
    for (Integer p = 2; p * p <= n; ++p) {
        if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            out.push_back(p);
            while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// Normalized Gaussian primes lying over the rational prime p.
inline std::vector<GaussianInteger> gaussian_primes_over(const Integer& p) {
    if (p == 2) return {GaussianInteger{1, 1}};
    Integer r = p % 4;
    if (r == 3) return {GaussianInteger{p, 0}};
    for (Integer a = 1; a * a < p; ++a) {
        Integer b2 = p - a * a;
        if (mpz_perfect_square_p(b2.get_mpz_t())) {
            Integer b = sqrt(b2);
            auto p1 = first_quadrant_associate(GaussianInteger{a, b}).first;
            auto p2 = first_quadrant_associate(GaussianInteger{a, -b}).first;
            if (GaussianPrimeLess{}(p2, p1)) std::swap(p1, p2);
            return {p1, p2};
        }
    }
    throw AlgebraError("gaussian_primes_over: no decomposition found");
}

/// Factor a nonzero Gaussian integer: g = i^unit * prod(prime^e).
inline int factor_gaussian(GaussianInteger g, std::map<GaussianInteger, long, GaussianPrimeLess>& exps,
                           long sign) {
    if (g.is_zero()) throw AlgebraError("factor_gaussian: zero");
    for (const auto& p : rational_prime_factors(g.norm())) {
        for (const auto& pi : gaussian_primes_over(p)) {
            GaussianInteger q;
            while (GaussianInteger::divides(g, pi, q)) {
                g = q;
                exps[pi] += sign;
            }
        }
    }
    // g is a unit now.
    if (g.re == 1) return 0;
    if (g.im == 1) return 1;
    if (g.re == -1) return 2;
    if (g.im == -1) return 3;
    throw AlgebraError("factor_gaussian: residual is not a unit");
}

}  // namespace detail

/// Exact element of Q(i) + Q(i)*IPI + sum Q(i)*Log(pi) with pi normalized Gaussian primes.
class LogScalar {
public:
    using LogTerms = std::map<GaussianInteger, Scalar, GaussianPrimeLess>;

    LogScalar() = default;
    LogScalar(Scalar rational_part) : rational_(std::move(rational_part)) {}  // NOLINT

    static LogScalar ipi(Scalar coeff = Scalar(1)) {
        LogScalar s;
        s.pi_i_ = std::move(coeff);
        return s;
    }

    const Scalar& rational_part() const { return rational_; }
    const Scalar& pi_i_coeff() const { return pi_i_; }
    const LogTerms& log_terms() const { return logs_; }

    bool is_zero() const { return rational_.is_zero() && pi_i_.is_zero() && logs_.empty(); }
    bool has_logs() const { return !logs_.empty() || !pi_i_.is_zero(); }

    LogScalar& operator+=(const LogScalar& o) {
        rational_ += o.rational_;
        pi_i_ += o.pi_i_;
        for (const auto& [p, c] : o.logs_) add_log(p, c);
        return *this;
    }
    LogScalar& operator-=(const LogScalar& o) { return *this += -o; }
    LogScalar operator-() const { return scaled(Scalar(-1)); }

    LogScalar scaled(const Scalar& c) const {
        LogScalar r;
        if (c.is_zero()) return r;
        r.rational_ = rational_ * c;
        r.pi_i_ = pi_i_ * c;
        for (const auto& [p, v] : logs_) r.logs_.emplace(p, v * c);
        return r;
    }

    void add_log(const GaussianInteger& prime, const Scalar& c) {
        auto [it, inserted] = logs_.emplace(prime, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) logs_.erase(it);
        } else if (it->second.is_zero()) {
            logs_.erase(it);
        }
    }

    friend LogScalar operator+(LogScalar a, const LogScalar& b) { return a += b; }
    friend LogScalar operator-(LogScalar a, const LogScalar& b) { return a -= b; }
    friend LogScalar operator*(const Scalar& c, const LogScalar& a) { return a.scaled(c); }

    friend bool operator==(const LogScalar& a, const LogScalar& b) {
        if (!(a.rational_ == b.rational_) || !(a.pi_i_ == b.pi_i_) || a.logs_.size() != b.logs_.size())
            return false;
        auto it = b.logs_.begin();
        for (const auto& [p, c] : a.logs_) {
            if (!(p == it->first) || !(c == it->second)) return false;
            ++it;
        }
        return true;
    }

    /// Normalized symbolic form, e.g. "1/2+(2)*IPI+(-1)*Log(1+i)".
    std::string str() const {
        std::vector<std::string> parts;
        if (!rational_.is_zero()) parts.push_back(rational_.str());
        if (!pi_i_.is_zero()) parts.push_back("(" + pi_i_.str() + ")*IPI");
        for (const auto& [p, c] : logs_) parts.push_back("(" + c.str() + ")*Log(" + p.str() + ")");
        if (parts.empty()) return "0";
        std::string out = parts[0];
        for (std::size_t k = 1; k < parts.size(); ++k) out += "+" + parts[k];
        return out;
    }

private:
    Scalar rational_{0};
    Scalar pi_i_{0};
    LogTerms logs_;
};

inline std::ostream& operator<<(std::ostream& os, const LogScalar& s) { return os << s.str(); }

/// Branch: units i^k contribute k*IPI/2 with k in {-1,0,1,2}; the rest is factored into
/// first-quadrant Gaussian primes.
inline LogScalar formal_log(const Scalar& c) {
    if (c.is_zero()) throw AlgebraError("formal_log: logarithm of zero");
    // c = (p + q i) / d with d a positive integer.
    Integer d = lcm(c.re().get_den(), c.im().get_den());
    GaussianInteger num{c.re().get_num() * (d / c.re().get_den()), c.im().get_num() * (d / c.im().get_den())};
    std::map<GaussianInteger, long, GaussianPrimeLess> exps;
    int unit = detail::factor_gaussian(num, exps, +1);
    if (d != 1) unit -= detail::factor_gaussian(GaussianInteger{d, 0}, exps, -1);
    unit = ((unit % 4) + 4) % 4;
    if (unit == 3) unit = -1;
    LogScalar out;
    if (unit != 0) out = LogScalar::ipi(Scalar::frac(unit, 2));
    for (const auto& [p, e] : exps)
        if (e != 0) out.add_log(p, Scalar(e));
    return out;
}

}  // namespace supercurve
