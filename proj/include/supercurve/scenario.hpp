#pragma once

// Scenario files: base algebra, curve charts, bundles, divisors and a list of commands.
//
//   [base]
//   grassmann = beta1, beta2
//   even = eps:2
//   q = 1
//   [curve]
//   chart 0: z -> z + beta1*theta1*z^-2; theta1 -> z^-2*theta1
//   [bundle "L"]
//   xi 0 = z^2
//   [divisor "D"]
//   at 1 = (z - 1)
//   marked = 5
//   [run]
//   bounds = 6
//   h1 L expect 0|2

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "supercurve/divisor.hpp"

namespace supercurve {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg) : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Command {
    std::string name;
    std::string target;
    std::optional<std::string> expect;
    int line = 0;
};

struct NamedDivisor {
    CartierDivisor divisor;
    std::vector<PointP1> marked;
};

struct Scenario {
    std::string name;
    ContextPtr ctx;
    SuperCurve curve;
    std::map<std::string, BundleData> bundles;
    std::map<std::string, NamedDivisor> divisors;
    std::vector<Command> commands;
    TruncationBounds bounds;
};

namespace detail {

struct Token {
    enum Kind { Number, Ident, Op, End } kind;
    std::string text;
};

inline std::vector<Token> tokenize(const std::string& s, int line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Number, s.substr(i, j - i)});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::Ident, s.substr(i, j - i)});
            i = j;
        } else if (std::string("+-*/^()").find(ch) != std::string::npos) {
            out.push_back({Token::Op, std::string(1, ch)});
            ++i;
        } else {
            throw ParseError(line, "unexpected character '" + std::string(1, ch) + "'");
        }
    }
    out.push_back({Token::End, ""});
    return out;
}

/// Recursive-descent parser for rational expressions in z, theta_j, i and B-generators.
class ExprParser {
public:
    ExprParser(const ContextPtr& ctx, const std::string& text, int line) : ctx_(ctx), toks_(tokenize(text, line)), line_(line) {}

    SRF parse() {
        if (toks_.front().kind == Token::End) throw ParseError(line_, "empty expression");
        SRF v = expr();
        if (peek().kind != Token::End) throw ParseError(line_, "unexpected token '" + peek().text + "'");
        return v;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool accept(const std::string& op) {
        if (peek().kind == Token::Op && peek().text == op) {
            ++pos_;
            return true;
        }
        return false;
    }

    SRF expr() {
        SRF v = term();
        for (;;) {
            if (accept("+")) v += term();
            else if (accept("-")) v -= term();
            else return v;
        }
    }
    SRF term() {
        SRF v = unary();
        for (;;) {
            if (accept("*")) {
                v = v * unary();
            } else if (accept("/")) {
                SRF d = unary();
                v = v * invert(d, "/");
            } else {
                return v;
            }
        }
    }
    SRF unary() {
        if (accept("-")) return -unary();
        if (accept("+")) return unary();
        return power();
    }
    SRF power() {
        SRF base = atom();
        if (!accept("^")) return base;
        bool neg = accept("-");
        if (peek().kind != Token::Number) throw ParseError(line_, "expected integer exponent, found '" + peek().text + "'");
        long e = std::stol(toks_[pos_++].text);
        if (e > 64) throw ParseError(line_, "exponent " + std::to_string(e) + " too large");
        if (neg) base = invert(base, "^-");
        SRF r = srf_constant(ctx_, Scalar(1));
        for (long k = 0; k < e; ++k) r = r * base;
        return r;
    }
    SRF atom() {
        const Token t = peek();
        if (t.kind == Token::Number) {
            ++pos_;
            return srf_constant(ctx_, Scalar(Rational(t.text)));
        }
        if (t.kind == Token::Ident) {
            ++pos_;
            return symbol(t.text);
        }
        if (accept("(")) {
            SRF v = expr();
            if (!accept(")")) throw ParseError(line_, "expected ')', found '" + peek().text + "'");
            return v;
        }
        throw ParseError(line_, "unexpected token '" + (t.kind == Token::End ? std::string("end of line") : t.text) + "'");
    }
    SRF symbol(const std::string& s) {
        if (s == "z") return srf_z(ctx_);
        if (s == "i") return srf_constant(ctx_, Scalar::i());
        if (s.rfind("theta", 0) == 0 && s.size() > 5 && std::all_of(s.begin() + 5, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            int j = std::stoi(s.substr(5));
            if (j < 1 || j > ctx_->q) throw ParseError(line_, "odd coordinate '" + s + "' out of range (q = " + std::to_string(ctx_->q) + ")");
            return SRF::theta(ctx_, j);
        }
        int g = ctx_->base.generator_index(s);
        if (g > 0) return SRF::basis(ctx_, g, 0u);
        throw ParseError(line_, "unknown symbol '" + s + "'");
    }
    SRF invert(const SRF& d, const char* op) {
        if (!is_meromorphic_unit(d)) throw ParseError(line_, std::string("operand of '") + op + "' is not an even unit");
        return d.invert_unit();
    }

    ContextPtr ctx_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int line_;
};

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

inline PointP1 parse_point(const ContextPtr& ctx, const std::string& text, int line) {
    std::string t = trim(text);
    if (t == "inf") return PointP1::infinity();
    SRF v = ExprParser(ctx, t, line).parse();
    for (int k = 1; k < v.size(); ++k)
        if (!v[k].is_zero()) throw ParseError(line, "point '" + t + "' is not a complex number");
    if (!v[0].is_constant()) throw ParseError(line, "point '" + t + "' is not a constant");
    return PointP1(v[0].constant_value());
}

inline std::string quoted_name(const std::string& header, int line) {
    std::size_t a = header.find('"'), b = header.rfind('"');
    if (a == std::string::npos || b == a) throw ParseError(line, "section '" + header + "' needs a quoted name");
    std::string n = header.substr(a + 1, b - a - 1);
    if (n.empty() || n.find_first_of(" \t") != std::string::npos) throw ParseError(line, "invalid name '" + n + "'");
    return n;
}

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds{"h0", "h1", "h0-ber", "serre", "duality-verify", "degree", "abel", "abel-check", "effective", "residue-suite"};
    return cmds;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text, const std::string& default_name = "scenario") {
    Scenario sc;
    sc.name = default_name;
    std::vector<Generator> gens;
    int q = 1;
    bool base_done = false;
    std::string section;
    std::string current;  // bundle or divisor name
    std::map<PointP1, LocalAutomorphism> charts;
    std::map<std::string, std::map<PointP1, SRF>> bundle_xi;
    std::vector<std::string> bundle_order;

    auto ensure_base = [&](int line) {
        if (base_done) return;
        try {
            sc.ctx = make_context(BaseAlgebra(gens), q);
        } catch (const AlgebraError& e) {
            throw ParseError(line, e.what());
        }
        base_done = true;
    };

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = detail::trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(line, "unterminated section header '" + s + "'");
            std::string h = s.substr(1, s.size() - 2);
            std::string kind = detail::trim(h.substr(0, h.find(' ')));
            if (kind != "base") ensure_base(line);
            if (kind == "base" || kind == "curve" || kind == "run") {
                if (kind == "base" && base_done) throw ParseError(line, "[base] must come first");
                section = kind;
            } else if (kind == "bundle") {
                section = kind;
                current = detail::quoted_name(h, line);
                if (bundle_xi.count(current)) throw ParseError(line, "duplicate bundle '" + current + "'");
                bundle_xi[current];
                bundle_order.push_back(current);
            } else if (kind == "divisor") {
                section = kind;
                current = detail::quoted_name(h, line);
                if (sc.divisors.count(current)) throw ParseError(line, "duplicate divisor '" + current + "'");
                sc.divisors[current];
            } else {
                throw ParseError(line, "unknown section '" + kind + "'");
            }
            continue;
        }
        if (section.empty()) throw ParseError(line, "content before any section: '" + s + "'");
        if (section == "base") {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw ParseError(line, "expected key = value, found '" + s + "'");
            std::string key = detail::trim(s.substr(0, eq)), val = detail::trim(s.substr(eq + 1));
            auto check_name = [&](const std::string& n) {
                if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0])) || n == "z" || n == "i" || n == "inf" || n.rfind("theta", 0) == 0)
                    throw ParseError(line, "invalid generator name '" + n + "'");
                for (const auto& g : gens)
                    if (g.name == n) throw ParseError(line, "duplicate generator '" + n + "'");
            };
            if (key == "name") {
                sc.name = val;
            } else if (key == "q") {
                try {
                    q = std::stoi(val);
                } catch (...) {
                    throw ParseError(line, "invalid q '" + val + "'");
                }
                if (q < 0 || q > 4) throw ParseError(line, "q = " + val + " out of range");
            } else if (key == "grassmann") {
                for (const auto& n : detail::split(val, ',')) {
                    check_name(n);
                    gens.push_back({n, 1, 2});
                }
            } else if (key == "even") {
                for (const auto& item : detail::split(val, ',')) {
                    auto c = item.find(':');
                    if (c == std::string::npos) throw ParseError(line, "expected name:nilpotency, found '" + item + "'");
                    std::string n = detail::trim(item.substr(0, c));
                    check_name(n);
                    int k = 0;
                    try {
                        k = std::stoi(item.substr(c + 1));
                    } catch (...) {
                        throw ParseError(line, "invalid nilpotency in '" + item + "'");
                    }
                    if (k < 2) throw ParseError(line, "nilpotency must be at least 2 in '" + item + "'");
                    gens.push_back({n, 0, k});
                }
            } else {
                throw ParseError(line, "unknown base key '" + key + "'");
            }
        } else if (section == "curve") {
            if (s.rfind("chart", 0) != 0) throw ParseError(line, "expected 'chart <point>: ...', found '" + s + "'");
            auto colon = s.find(':');
            if (colon == std::string::npos) throw ParseError(line, "missing ':' after chart point");
            PointP1 p = detail::parse_point(sc.ctx, s.substr(5, colon - 5), line);
            if (charts.count(p)) throw ParseError(line, "duplicate chart at " + p.str());
            SRF z_img = srf_z(sc.ctx);
            std::vector<SRF> th;
            for (int j = 1; j <= sc.ctx->q; ++j) th.push_back(SRF::theta(sc.ctx, j));
            for (const auto& part : detail::split(s.substr(colon + 1), ';')) {
                auto arrow = part.find("->");
                if (arrow == std::string::npos) throw ParseError(line, "expected '<coordinate> -> <expr>', found '" + part + "'");
                std::string lhs = detail::trim(part.substr(0, arrow));
                SRF rhs = detail::ExprParser(sc.ctx, part.substr(arrow + 2), line).parse();
                if (lhs == "z") {
                    z_img = rhs;
                } else if (lhs.rfind("theta", 0) == 0 && lhs.size() > 5 && std::isdigit(static_cast<unsigned char>(lhs[5]))) {
                    int j = std::stoi(lhs.substr(5));
                    if (j < 1 || j > sc.ctx->q) throw ParseError(line, "odd coordinate '" + lhs + "' out of range");
                    th[static_cast<std::size_t>(j - 1)] = rhs;
                } else {
                    throw ParseError(line, "unknown coordinate '" + lhs + "'");
                }
            }
            try {
                charts.emplace(p, LocalAutomorphism(z_img, th));
            } catch (const AlgebraError& e) {
                throw ParseError(line, std::string("invalid chart: ") + e.what());
            }
        } else if (section == "bundle") {
            auto eq = s.find('=');
            if (s.rfind("xi", 0) != 0 || eq == std::string::npos) throw ParseError(line, "expected 'xi <point> = <expr>', found '" + s + "'");
            PointP1 p = detail::parse_point(sc.ctx, s.substr(2, eq - 2), line);
            SRF v = detail::ExprParser(sc.ctx, s.substr(eq + 1), line).parse();
            if (!is_meromorphic_unit(v)) throw ParseError(line, "multiplier at " + p.str() + " is not an even unit");
            if (!bundle_xi[current].emplace(p, v).second) throw ParseError(line, "duplicate multiplier at " + p.str());
        } else if (section == "divisor") {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw ParseError(line, "expected 'at <point> = <expr>' or 'marked = ...', found '" + s + "'");
            std::string key = detail::trim(s.substr(0, eq));
            auto& nd = sc.divisors[current];
            if (key == "marked") {
                for (const auto& t : detail::split(s.substr(eq + 1), ',')) nd.marked.push_back(detail::parse_point(sc.ctx, t, line));
            } else if (key.rfind("at", 0) == 0) {
                PointP1 p = detail::parse_point(sc.ctx, key.substr(2), line);
                SRF v = detail::ExprParser(sc.ctx, s.substr(eq + 1), line).parse();
                if (!is_meromorphic_unit(v)) throw ParseError(line, "local equation at " + p.str() + " is not an even unit");
                if (!nd.divisor.equations.emplace(p, v).second) throw ParseError(line, "duplicate local equation at " + p.str());
            } else {
                throw ParseError(line, "unknown divisor key '" + key + "'");
            }
        } else if (section == "run") {
            auto eq = s.find('=');
            if (eq != std::string::npos) {
                std::string key = detail::trim(s.substr(0, eq)), val = detail::trim(s.substr(eq + 1));
                if (key == "bounds") {
                    try {
                        sc.bounds.pole_order = std::stoi(val);
                    } catch (...) {
                        throw ParseError(line, "invalid bounds '" + val + "'");
                    }
                    if (sc.bounds.pole_order < 1) throw ParseError(line, "bounds must be positive");
                } else if (key == "extra") {
                    for (const auto& t : detail::split(val, ',')) sc.bounds.extra_points.push_back(detail::parse_point(sc.ctx, t, line));
                } else {
                    throw ParseError(line, "unknown run key '" + key + "'");
                }
                continue;
            }
            std::istringstream ws(s);
            Command c;
            c.line = line;
            ws >> c.name;
            if (std::find(detail::known_commands().begin(), detail::known_commands().end(), c.name) == detail::known_commands().end())
                throw ParseError(line, "unknown command '" + c.name + "'");
            if (!(ws >> c.target)) throw ParseError(line, "command '" + c.name + "' needs an argument");
            std::string kw;
            if (ws >> kw) {
                if (kw != "expect") throw ParseError(line, "unexpected token '" + kw + "'");
                std::string v;
                if (!(ws >> v)) throw ParseError(line, "missing value after 'expect'");
                c.expect = v;
            }
            if (ws >> kw) throw ParseError(line, "unexpected token '" + kw + "'");
            sc.commands.push_back(c);
        }
    }
    ensure_base(line);
    try {
        sc.curve = SuperCurve(sc.ctx, charts);
    } catch (const AlgebraError& e) {
        throw ParseError(line, e.what());
    }
    for (const auto& n : bundle_order) sc.bundles.emplace(n, BundleData(sc.curve, bundle_xi[n]));

    // resolve references
    for (const auto& c : sc.commands) {
        static const std::vector<std::string> on_bundle{"h0", "h1", "h0-ber", "serre", "duality-verify"};
        static const std::vector<std::string> on_divisor{"degree", "abel", "abel-check"};
        auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), c.name) != v.end(); };
        if (c.name == "residue-suite") {
            if (c.target.empty() || !std::all_of(c.target.begin(), c.target.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
                throw ParseError(c.line, "residue-suite needs an instance count, found '" + c.target + "'");
        } else if (in(on_bundle)) {
            if (c.target != "O" && !sc.bundles.count(c.target)) throw ParseError(c.line, "unknown bundle '" + c.target + "'");
        } else if (in(on_divisor)) {
            if (!sc.divisors.count(c.target)) throw ParseError(c.line, "unknown divisor '" + c.target + "'");
        } else if (c.name == "effective") {
            if (c.target != "O" && !sc.bundles.count(c.target) && !sc.divisors.count(c.target))
                throw ParseError(c.line, "unknown bundle or divisor '" + c.target + "'");
        }
    }
    for (const auto& [n, d] : sc.divisors) {
        try {
            validate_divisor(sc.curve, d.divisor);
        } catch (const AlgebraError& e) {
            throw ParseError(line, "divisor '" + n + "': " + e.what());
        }
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    std::string stem = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_scenario(ss.str(), stem);
}

}  // namespace supercurve
