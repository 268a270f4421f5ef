// Acceptance checks, one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "supercurve/catalog.hpp"
#include "supercurve/report.hpp"

using namespace supercurve;

namespace {

int failures = 0;

void report(int n, const std::string& what, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++failures;
}

long small(std::mt19937_64& rng, long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)); }

RationalFunction random_poly(std::mt19937_64& rng, int deg) {
    std::vector<Scalar> v;
    for (int k = 0; k <= deg; ++k) v.emplace_back(small(rng, -2, 2));
    return RationalFunction(Polynomial(std::move(v)));
}

RationalFunction random_poles(std::mt19937_64& rng, const std::vector<Scalar>& pts, int max_order) {
    RationalFunction r = random_poly(rng, 1);
    for (const auto& a : pts)
        for (int k = 1; k <= max_order; ++k) r += RationalFunction::power_at(a, -k).scaled(Scalar(small(rng, -2, 2)));
    return r;
}

template <typename G>
SRF random_srf(const ContextPtr& c, std::mt19937_64& rng, int parity, G gen) {
    SRF f(c);
    for (int k = 0; k < f.size(); ++k)
        if ((parity < 0 || c->parity_of(k) == parity) && rng() % 2) f[k] = gen();
    return f;
}

/// Results of a given command across a report, tagged with the scenario name.
std::vector<std::pair<std::string, Json>> results_of(const Json& rep, const std::string& cmd) {
    std::vector<std::pair<std::string, Json>> out;
    for (const auto& s : rep["scenarios"])
        for (const auto& r : s["results"])
            if (r["command"] == cmd) out.emplace_back(s["name"].get<std::string>(), r);
    return out;
}

const Json* find_result(const Json& rep, const std::string& scenario, const std::string& cmd, const std::string& target) {
    for (const auto& s : rep["scenarios"])
        if (s["name"] == scenario)
            for (const auto& r : s["results"])
                if (r["command"] == cmd && r["target"] == target) return &r;
    return nullptr;
}

void criterion1() {
    auto c1 = make_context(BaseAlgebra::grassmann({"b1", "b2"}), 1);
    auto c2 = make_context(BaseAlgebra::grassmann({"b1", "b2"}), 2);
    const std::vector<Scalar> pts{Scalar(0), Scalar(1), Scalar(-2), Scalar(Rational(1, 3), Rational(-1))};
    std::mt19937_64 rng(101);
    int bad = 0;
    for (int n = 0; n < 200; ++n) {
        const ContextPtr& c = n % 2 ? c2 : c1;
        SRF h = random_srf(c, rng, -1, [&] { return random_poles(rng, pts, 2); });
        BerSection w{h};
        SuperElement total = residue(w, PointP1::infinity());
        for (const auto& p : pts) total += residue(w, PointP1(p));
        if (!total.is_zero()) ++bad;
    }
    report(1, "total Berezinian residue vanishes on 200 random functions", bad == 0, std::to_string(bad) + " nonzero");
}

SuperElement random_elem(const ContextPtr& c, std::mt19937_64& rng, int parity, bool unit) {
    SuperElement e(c);
    for (int k = 0; k < e.size(); ++k)
        if (c->parity_of(k) == parity && rng() % 2) e[k] = Scalar(small(rng, -3, 3));
    if (unit) e[0] = Scalar(small(rng, 1, 4) * ((rng() % 2) ? 1 : -1));
    return e;
}

SuperMatrix<Scalar> random_supermatrix(const ContextPtr& c, std::mt19937_64& rng, int p) {
    auto blk = [&](int par, bool diag) {
        ElemMatrix<Scalar> m(static_cast<std::size_t>(p), std::vector<SuperElement>(static_cast<std::size_t>(p), SuperElement(c)));
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                m[i][j] = random_elem(c, rng, par, diag && i == j);
                if (i != j && par == 0) m[i][j][0] = Scalar(small(rng, -1, 1));
            }
        return m;
    };
    return {c, blk(0, true), blk(1, false), blk(1, false), blk(0, true)};
}

/// Determinant of the reduced block by the explicit 1x1 / 2x2 formula.
Scalar reduced_det(const ElemMatrix<Scalar>& m) {
    if (m.size() == 1) return m[0][0].reduced();
    return m[0][0].reduced() * m[1][1].reduced() - m[0][1].reduced() * m[1][0].reduced();
}

void criterion2() {
    auto c = make_context(BaseAlgebra::grassmann({"b1", "b2", "b3"}), 0);
    std::mt19937_64 rng(202);
    int done = 0, bad = 0;
    while (done < 100) {
        int p = 1 + done % 2;
        auto m = random_supermatrix(c, rng, p), k = random_supermatrix(c, rng, p);
        if (reduced_det(m.a).is_zero() || reduced_det(m.d).is_zero() || reduced_det(k.a).is_zero() || reduced_det(k.d).is_zero()) continue;
        ++done;
        SuperElement bm = berezinian(m);
        if (!(berezinian(m * k) == bm * berezinian(k))) ++bad;
        if (!(bm.reduced() == reduced_det(m.a) / reduced_det(m.d))) ++bad;
    }
    report(2, "Berezinian multiplicative and reduces to det ratio on 100 supermatrices (1|1, 2|2)", bad == 0, std::to_string(bad) + " mismatches");
}

LocalAutomorphism random_aut(const ContextPtr& c, std::mt19937_64& rng) {
    auto nil = [&](int parity) {
        SRF f = random_srf(c, rng, parity, [&] { return random_poly(rng, 2); });
        f[0] = RationalFunction();
        for (int i = 1; i <= c->q; ++i) f[c->index(0, 1u << (i - 1))] = RationalFunction();
        return f;
    };
    SRF z = srf_z(c) + nil(0);
    std::vector<SRF> th;
    for (int i = 1; i <= c->q; ++i) {
        RationalFunction a(Polynomial(std::vector<Scalar>{Scalar(small(rng, 1, 3)), Scalar(small(rng, -1, 1))}));
        th.push_back(SRF::theta(c, i).scaled(a) + nil(1));
    }
    return LocalAutomorphism(z, th);
}

void criterion3() {
    std::mt19937_64 rng(303);
    int bad = 0;
    for (int n = 0; n < 50; ++n) {
        auto c = make_context(BaseAlgebra::grassmann({"b1", "b2"}), 1 + n % 2);
        LocalAutomorphism s = random_aut(c, rng);
        BerSection w{random_srf(c, rng, static_cast<int>(rng() % 2), [&] { return random_poles(rng, {Scalar(0)}, 3); })};
        BerSection p = change_of_variables(w, s);
        if (!(residue(p, PointP1(0)) == residue(w, PointP1(0)))) ++bad;
    }
    report(3, "residues invariant under 50 random automorphisms", bad == 0, std::to_string(bad) + " changed");
}

void criterion4(const Json& rep) {
    auto dv = results_of(rep, "duality-verify");
    int verified = 0;
    bool all_ok = true;
    for (const auto& [name, r] : dv) {
        bool ok = r["status"] == "VERIFIED" && r["annihilates"].get<bool>() && r["injective"].get<bool>() &&
                  (!r["grassmann"].get<bool>() || r["perfect"].get<bool>());
        verified += ok;
        all_ok = all_ok && ok;
    }
    const Json* h1 = find_result(rep, "split-O(-3)", "h1", "O");
    const Json* hb = find_result(rep, "split-O(-3)", "h0-ber", "O");
    const Json* d = find_result(rep, "split-O(-3)", "duality-verify", "O");
    bool oracle = h1 && hb && d && (*h1)["dims"] == Json{{"even", 0}, {"odd", 2}} && (*hb)["dims"] == Json{{"even", 0}, {"odd", 2}} &&
                  (*d)["split_oracle"]["agrees"].get<bool>();
    report(4, "Serre duality on catalog pairs and split O(-3) oracle", all_ok && verified >= 6 && oracle,
           std::to_string(verified) + " pairs verified");
}

void criterion5(const Json& rep, const Json& rep2) {
    bool stable = true;
    for (const auto& [name, r] : results_of(rep, "duality-verify"))
        for (const auto& [k, v] : r["truncation_stable"].items()) stable = stable && v.get<bool>();
    bool dims_same = true;
    for (const auto* cmd : {"h0", "h1", "h0-ber", "duality-verify"}) {
        auto a = results_of(rep, cmd), b = results_of(rep2, cmd);
        if (a.size() != b.size()) dims_same = false;
        for (std::size_t i = 0; i < a.size() && dims_same; ++i) {
            const char* key = std::string(cmd) == "duality-verify" ? "h1" : "dims";
            dims_same = a[i].second[key] == b[i].second[key];
            if (std::string(cmd) == "duality-verify") dims_same = dims_same && a[i].second["pairing_rank"] == b[i].second["pairing_rank"];
        }
    }
    report(5, "dimensions and pairing matrices stable under doubled bounds and extra points", stable && dims_same);
}

void criterion6() {
    auto cb = make_context(BaseAlgebra::grassmann({"beta"}), 1);
    SRF bt = SRF::basis(cb, 1, 1u);
    auto zp = [](int k) { return RationalFunction::power_at(Scalar(0), k); };
    std::vector<SuperCurve> curves{
        SuperCurve(cb),
        SuperCurve(cb, {{PointP1(0), LocalAutomorphism(srf_z(cb), {SRF::basis(cb, 0, 1u, zp(-3))})}}),
        SuperCurve(cb, {{PointP1(0), LocalAutomorphism(srf_z(cb) + SRF::basis(cb, 1, 1u, zp(-2)),
                                                        {SRF::basis(cb, 0, 1u, zp(-2)) + SRF::basis(cb, 1, 0u, zp(-1))})}}),
    };
    std::mt19937_64 rng(606);
    const std::vector<Scalar> pts{Scalar(1), Scalar(2)};
    int agree = 0, solvable = 0;
    bool constructed_ok = true;
    for (int n = 0; n < 20; ++n) {
        const SuperCurve& x = curves[static_cast<std::size_t>(n % 3)];
        PrincipalParts p;
        if (n % 3 == 0 && n % 2 == 0) {
            // principal parts of one global section on the trivial curve: simple-pole residues cancel
            // and the double poles decay, so g vanishes to order 2 at infinity
            SRF g = random_srf(cb, rng, -1, [&] {
                Scalar a(small(rng, -2, 2));
                return RationalFunction::power_at(pts[0], -1).scaled(a) - RationalFunction::power_at(pts[1], -1).scaled(a) +
                       RationalFunction::power_at(pts[0], -2).scaled(Scalar(small(rng, -2, 2))) +
                       RationalFunction::power_at(pts[1], -2).scaled(Scalar(small(rng, 1, 2)));
            });
            for (const auto& a : pts) p.emplace(PointP1(a), g);
        } else {
            for (const auto& a : pts) p.emplace(PointP1(a), random_srf(cb, rng, -1, [&] { return random_poles(rng, {a}, 2) - random_poly(rng, 1); }));
            if (n % 2) p.begin()->second += bt * SRF(cb, RationalFunction::power_at(Scalar(1), -1));
        }
        bool s = principal_part_solvable(p, x);
        auto w = principal_part_witness(p, x);
        agree += s == w.has_value();
        solvable += s;
        if (n % 3 == 0 && n % 2 == 0 && !s) constructed_ok = false;
    }
    report(6, "principal-part criterion agrees with witness on 20 instances", agree == 20 && constructed_ok && solvable > 0 && solvable < 20,
           std::to_string(agree) + " agree, " + std::to_string(solvable) + " solvable");
}

void criterion7() {
    std::mt19937_64 rng(707);
    std::vector<ContextPtr> ctxs{make_context(BaseAlgebra::grassmann({"b1", "b2"}), 1), make_context(BaseAlgebra::grassmann({"b1", "b2"}), 2),
                                 make_context(BaseAlgebra::truncated("eps", 2), 1)};
    const std::vector<Scalar> pts{Scalar(1), Scalar(2), Scalar(-3), Scalar(Rational(1, 2), Rational(1))};
    int bad = 0;
    for (int n = 0; n < 100; ++n) {
        const ContextPtr& c = ctxs[static_cast<std::size_t>(n % 3)];
        CartierDivisor d;
        int expected = 0;
        for (const auto& a : pts) {
            if (rng() % 3 == 0) continue;
            int m = static_cast<int>(small(rng, -3, 3));
            expected += m;
            // unit factor (z - b)/(z - b') with b, b' away from a
            Scalar b = a + Scalar(small(rng, 1, 4)), b2 = a - Scalar(small(rng, 1, 4));
            RationalFunction red = RationalFunction::power_at(a, m) * RationalFunction::power_at(b, 1) * RationalFunction::power_at(b2, -1);
            red = red.scaled(Scalar(small(rng, 1, 5)));
            SRF nil = random_srf(c, rng, 0, [&] { return random_poles(rng, {a}, 3); });
            nil[0] = RationalFunction();
            d.equations.emplace(PointP1(a), SRF(c, red) * (srf_constant(c, Scalar(1)) + nil));
        }
        try {
            if (degree(d) != expected || reduced_degree(d) != expected) ++bad;
        } catch (const std::exception&) {
            ++bad;
        }
    }
    report(7, "degree of 100 random Cartier divisors is the integer reduced order", bad == 0, std::to_string(bad) + " mismatches");
}

void criterion8(const Json& rep) {
    auto checks = results_of(rep, "abel-check");
    std::set<std::string> curves;
    int ok = 0, zero = 0, nonzero = 0;
    for (const auto& [name, r] : checks) {
        bool good = r["status"] == "VERIFIED" && r["zero"] == r["trivial"] && r["representative_independent"].get<bool>() &&
                    r["lift_independent"].get<bool>();
        ok += good;
        curves.insert(name);
        (r["zero"].get<bool>() ? zero : nonzero)++;
    }
    // additivity on the split O(-3) curve over C[beta]
    bool additive = false;
    for (const auto& sc : catalog())
        if (sc.name == "split-O(-3)-beta") {
            const auto& dv = sc.divisors;
            AbelResult a = abel(sc.curve, dv.at("reduced").divisor), b = abel(sc.curve, dv.at("perturbed").divisor);
            AbelResult s = abel(sc.curve, dv.at("reduced").divisor + dv.at("perturbed").divisor);
            AbelResult s2 = abel(sc.curve, dv.at("sum").divisor);
            additive = s.values.size() == a.values.size() && s.values == s2.values;
            for (std::size_t i = 0; additive && i < s.values.size(); ++i) {
                LogElement t = a.values[i];
                t += b.values[i];
                additive = s.values[i] == t;
            }
        }
    bool all = ok == static_cast<int>(checks.size());
    report(8, "Abel map vanishes exactly on trivial divisors, additive, representative and lift independent",
           all && checks.size() >= 10 && curves.size() >= 3 && zero > 0 && nonzero > 0 && additive,
           std::to_string(ok) + "/" + std::to_string(checks.size()) + " divisors on " + std::to_string(curves.size()) + " curves");
}

void criterion9(const Json& rep) {
    const Json* gap = find_result(rep, "effectivity-gap", "effective", "gap");
    const Json* gen = find_result(rep, "effectivity-gap", "effective", "generic");
    bool ok = gap && gen && (*gap)["effective"] == false && (*gen)["effective"] == true && (*gen)["witness"].is_string();
    report(9, "effectivity gap is detected and the generic case has a section", ok);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    RunOptions opt{7, 1};
    Json rep = run_scenarios(catalog(), opt);
    criterion4(rep);
    RunOptions opt2{7, 2};
    Json rep2 = run_scenarios(catalog(), opt2);
    criterion5(rep, rep2);
    criterion6();
    criterion7();
    criterion8(rep);
    criterion9(rep);
    Json again = run_scenarios(catalog(), opt);
    report(10, "catalog report with seed 7 is byte-identical across runs", rep.dump(2) == again.dump(2));
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
