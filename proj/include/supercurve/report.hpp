#pragma once

// Executes scenario commands and assembles versioned, deterministic JSON reports.

#include <cstdint>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "supercurve/scenario.hpp"

namespace supercurve {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "supercurve-report/1";

struct RunOptions {
    std::uint64_t seed = 0;
    int bounds_scale = 1;
};

struct SplitDims {
    int h0_even = 0, h0_odd = 0, h1_even = 0, h1_odd = 0;
};

/// Dimensions from line-bundle counts when every chart is z -> z, theta_i -> c (z - P)^m theta_i
/// and every multiplier is c (z - P)^k, all at finite points.
inline std::optional<SplitDims> split_oracle(const BundleData& l) {
    const auto& ctx = l.context();
    const auto& cx = *ctx;
    std::vector<int> mask_degree(1u << cx.q, 0);
    auto monomial_order = [&](const SRF& f, const PointP1& p, unsigned mask) -> std::optional<int> {
        for (int k = 0; k < f.size(); ++k)
            if (k != cx.index(0, mask) && !f[k].is_zero()) return std::nullopt;
        const RationalFunction& r = f.at(0, mask);
        if (r.is_zero()) return std::nullopt;
        int m = r.order_at(p);
        if (!(r / RationalFunction::power_at(p.value(), m)).is_constant()) return std::nullopt;
        return m;
    };
    for (const auto& p : l.support()) {
        if (p.is_infinity()) return std::nullopt;
        LocalAutomorphism a = l.curve().chart(p);
        if (!(a.z_image() == srf_z(ctx))) return std::nullopt;
        std::vector<int> m(static_cast<std::size_t>(cx.q));
        for (int i = 0; i < cx.q; ++i) {
            auto o = monomial_order(a.theta_images()[static_cast<std::size_t>(i)], p, 1u << i);
            if (!o) return std::nullopt;
            m[static_cast<std::size_t>(i)] = *o;
        }
        auto k = monomial_order(l.multiplier(p), p, 0u);
        if (!k) return std::nullopt;
        for (unsigned s = 0; s < (1u << cx.q); ++s) {
            int d = -*k;
            for (int i = 0; i < cx.q; ++i)
                if (s >> i & 1) d += m[static_cast<std::size_t>(i)];
            mask_degree[s] += d;
        }
    }
    SplitDims out;
    for (int b = 0; b < cx.base.dim(); ++b)
        for (unsigned s = 0; s < (1u << cx.q); ++s) {
            const int par = cx.parity_of(cx.index(b, s));
            const int d = mask_degree[s];
            (par ? out.h0_odd : out.h0_even) += std::max(d + 1, 0);
            (par ? out.h1_odd : out.h1_even) += std::max(-d - 1, 0);
        }
    return out;
}

namespace detail {

inline std::string base_description(const BaseAlgebra& b) {
    if (b.generators().empty()) return "C";
    std::string names, rels;
    for (const auto& g : b.generators()) {
        names += (names.empty() ? "" : ",") + g.name;
        if (g.parity == 0) rels += (rels.empty() ? "" : ",") + g.name + "^" + std::to_string(g.nilpotency);
    }
    return "C[" + names + "]" + (rels.empty() ? "" : "/(" + rels + ")");
}

inline Json dims_json(int even, int odd) { return Json{{"even", even}, {"odd", odd}}; }
inline std::string dims_text(int even, int odd) { return std::to_string(even) + "|" + std::to_string(odd); }

inline Json strings(const std::vector<SRF>& v) {
    Json a = Json::array();
    for (const auto& f : v) a.push_back(f.str());
    return a;
}

inline void apply_expect(Json& r, const Command& c, const std::string& actual) {
    if (!c.expect) return;
    r["expected"] = *c.expect;
    if (*c.expect != actual) r["status"] = "FALSIFIED";
}

inline BundleData bundle_for(const Scenario& sc, const std::string& name) {
    if (name == "O") {
        auto it = sc.bundles.find("O");
        return it == sc.bundles.end() ? BundleData(sc.curve) : it->second;
    }
    return sc.bundles.at(name);
}

/// A unit regular at p: (2 + (z - p)) (1 + nu (z - p)) with nu an even nilpotent basis element.
inline SRF perturbing_unit(const ContextPtr& ctx, const PointP1& p) {
    RationalFunction t = RationalFunction::power_at(p.value(), 1);
    SRF u(ctx, RationalFunction(Scalar(2)) + t);
    for (int k = 1; k < ctx->components(); ++k)
        if (ctx->parity_of(k) == 0) {
            SRF nu(ctx);
            nu[k] = t;
            return u * (srf_constant(ctx, Scalar(1)) + nu);
        }
    return u;
}

/// L + d o (c + r d/dtheta_1), a second lift of the same section.
inline DifferentialOperator perturbed_lift(const DifferentialOperator& l, const ContextPtr& ctx) {
    DifferentialOperator v(ctx);
    v.add(-1, 0, 0, LogFunction(srf_constant(ctx, Scalar(3))));
    if (ctx->q >= 1) v.add(-1, 0, 1u, LogFunction(SRF(ctx, RationalFunction::z() + RationalFunction(Scalar(1)))));
    DifferentialOperator out = l;
    out += DifferentialOperator::d_compose(v);
    return out;
}

inline Json run_residue_suite(const Scenario& sc, const Command& c, std::uint64_t seed) {
    const auto& ctx = sc.ctx;
    const long count = std::stol(c.target);
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(c.line));
    const std::vector<Scalar> pts{Scalar(0), Scalar(1), Scalar(-1), Scalar(Rational(1, 2), Rational(1))};
    Json sums = Json::array();
    bool ok = true;
    for (long n = 0; n < count; ++n) {
        SRF f(ctx);
        for (int k = 0; k < f.size(); ++k) {
            if (rng() % 3 == 0) continue;
            RationalFunction r(Scalar(static_cast<long>(rng() % 7) - 3));
            for (const auto& a : pts)
                for (int m = 1; m <= 2; ++m)
                    if (rng() % 2) r += RationalFunction::power_at(a, -m).scaled(Scalar(static_cast<long>(rng() % 9) - 4));
            if (rng() % 2) r += RationalFunction::z().scaled(Scalar(static_cast<long>(rng() % 5) - 2));
            f[k] = r;
        }
        SRF top = f.berezin_top();
        SuperElement total = residue_dz(top, PointP1::infinity());
        for (const auto& a : pts) total += residue_dz(top, PointP1(a));
        if (!total.is_zero()) ok = false;
        sums.push_back(total.str());
    }
    return Json{{"instances", count}, {"total_residues", sums}, {"status", ok ? "VERIFIED" : "FALSIFIED"}};
}

inline Json run_command(const Scenario& sc, const Command& c, const RunOptions& opt) {
    Json r;
    r["line"] = c.line;
    r["command"] = c.name;
    r["target"] = c.target;
    TruncationBounds bounds = sc.bounds;
    bounds.scale = opt.bounds_scale;
    const auto& base = sc.ctx->base;
    try {
        if (c.name == "h0" || c.name == "h0-ber") {
            BundleData l = bundle_for(sc, c.target);
            SectionSpace s = c.name == "h0" ? h0(l, bounds) : h0_ber(l, bounds);
            r["status"] = "COMPUTED";
            r["dims"] = dims_json(s.module.dim_even(), s.module.dim_odd());
            r["generators"] = s.module.generator_count();
            r["pole_order"] = s.pole_order;
            r["basis"] = strings(s.basis);
            apply_expect(r, c, dims_text(s.module.dim_even(), s.module.dim_odd()));
        } else if (c.name == "h1") {
            H1Space s = h1(bundle_for(sc, c.target), bounds);
            r["status"] = "COMPUTED";
            r["dims"] = dims_json(s.module.dim_even(), s.module.dim_odd());
            r["generators"] = s.module.generator_count();
            r["pole_order"] = s.pole_order;
            Json reps = Json::array();
            for (const auto& g : s.reps) reps.push_back(Json{{"point", g.point.str()}, {"exponent", g.exponent}, {"value", g.value.str()}});
            r["representatives"] = reps;
            apply_expect(r, c, dims_text(s.module.dim_even(), s.module.dim_odd()));
        } else if (c.name == "serre") {
            BundleData l = bundle_for(sc, c.target);
            SectionSpace ber = h0_ber(l, bounds);
            H1Space hh = h1(l, bounds);
            PairingMatrix m = serre_pairing(ber.basis, hh.reps);
            Json rows = Json::array();
            for (const auto& row : m.entries) {
                Json jr = Json::array();
                for (const auto& x : row) jr.push_back(x.str());
                rows.push_back(jr);
            }
            r["status"] = "COMPUTED";
            r["h0_ber_basis"] = strings(ber.basis);
            Json reps = Json::array();
            for (const auto& g : hh.reps) reps.push_back(Json{{"point", g.point.str()}, {"value", g.value.str()}});
            r["h1_representatives"] = reps;
            r["pairing"] = rows;
        } else if (c.name == "duality-verify") {
            BundleData l = bundle_for(sc, c.target);
            DualityReport d = verify_duality(l, bounds);
            StabilityReport st = truncation_stability(l, bounds);
            r["h1"] = dims_json(d.h1_even, d.h1_odd);
            r["h0_ber"] = dims_json(d.h0ber_even, d.h0ber_odd);
            r["annihilates"] = d.annihilates;
            r["injective"] = d.injective;
            r["frobenius"] = d.frobenius;
            r["grassmann"] = base.is_grassmann();
            r["perfect"] = d.perfect;
            r["pairing_rank"] = d.pairing_rank;
            r["truncation_stable"] = Json{{"h0", st.h0}, {"h0_ber", st.h0_ber}, {"h1", st.h1}, {"pairing", st.pairing}};
            bool ok = d.stable && d.annihilates && d.injective && (!base.is_grassmann() || d.perfect) && st.all();
            if (auto o = split_oracle(l)) {
                bool match = o->h1_even == d.h1_even && o->h1_odd == d.h1_odd && o->h1_even == d.h0ber_even && o->h1_odd == d.h0ber_odd;
                SectionSpace s0 = h0(l, bounds);
                match = match && o->h0_even == s0.module.dim_even() && o->h0_odd == s0.module.dim_odd();
                r["split_oracle"] = Json{{"h0", dims_json(o->h0_even, o->h0_odd)}, {"h1", dims_json(o->h1_even, o->h1_odd)}, {"agrees", match}};
                ok = ok && match;
            } else {
                r["split_oracle"] = nullptr;
            }
            if (!d.notes.empty()) r["notes"] = d.notes;
            r["status"] = ok ? "VERIFIED" : "FALSIFIED";
        } else if (c.name == "degree") {
            const auto& d = sc.divisors.at(c.target).divisor;
            int deg = degree(d), red = reduced_degree(d);
            r["degree"] = deg;
            r["reduced_degree"] = red;
            r["status"] = deg == red ? "VERIFIED" : "FALSIFIED";
            apply_expect(r, c, std::to_string(deg));
        } else if (c.name == "abel" || c.name == "abel-check") {
            const auto& nd = sc.divisors.at(c.target);
            AbelResult a = abel(sc.curve, nd.divisor, bounds, nd.marked);
            Json vals = Json::array();
            for (const auto& v : a.values) vals.push_back(v.str(base));
            r["h0_ber_basis"] = strings(a.basis);
            r["values"] = vals;
            r["zero"] = a.is_zero();
            if (c.name == "abel") {
                r["status"] = "COMPUTED";
            } else {
                TrivialityResult t = is_trivial(sc.curve, nd.divisor, bounds);
                r["trivial"] = t.trivial;
                r["witness"] = t.witness ? Json(t.witness->str()) : Json(nullptr);
                // representative and lift independence
                CartierDivisor moved = nd.divisor;
                for (auto& [p, f] : moved.equations) f = f * perturbing_unit(sc.ctx, p);
                AbelResult a2 = abel(sc.curve, moved, bounds, nd.marked);
                std::vector<Scalar> marked = finite_values(nd.divisor.support());
                for (const auto& p : nd.marked) marked.push_back(p.value());
                std::vector<Scalar> poles = finite_values(sc.curve.support());
                bool rep_ok = a2.values == a.values, lift_ok = true;
                for (std::size_t i = 0; i < a.basis.size(); ++i) {
                    DifferentialOperator l2 = perturbed_lift(lift_to_Dsharp(BerSection{a.basis[i]}, marked, poles), sc.ctx);
                    LogElement v(base.dim());
                    for (const auto& [p, f] : nd.divisor.equations) v += apply_to_log(l2, f).residue(p);
                    if (!(v == a.values[i])) lift_ok = false;
                }
                r["representative_independent"] = rep_ok;
                r["lift_independent"] = lift_ok;
                r["status"] = (a.is_zero() == t.trivial && rep_ok && lift_ok) ? "VERIFIED" : "FALSIFIED";
            }
        } else if (c.name == "effective") {
            EffectivityResult e = sc.divisors.count(c.target) ? has_effective_representative(sc.curve, sc.divisors.at(c.target).divisor, bounds)
                                                              : has_effective_representative(bundle_for(sc, c.target), bounds);
            r["effective"] = e.effective;
            r["witness"] = e.witness ? Json(e.witness->str()) : Json(nullptr);
            r["status"] = "COMPUTED";
            apply_expect(r, c, e.effective ? "true" : "false");
        } else if (c.name == "residue-suite") {
            Json s = run_residue_suite(sc, c, opt.seed);
            for (auto& [k, v] : s.items()) r[k] = v;
        }
    } catch (const std::exception& e) {
        r["status"] = "ERROR";
        r["error"] = e.what();
    }
    return r;
}

}  // namespace detail

inline Json run_scenario(const Scenario& sc, const RunOptions& opt) {
    Json out;
    out["name"] = sc.name;
    out["base"] = detail::base_description(sc.ctx->base);
    out["q"] = sc.ctx->q;
    Json charts = Json::array();
    for (const auto& [p, a] : sc.curve.charts()) charts.push_back(Json{{"point", p.str()}, {"map", a.str()}});
    out["charts"] = charts;
    std::vector<std::future<Json>> jobs;
    for (const auto& c : sc.commands) jobs.push_back(std::async(std::launch::async, [&sc, c, opt] { return detail::run_command(sc, c, opt); }));
    Json results = Json::array();
    for (auto& j : jobs) results.push_back(j.get());
    out["results"] = results;
    return out;
}

inline Json assemble_report(const std::vector<Json>& scenarios, const RunOptions& opt) {
    Json rep;
    rep["schema"] = kReportSchema;
    rep["seed"] = opt.seed;
    rep["bounds_scale"] = opt.bounds_scale;
    std::map<std::string, int> counts{{"COMPUTED", 0}, {"VERIFIED", 0}, {"FALSIFIED", 0}, {"ERROR", 0}};
    Json arr = Json::array();
    for (const auto& s : scenarios) {
        for (const auto& r : s["results"]) counts[r["status"].get<std::string>()]++;
        arr.push_back(s);
    }
    rep["scenarios"] = arr;
    Json summary;
    for (const auto& [k, v] : counts) summary[k] = v;
    rep["summary"] = summary;
    return rep;
}

inline int falsified_count(const Json& report) { return report["summary"]["FALSIFIED"].get<int>(); }

inline Json run_scenarios(const std::vector<Scenario>& scs, const RunOptions& opt) {
    std::vector<std::future<Json>> jobs;
    for (const auto& sc : scs) jobs.push_back(std::async(std::launch::async, [&sc, opt] { return run_scenario(sc, opt); }));
    std::vector<Json> out;
    for (auto& j : jobs) out.push_back(j.get());
    return assemble_report(out, opt);
}

}  // namespace supercurve
