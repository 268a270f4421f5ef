#include <gtest/gtest.h>

#include "supercurve/curve.hpp"

using namespace supercurve;

namespace {

RationalFunction zpow(int k) { return RationalFunction::power_at(Scalar(0), k); }

ContextPtr ctx_c(int q) { return make_context(BaseAlgebra::complex(), q); }

/// Split chart at 0 with theta_i -> z^{-n_i} theta_i.
SuperCurve split_curve(const ContextPtr& c, const std::vector<int>& n) {
    std::vector<SRF> th;
    for (int i = 1; i <= c->q; ++i) th.push_back(SRF::basis(c, 0, 1u << (i - 1), zpow(-n[static_cast<std::size_t>(i - 1)])));
    return SuperCurve(c, {{PointP1(0), LocalAutomorphism(srf_z(c), th)}});
}

BundleData twist(const SuperCurve& x, int n) {
    if (n == 0) return BundleData(x);
    return BundleData(x, {{PointP1(0), SRF(x.context(), zpow(-n))}});
}

}  // namespace

TEST(StalkMember, Examples) {
    auto c = ctx_c(1);
    SuperCurve twisted(c, {{PointP1(0), LocalAutomorphism(srf_z(c), {SRF::basis(c, 0, 1u, zpow(1))})}});
    BundleData l(twisted);
    EXPECT_TRUE(stalk_member(SRF::basis(c, 0, 1u, zpow(-1)), PointP1(0), l));
    EXPECT_FALSE(stalk_member(SRF::basis(c, 0, 1u, zpow(-2)), PointP1(0), l));
    EXPECT_FALSE(stalk_member(SRF(c, zpow(-1)), PointP1(0), l));
    EXPECT_TRUE(stalk_member(SRF(c, zpow(-1)), PointP1(1), l));
}

TEST(H0, Examples) {
    auto c = ctx_c(1);
    auto triv = h0(BundleData(SuperCurve(c)));
    EXPECT_EQ(triv.module.dim_even(), 1);
    EXPECT_EQ(triv.module.dim_odd(), 1);

    auto cb = make_context(BaseAlgebra::grassmann({"b1", "b2"}), 2);
    auto big = h0(BundleData(SuperCurve(cb)));
    EXPECT_EQ(big.module.dim(), 16);

    auto o3 = h0(BundleData(split_curve(c, {3})));
    EXPECT_EQ(o3.module.dim_even(), 1);
    EXPECT_EQ(o3.module.dim_odd(), 0);

    auto pole = h0(twist(SuperCurve(c), 1));
    EXPECT_EQ(pole.module.dim_even(), 2);
    EXPECT_EQ(pole.module.dim_odd(), 2);
    for (const auto& f : pole.basis) EXPECT_TRUE(stalk_member(f, PointP1(0), twist(SuperCurve(c), 1)));
}

TEST(H1, Examples) {
    auto c = ctx_c(1);
    EXPECT_EQ(h1(BundleData(SuperCurve(c))).module.dim(), 0);
    auto o3 = h1(BundleData(split_curve(c, {3})));
    EXPECT_EQ(o3.module.dim_even(), 0);
    EXPECT_EQ(o3.module.dim_odd(), 2);
    auto z2 = h1(BundleData(SuperCurve(c), {{PointP1(0), SRF(c, zpow(2))}}));
    EXPECT_EQ(z2.module.dim_even(), 1);
    EXPECT_EQ(z2.module.dim_odd(), 1);
}

TEST(SplitOracle, PropertyDimensionsMatchLineBundleCounts) {
    auto c = ctx_c(1);
    for (int m : {0, 1, 3})
        for (int n = -4; n <= 2; ++n) {
            BundleData l = twist(split_curve(c, {m}), n);
            auto a = h0(l);
            auto b = h1(l);
            EXPECT_EQ(a.module.dim_even(), std::max(n + 1, 0)) << m << " " << n;
            EXPECT_EQ(a.module.dim_odd(), std::max(n - m + 1, 0)) << m << " " << n;
            EXPECT_EQ(b.module.dim_even(), std::max(-n - 1, 0)) << m << " " << n;
            EXPECT_EQ(b.module.dim_odd(), std::max(m - n - 1, 0)) << m << " " << n;
        }
}

TEST(H0Ber, Examples) {
    auto c = ctx_c(1);
    EXPECT_EQ(h0_ber(BundleData(SuperCurve(c))).module.dim(), 0);
    auto o3 = h0_ber(BundleData(split_curve(c, {3})));
    EXPECT_EQ(o3.module.dim_even(), 0);
    EXPECT_EQ(o3.module.dim_odd(), 2);
}

TEST(Duality, SplitCases) {
    auto c = ctx_c(1);
    for (int m : {0, 3})
        for (int n : {-3, -2, 0}) {
            auto rep = verify_duality(twist(split_curve(c, {m}), n));
            EXPECT_TRUE(rep.stable);
            EXPECT_TRUE(rep.annihilates);
            EXPECT_TRUE(rep.injective) << m << " " << n;
            EXPECT_TRUE(rep.perfect) << m << " " << n;
            EXPECT_EQ(rep.h1_even, rep.h0ber_even);
            EXPECT_EQ(rep.h1_odd, rep.h0ber_odd);
        }
}

TEST(Duality, NonSplitOverGrassmann) {
    auto c = make_context(BaseAlgebra::grassmann({"beta"}), 1);
    SRF beta = SRF::basis(c, 1, 0u);
    SRF z_img = srf_z(c) + SRF::basis(c, 1, 1u, zpow(-2));
    SRF th_img = SRF::basis(c, 0, 1u, zpow(-2)) + SRF::basis(c, 1, 0u, zpow(-1));
    SuperCurve x(c, {{PointP1(0), LocalAutomorphism(z_img, {th_img})}});
    auto rep = verify_duality(BundleData(x));
    EXPECT_TRUE(rep.stable);
    EXPECT_TRUE(rep.annihilates);
    EXPECT_TRUE(rep.injective);
    EXPECT_TRUE(rep.perfect);
}

TEST(PrincipalParts, Examples) {
    auto c = ctx_c(1);
    SuperCurve x(c);
    PrincipalParts one{{PointP1(0), SRF::basis(c, 0, 1u, zpow(-1))}};
    EXPECT_FALSE(principal_part_solvable(one, x));
    EXPECT_FALSE(principal_part_witness(one, x).has_value());
    PrincipalParts two = one;
    two.emplace(PointP1(1), -SRF::basis(c, 0, 1u, RationalFunction::power_at(Scalar(1), -1)));
    EXPECT_TRUE(principal_part_solvable(two, x));
    auto w = principal_part_witness(two, x);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(*w, SRF::basis(c, 0, 1u, zpow(-1) - RationalFunction::power_at(Scalar(1), -1)));
}

TEST(TruncationStability, CatalogLikeCases) {
    auto c = make_context(BaseAlgebra::grassmann({"beta"}), 1);
    SRF z_img = srf_z(c) + SRF::basis(c, 1, 1u, zpow(-2));
    SRF th_img = SRF::basis(c, 0, 1u, zpow(-2)) + SRF::basis(c, 1, 0u, zpow(-1));
    SuperCurve nonsplit(c, {{PointP1(0), LocalAutomorphism(z_img, {th_img})}});
    for (const BundleData& l : {BundleData(split_curve(c, {3})), BundleData(nonsplit), twist(split_curve(c, {3}), -1)}) {
        auto r = truncation_stability(l);
        EXPECT_TRUE(r.h0);
        EXPECT_TRUE(r.h0_ber);
        EXPECT_TRUE(r.h1);
        EXPECT_TRUE(r.pairing);
    }
}
