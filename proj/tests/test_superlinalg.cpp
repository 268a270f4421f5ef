#include <random>

#include <gtest/gtest.h>

#include "supercurve/superlinalg.hpp"

using namespace supercurve;

namespace {

SuperElement random_elem(const ContextPtr& c, std::mt19937_64& rng, int parity, bool unit) {
    SuperElement e(c);
    for (int k = 0; k < e.size(); ++k)
        if (c->parity_of(k) == parity && rng() % 2) e[k] = Scalar(static_cast<long>(rng() % 7) - 3);
    if (unit) e[0] = Scalar(static_cast<long>(rng() % 4) + 1) * Scalar((rng() % 2) ? 1 : -1);
    return e;
}

SuperMatrix<Scalar> random_supermatrix(const ContextPtr& c, std::mt19937_64& rng, int p, int s) {
    auto blk = [&](int r, int cc, int par, bool diag) {
        ElemMatrix<Scalar> m(static_cast<std::size_t>(r), std::vector<SuperElement>(static_cast<std::size_t>(cc), SuperElement(c)));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < cc; ++j) {
                m[i][j] = random_elem(c, rng, par, diag && i == j);
                if (i != j) m[i][j][0] = Scalar(0);
            }
        return m;
    };
    return {c, blk(p, p, 0, true), blk(p, s, 1, false), blk(s, p, 1, false), blk(s, s, 0, true)};
}

Scalar reduced_det(const ElemMatrix<Scalar>& m, const ContextPtr& c) {
    ElemMatrix<Scalar> r = m;
    for (auto& row : r)
        for (auto& x : row) x = SuperElement(c, x.reduced());
    return det_even(r, c).reduced();
}

}  // namespace

TEST(DetEven, TruncatedPolynomialExample) {
    auto c = make_context(BaseAlgebra::truncated("eps", 2), 0);
    SuperElement one(c, Scalar(1)), eps = SuperElement::gen(c, "eps");
    ElemMatrix<Scalar> m{{one + eps, SuperElement(c)}, {SuperElement(c), one - eps}};
    EXPECT_EQ(det_even(m, c), one);
}

TEST(DetEven, NilpotentMatrixUsesCofactorFallback) {
    auto c = make_context(BaseAlgebra::truncated("eps", 3), 0);
    SuperElement eps = SuperElement::gen(c, "eps");
    ElemMatrix<Scalar> m{{eps, eps}, {SuperElement(c), eps}};
    EXPECT_EQ(det_even(m, c), eps * eps);
}

TEST(Berezinian, OneOneFormula) {
    auto c = make_context(BaseAlgebra::grassmann({"b1", "b2"}), 0);
    SuperElement a(c, Scalar(3)), d(c, Scalar(2));
    SuperElement beta = SuperElement::gen(c, "b1"), gamma = SuperElement::gen(c, "b2");
    SuperMatrix<Scalar> m{c, {{a}}, {{beta}}, {{gamma}}, {{d}}};
    SuperElement dinv = d.invert_unit();
    EXPECT_EQ(berezinian(m), a * dinv - beta * gamma * dinv * dinv);
    EXPECT_EQ(berezinian(m), SuperElement(c, Scalar::frac(3, 2)) - beta * gamma * SuperElement(c, Scalar::frac(1, 4)));
}

TEST(Berezinian, RejectsWrongParityAndSingularD) {
    auto c = make_context(BaseAlgebra::grassmann({"b1"}), 0);
    SuperElement one(c, Scalar(1)), b = SuperElement::gen(c, "b1");
    SuperMatrix<Scalar> bad{c, {{b}}, {{b}}, {{b}}, {{one}}};
    EXPECT_THROW(berezinian(bad), AlgebraError);
    SuperMatrix<Scalar> sing{c, {{one}}, {{b}}, {{b}}, {{SuperElement(c)}}};
    EXPECT_THROW(berezinian(sing), AlgebraError);
}

TEST(Berezinian, PropertyMultiplicativeAndReducesToDetRatio) {
    auto c = make_context(BaseAlgebra::grassmann({"b1", "b2", "b3"}), 0);
    std::mt19937_64 rng(17);
    for (int n = 0; n < 40; ++n) {
        int size = 1 + n % 2;
        auto m = random_supermatrix(c, rng, size, size);
        auto k = random_supermatrix(c, rng, size, size);
        SuperElement bm = berezinian(m);
        EXPECT_EQ(berezinian(m * k), bm * berezinian(k));
        EXPECT_EQ(bm.reduced(), reduced_det(m.a, c) / reduced_det(m.d, c));
    }
}

TEST(Echelon, KernelAndMembership) {
    // columns (1,1,0), (0,1,1), (1,2,1)
    std::vector<SparseVec> cols{{{0, Scalar(1)}, {1, Scalar(1)}},
                                {{1, Scalar(1)}, {2, Scalar(1)}},
                                {{0, Scalar(1)}, {1, Scalar(2)}, {2, Scalar(1)}}};
    auto ker = kernel_of_columns(cols);
    ASSERT_EQ(ker.size(), 1u);
    EXPECT_EQ(ker[0], (SparseVec{{0, Scalar(-1)}, {1, Scalar(-1)}, {2, Scalar(1)}}));
    Echelon e;
    for (const auto& v : cols) e.insert(v);
    EXPECT_EQ(e.rank(), 2);
    EXPECT_TRUE(e.contains({{0, Scalar(2)}, {1, Scalar(3)}, {2, Scalar(1)}}));
    EXPECT_FALSE(e.contains({{0, Scalar(1)}}));
}

TEST(BModule, KernelAndCokernelOfMultiplication) {
    auto b = BaseAlgebra::truncated("eps", 2);
    BModuleRep f = free_module(b, 1, 0);
    f.validate(b);
    EXPECT_TRUE(f.is_free(b.dim()));
    // multiplication by eps
    BLinearMap mul{f, f, f.action[1]};
    BModuleRep k = kernel(mul), q = cokernel(mul);
    k.validate(b);
    q.validate(b);
    EXPECT_EQ(k.dim(), 1);
    EXPECT_EQ(q.dim(), 1);
    EXPECT_FALSE(k.is_free(b.dim()));
    EXPECT_EQ(q.generator_count(), 1);
    BModuleRep z = quotient(f, {{{1, Scalar(1)}}});
    EXPECT_EQ(z.dim(), 1);
    EXPECT_THROW(quotient(f, {{{0, Scalar(1)}, {1, Scalar(2)}}}), AlgebraError);
}

TEST(BModule, RejectsNonLinearMap) {
    auto b = BaseAlgebra::truncated("eps", 2);
    BModuleRep f = free_module(b, 1, 0);
    DenseMatrix proj(2, 2);
    proj(0, 0) = Scalar(1);
    EXPECT_THROW(kernel(BLinearMap{f, f, proj}), AlgebraError);
}

TEST(BModule, OddRankParities) {
    auto b = BaseAlgebra::grassmann({"beta"});
    BModuleRep f = free_module(b, 1, 1);
    f.validate(b);
    EXPECT_EQ(f.dim_even(), 2);
    EXPECT_EQ(f.dim_odd(), 2);
}
