#include <random>

#include <gtest/gtest.h>

#include "supercurve/superfunction.hpp"

using namespace supercurve;

namespace {

RationalFunction pole(const Scalar& a, int k) { return RationalFunction::power_at(a, -k); }

ContextPtr ctx_beta(int q) { return make_context(BaseAlgebra::grassmann({"beta"}), q); }

RationalFunction random_rational(std::mt19937_64& rng, const std::vector<Scalar>& pts) {
    RationalFunction r(Scalar(static_cast<long>(rng() % 5) - 2));
    for (const auto& a : pts)
        for (int k = 1; k <= 2; ++k)
            if (rng() % 2) r += pole(a, k).scaled(Scalar(static_cast<long>(rng() % 7) - 3));
    if (rng() % 2) r += RationalFunction::z().scaled(Scalar(static_cast<long>(rng() % 3) + 1));
    return r;
}

}  // namespace

TEST(LaurentExpand, Examples) {
    auto c = make_context(BaseAlgebra::complex(), 1);
    auto e = laurent_expand(SuperRationalFunction(c, pole(Scalar(0), 1)), PointP1(0), 2);
    EXPECT_EQ(e.coeff(-1), SuperElement(c, Scalar(1)));
    EXPECT_TRUE(e.coeff(0).is_zero());
    EXPECT_TRUE(e.coeff(2).is_zero());
    // 1/(z-1) at 0 = -1 - z - z^2 - ...; multiply back by (z - 1)
    auto g = laurent_expand(SuperRationalFunction(c, pole(Scalar(1), 1)), PointP1(0), 2);
    for (int n = 0; n <= 2; ++n) EXPECT_EQ(g.coeff(n), SuperElement(c, Scalar(-1)));
    LaurentSeries back = g.value[0] * LaurentSeries(0, {Scalar(-1), Scalar(1)}, LaurentSeries::kExact);
    EXPECT_EQ(back.coeff(0), Scalar(1));
    EXPECT_TRUE(back.coeff(1).is_zero());
    EXPECT_TRUE(back.coeff(2).is_zero());
    auto inf = laurent_expand(srf_z(c), PointP1::infinity(), 1);
    EXPECT_EQ(inf.coeff(-1), SuperElement(c, Scalar(1)));
    EXPECT_TRUE(inf.coeff(0).is_zero());
}

TEST(LaurentSeriesArithmetic, ExactnessIsTracked) {
    LaurentSeries one(Scalar(1));
    EXPECT_TRUE(one.is_one());
    LaurentSeries x = RationalFunction(pole(Scalar(1), 1)).laurent(PointP1(0), 3);
    EXPECT_EQ((one * x).prec, 3);
    EXPECT_TRUE((LaurentSeries() * x).is_zero());
    LaurentSeries tinv = pole(Scalar(0), 2).laurent(PointP1(0), 5);
    EXPECT_EQ((x * tinv).prec, 1);
}

TEST(OrderAt, Examples) {
    auto c = ctx_beta(1);
    SuperRationalFunction z2(c, RationalFunction::z() * RationalFunction::z());
    EXPECT_EQ(order_at(z2, PointP1(0)), 2);
    auto f = srf_constant(c, Scalar(1)) -
             SuperRationalFunction::basis(c, 1, 1u, pole(Scalar(0), 1));  // 1 - beta theta1 / z
    EXPECT_EQ(order_at(f, PointP1(0)), 0);
    EXPECT_EQ(order_at(SuperRationalFunction(c, pole(Scalar(0), 1)), PointP1::infinity()), 1);
    EXPECT_THROW(order_at(SuperRationalFunction::basis(c, 1, 1u, RationalFunction(Scalar(1))), PointP1(0)), AlgebraError);
}

TEST(Dlog, Examples) {
    auto c = ctx_beta(1);
    SuperRationalFunction z = srf_z(c);
    EXPECT_EQ(dlog(z), SuperRationalFunction(c, pole(Scalar(0), 1)));
    EXPECT_TRUE(dlog(srf_constant(c, Scalar(3))).is_zero());
    SuperRationalFunction zz1(c, RationalFunction::z() * RationalFunction(Polynomial::linear(Scalar(1))));
    EXPECT_EQ(dlog(zz1), SuperRationalFunction(c, pole(Scalar(0), 1) + pole(Scalar(1), 1)));
    EXPECT_THROW(dlog(SuperRationalFunction(c)), AlgebraError);
}

TEST(LogDecompose, Examples) {
    auto c = ctx_beta(1);
    auto bt = SuperRationalFunction::basis(c, 1, 1u, pole(Scalar(0), 1));  // beta theta1 / z
    auto f = srf_constant(c, Scalar(1)) + bt;
    auto d = log_decompose(f);
    EXPECT_EQ(d.reduced_part, RationalFunction(Scalar(1)));
    EXPECT_EQ(d.nilpotent_log, bt);
    EXPECT_EQ(exp_nilpotent(d.nilpotent_log), f);

    auto ce = make_context(BaseAlgebra::truncated("eps", 2), 1);
    auto eps = lift_constant(SuperElement::gen(ce, "eps"));
    auto g = (srf_constant(ce, Scalar(1)) + eps) * srf_z(ce);
    auto dg = log_decompose(g);
    EXPECT_EQ(dg.reduced_part, RationalFunction::z());
    EXPECT_EQ(dg.nilpotent_log, eps);
    EXPECT_TRUE(log_decompose(srf_z(ce)).nilpotent_log.is_zero());
}

TEST(LogDecompose, PropertyExpInvertsLog) {
    auto c = make_context(BaseAlgebra::tensor(BaseAlgebra::grassmann({"b1", "b2"}), BaseAlgebra::truncated("e", 3)), 1);
    std::mt19937_64 rng(23);
    std::vector<Scalar> pts{Scalar(0), Scalar(1), Scalar(-2)};
    for (int n = 0; n < 20; ++n) {
        SuperRationalFunction f(c);
        for (int k = 0; k < f.size(); ++k)
            if (c->parity_of(k) == 0 && (k == 0 || rng() % 3 == 0)) f[k] = random_rational(rng, pts);
        if (f[0].is_zero()) f[0] = RationalFunction::z();
        auto d = log_decompose(f);
        EXPECT_EQ(exp_nilpotent(d.nilpotent_log).scaled(d.reduced_part), f);
        // dlog(f) = dlog(f_red) + lambda'
        EXPECT_EQ(dlog(f), SuperRationalFunction(c, d.reduced_part.derivative() / d.reduced_part) + z_derivative(d.nilpotent_log));
    }
}

TEST(Residue, PropertyTotalResidueVanishesAndMatchesPartialFractions) {
    auto c = ctx_beta(1);
    std::mt19937_64 rng(29);
    std::vector<Scalar> pts{Scalar(0), Scalar(1), Scalar(Rational(1), Rational(2)), Scalar::frac(-1, 2)};
    for (int n = 0; n < 50; ++n) {
        SuperRationalFunction f(c);
        std::vector<Scalar> c_m1(static_cast<std::size_t>(f.size()) * pts.size(), Scalar(0));
        for (int k = 0; k < f.size(); ++k) {
            RationalFunction r;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                Scalar a(static_cast<long>(rng() % 7) - 3), b(static_cast<long>(rng() % 5) - 2);
                r += pole(pts[i], 1).scaled(a) + pole(pts[i], 2).scaled(b);
                c_m1[static_cast<std::size_t>(k) * pts.size() + i] = a;
            }
            r += RationalFunction::z().scaled(Scalar(static_cast<long>(rng() % 3)));
            f[k] = r;
        }
        SuperElement total = residue_dz(f, PointP1::infinity());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            SuperElement res = residue_dz(f, PointP1(pts[i]));
            total += res;
            for (int k = 0; k < f.size(); ++k) EXPECT_EQ(res[k], c_m1[static_cast<std::size_t>(k) * pts.size() + i]);
            EXPECT_EQ(res, laurent_expand(f, PointP1(pts[i]), 0).coeff(-1));
        }
        EXPECT_TRUE(total.is_zero());
    }
}
