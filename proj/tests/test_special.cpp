#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bosonic/errors.hpp"
#include "bosonic/special.hpp"

using namespace bosonic;

TEST(Laguerre, LowOrdersMatchPolynomials)
{
    for (double x : {0.0, 0.3, 1.7, 5.0}) {
        EXPECT_DOUBLE_EQ(laguerre(0, 2.0, x), 1.0);
        EXPECT_NEAR(laguerre(1, 2.0, x), 3.0 - x, 1e-14);
        EXPECT_NEAR(laguerre(2, 0.0, x), 1.0 - 2.0 * x + 0.5 * x * x, 1e-13);
    }
}

TEST(Laguerre, ValueAtZeroIsBinomial)
{
    // L_n^a(0) = C(n + a, n)
    EXPECT_NEAR(laguerre(5, 3.0, 0.0), 56.0, 1e-11);
    EXPECT_NEAR(laguerre(10, 0.0, 0.0), 1.0, 1e-13);
}

TEST(Hermite, FunctionsAreOrthonormalUnderScaledRule)
{
    GaussHermite gh = gauss_hermite(40);
    for (int m = 0; m < 12; ++m)
        for (int n = 0; n < 12; ++n) {
            double s = 0.0;
            for (int i = 0; i < 40; ++i) s += gh.scaled[i] * hermite_psi(m, gh.nodes[i]) * hermite_psi(n, gh.nodes[i]);
            EXPECT_NEAR(s, m == n ? 1.0 : 0.0, 1e-12) << m << "," << n;
        }
}

TEST(Hermite, AllMatchesSingle)
{
    auto v = hermite_psi_all(30, 1.3);
    for (int n = 0; n <= 30; ++n) EXPECT_NEAR(v[n], hermite_psi(n, 1.3), 1e-14);
    EXPECT_NEAR(v[0], std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * 1.69), 1e-15);
}

TEST(Hermite, GuardsHugeOrders) { EXPECT_THROW(hermite_psi_all(5000, 0.1), Overflow); }

TEST(GaussHermite, WeightsAndSymmetry)
{
    for (int order : {8, 33, 96}) {
        GaussHermite gh = gauss_hermite(order);
        double sum = 0.0, m2 = 0.0;
        for (int i = 0; i < order; ++i) {
            sum += gh.weights[i];
            m2 += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
            EXPECT_NEAR(gh.nodes[i], -gh.nodes[order - 1 - i], 1e-12);
        }
        EXPECT_NEAR(sum, std::sqrt(std::numbers::pi), 1e-13);
        EXPECT_NEAR(m2, std::sqrt(std::numbers::pi) / 2, 1e-13);
    }
}

TEST(Combinatorics, FactorialAndBinomial)
{
    EXPECT_NEAR(log_factorial(10), std::log(3628800.0), 1e-12);
    EXPECT_NEAR(log_factorial(0), 0.0, 0.0);
    EXPECT_NEAR(sqrt_binomial(5, 2), std::sqrt(10.0), 1e-14);
    EXPECT_NEAR(sqrt_binomial(60, 30), std::sqrt(118264581564861424.0), 1e-5 * std::sqrt(118264581564861424.0));
}
