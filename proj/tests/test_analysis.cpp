#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bosonic/analysis.hpp"
#include "bosonic/errors.hpp"
#include "bosonic/special.hpp"

using namespace bosonic;

namespace {

KrausFamily disc(Family f, double k, int n) { return build_discrete(make_spec(f, k), -1, n); }

DensityMatrix superposition(int n)
{
    // (|0> + e^{i pi/5}|1>)/sqrt2: odd cumulants in both quadratures
    CVec v = CVec::Zero(n);
    v(0) = 1.0 / std::sqrt(2.0);
    v(1) = std::polar(1.0 / std::sqrt(2.0), std::numbers::pi / 5);
    return DensityMatrix{v * v.adjoint(), 0.0};
}

}  // namespace

TEST(Thermal, StepAndFixedPoints)
{
    EXPECT_NEAR(thermal_step(make_spec(Family::C2, 1.5), 1.0), 3.5, 1e-14);
    EXPECT_NEAR(thermal_step(make_spec(Family::C1, 0.4), 1.0), 1.0, 1e-14);
    EXPECT_NEAR(*fixed_point(make_spec(Family::D, 0.8)), 41.0 / 9.0, 1e-14);
    EXPECT_NEAR(*fixed_point(make_spec(Family::C1, 0.3)), 1.0, 0.0);
    EXPECT_FALSE(fixed_point(make_spec(Family::C2, 2.0)));
    EXPECT_FALSE(fixed_point(make_spec(Family::D, 1.2)));
    EXPECT_FALSE(fixed_point(make_spec(Family::A2)));
    ChannelSpec d = make_spec(Family::D, 0.8);
    EXPECT_NEAR(thermal_step(d, *fixed_point(d)), *fixed_point(d), 1e-13);
    EXPECT_THROW(thermal_step(d, 0.2), InvalidParameter);
}

TEST(Thermal, ConvergenceRateIsKappaSquared)
{
    ChannelSpec s = make_spec(Family::D, 0.8);
    Trajectory t = iterate(build_discrete(s, -1, 64), thermal_state(10.0, 64), 12);
    const double fp = *fixed_point(s);
    for (int k = 4; k < 12; ++k) {
        double rate = (t.a0_estimate[k + 1] - fp) / (t.a0_estimate[k] - fp);
        EXPECT_NEAR(rate, 0.64, 0.064) << k;
    }
    EXPECT_EQ(t.csv().rfind("step,a0_estimate,trace_distance\n0,", 0), 0u);

    Trajectory c = iterate(disc(Family::C1, 0.7, 48), thermal_state(3.0, 48), 10);
    EXPECT_NEAR((c.a0_estimate[6] - 1.0) / (c.a0_estimate[5] - 1.0), 0.49, 0.049);
}

TEST(Cumulants, VacuumAndMeans)
{
    CumulantTable v = cumulants(fock_state(0, 24), 4);
    EXPECT_EQ(v(0, 0), 0.0);
    EXPECT_NEAR(v(2, 0), 1.0, 1e-6);
    EXPECT_NEAR(v(0, 2), 1.0, 1e-6);
    for (int m1 = 0; m1 <= 4; ++m1)
        for (int m2 = 0; m1 + m2 <= 4; ++m2)
            if (m1 + m2 >= 3) EXPECT_LT(std::abs(v(m1, m2)), 1e-6);

    DensityMatrix c = coherent_state({0.4, -0.3}, 32, 1e-12);
    CumulantTable t = cumulants(c, 3);
    EXPECT_NEAR(t(0, 1), std::sqrt(2.0) * std::sqrt(2.0) * 0.4, 1e-5);   // sqrt2 <q>, <q> = sqrt2 Re alpha
    EXPECT_NEAR(t(1, 0), -std::sqrt(2.0) * std::sqrt(2.0) * -0.3, 1e-5); // -sqrt2 <p>
    EXPECT_LT(std::abs(t(2, 1)), 1e-6);
    EXPECT_FALSE(t.low_confidence);
    EXPECT_TRUE(cumulants(c, 5).low_confidence);
    EXPECT_THROW(cumulants(c, 7), InvalidParameter);
}

TEST(Cumulants, FockOneFourthOrder)
{
    // log chi = log(1 - r^2) - r^2/2, so gamma40 = gamma04 = -12 and gamma22 = -4
    CumulantTable t = cumulants(fock_state(1, 24), 4);
    EXPECT_NEAR(t(4, 0), -12.0, 0.12);
    EXPECT_NEAR(t(0, 4), -12.0, 0.12);
    EXPECT_NEAR(t(2, 2), -4.0, 0.04);
}

TEST(Cumulants, TransformationLaws)
{
    DensityMatrix p = superposition(48);
    CumulantTable in = cumulants(p, 4);
    struct Law {
        ChannelSpec spec;
        bool parity;  // (-1)^{m1}
    };
    for (const Law& law : {Law{make_spec(Family::C1, 0.7), false}, Law{make_spec(Family::C2, 1.3), false},
                           Law{make_spec(Family::D, 0.8), true}}) {
        CumulantTable out = cumulants(apply(build_discrete(law.spec, -1, 48), p), 4);
        const double k = law.spec.kappa;
        for (int m1 = 0; m1 <= 4; ++m1)
            for (int m2 = 0; m1 + m2 <= 4; ++m2) {
                if (m1 + m2 < 3 || std::abs(in(m1, m2)) < 1e-2) continue;
                double sign = law.parity && (m1 % 2) ? -1.0 : 1.0;
                double want = sign * std::pow(k, m1 + m2) * in(m1, m2);
                EXPECT_NEAR(out(m1, m2), want, 1e-2 * std::abs(want)) << to_string(law.spec) << " " << m1 << m2;
            }
    }
}

TEST(Zeno, ClosedForms)
{
    EXPECT_NEAR(zeno_kappa(ZenoMode::Attenuator, 1, 1, std::numbers::pi / 2), 0.0, 1e-16);
    EXPECT_NEAR(zeno_kappa(ZenoMode::Amplifier, 1, 1, 2.0), std::cosh(2.0), 1e-14);
    EXPECT_NEAR(zeno_kappa(ZenoMode::Amplifier, 1, 1, 2.0), 3.7622, 1e-4);
    EXPECT_NEAR(zeno_kappa(ZenoMode::Attenuator, 10, 10, std::numbers::pi / 2), 0.883485, 1e-6);
    // large-N behaviour 1 - l pi^2 / (8 N^2)
    const int N = 400;
    EXPECT_NEAR(zeno_kappa(ZenoMode::Attenuator, N, N, std::numbers::pi / 2), 1 - std::pow(std::numbers::pi, 2) / (8 * N),
                1e-5);
    EXPECT_THROW(zeno_kappa(ZenoMode::Attenuator, 0, 1, 1.0), InvalidParameter);
}

TEST(Gram, QuantumLimitedFamiliesAreExtremal)
{
    for (int K : {3, 5, 6}) {
        EXPECT_EQ(gram_rank(disc(Family::D, 0.5, 48), K).numerical_rank, (K + 1) * (K + 1));
        EXPECT_EQ(gram_rank(disc(Family::C1, 0.7, 48), K).numerical_rank, (K + 1) * (K + 1));
        EXPECT_EQ(gram_rank(disc(Family::C2, 1.3, 80), K).numerical_rank, (K + 1) * (K + 1));
    }
    GramReport a2 = gram_rank(build_continuous(make_spec(Family::A2), 64, 48), 6);
    EXPECT_EQ(a2.numerical_rank, 49);
    EXPECT_EQ(a2.size(), 49);
}

TEST(Gram, UnitPhaseConjugatorIsDoublyStochasticAndExtremal)
{
    KrausFamily d1 = disc(Family::D, 1.0, 64);
    CMat s = CMat::Zero(64, 64);
    for (const CMat& w : d1.ops) s += w * w.adjoint();
    EXPECT_LT((s.topLeftCorner(10, 10) - CMat::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_EQ(gram_rank(d1, 5).numerical_rank, 36);
}

TEST(Gram, CutoffTooSmallIsDetected)
{
    EXPECT_THROW(gram_rank(build_discrete(make_spec(Family::C1, 0.7), -1, 10), 6), CutoffTooSmall);
}

TEST(Gram, PhaseConjugatorBlocksMatchClosedForm)
{
    // d(delta)_{l j}: entry of T_{l+delta}^dag T_l at |j+delta><j|
    const double k = 0.5;
    KrausFamily fam = disc(Family::D, k, 48);
    for (int delta = 0; delta <= 3; ++delta)
        for (int l = 0; l <= 5; ++l) {
            CMat p = fam.ops[l + delta].adjoint() * fam.ops[l];
            for (int j = 0; j <= l; ++j) {
                double want = sqrt_binomial(l, j) * sqrt_binomial(l + delta, j + delta) *
                              std::pow(1 + k * k, -j - delta / 2.0 - 1) * std::pow(1 + 1 / (k * k), -(l - j));
                EXPECT_NEAR(p(j + delta, j).real(), want, 1e-10);
            }
        }
}

TEST(Gram, AttenuatorAndAmplifierBlocks)
{
    const double k = 0.7;
    KrausFamily b = disc(Family::C1, k, 48);
    for (int delta = 0; delta <= 2; ++delta)
        for (int l = 0; l <= 4; ++l) {
            CMat p = b.ops[l + delta].adjoint() * b.ops[l];
            for (int j = l; j <= l + 6; ++j) {
                double want = sqrt_binomial(j, l) * sqrt_binomial(j + delta, l + delta) *
                              std::pow(1 - k * k, l + delta / 2.0) * std::pow(k, 2 * (j - l));
                EXPECT_NEAR(p(j + delta, j).real(), want, 1e-10);
            }
        }
    const double g = 1.3;
    KrausFamily a = disc(Family::C2, g, 64);
    for (int delta = 0; delta <= 2; ++delta)
        for (int l = 0; l <= 4; ++l) {
            CMat p = a.ops[l + delta].adjoint() * a.ops[l];
            for (int j = 0; j <= 6; ++j) {
                double want = std::pow(g, -2) * std::sqrt(std::exp(2 * log_factorial(l + j + delta) - log_factorial(l + delta) -
                                                                   log_factorial(j) - log_factorial(j + delta) - log_factorial(l))) *
                              std::pow(1 - 1 / (g * g), (2 * l + delta) / 2.0) * std::pow(g, -(2 * j + delta));
                EXPECT_NEAR(p(j, j + delta).real(), want, 1e-10);
            }
        }
}

TEST(Products, SequentialApplication)
{
    KrausFamily a = disc(Family::C2, 1.3, 40), b = disc(Family::C1, 0.6, 40);
    const int K = static_cast<int>(std::max(a.ops.size(), b.ops.size()));
    KrausFamily ab = product_family(a, b, K);
    EXPECT_EQ(ab.spec.family, Family::C1);
    EXPECT_NEAR(ab.spec.kappa, 0.78, 1e-12);
    DensityMatrix t = thermal_state(2.0, 40, 1.0);
    EXPECT_LT(trace_distance(apply(ab, t), apply(a, apply(b, t))), 1e-9);
    EXPECT_EQ(gram_rank(product_family(a, b, 5), 5, 1e-8, GramTarget::Operators).numerical_rank, 36);
}

TEST(Products, AttenuatorAfterConjugatorVanishesAboveDiagonal)
{
    KrausFamily bt = product_family(disc(Family::C1, 0.7, 24), disc(Family::D, 0.5, 24), 6);
    for (size_t i = 0; i < bt.ops.size(); ++i) {
        auto [m, n] = bt.labels[i];
        if (m > n) EXPECT_LT(bt.ops[i].cwiseAbs().maxCoeff(), 1e-300);
    }
    GramReport r = gram_rank(bt, 6, 1e-8, GramTarget::Operators);
    EXPECT_LT(r.numerical_rank, 49);
    EXPECT_THROW(product_family(disc(Family::C1, 0.7, 24), disc(Family::D, 0.5, 20), 6), DimMismatch);
}

TEST(Products, NoFiniteRankCombinations)
{
    // sum_l c_l B_l is upper triangular with diagonal c_0 k^m: rank >= N - (first nonzero l)
    const int N = 24;
    KrausFamily b = disc(Family::C1, 0.7, N);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> lead(0, 5);
    for (int t = 0; t < 200; ++t) {
        int first = lead(rng);
        CMat s = CMat::Zero(N, N);
        for (int l = first; l < 12; ++l) s += cplx(g(rng), g(rng)) * b.ops[l];
        // zero below the first nonzero band, nonzero on it: triangular, so rank >= N - first
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                if (c < r + first) ASSERT_EQ(s(r, c), cplx(0.0));
                if (c == r + first) ASSERT_GT(std::abs(s(r, c)), 0.0) << t;
            }
    }
}

TEST(Classicality, ScalingLaws)
{
    std::vector<cplx> grid;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) grid.emplace_back(0.5 * i, 0.5 * j);
    auto c2 = classicality_check(make_spec(Family::C2, 1.5), {fock_state(1, 48)}, grid, 1e-6);
    EXPECT_TRUE(c2.passed) << c2.detail;
    EXPECT_EQ(c2.checked, 25);

    auto c1 = classicality_check(make_spec(Family::C1, 0.6),
                                 {coherent_state({0.8, 0.3}, 48, 1e-14), phase_averaged_state(1.2, 48, 1e-14)}, {}, 1e-8);
    EXPECT_TRUE(c1.passed) << c1.detail;
    EXPECT_EQ(c1.checked, 2);

    auto d = classicality_check(make_spec(Family::D, 0.8), {coherent_state({0.5, -0.2}, 48, 1e-14), thermal_state(2.0, 48, 1e-6)},
                                grid, 1e-6);
    EXPECT_TRUE(d.passed) << d.detail;
    EXPECT_GE(d.min_weight, 0.0);

    auto a2 = classicality_check(make_spec(Family::A2), {fock_state(2, 32)}, grid, 1e-6);
    EXPECT_TRUE(a2.passed) << a2.detail;

    EXPECT_THROW(classicality_check(make_spec(Family::C2, 1.5), {fock_state(1, 16)}, {}, 1e-6), GridTooCoarse);
    EXPECT_THROW(classicality_check(make_spec(Family::B1, 1.0, 0.3), {fock_state(1, 16)}, grid), UnsupportedFamily);
}

TEST(Diagonality, ConstructedFamilies)
{
    auto c1 = simultaneous_diagonality(disc(Family::C1, 0.6, 32));
    EXPECT_TRUE(c1.diagonal);
    EXPECT_EQ(c1.basis, "fock");
    EXPECT_TRUE(simultaneous_diagonality(disc(Family::D, 0.8, 32)).diagonal);
    EXPECT_TRUE(simultaneous_diagonality(product_family(disc(Family::C2, 1.3, 32), disc(Family::C1, 0.5, 32), 8)).diagonal);
    EXPECT_TRUE(simultaneous_diagonality(build_continuous(make_spec(Family::B1, 1.0, 0.4), 40, 24)).diagonal);
    auto a2 = simultaneous_diagonality(build_continuous(make_spec(Family::A2), 48, 24));
    EXPECT_TRUE(a2.diagonal);
    EXPECT_EQ(a2.basis, "position");
    auto r1 = simultaneous_diagonality(rank_one_D(0.8, gauss_hermite_grid(40), 16));
    EXPECT_FALSE(r1.diagonal);
    EXPECT_EQ(r1.basis, "none");
}
