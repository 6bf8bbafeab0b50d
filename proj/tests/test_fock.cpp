#include <gtest/gtest.h>

#include <cmath>

#include "bosonic/errors.hpp"
#include "bosonic/fock.hpp"

using namespace bosonic;

TEST(States, FockAndThermal)
{
    DensityMatrix f = fock_state(3, 10);
    EXPECT_DOUBLE_EQ(f.rho(3, 3).real(), 1.0);
    EXPECT_TRUE(is_density(f));

    DensityMatrix t = thermal_state(3.0, 64);
    EXPECT_NEAR(mean_photon(t), 1.0, 1e-9);
    EXPECT_NEAR(thermal_parameter_estimate(t), 3.0, 1e-8);
    EXPECT_NEAR(t.trace() + t.tail_mass, 1.0, 1e-14);
    EXPECT_THROW(thermal_state(0.5, 16), InvalidParameter);
}

TEST(States, CoherentTailAndLimit)
{
    DensityMatrix c = coherent_state({1.0, 0.5}, 32);
    EXPECT_NEAR(c.trace() + c.tail_mass, 1.0, 1e-14);
    EXPECT_NEAR(mean_photon(c), 1.25, 1e-9);
    EXPECT_THROW(coherent_state({5.0, 0.0}, 16), CutoffTooSmall);
}

TEST(States, PhaseAveragedIsPoissonian)
{
    DensityMatrix p = phase_averaged_state(2.0, 48);
    double n1 = 0.0, n2 = 0.0;
    for (int n = 0; n < 48; ++n) {
        n1 += n * p.rho(n, n).real();
        n2 += n * n * p.rho(n, n).real();
    }
    n1 /= p.trace();
    n2 /= p.trace();
    EXPECT_NEAR(n1, 2.0, 1e-9);
    EXPECT_NEAR((n2 - n1 * n1) / n1, 1.0, 1e-8);
    EXPECT_NEAR(std::abs(p.rho(0, 1)), 0.0, 0.0);
}

TEST(States, RandomMixedIsDensityAndDeterministic)
{
    DensityMatrix a = random_mixed_state(7, 3, 20), b = random_mixed_state(7, 3, 20);
    EXPECT_TRUE(is_density(a));
    EXPECT_EQ((a.rho - b.rho).norm(), 0.0);
    EXPECT_NEAR(a.trace(), 1.0, 1e-13);
}

TEST(Displacement, VacuumColumnIsCoherent)
{
    cplx xi(0.4, -0.7);
    CMat d = displacement_op(xi, 40);
    CVec c = coherent_vector(xi, 40);
    EXPECT_LT((d.col(0) - c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Displacement, AdjointIsInverseShift)
{
    cplx xi(0.9, 0.2);
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 8; ++n)
            EXPECT_NEAR(std::abs(displacement_element(m, n, xi) - std::conj(displacement_element(n, m, -xi))), 0.0, 1e-14);
}

TEST(Displacement, UnitaryOnLowBlock)
{
    CMat d = displacement_op({0.5, 0.3}, 60);
    CMat g = (d.adjoint() * d).topLeftCorner(10, 10);
    EXPECT_LT((g - CMat::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Displacement, OverflowGuard) { EXPECT_THROW(displacement_op({400.0, 0.0}, 64), Overflow); }

TEST(CharacteristicFunctions, VacuumAndFockOne)
{
    DensityMatrix vac = fock_state(0, 16), one = fock_state(1, 16);
    for (cplx xi : {cplx(0.3, 0.1), cplx(-0.8, 0.5)}) {
        double r2 = std::norm(xi);
        EXPECT_NEAR(std::abs(char_weyl(vac, xi) - std::exp(-r2 / 2)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(char_weyl(one, xi) - (1.0 - r2) * std::exp(-r2 / 2)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(char_ordered(vac, xi, Ordering::Normal) - 1.0), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(char_ordered(vac, xi, Ordering::Antinormal) - std::exp(-r2)), 0.0, 1e-14);
    }
}

TEST(QFunction, VacuumGaussian)
{
    DensityMatrix vac = fock_state(0, 16);
    EXPECT_NEAR(q_function(vac, {0.6, -0.2}), std::exp(-0.4), 1e-14);
}

TEST(TraceDistance, BasicProperties)
{
    DensityMatrix a = fock_state(0, 8), b = fock_state(1, 8);
    EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-14);
    EXPECT_NEAR(trace_distance(a, a), 0.0, 0.0);
    EXPECT_THROW(trace_distance(a, fock_state(0, 9)), DimMismatch);
}
