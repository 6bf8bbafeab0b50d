#include <gtest/gtest.h>

#include <random>

#include "bosonic/errors.hpp"
#include "bosonic/scheme.hpp"

using namespace bosonic;

namespace {

CMat closed(const ChannelSpec& s, int l, int n)
{
    switch (s.family) {
    case Family::D: return kraus_D(s.kappa, l, n, n);
    case Family::C1: return kraus_C1(s.kappa, l, n, n);
    default: return kraus_C2(s.kappa, l, n, n);
    }
}

}  // namespace

TEST(GeneratingForm, ClosedFormMatchesQuadrature)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (auto spec : {make_spec(Family::D, 0.6), make_spec(Family::C1, 0.8), make_spec(Family::C2, 1.5)}) {
        MixMatrix M = mix_matrix(spec);
        GeneratingForm f = generating_form(M);
        EXPECT_LT(f.self_check_error, 1e-10);
        for (int t = 0; t < 3; ++t) {
            Eigen::Vector4d v(u(rng), u(rng), u(rng), u(rng));
            EXPECT_NEAR(f(v), generating_integral(M, v), 1e-10);
        }
    }
}

TEST(Scheme, MatchesClosedFormOperators)
{
    for (auto spec : {make_spec(Family::D, 0.6), make_spec(Family::D, 1.3), make_spec(Family::C1, 0.4),
                      make_spec(Family::C1, 0.9), make_spec(Family::C2, 1.2), make_spec(Family::C2, 1.8)}) {
        KrausFamily fam = kraus_from_scheme(mix_matrix(spec), 10, 21);
        EXPECT_EQ(fam.spec.family, spec.family);
        EXPECT_NEAR(fam.spec.kappa, spec.kappa, 1e-12);
        EXPECT_EQ(fam.origin, "scheme-derived");
        for (int l = 0; l <= 10 && l < static_cast<int>(fam.ops.size()); ++l) {
            double err = (fam.ops[l].topLeftCorner(21, 21) - closed(spec, l, 21)).cwiseAbs().maxCoeff();
            EXPECT_LT(err, 1e-10) << to_string(spec) << " l=" << l;
        }
    }
}

TEST(Scheme, UnrecognizedCouplingIsLabelled)
{
    MixMatrix M;
    M << 0.9, 0.3, -0.2, 1.1;
    KrausFamily fam = kraus_from_scheme(M, 8, 12);
    EXPECT_EQ(fam.origin, "scheme-derived (general M)");
}

TEST(Scheme, OrderGuard)
{
    GeneratingForm f = generating_form(mix_matrix(make_spec(Family::C1, 0.5)));
    EXPECT_THROW(matrix_element(f, 130, 0, 130, 0), OrderTooLarge);
}

TEST(PositionKraus, A2AndShearAgreeWithClosedForm)
{
    MixMatrix a2;
    a2 << 0.0, 1.0, 1.0, -1.0;
    KrausFamily p = position_kraus(a2, 64, 24);
    EXPECT_EQ(p.spec.family, Family::A2);
    EXPECT_EQ(p.origin, "scheme-derived (mixed basis)");
    KrausFamily ref = build_continuous(make_spec(Family::A2), 64, 24);
    DensityMatrix rho = random_mixed_state(3, 2, 24);
    EXPECT_LT(trace_distance(apply(p, rho), apply(ref, rho)), 1e-10);

    MixMatrix sh;
    sh << 1.0, -std::sqrt(0.5), 0.0, 1.0;
    KrausFamily b = position_kraus(sh, 48, 32);
    EXPECT_EQ(b.spec.family, Family::B1);
    KrausFamily bref = build_continuous(make_spec(Family::B1, 1.0, 0.5), 48, 32);
    DensityMatrix c = coherent_state({0.4, 0.2}, 32, 1e-10);
    EXPECT_LT(trace_distance(apply(b, c), apply(bref, c)), 1e-8);

    MixMatrix bad;
    bad << 1.0, 2.0, 3.0, 4.0;
    EXPECT_THROW(position_kraus(bad, 40, 16), UnsupportedShape);
}
