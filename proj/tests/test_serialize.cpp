#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bosonic/errors.hpp"
#include "bosonic/serialize.hpp"

using namespace bosonic;

TEST(Serialize, Round12)
{
    EXPECT_EQ(round12(0.1234567890123456), 0.123456789012);
    EXPECT_EQ(round12(0.0), 0.0);
    EXPECT_EQ(round12(-12345.678901234567), -12345.6789012);
}

TEST(Serialize, DensityRoundTrip)
{
    DensityMatrix c = coherent_state({0.3, 0.4}, 12);
    json j = to_json(c);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["dim"], 12);
    EXPECT_EQ(j["re"].size(), 144u);
    DensityMatrix back = density_from_json(json::parse(j.dump()));
    EXPECT_LT((back.rho - c.rho).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(back.tail_mass, c.tail_mass, 1e-12);

    j["re"].erase(0);
    EXPECT_THROW(density_from_json(j), DimMismatch);
}

TEST(Serialize, SpecAndXY)
{
    ChannelSpec s = make_spec(Family::C2, 1.5, 0.25);
    json j = to_json(s);
    EXPECT_EQ(j["family"], "C2");
    ChannelSpec back = spec_from_json(j);
    EXPECT_EQ(back.family, Family::C2);
    EXPECT_DOUBLE_EQ(back.kappa, 1.5);
    EXPECT_DOUBLE_EQ(back.a, 0.25);

    XYPair xy = kraus_xy(make_spec(Family::D, 0.7));
    XYPair xb = xy_from_json(to_json(xy));
    EXPECT_LT((xb.X - xy.X).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((xb.Y - xy.Y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Serialize, FamilyRoundTripKeepsBandStructure)
{
    KrausFamily fam = build_discrete(make_spec(Family::C1, 0.7), -1, 16);
    json j = to_json(fam);
    EXPECT_EQ(j["index_kind"], "discrete");
    // B_l has exactly N - l nonzero entries
    EXPECT_EQ(j["operators"][3].size(), 13u);
    KrausFamily back = family_from_json(json::parse(j.dump()));
    ASSERT_EQ(back.ops.size(), fam.ops.size());
    for (size_t l = 0; l < fam.ops.size(); ++l) EXPECT_LT((back.ops[l] - fam.ops[l]).cwiseAbs().maxCoeff(), 1e-12);

    KrausFamily a2 = build_continuous(make_spec(Family::A2), 32, 8);
    json ja = to_json(a2);
    EXPECT_EQ(ja["nodes"].size(), 32u);
    EXPECT_EQ(family_from_json(ja).nodes.size(), 32u);
}

TEST(Serialize, RunConfigValidation)
{
    RunConfig c;
    EXPECT_NO_THROW(validate(c));
    c.n_cut = 4;
    EXPECT_THROW(validate(c), InvalidParameter);
    c.n_cut = 16;
    c.tolerances["trace"] = -1.0;
    EXPECT_THROW(validate(c), InvalidParameter);
    c.tolerances["trace"] = 1e-9;
    EXPECT_DOUBLE_EQ(tolerance(c, "trace", 1.0), 1e-9);
    EXPECT_DOUBLE_EQ(tolerance(c, "other", 2.0), 2.0);
}

TEST(Serialize, AtomicWrite)
{
    auto dir = std::filesystem::temp_directory_path() / "bosonic_atomic_test";
    std::filesystem::remove_all(dir);
    std::string path = (dir / "out.csv").string();
    write_atomic(path, "a,b\n1,2\n");
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(all, "a,b\n1,2\n");
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
}
