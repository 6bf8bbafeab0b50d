#pragma once

#include <json.hpp>
#include <map>
#include <string>

#include "bosonic/fock.hpp"
#include "bosonic/kraus.hpp"
#include "bosonic/phase_space.hpp"

namespace bosonic {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Rounds to 12 significant digits so that dumps are stable.
double round12(double x);

json to_json(const DensityMatrix& d);
DensityMatrix density_from_json(const json& j);

json to_json(const ChannelSpec& s);
ChannelSpec spec_from_json(const json& j);

json to_json(const XYPair& xy);
XYPair xy_from_json(const json& j);

// Operators are lists of [row, col, re, im] triplets; entries with
// |w| <= drop are omitted.
json to_json(const KrausFamily& fam, double drop = 1e-15);
KrausFamily family_from_json(const json& j);

enum class OutputFormat { Json, Csv };

struct RunConfig {
    int n_cut = 48;
    int ell_max = -1;  // -1: choose from the tail estimate
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 20240611;
    OutputFormat output_format = OutputFormat::Csv;
};

// Throws InvalidParameter for n_cut < 8 or a nonpositive tolerance.
void validate(const RunConfig& c);
double tolerance(const RunConfig& c, const std::string& name, double fallback);

// Writes path via a sibling temporary and rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace bosonic
