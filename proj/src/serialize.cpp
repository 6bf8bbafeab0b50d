#include "bosonic/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bosonic/errors.hpp"

namespace bosonic {

double round12(double x)
{
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json to_json(const DensityMatrix& d)
{
    json re = json::array(), im = json::array();
    for (int i = 0; i < d.dim(); ++i)
        for (int j = 0; j < d.dim(); ++j) {
            re.push_back(round12(d.rho(i, j).real()));
            im.push_back(round12(d.rho(i, j).imag()));
        }
    return {{"schema", kSchemaVersion}, {"dim", d.dim()}, {"re", re}, {"im", im}, {"tail_mass", round12(d.tail_mass)}};
}

DensityMatrix density_from_json(const json& j)
{
    const int n = j.at("dim").get<int>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != n * n || static_cast<int>(im.size()) != n * n)
        throw DimMismatch("density record: re/im length is not dim^2");
    DensityMatrix d;
    d.rho.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) d.rho(i, k) = cplx(re[i * n + k].get<double>(), im[i * n + k].get<double>());
    d.tail_mass = j.value("tail_mass", 0.0);
    return d;
}

json to_json(const ChannelSpec& s)
{
    return {{"schema", kSchemaVersion}, {"family", family_name(s.family)}, {"kappa", round12(s.kappa)}, {"a", round12(s.a)}};
}

ChannelSpec spec_from_json(const json& j)
{
    return make_spec(parse_family(j.at("family").get<std::string>()), j.value("kappa", 1.0), j.value("a", 0.0));
}

json to_json(const XYPair& xy)
{
    json x = json::array(), y = json::array();
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            x.push_back(round12(xy.X(i, k)));
            y.push_back(round12(xy.Y(i, k)));
        }
    return {{"schema", kSchemaVersion}, {"X", x}, {"Y", y}};
}

XYPair xy_from_json(const json& j)
{
    XYPair xy;
    const auto& x = j.at("X");
    const auto& y = j.at("Y");
    if (x.size() != 4 || y.size() != 4) throw DimMismatch("XYPair record needs 4 + 4 reals");
    for (int i = 0; i < 4; ++i) {
        xy.X(i / 2, i % 2) = x[i].get<double>();
        xy.Y(i / 2, i % 2) = y[i].get<double>();
    }
    return xy;
}

json to_json(const KrausFamily& fam, double drop)
{
    json ops = json::array();
    for (const CMat& w : fam.ops) {
        json trip = json::array();
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index k = 0; k < w.cols(); ++k)
                if (std::abs(w(i, k)) > drop)
                    trip.push_back({i, k, round12(w(i, k).real()), round12(w(i, k).imag())});
        ops.push_back(std::move(trip));
    }
    json j = {{"schema", kSchemaVersion},
              {"spec", to_json(fam.spec)},
              {"index_kind", fam.index_kind == IndexKind::Discrete ? "discrete" : "quadrature"},
              {"dim", fam.dim()},
              {"completeness_defect", round12(fam.completeness_defect)},
              {"origin", fam.origin},
              {"operators", ops}};
    if (fam.index_kind == IndexKind::Discrete) {
        j["ell_max"] = fam.ell_max;
    } else {
        json nodes = json::array(), weights = json::array();
        for (double q : fam.nodes) nodes.push_back(round12(q));
        for (double w : fam.weights) weights.push_back(round12(w));
        j["nodes"] = nodes;
        j["weights"] = weights;
    }
    if (!fam.labels.empty()) j["labels"] = fam.labels;
    return j;
}

KrausFamily family_from_json(const json& j)
{
    KrausFamily fam;
    fam.spec = spec_from_json(j.at("spec"));
    fam.index_kind = j.at("index_kind").get<std::string>() == "discrete" ? IndexKind::Discrete : IndexKind::Quadrature;
    const int n = j.at("dim").get<int>();
    fam.completeness_defect = j.value("completeness_defect", 0.0);
    fam.origin = j.value("origin", std::string("closed-form"));
    fam.ell_max = j.value("ell_max", 0);
    if (j.contains("nodes")) fam.nodes = j.at("nodes").get<std::vector<double>>();
    if (j.contains("weights")) fam.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("labels")) fam.labels = j.at("labels").get<std::vector<std::pair<int, int>>>();
    for (const auto& trip : j.at("operators")) {
        CMat w = CMat::Zero(n, n);
        for (const auto& t : trip) {
            int r = t[0].get<int>(), c = t[1].get<int>();
            if (r < 0 || c < 0 || r >= n || c >= n) throw DimMismatch("operator triplet outside dim");
            w(r, c) = cplx(t[2].get<double>(), t[3].get<double>());
        }
        fam.ops.push_back(std::move(w));
    }
    return fam;
}

void validate(const RunConfig& c)
{
    if (c.n_cut < 8) throw InvalidParameter("n_cut must be >= 8");
    for (const auto& [name, v] : c.tolerances)
        if (!(v > 0.0)) throw InvalidParameter("tolerance " + name + " must be positive");
}

double tolerance(const RunConfig& c, const std::string& name, double fallback)
{
    auto it = c.tolerances.find(name);
    return it == c.tolerances.end() ? fallback : it->second;
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace bosonic
