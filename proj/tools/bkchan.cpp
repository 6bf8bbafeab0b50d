// bkchan: command-line driver for the bosonic channel library.
#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "bosonic/analysis.hpp"
#include "bosonic/errors.hpp"
#include "bosonic/kraus.hpp"
#include "bosonic/phase_space.hpp"
#include "bosonic/scheme.hpp"
#include "bosonic/serialize.hpp"

using namespace bosonic;

namespace {

constexpr int kExitDefect = 2;
constexpr int kExitPair = 3;
constexpr int kExitInvariant = 4;

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FAMILY[:kappa[:a]]; families without kappa take FAMILY[:a].
ChannelSpec parse_spec(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty() || parts.size() > 3) throw InvalidParameter("bad channel spec '" + text + "'");
    Family f = parse_family(parts[0]);
    std::vector<double> nums;
    for (size_t i = 1; i < parts.size(); ++i) nums.push_back(std::stod(parts[i]));
    if (has_kappa(f)) {
        return make_spec(f, nums.size() > 0 ? nums[0] : 1.0, nums.size() > 1 ? nums[1] : 0.0);
    }
    if (nums.size() > 1) throw InvalidParameter(parts[0] + " takes no kappa: use " + parts[0] + ":a");
    return make_spec(f, 1.0, nums.empty() ? 0.0 : nums[0]);
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');)
        if (!p.empty()) out.push_back(std::stod(p));
    if (out.empty()) throw InvalidParameter("empty list '" + text + "'");
    return out;
}

std::string output_dir()
{
    const char* env = std::getenv("BK_OUTPUT_DIR");
    return env && *env ? env : ".";
}

std::string out_path(const std::string& name) { return (std::filesystem::path(output_dir()) / name).string(); }

std::string num(double x)
{
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void require(bool ok, const std::string& invariant, const std::string& detail)
{
    if (!ok) throw InvariantViolation(invariant + ": " + detail);
}

// ---- kraus ---------------------------------------------------------------

struct KrausArgs {
    std::string family;
    double kappa = 1.0, a = 0.0;
    int ncut = 32, ell_max = -1, nodes = 64;
};

int cmd_kraus(const KrausArgs& k)
{
    ChannelSpec spec = make_spec(parse_family(k.family), k.kappa, k.a);
    if (spec.family == Family::B2 || !spec.quantum_limited()) {
        std::cerr << "noisy: use compose/synthesize\n";
        return kExitDefect;
    }
    KrausFamily fam;
    try {
        if (spec.family == Family::A2 || spec.family == Family::B1) fam = build_continuous(spec, k.nodes, k.ncut);
        else fam = build_discrete(spec, k.ell_max, k.ncut);
    } catch (const DefectTooLarge& e) {
        std::cerr << e.what() << "\n";
        return kExitDefect;
    } catch (const UnsupportedFamily& e) {
        std::cerr << e.what() << "\n";
        return kExitDefect;
    }
    std::cout << to_json(fam).dump() << "\n";
    std::cout << "completeness_defect " << num(fam.completeness_defect) << "\n";
    return 0;
}

// ---- compose -------------------------------------------------------------

struct ComposeArgs {
    std::string first, second;
    double lambda = 1.0, theta = 0.0;
    bool positioned = false, verify = false, sequential = false;
};

int cmd_compose(const ComposeArgs& c)
{
    ChannelSpec outer = parse_spec(c.first), inner = parse_spec(c.second);
    if (c.sequential) std::swap(outer, inner);
    ChannelSpec result;
    XYPair check;
    try {
        if (c.positioned) {
            result = table2_compose(outer, inner, c.lambda, c.theta);
            check = general_position_xy(outer, inner, c.lambda, c.theta);
        } else {
            result = table1_compose(outer, inner);
            check = compose_xy(kraus_xy(inner), kraus_xy(outer));
        }
    } catch (const UnsupportedPair& e) {
        std::cerr << e.what() << "\n";
        return kExitPair;
    }
    json j = to_json(result);
    j["label"] = to_string(result);
    if (c.verify) {
        ChannelSpec ref = classify(check);
        double delta = ref.family == result.family ? std::abs(ref.kappa - result.kappa) + std::abs(ref.a - result.a)
                                                   : INFINITY;
        j["verify_family"] = family_name(ref.family);
        j["verify_delta"] = std::isfinite(delta) ? json(round12(delta)) : json("family mismatch");
        std::cout << j.dump() << "\n";
        if (!(delta < 1e-9)) {
            std::cerr << "compose_cross_check: " << to_string(result) << " vs " << to_string(ref) << "\n";
            return kExitInvariant;
        }
        return 0;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

// ---- experiments ---------------------------------------------------------

struct ExperimentArgs {
    std::string name;
    std::string family = "D";
    double kappa = 0.8;
    std::string a0 = "1,3,7,10";
    int steps = 40;
    int ncut = 64;
    std::string mode = "attenuator";
    std::string N = "2,3,5,10";
    double total = NAN;
    int K = 6;
    std::uint64_t seed = 20240611;
    bool no_iteration = false;
};

void exp_fixedpoint(const ExperimentArgs& e)
{
    ChannelSpec spec = make_spec(parse_family(e.family), e.kappa);
    KrausFamily fam = build_discrete(spec, -1, e.ncut);
    auto fp = fixed_point(spec);
    std::ostringstream csv;
    csv.precision(12);
    csv << "a0_start,step,a0_estimate,trace_distance\n";
    for (double a0 : parse_list(e.a0)) {
        Trajectory t = iterate(fam, thermal_state(a0, e.ncut), e.steps);
        double predicted = a0;
        for (size_t s = 0; s < t.states.size(); ++s) {
            csv << a0 << "," << s << "," << t.a0_estimate[s] << "," << t.step_distance[s] << "\n";
            if (s > 0) predicted = thermal_step(spec, predicted);
            require(std::abs(t.a0_estimate[s] - predicted) < 1e-3 * predicted, "thermal_recursion",
                    "a0=" + num(a0) + " step " + std::to_string(s));
        }
        double last = t.a0_estimate.back();
        std::cout << "a0=" << a0 << " final " << num(last) << "\n";
        if (fp) require(std::abs(last - *fp) < 0.01, "fixedpoint_convergence", num(last) + " vs " + num(*fp));
    }
    write_atomic(out_path("fixedpoint.csv"), csv.str());
    if (fp) std::cout << "fixed point " << num(*fp) << "\n";
}

void exp_zeno(const ExperimentArgs& e)
{
    const bool att = e.mode == "attenuator";
    if (!att && e.mode != "amplifier") throw InvalidParameter("mode must be attenuator or amplifier");
    const ZenoMode mode = att ? ZenoMode::Attenuator : ZenoMode::Amplifier;
    const double total = std::isnan(e.total) ? (att ? std::numbers::pi / 2 : 1.0) : e.total;
    const int ncut = att ? 48 : 80;
    const cplx alpha(1.0, 0.0);
    std::ostringstream csv;
    csv.precision(12);
    csv << "mode,N,step,kappa,kappa_iterated\n";
    for (double nd : parse_list(e.N)) {
        const int n = static_cast<int>(nd);
        if (n < 1 || n != nd) throw InvalidParameter("N must be a positive integer");
        const double per = att ? std::cos(total / n) : std::cosh(total / n);
        DensityMatrix rho = coherent_state(alpha, ncut, 1e-12);
        KrausFamily step;
        if (!e.no_iteration) step = build_discrete(make_spec(att ? Family::C1 : Family::C2, per), -1, ncut);
        double product = 1.0;
        for (int s = 0; s <= n; ++s) {
            double k = zeno_kappa(mode, n, s, total);
            require(std::abs(k - product) < 1e-12, "zeno_closed_form", "N=" + std::to_string(n));
            double kit = NAN;
            if (!e.no_iteration) {
                cplx ea = 0.0;
                for (int j = 0; j + 1 < ncut; ++j) ea += std::sqrt(double(j + 1)) * rho.rho(j + 1, j);
                kit = std::abs(ea / rho.trace()) / std::abs(alpha);
                require(std::abs(kit - k) < 1e-8, "zeno_iteration", "N=" + std::to_string(n) + " step " + std::to_string(s));
                if (s < n) rho = apply(step, rho);
            }
            csv << e.mode << "," << n << "," << s << "," << k << "," << kit << "\n";
            product *= per;
        }
        std::cout << "N=" << n << " endpoint " << num(zeno_kappa(mode, n, n, total)) << "\n";
    }
    write_atomic(out_path("zeno.csv"), csv.str());
}

json gram_entry(const std::string& name, const GramReport& r)
{
    json sv = json::array();
    for (double s : r.singular_values) sv.push_back(round12(s));
    return {{"family", name}, {"K", r.K}, {"size", r.size()}, {"rank", r.numerical_rank}, {"singular_values", sv}};
}

void exp_extremal(const ExperimentArgs& e)
{
    const int K = e.K;
    json report = {{"schema", kSchemaVersion}, {"threshold", 1e-8}, {"families", json::array()}};
    auto full = [&](const std::string& name, const KrausFamily& fam) {
        GramReport r = gram_rank(fam, K);
        report["families"].push_back(gram_entry(name, r));
        std::cout << name << " rank " << r.numerical_rank << "/" << r.size() << "\n";
        require(r.numerical_rank == (K + 1) * (K + 1), "gram_full_rank", name);
    };
    full("D(0.5)", build_discrete(make_spec(Family::D, 0.5), -1, 80));
    full("C1(0.7)", build_discrete(make_spec(Family::C1, 0.7), -1, 80));
    full("C2(1.3)", build_discrete(make_spec(Family::C2, 1.3), -1, 80));
    full("A2", build_continuous(make_spec(Family::A2), 64, 48));

    KrausFamily bt = product_family(build_discrete(make_spec(Family::C1, 0.7), -1, 48),
                                    build_discrete(make_spec(Family::D, 0.5), -1, 48), K);
    GramReport r = gram_rank(bt, K, 1e-8, GramTarget::Operators);
    report["families"].push_back(gram_entry("B_m T_n", r));
    std::cout << "B_m T_n rank " << r.numerical_rank << "/" << r.size() << "\n";
    require(r.numerical_rank < r.size(), "product_rank_deficient", "B_m T_n");
    write_atomic(out_path("extremal.json"), report.dump(2) + "\n");
}

std::vector<cplx> square_grid(int side, double half_width)
{
    std::vector<cplx> g;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
            g.emplace_back(-half_width + 2 * half_width * i / (side - 1), -half_width + 2 * half_width * j / (side - 1));
    return g;
}

void exp_scaling(const ExperimentArgs&)
{
    json report = {{"schema", kSchemaVersion}, {"checks", json::array()}};
    auto record = [&](const std::string& name, const ClassicalityReport& r, double tol) {
        report["checks"].push_back({{"name", name},
                                    {"checked", r.checked},
                                    {"max_deviation", round12(r.max_deviation)},
                                    {"min_weight", round12(r.min_weight)},
                                    {"tolerance", tol}});
        std::cout << name << " max deviation " << num(r.max_deviation) << "\n";
        require(r.passed, name, r.detail);
    };
    const auto grid = square_grid(5, 1.0);
    record("q_scaling_c2", classicality_check(make_spec(Family::C2, 1.5), {fock_state(1, 48)}, grid, 1e-6), 1e-6);
    record("coherent_scaling_c1",
           classicality_check(make_spec(Family::C1, 0.6), {coherent_state(cplx(0.8, 0.3), 48, 1e-14)}, {}, 1e-8), 1e-8);
    record("diagonal_weight_d",
           classicality_check(make_spec(Family::D, 0.8), {coherent_state(cplx(0.5, -0.2), 48, 1e-14)}, grid, 1e-6),
           1e-6);
    write_atomic(out_path("scaling.json"), report.dump(2) + "\n");
}

void exp_verify_all(const ExperimentArgs& e)
{
    const int n = e.ncut;
    json summary = {{"schema", kSchemaVersion}, {"ncut", n}, {"suites", json::array()}};
    auto suite = [&](const std::string& name, double value, double tol) {
        summary["suites"].push_back({{"name", name}, {"value", round12(value)}, {"tolerance", tol}});
        std::cout << (value < tol ? "ok   " : "FAIL ") << name << " " << num(value) << "\n";
        require(value < tol, name, num(value) + " >= " + num(tol));
    };

    // duality
    double dual_err = 0.0;
    for (double k : {0.5, 0.8, 1.25, 2.0})
        for (int l = 0; l <= 12; ++l) {
            dual_err = std::max(dual_err, (k * kraus_D(k, l, 24, 24).adjoint() - kraus_D(1 / k, l, 24, 24)).cwiseAbs().maxCoeff());
            dual_err = std::max(dual_err, (k * kraus_C2(k, l, 24, 24).adjoint() - kraus_C1(1 / k, l, 24, 24)).cwiseAbs().maxCoeff());
        }
    suite("duality", dual_err, 1e-13);

    // semigroup
    double semi = 0.0;
    for (int s = 0; s < 3; ++s) {
        DensityMatrix rho = random_mixed_state(e.seed + s, 3, n);
        auto seq = [&](Family f, double k1, double k2) {
            return trace_distance(apply(build_discrete(make_spec(f, k2), -1, n), apply(build_discrete(make_spec(f, k1), -1, n), rho)),
                                  apply(build_discrete(make_spec(f, k1 * k2), -1, n), rho));
        };
        semi = std::max({semi, seq(Family::C1, 0.9, 0.8), seq(Family::C2, 1.2, 1.3)});
    }
    suite("semigroup", semi, 1e-9);

    // composition table against the phase-space product
    double table = 0.0;
    const std::vector<ChannelSpec> reps = {make_spec(Family::D, 0.7), make_spec(Family::D, 1.4), make_spec(Family::C1, 0.6),
                                           make_spec(Family::C2, 1.3), make_spec(Family::A2)};
    for (const auto& o : reps)
        for (const auto& i : reps) {
            ChannelSpec t = table1_compose(o, i);
            ChannelSpec r = classify(compose_xy(kraus_xy(i), kraus_xy(o)));
            table = std::max(table, r.family == t.family ? std::abs(r.kappa - t.kappa) + std::abs(r.a - t.a) : INFINITY);
        }
    suite("table1", table, 1e-9);

    // scheme against closed form
    double scheme = 0.0;
    for (const auto& spec : {make_spec(Family::D, 0.6), make_spec(Family::C1, 0.4), make_spec(Family::C2, 1.2)}) {
        KrausFamily a = kraus_from_scheme(mix_matrix(spec), 6, 16);
        for (int l = 0; l < static_cast<int>(a.ops.size()); ++l) {
            CMat b = spec.family == Family::D    ? kraus_D(spec.kappa, l, 16, 16)
                     : spec.family == Family::C1 ? kraus_C1(spec.kappa, l, 16, 16)
                                                 : kraus_C2(spec.kappa, l, 16, 16);
            scheme = std::max(scheme, (a.ops[l].topLeftCorner(16, 16) - b).cwiseAbs().maxCoeff());
        }
    }
    suite("scheme_closed_form", scheme, 1e-10);

    // moments
    double mom = 0.0;
    for (const auto& spec : {make_spec(Family::D, 0.8), make_spec(Family::C1, 0.7), make_spec(Family::C2, 1.2)}) {
        DensityMatrix rho = coherent_state(cplx(0.6, 0.3), n, 1e-12);
        GaussianMoments g = covariance_map(kraus_xy(spec), moments_from_density(rho));
        GaussianMoments m = moments_from_density(apply(build_discrete(spec, -1, n), rho));
        mom = std::max({mom, (g.mean - m.mean).cwiseAbs().maxCoeff(), (g.cov - m.cov).cwiseAbs().maxCoeff()});
    }
    suite("moments", mom, 1e-5);

    // simultaneous diagonality
    int bad = 0;
    for (const auto& spec : {make_spec(Family::D, 0.8), make_spec(Family::C1, 0.6), make_spec(Family::C2, 1.3)})
        bad += !simultaneous_diagonality(build_discrete(spec, -1, n)).diagonal;
    bad += !simultaneous_diagonality(build_continuous(make_spec(Family::A2), 64, n)).diagonal;
    suite("diagonality_failures", bad, 0.5);

    write_atomic(out_path("verify_all.json"), summary.dump(2) + "\n");
}

int cmd_experiment(const ExperimentArgs& e)
{
    try {
        if (e.name == "fixedpoint") exp_fixedpoint(e);
        else if (e.name == "zeno") exp_zeno(e);
        else if (e.name == "extremal") exp_extremal(e);
        else if (e.name == "scaling") exp_scaling(e);
        else if (e.name == "verify-all") exp_verify_all(e);
        else throw InvalidParameter("unknown experiment " + e.name);
    } catch (const InvariantViolation& v) {
        std::cerr << "invariant violated: " << v.what() << "\n";
        return kExitInvariant;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kraus operators and composition rules for single-mode bosonic Gaussian channels"};
    app.require_subcommand(1);

    KrausArgs ka;
    auto* kraus = app.add_subcommand("kraus", "print a Kraus family as JSON");
    kraus->add_option("--family", ka.family, "D, C1, C2, A1, A2, B1, B2")->required();
    kraus->add_option("--kappa", ka.kappa);
    kraus->add_option("--a", ka.a, "noise; nonzero values are rejected");
    kraus->add_option("--ncut", ka.ncut);
    kraus->add_option("--ell-max", ka.ell_max, "-1 picks the cut from the tail estimate");
    kraus->add_option("--nodes", ka.nodes, "quadrature nodes for A2 and B1");

    ComposeArgs ca;
    auto* compose = app.add_subcommand("compose", "compose two channels: SPEC1 o SPEC2, SPEC2 acting first");
    compose->add_option("spec1", ca.first, "FAMILY[:kappa[:a]]")->required();
    compose->add_option("spec2", ca.second, "FAMILY[:kappa[:a]]")->required();
    auto* lam = compose->add_option("--lambda", ca.lambda, "relative squeeze (general position)");
    auto* th = compose->add_option("--theta", ca.theta, "relative rotation (general position)");
    compose->add_flag("--verify", ca.verify, "cross-check against the phase-space product");
    compose->add_flag("--sequential", ca.sequential, "read the specs in order of action instead");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "run an experiment and write artifacts to BK_OUTPUT_DIR");
    exp->add_option("name", ea.name, "fixedpoint, zeno, extremal, scaling, verify-all")->required();
    exp->add_option("--family", ea.family);
    exp->add_option("--kappa", ea.kappa);
    exp->add_option("--a0", ea.a0, "comma-separated starting thermal parameters");
    exp->add_option("--steps", ea.steps);
    exp->add_option("--ncut", ea.ncut);
    exp->add_option("--mode", ea.mode, "attenuator or amplifier");
    exp->add_option("--N", ea.N, "comma-separated interruption counts");
    exp->add_option("--total", ea.total);
    exp->add_option("--K", ea.K);
    exp->add_option("--seed", ea.seed);
    exp->add_flag("--no-iteration", ea.no_iteration, "skip the channel-iteration cross-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    ca.positioned = lam->count() > 0 || th->count() > 0;
    if (ea.ncut < 8) {
        std::cerr << "ncut must be >= 8\n";
        return 1;
    }

    try {
        if (*kraus) return cmd_kraus(ka);
        if (*compose) return cmd_compose(ca);
        if (*exp) return cmd_experiment(ea);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
