#include "bosonic/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <map>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bosonic/errors.hpp"
#include "bosonic/phase_space.hpp"
#include "bosonic/special.hpp"

namespace bosonic {

namespace {

// Second-order central-difference weights for derivative order m, on
// offsets -r..r with r = (m + 1) / 2 (r = 0 for m = 0).
std::vector<double> central_weights(int m)
{
    switch (m) {
    case 0: return {1.0};
    case 1: return {-0.5, 0.0, 0.5};
    case 2: return {1.0, -2.0, 1.0};
    case 3: return {-0.5, 1.0, 0.0, -1.0, 0.5};
    case 4: return {1.0, -4.0, 6.0, -4.0, 1.0};
    case 5: return {-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5};
    case 6: return {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0};
    default: throw InvalidParameter("cumulant order above 6");
    }
}

// Hilbert-Schmidt mass of an operator in its last row and column.
double boundary_fraction(const CMat& p)
{
    const Eigen::Index n = p.rows();
    double total = p.squaredNorm();
    if (total == 0.0) return 0.0;
    double edge = p.row(n - 1).squaredNorm() + p.col(n - 1).squaredNorm();
    return edge / total;
}

std::vector<int> nearest_nodes(const KrausFamily& fam, int count)
{
    std::vector<int> idx(fam.ops.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(fam.nodes[a]) < std::abs(fam.nodes[b]); });
    idx.resize(std::min<size_t>(idx.size(), static_cast<size_t>(count)));
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fam.nodes[a] < fam.nodes[b]; });
    return idx;
}

}  // namespace

std::string Trajectory::csv() const
{
    std::ostringstream os;
    os.precision(12);
    os << "step,a0_estimate,trace_distance\n";
    for (size_t i = 0; i < states.size(); ++i) os << i << "," << a0_estimate[i] << "," << step_distance[i] << "\n";
    return os.str();
}

Trajectory iterate(const KrausFamily& fam, const DensityMatrix& rho0, int steps)
{
    if (steps < 1) throw InvalidParameter("iterate: steps must be >= 1");
    Trajectory t;
    t.states.push_back(rho0);
    t.a0_estimate.push_back(thermal_parameter_estimate(rho0));
    t.step_distance.push_back(0.0);
    for (int s = 0; s < steps; ++s) {
        DensityMatrix next = apply(fam, t.states.back());
        t.step_distance.push_back(trace_distance(next, t.states.back()));
        t.a0_estimate.push_back(thermal_parameter_estimate(next));
        t.states.push_back(std::move(next));
    }
    return t;
}

double thermal_step(const ChannelSpec& spec, double a0)
{
    if (!(a0 >= 1.0)) throw InvalidParameter("thermal_step: a0 must be >= 1");
    const double k2 = spec.kappa * spec.kappa;
    switch (spec.family) {
    case Family::D: return k2 * a0 + 1.0 + k2;
    case Family::C1: return k2 * a0 + 1.0 - k2;
    case Family::C2: return k2 * a0 + k2 - 1.0;
    default: throw UnsupportedFamily("thermal_step for " + family_name(spec.family));
    }
}

std::optional<double> fixed_point(const ChannelSpec& spec)
{
    const double k2 = spec.kappa * spec.kappa;
    switch (spec.family) {
    case Family::D:
        if (spec.kappa < 1.0) return (1.0 + k2) / (1.0 - k2);
        return std::nullopt;
    case Family::C1:
    case Family::A1: return 1.0;
    case Family::Identity: return 1.0;
    default: return std::nullopt;
    }
}

// Step for total derivative order m: 1e-2 up to second order, wider above,
// where roundoff (~eps / h^m) would otherwise dominate.
static double stencil_step(int m)
{
    if (m <= 2) return 1e-2;
    if (m == 3) return 3e-2;
    if (m == 4) return 5e-2;
    return 1e-1;
}

CumulantTable cumulants(const DensityMatrix& d, int max_order)
{
    if (max_order < 0 || max_order > 6) throw InvalidParameter("cumulants: max_order must be in [0, 6]");
    const int reach = (max_order + 1) / 2;  // in units of h
    const int half = 2 * reach;             // in units of h/2
    const int side = 2 * half + 1;
    const cplx chi0 = char_weyl(d, 0.0);

    // log chi / chi(0) sampled at spacing h/2, one grid per step size
    std::map<double, Eigen::MatrixXcd> grids;
    auto grid = [&](double h) -> const Eigen::MatrixXcd& {
        auto it = grids.find(h);
        if (it != grids.end()) return it->second;
        Eigen::MatrixXcd f(side, side);
        for (int i = -half; i <= half; ++i)
            for (int j = -half; j <= half; ++j) {
                cplx chi = char_weyl(d, cplx(i * h / 2, j * h / 2)) / chi0;
                if (std::abs(chi) < 1e-8) throw StencilFailure("chi_W vanishes on the stencil");
                f(i + half, j + half) = std::log(chi);
            }
        return grids.emplace(h, std::move(f)).first->second;
    };

    auto derivative = [&](const Eigen::MatrixXcd& f, double h, int m1, int m2, int stride) {
        // stride 2 samples step h, stride 1 samples step h/2
        auto w1 = central_weights(m1), w2 = central_weights(m2);
        int r1 = static_cast<int>(w1.size()) / 2, r2 = static_cast<int>(w2.size()) / 2;
        cplx acc = 0.0;
        for (int a = -r1; a <= r1; ++a)
            for (int b = -r2; b <= r2; ++b) acc += w1[a + r1] * w2[b + r2] * f(half + a * stride, half + b * stride);
        double step = stride * h / 2;
        return acc / std::pow(step, m1 + m2);
    };

    CumulantTable t;
    t.max_order = max_order;
    t.low_confidence = max_order > 4;
    t.gamma = Eigen::MatrixXd::Zero(max_order + 1, max_order + 1);
    for (int m1 = 0; m1 <= max_order; ++m1)
        for (int m2 = 0; m1 + m2 <= max_order; ++m2) {
            if (m1 + m2 == 0) continue;
            const double h = stencil_step(m1 + m2);
            const Eigen::MatrixXcd& f = grid(h);
            cplx coarse = derivative(f, h, m1, m2, 2), fine = derivative(f, h, m1, m2, 1);
            cplx rich = (4.0 * fine - coarse) / 3.0;
            // d/d(i xi) = -i d/dxi
            cplx g = std::pow(cplx(0.0, -1.0), m1 + m2) * rich;
            t.gamma(m1, m2) = g.real();
        }
    return t;
}

double zeno_kappa(ZenoMode mode, int N, int steps, double total)
{
    if (N < 1) throw InvalidParameter("zeno: N must be >= 1");
    if (steps < 0) throw InvalidParameter("zeno: steps must be >= 0");
    double per = mode == ZenoMode::Attenuator ? std::cos(total / N) : std::cosh(total / N);
    return std::pow(per, steps);
}

GramReport gram_rank(const KrausFamily& fam, int K, double threshold, GramTarget target)
{
    if (K < 0) throw InvalidParameter("gram_rank: K must be >= 0");
    std::vector<CMat> items;
    if (target == GramTarget::Products) {
        std::vector<int> pick;
        if (fam.index_kind == IndexKind::Quadrature) {
            pick = nearest_nodes(fam, K + 1);
        } else {
            for (int i = 0; i <= K && i < static_cast<int>(fam.ops.size()); ++i) pick.push_back(i);
        }
        if (static_cast<int>(pick.size()) < K + 1) {
            // operators past the band limit vanish on the cutoff space
            throw CutoffTooSmall("gram_rank: family holds fewer than K+1 operators");
        }
        for (int m : pick)
            for (int n : pick) items.push_back(fam.ops[m].adjoint() * fam.ops[n]);
        if (fam.index_kind == IndexKind::Discrete) {
            for (const CMat& p : items)
                if (boundary_fraction(p) > 1e-6) throw CutoffTooSmall("gram_rank: products reach the cutoff edge");
        }
    } else {
        if (!fam.labels.empty()) {
            for (size_t i = 0; i < fam.ops.size(); ++i)
                if (fam.labels[i].first <= K && fam.labels[i].second <= K) items.push_back(fam.ops[i]);
        } else {
            for (size_t i = 0; i < fam.ops.size() && static_cast<int>(i) < (K + 1) * (K + 1); ++i)
                items.push_back(fam.ops[i]);
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(items.size());
    const Eigen::Index len = items.front().size();
    CMat V(len, n);
    for (Eigen::Index a = 0; a < n; ++a) V.col(a) = Eigen::Map<const CVec>(items[a].data(), len);
    CMat G = V.adjoint() * V;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (G + G.adjoint()), Eigen::EigenvaluesOnly);

    GramReport r;
    r.K = K;
    r.threshold = threshold;
    for (Eigen::Index i = n - 1; i >= 0; --i) r.singular_values.push_back(std::max(0.0, es.eigenvalues()(i)));
    const double smax = r.singular_values.empty() ? 0.0 : r.singular_values.front();
    r.numerical_rank = static_cast<int>(std::count_if(r.singular_values.begin(), r.singular_values.end(),
                                                      [&](double s) { return s > threshold * smax; }));
    return r;
}

KrausFamily product_family(const KrausFamily& outer, const KrausFamily& inner, int K)
{
    if (outer.dim() != inner.dim()) throw DimMismatch("product_family: dims differ");
    if (outer.index_kind != IndexKind::Discrete || inner.index_kind != IndexKind::Discrete)
        throw UnsupportedFamily("product_family needs discrete families");
    KrausFamily p;
    try {
        p.spec = table1_compose(outer.spec, inner.spec);
    } catch (const UnsupportedPair&) {
        p.spec = classify(compose_xy(kraus_xy(inner.spec), kraus_xy(outer.spec)));
    }
    p.index_kind = IndexKind::Discrete;
    p.origin = "product";
    p.ell_max = K;
    const int mo = std::min<int>(K, static_cast<int>(outer.ops.size()) - 1);
    const int mi = std::min<int>(K, static_cast<int>(inner.ops.size()) - 1);
    for (int m = 0; m <= mo; ++m)
        for (int n = 0; n <= mi; ++n) {
            p.ops.push_back(outer.ops[m] * inner.ops[n]);
            p.labels.emplace_back(m, n);
        }
    p.completeness_defect = completeness_defect(p);
    return p;
}

ClassicalityReport classicality_check(const ChannelSpec& spec, const std::vector<DensityMatrix>& probes,
                                      const std::vector<cplx>& grid, double tol)
{
    validate(spec);
    if (probes.empty()) throw InvalidParameter("classicality_check: no probes");
    ClassicalityReport r;
    r.min_weight = INFINITY;
    const double k = spec.kappa;
    std::ostringstream detail;

    if (spec.family == Family::C1) {
        for (const DensityMatrix& p : probes) {
            const int n = p.dim();
            KrausFamily fam = build_discrete(spec, -1, n);
            DensityMatrix out = apply(fam, p);
            cplx ea = 0.0;
            for (int j = 0; j + 1 < n; ++j) ea += std::sqrt(double(j + 1)) * p.rho(j + 1, j);
            ea /= p.trace();
            double dev;
            if (trace_distance(p, coherent_state(ea, n, 1.0)) < 1e-8) {
                dev = trace_distance(out, coherent_state(k * ea, n, 1.0));
            } else {
                double lam = mean_photon(p);
                if (trace_distance(p, phase_averaged_state(lam, n, 1.0)) > 1e-8) {
                    detail << "skipped a probe that is neither coherent nor Poissonian; ";
                    continue;
                }
                dev = trace_distance(out, phase_averaged_state(k * k * lam, n, 1.0));
            }
            r.max_deviation = std::max(r.max_deviation, dev);
            ++r.checked;
        }
        r.min_weight = 0.0;
    } else if (spec.family == Family::C2 || spec.family == Family::D || spec.family == Family::A2) {
        if (grid.empty()) throw GridTooCoarse("classicality_check: empty grid");
        for (const DensityMatrix& p : probes) {
            const int n = p.dim();
            KrausFamily fam = spec.family == Family::A2 ? build_continuous(spec, std::max(64, n + 8), n)
                                                        : build_discrete(spec, -1, n);
            DensityMatrix out = apply(fam, p);
            for (cplx alpha : grid) {
                double dev = 0.0;
                if (spec.family == Family::C2) {
                    dev = std::abs(q_function(out, alpha) - q_function(p, alpha / k) / (k * k));
                } else if (spec.family == Family::D) {
                    // phi(beta) = k^-2 Q_in(beta^*/k); Q_out = (1/pi) int phi(g) e^{-|alpha-g|^2}
                    r.min_weight = std::min(r.min_weight, q_function(p, std::conj(alpha) / k) / (k * k));
                    GaussHermite gh = gauss_hermite(40);
                    double acc = 0.0;
                    for (int i = 0; i < 40; ++i)
                        for (int j = 0; j < 40; ++j) {
                            cplx g = alpha + cplx(gh.nodes[i], gh.nodes[j]);
                            acc += gh.weights[i] * gh.weights[j] * q_function(p, std::conj(g) / k) / (k * k);
                        }
                    dev = std::abs(q_function(out, alpha) - acc / std::numbers::pi);
                } else {
                    // weight <q|rho|q> on the q axis, smoothed by the coherent-state kernel
                    auto psi = hermite_psi_all(n - 1, std::sqrt(2.0) * alpha.real());
                    Eigen::Map<const Eigen::VectorXd> v(psi.data(), n);
                    r.min_weight = std::min(r.min_weight, (v.cast<cplx>().adjoint() * p.rho * v.cast<cplx>())(0, 0).real());
                    GaussHermite gh = gauss_hermite(96);
                    double acc = 0.0;
                    for (int i = 0; i < 96; ++i) {
                        double q = gh.nodes[i];
                        auto pq = hermite_psi_all(n - 1, q);
                        Eigen::Map<const Eigen::VectorXd> u(pq.data(), n);
                        double w = (u.cast<cplx>().adjoint() * p.rho * u.cast<cplx>())(0, 0).real();
                        acc += gh.scaled[i] * w * std::exp(-std::norm(alpha - q / std::sqrt(2.0)));
                    }
                    dev = std::abs(q_function(out, alpha) - acc / p.trace());
                }
                r.max_deviation = std::max(r.max_deviation, dev);
                ++r.checked;
            }
        }
        if (spec.family == Family::C2) r.min_weight = 0.0;
    } else {
        throw UnsupportedFamily("classicality_check for " + family_name(spec.family));
    }
    r.passed = r.checked > 0 && r.max_deviation <= tol && r.min_weight >= -1e-12;
    detail << "checked " << r.checked << ", max deviation " << r.max_deviation;
    r.detail = detail.str();
    return r;
}

DiagonalityReport simultaneous_diagonality(const KrausFamily& fam)
{
    DiagonalityReport r;
    const bool unitary_mix = fam.spec.family == Family::B1 && fam.index_kind == IndexKind::Quadrature;
    bool fock = true;
    double worst = 0.0;
    for (size_t i = 0; i < fam.ops.size(); ++i) {
        CMat g = fam.ops[i].adjoint() * fam.ops[i];
        const Eigen::Index n = g.rows();
        // Displacement-based operators are multiples of unity before truncation;
        // the rows cut by the cutoff can only spoil entry (a,b) by
        // sqrt(leak_a leak_b), leak being the missing column weight.
        Eigen::VectorXd leak = Eigen::VectorXd::Zero(n);
        if (unitary_mix) {
            // taken from the rows past the cutoff directly; w - g(a, a) loses the small leaks to rounding
            CMat full = displacement_block(cplx(fam.nodes[i] / std::sqrt(2.0), 0.0), 2 * n, n);
            leak = fam.weights[i] * full.bottomRows(n).colwise().squaredNorm().transpose();
        }
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                if (a == b) continue;
                double excess = std::abs(g(a, b)) - std::sqrt(leak(a) * leak(b));
                worst = std::max(worst, excess);
            }
    }
    if (worst < 1e-12) fock = true;
    else fock = false;
    if (fock) {
        r.diagonal = true;
        r.basis = "fock";
        r.max_offdiag = std::max(0.0, worst);
        return r;
    }
    // position representation: W^dag W = w |q><q|, truncated
    if (fam.index_kind == IndexKind::Quadrature && !fam.rank_one() && fam.nodes.size() == fam.ops.size() &&
        fam.spec.family == Family::A2) {
        double pw = 0.0;
        for (size_t i = 0; i < fam.ops.size(); ++i) {
            const int n = fam.dim();
            auto psi = hermite_psi_all(n - 1, fam.nodes[i]);
            Eigen::Map<const Eigen::VectorXd> v(psi.data(), n);
            CMat g = fam.ops[i].adjoint() * fam.ops[i];
            double s = g.trace().real() / v.squaredNorm();
            CMat expect = (s * v * v.transpose()).cast<cplx>();
            pw = std::max(pw, (g - expect).cwiseAbs().maxCoeff());
        }
        if (pw < 1e-12) {
            r.diagonal = true;
            r.basis = "position";
            r.max_offdiag = pw;
            return r;
        }
    }
    r.diagonal = false;
    r.basis = "none";
    r.max_offdiag = worst;
    return r;
}

}  // namespace bosonic
