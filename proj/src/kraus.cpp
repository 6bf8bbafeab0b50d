#include "bosonic/kraus.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bosonic/errors.hpp"
#include "bosonic/special.hpp"

namespace bosonic {

namespace {

constexpr double kDefectError = 1e-4;
constexpr double kTailTarget = 1e-12;
constexpr int kEllCap = 200000;

double safe_log(double x) { return x > 0.0 ? std::log(x) : -INFINITY; }

// log of |<out|W_l|in>|^2 for the single nonzero entry in column `in`; -inf
// when the column is empty.
double log_weight(const ChannelSpec& s, int ell, int in)
{
    const double k2 = s.kappa * s.kappa;
    switch (s.family) {
    case Family::D:
        if (in > ell) return -INFINITY;
        return -(in + 1) * std::log1p(k2) - (ell - in) * std::log1p(1.0 / k2) +
               log_factorial(ell) - log_factorial(in) - log_factorial(ell - in);
    case Family::C1:
    case Family::A1: {
        if (ell > in) return -INFINITY;
        double kk = s.family == Family::A1 ? 0.0 : k2;
        double lt = ell * safe_log(1.0 - kk) + (in - ell) * safe_log(kk);
        if (ell == 0 && kk == 1.0) lt = 0.0;
        if (ell == in && kk == 0.0) lt = 0.0;
        return lt + log_factorial(in) - log_factorial(ell) - log_factorial(in - ell);
    }
    case Family::C2:
        return ell * safe_log(1.0 - 1.0 / k2) - (in + 1) * std::log(k2) + log_factorial(in + ell) -
               log_factorial(in) - log_factorial(ell);
    default:
        return -INFINITY;
    }
}

int band_limit(Family f, int ncut)
{
    switch (f) {
    case Family::D: return 2 * ncut - 2;
    case Family::C1:
    case Family::C2:
    case Family::A1: return ncut - 1;
    default: return 0;
    }
}

double analytic_defect(const ChannelSpec& s, int ell_max, int block)
{
    double worst = 0.0;
    for (int n = 0; n < block; ++n) {
        double acc = 0.0;
        for (int l = 0; l <= ell_max; ++l) {
            double lw = log_weight(s, l, n);
            if (std::isfinite(lw)) acc += std::exp(lw);
        }
        worst = std::max(worst, std::abs(1.0 - acc));
    }
    return worst;
}

void check_ncut(int ncut)
{
    if (ncut < 2) throw InvalidParameter("cutoff must be at least 2");
}

Eigen::SparseMatrix<cplx> to_sparse(const CMat& m) { return m.sparseView(); }

}  // namespace

std::string family_name(Family f)
{
    switch (f) {
    case Family::D: return "D";
    case Family::C1: return "C1";
    case Family::C2: return "C2";
    case Family::A1: return "A1";
    case Family::A2: return "A2";
    case Family::B1: return "B1";
    case Family::B2: return "B2";
    case Family::Identity: return "Identity";
    }
    return "?";
}

Family parse_family(const std::string& s)
{
    for (Family f : {Family::D, Family::C1, Family::C2, Family::A1, Family::A2, Family::B1, Family::B2,
                     Family::Identity}) {
        if (s == family_name(f)) return f;
    }
    if (s == "I" || s == "identity") return Family::Identity;
    throw InvalidParameter("unknown channel family '" + s + "'");
}

bool has_kappa(Family f) { return f == Family::D || f == Family::C1 || f == Family::C2; }

void validate(const ChannelSpec& s)
{
    if (!(s.a >= 0.0) || !std::isfinite(s.a)) throw InvalidParameter("noise a must be finite and >= 0");
    if (!has_kappa(s.family)) return;
    const double k = s.kappa;
    if (!std::isfinite(k)) throw InvalidParameter("kappa must be finite");
    if (s.family == Family::C1 && !(k >= 0.0 && k <= 1.0)) throw InvalidParameter("C1 needs 0 <= kappa <= 1");
    if (s.family == Family::C2 && !(k >= 1.0)) throw InvalidParameter("C2 needs kappa >= 1");
    if (s.family == Family::D && !(k > 0.0)) throw InvalidParameter("D needs kappa > 0");
}

ChannelSpec make_spec(Family f, double kappa, double a)
{
    ChannelSpec s{f, kappa, a};
    if (f == Family::A1 || f == Family::A2) s.kappa = 0.0;
    if (f == Family::B1 || f == Family::B2 || f == Family::Identity) s.kappa = 1.0;
    if (f == Family::Identity) s.a = 0.0;
    validate(s);
    return s;
}

std::string to_string(const ChannelSpec& s)
{
    std::ostringstream os;
    os.precision(12);
    os << family_name(s.family);
    if (has_kappa(s.family)) os << "(" << s.kappa << "; " << s.a << ")";
    else if (s.family != Family::Identity) os << "(" << s.a << ")";
    return os.str();
}

CMat kraus_D(double kappa, int ell, int rows, int cols)
{
    CMat t = CMat::Zero(rows, cols);
    ChannelSpec s{Family::D, kappa, 0.0};
    for (int n = 0; n <= ell && n < cols; ++n) {
        if (ell - n >= rows) continue;
        t(ell - n, n) = std::exp(0.5 * log_weight(s, ell, n));
    }
    return t;
}

CMat kraus_C1(double kappa, int ell, int rows, int cols)
{
    CMat b = CMat::Zero(rows, cols);
    ChannelSpec s{Family::C1, kappa, 0.0};
    for (int m = 0; m < rows && m + ell < cols; ++m) {
        double lw = log_weight(s, ell, m + ell);
        if (std::isfinite(lw)) b(m, m + ell) = std::exp(0.5 * lw);
    }
    return b;
}

CMat kraus_C2(double kappa, int ell, int rows, int cols)
{
    CMat a = CMat::Zero(rows, cols);
    ChannelSpec s{Family::C2, kappa, 0.0};
    for (int m = 0; m < cols && m + ell < rows; ++m) {
        double lw = log_weight(s, ell, m);
        if (std::isfinite(lw)) a(m + ell, m) = std::exp(0.5 * lw);
    }
    return a;
}

int default_ell_max(const ChannelSpec& spec, int ncut)
{
    if (spec.family == Family::Identity) return 0;
    const int block = std::max(1, ncut / 2);
    int lmax = band_limit(spec.family, ncut);
    std::vector<double> acc(static_cast<size_t>(block), 0.0);
    for (int l = 0; l < kEllCap; ++l) {
        double worst = 0.0;
        for (int n = 0; n < block; ++n) {
            double lw = log_weight(spec, l, n);
            if (std::isfinite(lw)) acc[n] += std::exp(lw);
            worst = std::max(worst, std::abs(1.0 - acc[n]));
        }
        if (worst < kTailTarget) return std::max(l, lmax);
    }
    return kEllCap;
}

KrausFamily build_discrete(const ChannelSpec& spec, int ell_max, int ncut)
{
    check_ncut(ncut);
    validate(spec);
    switch (spec.family) {
    case Family::A2:
    case Family::B1:
    case Family::B2:
        throw UnsupportedFamily(family_name(spec.family) + " has no discrete quantum-limited Kraus list");
    default:
        break;
    }
    if (!spec.quantum_limited()) throw UnsupportedFamily("noisy channel: use compose/synthesize");

    KrausFamily fam;
    fam.spec = spec;
    fam.index_kind = IndexKind::Discrete;
    if (spec.family == Family::Identity) {
        fam.ops.push_back(CMat::Identity(ncut, ncut));
        fam.ell_max = 0;
        return fam;
    }
    if (ell_max < 0) ell_max = default_ell_max(spec, ncut);
    fam.ell_max = ell_max;
    const int stored = std::min(ell_max, band_limit(spec.family, ncut));
    for (int l = 0; l <= stored; ++l) {
        switch (spec.family) {
        case Family::D: fam.ops.push_back(kraus_D(spec.kappa, l, ncut, ncut)); break;
        case Family::C1: fam.ops.push_back(kraus_C1(spec.kappa, l, ncut, ncut)); break;
        case Family::A1: fam.ops.push_back(kraus_C1(0.0, l, ncut, ncut)); break;
        case Family::C2: fam.ops.push_back(kraus_C2(spec.kappa, l, ncut, ncut)); break;
        default: break;
        }
    }
    ChannelSpec ws = spec;
    if (spec.family == Family::A1) ws.kappa = 0.0;
    fam.completeness_defect = analytic_defect(ws, ell_max, std::max(1, ncut / 2));
    if (fam.completeness_defect > kDefectError) {
        throw DefectTooLarge(to_string(spec) + ": completeness defect " + std::to_string(fam.completeness_defect));
    }
    return fam;
}

KrausFamily build_continuous(const ChannelSpec& spec, int node_count, int ncut)
{
    check_ncut(ncut);
    validate(spec);
    if (spec.family != Family::A2 && spec.family != Family::B1) {
        throw UnsupportedFamily(family_name(spec.family) + " is not a continuous-index family");
    }
    if (node_count < 32) throw InvalidParameter("node_count must be >= 32");

    KrausFamily fam;
    fam.spec = spec;
    fam.index_kind = IndexKind::Quadrature;
    const int block = std::max(1, ncut / 2);

    if (spec.family == Family::B1 && spec.a == 0.0) {
        // the Gaussian weight collapses to delta(q): Z_0 is the identity
        fam.ops.push_back(CMat::Identity(ncut, ncut));
        fam.nodes = {0.0};
        fam.weights = {1.0};
        fam.origin = "closed-form; weight folded as sqrt";
        return fam;
    }

    GaussHermite gh = gauss_hermite(node_count);
    if (spec.family == Family::A2) {
        if (spec.a != 0.0) throw UnsupportedFamily("noisy A2: use compose/synthesize");
        // V_q = |q/sqrt2)<q|, int dq V_q^dag V_q = 1. With q on Hermite nodes the
        // integrand is e^{-q^2} times a polynomial, so the scaled rule is exact.
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(block, block);
        for (int i = 0; i < node_count; ++i) {
            double q = gh.nodes[i];
            auto psi = hermite_psi_all(ncut - 1, q);
            Eigen::Map<const Eigen::VectorXd> bra(psi.data(), ncut);
            CVec ket = coherent_vector(cplx(q / std::sqrt(2.0), 0.0), ncut);
            double w = gh.scaled[i];
            fam.ops.push_back(std::sqrt(w) * ket * bra.cast<cplx>().transpose());
            fam.nodes.push_back(q);
            fam.weights.push_back(w);
            gram += w * bra.head(block) * bra.head(block).transpose();
        }
        fam.completeness_defect = (gram - Eigen::MatrixXd::Identity(block, block)).norm();
    } else {
        // Z_q = (pi a)^{-1/4} e^{-q^2/2a} D(q/sqrt2); substituting q = sqrt(a) u
        // puts the Gaussian on the Hermite weight.
        double total = 0.0;
        for (int i = 0; i < node_count; ++i) {
            double q = std::sqrt(spec.a) * gh.nodes[i];
            double w = gh.weights[i] / std::sqrt(std::numbers::pi);
            fam.ops.push_back(std::sqrt(w) * displacement_block(cplx(q / std::sqrt(2.0), 0.0), ncut, ncut));
            fam.nodes.push_back(q);
            fam.weights.push_back(w);
            total += w;
        }
        fam.completeness_defect = std::abs(total - 1.0);
    }
    fam.origin = "closed-form; weight folded as sqrt";
    if (fam.completeness_defect > kDefectError) {
        throw DefectTooLarge(to_string(spec) + ": completeness defect " + std::to_string(fam.completeness_defect));
    }
    return fam;
}

CMat apply_raw(const KrausFamily& fam, const CMat& rho)
{
    const int n = static_cast<int>(rho.rows());
    CMat out = CMat::Zero(n, n);
    if (fam.rank_one()) {
        for (size_t i = 0; i < fam.left.size(); ++i) {
            cplx c = fam.right[i].dot(rho * fam.right[i]);
            out.noalias() += c * fam.left[i] * fam.left[i].adjoint();
        }
        return out;
    }
    for (const CMat& w : fam.ops) {
        if (w.cols() != n || w.rows() != n) throw DimMismatch("apply: operator and state dims differ");
        Eigen::Index nnz = (w.array() != cplx(0.0)).count();
        if (nnz * 8 < Eigen::Index(n) * n) {
            Eigen::SparseMatrix<cplx> s = to_sparse(w);
            Eigen::SparseMatrix<cplx> sa = s.adjoint();
            CMat wr = s * rho;
            out.noalias() += wr * sa;
        } else {
            out.noalias() += w * rho * w.adjoint();
        }
    }
    return out;
}

DensityMatrix apply(const KrausFamily& fam, const DensityMatrix& rho)
{
    if (fam.dim() != rho.dim()) throw DimMismatch("apply: family dim " + std::to_string(fam.dim()) +
                                                  " vs state dim " + std::to_string(rho.dim()));
    CMat out = apply_raw(fam, rho.rho);
    out = 0.5 * (out + out.adjoint());
    double t = out.trace().real();
    if (!(t > 0.0)) throw InvalidParameter("apply: output trace vanished");
    DensityMatrix d;
    d.rho = out / t;
    d.tail_mass = std::max(0.0, 1.0 - t);
    return d;
}

KrausFamily dual(const KrausFamily& fam)
{
    if (fam.index_kind != IndexKind::Discrete) throw UnsupportedFamily("dual of a quadrature family");
    if (!fam.labels.empty() || fam.rank_one()) throw UnsupportedFamily("dual of a composite family");
    KrausFamily d = fam;
    const double k = fam.spec.kappa;
    double scale = 1.0;
    switch (fam.spec.family) {
    case Family::Identity: return d;
    case Family::D:
        // kappa T_l(kappa)^dag = T_l(1/kappa)
        scale = k;
        d.spec = make_spec(Family::D, 1.0 / k);
        break;
    case Family::C2:
        // A_l(kappa)^dag = kappa^{-1} B_l(1/kappa)
        scale = k;
        d.spec = make_spec(Family::C1, 1.0 / k);
        break;
    case Family::C1:
        if (k == 0.0) throw UnsupportedFamily("dual of C1(0) is not trace preserving");
        scale = k;
        d.spec = make_spec(Family::C2, 1.0 / k);
        break;
    default: throw UnsupportedFamily("dual of " + family_name(fam.spec.family));
    }
    for (CMat& w : d.ops) w = (scale * w.adjoint()).eval();
    d.completeness_defect = analytic_defect(d.spec, d.ell_max, std::max(1, fam.dim() / 2));
    return d;
}

std::vector<GridPoint> gauss_hermite_grid(int order)
{
    GaussHermite gh = gauss_hermite(order);
    std::vector<GridPoint> g;
    g.reserve(static_cast<size_t>(order) * order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            g.push_back({cplx(gh.nodes[i], gh.nodes[j]), gh.scaled[i] * gh.scaled[j]});
    return g;
}

KrausFamily rank_one_D(double kappa, const std::vector<GridPoint>& grid, int ncut)
{
    check_ncut(ncut);
    ChannelSpec spec = make_spec(Family::D, kappa);
    const double k2 = kappa * kappa;
    const double sa = std::sqrt(1.0 + 1.0 / k2), sb = std::sqrt(1.0 + k2);
    const int block = std::max(1, ncut / 2);

    KrausFamily fam;
    fam.spec = spec;
    fam.index_kind = IndexKind::Quadrature;
    fam.origin = "rank-one";
    CMat gram = CMat::Zero(block, block);
    for (const GridPoint& p : grid) {
        // (1+k^2)^{-1/2} |alpha/sqrt(1+k^-2)><alpha^*/sqrt(1+k^2)|, measure d^2alpha/pi
        double c = std::sqrt(p.weight / std::numbers::pi / (1.0 + k2));
        CVec l = c * coherent_vector(p.alpha / sa, ncut);
        CVec r = coherent_vector(std::conj(p.alpha) / sb, ncut);
        fam.ops.push_back(l * r.adjoint());
        fam.left.push_back(l);
        fam.right.push_back(r);
        fam.nodes.push_back(p.alpha.real());
        fam.weights.push_back(p.weight);
        gram += (c * c) * r.head(block) * r.head(block).adjoint();
    }
    fam.completeness_defect = (gram - CMat::Identity(block, block)).norm();

    DensityMatrix probe = thermal_state(2.0, ncut, 1.0);
    KrausFamily ref = build_discrete(spec, -1, ncut);
    double mismatch = trace_distance(apply(fam, probe), apply(ref, probe));
    if (mismatch > 1e-4) throw GridTooCoarse("rank_one_D: probe mismatch " + std::to_string(mismatch));
    return fam;
}

CMat closed_form_action(const ChannelSpec& spec, int m, int n, int ncut)
{
    check_ncut(ncut);
    validate(spec);
    if (m < 0 || n < 0 || m >= ncut || n >= ncut) throw InvalidParameter("closed_form_action: index out of range");
    const double k = spec.kappa, k2 = k * k;
    CMat out = CMat::Zero(ncut, ncut);
    switch (spec.family) {
    case Family::C1:
        // |m><n| -> sum_l sqrt(mCl nCl) (1-k^2)^l k^{m+n-2l} |m-l><n-l|
        for (int l = 0; l <= std::min(m, n); ++l) {
            double c = sqrt_binomial(m, l) * sqrt_binomial(n, l) * std::pow(1.0 - k2, l) * std::pow(k, m + n - 2 * l);
            out(m - l, n - l) = c;
        }
        break;
    case Family::C2:
        // |m><n| -> k^{-2-m-n} (m!n!)^{-1/2} sum_l (1-k^-2)^l/l! sqrt((m+l)!(n+l)!) |m+l><n+l|
        for (int l = 0; m + l < ncut && n + l < ncut; ++l) {
            double lg = -(2.0 + m + n) * std::log(k) - 0.5 * (log_factorial(m) + log_factorial(n)) +
                        l * safe_log(1.0 - 1.0 / k2) - log_factorial(l) +
                        0.5 * (log_factorial(m + l) + log_factorial(n + l));
            if (std::isfinite(lg)) out(m + l, n + l) = std::exp(lg);
        }
        break;
    case Family::D: {
        // with p = max(m,n), q = min(m,n), d = p - q:
        // |p><q| -> (1+k^2)^{-1-(p+q)/2} (1+k^-2)^{-d/2}
        //           sum_lam (lam+p)! (1+k^-2)^{-lam} / sqrt(p! q! lam! (lam+d)!) |lam><lam+d|
        int p = std::max(m, n), q = std::min(m, n), d = p - q;
        for (int lam = 0; lam + d < ncut; ++lam) {
            double lg = -(1.0 + 0.5 * (p + q)) * std::log1p(k2) - (0.5 * d + lam) * std::log1p(1.0 / k2) +
                        log_factorial(lam + p) -
                        0.5 * (log_factorial(p) + log_factorial(q) + log_factorial(lam) + log_factorial(lam + d));
            double c = std::exp(lg);
            if (m >= n) out(lam, lam + d) = c;
            else out(lam + d, lam) = c;
        }
        break;
    }
    default: throw UnsupportedFamily("closed_form_action for " + family_name(spec.family));
    }
    return out;
}

double completeness_defect(const std::vector<CMat>& ops, int block)
{
    if (ops.empty()) return INFINITY;
    CMat s = CMat::Zero(block, block);
    for (const CMat& w : ops) {
        auto c = w.leftCols(block);
        s.noalias() += c.adjoint() * c;
    }
    s -= CMat::Identity(block, block);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double completeness_defect(const KrausFamily& fam)
{
    return completeness_defect(fam.ops, std::max(1, fam.dim() / 2));
}

}  // namespace bosonic
