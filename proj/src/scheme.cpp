#include "bosonic/scheme.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <random>

#include "bosonic/errors.hpp"
#include "bosonic/special.hpp"

namespace bosonic {

namespace {

// The x-form of the generating integral: -x^T A x / 2 + sqrt2 x^T (M^T z + eta) - (|z|^2+|eta|^2)/2.
Eigen::Matrix2d x_form(const MixMatrix& M) { return Eigen::Matrix2d::Identity() + M.transpose() * M; }

bool near(const MixMatrix& a, const MixMatrix& b) { return (a - b).cwiseAbs().maxCoeff() < 1e-12; }

ChannelSpec recognize(const MixMatrix& M, bool& known)
{
    known = true;
    const double c = M(0, 0);
    if (c >= 0.0 && c <= 1.0 && near(M, mix_matrix(make_spec(Family::C1, c)))) return make_spec(Family::C1, c);
    if (c >= 1.0 && near(M, mix_matrix(make_spec(Family::C2, c)))) return make_spec(Family::C2, c);
    if (c < 0.0 && near(M, mix_matrix(make_spec(Family::D, -c)))) return make_spec(Family::D, -c);
    known = false;
    return make_spec(Family::Identity);
}

}  // namespace

double GeneratingForm::operator()(const Eigen::Vector4d& v) const
{
    return prefactor * std::exp(0.5 * v.dot(Q * v));
}

MixMatrix mix_matrix(const ChannelSpec& spec)
{
    MixMatrix M;
    const double k = spec.kappa;
    switch (spec.family) {
    case Family::Identity:
        M.setIdentity();
        break;
    case Family::C1:
    case Family::A1: {
        // beamsplitter rotation with cos(theta) = kappa
        double c = spec.family == Family::A1 ? 0.0 : k;
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        M << c, s, -s, c;
        break;
    }
    case Family::C2: {
        // two-mode squeezer, cosh(nu) = kappa
        double s = std::sqrt(std::max(0.0, k * k - 1.0));
        M << k, -s, -s, k;
        break;
    }
    case Family::D: {
        // sinh(mu) = kappa. The diagonal carries -kappa; +kappa reproduces the
        // transpose channel only up to a parity flip of the Kraus operators.
        double c = std::sqrt(1.0 + k * k);
        M << -k, c, c, -k;
        break;
    }
    case Family::A2:
        M << 0.0, 1.0, 1.0, -1.0;
        break;
    case Family::B1:
        M << 1.0, -std::sqrt(spec.a), 0.0, 1.0;
        break;
    default:
        throw UnsupportedFamily("no mixing matrix for " + family_name(spec.family));
    }
    return M;
}

double generating_integral(const MixMatrix& M, const Eigen::Vector4d& v, int nodes)
{
    // Substitute x = sqrt2 L^{-T} u with A = L L^T so the quadratic part
    // becomes e^{-u^T u}; the raw integrand is then divided by that weight.
    Eigen::Matrix2d A = x_form(M);
    Eigen::LLT<Eigen::Matrix2d> llt(A);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("x-form of the generating integral");
    Eigen::Matrix2d L = llt.matrixL();
    Eigen::Matrix2d T = std::sqrt(2.0) * L.transpose().inverse();
    const double jac = std::abs(T.determinant());
    GaussHermite gh = gauss_hermite(nodes);
    const Eigen::Vector2d z = v.head<2>(), eta = v.tail<2>();
    const double r2 = std::sqrt(2.0);
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j) {
            Eigen::Vector2d u(gh.nodes[i], gh.nodes[j]);
            Eigen::Vector2d x = T * u;
            Eigen::Vector2d xp = M * x;
            double e = (x - r2 * eta).squaredNorm() - eta.squaredNorm() + (xp - r2 * z).squaredNorm() -
                       z.squaredNorm();
            sum += gh.weights[i] * gh.weights[j] * std::exp(-0.5 * e + u.squaredNorm());
        }
    return sum * jac / std::numbers::pi;
}

GeneratingForm generating_form(const MixMatrix& M)
{
    if (!M.allFinite() || std::abs(M.determinant()) < 1e-12) throw InvalidParameter("mix matrix must be invertible");
    Eigen::Matrix2d A = x_form(M);
    Eigen::LLT<Eigen::Matrix2d> llt(A);
    if (llt.info() != Eigen::Success || A.determinant() <= 0.0) throw NotPositiveDefinite("x-form of the generating integral");

    Eigen::Matrix<double, 2, 4> B;
    B << M.transpose(), Eigen::Matrix2d::Identity();
    GeneratingForm f;
    f.prefactor = 2.0 / std::sqrt(A.determinant());
    f.Q = 2.0 * B.transpose() * llt.solve(B) - Eigen::Matrix4d::Identity();
    f.Q = 0.5 * (f.Q + f.Q.transpose()).eval();

    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int p = 0; p < 5; ++p) {
        Eigen::Vector4d v(u(rng), u(rng), u(rng), u(rng));
        double direct = generating_integral(M, v);
        double err = std::abs(f(v) - direct) / std::max(1.0, std::abs(direct));
        f.self_check_error = std::max(f.self_check_error, err);
    }
    if (f.self_check_error > 1e-10) {
        throw InvalidParameter("generating_form quadrature self-check failed: " + std::to_string(f.self_check_error));
    }
    return f;
}

CoefficientTable::CoefficientTable(const GeneratingForm& form, int n1, int n2, int m1, int m2)
{
    const int k[4] = {n1, n2, m1, m2};
    double volume = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (k[i] < 0) throw InvalidParameter("negative order");
        if (k[i] > kMaxSchemeOrder) throw OrderTooLarge("order " + std::to_string(k[i]) + " > 120");
        dims_[i] = k[i] + 1;
        volume *= dims_[i];
    }
    if (volume > 5e7) throw OrderTooLarge("coefficient box too large");
    d_.assign(static_cast<size_t>(volume), 0.0);
    d_[0] = form.prefactor;

    std::vector<double> sq(kMaxSchemeOrder + 2);
    for (size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(double(i));

    // d_{k+e_i} = (k_i+1)^{-1/2} sum_j Q_ij sqrt(k_j) d_{k-e_j}, applied with
    // i the first nonzero slot; every referenced entry precedes k lexicographically.
    int c[4];
    for (c[0] = 0; c[0] < dims_[0]; ++c[0])
        for (c[1] = 0; c[1] < dims_[1]; ++c[1])
            for (c[2] = 0; c[2] < dims_[2]; ++c[2])
                for (c[3] = 0; c[3] < dims_[3]; ++c[3]) {
                    int i = 0;
                    while (i < 4 && c[i] == 0) ++i;
                    if (i == 4) continue;
                    int b[4] = {c[0], c[1], c[2], c[3]};
                    b[i] -= 1;
                    double acc = 0.0;
                    for (int j = 0; j < 4; ++j) {
                        if (b[j] == 0 || form.Q(i, j) == 0.0) continue;
                        int e[4] = {b[0], b[1], b[2], b[3]};
                        e[j] -= 1;
                        acc += form.Q(i, j) * sq[b[j]] * d_[index(e[0], e[1], e[2], e[3])];
                    }
                    d_[index(c[0], c[1], c[2], c[3])] = acc / sq[c[i]];
                }
}

size_t CoefficientTable::index(int k0, int k1, int k2, int k3) const
{
    return ((static_cast<size_t>(k0) * dims_[1] + k1) * dims_[2] + k2) * dims_[3] + k3;
}

double CoefficientTable::operator()(int m1, int m2, int n1, int n2) const
{
    if (n1 >= dims_[0] || n2 >= dims_[1] || m1 >= dims_[2] || m2 >= dims_[3] || n1 < 0 || n2 < 0 || m1 < 0 || m2 < 0)
        throw InvalidParameter("coefficient outside the tabulated box");
    return d_[index(n1, n2, m1, m2)];
}

double matrix_element(const GeneratingForm& form, int m1, int m2, int n1, int n2)
{
    CoefficientTable t(form, n1, n2, m1, m2);
    return t(m1, m2, n1, n2);
}

KrausFamily kraus_from_scheme(const MixMatrix& M, int ell_max, int ncut)
{
    if (ncut < 2) throw InvalidParameter("cutoff must be at least 2");
    if (ell_max < 0) throw InvalidParameter("ell_max must be >= 0");
    GeneratingForm form = generating_form(M);
    const int block = std::max(1, ncut / 2);
    const int rows = std::min(std::max(ncut, block + ell_max + 1), kMaxSchemeOrder + 1);
    CoefficientTable t(form, ncut - 1, 0, rows - 1, ell_max);

    KrausFamily fam;
    bool known = false;
    fam.spec = recognize(M, known);
    fam.origin = known ? "scheme-derived" : "scheme-derived (general M)";
    fam.index_kind = IndexKind::Discrete;
    fam.ell_max = ell_max;
    std::vector<CMat> padded;
    for (int l = 0; l <= ell_max; ++l) {
        CMat w(ncut, ncut), p(rows, block);
        for (int m = 0; m < rows; ++m)
            for (int n = 0; n < ncut; ++n) {
                double c = t(m, l, n, 0);
                if (m < ncut) w(m, n) = c;
                if (n < block) p(m, n) = c;
            }
        fam.ops.push_back(std::move(w));
        padded.push_back(std::move(p));
    }
    fam.completeness_defect = completeness_defect(padded, block);
    return fam;
}

KrausFamily position_kraus(const MixMatrix& M, const std::vector<double>& q_nodes,
                           const std::vector<double>& q_weights, int ncut)
{
    if (ncut < 2) throw InvalidParameter("cutoff must be at least 2");
    if (q_nodes.size() != q_weights.size() || q_nodes.empty()) throw InvalidParameter("position_kraus: node/weight mismatch");
    KrausFamily fam;
    double shift = 0.0;
    if (near(M, mix_matrix(make_spec(Family::A2)))) {
        fam.spec = make_spec(Family::A2);
    } else if (std::abs(M(0, 0) - 1.0) < 1e-12 && std::abs(M(1, 1) - 1.0) < 1e-12 && std::abs(M(1, 0)) < 1e-12 &&
               M(0, 1) < 0.0) {
        shift = -M(0, 1);
        fam.spec = make_spec(Family::B1, 1.0, shift * shift);
    } else {
        throw UnsupportedShape("position_kraus needs the A2 shape or a position shear");
    }
    fam.index_kind = IndexKind::Quadrature;
    fam.origin = "scheme-derived (mixed basis)";

    // integrand in q1: psi_m(q1) psi_n((Mx)_1) psi_0((Mx)_2), x = (q1, q); its
    // Gaussian is exp(-a q1^2 + b q1) with
    const double a = 0.5 * (1.0 + M(0, 0) * M(0, 0) + M(1, 0) * M(1, 0));
    const double bq = -(M(0, 0) * M(0, 1) + M(1, 0) * M(1, 1));
    const int order = ncut + 8;
    GaussHermite gh = gauss_hermite(order);
    const double sa = std::sqrt(a);

    Eigen::MatrixXd P(order, ncut), R(order, ncut);
    for (size_t qi = 0; qi < q_nodes.size(); ++qi) {
        const double q = q_nodes[qi];
        const double centre = bq * q / (2.0 * a);
        Eigen::VectorXd c(order);
        for (int i = 0; i < order; ++i) {
            double q1 = centre + gh.nodes[i] / sa;
            double x1 = M(0, 0) * q1 + M(0, 1) * q;
            double x2 = M(1, 0) * q1 + M(1, 1) * q;
            auto pm = hermite_psi_all(ncut - 1, q1);
            auto pn = hermite_psi_all(ncut - 1, x1);
            for (int k = 0; k < ncut; ++k) {
                P(i, k) = pm[k];
                R(i, k) = pn[k];
            }
            c(i) = gh.scaled[i] / sa * hermite_psi(0, x2);
        }
        Eigen::MatrixXd C = P.transpose() * c.asDiagonal() * R;
        fam.ops.push_back(std::sqrt(q_weights[qi]) * C.cast<cplx>());
        fam.nodes.push_back(fam.spec.family == Family::B1 ? shift * q : q);
        fam.weights.push_back(q_weights[qi]);
    }
    fam.completeness_defect = completeness_defect(fam);
    return fam;
}

KrausFamily position_kraus(const MixMatrix& M, int node_count, int ncut)
{
    GaussHermite gh = gauss_hermite(node_count);
    return position_kraus(M, gh.nodes, gh.scaled, ncut);
}

}  // namespace bosonic
