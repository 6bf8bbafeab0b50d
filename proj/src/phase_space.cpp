#include "bosonic/phase_space.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "bosonic/errors.hpp"

namespace bosonic {

namespace {

constexpr double kTol = 1e-12;

Eigen::Matrix2d rotation(double theta)
{
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

Eigen::Matrix2d projector() { return 0.5 * (Eigen::Matrix2d::Identity() + sigma3()); }

// Attenuator/amplifier/noise result for gain kappa > 0 and det X > 0; the
// kappa = 1 and kappa = 0 ends fold into B2/Identity and A1.
ChannelSpec c_result(double kappa, double a)
{
    if (std::abs(a) < 1e-10) a = 0.0;
    if (kappa < kTol) return make_spec(Family::A1, 0.0, a);
    if (std::abs(kappa - 1.0) <= kTol) return a == 0.0 ? make_spec(Family::Identity) : make_spec(Family::B2, 1.0, a);
    return make_spec(kappa < 1.0 ? Family::C1 : Family::C2, kappa, a);
}

double clamp_noise(double a)
{
    if (a < 0.0 && a > -1e-9) return 0.0;
    return a;
}

// Coefficient y of the quantum-limited Y0 = y 1 for the families the composition tables cover.
double y0(const ChannelSpec& s)
{
    const double k2 = s.kappa * s.kappa;
    switch (s.family) {
    case Family::D: return 1.0 + k2;
    case Family::C1: return 1.0 - k2;
    case Family::C2: return k2 - 1.0;
    case Family::A2: return 1.0;
    default: throw UnsupportedPair("no canonical Y0 coefficient for " + family_name(s.family));
    }
}

bool in_table(Family f) { return f == Family::D || f == Family::C1 || f == Family::C2 || f == Family::A2; }

void check_table_inputs(const ChannelSpec& outer, const ChannelSpec& inner)
{
    validate(outer);
    validate(inner);
    if (!in_table(outer.family) || !in_table(inner.family))
        throw UnsupportedPair(family_name(outer.family) + " o " + family_name(inner.family));
    if (!outer.quantum_limited() || !inner.quantum_limited())
        throw UnsupportedPair("composition tables take quantum-limited constituents");
}

// Quantum-limited noise demanded by det X.
double ql_noise(double detx)
{
    if (std::abs(detx) < kTol) return 1.0;
    return detx < 0.0 ? 1.0 - detx : std::abs(1.0 - detx);
}

}  // namespace

Eigen::Matrix2d sigma3() { return Eigen::Vector2d(1.0, -1.0).asDiagonal(); }

Eigen::Matrix2d omega()
{
    Eigen::Matrix2d o;
    o << 0.0, 1.0, -1.0, 0.0;
    return o;
}

Symplectic2 make_symplectic(const Eigen::Matrix2d& S)
{
    if (std::abs(S.determinant() - 1.0) > 1e-10) throw InvalidParameter("det S != 1");
    return Symplectic2{S};
}

XYPair canonical_xy(const ChannelSpec& spec)
{
    validate(spec);
    const double k = spec.kappa, k2 = k * k, a = spec.a;
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    XYPair xy;
    switch (spec.family) {
    case Family::D: xy.X = -k * sigma3(); xy.Y = (1.0 + k2 + a) * I; break;
    case Family::C1: xy.X = k * I; xy.Y = (1.0 - k2 + a) * I; break;
    case Family::C2: xy.X = k * I; xy.Y = (k2 - 1.0 + a) * I; break;
    case Family::A1: xy.X.setZero(); xy.Y = (1.0 + a) * I; break;
    case Family::A2: xy.X = projector(); xy.Y = (1.0 + a) * I; break;
    case Family::B1: xy.X = I; xy.Y = a * projector(); break;
    case Family::B2: xy.X = I; xy.Y = a * I; break;
    case Family::Identity: break;
    }
    return xy;
}

XYPair kraus_xy(const ChannelSpec& spec)
{
    XYPair xy = canonical_xy(spec);
    if (spec.family == Family::D) xy.X = -xy.X;
    return xy;
}

double cp_margin(const XYPair& xy)
{
    const Eigen::Matrix2cd m = xy.Y.cast<cplx>() + cplx(0.0, 1.0) * (omega() - xy.X.transpose() * omega() * xy.X).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_cp(const XYPair& xy, double tol)
{
    double scale = std::max(1.0, xy.Y.cwiseAbs().maxCoeff());
    return cp_margin(xy) >= -tol * scale;
}

ChannelSpec classify(const XYPair& xy)
{
    if (!xy.X.allFinite() || !xy.Y.allFinite()) throw Unclassifiable("non-finite (X, Y)");
    if ((xy.Y - xy.Y.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Unclassifiable("Y not symmetric");
    if (!is_cp(xy)) throw NotCompletelyPositive("CP margin " + std::to_string(cp_margin(xy)));

    const double d = xy.X.determinant();
    const double kappa = std::sqrt(std::abs(d));
    // Every orbit except B1 admits a symplectic congruence taking Y to
    // sqrt(det Y) 1, so sqrt(det Y) is the invariant noise scale.
    const double dety = std::max(0.0, xy.Y.determinant());
    const double sy = std::sqrt(dety);
    const double ynorm = xy.Y.cwiseAbs().maxCoeff();

    if (std::abs(d) < kTol) {
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(xy.X);
        double a = clamp_noise(sy - 1.0);
        if (svd.singularValues()(0) < kTol) return make_spec(Family::A1, 0.0, a);
        return make_spec(Family::A2, 0.0, a);
    }
    if (d < 0.0) return make_spec(Family::D, kappa, clamp_noise(sy - ql_noise(d)));
    if (std::abs(kappa - 1.0) <= kTol) {
        if (ynorm < kTol) return make_spec(Family::Identity);
        double tr = xy.Y.trace();
        if (dety < 1e-12 * tr * tr) return make_spec(Family::B1, 1.0, tr);
        return make_spec(Family::B2, 1.0, sy);
    }
    return c_result(kappa, clamp_noise(sy - std::abs(1.0 - d)));
}

XYPair compose_xy(const XYPair& first, const XYPair& second)
{
    XYPair out;
    out.X = first.X * second.X;
    out.Y = second.X.transpose() * first.Y * second.X + second.Y;
    out.Y = 0.5 * (out.Y + out.Y.transpose()).eval();
    return out;
}

ChannelSpec table1_compose(const ChannelSpec& outer, const ChannelSpec& inner)
{
    if (outer.family == Family::Identity) return inner;
    if (inner.family == Family::Identity) return outer;
    check_table_inputs(outer, inner);
    const Family f2 = outer.family, f1 = inner.family;
    const double k1 = inner.kappa, k2 = outer.kappa;
    const double k = k1 * k2, q1 = k1 * k1, q2 = k2 * k2;
    using F = Family;

    if (f2 == F::A2) {
        // rank-one outer X: sqrt(1 + y1) - 1 with y1 the inner Y0 coefficient
        return make_spec(F::A2, 0.0, clamp_noise(std::sqrt(1.0 + y0(inner)) - 1.0));
    }
    if (f1 == F::A2) {
        switch (f2) {
        case F::D: return make_spec(F::A2, 0.0, 2.0 * q2);
        case F::C1: return make_spec(F::A2, 0.0, 0.0);
        case F::C2: return make_spec(F::A2, 0.0, 2.0 * (q2 - 1.0));
        default: break;
        }
    }
    if (f2 == F::D && f1 == F::D)
        return k <= 1.0 ? c_result(k, 2.0 * q2 * (1.0 + q1)) : c_result(k, 2.0 * (1.0 + q2));
    if (f2 == F::D && f1 == F::C1) return make_spec(F::D, k, 2.0 * q2 * (1.0 - q1));
    if (f2 == F::D && f1 == F::C2) return make_spec(F::D, k, 0.0);
    if (f2 == F::C1 && f1 == F::D) return make_spec(F::D, k, 0.0);
    if (f2 == F::C1 && f1 == F::C1) return c_result(k, 0.0);
    if (f2 == F::C1 && f1 == F::C2)
        return k <= 1.0 ? c_result(k, 2.0 * q2 * (q1 - 1.0)) : c_result(k, 2.0 * (1.0 - q2));
    if (f2 == F::C2 && f1 == F::D) return make_spec(F::D, k, 2.0 * (q2 - 1.0));
    if (f2 == F::C2 && f1 == F::C1)
        return k <= 1.0 ? c_result(k, 2.0 * (q2 - 1.0)) : c_result(k, 2.0 * q2 * (1.0 - q1));
    if (f2 == F::C2 && f1 == F::C2) return c_result(k, 0.0);
    throw UnsupportedPair(family_name(f2) + " o " + family_name(f1));
}

ChannelSpec table2_compose(const ChannelSpec& outer, const ChannelSpec& inner, double lambda, double theta)
{
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0");
    check_table_inputs(outer, inner);
    const double y1 = y0(inner), y2 = y0(outer);
    if (outer.family == Family::A2) {
        const double c = lambda * std::cos(theta) * std::cos(theta) + std::sin(theta) * std::sin(theta) / lambda;
        const double a = clamp_noise(std::sqrt(1.0 + c * y1) - 1.0);
        // A2 o A2: X = P S P vanishes when the (1,1) entry of S does
        if (inner.family == Family::A2 && std::abs(std::cos(theta)) < kTol) return make_spec(Family::A1, 0.0, a);
        return make_spec(Family::A2, 0.0, a);
    }
    // first twelve rows: sqrt((A+B)^2 + A B (lambda - 1/lambda)^2) - quantum-limited part
    const double k2 = outer.kappa;
    const double A = k2 * k2 * y1, B = y2;
    const double s = lambda - 1.0 / lambda;
    const double n = std::sqrt((A + B) * (A + B) + A * B * s * s);
    if (inner.family == Family::A2) return make_spec(Family::A2, 0.0, clamp_noise(n - 1.0));
    const double k = k2 * inner.kappa;
    const bool flip = (outer.family == Family::D) != (inner.family == Family::D);
    if (flip) return make_spec(Family::D, k, clamp_noise(n - (1.0 + k * k)));
    return c_result(k, clamp_noise(n - std::abs(1.0 - k * k)));
}

XYPair general_position_xy(const ChannelSpec& outer, const ChannelSpec& inner, double lambda, double theta)
{
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0");
    XYPair c1 = canonical_xy(inner), c2 = canonical_xy(outer);
    Eigen::Matrix2d S;
    if (outer.family == Family::A2) {
        S = Eigen::Vector2d(std::sqrt(lambda), 1.0 / std::sqrt(lambda)).asDiagonal() * rotation(theta).transpose();
    } else {
        S = rotation(theta) * Eigen::Vector2d(lambda, 1.0 / lambda).asDiagonal();
    }
    XYPair out;
    out.X = c1.X * S * c2.X;
    out.Y = c2.X.transpose() * S.transpose() * c1.Y * S * c2.X + c2.Y;
    out.Y = 0.5 * (out.Y + out.Y.transpose()).eval();
    return out;
}

std::pair<ChannelSpec, ChannelSpec> synthesize_noisy(const ChannelSpec& target)
{
    validate(target);
    const double k = target.kappa, a = target.a;
    auto outer_amp = [](double k2) {
        return std::abs(k2 - 1.0) <= kTol ? make_spec(Family::Identity) : make_spec(Family::C2, k2);
    };
    switch (target.family) {
    case Family::C1:
    case Family::A1:
    case Family::B2: {
        // C1(k; a) = C2(k2) o C1(k/k2) with k2 = sqrt(1 + a/2)
        double kk = target.family == Family::A1 ? 0.0 : (target.family == Family::B2 ? 1.0 : k);
        double k2 = std::sqrt(1.0 + a / 2.0);
        ChannelSpec inner = kk / k2 == 1.0 ? make_spec(Family::Identity) : make_spec(Family::C1, kk / k2);
        return {inner, outer_amp(k2)};
    }
    case Family::C2: {
        double k2 = std::sqrt(k * k + a / 2.0);
        ChannelSpec inner = k / k2 == 1.0 ? make_spec(Family::Identity) : make_spec(Family::C1, k / k2);
        return {inner, outer_amp(k2)};
    }
    case Family::D: {
        double k2 = std::sqrt(1.0 + a / 2.0);
        return {make_spec(Family::D, k / k2), outer_amp(k2)};
    }
    case Family::A2: {
        double k2 = std::sqrt(1.0 + a / 2.0);
        return {make_spec(Family::A2), outer_amp(k2)};
    }
    case Family::Identity:
        return {make_spec(Family::Identity), make_spec(Family::Identity)};
    case Family::B1:
        throw UnsupportedFamily("B1 is not a composite of quantum-limited channels");
    }
    throw UnsupportedFamily(family_name(target.family));
}

GaussianMoments covariance_map(const XYPair& xy, const GaussianMoments& g)
{
    GaussianMoments out;
    out.mean = xy.X.transpose() * g.mean;
    out.cov = xy.X.transpose() * g.cov * xy.X + xy.Y;
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

GaussianMoments moments_from_density(const DensityMatrix& d)
{
    if (d.tail_mass > 1e-4) throw TailTooLarge("moments need tail mass < 1e-4, got " + std::to_string(d.tail_mass));
    const int n = d.dim();
    const CMat& r = d.rho;
    const double tr = d.trace();
    cplx ea = 0.0, ea2 = 0.0;
    double en = 0.0;
    for (int k = 0; k < n; ++k) {
        en += k * r(k, k).real();
        if (k + 1 < n) ea += std::sqrt(double(k + 1)) * r(k + 1, k);
        if (k + 2 < n) ea2 += std::sqrt(double(k + 1) * (k + 2)) * r(k + 2, k);
    }
    ea /= tr;
    ea2 /= tr;
    en /= tr;
    GaussianMoments g;
    const double s2 = std::sqrt(2.0);
    g.mean << s2 * ea.real(), s2 * ea.imag();
    // <q^2> = (2 Re<a^2> + 2<n> + 1)/2,  <p^2> = (-2 Re<a^2> + 2<n> + 1)/2,  <{q,p}>/2 = Im<a^2>
    const double qq = ea2.real() + en + 0.5;
    const double pp = -ea2.real() + en + 0.5;
    const double qp = ea2.imag();
    g.cov << 2.0 * (qq - g.mean(0) * g.mean(0)), 2.0 * (qp - g.mean(0) * g.mean(1)),
        2.0 * (qp - g.mean(0) * g.mean(1)), 2.0 * (pp - g.mean(1) * g.mean(1));
    return g;
}

bool satisfies_uncertainty(const GaussianMoments& g, double tol)
{
    const Eigen::Matrix2cd m = g.cov.cast<cplx>() + cplx(0.0, 1.0) * omega().cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

bool same_spec(const ChannelSpec& a, const ChannelSpec& b, double tol)
{
    if (a.family != b.family) return false;
    if (has_kappa(a.family) && std::abs(a.kappa - b.kappa) > tol) return false;
    return std::abs(a.a - b.a) <= tol;
}

}  // namespace bosonic
