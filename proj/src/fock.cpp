#include "bosonic/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bosonic/errors.hpp"
#include "bosonic/special.hpp"

namespace bosonic {

namespace {

void check_cutoff(int ncut)
{
    if (ncut < 2) throw InvalidParameter("cutoff must be at least 2, got " + std::to_string(ncut));
}

void check_tail(double tail, double limit, const char* what)
{
    if (tail > limit) {
        throw CutoffTooSmall(std::string(what) + ": tail mass " + std::to_string(tail) +
                             " exceeds " + std::to_string(limit));
    }
}

DensityMatrix diagonal_state(const Eigen::VectorXd& p, double tail)
{
    DensityMatrix d;
    d.rho = p.cast<cplx>().asDiagonal();
    d.tail_mass = tail;
    return d;
}

// Poisson tail sum_{n >= ncut} e^{-mu} mu^n / n!, summed forward from ncut
// so that tiny tails keep their relative precision.
double poisson_tail(double mu, int ncut)
{
    if (mu == 0.0) return 0.0;
    double logt = -mu + ncut * std::log(mu) - log_factorial(ncut);
    double term = std::exp(logt);
    double s = 0.0;
    for (int n = ncut; n < ncut + 100000; ++n) {
        s += term;
        term *= mu / (n + 1);
        if (n > mu && term < 1e-18 * s) break;
    }
    if (s < 1e-300) return 0.0;
    return std::min(s, 1.0);
}

}  // namespace

void check_density(const DensityMatrix& d)
{
    const CMat& r = d.rho;
    if (r.rows() != r.cols()) throw InvalidParameter("density matrix not square");
    if (r.rows() < 2) throw InvalidParameter("dim < 2");
    if (!r.allFinite()) throw InvalidParameter("non-finite entries");
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidParameter("not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidParameter("negative eigenvalue");
    double tr = d.trace();
    if (d.tail_mass < 0.0) throw InvalidParameter("negative tail mass");
    if (tr < 1.0 - d.tail_mass - 1e-10 || tr > 1.0 + 1e-10) {
        throw InvalidParameter("trace " + std::to_string(tr) + " inconsistent with tail mass");
    }
}

bool is_density(const DensityMatrix& d)
{
    try {
        check_density(d);
        return true;
    } catch (const InvalidParameter&) {
        return false;
    }
}

DensityMatrix fock_state(int n, int ncut)
{
    check_cutoff(ncut);
    if (n < 0 || n >= ncut) throw CutoffTooSmall("fock(" + std::to_string(n) + ") needs ncut > n");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(ncut);
    p(n) = 1.0;
    return diagonal_state(p, 0.0);
}

CVec coherent_vector(cplx alpha, int ncut)
{
    CVec v(ncut);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < ncut; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    return v;
}

DensityMatrix coherent_state(cplx alpha, int ncut, double tail_limit)
{
    check_cutoff(ncut);
    double tail = poisson_tail(std::norm(alpha), ncut);
    check_tail(tail, tail_limit, "coherent");
    CVec v = coherent_vector(alpha, ncut);
    DensityMatrix d;
    d.rho = v * v.adjoint();
    d.tail_mass = tail;
    return d;
}

DensityMatrix thermal_state(double a0, int ncut, double tail_limit)
{
    check_cutoff(ncut);
    if (!(a0 >= 1.0)) throw InvalidParameter("thermal: a0 must be >= 1");
    double x = (a0 - 1.0) / (a0 + 1.0);
    double tail = std::pow(x, ncut);
    check_tail(tail, tail_limit, "thermal");
    Eigen::VectorXd p(ncut);
    double xn = 1.0;
    for (int n = 0; n < ncut; ++n) {
        p(n) = (1.0 - x) * xn;
        xn *= x;
    }
    return diagonal_state(p, tail);
}

DensityMatrix phase_averaged_state(double lambda, int ncut, double tail_limit)
{
    check_cutoff(ncut);
    if (!(lambda >= 0.0)) throw InvalidParameter("phase_averaged: lambda must be >= 0");
    double tail = poisson_tail(lambda, ncut);
    check_tail(tail, tail_limit, "phase_averaged");
    Eigen::VectorXd p(ncut);
    p(0) = std::exp(-lambda);
    for (int n = 1; n < ncut; ++n) p(n) = p(n - 1) * lambda / n;
    return diagonal_state(p, tail);
}

DensityMatrix random_mixed_state(std::uint64_t seed, int rank, int ncut)
{
    check_cutoff(ncut);
    int support = std::max(1, ncut / 2);
    if (rank < 1 || rank > support) throw InvalidParameter("random_mixed: rank out of range");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMat v(support, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < support; ++i) v(i, j) = cplx(g(rng), g(rng));
    CMat s = v * v.adjoint();
    s /= s.trace().real();
    DensityMatrix d;
    d.rho = CMat::Zero(ncut, ncut);
    d.rho.topLeftCorner(support, support) = 0.5 * (s + s.adjoint());
    return d;
}

cplx displacement_element(int m, int n, cplx xi)
{
    double r2 = std::norm(xi);
    if (r2 == 0.0) return m == n ? 1.0 : 0.0;
    // <m|D|n> for n >= m: sqrt(m!/n!) (-xi^*)^{n-m} L_m^{n-m}(|xi|^2) e^{-|xi|^2/2};
    // for m > n: sqrt(n!/m!) xi^{m-n} L_n^{m-n}(|xi|^2) e^{-|xi|^2/2}.
    int lo = std::min(m, n), k = std::abs(m - n);
    cplx base = (n >= m) ? -std::conj(xi) : xi;
    double logmag = 0.5 * (log_factorial(lo) - log_factorial(lo + k)) + k * 0.5 * std::log(r2) - 0.5 * r2;
    cplx phase = std::polar(1.0, k * std::arg(base));
    return std::exp(logmag) * phase * laguerre(lo, k, r2);
}

CMat displacement_block(cplx xi, int rows, int cols)
{
    CMat d(rows, cols);
    for (int m = 0; m < rows; ++m)
        for (int n = 0; n < cols; ++n) d(m, n) = displacement_element(m, n, xi);
    return d;
}

CMat displacement_op(cplx xi, int ncut)
{
    check_cutoff(ncut);
    if (std::norm(xi) * ncut > 1e6) throw Overflow("displacement_op: |xi|^2 N_cut too large");
    return displacement_block(xi, ncut, ncut);
}

cplx char_weyl(const DensityMatrix& d, cplx xi)
{
    const int n = d.dim();
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (d.rho(j, i) == 0.0) continue;
            s += displacement_element(i, j, xi) * d.rho(j, i);
        }
    return s;
}

cplx char_ordered(const DensityMatrix& d, cplx xi, Ordering order)
{
    double f = order == Ordering::Normal ? 0.5 : -0.5;
    return char_weyl(d, xi) * std::exp(f * std::norm(xi));
}

double q_function(const DensityMatrix& d, cplx alpha)
{
    CVec v = coherent_vector(alpha, d.dim());
    return (v.adjoint() * d.rho * v)(0, 0).real();
}

double trace_distance(const CMat& a, const CMat& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimMismatch("trace_distance");
    CMat diff = a - b;
    diff = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b)
{
    return trace_distance(a.rho, b.rho);
}

double mean_photon(const DensityMatrix& d)
{
    double s = 0.0;
    for (int n = 0; n < d.dim(); ++n) s += n * d.rho(n, n).real();
    return s / d.trace();
}

double thermal_parameter_estimate(const DensityMatrix& d) { return 2.0 * mean_photon(d) + 1.0; }

}  // namespace bosonic
