#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace bosonic {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Truncated operators are plain complex matrices on span{|0>,...,|N-1>};
// the cutoff is the matrix dimension.
using TruncatedOperator = CMat;

// rho is the projection of the state onto the cutoff space, not renormalized
// at construction: trace(rho) = 1 - tail_mass.
struct DensityMatrix {
    CMat rho;
    double tail_mass = 0.0;

    int dim() const { return static_cast<int>(rho.rows()); }
    double trace() const { return rho.trace().real(); }
};

inline constexpr double kTailLimit = 0.01;

// Throws InvalidParameter describing the first violated invariant.
void check_density(const DensityMatrix& d);
bool is_density(const DensityMatrix& d);

DensityMatrix fock_state(int n, int ncut);
DensityMatrix coherent_state(cplx alpha, int ncut, double tail_limit = kTailLimit);
DensityMatrix thermal_state(double a0, int ncut, double tail_limit = kTailLimit);
// Poissonian mixture e^{-lambda} sum lambda^j/j! |j><j|.
DensityMatrix phase_averaged_state(double lambda, int ncut, double tail_limit = kTailLimit);
// Random rank-r state supported on the lower half of the cutoff space.
DensityMatrix random_mixed_state(std::uint64_t seed, int rank, int ncut);

// Truncated coherent ket, <n|alpha> for n < ncut.
CVec coherent_vector(cplx alpha, int ncut);

// <m|D(xi)|n>, D(xi) = exp(xi a^dag - xi^* a).
cplx displacement_element(int m, int n, cplx xi);
CMat displacement_op(cplx xi, int ncut);
CMat displacement_block(cplx xi, int rows, int cols);

cplx char_weyl(const DensityMatrix& d, cplx xi);

enum class Ordering { Normal, Antinormal };
cplx char_ordered(const DensityMatrix& d, cplx xi, Ordering order);

// <alpha|rho|alpha>
double q_function(const DensityMatrix& d, cplx alpha);

double trace_distance(const CMat& a, const CMat& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double mean_photon(const DensityMatrix& d);
// a0 = 2<n> + 1
double thermal_parameter_estimate(const DensityMatrix& d);

}  // namespace bosonic
