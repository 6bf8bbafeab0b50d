#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bosonic/kraus.hpp"

namespace bosonic {

// Position block of S = M (+) (M^{-1})^T acting on (system, ancilla).
using MixMatrix = Eigen::Matrix2d;

// F(v) = prefactor * exp(v^T Q v / 2), v = (z1, z2, eta1, eta2).
struct GeneratingForm {
    double prefactor = 0.0;
    Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
    // Largest deviation seen in the build-time quadrature self-check.
    double self_check_error = 0.0;

    double operator()(const Eigen::Vector4d& v) const;
};

MixMatrix mix_matrix(const ChannelSpec& spec);

// Completes the square in the x-integral. Throws NotPositiveDefinite.
GeneratingForm generating_form(const MixMatrix& M);

// F evaluated by a 2D Gauss-Hermite sum of the raw x-integral.
double generating_integral(const MixMatrix& M, const Eigen::Vector4d& v, int nodes = 48);

inline constexpr int kMaxSchemeOrder = 120;

// Normalized Taylor coefficients d_k = c_k sqrt(k!) of F on the box
// [0,n1] x [0,n2] x [0,m1] x [0,m2], k ordered as (z1, z2, eta1, eta2).
class CoefficientTable {
public:
    CoefficientTable(const GeneratingForm& form, int n1, int n2, int m1, int m2);
    // C^{m1 m2}_{n1 n2}
    double operator()(int m1, int m2, int n1, int n2) const;

private:
    int dims_[4];
    std::vector<double> d_;
    size_t index(int k0, int k1, int k2, int k3) const;
};

double matrix_element(const GeneratingForm& form, int m1, int m2, int n1, int n2);

// W_l[m1][n1] = C^{m1 l}_{n1 0}. The recognized canonical M shapes set the
// family spec; anything else is reported as Identity with origin "scheme-derived (general M)".
KrausFamily kraus_from_scheme(const MixMatrix& M, int ell_max, int ncut);

// Mixed-basis construction for singular-position couplings: the A2 shape
// [[0,1],[1,-1]] or a shear [[1,-t],[0,1]] (B1 with a = t^2). The
// q1-integral is done by Hermite quadrature centred on its Gaussian.
KrausFamily position_kraus(const MixMatrix& M, const std::vector<double>& q_nodes,
                           const std::vector<double>& q_weights, int ncut);
KrausFamily position_kraus(const MixMatrix& M, int node_count, int ncut);

}  // namespace bosonic
