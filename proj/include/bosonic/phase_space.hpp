#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bosonic/fock.hpp"
#include "bosonic/kraus.hpp"

namespace bosonic {

// chi'(xi) = chi(X xi) exp(-xi^T Y xi / 2), with xi read as the real pair
// u = (Im xi, -Re xi) so that chi(u) = <exp(i sqrt2 u.r)>, r = (q, p).
struct XYPair {
    Eigen::Matrix2d X = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d Y = Eigen::Matrix2d::Zero();
};

struct Symplectic2 {
    Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
};
Symplectic2 make_symplectic(const Eigen::Matrix2d& S);

// mean = (<q>, <p>); cov = twice the symmetrized covariance, vacuum = 1.
struct GaussianMoments {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

Eigen::Matrix2d sigma3();
Eigen::Matrix2d omega();

// Table form of each family; D carries X = -kappa sigma3.
XYPair canonical_xy(const ChannelSpec& spec);
// The pair the closed-form Kraus operators actually implement. Identical
// to canonical_xy except for D, whose operators send alpha to kappa alpha^*,
// i.e. X = +kappa sigma3 (the table form composed with parity).
XYPair kraus_xy(const ChannelSpec& spec);

// Smallest eigenvalue of Y + i(Omega - X^T Omega X).
double cp_margin(const XYPair& xy);
bool is_cp(const XYPair& xy, double tol = 1e-10);

// Throws NotCompletelyPositive / Unclassifiable.
ChannelSpec classify(const XYPair& xy);

// `first` acts first: X = X1 X2, Y = X2^T Y1 X2 + Y2.
XYPair compose_xy(const XYPair& first, const XYPair& second);

// outer after inner, both canonical. Throws UnsupportedPair.
ChannelSpec table1_compose(const ChannelSpec& outer, const ChannelSpec& inner);

// Constituents in general position, parametrized by lambda and theta.
ChannelSpec table2_compose(const ChannelSpec& outer, const ChannelSpec& inner, double lambda, double theta);
// The (X, Y) realizing that general-position composite: X = X1 S X2,
// Y = X2^T S^T Y1 S X2 + Y2 with S = R(theta) diag(lambda, 1/lambda) when the
// outer X is invertible, and S = diag(sqrt lambda, 1/sqrt lambda) R(theta)^T
// when it is the rank-one projector.
XYPair general_position_xy(const ChannelSpec& outer, const ChannelSpec& inner, double lambda, double theta);

// (inner, outer) quantum-limited pair whose composite is `target`.
std::pair<ChannelSpec, ChannelSpec> synthesize_noisy(const ChannelSpec& target);

GaussianMoments covariance_map(const XYPair& xy, const GaussianMoments& g);
GaussianMoments moments_from_density(const DensityMatrix& d);
bool satisfies_uncertainty(const GaussianMoments& g, double tol = 1e-10);

// Equality of specs within tol on kappa and a; family must match exactly.
bool same_spec(const ChannelSpec& a, const ChannelSpec& b, double tol);

}  // namespace bosonic
