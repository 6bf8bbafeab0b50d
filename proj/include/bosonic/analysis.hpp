#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bosonic/fock.hpp"
#include "bosonic/kraus.hpp"

namespace bosonic {

struct Trajectory {
    std::vector<DensityMatrix> states;
    // per state: 2<n>+1, and trace distance to the previous state (0 at step 0)
    std::vector<double> a0_estimate;
    std::vector<double> step_distance;

    // columns: step,a0_estimate,trace_distance
    std::string csv() const;
};

Trajectory iterate(const KrausFamily& fam, const DensityMatrix& rho0, int steps);

double thermal_step(const ChannelSpec& spec, double a0);
std::optional<double> fixed_point(const ChannelSpec& spec);

// gamma(m1, m2) for m1 + m2 <= max_order; zero elsewhere.
struct CumulantTable {
    int max_order = 0;
    Eigen::MatrixXd gamma;
    // orders above 4 are flagged by the finite-difference stencil
    bool low_confidence = false;

    double operator()(int m1, int m2) const { return gamma(m1, m2); }
};

// gamma_{m1 m2} = d^{m1}/d(i xi1)^{m1} d^{m2}/d(i xi2)^{m2} log chi_W at 0,
// xi = xi1 + i xi2. Central differences with one Richardson step; h = 1e-2
// through second order, widened for orders 3 and up.
CumulantTable cumulants(const DensityMatrix& d, int max_order);

enum class ZenoMode { Attenuator, Amplifier };
// Attenuator: cos(total/N)^steps (total = pi/2 is full attenuation);
// amplifier: cosh(total/N)^steps.
double zeno_kappa(ZenoMode mode, int N, int steps, double total);

enum class GramTarget {
    Products,   // {W_m^dag W_n}, the Choi criterion
    Operators,  // {W_a} themselves, for linear independence of a Kraus set
};

struct GramReport {
    int K = 0;
    std::vector<double> singular_values;
    int numerical_rank = 0;
    double threshold = 0.0;
    int size() const { return static_cast<int>(singular_values.size()); }
};

// Products: operators 0..K (for quadrature families the K+1 nodes nearest
// q = 0). Operators: the first (K+1)^2 operators, or those labelled
// (m, n) with m, n <= K for product families.
GramReport gram_rank(const KrausFamily& fam, int K, double threshold = 1e-8,
                     GramTarget target = GramTarget::Products);

// {outer_m inner_n : m, n <= K}, labelled (m, n). Pass K >= the longer
// family to reproduce sequential application exactly.
KrausFamily product_family(const KrausFamily& outer, const KrausFamily& inner, int K);

struct ClassicalityReport {
    bool passed = false;
    double max_deviation = 0.0;
    double min_weight = 0.0;
    int checked = 0;
    std::string detail;
};

// C1: coherent (or Poissonian) probes map to coherent (Poissonian) probes
// with scaled amplitude. C2: Q_out(alpha) = k^-2 Q_in(alpha/k). D: the
// diagonal weight k^-2 Q_in(alpha^*/k) is nonnegative and, smoothed by the
// vacuum, reproduces Q_out. A2: <q|rho|q> >= 0 and the q-axis mixture
// reproduces Q_out. Grid points are values of alpha.
ClassicalityReport classicality_check(const ChannelSpec& spec, const std::vector<DensityMatrix>& probes,
                                      const std::vector<cplx>& grid, double tol = 1e-6);

struct DiagonalityReport {
    bool diagonal = false;
    std::string basis;  // "fock", "position" or "none"
    double max_offdiag = 0.0;
};

DiagonalityReport simultaneous_diagonality(const KrausFamily& fam);

}  // namespace bosonic
