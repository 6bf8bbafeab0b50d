#pragma once

#include <vector>

namespace bosonic {

// Generalized Laguerre L_n^{(alpha)}(x) by upward recurrence.
double laguerre(int n, double alpha, double x);

// Normalized oscillator eigenfunction psi_n(x) with weight exp(-x^2/2).
// Throws Overflow for n > 2000.
double hermite_psi(int n, double x);

// psi_0(x) .. psi_{nmax}(x).
std::vector<double> hermite_psi_all(int nmax, double x);

// Gauss-Hermite rule for weight exp(-x^2). `scaled[i]` is weights[i]*exp(x_i^2),
// which stays O(1) at the outer nodes where the raw weight underflows.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> scaled;
};

GaussHermite gauss_hermite(int order);

double log_factorial(int n);
// sqrt(nCk), via lgamma.
double sqrt_binomial(int n, int k);

}  // namespace bosonic
