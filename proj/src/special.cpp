#include "bosonic/special.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "bosonic/errors.hpp"

namespace bosonic {

double laguerre(int n, double alpha, double x)
{
    if (n < 0) return 0.0;
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> hermite_psi_all(int nmax, double x)
{
    if (nmax > 2000) throw Overflow("hermite_psi order " + std::to_string(nmax));
    std::vector<double> psi(static_cast<size_t>(nmax + 1));
    // e^{-x^2/2}, not the e^{-x^2} that sometimes appears in print; the
    // generating function only normalizes with the former.
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (nmax >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 1; n < nmax; ++n) {
        psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(double(n) / (n + 1)) * psi[n - 1];
    }
    return psi;
}

double hermite_psi(int n, double x)
{
    if (n < 0) throw InvalidParameter("hermite_psi: negative order");
    return hermite_psi_all(n, x).back();
}

GaussHermite gauss_hermite(int order)
{
    if (order < 1) throw InvalidParameter("gauss_hermite: order must be positive");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    GaussHermite gh;
    for (int i = 0; i < order; ++i) {
        double x = es.eigenvalues()(i);
        // a couple of Newton steps on psi_K; psi_K' = sqrt(2K) psi_{K-1} - x psi_K
        for (int it = 0; it < 3; ++it) {
            auto p = hermite_psi_all(order, x);
            double d = std::sqrt(2.0 * order) * p[order - 1] - x * p[order];
            if (d == 0.0) break;
            x -= p[order] / d;
        }
        auto p = hermite_psi_all(order - 1, x);
        // w e^{x^2} = 1 / (K psi_{K-1}(x)^2)
        double s = 1.0 / (order * p[order - 1] * p[order - 1]);
        double w = std::exp(-x * x) * s;
        if (!std::isfinite(s)) s = 0.0;
        gh.nodes.push_back(x);
        gh.weights.push_back(w);
        gh.scaled.push_back(s);
    }
    return gh;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

double sqrt_binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    return std::exp(0.5 * (log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

}  // namespace bosonic
