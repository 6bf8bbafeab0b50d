#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bosonic/fock.hpp"

namespace bosonic {

enum class Family { D, C1, C2, A1, A2, B1, B2, Identity };

std::string family_name(Family f);
Family parse_family(const std::string& s);

// kappa is ignored (and reported as 0 or 1) for A1, A2, B1, B2 and Identity.
struct ChannelSpec {
    Family family = Family::Identity;
    double kappa = 1.0;
    double a = 0.0;

    bool quantum_limited() const { return a == 0.0; }
};

bool has_kappa(Family f);
// Throws InvalidParameter on out-of-range kappa or negative noise.
void validate(const ChannelSpec& s);
ChannelSpec make_spec(Family f, double kappa = 1.0, double a = 0.0);
std::string to_string(const ChannelSpec& s);

enum class IndexKind { Discrete, Quadrature };

struct KrausFamily {
    ChannelSpec spec;
    std::vector<CMat> ops;
    IndexKind index_kind = IndexKind::Discrete;
    // Discrete: the l-sum cut. Operators past the cutoff's band limit vanish
    // identically and are not stored, so ops.size() may be smaller.
    int ell_max = 0;
    // Quadrature: node q_i and the weight already folded into ops[i] as sqrt.
    std::vector<double> nodes;
    std::vector<double> weights;
    // ||sum W^dag W - 1|| on the lower half block, for the untruncated
    // operators; leakage caused by the cutoff shows up in apply instead.
    double completeness_defect = 0.0;
    std::string origin = "closed-form";
    // Product families label each operator by its factor indices (outer, inner).
    std::vector<std::pair<int, int>> labels;
    // Rank-one families: ops[i] = left[i] * right[i]^dag.
    std::vector<CVec> left, right;

    int dim() const { return ops.empty() ? 0 : static_cast<int>(ops.front().cols()); }
    bool rank_one() const { return !left.empty(); }
};

// Single closed-form operators, restricted to rows x cols.
CMat kraus_D(double kappa, int ell, int rows, int cols);
CMat kraus_C1(double kappa, int ell, int rows, int cols);
CMat kraus_C2(double kappa, int ell, int rows, int cols);

// The l-cut giving an analytic completeness tail below 1e-12 on the lower
// half block, never below the band limit of the cutoff.
int default_ell_max(const ChannelSpec& spec, int ncut);

// ell_max < 0 selects default_ell_max.
KrausFamily build_discrete(const ChannelSpec& spec, int ell_max, int ncut);
KrausFamily build_continuous(const ChannelSpec& spec, int node_count, int ncut);

DensityMatrix apply(const KrausFamily& fam, const DensityMatrix& rho);
// Unnormalized sum W rho W^dag.
CMat apply_raw(const KrausFamily& fam, const CMat& rho);

KrausFamily dual(const KrausFamily& fam);

struct GridPoint {
    cplx alpha;
    double weight;  // measure d^2 alpha
};
// Product Gauss-Hermite grid in (Re alpha, Im alpha); exact for
// exp(-|alpha|^2) times polynomials of degree < 2*order per axis.
std::vector<GridPoint> gauss_hermite_grid(int order);

KrausFamily rank_one_D(double kappa, const std::vector<GridPoint>& grid, int ncut);

// Image of |m><n| under D, C1 or C2 from the summed Fock-basis formulas.
CMat closed_form_action(const ChannelSpec& spec, int m, int n, int ncut);

// ||sum W^dag W - 1|| restricted to the leading block x block corner.
double completeness_defect(const std::vector<CMat>& ops, int block);
// Same, recomputed from the stored (truncated) operators with block = N/2.
double completeness_defect(const KrausFamily& fam);

}  // namespace bosonic
