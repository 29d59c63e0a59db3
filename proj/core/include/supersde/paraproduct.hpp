#pragma once

#include <utility>

#include "supersde/besov.hpp"
#include "supersde/field.hpp"

namespace supersde {

/// Bony decomposition with the standard block pairing:
///   b < v = sum_{j>=1} S_{j-1} b . Delta_j v      (low-high)
///   b > v = v < b                                  (high-low)
///   b o v = sum_{|i-j|<=1} Delta_i b . Delta_j v   (resonant)
/// Blocks run to the covering index of the grid, so the three terms sum to
/// the pointwise product on the lattice up to rounding.
ScalarField para_lt(const ScalarField& b, const ScalarField& v);
ScalarField para_gt(const ScalarField& b, const ScalarField& v);
ScalarField resonant(const ScalarField& b, const ScalarField& v);

struct DriftProduct {
    ScalarField value;                    // b < grad u + b > grad u + div(b o u)
    double ratio = 0.0;                   // ||b.grad u||_{B^{-1}_{r,2}} / (||b|| ||u||)
    double numerator = 0.0;               // ||b.grad u||_{B^{-1}_{r,2}}
    double b_norm = 0.0;                  // ||b||_{B^{-gamma}_{p,inf}}
    double u_norm = 0.0;                  // max(||u||_inf, ||u||_H1)
    std::pair<double, double> admissible; // open interval for r
};

/// Paraproduct form of b . grad u for divergence-free b, with the certified
/// interpolation-bound ratio. r must lie in (2p/(p+2), 2p/(p gamma + 2)).
DriftProduct drift_product(const VectorField& b, const ScalarField& u,
                           double gamma, double p, double r);

/// Admissible r interval (2p/(p+2), 2p/(p gamma + 2)).
std::pair<double, double> drift_product_admissible_r(double gamma, double p);

struct InterpolationCheck {
    double ratio = 0.0;   // ||u||_{B^{2/q}_{q,inf}} / max(||u||_inf, ||u||_H1)
    double besov = 0.0;
    double bound = 0.0;
    bool degenerate = false;  // u == 0: 0/0, no number reported
};

/// Checks ||u||_{B^{2/q}_{q,inf}} <= C max(||u||_inf, ||u||_H1), q in (2,inf).
InterpolationCheck interpolation_bound_check(const ScalarField& u, double q);

}  // namespace supersde
