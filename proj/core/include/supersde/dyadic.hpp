#pragma once

#include <vector>

#include "supersde/field.hpp"

namespace supersde {

/// Exact-plateau smooth step: 1 for t <= 0, 0 for t >= 1, exp-bump blend in
/// between. C^infinity, monotone.
double smoothstep_down(double t);

/// Dyadic partition of unity on frequency space.
///
/// chi is radial, == 1 on |xi| <= 1 and == 0 on |xi| >= 4/3, with
///   phi_{-1}(xi) = chi(xi),  phi_j(xi) = chi(xi/2^{j+1}) - chi(xi/2^j).
/// The blocks telescope, so sum_{j<=J} phi_j(xi) = chi(xi/2^{J+1}); phi_j
/// vanishes for |xi| <= 2^j and |xi| >= (8/3) 2^j.
class DyadicPartition {
  public:
    double chi(double r) const;
    double phi(int j, double r) const;  // j >= -1, r = |xi|

    /// Largest block fully supported below the per-axis Nyquist frequency:
    /// floor(log2(3/8 * pi N / L)). Besov sums truncate here.
    static int norm_jmax(const TorusGrid& g);

    /// Smallest J with sum_{j<=J} phi_j == 1 at every lattice frequency
    /// (corner modes included); paraproducts sum blocks up to this J so the
    /// decomposition is complete on the grid.
    static int cover_jmax(const TorusGrid& g);
};

/// j-th Littlewood-Paley block of u (Fourier multiplier phi_j).
/// Throws for j < -1 or j > cover_jmax, reporting the resolvable range.
ScalarField lp_block(const ScalarField& u, int j);

/// Low-pass S_j u (multiplier chi(xi/2^j)); S_{j-1} in the paraproduct sums.
ScalarField lp_lowpass(const ScalarField& u, int j);

/// Partition-of-unity residue max_{|xi| < nyquist} |sum_j phi_j(xi) - 1|
/// over the lattice, summing blocks up to cover_jmax.
double partition_residue(const TorusGrid& g);

}  // namespace supersde
