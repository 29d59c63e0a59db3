#pragma once

#include <span>
#include <vector>

#include "supersde/besov.hpp"
#include "supersde/field.hpp"

namespace supersde {

/// Standard smooth bump rho(x) = c exp(-1/(1-|x|^2)) on |x| < 1, zero
/// outside, normalised to unit integral; rho^n = n^d rho(n.) has support
/// radius 1/n and unit mass.
///
/// Convolution by rho^n is applied as the Fourier multiplier rho^n-hat(xi)
/// = R(|xi|/n), where R is the radial Fourier profile of rho (tabulated once
/// per dimension from the Hankel / spherical integral and exactly 1 at the
/// origin, so the zero mode is preserved bit-exactly). For resolvable levels
/// this agrees with the DFT of the grid-sampled rho^n to spectral accuracy;
/// it stays meaningful when 1/n dips below the grid scale, where sampling
/// would not.
class Mollifier {
  public:
    Mollifier(int dim, double level);

    int dim() const { return dim_; }
    double level() const { return level_; }

    /// rho^n-hat at radial frequency |xi|.
    double hat(double xi_norm) const;

    /// Unit-ball profile value rho(x) at radius r (normalised).
    double profile(double r) const;

    /// Grid sampling of rho^n, periodised; used by quadrature oracles and
    /// the unit-mass invariant.
    ScalarField sample_on(const TorusGrid& g) const;

    /// Mollifier resolved on the grid: support radius 1/n >= 2h.
    bool resolved_on(const TorusGrid& g) const { return 1.0 / level_ >= 2.0 * g.h(); }

  private:
    int dim_;
    double level_;
};

/// b^n = rho^n * b. Warns (via the returned flag on Mollifier) when the
/// mollifier is under-resolved; mass (zero mode) is preserved exactly.
ScalarField mollify(const ScalarField& u, const Mollifier& m);

struct MollifyScanRow {
    double level = 0.0;
    double error = 0.0;   // ||b - b^n|| in B^{s-alpha}_{p,q}
};

struct MollifyScan {
    std::vector<MollifyScanRow> rows;
    double slope = 0.0;       // least-squares slope of log error vs log n
    double intercept = 0.0;
    BesovIndex error_index;   // B^{s-alpha}_{p,q}
    double base_norm = 0.0;   // ||b||_{B^s_{p,q}}
};

/// Error table for the mollification rate: the fitted slope is expected to
/// be <= -alpha + slack on resolvable scales. Requires >= 3 levels.
MollifyScan mollification_rate_scan(const ScalarField& b, const BesovIndex& idx,
                                    double alpha, std::span<const double> levels);

/// sup_{j>=-1} 2^{-alpha j} || phi_j - rho^n * phi_j ||_{L1} on the grid,
/// the discrete counterpart of || delta_0 - rho^n ||_{B^{-alpha}_{1,inf}}.
double delta_mollifier_besov_gauge(const TorusGrid& g, double level, double alpha);

}  // namespace supersde
