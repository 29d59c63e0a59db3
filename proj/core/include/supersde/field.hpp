#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "supersde/grid.hpp"

namespace supersde {

/// Real scalar field on a TorusGrid, stored in both representations.
///
/// Construction from either side fills in the other, so a field is fully
/// immutable afterwards and safe to share across workers. Spectral
/// coefficients use the quadrature normalisation
///     coeff(k) = h^dim * sum_x value(x) * exp(-i xi_k . x),
/// i.e. L^dim times the Fourier coefficient, so that
///     value(x) = L^-dim * sum_k coeff(k) * exp(+i xi_k . x)
/// and Parseval reads sum |value|^2 h^dim = L^-dim sum |coeff|^2.
class ScalarField {
  public:
    ScalarField() = default;

    /// From point values; the spectrum is computed on construction.
    ScalarField(const TorusGrid& grid, std::vector<double> values);

    /// From spectral coefficients. The coefficient array must be conjugate
    /// symmetric (real field); the imaginary residue after the inverse
    /// transform is checked and discarded.
    static ScalarField from_coeffs(const TorusGrid& grid,
                                   std::vector<std::complex<double>> coeffs);

    /// Samples fn(x) on the grid.
    static ScalarField from_function(
        const TorusGrid& grid,
        const std::function<double(const std::array<double, 3>&)>& fn);

    static ScalarField constant(const TorusGrid& grid, double c);
    static ScalarField zero(const TorusGrid& grid) { return constant(grid, 0.0); }

    /// cos(xi_k . x + phase) for an integer mode k.
    static ScalarField cosine(const TorusGrid& grid, const std::array<int, 3>& k,
                              double amplitude = 1.0, double phase = 0.0);

    const TorusGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<const std::complex<double>> coeffs() const { return coeffs_; }
    double value(std::int64_t idx) const { return values_[idx]; }
    std::int64_t size() const { return std::int64_t(values_.size()); }
    bool empty() const { return values_.empty(); }

    double mean() const;  // zero mode / L^dim

    ScalarField operator+(const ScalarField& o) const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField operator*(double c) const;
    /// Pointwise product (re-transforms; aliasing is the caller's concern).
    ScalarField pointwise(const ScalarField& o) const;

    /// Trusted constructor: both representations already consistent.
    ScalarField(const TorusGrid& grid, std::vector<double> values,
                std::vector<std::complex<double>> coeffs);

  private:
    TorusGrid grid_{};
    std::vector<double> values_;
    std::vector<std::complex<double>> coeffs_;
};

/// dim scalar components on a shared grid.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(std::vector<ScalarField> comps);

    const TorusGrid& grid() const { return comps_.at(0).grid(); }
    int dim() const { return int(comps_.size()); }
    const ScalarField& comp(int i) const { return comps_.at(i); }
    ScalarField& comp(int i) { return comps_.at(i); }

    /// sqrt(sum_i ||F_i||_L2^2)
    double l2_norm() const;
    /// max over grid points of the Euclidean norm |F(x)|.
    double max_pointwise_norm() const;

  private:
    std::vector<ScalarField> comps_;
};

/// Forward transform of a field (returns the cached coefficients).
std::vector<std::complex<double>> dft(const ScalarField& f);
/// Inverse transform.
ScalarField idft(const TorusGrid& grid, std::vector<std::complex<double>> coeffs);

/// L^p norm with grid quadrature; p = infinity gives the max norm.
double lp_norm(const ScalarField& f, double p);

/// sqrt(||u||_L2^2 + ||grad u||_L2^2), computed spectrally.
double h1_norm(const ScalarField& f);

enum class EvalMode { Multilinear, Spectral };

/// Point evaluation. Multilinear interpolates from the surrounding cell;
/// Spectral sums the Fourier series directly (reference mode, O(N^dim)).
double evaluate(const ScalarField& f, std::array<double, 3> x,
                EvalMode mode = EvalMode::Multilinear);

/// Raw multilinear interpolation against a bare value array (hot path for
/// the particle stepper; identical to evaluate(..., Multilinear)).
double interpolate_multilinear(const TorusGrid& g, std::span<const double> values,
                               const double* x);

}  // namespace supersde
