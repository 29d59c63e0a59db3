#pragma once

#include <complex>
#include <functional>
#include <string>

#include "supersde/field.hpp"

namespace supersde {

/// Fourier multiplier, evaluated on the frequency lattice at application
/// time. Symbols must be conjugate symmetric (m(-xi) = conj m(xi)) so the
/// output stays real; all builtin symbols are.
struct FrequencySymbol {
    std::function<std::complex<double>(const std::array<double, 3>& xi)> symbol;
    std::string description;
};

ScalarField apply_multiplier(const ScalarField& f, const FrequencySymbol& m);

/// Builtin symbols. Differentiation zeroes the Nyquist mode (k = -N/2),
/// which has no conjugate partner on the lattice.
FrequencySymbol symbol_identity();
FrequencySymbol symbol_derivative(const TorusGrid& g, int axis);
FrequencySymbol symbol_laplacian();
FrequencySymbol symbol_inverse_helmholtz();            // (1 - Lap)^{-1}
FrequencySymbol symbol_helmholtz();                    // (1 - Lap)
FrequencySymbol symbol_bessel(double s);               // (1 + |xi|^2)^{s/2}

ScalarField derivative(const ScalarField& u, int axis);
VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& F);
ScalarField laplacian(const ScalarField& u);

/// 2/3-rule truncation: zeroes every mode with |k_a| > floor(N/3) on some
/// axis. Quadratic products of truncated fields are alias-free inside the
/// kept band.
ScalarField dealias(const ScalarField& u);
int dealias_limit(const TorusGrid& g);

}  // namespace supersde
