#include "supersde/multiplier.hpp"

#include <cmath>
#include <stdexcept>

namespace supersde {

ScalarField apply_multiplier(const ScalarField& f, const FrequencySymbol& m) {
    const TorusGrid& g = f.grid();
    std::vector<std::complex<double>> out(f.coeffs().begin(), f.coeffs().end());
    bool bad = false;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>&,
                         const std::array<double, 3>& xi) {
        const std::complex<double> v = m.symbol(xi);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) bad = true;
        out[idx] *= v;
    });
    if (bad)
        throw std::invalid_argument("apply_multiplier: symbol '" + m.description +
                                    "' is not finite on the frequency lattice");
    return ScalarField::from_coeffs(g, std::move(out));
}

FrequencySymbol symbol_identity() {
    return {[](const std::array<double, 3>&) { return std::complex<double>(1.0); },
            "identity"};
}

FrequencySymbol symbol_derivative(const TorusGrid& g, int axis) {
    if (axis < 0 || axis >= g.dim)
        throw std::invalid_argument("symbol_derivative: axis out of range");
    const double nyq = g.nyquist();
    return {[axis, nyq](const std::array<double, 3>& xi) {
                // Nyquist mode zeroed: it would break conjugate symmetry.
                if (xi[axis] <= -nyq * (1.0 - 1e-12))
                    return std::complex<double>(0.0);
                return std::complex<double>(0.0, xi[axis]);
            },
            "d/dx_" + std::to_string(axis)};
}

FrequencySymbol symbol_laplacian() {
    return {[](const std::array<double, 3>& xi) {
                return std::complex<double>(
                    -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]));
            },
            "laplacian"};
}

FrequencySymbol symbol_inverse_helmholtz() {
    return {[](const std::array<double, 3>& xi) {
                return std::complex<double>(
                    1.0 / (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]));
            },
            "(1-laplacian)^-1"};
}

FrequencySymbol symbol_helmholtz() {
    return {[](const std::array<double, 3>& xi) {
                return std::complex<double>(
                    1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            },
            "(1-laplacian)"};
}

FrequencySymbol symbol_bessel(double s) {
    return {[s](const std::array<double, 3>& xi) {
                const double w = 1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                return std::complex<double>(std::pow(w, 0.5 * s));
            },
            "(1+|xi|^2)^(s/2)"};
}

ScalarField derivative(const ScalarField& u, int axis) {
    return apply_multiplier(u, symbol_derivative(u.grid(), axis));
}

VectorField gradient(const ScalarField& u) {
    std::vector<ScalarField> comps;
    comps.reserve(u.grid().dim);
    for (int a = 0; a < u.grid().dim; ++a) comps.push_back(derivative(u, a));
    return VectorField(std::move(comps));
}

ScalarField divergence(const VectorField& F) {
    const TorusGrid& g = F.grid();
    const double nyq = g.nyquist();
    std::vector<std::complex<double>> out(g.size(), {0.0, 0.0});
    for (int a = 0; a < g.dim; ++a) {
        auto coeffs = F.comp(a).coeffs();
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>&,
                             const std::array<double, 3>& xi) {
            if (xi[a] <= -nyq * (1.0 - 1e-12)) return;
            out[idx] += std::complex<double>(0.0, xi[a]) * coeffs[idx];
        });
    }
    return ScalarField::from_coeffs(g, std::move(out));
}

ScalarField laplacian(const ScalarField& u) {
    return apply_multiplier(u, symbol_laplacian());
}

int dealias_limit(const TorusGrid& g) { return g.N / 3; }

ScalarField dealias(const ScalarField& u) {
    const TorusGrid& g = u.grid();
    const int kmax = dealias_limit(g);
    std::vector<std::complex<double>> out(u.coeffs().begin(), u.coeffs().end());
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k,
                         const std::array<double, 3>&) {
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(k[a]) > kmax) {
                out[idx] = 0.0;
                return;
            }
    });
    return ScalarField::from_coeffs(g, std::move(out));
}

}  // namespace supersde
