#include "supersde/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "supersde/fft.hpp"

namespace supersde {

namespace {

void check_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument("ScalarField: non-finite input value");
}

}  // namespace

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (std::int64_t(values_.size()) != grid_.size())
        throw std::invalid_argument("ScalarField: value array size mismatch");
    check_finite(values_);
    coeffs_.assign(values_.begin(), values_.end());
    fft::forward(grid_, coeffs_.data());
    const double scale = grid_.cell_volume();
    for (auto& c : coeffs_) c *= scale;
}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values,
                         std::vector<std::complex<double>> coeffs)
    : grid_(grid), values_(std::move(values)), coeffs_(std::move(coeffs)) {}

ScalarField ScalarField::from_coeffs(const TorusGrid& grid,
                                     std::vector<std::complex<double>> coeffs) {
    if (std::int64_t(coeffs.size()) != grid.size())
        throw std::invalid_argument("ScalarField: coeff array size mismatch");
    std::vector<std::complex<double>> work = coeffs;
    fft::backward(grid, work.data());
    const double scale = 1.0 / grid.volume();
    std::vector<double> values(work.size());
    double max_imag = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        const std::complex<double> z = work[i] * scale;
        values[i] = z.real();
        max_imag = std::max(max_imag, std::abs(z.imag()));
        max_abs = std::max(max_abs, std::abs(z.real()));
    }
    if (max_imag > 1e-8 * std::max(1.0, max_abs))
        throw std::invalid_argument(
            "ScalarField::from_coeffs: coefficients are not conjugate "
            "symmetric (imaginary residue " + std::to_string(max_imag) + ")");
    check_finite(values);
    return ScalarField(grid, std::move(values), std::move(coeffs));
}

ScalarField ScalarField::from_function(
    const TorusGrid& grid,
    const std::function<double(const std::array<double, 3>&)>& fn) {
    std::vector<double> values(grid.size());
    for_each_point(grid, [&](std::int64_t idx, const std::array<double, 3>& x) {
        values[idx] = fn(x);
    });
    return ScalarField(grid, std::move(values));
}

ScalarField ScalarField::constant(const TorusGrid& grid, double c) {
    std::vector<double> values(grid.size(), c);
    std::vector<std::complex<double>> coeffs(grid.size(), {0.0, 0.0});
    coeffs[0] = c * grid.volume();
    return ScalarField(grid, std::move(values), std::move(coeffs));
}

ScalarField ScalarField::cosine(const TorusGrid& grid, const std::array<int, 3>& k,
                                double amplitude, double phase) {
    const double w = 2.0 * M_PI / grid.L;
    return from_function(grid, [&](const std::array<double, 3>& x) {
        double arg = phase;
        for (int a = 0; a < grid.dim; ++a) arg += w * k[a] * x[a];
        return amplitude * std::cos(arg);
    });
}

double ScalarField::mean() const { return coeffs_[0].real() / grid_.volume(); }

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("field +: grid mismatch");
    std::vector<double> v(values_.size());
    std::vector<std::complex<double>> c(coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] + o.coeffs_[i];
    return ScalarField(grid_, std::move(v), std::move(c));
}

ScalarField ScalarField::operator-(const ScalarField& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("field -: grid mismatch");
    std::vector<double> v(values_.size());
    std::vector<std::complex<double>> c(coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] - o.coeffs_[i];
    return ScalarField(grid_, std::move(v), std::move(c));
}

ScalarField ScalarField::operator*(double s) const {
    std::vector<double> v(values_.size());
    std::vector<std::complex<double>> c(coeffs_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * s;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_[i] * s;
    return ScalarField(grid_, std::move(v), std::move(c));
}

ScalarField ScalarField::pointwise(const ScalarField& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("field *: grid mismatch");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * o.values_[i];
    return ScalarField(grid_, std::move(v));
}

VectorField::VectorField(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw std::invalid_argument("VectorField: no components");
    const TorusGrid& g = comps_[0].grid();
    if (int(comps_.size()) != g.dim)
        throw std::invalid_argument("VectorField: component count != dim");
    for (const auto& c : comps_)
        if (c.grid() != g)
            throw std::invalid_argument("VectorField: components on different grids");
}

double VectorField::l2_norm() const {
    double s = 0.0;
    for (const auto& c : comps_) {
        const double n = lp_norm(c, 2.0);
        s += n * n;
    }
    return std::sqrt(s);
}

double VectorField::max_pointwise_norm() const {
    const std::int64_t n = comps_[0].size();
    double best = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& c : comps_) s += c.value(i) * c.value(i);
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

std::vector<std::complex<double>> dft(const ScalarField& f) {
    return std::vector<std::complex<double>>(f.coeffs().begin(), f.coeffs().end());
}

ScalarField idft(const TorusGrid& grid, std::vector<std::complex<double>> coeffs) {
    return ScalarField::from_coeffs(grid, std::move(coeffs));
}

double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1 or inf");
    const double hv = f.grid().cell_volume();
    double s = 0.0;
    if (p == 2.0) {
        for (double v : f.values()) s += v * v;
    } else {
        for (double v : f.values()) s += std::pow(std::abs(v), p);
    }
    return std::pow(s * hv, 1.0 / p);
}

double h1_norm(const ScalarField& f) {
    // Parseval: ||u||^2 + ||grad u||^2 = L^-d sum (1+|xi|^2) |coeff|^2
    const TorusGrid& g = f.grid();
    auto coeffs = f.coeffs();
    double s = 0.0;
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>&,
                         const std::array<double, 3>& xi) {
        double xi2 = 0.0;
        for (int a = 0; a < g.dim; ++a) xi2 += xi[a] * xi[a];
        s += (1.0 + xi2) * std::norm(coeffs[idx]);
    });
    return std::sqrt(s / g.volume());
}

double interpolate_multilinear(const TorusGrid& g, std::span<const double> values,
                               const double* x) {
    const int N = g.N;
    const double inv_h = N / g.L;
    int i0[3] = {0, 0, 0}, i1[3] = {0, 0, 0};
    double w1[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        const double xa = g.wrap(x[a]) * inv_h;
        const int cell = int(xa);             // in [0, N]
        const int c = cell >= N ? N - 1 : cell;
        w1[a] = xa - c;
        i0[a] = c;
        i1[a] = (c + 1) & (N - 1);            // N is a power of two
    }
    if (g.dim == 2) {
        const double v00 = values[std::int64_t(i0[0]) * N + i0[1]];
        const double v01 = values[std::int64_t(i0[0]) * N + i1[1]];
        const double v10 = values[std::int64_t(i1[0]) * N + i0[1]];
        const double v11 = values[std::int64_t(i1[0]) * N + i1[1]];
        const double a0 = v00 + w1[1] * (v01 - v00);
        const double a1 = v10 + w1[1] * (v11 - v10);
        return a0 + w1[0] * (a1 - a0);
    }
    double acc[2];
    for (int b0 = 0; b0 < 2; ++b0) {
        const std::int64_t base0 = std::int64_t(b0 ? i1[0] : i0[0]) * N;
        double acc1[2];
        for (int b1 = 0; b1 < 2; ++b1) {
            const std::int64_t base1 = (base0 + (b1 ? i1[1] : i0[1])) * N;
            const double lo = values[base1 + i0[2]];
            const double hi = values[base1 + i1[2]];
            acc1[b1] = lo + w1[2] * (hi - lo);
        }
        acc[b0] = acc1[0] + w1[1] * (acc1[1] - acc1[0]);
    }
    return acc[0] + w1[0] * (acc[1] - acc[0]);
}

double evaluate(const ScalarField& f, std::array<double, 3> x, EvalMode mode) {
    for (int a = 0; a < f.grid().dim; ++a)
        if (!std::isfinite(x[a]))
            throw std::invalid_argument("evaluate: non-finite point");
    if (mode == EvalMode::Multilinear)
        return interpolate_multilinear(f.grid(), f.values(), x.data());
    // Direct Fourier series summation (reference mode).
    const TorusGrid& g = f.grid();
    auto coeffs = f.coeffs();
    std::complex<double> s{0.0, 0.0};
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>&,
                         const std::array<double, 3>& xi) {
        double arg = 0.0;
        for (int a = 0; a < g.dim; ++a) arg += xi[a] * x[a];
        s += coeffs[idx] * std::polar(1.0, arg);
    });
    return s.real() / g.volume();
}

}  // namespace supersde
