// Independent reference implementations the unit and acceptance tests check
// the library against: direct double-sum DFT, finite differences, direct
// circular convolution, dense generator matrices with a scaling-squaring
// exponential. Deliberately naive; they must not share code paths with the
// library operations they validate.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "supersde/antisym.hpp"
#include "supersde/field.hpp"
#include "supersde/multiplier.hpp"
#include "supersde/rng.hpp"

namespace oracles {

using namespace supersde;

// O(N^4) double-sum DFT in d = 2 with the library's normalisation.
inline std::vector<std::complex<double>> brute_dft_2d(const ScalarField& f) {
    const TorusGrid& g = f.grid();
    const int N = g.N;
    std::vector<std::complex<double>> out(g.size());
    const double hv = g.cell_volume();
    for (int k0 = 0; k0 < N; ++k0) {
        for (int k1 = 0; k1 < N; ++k1) {
            std::complex<double> acc{0.0, 0.0};
            for (int i0 = 0; i0 < N; ++i0)
                for (int i1 = 0; i1 < N; ++i1) {
                    const double phase =
                        -2.0 * M_PI * (double(k0) * i0 + double(k1) * i1) / N;
                    acc += f.value(std::int64_t(i0) * N + i1) *
                           std::polar(1.0, phase);
                }
            out[std::int64_t(k0) * N + k1] = acc * hv;
        }
    }
    return out;
}

// centered finite-difference derivative on the periodic grid
inline ScalarField fd_derivative(const ScalarField& f, int axis) {
    const TorusGrid& g = f.grid();
    const int N = g.N;
    std::vector<double> out(g.size());
    for_each_point(g, [&](std::int64_t idx, const std::array<double, 3>&) {
        std::int64_t ip = idx, im = idx;
        if (g.dim == 2) {
            const int i0 = int(idx / N), i1 = int(idx % N);
            if (axis == 0) {
                ip = std::int64_t((i0 + 1) % N) * N + i1;
                im = std::int64_t((i0 + N - 1) % N) * N + i1;
            } else {
                ip = std::int64_t(i0) * N + (i1 + 1) % N;
                im = std::int64_t(i0) * N + (i1 + N - 1) % N;
            }
        } else {
            const int i2 = int(idx % N);
            const int i1 = int((idx / N) % N);
            const int i0 = int(idx / (std::int64_t(N) * N));
            int j0 = i0, j1 = i1, j2 = i2, m0 = i0, m1 = i1, m2 = i2;
            if (axis == 0) { j0 = (i0 + 1) % N; m0 = (i0 + N - 1) % N; }
            if (axis == 1) { j1 = (i1 + 1) % N; m1 = (i1 + N - 1) % N; }
            if (axis == 2) { j2 = (i2 + 1) % N; m2 = (i2 + N - 1) % N; }
            ip = (std::int64_t(j0) * N + j1) * N + j2;
            im = (std::int64_t(m0) * N + m1) * N + m2;
        }
        out[idx] = (f.value(ip) - f.value(im)) / (2.0 * g.h());
    });
    return ScalarField(g, std::move(out));
}

// direct circular convolution (u * k)(x) = sum_y u(x-y) k(y) h^d, d = 2
inline ScalarField direct_convolution_2d(const ScalarField& u, const ScalarField& k) {
    const TorusGrid& g = u.grid();
    const int N = g.N;
    const double hv = g.cell_volume();
    std::vector<double> out(g.size(), 0.0);
    for (int x0 = 0; x0 < N; ++x0)
        for (int x1 = 0; x1 < N; ++x1) {
            double acc = 0.0;
            for (int y0 = 0; y0 < N; ++y0)
                for (int y1 = 0; y1 < N; ++y1)
                    acc += u.value(std::int64_t((x0 - y0 + N) % N) * N +
                                   (x1 - y1 + N) % N) *
                           k.value(std::int64_t(y0) * N + y1);
            out[std::int64_t(x0) * N + x1] = acc * hv;
        }
    return ScalarField(g, std::move(out));
}

// random band-limited field (modes |k|_inf <= kmax), deterministic in seed
inline ScalarField random_band_limited(const TorusGrid& g, int kmax,
                                       std::uint64_t seed, double amp = 1.0) {
    std::vector<std::complex<double>> coeffs(g.size(), {0.0, 0.0});
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k,
                         const std::array<double, 3>&) {
        bool inband = true;
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(k[a]) > kmax) inband = false;
        if (!inband) return;
        if (k[0] == 0 && k[1] == 0 && (g.dim == 2 || k[2] == 0)) return;
        bool canonical = false;
        for (int a = 0; a < g.dim; ++a) {
            if (k[a] != 0) {
                canonical = k[a] > 0;
                break;
            }
        }
        if (!canonical) return;
        const auto gp = gauss_pair(seed, RngStream::Scrambler, idx, 0);
        const std::complex<double> z(gp[0], gp[1]);
        coeffs[idx] = amp * g.volume() * z;
        // conjugate partner
        std::array<int, 3> neg{};
        for (int a = 0; a < g.dim; ++a) neg[a] = (-k[a] + g.N) % g.N;
        coeffs[grid_index(g, neg[0], neg[1], neg[2])] = std::conj(coeffs[idx]);
    });
    return ScalarField::from_coeffs(g, std::move(coeffs));
}

// fully random real field (all modes), deterministic in seed
inline ScalarField random_values_field(const TorusGrid& g, std::uint64_t seed,
                                       double amp = 1.0) {
    std::vector<double> vals(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i)
        vals[i] = amp * gauss_pair(seed, RngStream::Scrambler, i, 7)[0];
    return ScalarField(g, std::move(vals));
}

// ---- dense operators -------------------------------------------------

using Matrix = std::vector<double>;  // row-major n x n

// finite-difference generator L = Lap_FD + b . grad_FD on the grid (d = 2);
// independent of the spectral machinery
inline Matrix dense_fd_generator_2d(const TorusGrid& g, const VectorField* b) {
    const int N = g.N;
    const std::int64_t n = g.size();
    const double h = g.h();
    Matrix L(std::size_t(n) * n, 0.0);
    auto at = [&](std::int64_t r, std::int64_t c) -> double& {
        return L[std::size_t(r) * n + c];
    };
    for (int i0 = 0; i0 < N; ++i0)
        for (int i1 = 0; i1 < N; ++i1) {
            const std::int64_t r = std::int64_t(i0) * N + i1;
            const std::int64_t xp = std::int64_t((i0 + 1) % N) * N + i1;
            const std::int64_t xm = std::int64_t((i0 + N - 1) % N) * N + i1;
            const std::int64_t yp = std::int64_t(i0) * N + (i1 + 1) % N;
            const std::int64_t ym = std::int64_t(i0) * N + (i1 + N - 1) % N;
            at(r, r) += -4.0 / (h * h);
            at(r, xp) += 1.0 / (h * h);
            at(r, xm) += 1.0 / (h * h);
            at(r, yp) += 1.0 / (h * h);
            at(r, ym) += 1.0 / (h * h);
            if (b) {
                const double b0 = b->comp(0).value(r);
                const double b1 = b->comp(1).value(r);
                at(r, xp) += b0 / (2.0 * h);
                at(r, xm) -= b0 / (2.0 * h);
                at(r, yp) += b1 / (2.0 * h);
                at(r, ym) -= b1 / (2.0 * h);
            }
        }
    return L;
}

// the library's semidiscrete spectral generator, column by column:
// L e_j = Lap e_j + P div(A grad (P e_j)) with P the 2/3 projection
inline Matrix dense_spectral_generator(const TorusGrid& g,
                                       const AntisymmetricField* A) {
    const std::int64_t n = g.size();
    Matrix L(std::size_t(n) * n, 0.0);
    AntisymmetricField Ad = A
        ? (A->dim() == 2
               ? AntisymmetricField::stream2d(dealias(A->potential(0)))
               : AntisymmetricField::potential3d({dealias(A->potential(0)),
                                                  dealias(A->potential(1)),
                                                  dealias(A->potential(2))}))
        : AntisymmetricField::stream2d(ScalarField::zero(g));
    for (std::int64_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const ScalarField ej = dealias(ScalarField(g, std::move(e)));
        ScalarField col = laplacian(ej);
        if (A) col = col + dealias(divergence(apply_matrix(Ad, gradient(ej))));
        for (std::int64_t i = 0; i < n; ++i) L[std::size_t(i) * n + j] = col.value(i);
    }
    return L;
}

inline std::vector<double> mat_vec(const Matrix& M, const std::vector<double>& v) {
    const std::int64_t n = std::int64_t(v.size());
    std::vector<double> out(n, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = &M[std::size_t(i) * n];
        for (std::int64_t j = 0; j < n; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

// exp(T L) v by scaling and squaring on the vector: exp(T L) v =
// (exp(T L / 2^s))^(2^s) v with a Taylor series for the small block. The
// squaring is done matrix-free by repeated Taylor application.
inline std::vector<double> expm_apply(const Matrix& L, double T,
                                      std::vector<double> v) {
    const std::int64_t n = std::int64_t(v.size());
    double norm1 = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::int64_t i = 0; i < n; ++i)
            col += std::abs(L[std::size_t(i) * n + j]);
        norm1 = std::max(norm1, col);
    }
    int s = 0;
    double scaled = std::abs(T) * norm1;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++s;
    }
    const double tau = T / std::ldexp(1.0, s);
    for (std::int64_t rep = 0; rep < (std::int64_t(1) << s); ++rep) {
        std::vector<double> term = v, acc = v;
        for (int k = 1; k <= 24; ++k) {
            term = mat_vec(L, term);
            const double c = tau / k;
            double tnorm = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                term[i] *= c;
                acc[i] += term[i];
                tnorm = std::max(tnorm, std::abs(term[i]));
            }
            if (tnorm < 1e-18) break;
        }
        v = std::move(acc);
    }
    return v;
}

}  // namespace oracles
