#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace supersde {

/// Uniform periodic grid on the torus [0,L)^dim with N points per axis.
///
/// Integer frequency indices live in [-N/2, N/2); the physical (angular)
/// frequency of index k is xi = 2*pi*k/L, so dyadic annuli 2^j refer to |xi|.
struct TorusGrid {
    int dim = 2;        // 2 or 3
    int N = 0;          // points per axis, power of two, >= 8
    double L = 2.0 * M_PI;

    TorusGrid() = default;
    TorusGrid(int dim_, int N_, double L_) : dim(dim_), N(N_), L(L_) {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("TorusGrid: dim must be 2 or 3");
        if (N < 8 || (N & (N - 1)) != 0)
            throw std::invalid_argument("TorusGrid: N must be a power of two >= 8");
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("TorusGrid: L must be positive");
    }

    double h() const { return L / N; }
    std::int64_t size() const {
        std::int64_t s = 1;
        for (int a = 0; a < dim; ++a) s *= N;
        return s;
    }
    double cell_volume() const { return std::pow(h(), dim); }
    double volume() const { return std::pow(L, dim); }

    /// Signed integer frequency of axis index i, in [-N/2, N/2).
    int freq_index(int i) const { return (i < N / 2) ? i : i - N; }
    /// Angular frequency of axis index i.
    double xi(int i) const { return 2.0 * M_PI * freq_index(i) / L; }
    /// Largest angular frequency per axis (Nyquist magnitude), pi*N/L.
    double nyquist() const { return M_PI * N / L; }
    /// Largest |xi| on the lattice (corner mode).
    double max_lattice_xi() const { return nyquist() * std::sqrt(double(dim)); }

    bool operator==(const TorusGrid& o) const {
        return dim == o.dim && N == o.N && L == o.L;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

    /// Wrap a coordinate into [0,L).
    double wrap(double x) const {
        double y = x - L * std::floor(x / L);
        if (y >= L) y -= L;  // guard against floor rounding at the edge
        return y;
    }
    /// Shortest signed displacement a-b on the circle, in [-L/2, L/2).
    double wrap_diff(double a, double b) const {
        double d = a - b;
        d -= L * std::round(d / L);
        return d;
    }
};

/// Row-major lineariser; index order (i0, i1[, i2]) with the last axis fastest.
inline std::int64_t grid_index(const TorusGrid& g, int i0, int i1, int i2 = 0) {
    if (g.dim == 2) return std::int64_t(i0) * g.N + i1;
    return (std::int64_t(i0) * g.N + i1) * g.N + i2;
}

/// Calls fn(linear_index, k_int[3], xi[3]) for every lattice point.
template <typename Fn>
inline void for_each_mode(const TorusGrid& g, Fn&& fn) {
    std::array<int, 3> k{0, 0, 0};
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    std::int64_t idx = 0;
    const double w = 2.0 * M_PI / g.L;
    if (g.dim == 2) {
        for (int i0 = 0; i0 < g.N; ++i0) {
            k[0] = g.freq_index(i0);
            xi[0] = w * k[0];
            for (int i1 = 0; i1 < g.N; ++i1, ++idx) {
                k[1] = g.freq_index(i1);
                xi[1] = w * k[1];
                fn(idx, k, xi);
            }
        }
    } else {
        for (int i0 = 0; i0 < g.N; ++i0) {
            k[0] = g.freq_index(i0);
            xi[0] = w * k[0];
            for (int i1 = 0; i1 < g.N; ++i1) {
                k[1] = g.freq_index(i1);
                xi[1] = w * k[1];
                for (int i2 = 0; i2 < g.N; ++i2, ++idx) {
                    k[2] = g.freq_index(i2);
                    xi[2] = w * k[2];
                    fn(idx, k, xi);
                }
            }
        }
    }
}

/// Calls fn(linear_index, x[3]) for every grid point.
template <typename Fn>
inline void for_each_point(const TorusGrid& g, Fn&& fn) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const double h = g.h();
    std::int64_t idx = 0;
    if (g.dim == 2) {
        for (int i0 = 0; i0 < g.N; ++i0) {
            x[0] = i0 * h;
            for (int i1 = 0; i1 < g.N; ++i1, ++idx) {
                x[1] = i1 * h;
                fn(idx, x);
            }
        }
    } else {
        for (int i0 = 0; i0 < g.N; ++i0) {
            x[0] = i0 * h;
            for (int i1 = 0; i1 < g.N; ++i1) {
                x[1] = i1 * h;
                for (int i2 = 0; i2 < g.N; ++i2, ++idx) {
                    x[2] = i2 * h;
                    fn(idx, x);
                }
            }
        }
    }
}

}  // namespace supersde
