#include "supersde/mollify.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "supersde/fft.hpp"
#include "supersde/multiplier.hpp"

namespace supersde {

namespace {

double bump(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

// 32-point Gauss-Legendre on [0,1] (Newton on the Legendre polynomial).
struct GaussRule {
    std::array<double, 32> x{}, w{};
    GaussRule() {
        const int n = 32;
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double p1 = 0.0, dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            x[i] = 0.5 * (t + 1.0);
            w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GaussRule& gauss32() {
    static const GaussRule r;
    return r;
}

template <typename F>
double integrate01(const F& f) {
    const auto& g = gauss32();
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) acc += g.w[i] * f(g.x[i]);
    return acc;
}

// Axis projection of the unit bump: P(x) = integral of rho over the
// orthogonal directions. By the central-slice theorem the radial Fourier
// profile of rho equals the 1D Fourier transform of P.
double projection(int dim, double x) {
    const double x2 = x * x;
    if (x2 >= 1.0) return 0.0;
    const double span = std::sqrt(1.0 - x2);
    if (dim == 2) {
        return 2.0 * span *
               integrate01([&](double t) { return bump(std::sqrt(x2 + span * span * t * t)); });
    }
    return 2.0 * M_PI * span * span *
           integrate01([&](double t) {
               return bump(std::sqrt(x2 + span * span * t * t)) * t;
           });
}

// Radial Fourier profile R(s) of the normalised bump, R(0) = 1, tabulated
// via one long padded FFT of the projection and interpolated with
// Catmull-Rom cubics. Spacing ~1.5e-3 in s keeps interpolation error below
// 1e-11; R is numerically zero beyond kSMax.
class RadialHatTable {
  public:
    static constexpr double kSMax = 640.0;

    explicit RadialHatTable(int dim) {
        const std::int64_t M = std::int64_t(1) << 21;
        const double domain = 4096.0;          // padded period
        const double h = domain / double(M);   // sample spacing, covers s <= pi/h
        std::vector<std::complex<double>> buf(M, {0.0, 0.0});
        buf[0] = projection(dim, 0.0);
        for (std::int64_t j = 1; j * h < 1.0; ++j) {
            const double v = projection(dim, j * h);
            buf[j] = v;
            buf[M - j] = v;  // even function
        }
        // 1D FFT, done directly (radix-2, M is a power of two)
        fft1d(buf);
        ds_ = 2.0 * M_PI / domain;
        const std::int64_t count = std::int64_t(kSMax / ds_) + 4;
        table_.resize(count);
        const double norm = buf[0].real();
        for (std::int64_t k = 0; k < count; ++k) table_[k] = buf[k].real() / norm;
    }

    double eval(double s) const {
        s = std::abs(s);
        if (s >= kSMax) return 0.0;
        const double t = s / ds_;
        const std::int64_t i = std::int64_t(t);
        const double f = t - double(i);
        const std::int64_t n = std::int64_t(table_.size());
        const double ym = table_[std::max<std::int64_t>(i - 1, 0)];
        const double y0 = table_[i];
        const double y1 = table_[std::min(i + 1, n - 1)];
        const double y2 = table_[std::min(i + 2, n - 1)];
        return y0 + 0.5 * f * (y1 - ym + f * (2 * ym - 5 * y0 + 4 * y1 - y2 +
                                              f * (3 * (y0 - y1) + y2 - ym)));
    }

  private:
    static void fft1d(std::vector<std::complex<double>>& a) {
        const std::int64_t n = std::int64_t(a.size());
        for (std::int64_t i = 1, j = 0; i < n; ++i) {
            std::int64_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::int64_t len = 2; len <= n; len <<= 1) {
            const double ang = -2.0 * M_PI / double(len);
            const std::complex<double> wl(std::cos(ang), std::sin(ang));
            for (std::int64_t i = 0; i < n; i += len) {
                std::complex<double> w(1.0, 0.0);
                for (std::int64_t k = 0; k < len / 2; ++k) {
                    const auto u = a[i + k];
                    const auto v = a[i + k + len / 2] * w;
                    a[i + k] = u + v;
                    a[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
    }

    double ds_ = 0.0;
    std::vector<double> table_;
};

const RadialHatTable& hat_table(int dim) {
    static std::mutex m;
    static std::unique_ptr<RadialHatTable> t2, t3;
    std::lock_guard<std::mutex> lock(m);
    auto& slot = dim == 2 ? t2 : t3;
    if (!slot) slot = std::make_unique<RadialHatTable>(dim);
    return *slot;
}

double bump_mass(int dim) {
    if (dim == 2)
        return 2.0 * M_PI * integrate01([](double r) { return bump(r) * r; });
    return 4.0 * M_PI * integrate01([](double r) { return bump(r) * r * r; });
}

}  // namespace

Mollifier::Mollifier(int dim, double level) : dim_(dim), level_(level) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("Mollifier: dim must be 2 or 3");
    if (!(level > 0.0))
        throw std::invalid_argument("Mollifier: level must be positive");
    hat_table(dim);  // build the table eagerly
}

double Mollifier::hat(double xi_norm) const {
    return hat_table(dim_).eval(xi_norm / level_);
}

double Mollifier::profile(double r) const { return bump(r) / bump_mass(dim_); }

ScalarField Mollifier::sample_on(const TorusGrid& g) const {
    if (g.dim != dim_)
        throw std::invalid_argument("Mollifier::sample_on: dimension mismatch");
    if (2.0 / level_ > g.L)
        throw std::invalid_argument(
            "Mollifier::sample_on: support diameter exceeds the torus");
    const double n = level_;
    const double scale = std::pow(n, dim_);
    std::vector<double> values(g.size());
    for_each_point(g, [&](std::int64_t idx, const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double d = g.wrap_diff(x[a], 0.0);
            r2 += d * d;
        }
        values[idx] = scale * profile(n * std::sqrt(r2));
    });
    return ScalarField(g, std::move(values));
}

ScalarField mollify(const ScalarField& u, const Mollifier& m) {
    if (u.grid().dim != m.dim())
        throw std::invalid_argument("mollify: dimension mismatch");
    FrequencySymbol sym{
        [&m](const std::array<double, 3>& xi) {
            const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            return std::complex<double>(m.hat(r));
        },
        "mollifier(n=" + std::to_string(m.level()) + ")"};
    return apply_multiplier(u, sym);
}

MollifyScan mollification_rate_scan(const ScalarField& b, const BesovIndex& idx,
                                    double alpha, std::span<const double> levels) {
    if (levels.size() < 3)
        throw std::invalid_argument(
            "mollification_rate_scan: need at least 3 levels");
    if (!(alpha > 0.0))
        throw std::invalid_argument("mollification_rate_scan: alpha must be > 0");
    MollifyScan out;
    out.error_index = BesovIndex(idx.s - alpha, idx.p, idx.q);
    out.base_norm = besov_norm(b, idx).value;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double n : levels) {
        Mollifier m(b.grid().dim, n);
        const double err = besov_norm(b - mollify(b, m), out.error_index).value;
        out.rows.push_back({n, err});
        const double lx = std::log(n), ly = std::log(std::max(err, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = double(levels.size());
    const double den = m * sxx - sx * sx;
    out.slope = (m * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / m;
    return out;
}

double delta_mollifier_besov_gauge(const TorusGrid& g, double level, double alpha) {
    DyadicPartition part;
    Mollifier m(g.dim, level);
    const int J = DyadicPartition::norm_jmax(g);
    double sup = 0.0;
    for (int j = -1; j <= J; ++j) {
        // kernel of (Id - rho^n *) Delta_j, via the symbol (1 - hat) phi_j
        std::vector<std::complex<double>> coeffs(g.size(), {0.0, 0.0});
        for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>&,
                             const std::array<double, 3>& xi) {
            const double r =
                std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            coeffs[idx] = part.phi(j, r) * (1.0 - m.hat(r));
        });
        const ScalarField kernel = ScalarField::from_coeffs(g, std::move(coeffs));
        sup = std::max(sup, std::pow(2.0, -alpha * j) * lp_norm(kernel, 1.0));
    }
    return sup;
}

}  // namespace supersde
