#include "supersde/singular.hpp"

#include <cmath>
#include <stdexcept>

#include "supersde/dyadic.hpp"

namespace supersde {

SingularSet::SingularSet(const TorusGrid& grid, std::vector<SpaceTimeBall> primitives)
    : grid_(grid), prims_(std::move(primitives)) {}

double SingularSet::distance(double t, const double* x) const {
    if (prims_.empty()) return kInf;
    double best = kInf;
    for (const auto& p : prims_) {
        double dt = 0.0;
        if (t < p.t0) dt = p.t0 - t;
        else if (t > p.t1) dt = t - p.t1;
        double r2 = 0.0;
        for (int a = 0; a < grid_.dim; ++a) {
            const double d = grid_.wrap_diff(x[a], p.center[a]);
            r2 += d * d;
        }
        const double ds = std::max(0.0, std::sqrt(r2) - p.radius);
        best = std::min(best, std::sqrt(dt * dt + ds * ds));
    }
    return best;
}

bool SingularSet::static_on(double horizon) const {
    for (const auto& p : prims_)
        if (p.t0 > 0.0 || p.t1 < horizon) return false;
    return true;
}

CutoffFamily::CutoffFamily(SingularSet K, double eps) : K_(std::move(K)), eps_(eps) {}

double CutoffFamily::operator()(double t, const double* x) const {
    if (K_.empty()) return 1.0;
    const double d = K_.distance(t, x);
    // 0 on d <= eps/4, 1 on d >= eps/2; smoothstep_down runs 1 -> 0
    return 1.0 - smoothstep_down((d - 0.25 * eps_) / (0.25 * eps_));
}

ScalarField CutoffFamily::field_at(double t) const {
    const TorusGrid& g = K_.grid();
    return ScalarField::from_function(g, [&](const std::array<double, 3>& x) {
        return (*this)(t, x.data());
    });
}

CutoffFamily cutoff(const SingularSet& K, double eps) {
    if (!K.empty() && eps <= 4.0 * K.grid().h())
        throw std::invalid_argument(
            "cutoff: eps = " + std::to_string(eps) +
            " <= 4h; the transition band is not resolvable on this grid");
    return CutoffFamily(K, eps);
}

AntisymmetricField apply_cutoff(const AntisymmetricField& A, const CutoffFamily& g,
                                double t) {
    return scale_pointwise(A, g.field_at(t));
}

namespace {

double ball_volume(int d, double r) {
    if (r <= 0.0) return 0.0;
    return d == 2 ? M_PI * r * r : 4.0 / 3.0 * M_PI * r * r * r;
}

// Slice measure of one primitive's eps-neighborhood at time t (closed-form
// radius, exact for a single ball).
double primitive_slice(const SpaceTimeBall& p, int dim, double eps, double t) {
    double dt = 0.0;
    if (t < p.t0) dt = p.t0 - t;
    else if (t > p.t1) dt = t - p.t1;
    if (dt >= eps) return 0.0;
    const double reach = std::sqrt(eps * eps - dt * dt);
    return ball_volume(dim, p.radius + reach);
}

// Space-time measure of one primitive's neighborhood intersected with
// [0, horizon]: the time profile of the slice is smooth, integrated with a
// fine Simpson rule (closed form for radius 0 is used as a cross-check in
// the tests).
double primitive_spacetime(const SpaceTimeBall& p, int dim, double eps,
                           double horizon) {
    const double lo = std::max(0.0, (std::isinf(p.t0) ? 0.0 : p.t0) - eps);
    const double hi = std::min(horizon, (std::isinf(p.t1) ? horizon : p.t1) + eps);
    if (hi <= lo) return 0.0;
    const int n = 2048;
    const double h = (hi - lo) / n;
    double acc = primitive_slice(p, dim, eps, lo) + primitive_slice(p, dim, eps, hi);
    for (int i = 1; i < n; ++i)
        acc += primitive_slice(p, dim, eps, lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

NeighborhoodMeasure neighborhood_measure(const SingularSet& K, double eps,
                                         MeasureMode mode, double horizon,
                                         int time_samples) {
    NeighborhoodMeasure out;
    if (K.empty()) return out;
    const TorusGrid& g = K.grid();
    if (mode == MeasureMode::Analytic) {
        for (int i = 0; i < time_samples; ++i) {
            const double t = horizon * i / (time_samples - 1);
            double slice = 0.0;
            for (const auto& p : K.primitives())
                slice += primitive_slice(p, g.dim, eps, t);
            out.slices.emplace_back(t, slice);
            out.max_slice = std::max(out.max_slice, slice);
        }
        for (const auto& p : K.primitives())
            out.spacetime += primitive_spacetime(p, g.dim, eps, horizon);
        return out;
    }
    out.unresolved = eps < 2.0 * g.h();
    const double cell = g.cell_volume();
    double integral = 0.0;
    for (int i = 0; i < time_samples; ++i) {
        const double t = horizon * i / (time_samples - 1);
        std::int64_t count = 0;
        for_each_point(g, [&](std::int64_t, const std::array<double, 3>& x) {
            if (K.distance(t, x.data()) < eps) ++count;
        });
        const double slice = double(count) * cell;
        out.slices.emplace_back(t, slice);
        out.max_slice = std::max(out.max_slice, slice);
        const bool edge = (i == 0 || i == time_samples - 1);
        integral += slice * (edge ? 0.5 : 1.0);
    }
    out.spacetime = integral * horizon / (time_samples - 1);
    return out;
}

MeasureExponent measure_exponent_scan(const SingularSet& K,
                                      std::span<const double> eps_grid,
                                      MeasureMode mode, double horizon) {
    if (eps_grid.size() < 2)
        throw std::invalid_argument("measure_exponent_scan: need >= 2 eps values");
    MeasureExponent out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double smallest = kInf;
    for (double eps : eps_grid) {
        const auto m = neighborhood_measure(K, eps, mode, horizon);
        out.rows.emplace_back(eps, m.spacetime);
        if (eps < smallest) {
            smallest = eps;
            out.max_slice_limit = m.max_slice;
        }
        const double lx = std::log(eps), ly = std::log(std::max(m.spacetime, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = double(eps_grid.size());
    out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

}  // namespace supersde
