#include "supersde/sde.hpp"

#include <cmath>
#include <stdexcept>

#include "supersde/multiplier.hpp"

namespace supersde {

InitialSampler::InitialSampler(const TorusGrid& grid, const ScalarField* eta)
    : grid_(grid) {
    if (!eta) {
        uniform_ = true;
        sup_density_ = 1.0 / grid.volume();
        return;
    }
    if (eta->grid() != grid)
        throw std::invalid_argument("InitialSampler: eta grid mismatch");
    uniform_ = false;
    const auto vals = eta->values();
    double total = 0.0;
    for (double v : vals) {
        if (v < -1e-12)
            throw std::invalid_argument("InitialSampler: eta must be nonnegative");
        total += std::max(v, 0.0);
    }
    total *= grid.cell_volume();
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("InitialSampler: eta must integrate to 1 (got " +
                                    std::to_string(total) + ")");
    const int N = grid.N;
    density_.assign(vals.begin(), vals.end());
    for (auto& v : density_) v = std::max(v, 0.0) / total;
    for (double v : density_) sup_density_ = std::max(sup_density_, v);

    // axis-0 marginal
    cdf_axis0_.assign(N, 0.0);
    const std::int64_t stride0 = grid.size() / N;
    for (int i0 = 0; i0 < N; ++i0) {
        double s = 0.0;
        for (std::int64_t r = 0; r < stride0; ++r) s += density_[i0 * stride0 + r];
        cdf_axis0_[i0] = s + (i0 ? cdf_axis0_[i0 - 1] : 0.0);
    }
    // conditional over i1 given i0
    cdf_cond1_.assign(std::int64_t(N) * N, 0.0);
    const std::int64_t stride1 = grid.dim == 3 ? N : 1;
    for (int i0 = 0; i0 < N; ++i0) {
        double run = 0.0;
        for (int i1 = 0; i1 < N; ++i1) {
            double s = 0.0;
            for (std::int64_t r = 0; r < stride1; ++r)
                s += density_[(std::int64_t(i0) * N + i1) * stride1 + r];
            run += s;
            cdf_cond1_[std::int64_t(i0) * N + i1] = run;
        }
    }
    if (grid.dim == 3) {
        cdf_cond2_.assign(std::int64_t(N) * N * N, 0.0);
        for (std::int64_t row = 0; row < std::int64_t(N) * N; ++row) {
            double run = 0.0;
            for (int i2 = 0; i2 < N; ++i2) {
                run += density_[row * N + i2];
                cdf_cond2_[row * N + i2] = run;
            }
        }
    }
}

namespace {

int locate_cell(const double* cdf, int n, double target) {
    int lo = 0, hi = n - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf[mid] < target) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

}  // namespace

void InitialSampler::sample(std::uint64_t seed, std::int64_t path_id, double* x) const {
    const int d = grid_.dim;
    if (uniform_) {
        for (int a = 0; a < d; ++a)
            x[a] = grid_.L *
                   uniform_u01(seed, RngStream::InitialCondition, path_id, a);
        return;
    }
    const int N = grid_.N;
    const double h = grid_.h();
    double u[3], inc[3];
    for (int a = 0; a < d; ++a) {
        u[a] = uniform_u01(seed, RngStream::InitialCondition, path_id, a);
        inc[a] = uniform_u01(seed, RngStream::InitialCondition, path_id, 3 + a);
    }
    const double total0 = cdf_axis0_[N - 1];
    const int i0 = locate_cell(cdf_axis0_.data(), N, u[0] * total0);
    const double* row1 = &cdf_cond1_[std::int64_t(i0) * N];
    const int i1 = locate_cell(row1, N, u[1] * row1[N - 1]);
    x[0] = (i0 + inc[0]) * h;
    x[1] = (i1 + inc[1]) * h;
    if (d == 3) {
        const double* row2 = &cdf_cond2_[(std::int64_t(i0) * N + i1) * N];
        const int i2 = locate_cell(row2, N, u[2] * row2[N - 1]);
        x[2] = (i2 + inc[2]) * h;
    }
}

double InitialSampler::lq_norm(double q) const {
    if (uniform_) {
        const double c = 1.0 / grid_.volume();
        return std::isinf(q) ? c : c * std::pow(grid_.volume(), 1.0 / q);
    }
    if (std::isinf(q)) return sup_density_;
    double s = 0.0;
    for (double v : density_) s += std::pow(v, q);
    return std::pow(s * grid_.cell_volume(), 1.0 / q);
}

PathEnsemble::PathEnsemble(TorusGrid grid, double dt, std::int64_t steps,
                           std::int64_t paths, std::int64_t path_offset,
                           std::uint64_t seed)
    : grid_(grid), dt_(dt), steps_(steps), paths_(paths),
      path_offset_(path_offset), seed_(seed) {
    const std::int64_t doubles = paths * (steps + 1) * grid_.dim;
    if (doubles > (std::int64_t(1) << 28))
        throw std::invalid_argument(
            "PathEnsemble: trajectory storage over 2 GiB; simulate in path "
            "blocks instead");
    data_.assign(doubles, 0.0);
}

double lipschitz_estimate(const VectorField& b) {
    const TorusGrid& g = b.grid();
    std::vector<ScalarField> deriv;
    deriv.reserve(g.dim * g.dim);
    for (int i = 0; i < g.dim; ++i)
        for (int a = 0; a < g.dim; ++a) deriv.push_back(derivative(b.comp(i), a));
    double best = 0.0;
    for (std::int64_t n = 0; n < g.size(); ++n) {
        double s = 0.0;
        for (const auto& dfield : deriv) s += dfield.value(n) * dfield.value(n);
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

double brownian_increment(std::uint64_t seed, std::int64_t path, std::int64_t step,
                          int axis, double dt) {
    // axis pairs (0,1) and (2,3) share one Box-Muller draw
    const auto pair = gauss_pair(seed, RngStream::Brownian, std::uint64_t(path),
                                 (std::uint64_t(step) << 1) | std::uint64_t(axis >> 1));
    return std::sqrt(2.0 * dt) * pair[axis & 1];
}

PathEnsemble euler_maruyama(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0))
        throw std::invalid_argument("euler_maruyama: need positive T and dt");
    if (cfg.paths <= 0) throw std::invalid_argument("euler_maruyama: no paths");
    TorusGrid grid;
    if (cfg.drift) grid = cfg.drift->grid();
    else if (cfg.grid) grid = *cfg.grid;
    else
        throw std::invalid_argument("euler_maruyama: b = 0 runs need cfg.grid");
    if (cfg.eta && cfg.eta->grid() != grid)
        throw std::invalid_argument("euler_maruyama: eta grid mismatch");

    if (cfg.drift) {
        const double lip = lipschitz_estimate(*cfg.drift);
        if (lip > 0.0 && cfg.dt > 0.5 / lip)
            throw std::invalid_argument(
                "euler_maruyama: stability gate dt <= 0.5/Lip(b) violated; "
                "Lip estimate " + std::to_string(lip) + " requires dt <= " +
                std::to_string(0.5 / lip));
    }

    const std::int64_t steps = std::int64_t(std::llround(cfg.T / cfg.dt));
    if (steps <= 0) throw std::invalid_argument("euler_maruyama: T < dt");
    PathEnsemble ens(grid, cfg.dt, steps, cfg.paths, cfg.path_offset, cfg.seed);
    const InitialSampler init(grid, cfg.eta);

    const int d = grid.dim;
    const double sqrt2dt = std::sqrt(2.0 * cfg.dt);
    const double dt = cfg.dt;
    std::span<const double> bvals[3];
    if (cfg.drift)
        for (int a = 0; a < d; ++a) bvals[a] = cfg.drift->comp(a).values();

    const std::int64_t block = 256;
    const std::int64_t n_blocks = (cfg.paths + block - 1) / block;
    parallel_blocks(n_blocks, [&](std::int64_t bi) {
        const std::int64_t lo = bi * block;
        const std::int64_t hi = std::min(lo + block, cfg.paths);
        for (std::int64_t i = lo; i < hi; ++i) {
            const std::int64_t gid = cfg.path_offset + i;  // global path id
            double* traj = ens.mutable_path(i);
            init.sample(cfg.seed, gid, traj);
            double x[3] = {traj[0], traj[1], d == 3 ? traj[2] : 0.0};
            for (std::int64_t k = 0; k < steps; ++k) {
                double bx[3] = {0.0, 0.0, 0.0};
                if (cfg.drift) {
                    if (cfg.interp == EvalMode::Multilinear) {
                        for (int a = 0; a < d; ++a)
                            bx[a] = interpolate_multilinear(grid, bvals[a], x);
                    } else {
                        std::array<double, 3> xp{x[0], x[1], x[2]};
                        for (int a = 0; a < d; ++a)
                            bx[a] = evaluate(cfg.drift->comp(a), xp, EvalMode::Spectral);
                    }
                }
                // two axes per Box-Muller draw, fixed consumption schedule
                for (int a = 0; a < d; a += 2) {
                    const auto gp = gauss_pair(cfg.seed, RngStream::Brownian,
                                               std::uint64_t(gid),
                                               (std::uint64_t(k) << 1) |
                                                   std::uint64_t(a >> 1));
                    x[a] += bx[a] * dt + sqrt2dt * gp[0];
                    if (a + 1 < d) x[a + 1] += bx[a + 1] * dt + sqrt2dt * gp[1];
                }
                double* out = traj + (k + 1) * d;
                for (int a = 0; a < d; ++a) out[a] = x[a];
            }
        }
    });
    return ens;
}

}  // namespace supersde
