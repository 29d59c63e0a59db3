#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "supersde/field.hpp"
#include "supersde/parallel.hpp"
#include "supersde/rng.hpp"

namespace supersde {

/// Exact hierarchical inverse-CDF sampler for a grid density (marginal of
/// the first axis, then cell-conditionals), uniform placement inside the
/// chosen cell. Exact for uniform and product densities; also exact for any
/// piecewise-constant grid density.
class InitialSampler {
  public:
    /// eta = nullptr means the uniform density on the torus.
    InitialSampler(const TorusGrid& grid, const ScalarField* eta);

    void sample(std::uint64_t seed, std::int64_t path_id, double* x) const;
    double sup_density() const { return sup_density_; }
    double lq_norm(double q) const;  // ||eta||_{L^q} on the grid

  private:
    TorusGrid grid_;
    bool uniform_ = true;
    double sup_density_ = 0.0;
    std::vector<double> density_;        // normalised grid density
    std::vector<double> cdf_axis0_;      // marginal CDF over i0
    std::vector<double> cdf_cond1_;      // N x N conditional CDFs over i1 | i0
    std::vector<double> cdf_cond2_;      // N^2 x N conditionals over i2 | i0,i1 (d=3)
};

struct SimConfig {
    double T = 1.0;
    double dt = 1e-3;
    std::int64_t paths = 1000;
    std::uint64_t seed = 1;
    EvalMode interp = EvalMode::Multilinear;
    const VectorField* drift = nullptr;      // nullptr: b = 0
    const ScalarField* eta = nullptr;        // nullptr: uniform
    std::int64_t path_offset = 0;            // global id of the first path
    /// Grid is required when drift == nullptr (it fixes the torus).
    std::optional<TorusGrid> grid;
};

/// Discrete trajectories on a shared time grid. Unwrapped coordinates are
/// stored (winding preserved) so Hoelder quotients and variances are not
/// corrupted by the torus wrap; wrapped values are recovered on demand.
class PathEnsemble {
  public:
    PathEnsemble(TorusGrid grid, double dt, std::int64_t steps, std::int64_t paths,
                 std::int64_t path_offset, std::uint64_t seed);

    const TorusGrid& grid() const { return grid_; }
    double dt() const { return dt_; }
    std::int64_t steps() const { return steps_; }       // number of increments
    std::int64_t paths() const { return paths_; }
    double horizon() const { return dt_ * double(steps_); }
    double time_of(std::int64_t k) const { return dt_ * double(k); }
    std::uint64_t seed() const { return seed_; }
    std::int64_t path_offset() const { return path_offset_; }

    /// Unwrapped coordinate of path i at step k.
    double pos(std::int64_t i, std::int64_t k, int axis) const {
        return data_[(i * (steps_ + 1) + k) * grid_.dim + axis];
    }
    double* mutable_path(std::int64_t i) { return &data_[i * (steps_ + 1) * grid_.dim]; }
    const double* path(std::int64_t i) const {
        return &data_[i * (steps_ + 1) * grid_.dim];
    }
    void wrapped(std::int64_t i, std::int64_t k, double* x) const {
        for (int a = 0; a < grid_.dim; ++a) x[a] = grid_.wrap(pos(i, k, a));
    }

  private:
    TorusGrid grid_;
    double dt_;
    std::int64_t steps_, paths_, path_offset_;
    std::uint64_t seed_;
    std::vector<double> data_;
};

/// Max Frobenius norm of grad b over the grid (stability-gate estimate).
double lipschitz_estimate(const VectorField& b);

/// Explicit Euler-Maruyama X_{k+1} = X_k + b(X_k) dt + sqrt(2 dt) xi_k.
///
/// Deterministic in (seed, paths, dt) regardless of worker count; Brownian
/// increments are a pure function of (seed, path id, step), so runs with
/// different drifts but one seed are driven by identical noise (common
/// random numbers). Rejects dt > 0.5 / Lip(b).
PathEnsemble euler_maruyama(const SimConfig& cfg);

/// The Brownian increment consumed at (path, step, axis); exposed so tests
/// can pin the CRN contract.
double brownian_increment(std::uint64_t seed, std::int64_t path, std::int64_t step,
                          int axis, double dt);

}  // namespace supersde
