#pragma once

#include <optional>
#include <vector>

#include "supersde/antisym.hpp"
#include "supersde/field.hpp"

namespace supersde {

/// Primitive piece of a singular set: a closed spatial ball (radius may be
/// zero, giving a point) extended over the time window [t0, t1]. A
/// time-independent set uses an unbounded window.
struct SpaceTimeBall {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 0.0;
    double t0 = -kInf;
    double t1 = kInf;
};

/// Compact space-time set K as a union of primitives, with the Euclidean
/// space-time distance (1-Lipschitz in (t,x); spatial part wraps on the
/// torus).
class SingularSet {
  public:
    SingularSet() = default;  // empty set: distance +inf
    SingularSet(const TorusGrid& grid, std::vector<SpaceTimeBall> primitives);

    bool empty() const { return prims_.empty(); }
    const std::vector<SpaceTimeBall>& primitives() const { return prims_; }
    const TorusGrid& grid() const { return grid_; }

    double distance(double t, const double* x) const;
    /// True when every primitive covers [0, horizon] (g_eps is one field).
    bool static_on(double horizon) const;

  private:
    TorusGrid grid_{};
    std::vector<SpaceTimeBall> prims_;
};

/// Smooth cutoff g_eps with exact plateaus:
///   g_eps == 0 on B_{eps/4}(K),  g_eps == 1 outside B_{eps/2}(K).
class CutoffFamily {
  public:
    CutoffFamily(SingularSet K, double eps);

    double eps() const { return eps_; }
    double operator()(double t, const double* x) const;
    /// Grid field at fixed time t.
    ScalarField field_at(double t) const;
    const SingularSet& set() const { return K_; }

  private:
    SingularSet K_;
    double eps_;
};

/// Builds g_eps; requires eps > 4h so the transition band is resolvable.
CutoffFamily cutoff(const SingularSet& K, double eps);

/// A g_eps at a fixed time slice (pointwise product through the potential).
AntisymmetricField apply_cutoff(const AntisymmetricField& A, const CutoffFamily& g,
                                double t = 0.0);

enum class MeasureMode { Analytic, GridCount };

struct NeighborhoodMeasure {
    double spacetime = 0.0;   // Leb_{R^{d+1}} of B_eps(K) within [0,T]
    double max_slice = 0.0;   // sup_t Leb_{R^d}(B_eps(K)_t)
    std::vector<std::pair<double, double>> slices;  // (t, slice measure)
    bool unresolved = false;  // grid-count with eps < 2h
};

/// Measure of the open eps-neighborhood. Analytic mode sums closed-form
/// primitive volumes (exact for disjoint primitives); grid-count counts
/// cells meeting the neighborhood on time slices.
NeighborhoodMeasure neighborhood_measure(const SingularSet& K, double eps,
                                         MeasureMode mode, double horizon,
                                         int time_samples = 65);

struct MeasureExponent {
    std::vector<std::pair<double, double>> rows;  // (eps, space-time measure)
    double exponent = 0.0;                        // fitted log-log slope
    double max_slice_limit = 0.0;  // sup_t slice measure at the smallest eps
};

/// Fits the space-time measure exponent over an eps grid; the slice column
/// checks the vanishing-slice condition.
MeasureExponent measure_exponent_scan(const SingularSet& K,
                                      std::span<const double> eps_grid,
                                      MeasureMode mode, double horizon);

}  // namespace supersde
