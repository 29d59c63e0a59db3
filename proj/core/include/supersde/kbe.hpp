#pragma once

#include <optional>
#include <vector>

#include "supersde/antisym.hpp"
#include "supersde/field.hpp"

namespace supersde {

enum class KbeScheme { SemiImplicit, Strang };

struct KbeOptions {
    double T = 1.0;
    double dt = 1e-3;
    KbeScheme scheme = KbeScheme::SemiImplicit;
    std::vector<double> slice_times;  // snapped to the step grid
    bool check_cfl = true;
};

struct BudgetRow {
    double t = 0.0;
    double l2_sq = 0.0;     // ||v||_L2^2
    double grad_sq = 0.0;   // ||grad v||_L2^2
    double linf = 0.0;      // ||v||_inf
};

/// One solve of  d_t v = Lap v + div(A grad v),  v(0) = v0,  forward in
/// time with time-independent A. Diffusion is integrated exactly in Fourier
/// space; the transport term is advanced explicitly with a Heun substep
/// (skew operator, so energy is conserved to O(dt^3) per step). All
/// products use 2/3-rule dealiasing; the state lives in the dealiased band.
class KbeRun {
  public:
    TorusGrid grid;
    double dt = 0.0;
    KbeScheme scheme = KbeScheme::SemiImplicit;
    std::vector<std::pair<double, ScalarField>> slices;
    std::vector<BudgetRow> budget;          // per step
    double l2t_h1_sq = 0.0;                 // discrete int_0^T ||v||_H1^2 dt
    double dissipation_residual = 0.0;      // |E(T)-E(0)+2 int ||grad v||^2| / T
    double max_linf = 0.0;                  // sup_t ||v(t)||_inf
    double initial_linf = 0.0;
    double transport_skew_residual = 0.0;   // max_k |<Tv,v>| / (||Tv|| ||v||)

    const ScalarField& slice_at(double t) const;
    bool has_slice(double t) const;
};

/// A == nullptr runs the pure heat equation. The CFL gate rejects
/// dt > 0.25 h / max|b(A)|, reporting the admissible step.
KbeRun solve_kbe(const AntisymmetricField* A, const ScalarField& v0,
                 const KbeOptions& opts);

/// Pairwise relative L2 residuals between the three spectral routes of the
/// product identity  b(A).grad u = div(b(A) u) = div(A grad u), computed on
/// dealiased inputs and compared inside the alias-free band.
struct IdentityResiduals {
    double grad_vs_divbu = 0.0;
    double grad_vs_divAgrad = 0.0;
    double divbu_vs_divAgrad = 0.0;
    double max_rel = 0.0;
};

IdentityResiduals identity_check(const AntisymmetricField& A, const ScalarField& u);

/// <eta, v(t)> by grid quadrature; t must be a stored slice.
double expectation_oracle(const KbeRun& run, const ScalarField& eta, double t);
/// Uniform-eta convenience: mean of v(t).
double expectation_oracle_uniform(const KbeRun& run, double t);

/// Relative mismatch between P_t^m f - P_t^n f and the interpolation-form
/// integral int_0^t P^n_{t-s} (b^m - b^n) . grad P^m_s f ds (trapezoid over
/// quadrature_nodes panels).
double duhamel_defect(const AntisymmetricField& A_m, const AntisymmetricField& A_n,
                      const ScalarField& f, double t, int quadrature_nodes,
                      double dt, KbeScheme scheme = KbeScheme::Strang);

}  // namespace supersde
