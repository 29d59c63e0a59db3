#pragma once

#include <cstdint>

#include "supersde/antisym.hpp"

namespace supersde {

struct RandomBesovResult {
    AntisymmetricField A;
    BesovNorm potential_norm;   // measured B^s_{p,inf} norm of the potential
    bool under_resolved = false;  // top-block share > 10%
};

/// Gaussian spectral synthesis of an antisymmetric potential in
/// B^s_{p,inf}: independent complex Gaussian coefficients with standard
/// deviation sigma_k = amplitude (1+|k|)^{-(s + d/2)}, conjugate
/// symmetrised, zero mode zero, Nyquist rows zeroed. Deterministic in the
/// seed (each coefficient is a pure function of (seed, mode index)).
///
/// The potential is synthesised one derivative smoother than the drift:
/// target s = -gamma + 1 gives drift regularity -gamma.
RandomBesovResult synth_random_besov(const TorusGrid& grid, const BesovIndex& target,
                                     std::uint64_t seed, double amplitude = 1.0);

/// Scalar variant for test fields of prescribed regularity.
ScalarField synth_random_scalar(const TorusGrid& grid, double s, std::uint64_t seed,
                                double amplitude = 1.0);

struct VortexResult {
    AntisymmetricField A;
    double lp_coarse = 0.0;  // ||a||_Lp on the grid
    double lp_fine = 0.0;    // ||a||_Lp on the 2N refinement (divergence probe)
    bool outside_lp = false; // lambda p >= d: A not in L^p, outside hypotheses
};

/// Radial vortex stream a(x) = psi(|x-c|/R) |x-c|^{-lambda} (d = 2), with a
/// smooth bump psi equal to 1 near 0 and 0 beyond 1. The singularity is
/// regularised at the half-cell scale; the Lp refinement pair exposes
/// divergence when lambda p >= d.
VortexResult synth_vortex(const TorusGrid& grid, double lambda,
                          const std::array<double, 2>& center, double cutoff_radius,
                          double lp_probe_p, double amplitude = 1.0);

}  // namespace supersde
