#include "supersde/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "supersde/dyadic.hpp"
#include "supersde/rng.hpp"

namespace supersde {

namespace {

// Gaussian coefficient field with sigma_k = amp (1+|k|)^{-decay}; hermitian
// pairing is resolved by drawing each pair once at its canonical member
// (the lexicographically larger of k and -k), so the result is independent
// of traversal order and bit-stable in the seed.
std::vector<std::complex<double>> gaussian_coeffs(const TorusGrid& g, double decay,
                                                  std::uint64_t seed, double amp,
                                                  std::uint64_t component_tag) {
    const int N = g.N;
    const double vol = g.volume();
    std::vector<std::complex<double>> coeffs(g.size(), {0.0, 0.0});
    for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k,
                         const std::array<double, 3>&) {
        // zero mode and Nyquist rows stay zero
        if (k[0] == 0 && k[1] == 0 && (g.dim == 2 || k[2] == 0)) return;
        for (int a = 0; a < g.dim; ++a)
            if (k[a] == -N / 2) return;

        // canonical member of the +-k pair: first nonzero entry positive
        bool canonical = false;
        for (int a = 0; a < g.dim; ++a) {
            if (k[a] != 0) {
                canonical = k[a] > 0;
                break;
            }
        }
        // linear index of the canonical partner for the RNG counter
        std::array<int, 3> kc = k;
        if (!canonical)
            for (int a = 0; a < g.dim; ++a) kc[a] = -k[a];
        std::array<int, 3> ic{};
        for (int a = 0; a < g.dim; ++a) ic[a] = kc[a] >= 0 ? kc[a] : kc[a] + N;
        const std::int64_t canon_idx = grid_index(g, ic[0], ic[1], ic[2]);

        double k2 = 0.0;
        for (int a = 0; a < g.dim; ++a) k2 += double(k[a]) * k[a];
        const double sigma = amp * std::pow(1.0 + std::sqrt(k2), -decay);

        const auto gpair = gauss_pair(seed, RngStream::Synthesis,
                                      (component_tag << 48) | std::uint64_t(canon_idx), 0);
        // variance split over re/im; the conjugate partner gets the mirror.
        // The vol factor matches the coefficient normalisation (coeff =
        // L^d x Fourier coefficient), so field values have O(sigma) size.
        std::complex<double> z(gpair[0] * M_SQRT1_2, gpair[1] * M_SQRT1_2);
        if (!canonical) z = std::conj(z);
        coeffs[idx] = vol * sigma * z;
    });
    return coeffs;
}

}  // namespace

ScalarField synth_random_scalar(const TorusGrid& g, double s, std::uint64_t seed,
                                double amplitude) {
    const double decay = s + 0.5 * g.dim;
    return ScalarField::from_coeffs(g, gaussian_coeffs(g, decay, seed, amplitude, 0));
}

RandomBesovResult synth_random_besov(const TorusGrid& g, const BesovIndex& target,
                                     std::uint64_t seed, double amplitude) {
    if (!std::isinf(target.q))
        throw std::invalid_argument("synth_random_besov: target must have q = inf");
    if (g.dim == 2) {
        ScalarField a = synth_random_scalar(g, target.s, seed, amplitude);
        RandomBesovResult out{AntisymmetricField::stream2d(std::move(a)), {}, false};
        out.potential_norm = besov_norm(out.A.potential(0), target);
        out.under_resolved = out.potential_norm.top_block_share > 0.10;
        return out;
    }
    const double decay = target.s + 0.5 * g.dim;
    std::array<ScalarField, 3> w{
        ScalarField::from_coeffs(g, gaussian_coeffs(g, decay, seed, amplitude, 1)),
        ScalarField::from_coeffs(g, gaussian_coeffs(g, decay, seed, amplitude, 2)),
        ScalarField::from_coeffs(g, gaussian_coeffs(g, decay, seed, amplitude, 3))};
    RandomBesovResult out{AntisymmetricField::potential3d(std::move(w)), {}, false};
    out.potential_norm = besov_norm(out.A, target);
    out.under_resolved = out.potential_norm.top_block_share > 0.10;
    return out;
}

namespace {

ScalarField vortex_stream(const TorusGrid& g, double lambda,
                          const std::array<double, 2>& center, double R,
                          double amplitude, double cap_radius) {
    return ScalarField::from_function(g, [&](const std::array<double, 3>& x) {
        const double d0 = g.wrap_diff(x[0], center[0]);
        const double d1 = g.wrap_diff(x[1], center[1]);
        const double rho = std::max(std::sqrt(d0 * d0 + d1 * d1), cap_radius);
        // psi == 1 on [0, 1/2], smooth to 0 at 1
        const double psi = smoothstep_down(2.0 * (rho / R - 0.5));
        return amplitude * psi * std::pow(rho, -lambda);
    });
}

}  // namespace

VortexResult synth_vortex(const TorusGrid& g, double lambda,
                          const std::array<double, 2>& center, double cutoff_radius,
                          double lp_probe_p, double amplitude) {
    if (g.dim != 2)
        throw std::invalid_argument("synth_vortex: only d = 2 is supported");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("synth_vortex: lambda must be >= 0");
    if (!(cutoff_radius > 0.0) || cutoff_radius > 0.5 * g.L)
        throw std::invalid_argument("synth_vortex: cutoff radius must be in (0, L/2]");
    const double cap = 0.5 * g.h();
    ScalarField a = vortex_stream(g, lambda, center, cutoff_radius, amplitude, cap);
    TorusGrid fine(g.dim, 2 * g.N, g.L);
    ScalarField a_fine =
        vortex_stream(fine, lambda, center, cutoff_radius, amplitude, 0.5 * fine.h());
    VortexResult out{AntisymmetricField::stream2d(std::move(a)),
                     0.0, 0.0, lambda * lp_probe_p >= g.dim};
    out.lp_coarse = lp_norm(out.A.potential(0), lp_probe_p);
    out.lp_fine = lp_norm(a_fine, lp_probe_p);
    return out;
}

}  // namespace supersde
