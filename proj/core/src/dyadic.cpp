#include "supersde/dyadic.hpp"

#include <cmath>
#include <stdexcept>

#include "supersde/multiplier.hpp"

namespace supersde {

double smoothstep_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - t));  // -> f(1-t)
    const double b = std::exp(-1.0 / t);          // -> f(t)
    return a / (a + b);
}

double DyadicPartition::chi(double r) const {
    // transition band |xi| in (1, 4/3)
    return smoothstep_down(3.0 * (r - 1.0));
}

double DyadicPartition::phi(int j, double r) const {
    if (j < -1) throw std::invalid_argument("DyadicPartition::phi: j < -1");
    if (j == -1) return chi(r);
    const double s = std::ldexp(1.0, -j);  // 2^-j
    return chi(r * 0.5 * s) - chi(r * s);
}

int DyadicPartition::norm_jmax(const TorusGrid& g) {
    return int(std::floor(std::log2(0.375 * g.nyquist())));
}

int DyadicPartition::cover_jmax(const TorusGrid& g) {
    const double R = g.max_lattice_xi();
    int J = -1;
    while (std::ldexp(1.0, J + 1) < R) ++J;
    return J;
}

ScalarField lp_block(const ScalarField& u, int j) {
    const int jcov = DyadicPartition::cover_jmax(u.grid());
    if (j < -1 || j > jcov)
        throw std::invalid_argument(
            "lp_block: block " + std::to_string(j) +
            " outside the resolvable range [-1, " + std::to_string(jcov) +
            "] on this grid");
    DyadicPartition part;
    FrequencySymbol sym{
        [part, j](const std::array<double, 3>& xi) {
            const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            return std::complex<double>(part.phi(j, r));
        },
        "phi_" + std::to_string(j)};
    return apply_multiplier(u, sym);
}

ScalarField lp_lowpass(const ScalarField& u, int j) {
    DyadicPartition part;
    FrequencySymbol sym{
        [part, j](const std::array<double, 3>& xi) {
            const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
            return std::complex<double>(part.chi(r * std::ldexp(1.0, -j)));
        },
        "S_" + std::to_string(j)};
    return apply_multiplier(u, sym);
}

double partition_residue(const TorusGrid& g) {
    DyadicPartition part;
    const int J = DyadicPartition::cover_jmax(g);
    const double nyq = g.nyquist();
    double worst = 0.0;
    for_each_mode(g, [&](std::int64_t, const std::array<int, 3>&,
                         const std::array<double, 3>& xi) {
        const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        if (r >= nyq) return;
        double s = 0.0;
        for (int j = -1; j <= J; ++j) s += part.phi(j, r);
        worst = std::max(worst, std::abs(s - 1.0));
    });
    return worst;
}

}  // namespace supersde
