#include "supersde/paraproduct.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "supersde/multiplier.hpp"

namespace supersde {

namespace {

void check_grids(const ScalarField& a, const ScalarField& b, const char* who) {
    if (a.grid() != b.grid())
        throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

std::vector<ScalarField> all_blocks(const ScalarField& u, int J) {
    std::vector<ScalarField> blocks;
    blocks.reserve(J + 2);
    for (int j = -1; j <= J; ++j) blocks.push_back(lp_block(u, j));
    return blocks;
}

}  // namespace

ScalarField para_lt(const ScalarField& b, const ScalarField& v) {
    check_grids(b, v, "para_lt");
    const TorusGrid& g = b.grid();
    const int J = DyadicPartition::cover_jmax(g);
    std::vector<double> acc(g.size(), 0.0);
    for (int j = 1; j <= J; ++j) {
        // S_{j-1} b = sum_{i <= j-2} Delta_i b, applied as the exact low-pass
        const ScalarField low = lp_lowpass(b, j - 1);
        const ScalarField blk = lp_block(v, j);
        auto lv = low.values();
        auto bv = blk.values();
        for (std::int64_t i = 0; i < g.size(); ++i) acc[i] += lv[i] * bv[i];
    }
    return ScalarField(g, std::move(acc));
}

ScalarField para_gt(const ScalarField& b, const ScalarField& v) {
    return para_lt(v, b);
}

ScalarField resonant(const ScalarField& b, const ScalarField& v) {
    check_grids(b, v, "resonant");
    const TorusGrid& g = b.grid();
    const int J = DyadicPartition::cover_jmax(g);
    const auto blocks_b = all_blocks(b, J);
    const auto blocks_v = all_blocks(v, J);
    std::vector<double> acc(g.size(), 0.0);
    for (int i = -1; i <= J; ++i) {
        for (int j = std::max(-1, i - 1); j <= std::min(J, i + 1); ++j) {
            auto bi = blocks_b[i + 1].values();
            auto vj = blocks_v[j + 1].values();
            for (std::int64_t n = 0; n < g.size(); ++n) acc[n] += bi[n] * vj[n];
        }
    }
    return ScalarField(g, std::move(acc));
}

std::pair<double, double> drift_product_admissible_r(double gamma, double p) {
    return {2.0 * p / (p + 2.0), 2.0 * p / (p * gamma + 2.0)};
}

DriftProduct drift_product(const VectorField& b, const ScalarField& u,
                           double gamma, double p, double r) {
    if (b.grid() != u.grid())
        throw std::invalid_argument("drift_product: grid mismatch");
    const auto iv = drift_product_admissible_r(gamma, p);
    if (!(r > iv.first && r < iv.second)) {
        std::ostringstream os;
        os << "drift_product: r = " << r << " outside the admissible interval ("
           << iv.first << ", " << iv.second << ") for gamma = " << gamma
           << ", p = " << p;
        throw std::invalid_argument(os.str());
    }
    const double div_ratio =
        lp_norm(divergence(b), 2.0) / std::max(b.l2_norm(), 1e-300);
    if (div_ratio > 1e-8)
        throw std::invalid_argument(
            "drift_product: b is not divergence-free (rel. divergence " +
            std::to_string(div_ratio) + ")");

    const TorusGrid& g = u.grid();
    ScalarField total = ScalarField::zero(g);
    for (int a = 0; a < g.dim; ++a) {
        const ScalarField du = derivative(u, a);
        total = total + para_lt(b.comp(a), du);
        total = total + para_gt(b.comp(a), du);
        total = total + derivative(resonant(b.comp(a), u), a);
    }

    DriftProduct out{std::move(total), 0.0, 0.0, 0.0, 0.0, iv};
    out.numerator = besov_norm(out.value, BesovIndex(-1.0, r, 2.0)).value;
    out.b_norm = besov_norm(b, BesovIndex(-gamma, p, kInf)).value;
    out.u_norm = std::max(lp_norm(u, kInf), h1_norm(u));
    const double den = out.b_norm * out.u_norm;
    out.ratio = den > 0.0 ? out.numerator / den : 0.0;
    return out;
}

InterpolationCheck interpolation_bound_check(const ScalarField& u, double q) {
    if (!(q > 2.0) || std::isinf(q))
        throw std::invalid_argument("interpolation_bound_check: q must be in (2, inf)");
    InterpolationCheck out;
    out.besov = besov_norm(u, BesovIndex(2.0 / q, q, kInf)).value;
    out.bound = std::max(lp_norm(u, kInf), h1_norm(u));
    if (out.bound <= 0.0) {
        out.degenerate = true;  // 0/0, reported as degenerate rather than a number
        out.ratio = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.ratio = out.besov / out.bound;
    return out;
}

}  // namespace supersde
