#include "supersde/besov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace supersde {

BesovIndex::BesovIndex(double s_, double p_, double q_) : s(s_), p(p_), q(q_) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw std::invalid_argument("BesovIndex: p, q must lie in [1, inf]");
}

std::string BesovIndex::str() const {
    std::ostringstream os;
    os << "B^" << s << "_{" << p << "," << q << "}";
    return os.str();
}

BesovNorm besov_norm(const ScalarField& u, const BesovIndex& idx) {
    BesovNorm out;
    out.jmax = DyadicPartition::norm_jmax(u.grid());
    out.block_norms.reserve(out.jmax + 2);
    std::vector<double> terms;
    terms.reserve(out.jmax + 2);
    for (int j = -1; j <= out.jmax; ++j) {
        const double bn = lp_norm(lp_block(u, j), idx.p);
        out.block_norms.push_back(bn);
        terms.push_back(std::pow(2.0, j * idx.s) * bn);
    }
    if (std::isinf(idx.q)) {
        double best = 0.0;
        for (double t : terms) best = std::max(best, t);
        out.value = best;
        out.top_block_share = best > 0.0 ? terms.back() / best : 0.0;
        // for q = inf the top block "carries" the norm if it attains the sup
        out.under_resolved = best > 0.0 && terms.back() >= best * (1.0 - 1e-12);
    } else {
        double s = 0.0;
        for (double t : terms) s += std::pow(t, idx.q);
        out.value = std::pow(s, 1.0 / idx.q);
        out.top_block_share = s > 0.0 ? std::pow(terms.back(), idx.q) / s : 0.0;
        out.under_resolved = out.top_block_share > 0.01;
    }
    return out;
}

BesovNorm besov_norm(const VectorField& u, const BesovIndex& idx) {
    BesovNorm best;
    for (int a = 0; a < u.dim(); ++a) {
        BesovNorm n = besov_norm(u.comp(a), idx);
        if (a == 0 || n.value > best.value) {
            const bool ur = best.under_resolved || n.under_resolved;
            best = std::move(n);
            best.under_resolved = ur;
        }
    }
    return best;
}

}  // namespace supersde
