#pragma once

#include <limits>
#include <string>
#include <vector>

#include "supersde/dyadic.hpp"
#include "supersde/field.hpp"

namespace supersde {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Besov space indices B^s_{p,q}. p = q = inf handled as sup/max.
struct BesovIndex {
    double s = 0.0;
    double p = 2.0;
    double q = kInf;

    BesovIndex() = default;
    BesovIndex(double s_, double p_, double q_);
    std::string str() const;
};

struct BesovNorm {
    double value = 0.0;
    int jmax = 0;                 // truncation block
    double top_block_share = 0.0; // contribution of block jmax to the sum/sup
    bool under_resolved = false;  // top block carries > 1% of the norm
    std::vector<double> block_norms;  // ||Delta_j u||_Lp for j = -1..jmax
};

/// Truncated Besov norm (sum_{j<=jmax} 2^{jsq} ||Delta_j u||_Lp^q)^{1/q}.
/// The top-block share makes under-resolution visible, since the true norm
/// is an infinite sum.
BesovNorm besov_norm(const ScalarField& u, const BesovIndex& idx);

/// max over components (equivalent norm for vector fields).
BesovNorm besov_norm(const VectorField& u, const BesovIndex& idx);

}  // namespace supersde
