#include "supersde/antisym.hpp"

#include <stdexcept>

#include "supersde/multiplier.hpp"

namespace supersde {

AntisymmetricField AntisymmetricField::stream2d(ScalarField a) {
    if (a.grid().dim != 2)
        throw std::invalid_argument("AntisymmetricField::stream2d: grid must be 2d");
    std::vector<ScalarField> pot;
    pot.push_back(std::move(a));
    return AntisymmetricField(2, std::move(pot));
}

AntisymmetricField AntisymmetricField::potential3d(std::array<ScalarField, 3> w) {
    const TorusGrid& g = w[0].grid();
    if (g.dim != 3)
        throw std::invalid_argument("AntisymmetricField::potential3d: grid must be 3d");
    for (const auto& c : w)
        if (c.grid() != g)
            throw std::invalid_argument(
                "AntisymmetricField::potential3d: components on different grids");
    std::vector<ScalarField> pot{std::move(w[0]), std::move(w[1]), std::move(w[2])};
    return AntisymmetricField(3, std::move(pot));
}

ScalarField AntisymmetricField::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
        throw std::invalid_argument("AntisymmetricField::entry: index out of range");
    if (i == j) return ScalarField::zero(grid());
    if (dim_ == 2) {
        // A = a J with J = [[0, 1], [-1, 0]]
        return (i == 0 && j == 1) ? pot_[0] : pot_[0] * -1.0;
    }
    // A_ij = eps_ijk w_k
    const int k = 3 - i - j;
    const int sign = ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0))
                         ? 1 : -1;
    return pot_[k] * double(sign);
}

VectorField drift(const AntisymmetricField& A) {
    if (A.dim() == 2) {
        // b = grad^perp a = (d2 a, -d1 a)
        const ScalarField& a = A.potential(0);
        std::vector<ScalarField> comps;
        comps.push_back(derivative(a, 1));
        comps.push_back(derivative(a, 0) * -1.0);
        return VectorField(std::move(comps));
    }
    // b = curl w
    const ScalarField& w0 = A.potential(0);
    const ScalarField& w1 = A.potential(1);
    const ScalarField& w2 = A.potential(2);
    std::vector<ScalarField> comps;
    comps.push_back(derivative(w2, 1) - derivative(w1, 2));
    comps.push_back(derivative(w0, 2) - derivative(w2, 0));
    comps.push_back(derivative(w1, 0) - derivative(w0, 1));
    return VectorField(std::move(comps));
}

AntisymmetricField mollify(const AntisymmetricField& A, const Mollifier& m) {
    if (A.dim() == 2) return AntisymmetricField::stream2d(mollify(A.potential(0), m));
    return AntisymmetricField::potential3d({mollify(A.potential(0), m),
                                            mollify(A.potential(1), m),
                                            mollify(A.potential(2), m)});
}

AntisymmetricField scale_pointwise(const AntisymmetricField& A, const ScalarField& g) {
    if (A.dim() == 2)
        return AntisymmetricField::stream2d(A.potential(0).pointwise(g));
    return AntisymmetricField::potential3d({A.potential(0).pointwise(g),
                                            A.potential(1).pointwise(g),
                                            A.potential(2).pointwise(g)});
}

BesovNorm besov_norm(const AntisymmetricField& A, const BesovIndex& idx) {
    BesovNorm best;
    for (int i = 0; i < A.components(); ++i) {
        BesovNorm n = besov_norm(A.potential(i), idx);
        if (i == 0 || n.value > best.value) best = std::move(n);
    }
    return best;
}

VectorField apply_matrix(const AntisymmetricField& A, const VectorField& v) {
    if (A.grid() != v.grid())
        throw std::invalid_argument("apply_matrix: grid mismatch");
    if (A.dim() == 2) {
        const ScalarField& a = A.potential(0);
        std::vector<ScalarField> out;
        out.push_back(a.pointwise(v.comp(1)));
        out.push_back(a.pointwise(v.comp(0)) * -1.0);
        return VectorField(std::move(out));
    }
    // (A v)_i = eps_ijk v_j w_k = (v x w)_i
    const ScalarField& w0 = A.potential(0);
    const ScalarField& w1 = A.potential(1);
    const ScalarField& w2 = A.potential(2);
    std::vector<ScalarField> out;
    out.push_back(v.comp(1).pointwise(w2) - v.comp(2).pointwise(w1));
    out.push_back(v.comp(2).pointwise(w0) - v.comp(0).pointwise(w2));
    out.push_back(v.comp(0).pointwise(w1) - v.comp(1).pointwise(w0));
    return VectorField(std::move(out));
}

}  // namespace supersde
