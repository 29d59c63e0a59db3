#pragma once

#include <array>
#include <vector>

#include "supersde/besov.hpp"
#include "supersde/field.hpp"
#include "supersde/mollify.hpp"

namespace supersde {

/// Antisymmetric matrix potential, stored through its scalar/vector
/// potential so antisymmetry is structural:
///   d = 2:  A = a J, J the rotation generator; A_12 = a, A_21 = -a.
///   d = 3:  A_ij = eps_ijk w_k.
/// The induced drift b^i = sum_j d_j A_ij is then automatically
/// divergence-free: b = grad^perp a in d = 2 and b = curl w in d = 3.
class AntisymmetricField {
  public:
    static AntisymmetricField stream2d(ScalarField a);
    static AntisymmetricField potential3d(std::array<ScalarField, 3> w);

    int dim() const { return dim_; }
    const TorusGrid& grid() const { return pot_[0].grid(); }
    int components() const { return int(pot_.size()); }
    const ScalarField& potential(int i) const { return pot_.at(i); }

    /// Matrix entry A_ij as a field (for diagnostics; the solvers never
    /// materialise the matrix).
    ScalarField entry(int i, int j) const;

  private:
    AntisymmetricField(int dim, std::vector<ScalarField> pot)
        : dim_(dim), pot_(std::move(pot)) {}
    int dim_;
    std::vector<ScalarField> pot_;
};

/// b(A)^i = sum_j d_j A_ij, computed spectrally.
VectorField drift(const AntisymmetricField& A);

/// Componentwise mollification of the potential (equals mollifying A).
AntisymmetricField mollify(const AntisymmetricField& A, const Mollifier& m);

/// Pointwise product g . A through the potential.
AntisymmetricField scale_pointwise(const AntisymmetricField& A, const ScalarField& g);

/// max over potential components (equivalent norm).
BesovNorm besov_norm(const AntisymmetricField& A, const BesovIndex& idx);

/// A v, evaluated pointwise from the potential:
///   d = 2: (a v_2, -a v_1);  d = 3: cross(v, w).
VectorField apply_matrix(const AntisymmetricField& A, const VectorField& v);

}  // namespace supersde
