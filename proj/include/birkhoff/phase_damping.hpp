#pragma once

// Channel representations for dephasing maps and the structural tests that
// separate random-unitary dephasing from genuinely quantum dephasing.
//
// Gram convention: gram(m, n) = <a_n|a_m>, so that applying the channel is
// the entrywise product rho'(m, n) = gram(m, n) * rho(m, n). The transposed
// convention silently conjugates every coherence; keep it this way round.

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "birkhoff/core.hpp"

namespace birkhoff {

class PhaseDampingChannel {
 public:
  /// Validates Hermiticity, unit diagonal and positive semidefiniteness.
  explicit PhaseDampingChannel(ComplexMatrix gram);
  /// Same checks with caller-supplied thresholds (used for integrated
  /// coefficient matrices, which carry integration error).
  PhaseDampingChannel(ComplexMatrix gram, double diag_tol, double psd_tol);

  static PhaseDampingChannel identity(int d);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const ComplexMatrix& gram() const { return gram_; }

  /// Entrywise product with the Gram matrix; accepts any d x d operator.
  ComplexMatrix apply(const ComplexMatrix& x) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  ComplexMatrix gram_;
};

class KrausChannel {
 public:
  /// Throws ValidationError unless sum K^dag K = 1 within tolerance.
  explicit KrausChannel(std::vector<ComplexMatrix> kraus);
  /// No trace-preservation check; for intermediate or deliberately
  /// non-trace-preserving operator sums.
  static KrausChannel unchecked(std::vector<ComplexMatrix> kraus);

  int dim() const { return static_cast<int>(kraus_.front().rows()); }
  int rank() const { return static_cast<int>(kraus_.size()); }
  const std::vector<ComplexMatrix>& operators() const { return kraus_; }

  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// J = sum_ij E(|i><j|) (x) |i><j|.
  ComplexMatrix choi() const;

 private:
  KrausChannel() = default;
  std::vector<ComplexMatrix> kraus_;
};

struct RUComponent {
  double weight;
  ComplexMatrix unitary;
};

class RUChannel {
 public:
  /// Throws unless weights are positive and sum to one and every operator
  /// is unitary.
  explicit RUChannel(std::vector<RUComponent> components);

  int dim() const { return static_cast<int>(components_.front().unitary.rows()); }
  int size() const { return static_cast<int>(components_.size()); }
  const std::vector<RUComponent>& components() const { return components_; }

  ComplexMatrix apply(const ComplexMatrix& x) const;
  KrausChannel to_kraus() const;

 private:
  std::vector<RUComponent> components_;
};

PhaseDampingChannel from_relative_states(std::span<const PureState> states);

/// Diagonal Kraus operators from the eigendecomposition of the Gram matrix.
/// Eigenvalues at or below rank_cutoff * max eigenvalue are dropped.
KrausChannel kraus_from_gram(const PhaseDampingChannel& ch);

/// Inverse of kraus_from_gram for diagonal operators:
/// gram(m, n) = sum_i K_i(m, m) conj(K_i(n, n)).
ComplexMatrix gram_from_diagonal_kraus(const KrausChannel& ch);

bool is_doubly_stochastic(const KrausChannel& ch, double tol);

/// Signed volume det[(1, b_1) ... (1, b_4)] / 6 of the tetrahedron spanned by
/// four Bloch vectors. Zero iff the points are coplanar.
double fsov_volume(std::span<const BlochVector, 4> blochs);

/// rho -> U (p rho + (1 - p) sz rho sz) U^dag with U = exp(-i phi0 sz).
RUChannel single_qubit_ru(double phi0, double p);

class NotCoplanarError : public std::domain_error {
 public:
  explicit NotCoplanarError(double volume);
  double volume() const { return volume_; }

 private:
  double volume_;
};

/// Random-unitary decomposition of the dephasing channel generated by four
/// qubit relative states whose Bloch vectors are coplanar. Rotates the
/// common plane to be horizontal, then reads off two diagonal unitaries.
/// Throws NotCoplanarError if |V| exceeds `coplanar_tol`.
RUChannel coplanar_ru_decomposition(std::span<const PureState> states, double coplanar_tol);
RUChannel coplanar_ru_decomposition(std::span<const PureState> states);

/// Largest entrywise deviation between two linear maps over the d^2 matrix
/// units |i><j|.
template <typename MapA, typename MapB>
double max_deviation_on_units(int d, const MapA& a, const MapB& b) {
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const ComplexMatrix e = matrix_unit(d, i, j);
      worst = std::max(worst, max_abs(a(e) - b(e)));
    }
  return worst;
}

}  // namespace birkhoff
