#pragma once

// Diamond norm of Hermiticity-preserving maps given as a difference of two
// operator sums, Delta(X) = sum_i A_i X A_i^dag - sum_j B_j X B_j^dag.
//
// ||Delta||_<> = max over unit psi on system (x) ancilla (ancilla dim = d)
// of ||(Delta (x) id)(|psi><psi|)||_1. The maximization alternates between
// the two variables of
//
//   ||(Delta (x) id)(psi psi^dag)||_1 = max_S <psi| (Delta^dag (x) id)(S) |psi>
//
// where S ranges over Hermitian unitaries: for fixed psi the best S is the
// sign of the output, for fixed S the best psi is the top eigenvector.
// Each half-step is monotone, so every iterate is a valid lower bound.

#include <cstdint>
#include <vector>

#include "birkhoff/core.hpp"
#include "birkhoff/phase_damping.hpp"

namespace birkhoff {

class HermitianPreservingMap {
 public:
  HermitianPreservingMap(KrausChannel minuend, KrausChannel subtrahend);

  int dim() const { return minuend_.dim(); }
  const KrausChannel& minuend() const { return minuend_; }
  const KrausChannel& subtrahend() const { return subtrahend_; }
  const ComplexMatrix& choi() const { return choi_; }

  /// (Delta (x) id)(|psi><psi|) for psi in C^d (x) C^d, system index major.
  ComplexMatrix apply_extended(const ComplexVector& psi) const;
  /// (Delta^dag (x) id)(s).
  ComplexMatrix adjoint_extended(const ComplexMatrix& s) const;

 private:
  KrausChannel minuend_;
  KrausChannel subtrahend_;
  ComplexMatrix choi_;
};

struct DiamondOptions {
  double tol = 1e-6;
  int starts = 4;
  int max_iterations = 2000;
  std::uint64_t seed = 12345;
};

struct DiamondResult {
  double value = 0.0;       // best lower bound found
  bool converged = false;   // every start met the stopping rule
  ComplexVector state;      // maximizing input on system (x) ancilla
  ComplexMatrix sign;       // maximizing Hermitian unitary on the output
  int iterations = 0;
};

/// Runs the alternating ascent from `psi` until the gain per sweep drops
/// below `gain_tol` or `max_iterations` sweeps pass.
DiamondResult diamond_ascent(const HermitianPreservingMap& delta, ComplexVector psi,
                             double gain_tol, int max_iterations);

/// Multi-start evaluation: the maximally entangled state plus `starts - 1`
/// Haar-random inputs. Deterministic for a given seed.
DiamondResult diamond_norm(const HermitianPreservingMap& delta, const DiamondOptions& opt = {});

/// Trace norm of the extended output for one fixed input (lower bound).
double diamond_lower_bound(const HermitianPreservingMap& delta, const ComplexVector& psi);

ComplexVector maximally_entangled(int d);

// Schur multipliers. For X -> D o X with D Hermitian the maximizing input can
// be taken as psi = sum_j a_j |jj> with a >= 0, and
//
//   ||D o .||_<> = max over unit a >= 0 of || diag(a) D diag(a) ||_1.
//
// The ascent alternates S = sign(diag(a) D diag(a)) with a = top eigenvector
// of Re(D o S^T), as for the general map.
struct SchurDiamondResult {
  double value = 0.0;
  bool converged = false;
  Eigen::VectorXd weights;  // a
  ComplexMatrix sign;       // S
  int iterations = 0;
};

SchurDiamondResult schur_diamond_ascent(const ComplexMatrix& d, Eigen::VectorXd a, double gain_tol,
                                        int max_iterations);

/// Starts from the uniform vector plus `starts - 1` random ones.
SchurDiamondResult schur_diamond_norm(const ComplexMatrix& d, const DiamondOptions& opt = {});

}  // namespace birkhoff
