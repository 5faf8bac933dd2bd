#pragma once

// Birkhoff defect: diamond-norm distance from a dephasing channel to the
// convex set of random-unitary channels, estimated by multi-start local
// minimization over k-component mixtures. Every reported value is the
// diamond distance to an explicit witness, hence an upper bound.
//
// The default search runs over mixtures of diagonal unitaries. The target
// and such mixtures are Schur multipliers, so their difference has the cheap
// diamond norm of schur_diamond_norm. Each result also carries a dual lower
// bound valid against all RU channels, general unitaries included; a small
// gap between the two shows the restriction lost nothing.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "birkhoff/diamond.hpp"
#include "birkhoff/lindblad.hpp"
#include "birkhoff/phase_damping.hpp"
#include "birkhoff/timeseries.hpp"

namespace birkhoff {

enum class DefectMode {
  diagonal,  // mixtures of diagonal unitaries
  general,   // diagonal search, then refinement over the full unitary group
};

struct DefectConfig {
  int k = 8;                      // unitaries in the mixture
  int starts = 16;
  int max_iterations = 2000;      // diamond-stage iterations per start
  double tol = 1e-6;              // diamond-norm evaluation tolerance
  double improvement_tol = 1e-8;  // stop when the best value gains less ...
  int patience = 20;              // ... than this over this many iterations
  std::uint64_t seed = 1;
  DefectMode mode = DefectMode::diagonal;
};

struct DefectResult {
  double d_b = 0.0;
  RUChannel witness;
  int starts_used = 0;
  std::vector<double> per_start;
  bool converged = false;
  // max(0, dual bound) over all RU channels, computed from the best start's
  // maximizing input. The inner maximization is a local search, so this is
  // a diagnostic rather than a certificate.
  double lower_bound = 0.0;
};

class DefectError : public std::runtime_error {
 public:
  DefectError(const std::string& what, std::vector<std::string> diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Diamond distance between a channel and an RU mixture (general method).
double ru_distance(const PhaseDampingChannel& ch, const RUChannel& ru, const DiamondOptions& opt = {});

/// Runs `cfg.starts` independent local searches (seed cfg.seed + i for start
/// i) and keeps the best. `extra_starts` are additional initial mixtures
/// (warm starts, nesting checks); they replace the first random starts, are
/// truncated to their k heaviest components and are never made worse.
/// Diagonal mode requires diagonal unitaries in extra starts.
DefectResult nearest_ru(const PhaseDampingChannel& ch, const DefectConfig& cfg,
                        std::span<const RUChannel> extra_starts = {});

/// Dual lower bound on d_B from a Schur test pair (a, S), valid against
/// every RU channel.
double ru_lower_bound(const PhaseDampingChannel& ch, const Eigen::VectorXd& a, const ComplexMatrix& s);

struct DefectSeriesOptions {
  bool warm_start = true;
};

/// d_B on each grid point of the damped channel. Failed points keep an empty
/// defect field and a flag.
TimeSeries defect_series(const LindbladParams& p, std::span<const double> grid,
                         const DefectConfig& cfg, const DefectSeriesOptions& opt = {});

namespace reference {
/// Serial version of nearest_ru with the same seed schedule.
DefectResult nearest_ru(const PhaseDampingChannel& ch, const DefectConfig& cfg,
                        std::span<const RUChannel> extra_starts = {});
}  // namespace reference

}  // namespace birkhoff
