#include "birkhoff/defect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace birkhoff {

namespace {

// ---------------------------------------------------------------------------
// Diagonal search. A mixture of diagonal unitaries diag(u_i), u_i = e^{i theta_i},
// is the Schur multiplier with Gram matrix G_R = sum_i p_i u_i u_i^dag.

constexpr int kFitRounds = 100;         // Frank-Wolfe rounds of the smooth stage
constexpr int kPolishIterations = 200;  // Levenberg-Marquardt steps after them
constexpr int kWeightIterations = 300;  // FISTA steps per weight solve
constexpr int kPricingStarts = 6;
constexpr int kFinalStarts = 6;
constexpr double kInnerGain = 1e-12;
constexpr double kDropWeight = 1e-15;

struct Mixture {
  std::vector<Eigen::VectorXd> phases;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(phases.size()); }
};

ComplexVector phase_vector(const Eigen::VectorXd& theta) {
  ComplexVector u(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) u[j] = std::polar(1.0, theta[j]);
  return u;
}

ComplexMatrix mixture_gram(const Mixture& m, int d) {
  ComplexMatrix g = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < m.size(); ++i) {
    const ComplexVector u = phase_vector(m.phases[i]);
    g.noalias() += m.weights[i] * (u * u.adjoint());
  }
  return g;
}

RUChannel to_channel(const Mixture& m) {
  std::vector<RUComponent> comps;
  double total = 0.0;
  for (int i = 0; i < m.size(); ++i)
    if (m.weights[i] > 0.0) total += m.weights[i];
  for (int i = 0; i < m.size(); ++i)
    if (m.weights[i] > 0.0)
      comps.push_back({m.weights[i] / total, ComplexMatrix(phase_vector(m.phases[i]).asDiagonal())});
  return RUChannel(std::move(comps));
}

// Gradient of Re sum_i p_i u_i^dag K u_i.
struct Gradient {
  std::vector<Eigen::VectorXd> phases;
  Eigen::VectorXd weights;

  double norm() const {
    double s = weights.squaredNorm();
    for (const auto& g : phases) s += g.squaredNorm();
    return std::sqrt(s);
  }
};

Gradient linear_gradient(const Mixture& m, const ComplexMatrix& k) {
  Gradient g;
  g.phases.resize(m.phases.size());
  g.weights.resize(m.size());
  for (int i = 0; i < m.size(); ++i) {
    const ComplexVector u = phase_vector(m.phases[i]);
    const ComplexVector ku = k * u;
    g.weights[i] = u.dot(ku).real();
    g.phases[i].resize(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j)
      g.phases[i][j] = 2.0 * m.weights[i] * std::imag(std::conj(u[j]) * ku[j]);
  }
  return g;
}

// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.rbegin(), u.rend());
  double partial = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    partial += u[i];
    const double candidate = (partial - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) shift = candidate;
  }
  Eigen::VectorXd p = (v.array() - shift).cwiseMax(0.0);
  return p / p.sum();
}

// Coordinate ascent of c^dag K c over |c_j| = 1 (torus) or |c_j| <= 1
// (polydisk). Returns the best value and maximizer.
std::pair<double, ComplexVector> maximize_form(const ComplexMatrix& k, bool polydisk,
                                               std::mt19937_64& rng, int starts) {
  const auto d = k.rows();
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  double best = -std::numeric_limits<double>::infinity();
  ComplexVector best_c = ComplexVector::Ones(d);
  for (int s = 0; s < starts; ++s) {
    ComplexVector c(d);
    for (Eigen::Index j = 0; j < d; ++j) c[j] = s == 0 ? cplx(1.0) : std::polar(1.0, angle(rng));
    for (int sweep = 0; sweep < 1000; ++sweep) {
      double change = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        cplx b = 0.0;
        for (Eigen::Index l = 0; l < d; ++l)
          if (l != j) b += k(j, l) * c[l];
        const double mag = std::abs(b);
        const double kjj = k(j, j).real();
        double r = 1.0;
        if (polydisk && kjj < 0.0) r = std::min(1.0, mag / -kjj);
        const cplx next = mag > 0.0 ? r * b / mag : cplx(r);
        change = std::max(change, std::abs(next - c[j]));
        c[j] = next;
      }
      if (change < 1e-14) break;
    }
    const double value = c.dot(k * c).real();
    if (value > best) {
      best = value;
      best_c = c;
    }
  }
  return {best, best_c};
}

class DiagonalSearch {
 public:
  DiagonalSearch(const PhaseDampingChannel& ch, const DefectConfig& cfg)
      : cfg_(cfg), gram_(ch.gram()), d_(ch.dim()) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram_);
    root_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  // m atoms with phases of Gaussian vectors of covariance G.
  Mixture random_start(int atoms, std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mixture m;
    for (int i = 0; i < atoms; ++i) {
      ComplexVector z(d_);
      for (int j = 0; j < d_; ++j) z[j] = cplx(normal(rng), normal(rng));
      z = root_ * z;
      Eigen::VectorXd theta(d_);
      for (int j = 0; j < d_; ++j) theta[j] = std::arg(z[j]);
      m.phases.push_back(theta);
    }
    m.weights = Eigen::VectorXd::Constant(atoms, 1.0 / atoms);
    return m;
  }

  Mixture from_channel(const RUChannel& ru) const {
    std::vector<int> order(static_cast<std::size_t>(ru.size()));
    for (int i = 0; i < ru.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ru.components()[a].weight > ru.components()[b].weight;
    });
    if (static_cast<int>(order.size()) > cfg_.k) order.resize(cfg_.k);
    Mixture m;
    std::vector<double> w;
    for (int i : order) {
      const ComplexMatrix& u = ru.components()[i].unitary;
      if (u.rows() != d_) throw DimensionError("warm start: dimension mismatch");
      const ComplexMatrix off = u - ComplexMatrix(u.diagonal().asDiagonal());
      if (max_abs(off) > 1e-12) throw std::invalid_argument("warm start: unitary is not diagonal");
      Eigen::VectorXd theta(d_);
      for (int j = 0; j < d_; ++j) theta[j] = std::arg(u(j, j));
      m.phases.push_back(theta);
      w.push_back(ru.components()[i].weight);
    }
    m.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    m.weights /= m.weights.sum();
    return m;
  }

  // Smooth stage: ||G_R - G||_F^2 by fully corrective Frank-Wolfe (atoms from
  // a pricing step, exact weights, local phase moves), then a
  // Levenberg-Marquardt polish of all parameters together.
  void fit(Mixture& m, std::mt19937_64& rng) const {
    for (int round = 0; round < kFitRounds; ++round) {
      m.weights = fit_weights(m);
      prune(m);
      refine_phases(m, 30);
      if (m.size() < cfg_.k) {
        const ComplexMatrix r = gram_ - mixture_gram(m, d_);
        auto [gap, c] = maximize_form(r, false, rng, kPricingStarts);
        if (gap > 1e-15) {
          Eigen::VectorXd theta(d_);
          for (int j = 0; j < d_; ++j) theta[j] = std::arg(c[j]);
          m.phases.push_back(theta);
          m.weights.conservativeResize(m.size());
          m.weights[m.size() - 1] = 0.0;
        }
      }
    }
    m.weights = fit_weights(m);
    prune(m);
    polish(m);
    prune(m);
  }

  struct Outcome {
    Mixture mixture;
    SchurDiamondResult inner;
    bool converged = false;
  };

  // Nonsmooth stage: normalized subgradient steps on ||G - G_R||_<>, keeping
  // the maximizing Schur input between iterations.
  Outcome minimize(Mixture m) const {
    Outcome best{m, inner(m, uniform()), false};
    SchurDiamondResult cur = best.inner;
    double eta = 0.02;
    double reference = cur.value;
    int quiet = 0;
    for (int it = 0; it < cfg_.max_iterations; ++it) {
      const ComplexMatrix w = cur.weights.asDiagonal() * cur.sign * cur.weights.asDiagonal();
      const Gradient g = linear_gradient(m, w);
      const double gn = g.norm();
      if (gn < 1e-14 || cur.value < 1e-14) {
        best.converged = true;
        break;
      }
      Mixture trial = m;
      for (int i = 0; i < m.size(); ++i) trial.phases[i] += (eta / gn) * g.phases[i];
      trial.weights = project_simplex(m.weights + (eta / gn) * g.weights);
      SchurDiamondResult next = inner(trial, cur.weights);
      if (next.value < cur.value) {
        m = std::move(trial);
        cur = std::move(next);
        eta *= 1.2;
      } else {
        eta *= 0.5;
      }
      if (cur.value < best.inner.value) {
        best.mixture = m;
        best.inner = cur;
      }
      if (reference - best.inner.value > cfg_.improvement_tol) {
        reference = best.inner.value;
        quiet = 0;
      } else if (++quiet >= cfg_.patience || eta < 1e-10) {
        best.converged = true;
        break;
      }
    }
    return best;
  }

  // Multi-start evaluation of the final witness.
  SchurDiamondResult evaluate(const Mixture& m, std::uint64_t seed) const {
    const ComplexMatrix diff = gram_ - mixture_gram(m, d_);
    return schur_diamond_norm(diff, {kInnerGain, kFinalStarts, 5000, seed});
  }

  const ComplexMatrix& gram() const { return gram_; }

 private:
  Eigen::VectorXd uniform() const { return Eigen::VectorXd::Constant(d_, 1.0 / std::sqrt(d_)); }

  SchurDiamondResult inner(const Mixture& m, const Eigen::VectorXd& a) const {
    return schur_diamond_ascent(gram_ - mixture_gram(m, d_), a, kInnerGain, 200);
  }

  // min over the simplex of ||sum p_i u_i u_i^dag - G||_F^2, accelerated
  // projected gradient.
  Eigen::VectorXd fit_weights(const Mixture& m) const {
    const int k = m.size();
    std::vector<ComplexVector> us;
    for (const auto& t : m.phases) us.push_back(phase_vector(t));
    Eigen::MatrixXd q(k, k);
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
      b[i] = us[i].dot(gram_ * us[i]).real();
      for (int j = 0; j < k; ++j) q(i, j) = std::norm(us[i].dot(us[j]));
    }
    double lipschitz = q.operatorNorm();
    if (!(lipschitz > 0.0)) lipschitz = 1.0;
    Eigen::VectorXd y = m.weights;
    Eigen::VectorXd prev = m.weights;
    double tk = 1.0;
    for (int it = 0; it < kWeightIterations; ++it) {
      const Eigen::VectorXd x = project_simplex(y - (q * y - b) / lipschitz);
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      y = x + ((tk - 1.0) / tn) * (x - prev);
      prev = x;
      tk = tn;
    }
    return prev;
  }

  static void prune(Mixture& m) {
    Mixture out;
    std::vector<double> w;
    for (int i = 0; i < m.size(); ++i)
      if (m.weights[i] > kDropWeight) {
        out.phases.push_back(m.phases[i]);
        w.push_back(m.weights[i]);
      }
    out.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    out.weights /= out.weights.sum();
    m = std::move(out);
  }

  double residual(const Mixture& m) const { return (mixture_gram(m, d_) - gram_).squaredNorm(); }

  // Backtracking gradient descent on the phases, weights fixed.
  void refine_phases(Mixture& m, int iterations) const {
    double eta = 0.05;
    for (int it = 0; it < iterations; ++it) {
      const ComplexMatrix r = mixture_gram(m, d_) - gram_;
      const double f = r.squaredNorm();
      const Gradient g = linear_gradient(m, 2.0 * r);
      double gn2 = 0.0;
      for (const auto& x : g.phases) gn2 += x.squaredNorm();
      if (gn2 < 1e-30) return;
      for (;;) {
        Mixture trial = m;
        for (int i = 0; i < m.size(); ++i) trial.phases[i] -= eta * g.phases[i];
        if (residual(trial) <= f - 1e-4 * eta * gn2) {
          m = std::move(trial);
          eta *= 1.5;
          break;
        }
        eta *= 0.5;
        if (eta < 1e-14) return;
      }
    }
  }

  // Levenberg-Marquardt on the strictly upper Gram entries (the diagonal is
  // always 1), weights written as p_i = s_i^2 / |s|^2.
  void polish(Mixture& m) const {
    const int k = m.size();
    const int pairs = d_ * (d_ - 1) / 2;
    if (pairs == 0) return;
    auto build = [&](const Eigen::VectorXd& x) {
      Mixture t;
      for (int i = 0; i < k; ++i) t.phases.push_back(x.segment(i * d_, d_));
      const Eigen::VectorXd s = x.tail(k);
      t.weights = s.cwiseAbs2() / s.squaredNorm();
      return t;
    };
    auto residual_vector = [&](const Mixture& t) {
      const ComplexMatrix r = mixture_gram(t, d_) - gram_;
      Eigen::VectorXd v(2 * pairs);
      int c = 0;
      for (int a = 0; a < d_; ++a)
        for (int b = a + 1; b < d_; ++b) {
          v[c++] = r(a, b).real();
          v[c++] = r(a, b).imag();
        }
      return v;
    };
    Eigen::VectorXd x(k * d_ + k);
    for (int i = 0; i < k; ++i) x.segment(i * d_, d_) = m.phases[i];
    x.tail(k) = m.weights.cwiseSqrt();
    Mixture cur = build(x);
    Eigen::VectorXd r = residual_vector(cur);
    double f = r.squaredNorm();
    double lambda = 1e-3;
    for (int it = 0; it < kPolishIterations && f > 1e-30; ++it) {
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * pairs, k * d_ + k);
      const double s2 = x.tail(k).squaredNorm();
      for (int i = 0; i < k; ++i) {
        int c = 0;
        for (int a = 0; a < d_; ++a)
          for (int b = a + 1; b < d_; ++b, c += 2) {
            const cplx e = std::polar(1.0, cur.phases[i][a] - cur.phases[i][b]);
            const cplx de = kI * cur.weights[i] * e;
            jac(c, i * d_ + a) += de.real();
            jac(c + 1, i * d_ + a) += de.imag();
            jac(c, i * d_ + b) -= de.real();
            jac(c + 1, i * d_ + b) -= de.imag();
            for (int l = 0; l < k; ++l) {
              const double sl = x[k * d_ + l];
              const double dp = ((l == i ? 2.0 * sl : 0.0) - cur.weights[i] * 2.0 * sl) / s2;
              jac(c, k * d_ + l) += dp * e.real();
              jac(c + 1, k * d_ + l) += dp * e.imag();
            }
          }
      }
      const Eigen::MatrixXd a = jac.transpose() * jac;
      const Eigen::VectorXd g = jac.transpose() * r;
      bool accepted = false;
      for (int attempt = 0; attempt < 20; ++attempt) {
        Eigen::MatrixXd damped = a;
        damped.diagonal().array() += lambda * (1.0 + a.diagonal().array());
        const Eigen::VectorXd xn = x - damped.ldlt().solve(g);
        Mixture trial = build(xn);
        Eigen::VectorXd rn = residual_vector(trial);
        const double fn = rn.squaredNorm();
        if (fn < f) {
          x = xn;
          cur = std::move(trial);
          r = std::move(rn);
          f = fn;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!accepted) break;
    }
    m = std::move(cur);
  }

  DefectConfig cfg_;
  ComplexMatrix gram_;
  int d_;
  ComplexMatrix root_;
};

struct StartOutcome {
  bool ok = false;
  bool converged = false;
  double value = std::numeric_limits<double>::infinity();
  std::optional<Mixture> mixture;
  SchurDiamondResult inner;
  std::string error;
};

StartOutcome run_start(const DiagonalSearch& search, const DefectConfig& cfg, int index,
                       const std::optional<Mixture>& warm) {
  StartOutcome out;
  try {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(index));
    Mixture init;
    if (warm) {
      // Warm starts skip the smooth stage so they can only improve.
      init = *warm;
    } else {
      init = search.random_start(1 + index % cfg.k, rng);
      search.fit(init, rng);
    }
    DiagonalSearch::Outcome r = search.minimize(std::move(init));
    SchurDiamondResult final = search.evaluate(r.mixture, cfg.seed + static_cast<std::uint64_t>(index));
    // Both are lower bounds on the witness distance; keep the larger.
    if (r.inner.value > final.value) final = r.inner;
    out.value = final.value;
    out.inner = std::move(final);
    out.mixture = std::move(r.mixture);
    out.converged = r.converged;
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// General refinement over U(d) (DefectMode::general): Riemannian subgradient
// steps U <- exp(-i eta X) U with softmax weights, evaluated with the
// general diamond norm.

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct UnitaryMixture {
  std::vector<ComplexMatrix> unitaries;
  Eigen::VectorXd logits;

  Eigen::VectorXd weights() const {
    Eigen::VectorXd w = (logits.array() - logits.maxCoeff()).exp();
    return w / w.sum();
  }

  KrausChannel kraus() const {
    const Eigen::VectorXd p = weights();
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < unitaries.size(); ++i) ops.push_back(std::sqrt(p[i]) * unitaries[i]);
    return KrausChannel::unchecked(std::move(ops));
  }

  RUChannel channel() const {
    const Eigen::VectorXd p = weights();
    std::vector<RUComponent> comps;
    for (std::size_t i = 0; i < unitaries.size(); ++i)
      if (p[i] > 0.0) comps.push_back({p[i], unitaries[i]});
    double total = 0.0;
    for (const auto& c : comps) total += c.weight;
    for (auto& c : comps) c.weight /= total;
    return RUChannel(std::move(comps));
  }
};

ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Gradient of tr(K sum_i p_i (U_i (x) 1) psi psi^dag (U_i (x) 1)^dag): Hermitian
// generators for U <- exp(-iX) U and logit derivatives.
std::pair<std::vector<ComplexMatrix>, Eigen::VectorXd> unitary_gradient(const UnitaryMixture& mix,
                                                                        const ComplexVector& psi,
                                                                        const ComplexMatrix& k) {
  const int d = static_cast<int>(mix.unitaries.front().rows());
  const auto n = static_cast<Eigen::Index>(mix.unitaries.size());
  const Eigen::VectorXd p = mix.weights();
  Eigen::Map<const RowMajor> x(psi.data(), d, d);
  std::vector<ComplexMatrix> gu(mix.unitaries.size());
  Eigen::VectorXd dp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    RowMajor w = mix.unitaries[i] * x;
    Eigen::Map<const ComplexVector> wv(w.data(), d * d);
    ComplexVector kw = k * wv;
    Eigen::Map<const RowMajor> y(kw.data(), d, d);
    dp[i] = wv.dot(kw).real();
    ComplexMatrix gi = p[i] * (kI * (y * w.adjoint() - w * y.adjoint()));
    gu[i] = 0.5 * (gi + gi.adjoint());
  }
  Eigen::VectorXd gl = p.cwiseProduct(dp - Eigen::VectorXd::Constant(n, p.dot(dp)));
  return {gu, gl};
}

std::pair<UnitaryMixture, double> refine_general(const KrausChannel& target, const RUChannel& start,
                                                 const DefectConfig& cfg) {
  UnitaryMixture mix;
  mix.logits.resize(start.size());
  for (int i = 0; i < start.size(); ++i) {
    mix.unitaries.push_back(start.components()[i].unitary);
    mix.logits[i] = std::log(start.components()[i].weight);
  }
  auto distance = [&](const UnitaryMixture& m, const ComplexVector& psi) {
    return diamond_ascent(HermitianPreservingMap(target, m.kraus()), psi, cfg.tol * 1e-3, 200);
  };
  DiamondResult cur = diamond_norm(HermitianPreservingMap(target, mix.kraus()), {cfg.tol, 4, 2000, cfg.seed});
  UnitaryMixture best = mix;
  double best_value = cur.value;
  double reference = best_value;
  double eta = 0.02;
  int quiet = 0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    auto [gu, gl] = unitary_gradient(mix, cur.state, cur.sign);
    double gn = gl.squaredNorm();
    for (const auto& g : gu) gn += g.squaredNorm();
    gn = std::sqrt(gn);
    if (gn < 1e-14) break;
    UnitaryMixture trial = mix;
    for (std::size_t i = 0; i < mix.unitaries.size(); ++i)
      trial.unitaries[i] = nearest_unitary(expm_unitary(gu[i], -eta / gn) * mix.unitaries[i]);
    trial.logits = mix.logits + (eta / gn) * gl;
    DiamondResult next = distance(trial, cur.state);
    if (next.value < cur.value) {
      mix = std::move(trial);
      cur = std::move(next);
      eta *= 1.2;
    } else {
      eta *= 0.5;
    }
    if (cur.value < best_value) {
      best_value = cur.value;
      best = mix;
    }
    if (reference - best_value > cfg.improvement_tol) {
      reference = best_value;
      quiet = 0;
    } else if (++quiet >= cfg.patience || eta < 1e-10) {
      break;
    }
  }
  const double final = diamond_norm(HermitianPreservingMap(target, best.kraus()), {cfg.tol, 4, 2000, cfg.seed}).value;
  return {best, std::max(best_value, final)};
}

bool is_diagonal_channel(const RUChannel& ru) {
  for (const auto& c : ru.components())
    if (max_abs(ComplexMatrix(c.unitary - ComplexMatrix(c.unitary.diagonal().asDiagonal()))) > 1e-12)
      return false;
  return true;
}

template <bool Parallel>
DefectResult nearest_ru_impl(const PhaseDampingChannel& ch, const DefectConfig& cfg,
                             std::span<const RUChannel> extra_starts) {
  if (cfg.k < 1) throw std::invalid_argument("defect: k must be at least 1");
  if (cfg.starts < 1 && extra_starts.empty()) throw std::invalid_argument("defect: no starts");
  const DiagonalSearch search(ch, cfg);

  std::vector<std::optional<Mixture>> warm;
  std::vector<RUChannel> general_extras;
  for (const auto& ru : extra_starts) {
    if (is_diagonal_channel(ru)) {
      warm.push_back(search.from_channel(ru));
    } else if (cfg.mode == DefectMode::general) {
      general_extras.push_back(ru);
    } else {
      throw std::invalid_argument("defect: diagonal mode needs diagonal warm starts");
    }
  }
  const int total = std::max(cfg.starts, static_cast<int>(warm.size()));
  warm.resize(static_cast<std::size_t>(total));

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int i = 0; i < total; ++i) outcomes[i] = run_start(search, cfg, i, warm[i]);

  DefectResult res{0.0, RUChannel({{1.0, ComplexMatrix::Identity(ch.dim(), ch.dim())}}), total, {}, true};
  std::vector<std::string> diagnostics;
  int best = -1;
  for (int i = 0; i < total; ++i) {
    const auto& o = outcomes[i];
    if (!o.ok) {
      diagnostics.push_back("start " + std::to_string(i) + ": " + o.error);
      continue;
    }
    res.per_start.push_back(o.value);
    if (best < 0 || o.value < outcomes[best].value) best = i;
  }
  if (best < 0) throw DefectError("defect: every start failed", std::move(diagnostics));
  const StartOutcome& winner = outcomes[best];
  res.d_b = winner.value;
  res.witness = to_channel(*winner.mixture);
  res.converged = diagnostics.empty() && winner.converged;
  res.lower_bound = std::max(0.0, ru_lower_bound(ch, winner.inner.weights, winner.inner.sign));

  if (cfg.mode == DefectMode::general) {
    const KrausChannel target = kraus_from_gram(ch);
    general_extras.insert(general_extras.begin(), res.witness);
    for (const auto& start : general_extras) {
      auto [mix, value] = refine_general(target, start, cfg);
      res.per_start.push_back(value);
      if (value < res.d_b) {
        res.d_b = value;
        res.witness = mix.channel();
      }
    }
  }
  return res;
}

}  // namespace

double ru_distance(const PhaseDampingChannel& ch, const RUChannel& ru, const DiamondOptions& opt) {
  return diamond_norm(HermitianPreservingMap(kraus_from_gram(ch), ru.to_kraus()), opt).value;
}

// With psi = sum_j a_j |jj> and the test operator S on span{|jj>}, the
// pairing with (Phi - Psi) (x) id is tr(W G) - sum_i p_i c_i^dag W c_i,
// W = diag(a) S diag(a), c_i = diag(U_i) in the unit polydisk. Maximizing the
// subtracted form over the polydisk covers every RU channel.
double ru_lower_bound(const PhaseDampingChannel& ch, const Eigen::VectorXd& a, const ComplexMatrix& s) {
  const int d = ch.dim();
  if (a.size() != d || s.rows() != d || s.cols() != d)
    throw DimensionError("ru_lower_bound: dimension mismatch");
  const ComplexMatrix w = a.asDiagonal() * s * a.asDiagonal();
  const double paired = (w * ch.gram()).trace().real();
  std::mt19937_64 rng(0x5eedULL);
  return paired - maximize_form(w, true, rng, 16).first;
}

DefectResult nearest_ru(const PhaseDampingChannel& ch, const DefectConfig& cfg,
                        std::span<const RUChannel> extra_starts) {
  return nearest_ru_impl<true>(ch, cfg, extra_starts);
}

namespace reference {
DefectResult nearest_ru(const PhaseDampingChannel& ch, const DefectConfig& cfg,
                        std::span<const RUChannel> extra_starts) {
  return nearest_ru_impl<false>(ch, cfg, extra_starts);
}
}  // namespace reference

TimeSeries defect_series(const LindbladParams& p, std::span<const double> grid,
                         const DefectConfig& cfg, const DefectSeriesOptions& opt) {
  check_grid(grid);
  TimeSeries series = make_series(grid);
  const auto channels = damped_channel_series(p, grid);
  std::optional<RUChannel> previous;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      std::vector<RUChannel> extra;
      if (opt.warm_start && previous) extra.push_back(*previous);
      DefectResult r = nearest_ru(channels[i], cfg, extra);
      series.records[i].defect = r.d_b;
      if (!r.converged) series.records[i].add_flag("defect_partial");
      previous = std::move(r.witness);
    } catch (const std::exception&) {
      series.records[i].add_flag("defect_failed");
      previous.reset();
    }
  }
  return series;
}

}  // namespace birkhoff
