#pragma once

#include "pembed/augmented.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <functional>

namespace pembed {

// Safety bound on penalty steps; the extra dimension typically collapses
// after 4-5 of them.
inline constexpr int kMaxMuSteps = 50;

struct OptimConfig {
  int max_iter = 2000;
  double conv_tol = 1e-5;   // objective change per iteration
  double epsilon = 1e-10;   // Hessian shift, scaled by trace(4 L+)/N
  double ls_backtrack = 0.8;
  double ls_armijo = 1e-4;
  std::uint64_t seed = 0;
};

void validate(const OptimConfig& config);

// L+ = diag(d+) - W+; symmetric positive semidefinite.
Matrix graph_laplacian(const AffinityGraph& graph);

// Preconditioner (4 L+ + eps I), factored once per run. L+ is constant
// across iterations; only the mu-shifted pressured block changes, so its
// subfactorization is cached against (pressured_set, mu).
class SpectralDirectionSolver {
 public:
  SpectralDirectionSolver(const Matrix& l_plus, double eps);

  // True when the factorization failed and directions fall back to the
  // plain gradient.
  bool gradient_fallback() const { return fallback_; }
  double eps() const { return eps_; }
  const Matrix& system() const { return system_; }

  // Solves (4 L+ + eps I) dir = grad column-wise.
  Matrix solve_x(const Matrix& grad_x) const;

  // Solves the pressured subblock with 2 mu added to its diagonal;
  // coordinates outside the set come back exactly 0.
  Vector solve_z(const Vector& grad_z, double mu, const IndexSet& pressured_set) const;

 private:
  Matrix system_;
  double eps_ = 0.0;
  bool fallback_ = false;
  Eigen::LDLT<Matrix> factor_;
  // Cache for the pressured-block factorization.
  mutable IndexSet cached_set_;
  mutable double cached_mu_ = -1.0;
  mutable bool cache_valid_ = false;
  mutable bool cache_fallback_ = false;
  mutable Eigen::LDLT<Matrix> z_factor_;
};

// One-shot convenience wrapper over the solver.
std::pair<Matrix, Vector> spectral_direction(const Matrix& l_plus, double eps,
                                             const Matrix& grad_x, const Vector& grad_z,
                                             double mu, const IndexSet& pressured_set);

using IterCallback = std::function<void(const TraceRecord&)>;

// Spectral Direction descent with Armijo backtracking from step 1.
OptimRun minimize(const Method& method, const AffinityGraph& graph, const Embedding& x0,
                  const OptimConfig& config = {}, const IterCallback& callback = {});

// Pressured-point refinement: alternates spectral-direction steps on the
// augmented objective with pressured-set updates, sweeping mu through the
// schedule until the extra dimension collapses. EE and SNE only.
OptimRun pp_optimize(const Method& method, const AffinityGraph& graph, const Embedding& x0,
                     const MuSchedule& schedule, const OptimConfig& config = {},
                     const IterCallback& callback = {});

struct RestartPair {
  std::uint64_t seed = 0;
  OptimRun sd;
  OptimRun pp;
};

struct RestartSummary {
  double sd_mean = 0.0;
  double sd_std = 0.0;
  double pp_mean = 0.0;
  double pp_std = 0.0;
};

struct RestartBenchmark {
  std::vector<RestartPair> pairs;
  RestartSummary summary;
};

// Uniform random initialization in [-1, 1] scaled by kInitScale, one
// deterministic stream per seed index.
inline constexpr double kInitScale = 1e-2;

Embedding random_embedding(Index n, Index dim, std::uint64_t seed);

// For each restart r: X0 from seed cfg.seed + r, an SD run, then PP
// continued from the SD result. Seeds may run on parallel workers (see
// worker_count()); results merge deterministically by seed order.
RestartBenchmark restart_benchmark(const Method& method, const AffinityGraph& graph,
                                   int n_restarts, const OptimConfig& config,
                                   Index dim = 2,
                                   MuSchedule::Strategy strategy =
                                       MuSchedule::Strategy::MeanDegree);

}  // namespace pembed
