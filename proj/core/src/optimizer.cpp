#include "pembed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <utility>

namespace pembed {
namespace {

constexpr double kMinStep = 1e-12;  // line search gives up below this step

double fraction_from_flags(const std::vector<bool>& flags) {
  Index count = 0;
  for (bool f : flags) count += f ? 1 : 0;
  return flags.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(flags.size());
}

// Trace fraction for plain minimization, reusing the degree statistics the
// evaluation already produced (UMAP has none and pays for a slice pass).
double trace_fraction(const Method& m, const AffinityGraph& g, const Embedding& x,
                      const Evaluation& ev) {
  if (m.tag == MethodTag::UMAP) return pressured_fraction(m, g, x);
  return fraction_from_flags(
      classify_pressured(m.tag, ev.attract_stat, ev.repulse_stat, ev.kernel_sum));
}

double hessian_shift(const Matrix& l_plus, double epsilon) {
  const Index n = l_plus.rows();
  return n == 0 ? 0.0 : epsilon * 4.0 * l_plus.trace() / static_cast<double>(n);
}

double set_fraction(const AugmentedState& s) {
  return s.n() == 0 ? 0.0
                    : static_cast<double>(s.pressured_set.size()) / static_cast<double>(s.n());
}

}  // namespace

void validate(const OptimConfig& config) {
  if (config.max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(config.conv_tol > 0.0)) throw ValidationError("conv_tol must be positive");
  if (!(config.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(config.ls_backtrack > 0.0) || !(config.ls_backtrack < 1.0))
    throw ValidationError("ls_backtrack must lie in (0, 1)");
  if (!(config.ls_armijo > 0.0) || !(config.ls_armijo < 1.0))
    throw ValidationError("ls_armijo must lie in (0, 1)");
}

Matrix graph_laplacian(const AffinityGraph& graph) {
  validate(graph);
  Matrix l = -graph.w_plus;
  l.diagonal() = graph.degrees_plus;
  return l;
}

SpectralDirectionSolver::SpectralDirectionSolver(const Matrix& l_plus, double eps)
    : eps_(eps) {
  const Index n = l_plus.rows();
  if (l_plus.cols() != n || n == 0)
    throw ValidationError("spectral direction needs a square Laplacian");
  system_ = 4.0 * l_plus;
  system_.diagonal().array() += eps;
  if (!(eps > 0.0) || !system_.allFinite()) {
    fallback_ = true;
    return;
  }
  factor_.compute(system_);
  fallback_ = (factor_.info() != Eigen::Success);
}

Matrix SpectralDirectionSolver::solve_x(const Matrix& grad_x) const {
  if (grad_x.rows() != system_.rows())
    throw ValidationError("gradient row count does not match the system");
  if (fallback_) return grad_x;
  return factor_.solve(grad_x);
}

Vector SpectralDirectionSolver::solve_z(const Vector& grad_z, double mu,
                                        const IndexSet& pressured_set) const {
  const Index n = system_.rows();
  if (grad_z.size() != n)
    throw ValidationError("gradient length does not match the system");
  if (mu < 0.0) throw ValidationError("mu must be nonnegative");
  Vector out = Vector::Zero(n);
  if (pressured_set.empty()) return out;

  const Index m = static_cast<Index>(pressured_set.size());
  Vector sub_grad(m);
  for (Index a = 0; a < m; ++a) sub_grad[a] = grad_z[pressured_set[a]];

  if (fallback_) {
    for (Index a = 0; a < m; ++a) out[pressured_set[a]] = sub_grad[a];
    return out;
  }

  if (!cache_valid_ || cached_mu_ != mu || cached_set_ != pressured_set) {
    Matrix sub(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) sub(a, b) = system_(pressured_set[a], pressured_set[b]);
    sub.diagonal().array() += 2.0 * mu;
    z_factor_.compute(sub);
    cache_fallback_ = (z_factor_.info() != Eigen::Success);
    cached_set_ = pressured_set;
    cached_mu_ = mu;
    cache_valid_ = true;
  }

  const Vector sub_dir = cache_fallback_ ? sub_grad : Vector(z_factor_.solve(sub_grad));
  for (Index a = 0; a < m; ++a) out[pressured_set[a]] = sub_dir[a];
  return out;
}

std::pair<Matrix, Vector> spectral_direction(const Matrix& l_plus, double eps,
                                             const Matrix& grad_x, const Vector& grad_z,
                                             double mu, const IndexSet& pressured_set) {
  SpectralDirectionSolver solver(l_plus, eps);
  return {solver.solve_x(grad_x), solver.solve_z(grad_z, mu, pressured_set)};
}

OptimRun minimize(const Method& method, const AffinityGraph& graph, const Embedding& x0,
                  const OptimConfig& config, const IterCallback& callback) {
  validate(config);
  validate(x0);
  if (x0.n() != graph.n())
    throw ValidationError("initial embedding and affinity graph disagree on point count");

  const Matrix l_plus = graph_laplacian(graph);
  const SpectralDirectionSolver solver(l_plus, hessian_shift(l_plus, config.epsilon));

  OptimRun run;
  if (solver.gradient_fallback())
    run.warnings.push_back("Hessian factorization unavailable; using gradient directions");

  EvalOptions full;
  full.gradient = true;
  full.stats = true;

  Embedding x = x0;
  Evaluation cur = evaluate(method, graph, x, full);
  bool warned_direction = false;

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    Matrix dir = solver.solve_x(cur.gradient);
    double gdotp = (cur.gradient.array() * dir.array()).sum();
    const double gnorm2 = cur.gradient.squaredNorm();
    if (gnorm2 == 0.0) {
      run.converged = true;  // exactly stationary
      break;
    }
    if (!(gdotp > 0.0)) {
      if (!warned_direction) {
        run.warnings.push_back("non-descent direction; fell back to the gradient");
        warned_direction = true;
      }
      dir = cur.gradient;
      gdotp = gnorm2;
    }

    double alpha = 1.0;
    bool accepted = false;
    double best_candidate = cur.value.total;
    Embedding cand_x;
    Evaluation cand;
    while (alpha >= kMinStep) {
      cand_x.coords = x.coords - alpha * dir;
      bool usable = true;
      try {
        cand = evaluate(method, graph, cand_x, full);
      } catch (const EvaluationError&) {
        usable = false;  // overflow at this step length; shrink and retry
      }
      if (usable) best_candidate = std::min(best_candidate, cand.value.total);
      if (usable && cand.value.total <= cur.value.total - config.ls_armijo * alpha * gdotp) {
        accepted = true;
        break;
      }
      alpha *= config.ls_backtrack;
    }
    if (!accepted) {
      // If no step could decrease the objective by conv_tol, the stopping
      // rule is met (e.g. an exact collapse onto the objective's floor). A
      // stall that leaves conv_tol-sized progress on the table is a failure.
      if (cur.value.total - best_candidate < config.conv_tol) {
        run.converged = true;
      } else {
        run.warnings.push_back("line search stalled; no acceptable step above " +
                               format_double(kMinStep));
      }
      break;
    }

    const double prev_total = cur.value.total;
    x = std::move(cand_x);
    cur = std::move(cand);

    TraceRecord rec;
    rec.iter = iter;
    rec.objective = cur.value.total;
    rec.step = alpha;
    rec.pressured_fraction = trace_fraction(method, graph, x, cur);
    rec.mu = 0.0;
    run.trace.push_back(rec);
    if (callback) callback(rec);

    if (prev_total - cur.value.total < config.conv_tol) {
      run.converged = true;
      break;
    }
  }

  run.final_embedding = x;
  run.final_objective = run.trace.empty() ? cur.value.total : run.trace.back().objective;
  return run;
}

OptimRun pp_optimize(const Method& method, const AffinityGraph& graph, const Embedding& x0,
                     const MuSchedule& schedule, const OptimConfig& config,
                     const IterCallback& callback) {
  if (method.tag != MethodTag::EE && method.tag != MethodTag::SNE)
    throw ValidationError("pressured-point optimization supports ee and sne only");
  validate(config);
  validate(x0);
  if (x0.n() != graph.n())
    throw ValidationError("initial embedding and affinity graph disagree on point count");
  if (!(schedule.step > 0.0))
    throw ValidationError("mu schedule step must be positive");

  const Matrix l_plus = graph_laplacian(graph);
  const SpectralDirectionSolver solver(l_plus, hessian_shift(l_plus, config.epsilon));

  OptimRun run;
  bool warned_direction = solver.gradient_fallback();
  if (solver.gradient_fallback())
    run.warnings.push_back("Hessian factorization unavailable; using gradient directions");

  const PressureReport initial = compute_pressure(method, graph, x0);
  AugmentedState s;
  s.embedding = x0;
  s.z = initial.pressure;
  s.pressured_set = initial.pressured_set;
  s.mu = 0.0;

  double best_objective = objective(method, graph, x0).total;
  Matrix best_coords = x0.coords;

  int total_iter = 0;
  bool collapsed = false;
  double last_mu = 0.0;

  for (int step_index = 0; step_index < kMaxMuSteps && !collapsed; ++step_index) {
    s.mu = schedule.value_at(step_index);
    last_mu = s.mu;
    AugmentedEval cur = augmented_evaluate(method, graph, s, true);
    bool stage_converged = false;

    for (int inner = 0; inner < config.max_iter && !stage_converged; ++inner) {
      Matrix dir_x = solver.solve_x(cur.grad_x);
      Vector dir_z = solver.solve_z(cur.grad_z, s.mu, s.pressured_set);
      double gdotp = (cur.grad_x.array() * dir_x.array()).sum() + cur.grad_z.dot(dir_z);
      const double gnorm2 = cur.grad_x.squaredNorm() + cur.grad_z.squaredNorm();
      if (gnorm2 == 0.0) {
        stage_converged = true;
        break;
      }
      if (!(gdotp > 0.0)) {
        if (!warned_direction) {
          run.warnings.push_back("non-descent direction; fell back to the gradient");
          warned_direction = true;
        }
        dir_x = cur.grad_x;
        dir_z = cur.grad_z;
        gdotp = gnorm2;
      }

      double alpha = 1.0;
      bool accepted = false;
      AugmentedState cand_s = s;
      AugmentedEval cand;
      while (alpha >= kMinStep) {
        cand_s.embedding.coords = s.embedding.coords - alpha * dir_x;
        cand_s.z = s.z - alpha * dir_z;
        bool usable = true;
        try {
          cand = augmented_evaluate(method, graph, cand_s, true);
        } catch (const EvaluationError&) {
          usable = false;
        }
        if (usable && cand.value <= cur.value - config.ls_armijo * alpha * gdotp) {
          accepted = true;
          break;
        }
        alpha *= config.ls_backtrack;
      }
      if (!accepted) {
        run.warnings.push_back("line search stalled at mu step " +
                               std::to_string(step_index));
        stage_converged = true;
        break;
      }

      const double prev_value = cur.value;
      s.embedding.coords = std::move(cand_s.embedding.coords);
      s.z = std::move(cand_s.z);
      cur = std::move(cand);
      ++total_iter;

      // Maintain the pressured set first so the trace reflects the state the
      // next iteration actually starts from (and ends at fraction 0 on
      // collapse). Additions seed z at the penalized slice minimum, backed
      // off if the joint entry would ascend, so the update never raises the
      // augmented value; removals zero a |z| < 1e-6 coordinate.
      AugmentedState updated = update_pressured_set(method, graph, s);
      const bool set_changed = updated.pressured_set != s.pressured_set;
      s = std::move(updated);
      if (set_changed) cur = augmented_evaluate(method, graph, s, true);

      TraceRecord rec;
      rec.iter = total_iter;
      rec.objective = cur.value;
      rec.step = alpha;
      rec.pressured_fraction = set_fraction(s);
      rec.mu = s.mu;
      run.trace.push_back(rec);
      if (callback) callback(rec);

      if (prev_value - rec.objective < config.conv_tol) stage_converged = true;
    }

    if (!stage_converged)
      run.warnings.push_back("iteration cap reached at mu step " + std::to_string(step_index));

    if (s.pressured_set.empty() && (s.z.array() == 0.0).all()) collapsed = true;

    const double d_objective = objective(method, graph, s.embedding).total;
    if (d_objective < best_objective) {
      best_objective = d_objective;
      best_coords = s.embedding.coords;
    }
  }

  if (collapsed) {
    run.converged = true;
    run.final_embedding = s.embedding;
    run.final_objective = run.trace.empty() ? objective(method, graph, s.embedding).total
                                            : run.trace.back().objective;
  } else {
    run.converged = false;
    run.warnings.push_back("mu schedule exhausted after " + std::to_string(kMaxMuSteps) +
                           " steps without collapsing the extra dimension");
    run.final_embedding = Embedding{best_coords};
    TraceRecord rec;  // bookkeeping record: best d-dimensional state (step 0)
    rec.iter = total_iter;
    rec.objective = best_objective;
    rec.step = 0.0;
    rec.pressured_fraction = pressured_fraction(method, graph, run.final_embedding);
    rec.mu = last_mu;
    run.trace.push_back(rec);
    run.final_objective = best_objective;
  }
  return run;
}

Embedding random_embedding(Index n, Index dim, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw ValidationError("embedding dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix coords(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < dim; ++j) coords(i, j) = kInitScale * u(rng);
  return Embedding{std::move(coords)};
}

RestartBenchmark restart_benchmark(const Method& method, const AffinityGraph& graph,
                                   int n_restarts, const OptimConfig& config, Index dim,
                                   MuSchedule::Strategy strategy) {
  if (n_restarts < 1) throw ValidationError("need at least 1 restart");
  const MuSchedule schedule = make_mu_schedule(graph, strategy);

  RestartBenchmark bench;
  bench.pairs.resize(static_cast<std::size_t>(n_restarts));

  const auto job = [&](int r) {
    RestartPair& pair = bench.pairs[static_cast<std::size_t>(r)];
    pair.seed = config.seed + static_cast<std::uint64_t>(r);
    const Embedding x0 = random_embedding(graph.n(), dim, pair.seed);
    pair.sd = minimize(method, graph, x0, config);
    pair.pp = pp_optimize(method, graph, pair.sd.final_embedding, schedule, config);
  };

  const int workers = std::min(worker_count(), n_restarts);
  if (workers <= 1) {
    for (int r = 0; r < n_restarts; ++r) job(r);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_restarts));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int r = w; r < n_restarts; r += workers) {
          try {
            job(r);
          } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  }

  const double n = static_cast<double>(n_restarts);
  double sd_sum = 0.0, pp_sum = 0.0;
  for (const RestartPair& pair : bench.pairs) {
    sd_sum += pair.sd.final_objective;
    pp_sum += pair.pp.final_objective;
  }
  bench.summary.sd_mean = sd_sum / n;
  bench.summary.pp_mean = pp_sum / n;
  if (n_restarts > 1) {
    double sd_var = 0.0, pp_var = 0.0;
    for (const RestartPair& pair : bench.pairs) {
      sd_var += std::pow(pair.sd.final_objective - bench.summary.sd_mean, 2);
      pp_var += std::pow(pair.pp.final_objective - bench.summary.pp_mean, 2);
    }
    bench.summary.sd_std = std::sqrt(sd_var / (n - 1.0));
    bench.summary.pp_std = std::sqrt(pp_var / (n - 1.0));
  }
  return bench;
}

}  // namespace pembed
