// Acceptance gate. Each invocation runs one numbered criterion and prints a
// single pass/fail line; the exit code mirrors the verdict. Tolerances and
// instance parameters are pinned here so reruns are bit-for-bit comparable.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pembed/affinity.hpp"
#include "pembed/augmented.hpp"
#include "pembed/data_io.hpp"
#include "pembed/objectives.hpp"
#include "pembed/optimizer.hpp"
#include "pembed/pressure.hpp"
#include "support/oracles.hpp"

using namespace pembed;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

int distinct_mu_count(const std::vector<TraceRecord>& trace) {
  int count = 0;
  double last = -1.0;
  for (const auto& r : trace)
    if (count == 0 || r.mu != last) {
      last = r.mu;
      ++count;
    }
  return count;
}

const Method kAllMethods[] = {{MethodTag::EE}, {MethodTag::SNE}, {MethodTag::TSNE}, {MethodTag::UMAP}};

// ---------------------------------------------------------------------------
// 1. Analytic gradients vs central finite differences of an independent
//    scalar-loop objective, for all four methods and for the augmented
//    objective (coordinates and extra dimension) of the two methods that
//    support it.
Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double kBudgetS = 10.0;
  const double kH = 1e-5;
  const double kRelTol = 1e-6;
  std::mt19937_64 rng(20240811);
  double worst = 0.0;
  std::string worst_at = "none";

  auto rel_error = [](const Matrix& got, const Matrix& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-9);
  };

  for (int state = 0; state < 20; ++state) {
    const AffinityGraph graph = testsupport::random_graph(8, rng);
    const Matrix coords = testsupport::random_coords(8, 2, rng);
    Embedding embedding;
    embedding.coords = coords;

    for (const Method& method : kAllMethods) {
      EvalOptions opt;
      opt.gradient = true;
      const Evaluation ev = evaluate(method, graph, embedding, opt);
      const Matrix fd = testsupport::fd_gradient(
          [&](const Matrix& c) { return testsupport::naive_objective(method, graph, c); },
          coords, kH);
      const double err = rel_error(ev.gradient, fd);
      if (err > worst) {
        worst = err;
        worst_at = fmt("method %d state %d", static_cast<int>(method.tag), state);
      }
    }

    // Augmented objective: random pressured set, random extra coordinates.
    for (const MethodTag tag : {MethodTag::EE, MethodTag::SNE}) {
      const Method method{tag};
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      AugmentedState st;
      st.embedding = embedding;
      st.z = Vector::Zero(8);
      for (Index k = 0; k < 8; ++k)
        if (unit(rng) < 0.5) st.pressured_set.push_back(k);
      if (st.pressured_set.empty()) st.pressured_set.push_back(static_cast<Index>(rng() % 8));
      for (Index k : st.pressured_set) st.z[k] = 2.0 * unit(rng) - 1.0;
      st.mu = unit(rng);

      const AugmentedEval ae = augmented_evaluate(method, graph, st, true);

      const Matrix fd_x = testsupport::fd_gradient(
          [&](const Matrix& c) {
            AugmentedState probe = st;
            probe.embedding.coords = c;
            return augmented_objective(method, graph, probe);
          },
          coords, kH);
      double err = rel_error(ae.grad_x, fd_x);
      if (err > worst) {
        worst = err;
        worst_at = fmt("augmented-x method %d state %d", static_cast<int>(tag), state);
      }

      // Differentiate only over the pressured entries; off-set components of
      // the analytic gradient must be identically zero.
      Matrix z_set(static_cast<Index>(st.pressured_set.size()), 1);
      for (size_t i = 0; i < st.pressured_set.size(); ++i) z_set(static_cast<Index>(i), 0) = st.z[st.pressured_set[i]];
      const Matrix fd_z_set = testsupport::fd_gradient(
          [&](const Matrix& zs) {
            AugmentedState probe = st;
            for (size_t i = 0; i < st.pressured_set.size(); ++i)
              probe.z[st.pressured_set[i]] = zs(static_cast<Index>(i), 0);
            return augmented_objective(method, graph, probe);
          },
          z_set, kH);
      Matrix grad_z_set(static_cast<Index>(st.pressured_set.size()), 1);
      for (size_t i = 0; i < st.pressured_set.size(); ++i) grad_z_set(static_cast<Index>(i), 0) = ae.grad_z[st.pressured_set[i]];
      err = rel_error(grad_z_set, fd_z_set);
      if (err > worst) {
        worst = err;
        worst_at = fmt("augmented-z method %d state %d", static_cast<int>(tag), state);
      }

      std::set<Index> in_set(st.pressured_set.begin(), st.pressured_set.end());
      for (Index k = 0; k < 8; ++k)
        if (!in_set.count(k) && ae.grad_z[k] != 0.0)
          return {false, fmt("nonzero extra-dimension gradient off the pressured set (state %d)", state)};
    }
  }

  const double secs = elapsed_s(t0);
  if (secs >= kBudgetS) return {false, fmt("runtime %.2f s exceeds %.0f s budget", secs, kBudgetS)};
  if (worst > kRelTol) return {false, fmt("worst relative error %.3e at %s exceeds %.0e", worst, worst_at.c_str(), kRelTol)};
  return {true, fmt("20 states x (4 plain + 2 augmented) gradients; worst relative error %.3e", worst)};
}

// ---------------------------------------------------------------------------
// 2. Per-point extra-dimension solvers (closed forms, Newton, golden section)
//    vs a dense 2001-point grid search of the slice over z in [0, 5]:
//    classification must match exactly, minimizer locations to 1e-2.
Outcome criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double kBudgetS = 30.0;
  std::mt19937_64 rng(7151623);
  std::uniform_real_distribution<double> lam(0.3, 2.0);
  std::uniform_real_distribution<double> ab(0.5, 1.5);
  double worst_z = 0.0;
  int checked = 0;

  for (const Method& base : kAllMethods) {
    for (int inst = 0; inst < 20; ++inst) {
      Method method = base;
      if (method.tag == MethodTag::UMAP && inst % 2 == 1) {
        method.umap_a = ab(rng);
        method.umap_b = ab(rng);
      }
      const AffinityGraph graph = testsupport::random_graph(6, rng, lam(rng));
      Embedding embedding;
      embedding.coords = testsupport::random_coords(6, 2, rng);

      const PressureReport report = compute_pressure(method, graph, embedding);
      for (Index k = 0; k < 6; ++k) {
        const testsupport::GridResult grid =
            testsupport::grid_slice_search(method, graph, embedding.coords, k);
        ++checked;
        if (report.pressured(k) != grid.pressured)
          return {false, fmt("classification mismatch: method %d instance %d point %ld (solver %d, grid %d)",
                             static_cast<int>(method.tag), inst, static_cast<long>(k),
                             report.pressured(k) ? 1 : 0, grid.pressured ? 1 : 0)};
        if (grid.pressured) {
          const double dz = std::abs(report.pressure[k] - grid.z_hat);
          worst_z = std::max(worst_z, dz);
          if (dz > 1e-2)
            return {false, fmt("minimizer mismatch %.4f vs grid %.4f (method %d instance %d point %ld)",
                               report.pressure[k], grid.z_hat, static_cast<int>(method.tag), inst,
                               static_cast<long>(k))};
        }
      }
    }
  }

  const double secs = elapsed_s(t0);
  if (secs >= kBudgetS) return {false, fmt("runtime %.2f s exceeds %.0f s budget", secs, kBudgetS)};
  return {true, fmt("%d point slices, classification exact, worst minimizer gap %.2e", checked, worst_z)};
}

// ---------------------------------------------------------------------------
// 3. Augmented-objective consistency: zero extra coordinates reproduce the
//    plain objective to 1e-12, and the generic (d+1)-dimensional evaluation
//    matches the explicit subset expansion to 1e-10 on 50 random states.
Outcome criterion_3() {
  std::mt19937_64 rng(5150801);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lam(0.3, 2.0);
  double worst_zero = 0.0, worst_expand = 0.0;

  for (int state = 0; state < 50; ++state) {
    const AffinityGraph graph = testsupport::random_graph(7, rng, lam(rng));
    Embedding embedding;
    embedding.coords = testsupport::random_coords(7, 2, rng);

    AugmentedState st;
    st.embedding = embedding;
    st.z = Vector::Zero(7);
    for (Index k = 0; k < 7; ++k)
      if (unit(rng) < 0.5) st.pressured_set.push_back(k);
    if (st.pressured_set.empty()) st.pressured_set.push_back(static_cast<Index>(rng() % 7));
    st.mu = 2.0 * unit(rng);

    for (const MethodTag tag : {MethodTag::EE, MethodTag::SNE}) {
      const Method method{tag};
      const double plain = objective(method, graph, embedding).total;
      const double augmented = augmented_objective(method, graph, st);
      worst_zero = std::max(worst_zero, std::abs(augmented - plain) / std::max(1.0, std::abs(plain)));
    }

    AugmentedState lifted = st;
    for (Index k : lifted.pressured_set) lifted.z[k] = 3.0 * unit(rng) - 1.5;
    const double generic = augmented_objective(Method{MethodTag::EE}, graph, lifted);
    const double expansion = testsupport::ee_expansion_objective(graph, embedding.coords, lifted.z,
                                                                 lifted.pressured_set, lifted.mu);
    worst_expand = std::max(worst_expand,
                            std::abs(generic - expansion) / std::max(1.0, std::abs(expansion)));
  }

  if (worst_zero > 1e-12) return {false, fmt("zero-lift mismatch %.3e exceeds 1e-12", worst_zero)};
  if (worst_expand > 1e-10) return {false, fmt("subset-expansion mismatch %.3e exceeds 1e-10", worst_expand)};
  return {true, fmt("50 states: zero-lift gap %.2e, subset-expansion gap %.2e", worst_zero, worst_expand)};
}

// ---------------------------------------------------------------------------
// 4. Three-point escape experiment. Sources on a line place point 0 next to
//    point 1, with point 2 in between in the initial embedding; plain
//    minimization stays in that arrangement (the higher local minimum of the
//    landscape over x0) while the extra-dimension loop crosses to the global
//    arrangement found by a grid search over x0.
struct SliceScan {
  double grid_min = 1e300;
  double grid_argmin = 0.0;
  int interior_minima = 0;
  double nearest_min_gap = 1e300;  // |x0 - closest interior minimum|
};

SliceScan scan_x0_landscape(const Method& method, const AffinityGraph& graph,
                            const Embedding& base) {
  Embedding probe = base;
  std::vector<double> vals(2001);
  for (int t = 0; t <= 2000; ++t) {
    probe.coords(0, 0) = -5.0 + 10.0 * t / 2000.0;
    vals[t] = objective(method, graph, probe).total;
  }
  SliceScan out;
  for (int t = 1; t < 2000; ++t) {
    const double x = -5.0 + 10.0 * t / 2000.0;
    if (vals[t] < out.grid_min) {
      out.grid_min = vals[t];
      out.grid_argmin = x;
    }
    if (vals[t] <= vals[t - 1] && vals[t] <= vals[t + 1]) {
      ++out.interior_minima;
      out.nearest_min_gap = std::min(out.nearest_min_gap, std::abs(x - base.coords(0, 0)));
    }
  }
  return out;
}

Outcome criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const double kBudgetS = 5.0;

  // 1-D sources: a satellite at 0 whose only meaningful attraction is to the
  // near member (1.4) of a tight pair (1.4, 2.4). The initial embedding puts
  // the far pair member between the satellite and its partner.
  Matrix sources(3, 1);
  sources << 0.0, 1.4, 2.4;
  const Matrix sq = pairwise_sqdist(sources);
  AffinityGraph graph;
  const double sigma = 0.5;
  graph.w_plus = (-sq.array() / (2.0 * sigma * sigma)).exp();
  graph.w_plus.diagonal().setZero();
  graph.w_minus = sq;
  graph.degrees_plus = graph.w_plus.colwise().sum();
  graph.lambda = 0.3;

  Embedding init;
  init.coords = Matrix(3, 1);
  init.coords << 0.0, -2.575, -2.071;

  const Method method{MethodTag::EE};
  const PressureReport report = compute_pressure(method, graph, init);
  if (report.pressured_set.empty()) return {false, "no pressured points at the blocked arrangement"};

  OptimConfig config;
  config.max_iter = 10000;
  config.conv_tol = 1e-7;

  const OptimRun sd = minimize(method, graph, init, config);
  if (!sd.converged) return {false, "plain minimization did not converge"};
  if (testsupport::descent_violations(sd.trace) != 0) return {false, "plain trace not monotone"};

  const SliceScan landscape = scan_x0_landscape(method, graph, sd.final_embedding);
  if (landscape.interior_minima < 2)
    return {false, fmt("landscape over x0 has %d interior minima; expected a double well",
                       landscape.interior_minima)};
  if (landscape.nearest_min_gap > 0.02)
    return {false, fmt("converged x0 is %.3f away from the nearest landscape minimum",
                       landscape.nearest_min_gap)};
  if (sd.final_objective <= landscape.grid_min + 1e-3)
    return {false, fmt("plain minimum %.6f is not above the grid minimum %.6f",
                       sd.final_objective, landscape.grid_min)};

  const OptimRun pp = pp_optimize(method, graph, init, make_mu_schedule(graph), config);
  if (!pp.converged) return {false, "extra-dimension loop did not converge"};
  if (testsupport::descent_violations(pp.trace) != 0) return {false, "extra-dimension trace not monotone"};
  if (pp.trace.back().pressured_fraction != 0.0)
    return {false, "pressured fraction nonzero at the final penalty"};
  if (pp.final_objective >= sd.final_objective - 1e-4)
    return {false, fmt("no strict improvement: pp %.6f vs sd %.6f", pp.final_objective,
                       sd.final_objective)};
  if (pp.final_objective > landscape.grid_min + 1e-3)
    return {false, fmt("pp %.6f misses the grid minimum %.6f", pp.final_objective,
                       landscape.grid_min)};
  const SliceScan own = scan_x0_landscape(method, graph, pp.final_embedding);
  if (std::abs(pp.final_objective - own.grid_min) > 1e-3)
    return {false, fmt("pp %.6f is not the global minimum %.6f of its own x0 landscape",
                       pp.final_objective, own.grid_min)};

  const double secs = elapsed_s(t0);
  if (secs >= kBudgetS) return {false, fmt("runtime %.2f s exceeds %.0f s budget", secs, kBudgetS)};
  return {true, fmt("trapped at %.6f (grid best %.6f), escaped to %.6f", sd.final_objective,
                    landscape.grid_min, pp.final_objective)};
}

// ---------------------------------------------------------------------------
// 5. Refinement-from-converged-minimization on the rings benchmark: over ten
//    random restarts the extra-dimension loop must improve the converged
//    objective by at least 1e-4 in >= 8/10 runs (EE) and >= 6/10 runs (SNE),
//    and must never end above the converged value + 1e-5.
struct RingsProtocol {
  int wins = 0;
  int regressions = 0;
  int unconverged = 0;
  int descent_bad = 0;
  double min_delta = 1e300;
};

RingsProtocol run_rings_protocol(const Method& method, const AffinityGraph& graph,
                                 const OptimConfig& config) {
  const MuSchedule schedule = make_mu_schedule(graph);
  RingsProtocol out;
  for (int seed = 0; seed < 10; ++seed) {
    const Embedding x0 = random_embedding(graph.n(), 2, static_cast<std::uint64_t>(seed));
    const OptimRun sd = minimize(method, graph, x0, config);
    if (!sd.converged) ++out.unconverged;
    const OptimRun pp = pp_optimize(method, graph, sd.final_embedding, schedule, config);
    const double delta = sd.final_objective - pp.final_objective;
    out.min_delta = std::min(out.min_delta, delta);
    if (delta >= 1e-4) ++out.wins;
    if (pp.final_objective > sd.final_objective + 1e-5) ++out.regressions;
    out.descent_bad +=
        testsupport::descent_violations(sd.trace) + testsupport::descent_violations(pp.trace);
  }
  return out;
}

Outcome criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const double kBudgetS = 600.0;
  const Dataset rings = generate_rings(10, 72, 1.0, 4.0, 0);

  AffinityConfig ee_affinity;
  ee_affinity.mode = AffinityConfig::Mode::FixedSigma;
  ee_affinity.sigma = 1.0;
  ee_affinity.lambda = 0.1;
  OptimConfig ee_config;
  ee_config.max_iter = 2000;
  ee_config.conv_tol = 0.1;
  const RingsProtocol ee = run_rings_protocol(Method{MethodTag::EE},
                                              build_affinities(rings, ee_affinity), ee_config);

  AffinityConfig sne_affinity;
  sne_affinity.mode = AffinityConfig::Mode::Perplexity;
  sne_affinity.perplexity = 15.0;
  OptimConfig sne_config;
  sne_config.max_iter = 2000;
  sne_config.conv_tol = 1e-3;
  const RingsProtocol sne = run_rings_protocol(Method{MethodTag::SNE},
                                               build_affinities(rings, sne_affinity), sne_config);

  const double secs = elapsed_s(t0);
  if (secs >= kBudgetS) return {false, fmt("runtime %.1f s exceeds %.0f s budget", secs, kBudgetS)};
  if (ee.unconverged || sne.unconverged)
    return {false, fmt("%d EE / %d SNE baseline runs failed to converge", ee.unconverged,
                       sne.unconverged)};
  if (ee.regressions || sne.regressions)
    return {false, fmt("refinement ended above converged value + 1e-5 in %d EE / %d SNE runs",
                       ee.regressions, sne.regressions)};
  if (ee.descent_bad || sne.descent_bad)
    return {false, fmt("%d EE / %d SNE descent violations", ee.descent_bad, sne.descent_bad)};
  if (ee.wins < 8) return {false, fmt("EE improved in %d/10 seeds; need >= 8", ee.wins)};
  if (sne.wins < 6) return {false, fmt("SNE improved in %d/10 seeds; need >= 6", sne.wins)};
  return {true, fmt("EE %d/10, SNE %d/10 improved; no regressions; %.0f s", ee.wins, sne.wins, secs)};
}

// ---------------------------------------------------------------------------
// 6. Penalty-schedule endgame on the rings benchmark: with the mean-degree
//    step rule the pressured fraction must reach exactly zero at the final
//    penalty value and consume at most ten schedule steps.
Outcome criterion_6() {
  const Dataset rings = generate_rings(10, 72, 1.0, 4.0, 0);
  AffinityConfig affinity;
  affinity.mode = AffinityConfig::Mode::FixedSigma;
  affinity.sigma = 1.0;
  affinity.lambda = 0.1;
  const AffinityGraph graph = build_affinities(rings, affinity);
  const MuSchedule schedule = make_mu_schedule(graph, MuSchedule::Strategy::MeanDegree);

  OptimConfig config;
  config.max_iter = 2000;
  config.conv_tol = 0.1;

  const Method method{MethodTag::EE};
  const Embedding x0 = random_embedding(graph.n(), 2, 0);
  const OptimRun sd = minimize(method, graph, x0, config);
  if (!sd.converged) return {false, "baseline minimization did not converge"};
  const OptimRun pp = pp_optimize(method, graph, sd.final_embedding, schedule, config);
  if (!pp.converged) return {false, "extra-dimension loop did not converge"};
  if (testsupport::descent_violations(pp.trace) != 0) return {false, "trace not monotone"};

  const double final_fraction = pp.trace.back().pressured_fraction;
  if (final_fraction != 0.0)
    return {false, fmt("pressured fraction %.6f at the final penalty; expected exactly 0",
                       final_fraction)};
  const int mu_steps = distinct_mu_count(pp.trace);
  if (mu_steps > 10) return {false, fmt("consumed %d penalty steps; cap is 10", mu_steps)};
  return {true, fmt("fraction 0 at final penalty after %d schedule step(s)", mu_steps)};
}

// ---------------------------------------------------------------------------
// 7. Monotone descent: optimizer traces from a representative sweep (the
//    escape instance, random desk-scale graphs for all methods, and a small
//    rings run) must show zero objective increases beyond line-search slack.
Outcome criterion_7() {
  int violations = 0;
  int traces = 0;
  long records = 0;
  auto tally = [&](const OptimRun& run) {
    violations += testsupport::descent_violations(run.trace);
    ++traces;
    records += static_cast<long>(run.trace.size());
  };

  {  // The three-point escape instance, both loops.
    Matrix sources(3, 1);
    sources << 0.0, 1.4, 2.4;
    const Matrix sq = pairwise_sqdist(sources);
    AffinityGraph graph;
    graph.w_plus = (-sq.array() / 0.5).exp();
    graph.w_plus.diagonal().setZero();
    graph.w_minus = sq;
    graph.degrees_plus = graph.w_plus.colwise().sum();
    graph.lambda = 0.3;
    Embedding init;
    init.coords = Matrix(3, 1);
    init.coords << 0.0, -2.575, -2.071;
    OptimConfig config;
    config.max_iter = 10000;
    config.conv_tol = 1e-7;
    tally(minimize(Method{MethodTag::EE}, graph, init, config));
    tally(pp_optimize(Method{MethodTag::EE}, graph, init, make_mu_schedule(graph), config));
  }

  {  // Random graphs, every method, plus the refinement loop where defined.
    std::mt19937_64 rng(909014);
    std::uniform_real_distribution<double> lam(0.3, 2.0);
    for (int inst = 0; inst < 12; ++inst) {
      const AffinityGraph graph = testsupport::random_graph(20, rng, lam(rng));
      Embedding x0;
      x0.coords = testsupport::random_coords(20, 2, rng);
      OptimConfig config;
      config.max_iter = 300;
      config.conv_tol = 1e-7;
      for (const Method& method : kAllMethods) tally(minimize(method, graph, x0, config));
      for (const MethodTag tag : {MethodTag::EE, MethodTag::SNE})
        tally(pp_optimize(Method{tag}, graph, x0, make_mu_schedule(graph), config));
    }
  }

  {  // A small rings instance through both loops, both supported methods.
    const Dataset rings = generate_rings(4, 24, 1.0, 4.0, 3);
    AffinityConfig ee_affinity;
    ee_affinity.mode = AffinityConfig::Mode::FixedSigma;
    ee_affinity.sigma = 1.0;
    ee_affinity.lambda = 0.1;
    const AffinityGraph ee_graph = build_affinities(rings, ee_affinity);
    AffinityConfig sne_affinity;
    sne_affinity.mode = AffinityConfig::Mode::Perplexity;
    sne_affinity.perplexity = 10.0;
    const AffinityGraph sne_graph = build_affinities(rings, sne_affinity);
    OptimConfig config;
    config.max_iter = 500;
    config.conv_tol = 1e-3;
    const Embedding x0 = random_embedding(ee_graph.n(), 2, 5);
    const OptimRun ee_sd = minimize(Method{MethodTag::EE}, ee_graph, x0, config);
    tally(ee_sd);
    tally(pp_optimize(Method{MethodTag::EE}, ee_graph, ee_sd.final_embedding,
                      make_mu_schedule(ee_graph), config));
    const OptimRun sne_sd = minimize(Method{MethodTag::SNE}, sne_graph, x0, config);
    tally(sne_sd);
    tally(pp_optimize(Method{MethodTag::SNE}, sne_graph, sne_sd.final_embedding,
                      make_mu_schedule(sne_graph), config));
  }

  if (violations != 0)
    return {false, fmt("%d objective increases across %d traces", violations, traces)};
  return {true, fmt("0 violations across %d traces (%ld records)", traces, records)};
}

// ---------------------------------------------------------------------------
// 8. Determinism of the benchmark command: identical seed and a single worker
//    must produce byte-identical tables and standard output across two runs.
std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome criterion_8() {
  const char* cli = std::getenv("PEMBED_CLI_PATH");
#ifdef PEMBED_CLI_PATH
  if (cli == nullptr) cli = PEMBED_CLI_PATH;
#endif
  if (cli == nullptr) return {false, "PEMBED_CLI_PATH not set"};

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pembed_acceptance";
  fs::create_directories(dir);
  const fs::path data = dir / "clusters.csv";

  const std::string gen = std::string(cli) +
                          " generate clusters --clusters 3 --per-cluster 6 --dim 3 --seed 7 --out " +
                          data.string() + " > /dev/null 2>&1";
  if (std::system(gen.c_str()) != 0) return {false, "dataset generation failed"};

  std::string tables[2], outs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path table = dir / fmt("table%d.tsv", run);
    const fs::path out = dir / fmt("stdout%d.txt", run);
    const std::string cmd = "PRESSURE_EMBED_THREADS=1 " + std::string(cli) + " benchmark " +
                            data.string() +
                            " --method ee --sigma 1.5 --lambda 0.05 --restarts 3 --seed 11" +
                            " --max-iter 400 --out-table " + table.string() + " > " + out.string() +
                            " 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, fmt("benchmark run %d exited with %d", run, rc)};
    tables[run] = read_file(table);
    outs[run] = read_file(out);
  }

  if (tables[0].empty()) return {false, "benchmark produced an empty table"};
  if (tables[0] != tables[1]) return {false, "tables differ between identical runs"};
  if (outs[0] != outs[1]) return {false, "standard output differs between identical runs"};
  return {true, fmt("two runs byte-identical (%zu-byte table)", tables[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1-8>\n", argv[0]);
    return 2;
  }
  const int which = std::atoi(argv[1]);
  Outcome (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                             criterion_5, criterion_6, criterion_7, criterion_8};
  if (which < 1 || which > 8) {
    std::fprintf(stderr, "usage: %s <criterion 1-8>\n", argv[0]);
    return 2;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome outcome = criteria[which - 1]();
  std::printf("criterion %d: %s — %s (%.2f s)\n", which, outcome.pass ? "PASS" : "FAIL",
              outcome.details.c_str(), elapsed_s(t0));
  return outcome.pass ? 0 : 1;
}
