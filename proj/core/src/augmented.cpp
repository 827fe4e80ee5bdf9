#include "pembed/augmented.hpp"

#include <algorithm>
#include <cmath>

namespace pembed {
namespace {

void require_pp_method(const Method& method) {
  if (method.tag != MethodTag::EE && method.tag != MethodTag::SNE)
    throw ValidationError("pressured-point optimization supports ee and sne only");
}

}  // namespace

std::string to_string(MuSchedule::Strategy strategy) {
  switch (strategy) {
    case MuSchedule::Strategy::MeanDegree: return "mean";
    case MuSchedule::Strategy::MaxDegree: return "max";
    case MuSchedule::Strategy::MinDegree: return "min";
  }
  throw ValidationError("unknown mu strategy");
}

MuSchedule::Strategy mu_strategy_from_string(const std::string& name) {
  if (name == "mean") return MuSchedule::Strategy::MeanDegree;
  if (name == "max") return MuSchedule::Strategy::MaxDegree;
  if (name == "min") return MuSchedule::Strategy::MinDegree;
  throw ValidationError("unknown mu strategy '" + name + "' (expected mean|max|min)");
}

MuSchedule make_mu_schedule(const AffinityGraph& graph, MuSchedule::Strategy strategy) {
  const Vector& d = graph.degrees_plus;
  if (d.size() == 0 || d.maxCoeff() <= 0.0)
    throw ValidationError("mu schedule: all attraction degrees are zero");
  MuSchedule sched;
  sched.strategy = strategy;
  switch (strategy) {
    case MuSchedule::Strategy::MeanDegree: sched.step = d.mean(); break;
    case MuSchedule::Strategy::MaxDegree: sched.step = d.maxCoeff(); break;
    case MuSchedule::Strategy::MinDegree: sched.step = d.minCoeff(); break;
  }
  if (!(sched.step > 0.0))
    throw ValidationError("mu schedule: selected degree statistic is zero");
  return sched;
}

Matrix with_extra_dimension(const Embedding& embedding, const Vector& z) {
  if (z.size() != embedding.n())
    throw ValidationError("extra dimension length does not match embedding");
  Matrix out(embedding.n(), embedding.dim() + 1);
  out.leftCols(embedding.dim()) = embedding.coords;
  out.col(embedding.dim()) = z;
  return out;
}

AugmentedEval augmented_evaluate(const Method& method, const AffinityGraph& graph,
                                 const AugmentedState& state, bool want_gradient) {
  require_pp_method(method);
  validate(state);
  if (state.n() != graph.n())
    throw ValidationError("augmented state and affinity graph disagree on point count");

  const Index d = state.embedding.dim();
  Embedding lifted{with_extra_dimension(state.embedding, state.z)};
  EvalOptions opt;
  opt.gradient = want_gradient;
  const Evaluation ev = evaluate(method, graph, lifted, opt);

  double penalty = 0.0;
  for (Index i : state.pressured_set) penalty += state.z[i] * state.z[i];

  AugmentedEval out;
  out.value = ev.value.total + state.mu * penalty;
  if (want_gradient) {
    out.grad_x = ev.gradient.leftCols(d);
    out.grad_z = Vector::Zero(state.n());
    for (Index i : state.pressured_set)
      out.grad_z[i] = ev.gradient(i, d) + 2.0 * state.mu * state.z[i];
  }
  return out;
}

double augmented_objective(const Method& method, const AffinityGraph& graph,
                           const AugmentedState& state) {
  return augmented_evaluate(method, graph, state, false).value;
}

std::pair<Matrix, Vector> augmented_gradient(const Method& method,
                                             const AffinityGraph& graph,
                                             const AugmentedState& state) {
  AugmentedEval ev = augmented_evaluate(method, graph, state, true);
  return {std::move(ev.grad_x), std::move(ev.grad_z)};
}

AugmentedState update_pressured_set(const Method& method, const AffinityGraph& graph,
                                    const AugmentedState& state,
                                    const NewtonConfig& newton) {
  require_pp_method(method);
  validate(state);
  // Classify against the penalized slice f(z) + mu z^2: the quadratic term
  // folds into the attraction degree as d+ -> d+ + mu/2, so entering points
  // seed at the penalized minimum and can only lower the augmented value.
  PressureReport report;
  if (state.mu > 0.0) {
    AffinityGraph penalized = graph;
    penalized.degrees_plus.array() += state.mu / 2.0;
    report = compute_pressure(method, penalized, state.embedding, newton);
  } else {
    report = compute_pressure(method, graph, state.embedding, newton);
  }

  AugmentedState next = state;
  next.pressured_set.clear();
  IndexSet entered;
  IndexSet::const_iterator member = state.pressured_set.begin();
  for (Index i = 0; i < state.n(); ++i) {
    const bool was_member = (member != state.pressured_set.end() && *member == i);
    if (was_member) ++member;
    const bool now_pressured = report.pressure[i] > 0.0;
    if (was_member) {
      // Keep until the coordinate has collapsed and the point classifies
      // non-pressured at Z = 0; removal zeroes the coordinate.
      if (std::abs(state.z[i]) >= kZCollapseEps || now_pressured) {
        next.pressured_set.push_back(i);
      } else {
        next.z[i] = 0.0;
      }
    } else if (now_pressured) {
      next.pressured_set.push_back(i);
      next.z[i] = report.pressure[i];
    }
  }

  // The seeds are per-point slice minima with every other coordinate held at
  // zero. Because the extra dimension is shared, simultaneous entries interact
  // through the (z_k - z_j)^2 terms and the joint update can raise the
  // objective. Back the fresh seeds off geometrically until the update is
  // nonincreasing; z = 0 reproduces the pre-entry value exactly, so the loop
  // always ends in a safe state.
  for (Index i : next.pressured_set) {
    if (!std::binary_search(state.pressured_set.begin(), state.pressured_set.end(), i))
      entered.push_back(i);
  }
  if (!entered.empty()) {
    AugmentedState base = next;
    for (Index i : entered) base.z[i] = 0.0;
    const double before = augmented_objective(method, graph, base);
    double scale = 1.0;
    for (int trial = 0; trial < 24; ++trial) {
      if (augmented_objective(method, graph, next) <= before) return next;
      scale *= 0.5;
      for (Index i : entered) next.z[i] = scale * report.pressure[i];
    }
    for (Index i : entered) next.z[i] = 0.0;
  }
  return next;
}

}  // namespace pembed
