#pragma once

#include "pembed/pressure.hpp"

#include <utility>

namespace pembed {

// A point already in the pressured set is removed only after its extra
// coordinate has collapsed below this threshold (and it classifies
// non-pressured at Z = 0); dropping a large z would jump the objective.
inline constexpr double kZCollapseEps = 1e-6;

// Nondecreasing penalty weights mu_t = step * t, t = 0, 1, 2, ...
struct MuSchedule {
  enum class Strategy { MeanDegree, MaxDegree, MinDegree };

  Strategy strategy = Strategy::MeanDegree;
  double step = 0.0;

  double value_at(int index) const { return step * index; }
};

std::string to_string(MuSchedule::Strategy strategy);
MuSchedule::Strategy mu_strategy_from_string(const std::string& name);

// step = mean / max / min of the attraction degrees d+.
MuSchedule make_mu_schedule(const AffinityGraph& graph,
                            MuSchedule::Strategy strategy = MuSchedule::Strategy::MeanDegree);

// [X | Z] as an N x (d+1) coordinate block.
Matrix with_extra_dimension(const Embedding& embedding, const Vector& z);

struct AugmentedEval {
  double value = 0.0;
  Matrix grad_x;  // N x d, filled only when requested
  Vector grad_z;  // N, exactly 0 outside the pressured set
};

// E_m([X | Z]) + mu * sum_{i in P} z_i^2, evaluated generically in d+1
// dimensions. Only EE and SNE participate in pressured-point optimization.
AugmentedEval augmented_evaluate(const Method& method, const AffinityGraph& graph,
                                 const AugmentedState& state, bool want_gradient);

double augmented_objective(const Method& method, const AffinityGraph& graph,
                           const AugmentedState& state);

std::pair<Matrix, Vector> augmented_gradient(const Method& method,
                                             const AffinityGraph& graph,
                                             const AugmentedState& state);

// Reclassify at the current X: newly pressured points enter with z set to
// their fresh pressure value; members leave (z zeroed) only once their z has
// collapsed below kZCollapseEps and they classify non-pressured at Z = 0.
AugmentedState update_pressured_set(const Method& method, const AffinityGraph& graph,
                                    const AugmentedState& state,
                                    const NewtonConfig& newton = {});

}  // namespace pembed
