#pragma once

#include "pembed/types.hpp"

namespace pembed {

// All four objectives decompose into an attractive and a repulsive part,
// E = E_attract + E_repulse, summed over ordered pairs i != j.
struct ObjectiveValue {
  double total = 0.0;
  double attract = 0.0;
  double repulse = 0.0;
};

struct EvalOptions {
  bool gradient = false;
  bool stats = false;  // per-point degree statistics (see Evaluation)
};

// One pass over the pairwise distances serves the objective value, its
// gradient, and the per-point statistics the pressure diagnostics reuse:
//   EE:   attract_stat = d+_k,             repulse_stat = lambda * sum_i w-_ik exp(-d_ik^2)
//   SNE:  attract_stat = d+_k,             repulse_stat = sum_i exp(-d_ik^2),   kernel_sum = S
//   TSNE: attract_stat = sum_i w+_ik K_ik, repulse_stat = sum_i K_ik^2,         kernel_sum = S
//   UMAP: no closed-form statistics (vectors left empty)
struct Evaluation {
  ObjectiveValue value;
  Matrix gradient;      // N x d, filled only when requested
  Vector attract_stat;  // N, filled only when requested
  Vector repulse_stat;  // N, filled only when requested
  double kernel_sum = 0.0;
};

// Caller guarantees `graph` was validated at construction; only cheap shape
// and finiteness checks happen per evaluation. Throws EvaluationError if the
// value or gradient comes out non-finite.
Evaluation evaluate(const Method& method, const AffinityGraph& graph,
                    const Embedding& embedding, const EvalOptions& options = {});

ObjectiveValue objective(const Method& method, const AffinityGraph& graph,
                         const Embedding& embedding);

// 4 * L(C) * X for the method-specific coefficient matrix C; exactly the
// derivative of objective() at the same coordinates.
Matrix gradient(const Method& method, const AffinityGraph& graph,
                const Embedding& embedding);

// The repulsive degree d~-_k used by the pressure tests (EE/SNE/TSNE only).
Vector repulsion_degrees(const Method& method, const AffinityGraph& graph,
                         const Embedding& embedding);

}  // namespace pembed
