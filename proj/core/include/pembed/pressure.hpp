#pragma once

#include "pembed/objectives.hpp"

namespace pembed {

// Safeguarded Newton search used by the t-SNE pressure test.
struct NewtonConfig {
  double init = 1e-3;
  int max_iter = 50;
  double tol = 1e-10;  // on |dE/dz|
};

// E([X | z e_k]) as a function of one point's extra coordinate: O(N^2) setup,
// then O(N) per evaluation. The graph must outlive the evaluator. Values are
// exact at z = 0 (slice(k, 0) == base_value()) and even in z.
class SliceEvaluator {
 public:
  SliceEvaluator(const Method& method, const AffinityGraph& graph,
                 const Embedding& embedding);

  double operator()(Index k, double z) const;
  double base_value() const { return base_; }
  Index n() const { return dist_.rows(); }

 private:
  Method method_;
  const AffinityGraph* graph_;
  Matrix dist_;
  double base_ = 0.0;
  double kernel_sum_ = 0.0;  // SNE/TSNE
  Vector repulse_deg_;       // EE: lambda sum w- exp(-d); SNE: sum exp(-d); TSNE: sum K
};

// Convenience one-shot slice evaluation (rebuilds the evaluator each call).
double objective_slice(const Method& method, const AffinityGraph& graph,
                       const Embedding& embedding, Index k, double z);

// A point is pressured when z = 0 is a strict local maximum of its slice;
// the reported pressure is the minimizing |z|. Ties classify as
// non-pressured. Each overload reuses the per-point degree statistics of the
// corresponding gradient.
PressureReport pressure_ee(const AffinityGraph& graph, const Embedding& embedding);
PressureReport pressure_sne(const AffinityGraph& graph, const Embedding& embedding);
PressureReport pressure_tsne(const AffinityGraph& graph, const Embedding& embedding,
                             const NewtonConfig& newton = {});
PressureReport pressure_umap(const Method& method, const AffinityGraph& graph,
                             const Embedding& embedding);

PressureReport compute_pressure(const Method& method, const AffinityGraph& graph,
                                const Embedding& embedding,
                                const NewtonConfig& newton = {});

// Classification only (no minimizing z), cheap for EE/SNE/TSNE.
double pressured_fraction(const Method& method, const AffinityGraph& graph,
                          const Embedding& embedding);

// Classification from precomputed degree statistics (see Evaluation); lets
// the optimizer trace fractions without re-evaluating. Not available for
// UMAP.
std::vector<bool> classify_pressured(MethodTag tag, const Vector& attract_stat,
                                     const Vector& repulse_stat, double kernel_sum);

}  // namespace pembed
