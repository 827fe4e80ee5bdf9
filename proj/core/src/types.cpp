#include "pembed/types.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace pembed {

std::string to_string(MethodTag tag) {
  switch (tag) {
    case MethodTag::EE: return "ee";
    case MethodTag::SNE: return "sne";
    case MethodTag::TSNE: return "tsne";
    case MethodTag::UMAP: return "umap";
  }
  throw ValidationError("unknown method tag");
}

MethodTag method_tag_from_string(const std::string& name) {
  if (name == "ee") return MethodTag::EE;
  if (name == "sne") return MethodTag::SNE;
  if (name == "tsne") return MethodTag::TSNE;
  if (name == "umap") return MethodTag::UMAP;
  throw ValidationError("unknown method '" + name + "' (expected ee|sne|tsne|umap)");
}

void validate(const Dataset& data, Index max_points) {
  if (data.n() < 2 || data.dim() == 0)
    throw ValidationError("dataset needs at least 2 points and 1 coordinate");
  if (data.n() > max_points)
    throw ValidationError("dataset has " + std::to_string(data.n()) +
                          " points, more than the configured cap of " +
                          std::to_string(max_points));
  if (!data.points.allFinite())
    throw ValidationError("dataset contains non-finite coordinates");
  if (!data.labels.empty() && static_cast<Index>(data.labels.size()) != data.n())
    throw ValidationError("label count does not match point count");
}

void validate(const AffinityGraph& graph) {
  const Index n = graph.n();
  if (n < 2) throw ValidationError("affinity graph needs at least 2 points");
  if (graph.w_plus.cols() != n || graph.w_minus.rows() != n || graph.w_minus.cols() != n)
    throw ValidationError("affinity matrices must be square and same size");
  if (graph.degrees_plus.size() != n)
    throw ValidationError("degrees_plus size does not match graph");
  if (!graph.w_plus.allFinite() || !graph.w_minus.allFinite())
    throw ValidationError("affinity matrices contain non-finite entries");
  if (graph.w_plus.minCoeff() < 0.0 || graph.w_minus.minCoeff() < 0.0)
    throw ValidationError("affinity weights must be nonnegative");
  if (graph.lambda < 0.0 || !std::isfinite(graph.lambda))
    throw ValidationError("lambda must be nonnegative and finite");
  const double scale_p = std::max(1.0, graph.w_plus.cwiseAbs().maxCoeff());
  const double scale_m = std::max(1.0, graph.w_minus.cwiseAbs().maxCoeff());
  if ((graph.w_plus - graph.w_plus.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_p)
    throw ValidationError("w_plus must be symmetric");
  if ((graph.w_minus - graph.w_minus.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_m)
    throw ValidationError("w_minus must be symmetric");
  if (graph.w_plus.diagonal().cwiseAbs().maxCoeff() != 0.0 ||
      graph.w_minus.diagonal().cwiseAbs().maxCoeff() != 0.0)
    throw ValidationError("affinity diagonals must be exactly zero");
  if ((graph.degrees_plus - graph.w_plus.rowwise().sum()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, graph.degrees_plus.cwiseAbs().maxCoeff()))
    throw ValidationError("degrees_plus does not match w_plus row sums");
}

void validate(const Embedding& embedding) {
  if (embedding.n() == 0 || embedding.dim() == 0)
    throw ValidationError("embedding is empty");
  if (!embedding.coords.allFinite())
    throw ValidationError("embedding contains non-finite coordinates");
}

void validate(const AugmentedState& state) {
  validate(state.embedding);
  if (state.z.size() != state.embedding.n())
    throw ValidationError("augmented state z size does not match embedding");
  if (!state.z.allFinite())
    throw ValidationError("augmented state z contains non-finite values");
  if (state.mu < 0.0 || !std::isfinite(state.mu))
    throw ValidationError("mu must be nonnegative and finite");
  if (!is_sorted_unique(state.pressured_set))
    throw ValidationError("pressured set must be sorted and duplicate-free");
  if (!state.pressured_set.empty() &&
      (state.pressured_set.front() < 0 || state.pressured_set.back() >= state.n()))
    throw ValidationError("pressured set index out of range");
  // z must vanish off the pressured set.
  IndexSet::const_iterator it = state.pressured_set.begin();
  for (Index i = 0; i < state.n(); ++i) {
    const bool in_set = (it != state.pressured_set.end() && *it == i);
    if (in_set) {
      ++it;
    } else if (state.z[i] != 0.0) {
      throw ValidationError("z is nonzero outside the pressured set");
    }
  }
}

Matrix pairwise_sqdist(const Matrix& points) {
  if (points.rows() == 0)
    throw ValidationError("pairwise_sqdist: empty input");
  if (!points.allFinite())
    throw ValidationError("pairwise_sqdist: non-finite coordinates");
  const Index n = points.rows();
  Matrix gram = points * points.transpose();
  gram = ((gram + gram.transpose()) * 0.5).eval();  // force exact symmetry
  const Vector sq = gram.diagonal();
  Matrix d(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      d(i, j) = sq[i] + sq[j] - 2.0 * gram(i, j);
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

int worker_count() {
  const char* raw = std::getenv("PRESSURE_EMBED_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const long parsed = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || parsed < 1) return 1;
  return static_cast<int>(std::min(parsed, 64L));
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

bool is_sorted_unique(const IndexSet& set) {
  for (std::size_t i = 1; i < set.size(); ++i)
    if (set[i] <= set[i - 1]) return false;
  return true;
}

}  // namespace pembed
