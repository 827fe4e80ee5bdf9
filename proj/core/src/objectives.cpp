#include "pembed/objectives.hpp"

#include <cmath>

namespace pembed {
namespace {

constexpr double kUmapDistFloor = 1e-16;  // floor on d^2 inside the repulsive log
constexpr double kUmapPowFloor = 1e-30;   // floor on d^2 under the exponent b-1

// 4 * (diag(rowsum C) - C) * X.
Matrix scaled_laplacian_times(const Matrix& c, const Matrix& x) {
  const Vector r = c.rowwise().sum();
  Matrix out = r.asDiagonal() * x;
  out.noalias() -= c * x;
  return 4.0 * out;
}

void eval_ee(const AffinityGraph& g, const Matrix& x, const Matrix& d,
             const EvalOptions& opt, Evaluation& out) {
  Matrix q = (-d).array().exp();
  q.diagonal().setZero();
  const Matrix r = g.lambda * g.w_minus.cwiseProduct(q);
  out.value.attract = g.w_plus.cwiseProduct(d).sum();
  out.value.repulse = r.sum();
  if (opt.gradient) out.gradient = scaled_laplacian_times(g.w_plus - r, x);
  if (opt.stats) {
    out.attract_stat = g.degrees_plus;
    out.repulse_stat = r.rowwise().sum();
  }
}

void eval_sne(const AffinityGraph& g, const Matrix& x, const Matrix& d,
              const EvalOptions& opt, Evaluation& out) {
  Matrix q = (-d).array().exp();
  q.diagonal().setZero();
  const double s = q.sum();
  if (!(s > 0.0))
    throw EvaluationError("sne: repulsive kernel sum underflowed to zero");
  out.value.attract = g.w_plus.cwiseProduct(d).sum();
  out.value.repulse = std::log(s);
  if (opt.gradient) out.gradient = scaled_laplacian_times(g.w_plus - q / s, x);
  if (opt.stats) {
    out.attract_stat = g.degrees_plus;
    out.repulse_stat = q.rowwise().sum();
    out.kernel_sum = s;
  }
}

void eval_tsne(const AffinityGraph& g, const Matrix& x, const Matrix& d,
               const EvalOptions& opt, Evaluation& out) {
  Matrix k = (1.0 + d.array()).inverse();
  k.diagonal().setZero();
  const double s = k.sum();
  if (!(s > 0.0))
    throw EvaluationError("tsne: kernel sum is zero");
  const Matrix a = g.w_plus.cwiseProduct(k);
  const Matrix b = k.cwiseProduct(k);
  out.value.attract =
      g.w_plus.cwiseProduct(d.unaryExpr([](double v) { return std::log1p(v); })).sum();
  out.value.repulse = std::log(s);
  if (opt.gradient) out.gradient = scaled_laplacian_times(a - b / s, x);
  if (opt.stats) {
    out.attract_stat = a.rowwise().sum();
    out.repulse_stat = b.rowwise().sum();
    out.kernel_sum = s;
  }
}

void eval_umap(const Method& m, const AffinityGraph& g, const Matrix& x, const Matrix& d,
               const EvalOptions& opt, Evaluation& out) {
  const double a = m.umap_a, b = m.umap_b;
  if (!(a > 0.0) || !(b > 0.0))
    throw ValidationError("umap kernel constants a, b must be positive");
  const Index n = d.rows();
  Matrix c;
  if (opt.gradient) c = Matrix::Zero(n, n);
  double attract = 0.0, repulse = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double w = g.w_plus(i, j);
      const double u = d(i, j);
      const double ub = a * std::pow(u, b);
      attract += 2.0 * w * std::log1p(ub);
      const double uc = std::max(u, kUmapDistFloor);
      const double ubc = a * std::pow(uc, b);
      // log(1 - 1/(1+t)) = log(t) - log(1+t)
      repulse += 2.0 * (w - 1.0) * (std::log(ubc) - std::log1p(ubc));
      if (opt.gradient) {
        double cij = w * a * b * std::pow(std::max(u, kUmapPowFloor), b - 1.0) / (1.0 + ub);
        if (u > kUmapDistFloor) cij += (w - 1.0) * (b / u) / (1.0 + ub);
        c(i, j) = cij;
        c(j, i) = cij;
      }
    }
  }
  out.value.attract = attract;
  out.value.repulse = repulse;
  if (opt.gradient) out.gradient = scaled_laplacian_times(c, x);
}

}  // namespace

Evaluation evaluate(const Method& method, const AffinityGraph& graph,
                    const Embedding& embedding, const EvalOptions& options) {
  validate(embedding);
  if (embedding.n() != graph.n())
    throw ValidationError("embedding and affinity graph disagree on point count");

  const Matrix& x = embedding.coords;
  const Matrix d = pairwise_sqdist(x);

  Evaluation out;
  switch (method.tag) {
    case MethodTag::EE: eval_ee(graph, x, d, options, out); break;
    case MethodTag::SNE: eval_sne(graph, x, d, options, out); break;
    case MethodTag::TSNE: eval_tsne(graph, x, d, options, out); break;
    case MethodTag::UMAP: eval_umap(method, graph, x, d, options, out); break;
  }
  out.value.total = out.value.attract + out.value.repulse;
  if (!std::isfinite(out.value.total))
    throw EvaluationError(to_string(method.tag) + ": objective is non-finite");
  if (options.gradient && !out.gradient.allFinite())
    throw EvaluationError(to_string(method.tag) + ": gradient is non-finite");
  return out;
}

ObjectiveValue objective(const Method& method, const AffinityGraph& graph,
                         const Embedding& embedding) {
  return evaluate(method, graph, embedding).value;
}

Matrix gradient(const Method& method, const AffinityGraph& graph,
                const Embedding& embedding) {
  EvalOptions opt;
  opt.gradient = true;
  return evaluate(method, graph, embedding, opt).gradient;
}

Vector repulsion_degrees(const Method& method, const AffinityGraph& graph,
                         const Embedding& embedding) {
  if (method.tag == MethodTag::UMAP)
    throw ValidationError("umap has no closed-form repulsion degrees");
  EvalOptions opt;
  opt.stats = true;
  return evaluate(method, graph, embedding, opt).repulse_stat;
}

}  // namespace pembed
