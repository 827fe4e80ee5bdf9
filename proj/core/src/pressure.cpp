#include "pembed/pressure.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <string>

namespace pembed {
namespace {

constexpr double kUmapDistFloor = 1e-16;
constexpr double kCurvatureStep = 1e-4;  // FD step for the UMAP curvature test
constexpr double kSearchZMax = 10.0;     // search range for numeric slice minima
constexpr int kFallbackGridPoints = 2001;

// Golden-section minimum of a unimodal f on [lo, hi] to interval width tol.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-8) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Coarse grid on [0, zmax] then golden refinement around the best cell.
// Returns the minimizing z (0 if no interior improvement over f(0)).
double grid_then_golden(const std::function<double(double)>& f, double zmax, int npts) {
  const double h = zmax / (npts - 1);
  double best_z = 0.0, best_f = f(0.0);
  for (int j = 1; j < npts; ++j) {
    const double z = j * h;
    const double fz = f(z);
    if (fz < best_f) {
      best_f = fz;
      best_z = z;
    }
  }
  if (best_z == 0.0) return 0.0;
  const double lo = std::max(0.0, best_z - h);
  const double hi = std::min(zmax, best_z + h);
  const double zg = golden_min(f, lo, hi);
  return f(zg) < best_f ? zg : best_z;
}

void finalize_report(PressureReport& report) {
  const Index n = report.pressure.size();
  report.pressured_set.clear();
  for (Index k = 0; k < n; ++k) {
    if (!std::isfinite(report.pressure[k]) || report.pressure[k] < 0.0)
      throw EvaluationError("pressure value for point " + std::to_string(k) +
                            " is invalid");
    if (report.pressure[k] > 0.0) report.pressured_set.push_back(k);
  }
  report.fraction =
      n == 0 ? 0.0 : static_cast<double>(report.pressured_set.size()) / static_cast<double>(n);
}

Evaluation stats_eval(const Method& method, const AffinityGraph& graph,
                      const Embedding& embedding) {
  EvalOptions opt;
  opt.stats = true;
  return evaluate(method, graph, embedding, opt);
}

// UMAP slice curvature at z = 0, exploiting evenness: f''(0) ~ 2(f(h)-f(0))/h^2.
double umap_curvature(const SliceEvaluator& slice, Index k) {
  const double h = kCurvatureStep;
  return 2.0 * (slice(k, h) - slice.base_value()) / (h * h);
}

}  // namespace

SliceEvaluator::SliceEvaluator(const Method& method, const AffinityGraph& graph,
                               const Embedding& embedding)
    : method_(method), graph_(&graph) {
  validate(embedding);
  if (embedding.n() != graph.n())
    throw ValidationError("embedding and affinity graph disagree on point count");
  dist_ = pairwise_sqdist(embedding.coords);

  Evaluation ev = stats_eval(method, graph, embedding);
  base_ = ev.value.total;
  kernel_sum_ = ev.kernel_sum;
  if (method.tag != MethodTag::UMAP) repulse_deg_ = ev.repulse_stat;
}

double SliceEvaluator::operator()(Index k, double z) const {
  const Index n = dist_.rows();
  if (k < 0 || k >= n) throw ValidationError("slice point index out of range");
  if (!std::isfinite(z)) throw ValidationError("slice offset must be finite");
  const double z2 = z * z;
  if (z2 == 0.0) return base_;

  switch (method_.tag) {
    case MethodTag::EE: {
      // Moving point k off-plane displaces every d_ik^2 by z^2:
      // delta = 2 z^2 d+_k + 2 d~-_k (exp(-z^2) - 1).
      return base_ + 2.0 * z2 * graph_->degrees_plus[k] +
             2.0 * repulse_deg_[k] * std::expm1(-z2);
    }
    case MethodTag::SNE: {
      const double ds = 2.0 * repulse_deg_[k] * std::expm1(-z2);
      return base_ + 2.0 * z2 * graph_->degrees_plus[k] + std::log1p(ds / kernel_sum_);
    }
    case MethodTag::TSNE: {
      double datt = 0.0, dsum = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (i == k) continue;
        const double kk = 1.0 + dist_(k, i);
        datt += graph_->w_plus(k, i) * std::log1p(z2 / kk);
        dsum += -z2 / (kk * (kk + z2));
      }
      return base_ + 2.0 * datt + std::log1p(2.0 * dsum / kernel_sum_);
    }
    case MethodTag::UMAP: {
      const double a = method_.umap_a, b = method_.umap_b;
      double delta = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (i == k) continue;
        const double w = graph_->w_plus(k, i);
        const double t0 = dist_(k, i);
        // attractive: log(1 + a (t0+z^2)^b) - log(1 + a t0^b)
        const double t0b = std::pow(t0, b);
        const double dtb =
            t0 <= 0.0 ? std::pow(z2, b) : t0b * std::expm1(b * std::log1p(z2 / t0));
        delta += 2.0 * w * std::log1p(a * dtb / (1.0 + a * t0b));
        // repulsive: [log(a t^b) - log(1 + a t^b)] between the clamped args
        const double t0c = std::max(t0, kUmapDistFloor);
        const double t1c = std::max(t0 + z2, kUmapDistFloor);
        const double rel = (t1c - t0c) / t0c;
        const double t0cb = std::pow(t0c, b);
        const double dtcb = t0cb * std::expm1(b * std::log1p(rel));
        delta += 2.0 * (w - 1.0) *
                 (b * std::log1p(rel) - std::log1p(a * dtcb / (1.0 + a * t0cb)));
      }
      return base_ + delta;
    }
  }
  throw ValidationError("unknown method tag");
}

double objective_slice(const Method& method, const AffinityGraph& graph,
                       const Embedding& embedding, Index k, double z) {
  return SliceEvaluator(method, graph, embedding)(k, z);
}

PressureReport pressure_ee(const AffinityGraph& graph, const Embedding& embedding) {
  const Evaluation ev = stats_eval(Method{MethodTag::EE}, graph, embedding);
  const Index n = embedding.n();
  PressureReport report;
  report.method = MethodTag::EE;
  report.pressure = Vector::Zero(n);
  for (Index k = 0; k < n; ++k) {
    const double dp = ev.attract_stat[k];
    const double rd = ev.repulse_stat[k];
    if (dp <= 0.0) {
      report.warnings.push_back("point " + std::to_string(k) +
                                " has zero attraction degree; reported non-pressured");
      continue;
    }
    if (rd > dp) report.pressure[k] = std::sqrt(std::log(rd / dp));
  }
  finalize_report(report);
  return report;
}

PressureReport pressure_sne(const AffinityGraph& graph, const Embedding& embedding) {
  const Evaluation ev = stats_eval(Method{MethodTag::SNE}, graph, embedding);
  const Index n = embedding.n();
  const double s = ev.kernel_sum;
  PressureReport report;
  report.method = MethodTag::SNE;
  report.pressure = Vector::Zero(n);
  std::unique_ptr<SliceEvaluator> slice;  // built lazily, degenerate rows only
  for (Index k = 0; k < n; ++k) {
    const double dp = ev.attract_stat[k];
    const double rd = ev.repulse_stat[k];
    // z = 0 is a local max iff d+_k * S < d~-_k.
    if (!(dp * s < rd)) continue;
    const double num = rd * (1.0 - 2.0 * dp);
    const double den = dp * (s - 2.0 * rd);
    if (den > 0.0 && num > den) {
      report.pressure[k] = std::sqrt(std::log(num / den));
    } else {
      // Closed form degenerate (e.g. zero attraction degree or a point
      // holding more than half the kernel mass): search the slice directly.
      if (slice == nullptr)
        slice = std::make_unique<SliceEvaluator>(Method{MethodTag::SNE}, graph, embedding);
      const double z = grid_then_golden([&](double t) { return (*slice)(k, t); },
                                        kSearchZMax, kFallbackGridPoints);
      report.pressure[k] = z;
      report.warnings.push_back("closed-form pressure degenerate for point " +
                                std::to_string(k) + "; used grid search");
    }
  }
  finalize_report(report);
  return report;
}

PressureReport pressure_tsne(const AffinityGraph& graph, const Embedding& embedding,
                             const NewtonConfig& newton) {
  if (!(newton.init > 0.0) || newton.max_iter < 1 || !(newton.tol > 0.0))
    throw ValidationError("invalid Newton configuration");
  const Evaluation ev = stats_eval(Method{MethodTag::TSNE}, graph, embedding);
  const Index n = embedding.n();
  const double s0 = ev.kernel_sum;
  const Matrix d = pairwise_sqdist(embedding.coords);
  Matrix kmat = (1.0 + d.array()).inverse();
  kmat.diagonal().setZero();
  const Vector krow = kmat.rowwise().sum();

  PressureReport report;
  report.method = MethodTag::TSNE;
  report.pressure = Vector::Zero(n);
  std::unique_ptr<SliceEvaluator> slice_storage;

  for (Index k = 0; k < n; ++k) {
    // Curvature test at z = 0: sum_i w_ik K_ik - sum_i K_ik^2 / S >= 0 means
    // non-pressured. Below zero the slice derivative is 4 z g(z) with
    // g(z) = A(z) - B(z) / S(z); g(0) < 0 and g has a unique positive root.
    if (ev.attract_stat[k] - ev.repulse_stat[k] / s0 >= 0.0) continue;

    const auto g_and_slope = [&](double z, double* slope) {
      const double z2 = z * z;
      double av = 0.0, bv = 0.0, sv = s0 - 2.0 * krow[k];
      double ap = 0.0, bp = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (i == k) continue;
        const double kk = 1.0 + d(k, i);
        const double inv = 1.0 / (kk + z2);
        const double inv2 = inv * inv;
        av += graph.w_plus(k, i) * inv;
        bv += inv2;
        sv += 2.0 * inv;
        if (slope != nullptr) {
          ap += graph.w_plus(k, i) * inv2;
          bp += inv2 * inv;
        }
      }
      const double gz = av - bv / sv;
      if (slope != nullptr) {
        const double apz = -2.0 * z * ap;
        const double bpz = -4.0 * z * bp;
        const double spz = -4.0 * z * bv;
        *slope = apz - (bpz * sv - bv * spz) / (sv * sv);
      }
      return gz;
    };

    // Bracket the root of g: g(0) < 0, expand hi until g(hi) > 0.
    double lo = 0.0, hi = std::max(1.0, 2.0 * newton.init);
    bool bracketed = false;
    for (int tries = 0; tries < 12; ++tries) {
      if (g_and_slope(hi, nullptr) > 0.0) {
        bracketed = true;
        break;
      }
      lo = hi;
      hi = std::min(2.0 * hi, 50.0);
      if (lo == hi) break;
    }

    bool converged = false;
    double z = std::min(std::max(newton.init, 1e-12), hi);
    if (bracketed) {
      for (int it = 0; it < newton.max_iter; ++it) {
        double slope = 0.0;
        const double gz = g_and_slope(z, &slope);
        // Require one Newton update before accepting |dE/dz| <= tol, so a
        // tiny initial z cannot terminate the search far from the root.
        if (it > 0 && std::abs(4.0 * z * gz) <= newton.tol) {
          converged = true;
          break;
        }
        if (gz < 0.0) lo = z; else hi = z;
        double z_next = (slope != 0.0) ? z - gz / slope : 0.5 * (lo + hi);
        if (!(z_next > lo) || !(z_next < hi)) z_next = 0.5 * (lo + hi);
        z = z_next;
      }
    }

    if (converged) {
      report.pressure[k] = z;
    } else {
      if (slice_storage == nullptr)
        slice_storage =
            std::make_unique<SliceEvaluator>(Method{MethodTag::TSNE}, graph, embedding);
      report.pressure[k] = grid_then_golden(
          [&](double t) { return (*slice_storage)(k, t); }, kSearchZMax,
          kFallbackGridPoints);
      report.warnings.push_back("Newton search did not converge for point " +
                                std::to_string(k) + "; used grid search");
    }
  }
  finalize_report(report);
  return report;
}

PressureReport pressure_umap(const Method& method, const AffinityGraph& graph,
                             const Embedding& embedding) {
  if (method.tag != MethodTag::UMAP)
    throw ValidationError("pressure_umap requires the umap method");
  const SliceEvaluator slice(method, graph, embedding);
  const Index n = embedding.n();
  PressureReport report;
  report.method = MethodTag::UMAP;
  report.pressure = Vector::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if (umap_curvature(slice, k) >= 0.0) continue;
    const double z =
        golden_min([&](double t) { return slice(k, t); }, 0.0, kSearchZMax);
    report.pressure[k] = z;
    if (z > kSearchZMax - 1e-2)
      report.warnings.push_back("slice minimum for point " + std::to_string(k) +
                                " hit the search boundary");
  }
  finalize_report(report);
  return report;
}

PressureReport compute_pressure(const Method& method, const AffinityGraph& graph,
                                const Embedding& embedding, const NewtonConfig& newton) {
  switch (method.tag) {
    case MethodTag::EE: return pressure_ee(graph, embedding);
    case MethodTag::SNE: return pressure_sne(graph, embedding);
    case MethodTag::TSNE: return pressure_tsne(graph, embedding, newton);
    case MethodTag::UMAP: return pressure_umap(method, graph, embedding);
  }
  throw ValidationError("unknown method tag");
}

std::vector<bool> classify_pressured(MethodTag tag, const Vector& attract_stat,
                                     const Vector& repulse_stat, double kernel_sum) {
  const Index n = attract_stat.size();
  if (repulse_stat.size() != n)
    throw ValidationError("classify_pressured: statistic sizes disagree");
  std::vector<bool> out(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k) {
    switch (tag) {
      case MethodTag::EE:
        out[k] = repulse_stat[k] > attract_stat[k] && attract_stat[k] > 0.0;
        break;
      case MethodTag::SNE:
        out[k] = attract_stat[k] * kernel_sum < repulse_stat[k];
        break;
      case MethodTag::TSNE:
        out[k] = attract_stat[k] - repulse_stat[k] / kernel_sum < 0.0;
        break;
      case MethodTag::UMAP:
        throw ValidationError("no closed-form classification for umap");
    }
  }
  return out;
}

double pressured_fraction(const Method& method, const AffinityGraph& graph,
                          const Embedding& embedding) {
  if (method.tag == MethodTag::UMAP) {
    const SliceEvaluator slice(method, graph, embedding);
    Index count = 0;
    for (Index k = 0; k < slice.n(); ++k)
      if (umap_curvature(slice, k) < 0.0) ++count;
    return static_cast<double>(count) / static_cast<double>(slice.n());
  }
  const Evaluation ev = stats_eval(method, graph, embedding);
  const std::vector<bool> flags =
      classify_pressured(method.tag, ev.attract_stat, ev.repulse_stat, ev.kernel_sum);
  Index count = 0;
  for (bool f : flags) count += f ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

}  // namespace pembed
