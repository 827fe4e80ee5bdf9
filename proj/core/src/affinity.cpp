#include "pembed/affinity.hpp"

#include <cmath>
#include <string>

namespace pembed {
namespace {

constexpr int kCalibrationMaxIter = 200;
constexpr double kPerplexityTol = 1e-5;

// Entropy (nats) and row of p_{j|i} for precision beta, skipping entry i.
// Shifted by the row minimum so the largest exponent is 0.
double row_entropy(const Vector& d, Index i, double beta, Vector* out_p) {
  const Index n = d.size();
  double dmin = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j)
    if (j != i) dmin = std::min(dmin, d[j]);
  double sum = 0.0, weighted = 0.0;
  Vector p = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const double pj = std::exp(-beta * (d[j] - dmin));
    p[j] = pj;
    sum += pj;
    weighted += pj * (d[j] - dmin);
  }
  if (sum <= 0.0)
    throw CalibrationError("perplexity calibration: all neighbor weights underflowed for point " +
                           std::to_string(i));
  // H = beta * E[d] + log Z, invariant to the dmin shift.
  const double entropy = beta * weighted / sum + std::log(sum);
  if (out_p != nullptr) *out_p = p / sum;
  return entropy;
}

}  // namespace

void validate(const AffinityConfig& config) {
  if (config.mode == AffinityConfig::Mode::FixedSigma) {
    if (!(config.sigma > 0.0) || !std::isfinite(config.sigma))
      throw ValidationError("sigma must be positive and finite");
  } else {
    if (!(config.perplexity > 1.0) || !std::isfinite(config.perplexity))
      throw ValidationError("perplexity must be greater than 1");
  }
  if (config.lambda < 0.0 || !std::isfinite(config.lambda))
    throw ValidationError("lambda must be nonnegative and finite");
}

Matrix calibrated_row_probabilities(const Matrix& sqdist, double perplexity) {
  const Index n = sqdist.rows();
  if (sqdist.cols() != n || n < 2)
    throw ValidationError("calibrated_row_probabilities: need a square matrix of at least 2 points");
  if (!(perplexity > 1.0) || perplexity > static_cast<double>(n - 1))
    throw ValidationError("perplexity must lie in (1, N-1]; got " + format_double(perplexity) +
                          " for N = " + std::to_string(n));
  const double target = std::log(perplexity);

  Matrix p(n, n);
  for (Index i = 0; i < n; ++i) {
    const Vector d = sqdist.row(i);
    int evals = 0;
    double beta = 1.0;
    double h = row_entropy(d, i, beta, nullptr);
    ++evals;

    // Bracket the target: entropy decreases monotonically in beta. The
    // tolerance is measured in perplexity units, exp(h) vs perplexity.
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    while (std::abs(std::exp(h) - perplexity) > kPerplexityTol && evals < kCalibrationMaxIter) {
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = (lo == 0.0) ? beta * 0.5 : 0.5 * (beta + lo);
      }
      h = row_entropy(d, i, beta, nullptr);
      ++evals;
    }
    if (std::abs(std::exp(h) - perplexity) > kPerplexityTol)
      throw CalibrationError("perplexity calibration did not converge for point " +
                             std::to_string(i) + " (perplexity residual " +
                             format_double(std::abs(std::exp(h) - perplexity)) + ")");
    Vector row;
    row_entropy(d, i, beta, &row);
    p.row(i) = row;
  }
  return p;
}

AffinityGraph build_affinities(const Dataset& data, const AffinityConfig& config) {
  validate(data);
  validate(config);
  const Index n = data.n();
  if (n < 2) throw ValidationError("need at least 2 points to build affinities");

  const Matrix sqdist = pairwise_sqdist(data.points);

  AffinityGraph graph;
  graph.lambda = config.lambda;

  if (config.mode == AffinityConfig::Mode::FixedSigma) {
    const double inv = 1.0 / (2.0 * config.sigma * config.sigma);
    graph.w_plus = (-inv * sqdist).array().exp();
  } else {
    const Matrix p = calibrated_row_probabilities(sqdist, config.perplexity);
    graph.w_plus = (p + p.transpose()) / (2.0 * static_cast<double>(n));
  }
  graph.w_plus.diagonal().setZero();

  if (config.repulsion == AffinityConfig::Repulsion::SqDist) {
    graph.w_minus = sqdist;
  } else {
    graph.w_minus = Matrix::Ones(n, n);
  }
  graph.w_minus.diagonal().setZero();

  graph.degrees_plus = graph.w_plus.rowwise().sum();
  validate(graph);
  return graph;
}

}  // namespace pembed
