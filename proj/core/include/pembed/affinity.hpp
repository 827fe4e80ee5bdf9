#pragma once

#include "pembed/types.hpp"

namespace pembed {

struct AffinityConfig {
  enum class Mode { FixedSigma, Perplexity };
  enum class Repulsion { SqDist, Uniform };

  Mode mode = Mode::Perplexity;
  double sigma = 1.0;        // FixedSigma: w+_ij = exp(-d_ij^2 / (2 sigma^2))
  double perplexity = 30.0;  // Perplexity: per-point Gaussian bandwidth search
  Repulsion repulsion = Repulsion::SqDist;  // w-_ij = d_ij^2, or all-ones
  double lambda = 1.0;
};

void validate(const AffinityConfig& config);

// Row-stochastic conditional probabilities p_{j|i} with per-row Gaussian
// precision chosen by bisection so that exp(entropy of row i) equals
// `perplexity` to within 1e-5 (diagnostics guarantee 1e-4). sqdist is a
// pairwise squared-distance matrix in the input space.
Matrix calibrated_row_probabilities(const Matrix& sqdist, double perplexity);

// Dense attraction/repulsion weights from input-space distances. Perplexity
// mode symmetrizes the calibrated conditionals: W+ = (P + P^T) / (2N).
AffinityGraph build_affinities(const Dataset& data, const AffinityConfig& config);

}  // namespace pembed
