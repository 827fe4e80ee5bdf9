#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pembed {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, duplicate-free list of point indices.
using IndexSet = std::vector<Index>;

// Input data or configuration is malformed.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An objective/gradient evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-point affinity calibration failed to converge.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read, written, or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MethodTag { EE, SNE, TSNE, UMAP };

std::string to_string(MethodTag tag);
MethodTag method_tag_from_string(const std::string& name);

// Objective selector plus the kernel shape constants used by the UMAP
// objective (ignored by the other three).
struct Method {
  MethodTag tag = MethodTag::EE;
  double umap_a = 1.0;
  double umap_b = 1.0;
};

// Guard against accidentally feeding a dense O(N^2) pipeline something huge.
inline constexpr Index kMaxPoints = 5000;

struct Dataset {
  Matrix points;            // N x D, one row per point
  std::vector<int> labels;  // empty, or one label per point

  Index n() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

void validate(const Dataset& data, Index max_points = kMaxPoints);

// Dense attraction/repulsion weights. Diagonals are identically zero; all
// pair sums elsewhere run over ordered pairs i != j.
struct AffinityGraph {
  Matrix w_plus;        // N x N, symmetric, nonnegative, zero diagonal
  Matrix w_minus;       // N x N, symmetric, nonnegative, zero diagonal
  Vector degrees_plus;  // row sums of w_plus
  double lambda = 1.0;  // repulsion weight (EE only)

  Index n() const { return w_plus.rows(); }
};

void validate(const AffinityGraph& graph);

struct Embedding {
  Matrix coords;  // N x d, one row per point

  Index n() const { return coords.rows(); }
  Index dim() const { return coords.cols(); }
};

void validate(const Embedding& embedding);

// Output of a pressured-point diagnosis: pressure[k] > 0 iff the point sits
// at a local maximum of its extra-dimension slice, and then equals the
// minimizing extra-dimension offset.
struct PressureReport {
  Vector pressure;        // N, nonnegative
  IndexSet pressured_set; // indices with pressure > 0
  double fraction = 0.0;  // |pressured_set| / N
  MethodTag method = MethodTag::EE;
  std::vector<std::string> warnings;

  Index n() const { return pressure.size(); }
  bool pressured(Index k) const { return pressure[k] > 0.0; }
};

// Embedding extended with one extra coordinate per point. z is nonzero only
// on pressured_set; mu is the current penalty weight on sum z_i^2.
struct AugmentedState {
  Embedding embedding;
  Vector z;  // N
  IndexSet pressured_set;
  double mu = 0.0;

  Index n() const { return z.size(); }
};

void validate(const AugmentedState& state);

struct TraceRecord {
  int iter = 0;
  double objective = 0.0;
  double step = 0.0;               // accepted line-search step length
  double pressured_fraction = 0.0;
  double mu = 0.0;                 // 0 for plain minimization
};

struct OptimRun {
  std::vector<TraceRecord> trace;
  Embedding final_embedding;
  double final_objective = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Squared Euclidean distances between rows. Symmetric, nonnegative, zero
// diagonal; computed via one Gram matrix product.
Matrix pairwise_sqdist(const Matrix& points);

// Worker threads for embarrassingly parallel driver loops, from the
// PRESSURE_EMBED_THREADS environment variable (default 1).
int worker_count();

// Shortest text round-tripping to the same double ("%.17g").
std::string format_double(double value);

bool is_sorted_unique(const IndexSet& set);

}  // namespace pembed
