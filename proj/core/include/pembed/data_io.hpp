#pragma once

#include "pembed/types.hpp"

#include <cstdint>

namespace pembed {

// Delimited numeric text, one point per row; when has_labels is set the last
// column is parsed as an integer label. Parse failures carry 1-based row
// numbers.
Dataset load_delimited(const std::string& path, char delimiter = ',',
                       bool has_labels = false);
void save_dataset(const std::string& path, const Dataset& data, char delimiter = ',');

Embedding load_embedding(const std::string& path, char delimiter = ',');
void save_embedding(const std::string& path, const Embedding& embedding,
                    char delimiter = ',');

// Reports and traces are line-delimited records: one JSON object per line
// (exactly N lines for a report, one line per iteration for a trace).
// Warnings are not serialized.
void save_report(const std::string& path, const PressureReport& report);
PressureReport load_report(const std::string& path);

void save_trace(const std::string& path, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> load_trace(const std::string& path);

// (t cos t, h, t sin t) with t ~ U[1.5 pi, 4.5 pi], h ~ U[0, 20], plus
// Gaussian noise of the given scale; labels quantize t into 12 bins.
Dataset generate_swissroll(int n, double noise, std::uint64_t seed);

// n_objects circles of `points_per_ring` points in 3-D, randomly oriented,
// centers on a lattice of pitch `separation`; labels by ring.
Dataset generate_rings(int n_objects, int points_per_ring, double radius,
                       double separation, std::uint64_t seed);

// Isotropic Gaussian blobs around lattice centers; labels by cluster.
Dataset generate_clusters(int n_clusters, int per_cluster, int dim, double spread,
                          double separation, std::uint64_t seed);

// SVG scatter of a 2-D embedding: marker radius affine in pressure (when a
// report is given), fill color by label (when labels are given).
void render_scatter(const std::string& path, const Embedding& embedding,
                    const PressureReport* report = nullptr,
                    const std::vector<int>* labels = nullptr);

// SVG convergence curves: objective and pressured fraction per iteration,
// with circle markers where the mu value changes.
void render_trace(const std::string& path, const std::vector<TraceRecord>& trace);

}  // namespace pembed
