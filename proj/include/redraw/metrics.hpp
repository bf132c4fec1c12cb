#pragma once

// Reconstruction quality against a ground-truth network, and graph
// diagnostics of the undirected version of a network.

#include "redraw/model.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace redraw {

struct ConfusionCounts {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;
  std::size_t total = 0;  // n(n-1)

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A percentage that may be undefined (zero denominator).
struct Metric {
  std::optional<double> value;
  std::string absent_reason;

  bool present() const { return value.has_value(); }
};

struct MetricsReport {
  Metric ppv;  // 100 TP / (TP + FP)
  Metric acc;  // 100 (TP + TN) / TOT
  Metric tpr;  // 100 TP / (TP + FN)
  Metric fpr;  // 100 FP / (FP + TN)
};

/// Classifies each off-diagonal entry: positive when inferred > 0, true when
/// the ground truth agrees on the presence of the edge.
ConfusionCounts confusion(const NetworkSpec& truth, const InfluenceMatrix& inferred);

MetricsReport report(const ConfusionCounts& counts);

/// Combinatorial Laplacian D - A of the undirected, unweighted version of the
/// network ({i, j} is an edge when a_ij > 0 or a_ji > 0).
Matrix undirected_laplacian(const NetworkSpec& spec);

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
Eigen::VectorXd jacobi_eigenvalues(const Matrix& symmetric, double tolerance = 1e-12,
                                   int max_sweeps = 100);

/// Second-smallest eigenvalue of undirected_laplacian(spec).
double algebraic_connectivity(const NetworkSpec& spec);

/// True when the undirected version of the network is connected.
bool is_weakly_connected(const NetworkSpec& spec);

}  // namespace redraw
