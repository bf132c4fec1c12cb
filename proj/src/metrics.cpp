#include "redraw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace redraw {

namespace {

Metric ratio(std::size_t numerator, std::size_t denominator, const char* reason) {
  if (denominator == 0) return {std::nullopt, reason};
  return {100.0 * static_cast<double>(numerator) / static_cast<double>(denominator), {}};
}

}  // namespace

ConfusionCounts confusion(const NetworkSpec& truth, const InfluenceMatrix& inferred) {
  const std::size_t n = truth.size();
  if (inferred.size() != n || static_cast<std::size_t>(inferred.values.cols()) != n) {
    throw ValidationError("dimension mismatch: truth has " + std::to_string(n) + " nodes, inferred matrix has " +
                          std::to_string(inferred.values.rows()));
  }
  ConfusionCounts c;
  c.total = n * (n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool predicted = inferred(i, j) > 0.0;
      const bool actual = truth.weight(i, j) > 0.0;
      if (predicted && actual) ++c.true_positive;
      else if (predicted) ++c.false_positive;
      else if (actual) ++c.false_negative;
      else ++c.true_negative;
    }
  }
  return c;
}

MetricsReport report(const ConfusionCounts& c) {
  if (c.true_positive + c.false_positive + c.true_negative + c.false_negative != c.total) {
    throw ValidationError("confusion counts do not sum to the number of possible links");
  }
  MetricsReport r;
  r.ppv = ratio(c.true_positive, c.true_positive + c.false_positive, "no inferred links (TP + FP = 0)");
  r.acc = ratio(c.true_positive + c.true_negative, c.total, "no possible links (n < 2)");
  r.tpr = ratio(c.true_positive, c.true_positive + c.false_negative, "no true links (TP + FN = 0)");
  r.fpr = ratio(c.false_positive, c.false_positive + c.true_negative, "no absent links (FP + TN = 0)");
  return r;
}

Matrix undirected_laplacian(const NetworkSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  Matrix lap = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (spec.weight(ui, uj) > 0.0 || spec.weight(uj, ui) > 0.0) {
        lap(i, j) = lap(j, i) = -1.0;
        lap(i, i) += 1.0;
        lap(j, j) += 1.0;
      }
    }
  }
  return lap;
}

Eigen::VectorXd jacobi_eigenvalues(const Matrix& symmetric, double tolerance, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols()) throw ValidationError("matrix must be square");
  Matrix a = symmetric;
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.norm());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= tolerance * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle chosen so that the (p, q) entry vanishes.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Eigen::VectorXd eig = a.diagonal();
  std::sort(eig.begin(), eig.end());
  return eig;
}

double algebraic_connectivity(const NetworkSpec& spec) {
  if (spec.size() < 2) throw ValidationError("algebraic connectivity needs at least 2 nodes");
  const Eigen::VectorXd eig = jacobi_eigenvalues(undirected_laplacian(spec));
  return eig(1);
}

bool is_weakly_connected(const NetworkSpec& spec) {
  const std::size_t n = spec.size();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (seen[v] || !(spec.weight(u, v) > 0.0 || spec.weight(v, u) > 0.0)) continue;
      seen[v] = true;
      ++reached;
      frontier.push(v);
    }
  }
  return reached == n;
}

}  // namespace redraw
