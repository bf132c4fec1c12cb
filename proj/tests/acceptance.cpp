// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"

#include "redraw/benchmark.hpp"
#include "redraw/calibrate.hpp"
#include "redraw/io.hpp"
#include "redraw/reconstruct.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace redraw;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double val(const Metric& m) { return m.value.value_or(std::nan("")); }

std::string metrics_text(const MetricsReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << "PPV " << val(r.ppv) << " ACC " << val(r.acc) << " TPR "
     << val(r.tpr) << " FPR " << val(r.fpr);
  return os.str();
}

bool perfect(const MetricsReport& r) {
  return val(r.ppv) == 100.0 && val(r.acc) == 100.0 && val(r.tpr) == 100.0 && val(r.fpr) == 0.0;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support(const InfluenceMatrix& m) {
  return (m.values.array() > 0.0).matrix();
}

using Seconds = std::chrono::duration<double>;

void c1(Outcome& o) {
  for (const char* name : {"fig2a", "fig2b", "fig2c"}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const BenchmarkRow row = run_case(preset_case(name), seed);
      if (!perfect(row.metrics)) {
        o.require(false, std::string(name) + " seed " + std::to_string(seed) + ": " + metrics_text(row.metrics));
      }
    }
  }
  o.detail << "fig2a/b/c x seeds 1-5";
}

void c2(Outcome& o) {
  const Matrix& b = run_case(preset_case("fig2b"), 1).result.raw.values;
  o.detail << std::setprecision(4) << "chain rho_34 " << b(2, 3) << " rho_23 " << b(1, 2) << " rho_12 " << b(0, 1);
  o.require(b(2, 3) < b(1, 2) && b(1, 2) < b(0, 1), "chain ordering");
  const Matrix& s = run_case(preset_case("fig2c"), 1).result.raw.values;
  o.detail << "; star rho_31 " << s(2, 0) << " rho_41 " << s(3, 0) << " rho_12 " << s(0, 1);
  o.require(std::abs(s(2, 0) - s(3, 0)) < 0.02, "|rho_31 - rho_41| < 0.02");
  o.require(s(2, 0) < s(0, 1) && s(3, 0) < s(0, 1), "spokes below rho_12");
}

void c3(Outcome& o) {
  const BenchmarkCase c = preset_case("fig2c");
  const ExperimentBatch batch = run_batch(build(c.recipe), c.sim, c.experiments, 1);
  const WindowedReconstruction w = reconstruct_windowed(batch, c.params, 0.5);
  o.require(w.size() == 60, "60 windows");
  o.require(w.matrices.front().edge_count() == 0, "first window empty");
  // First window in which each entry appears.
  const std::size_t never = w.size();
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic> first =
      Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(4, 4, never);
  for (std::size_t k = 0; k < w.size(); ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (w.matrices[k].values(i, j) > 0.0 && first(i, j) == never) first(i, j) = k;
      }
    }
  }
  const std::size_t lead = first(0, 1);
  o.require(lead != never, "link 2->1 appears");
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (first(i, j) < lead) o.require(false, "another link precedes 2->1");
    }
  }
  std::size_t last_change = 0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (support(w.matrices[k]) != support(w.matrices[k - 1])) last_change = k;
  }
  const double settled_at = w.windows[last_change].start;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.windows[k].start >= 5.0 - 1e-9 && support(w.matrices[k]) != support(w.matrices.back())) {
      o.require(false, "graph changes after t = 5 s");
      break;
    }
  }
  o.detail << w.size() << " windows, 2->1 first in window " << lead + 1 << ", graph fixed from t = " << settled_at
           << " s";
}

void c4(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const BenchmarkRow row = run_case(preset_case("regular-ring"), 1);
  const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
  const MetricsReport& r = row.metrics;
  o.detail << metrics_text(r) << ", " << std::setprecision(3) << secs << " s";
  o.require(val(r.ppv) >= 97 && val(r.acc) >= 97 && val(r.tpr) >= 94 && val(r.fpr) <= 1, "metric gates");
  o.require(secs < 300, "runtime < 5 min");
}

void c5(Outcome& o) {
  const BenchmarkRow row = run_case(preset_case("rewired-ring"), 1);
  o.detail << metrics_text(row.metrics);
  o.require(val(row.metrics.acc) >= 88 && val(row.metrics.fpr) <= 8, "ACC >= 88, FPR <= 8");
  for (std::size_t node : {4u, 8u, 12u, 16u, 20u}) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < 20; ++i) out += row.result.post_threshold(i, node - 1) > 0.0 ? 1 : 0;
    if (out != 0) o.require(false, "node " + std::to_string(node) + " has " + std::to_string(out) + " outgoing");
  }
}

void c6(Outcome& o) {
  const BenchmarkRow row = run_case(preset_case("geometric"), 1);
  const GroupMeans g = hub_split_means(row.truth, row.result.raw, 16);
  o.detail << metrics_text(row.metrics) << std::setprecision(3) << ", mean rho intra " << g.intra << " hub "
           << g.hub;
  o.require(val(row.metrics.acc) >= 95 && val(row.metrics.fpr) <= 3, "ACC >= 95, FPR <= 3");
  o.require(g.intra > g.hub, "intra-block rho above hub-link rho");
}

void c7(Outcome& o) {
  auto run = [](std::size_t n) {
    CalibrationConfig cfg;
    cfg.n = n;
    cfg.graphs = 20;
    cfg.experiments = 5;
    const auto start = std::chrono::steady_clock::now();
    const CalibrationMap map = calibrate(cfg);
    return std::pair{map.admissible_count(), Seconds(std::chrono::steady_clock::now() - start).count()};
  };
  const auto [a5, t5] = run(5);
  const auto [a20, t20] = run(20);
  o.detail << "admissible n=5 " << a5 << " (" << std::setprecision(3) << t5 << " s), n=20 " << a20 << " (" << t20
           << " s)";
  o.require(a5 > 0, "non-empty admissible region at n=5");
  o.require(a5 > a20, "region shrinks from n=5 to n=20");
  o.require(t5 < 600, "n=5 under 10 min");
}

void c8(Outcome& o) {
  // Statistics of the locked test graphs a default calibration run draws
  // (N = 100 graphs, K = 10 experiments, c = 2.5 n); the grid is irrelevant here.
  const std::pair<std::size_t, double> table[] = {{5, 1.3}, {10, 4.3}};
  for (const auto& [n, expected] : table) {
    CalibrationConfig cfg;
    cfg.n = n;
    cfg.grid_step = 0.5;
    const CalibrationMap map = calibrate(cfg);
    double sum = 0.0, worst = 0.0;
    std::size_t unlocked = 0;
    for (const auto& g : map.graphs) {
      sum += 100.0 * g.mean_cv;
      worst = std::max(worst, 100.0 * g.mean_cv);
      unlocked += g.locked ? 0 : 1;
    }
    const double mean = sum / static_cast<double>(map.graphs.size());
    if (n != table[0].first) o.detail << "; ";
    o.detail << std::setprecision(3) << "n=" << n << " mean c_v " << mean << "% (reference " << expected
             << "%), worst graph " << worst << "%, unlocked graphs " << unlocked;
    o.require(std::abs(mean - expected) <= 3.0, "n=" + std::to_string(n) + " mean within 3 points");
    o.require(unlocked == 0, "n=" + std::to_string(n) + " every c_v <= 35%");
  }
}

void c9(Outcome& o) {
  SuiteOptions chain;
  chain.topology = "chain4";
  std::vector<MetricsReport> rows;
  for (const auto& c : suite_cases("k-sweep", chain)) rows.push_back(run_case(c, 1).metrics);
  for (const auto& r : rows) {
    o.require(val(r.ppv) == val(rows[0].ppv) && val(r.acc) == val(rows[0].acc) && val(r.tpr) == val(rows[0].tpr) &&
                  val(r.fpr) == val(rows[0].fpr),
              "chain metrics identical across K");
  }
  o.detail << "chain " << metrics_text(rows[0]);
  SuiteOptions ring;
  ring.topology = "ring";
  std::vector<MetricsReport> ring_rows;
  for (const auto& c : suite_cases("k-sweep", ring)) ring_rows.push_back(run_case(c, 1).metrics);
  double spread = 0.0;
  for (auto field : {&MetricsReport::ppv, &MetricsReport::acc, &MetricsReport::tpr, &MetricsReport::fpr}) {
    double lo = 1e9, hi = -1e9;
    for (const auto& r : ring_rows) {
      lo = std::min(lo, val(r.*field));
      hi = std::max(hi, val(r.*field));
    }
    spread = std::max(spread, hi - lo);
  }
  o.detail << "; ring max spread " << std::setprecision(3) << spread << " points";
  o.require(spread <= 2.0, "ring metrics within 2 points");
}

void c10(Outcome& o) {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    // zeta over random relative phases, wrapped first.
    for (int s = 0; s < 100; ++s) {
      const double raw = (u(rng) - 0.5) * 40.0;
      worst = std::max(worst, std::abs(zeta(wrap_angle(raw)) - oracle::zeta(oracle::wrap(raw))));
    }
    // Time average on a random-walk trace.
    PhaseTrace t;
    const int samples = 50 + trial;
    t.phases = Matrix(samples, 3);
    for (int m = 0; m < samples; ++m) {
      t.times.push_back(m * 0.01);
      for (int i = 0; i < 3; ++i) t.phases(m, i) = (m == 0 ? 0.0 : t.phases(m - 1, i)) + (u(rng) - 0.5);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i != j) {
          worst = std::max(worst, std::abs(time_average(t, i, j) -
                                           oracle::time_average(t.times, t.phases, i, j, 0, samples - 1)));
        }
      }
    }
    // DPI on a random influence matrix.
    const int n = 3 + trial % 6;
    const Matrix m = oracle::random_influence(rng, n, 0.25);
    const double nu = u(rng);
    worst = std::max(worst, (dpi_filter(InfluenceMatrix{m, Stage::raw}, nu).values - oracle::dpi(m, nu))
                                .cwiseAbs()
                                .maxCoeff());
    // Confusion counts, exact.
    const Matrix truth = oracle::random_weights(rng, n, 0.35);
    if (!(confusion(NetworkSpec(truth), InfluenceMatrix{m, Stage::post_threshold}) == oracle::confusion(truth, m))) {
      ++mismatches;
    }
  }
  o.detail << "100 instances each, max deviation " << worst << ", count mismatches " << mismatches;
  o.require(worst <= 1e-9, "floating outputs within 1e-9");
  o.require(mismatches == 0, "confusion counts exact");
}

void c11(Outcome& o) {
  std::mt19937_64 rng(11);
  const auto dir = std::filesystem::temp_directory_path() / "redraw_acceptance_files";
  std::filesystem::create_directories(dir);
  std::size_t failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 15;
    const NetworkSpec spec(oracle::random_weights(rng, n, 0.3));
    const auto path = dir / ("net_" + std::to_string(trial) + ".csv");
    write_text_atomic(path, format_edge_list(spec));
    TopologyRecipe r;
    r.kind = TopologyKind::from_file;
    r.path = path;
    const NetworkSpec back = build(r);
    const Matrix guess = oracle::random_influence(rng, n, 0.5);
    const bool same = back == spec;
    const bool counts = confusion(back, InfluenceMatrix{guess, Stage::post_threshold}) ==
                        oracle::confusion(spec.weights(), guess);
    if (!same || !counts) ++failures;
  }
  std::filesystem::remove_all(dir);
  o.detail << "100 edge-list files, " << failures << " failures";
  o.require(failures == 0, "from_file round trip and confusion oracle");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"C1 exact recovery of the 4-node chains and star", c1},
      {"C2 influence ordering by weight", c2},
      {"C3 windowed star reconstruction", c3},
      {"C4 regular ring n=20", c4},
      {"C5 rewired ring", c5},
      {"C6 geometric hub graph", c6},
      {"C7 desk-scale calibration", c7},
      {"C8 phase-locking statistics on random graphs", c8},
      {"C9 stability in K", c9},
      {"C10 oracle equivalence", c10},
      {"C11 edge-list ingestion", c11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << " (" << std::fixed
              << std::setprecision(1) << secs << " s)" << std::defaultfloat << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
