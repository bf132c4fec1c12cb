#include "oracles.hpp"

#include "redraw/benchmark.hpp"
#include "redraw/reconstruct.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace redraw;

namespace {

PhaseTrace two_node_trace(const std::function<double(double)>& theta_i, const std::function<double(double)>& theta_j,
                          double duration = 1.0, double dt = 0.01) {
  PhaseTrace t;
  const auto steps = static_cast<int>(std::llround(duration / dt));
  t.phases = Matrix::Zero(steps + 1, 2);
  for (int m = 0; m <= steps; ++m) {
    const double time = m * dt;
    t.times.push_back(time);
    t.phases(m, 0) = theta_i(time);
    t.phases(m, 1) = theta_j(time);
  }
  return t;
}

InfluenceMatrix raw(Matrix values) { return InfluenceMatrix{std::move(values), Stage::raw}; }

Matrix permute(const Matrix& m, const std::vector<int>& p) {
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(p[i], p[j]) = m(i, j);
  }
  return out;
}

const ExperimentBatch& fig2c_batch() {
  static const ExperimentBatch batch = [] {
    const BenchmarkCase c = preset_case("fig2c");
    return run_batch(build(c.recipe), c.sim, 50, 1);
  }();
  return batch;
}

}  // namespace

TEST_CASE("relative phase of identical and offset signals") {
  const auto same = relative_phase(two_node_trace([](double t) { return 1.3 * t; }, [](double t) { return 1.3 * t; }), 0, 1);
  for (double d : same) CHECK(d == 0.0);
  const auto lag =
      relative_phase(two_node_trace([](double t) { return t - kPi / 2; }, [](double t) { return t; }), 0, 1);
  for (double d : lag) CHECK(d == doctest::Approx(-kPi / 2));
}

TEST_CASE("wrapping") {
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(0.0) == 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int s = 0; s < 1000; ++s) {
    const double x = u(rng);
    CHECK(std::abs(wrap_angle(x) - oracle::wrap(x)) < 1e-12);
  }
}

TEST_CASE("zeta values") {
  CHECK(zeta(0.0) == 1.0);
  CHECK(zeta(-kPi) == doctest::Approx(0.0));
  CHECK(zeta(0.3) == 0.0);
  CHECK(zeta(-kPi / 2) == doctest::Approx(0.5));
}

TEST_CASE("zeta is bounded, one-sided and continuous") {
  double previous = zeta(-kPi);
  for (int s = 1; s <= 10000; ++s) {
    const double x = -kPi + kPi * s / 10000.0;
    const double z = zeta(x);
    CHECK((z >= 0.0 && z <= 1.0));
    CHECK(std::abs(z - previous) < 1e-3);
    previous = z;
    if (x < 0.0) CHECK(zeta(-x) == 0.0);
  }
}

TEST_CASE("attention is antisymmetric") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int s = 0; s < 2000; ++s) {
    const double d = wrap_angle(u(rng));
    if (d == 0.0) continue;
    CHECK(zeta(d) * zeta(wrap_angle(-d)) == 0.0);
  }
  CHECK(zeta(0.0) * zeta(-0.0) == 1.0);
}

TEST_CASE("time average of constant offsets") {
  const PhaseTrace zero = two_node_trace([](double t) { return 2 * t; }, [](double t) { return 2 * t; });
  CHECK(time_average(zero, 0, 1) == doctest::Approx(1.0));
  const PhaseTrace half = two_node_trace([](double t) { return t - kPi / 2; }, [](double t) { return t; });
  CHECK(time_average(half, 0, 1) == doctest::Approx(0.5));
  CHECK(time_average(half, 1, 0) == 0.0);
}

TEST_CASE("sawtooth relative phase averages to a quarter") {
  // One full sweep of the relative phase per unit time.
  for (double dt : {0.01, 0.001, 0.0001}) {
    const PhaseTrace saw = two_node_trace([](double t) { return 2 * kPi * t; }, [](double) { return 0.0; }, 1.0, dt);
    const double got = time_average(saw, 0, 1);
    // Dense Riemann sum of the attention over one period.
    long double riemann = 0.0L;
    const int cells = 1000000;
    for (int s = 0; s < cells; ++s) riemann += oracle::zeta(oracle::wrap(-kPi + 2 * kPi * (s + 0.5) / cells));
    const double expected = static_cast<double>(riemann / cells);
    CHECK(expected == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(std::abs(got - expected) < 2 * dt);
  }
}

TEST_CASE("time average matches the trapezoid oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    PhaseTrace t;
    const int samples = 20 + trial;
    t.phases = Matrix(samples, 3);
    for (int m = 0; m < samples; ++m) {
      t.times.push_back(m * 0.01);
      for (int i = 0; i < 3; ++i) t.phases(m, i) = (m == 0 ? 0.0 : t.phases(m - 1, i)) + u(rng) * 0.3;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const double want = oracle::time_average(t.times, t.phases, i, j, 0, samples - 1);
        CHECK(std::abs(time_average(t, i, j) - want) < 1e-9);
        const SampleRange r{3, static_cast<std::size_t>(samples - 5)};
        CHECK(std::abs(time_average(t, i, j, r) - oracle::time_average(t.times, t.phases, i, j, r.first, r.last)) <
              1e-9);
      }
    }
  }
}

TEST_CASE("experiment averaging") {
  std::mt19937_64 rng(3);
  const Matrix a = oracle::random_influence(rng, 4);
  const Matrix b = oracle::random_influence(rng, 4);
  const std::vector<Matrix> one{a};
  CHECK(experiment_average(one).values == a);
  const std::vector<Matrix> two{a, b};
  const InfluenceMatrix avg = experiment_average(two);
  CHECK(avg.stage == Stage::raw);
  CHECK((avg.values - (a + b) / 2).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dpi removes the weakest edge of a triplet") {
  Matrix m = Matrix::Zero(3, 3);
  // w = 0, y = 1, z = 2
  m(2, 0) = 0.3;  // rho_zw
  m(1, 0) = 0.6;  // rho_yw
  m(2, 1) = 0.7;  // rho_zy
  const InfluenceMatrix out = dpi_filter(raw(m), 0.9);
  CHECK(out.stage == Stage::post_dpi);
  CHECK(out(2, 0) == 0.0);
  CHECK(out(1, 0) == 0.6);
  CHECK(out(2, 1) == 0.7);
  // Above nu the weakest edge survives.
  CHECK(dpi_filter(raw(m), 0.3)(2, 0) == 0.3);
}

TEST_CASE("dpi with nu = 0 removes nothing") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_influence(rng, 6);
    CHECK(dpi_filter(raw(m), 0.0).values == m);
  }
}

TEST_CASE("dpi matches the exhaustive triplet oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 5;
    const Matrix m = oracle::random_influence(rng, n, 0.2 + 0.1 * (trial % 4));
    const double nu = u(rng);
    const Matrix want = oracle::dpi(m, nu);
    CHECK(dpi_filter(raw(m), nu).values == want);
    CHECK(dpi_filter(raw(m), dpi_candidates(raw(m)), nu).values == want);
  }
}

TEST_CASE("dpi is independent of the node enumeration order") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6;
    const Matrix m = oracle::random_influence(rng, n);
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(dpi_filter(raw(permute(m, p)), 0.8).values == permute(dpi_filter(raw(m), 0.8).values, p));
  }
}

TEST_CASE("threshold cut") {
  std::mt19937_64 rng(21);
  const Matrix m = oracle::random_influence(rng, 5);
  CHECK(threshold_cut(raw(m), 0.0).values == m);
  Matrix flat = Matrix::Constant(4, 4, 0.4);
  flat.diagonal().setZero();
  CHECK(threshold_cut(raw(flat), 0.5).values.isZero());
  Matrix tie = Matrix::Zero(2, 2);
  tie(0, 1) = 0.8;
  tie(1, 0) = 0.79;
  const InfluenceMatrix cut = threshold_cut(raw(tie), 0.8);
  CHECK(cut.stage == Stage::post_threshold);
  CHECK(cut(0, 1) == 0.8);
  CHECK(cut(1, 0) == 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix r = oracle::random_influence(rng, 5);
    CHECK(threshold_cut(raw(r), 0.37).values == oracle::cut(r, 0.37));
  }
}

TEST_CASE("filters are idempotent, non-increasing and nested") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = oracle::random_influence(rng, 6);
    const double nu = u(rng);
    const double mu = nu * u(rng);
    const InfluenceMatrix d = dpi_filter(raw(m), nu);
    const InfluenceMatrix c = threshold_cut(d, mu);
    CHECK(dpi_filter(d, nu).values == d.values);
    CHECK(threshold_cut(c, mu).values == c.values);
    CHECK((d.values.array() <= m.array()).all());
    CHECK((c.values.array() <= d.values.array()).all());
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (c.values(i, j) > 0) CHECK(d.values(i, j) > 0);
        if (d.values(i, j) > 0) CHECK(m(i, j) > 0);
      }
    }
    CHECK(filter(raw(m), nu, mu).values == c.values);
  }
}

TEST_CASE("relabeling nodes permutes the reconstruction") {
  const NetworkSpec spec = build(preset("fig2c"));
  std::vector<int> p = {2, 0, 3, 1};
  const NetworkSpec permuted(permute(spec.weights(), p));
  const ExperimentBatch a = run_batch(spec, SimConfig{}, 3, 6);
  // Same experiments with the per-node draws relabeled too.
  PipelineResult expected;
  std::vector<PhaseTrace> traces;
  for (std::size_t k = 0; k < a.size(); ++k) {
    SimConfig cfg = a.configs[k];
    for (int i = 0; i < 4; ++i) {
      cfg.natural_frequencies[p[i]] = a.configs[k].natural_frequencies[i];
      cfg.initial_phases[p[i]] = a.configs[k].initial_phases[i];
    }
    traces.push_back(simulate(permuted, cfg, static_cast<int>(k + 1)));
  }
  const ReconstructionParams params{0.9, 0.5, {}};
  const PipelineResult base = run_pipeline(a.traces, {}, params);
  const PipelineResult perm = run_pipeline(traces, {}, params);
  CHECK((perm.raw.values - permute(base.raw.values, p)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(perm.post_threshold.values.cwiseAbs().cwiseSign() ==
        permute(base.post_threshold.values, p).cwiseAbs().cwiseSign());
}

TEST_CASE("fig2b chain orders its influences by weight") {
  const BenchmarkRow row = run_case(preset_case("fig2b"), 1);
  const Matrix& r = row.result.raw.values;
  CHECK(r(2, 3) < r(1, 2));
  CHECK(r(1, 2) < r(0, 1));
}

TEST_CASE("fig2 topologies are recovered exactly") {
  for (const char* name : {"fig2a", "fig2b", "fig2c"}) {
    const BenchmarkRow row = run_case(preset_case(name), 2);
    CHECK_MESSAGE(row.counts.false_positive == 0, name);
    CHECK_MESSAGE(row.counts.false_negative == 0, name);
  }
}

TEST_CASE("uncoupled oscillators leave nothing after the cut") {
  const ExperimentBatch batch = run_batch(NetworkSpec::isolated(5), SimConfig{}, 10, 3);
  for (double mu : {0.6, 0.7, 0.8}) {
    const InfluenceMatrix m = reconstruct(batch, ReconstructionParams{0.9, mu, {}}, UnlockedPolicy::warn_and_include);
    CHECK(m.edge_count() == 0);
  }
  const InfluenceMatrix avg = experiment_average(batch, UnlockedPolicy::warn_and_include);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i != j) CHECK(std::abs(avg.values(i, j) - 0.25) < 0.1);
    }
  }
}

TEST_CASE("unlocked experiments are rejected unless included with a warning") {
  // Drifting oscillators still score c_v near 0.1 on the unwrapped phase, so a
  // tight bound is needed to flag them.
  const ExperimentBatch batch = run_batch(NetworkSpec::isolated(5), SimConfig{}, 2, 3, LockCriterion{0.05, 20.0});
  REQUIRE(batch.locked_count() < 2);
  CHECK_THROWS_AS(reconstruct(batch, ReconstructionParams{}), UnlockedExperimentError);
  const PipelineResult r =
      run_pipeline(batch.traces, batch.lock_reports, ReconstructionParams{}, UnlockedPolicy::warn_and_include);
  CHECK(r.warnings.size() == 2 - batch.locked_count());
}

TEST_CASE("a single full-length window equals the full reconstruction") {
  const ExperimentBatch& batch = fig2c_batch();
  const ReconstructionParams params{0.9, 0.8, {}};
  const WindowedReconstruction w = reconstruct_windowed(batch, params, 30.0);
  REQUIRE(w.size() == 1);
  CHECK(w.matrices[0].values == reconstruct(batch, params).values);
  ReconstructionParams bounded = params;
  bounded.window_boundaries = {0.0, 30.0};
  CHECK(reconstruct_windowed(batch, bounded).matrices[0].values == w.matrices[0].values);
}

TEST_CASE("star reconstruction over half-second windows") {
  const ExperimentBatch& batch = fig2c_batch();
  const WindowedReconstruction w = reconstruct_windowed(batch, ReconstructionParams{0.9, 0.8, {}}, 0.5);
  REQUIRE(w.size() == 60);
  CHECK(w.windows.front().start == 0.0);
  CHECK(w.windows.back().end == doctest::Approx(30.0));
  CHECK(w.matrices.front().edge_count() == 0);
  const Matrix& full = reconstruct(batch, ReconstructionParams{0.9, 0.8, {}}).values;
  CHECK(full(2, 0) == doctest::Approx(full(3, 0)).epsilon(0.02));
  CHECK(full(2, 0) < full(0, 1));
}

TEST_CASE("window helpers") {
  const PhaseTrace t = two_node_trace([](double s) { return s; }, [](double s) { return 0.5 * s; }, 1.0);
  const auto uniform = uniform_windows(t, 0.3);
  REQUIRE(uniform.size() == 4);
  CHECK(uniform[0].samples.first == 0);
  CHECK(uniform[0].samples.last == 30);
  CHECK(uniform[3].samples.last == 100);
  const std::vector<double> b = {0.0, 0.25, 1.0};
  const auto bounded = boundary_windows(t, b);
  REQUIRE(bounded.size() == 2);
  CHECK(bounded[1].samples.first == 25);
  CHECK_THROWS_AS(uniform_windows(t, 0.001), ValidationError);
  const std::vector<double> outside = {0.0, 2.0};
  CHECK_THROWS_AS(boundary_windows(t, outside), ValidationError);
}
