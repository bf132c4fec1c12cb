#include "redraw/io.hpp"
#include "redraw/simulator.hpp"
#include "redraw/topologies.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace redraw;

TEST_CASE("double formatting round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int s = 0; s < 2000; ++s) {
    const double x = u(rng) / (1 + s);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK_THROWS_AS(parse_double("1.5x"), ValidationError);
  CHECK_THROWS_AS(parse_double(""), ValidationError);
}

TEST_CASE("trace CSV round trip is exact") {
  const SimConfig cfg = draw_experiment_config(4, SimConfig{}, 2, 1);
  SimConfig shorter = cfg;
  shorter.duration = 1.0;
  const PhaseTrace t = simulate(build(preset("fig2a")), shorter);
  const std::string csv = format_trace_csv(t);
  CHECK(csv.rfind("t,theta_1,theta_2,theta_3,theta_4\n", 0) == 0);
  const PhaseTrace back = parse_trace_csv(csv, 3);
  CHECK(back.times == t.times);
  CHECK(back.phases == t.phases);
  CHECK(back.experiment_index == 3);
}

TEST_CASE("malformed trace CSV is rejected") {
  CHECK_THROWS_AS(parse_trace_csv("t,theta_1\n0,0\n0.1\n"), ValidationError);
  CHECK_THROWS_AS(parse_trace_csv("t,theta_1\n0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_trace_csv("t,theta_1\n0,0\n0.1,zz\n"), ValidationError);
}

TEST_CASE("matrix CSV round trip") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) m(i, j) = i == j ? 0.0 : u(rng);
  }
  CHECK(parse_matrix_csv(format_matrix_csv(m)) == m);
}

TEST_CASE("JSON round trips") {
  SimConfig cfg = draw_experiment_config(3, SimConfig{}, 4, 2);
  cfg.coupling = 7.25;
  const SimConfig back = Json(cfg).get<SimConfig>();
  CHECK(back.natural_frequencies == cfg.natural_frequencies);
  CHECK(back.initial_phases == cfg.initial_phases);
  CHECK(back.coupling == cfg.coupling);
  CHECK(back.time_step == cfg.time_step);

  ReconstructionParams p{0.7, 0.3, {0.0, 1.5, 3.0}};
  const ReconstructionParams pb = Json(p).get<ReconstructionParams>();
  CHECK(pb.dpi_threshold == 0.7);
  CHECK(pb.cut_threshold == 0.3);
  CHECK(pb.window_boundaries == p.window_boundaries);

  InfluenceMatrix m{Matrix::Zero(3, 3), Stage::post_dpi};
  m.values(0, 2) = 0.123456789012345;
  const InfluenceMatrix mb = Json(m).get<InfluenceMatrix>();
  CHECK(mb.values == m.values);
  CHECK(mb.stage == Stage::post_dpi);
}

TEST_CASE("invalid network JSON is reported") {
  CHECK_THROWS_AS(network_from_json_text("{\"weights\": [[0, -1], [0, 0]]}"), ValidationError);
  CHECK_THROWS(network_from_json_text("not json"));
}

TEST_CASE("DOT output") {
  const NetworkSpec s = build(preset("fig2c"));
  const std::string dot = format_network_dot(s);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("2 -> 1") != std::string::npos);
  InfluenceMatrix m{Matrix::Zero(2, 2), Stage::post_threshold};
  m.values(1, 0) = 0.87654;
  CHECK(format_influence_dot(m).find("0.877") != std::string::npos);
}

TEST_CASE("atomic writes create parents and replace content") {
  const auto dir = std::filesystem::temp_directory_path() / "redraw_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text_atomic(dir / "a.txt", "first");
  write_text_atomic(dir / "a.txt", "second");
  CHECK(read_text(dir / "a.txt") == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir.parent_path());
}
