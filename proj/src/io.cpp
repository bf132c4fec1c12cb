#include "redraw/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

namespace redraw {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json metric_json(const Metric& m) {
  Json j = optional_number(m.value);
  return j;
}

std::string metric_field(const Metric& m) { return m.value ? format_double(*m.value) : std::string(); }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& rows) {
  if (!rows.is_array()) throw ValidationError("matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ValidationError("matrix row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void to_json(Json& j, const NetworkSpec& spec) {
  j = Json{{"n", spec.size()}, {"edge_count", spec.edge_count()}, {"weights", matrix_json(spec.weights())}};
}

void from_json(const Json& j, NetworkSpec& spec) {
  Matrix w = matrix_from_json(j.at("weights"));
  if (j.contains("n") && j.at("n").get<std::size_t>() != static_cast<std::size_t>(w.rows())) {
    throw ValidationError("field n disagrees with the weight matrix size");
  }
  spec = NetworkSpec(std::move(w));
}

void to_json(Json& j, const SimConfig& c) {
  j = Json{{"natural_frequencies", c.natural_frequencies},
           {"initial_phases", c.initial_phases},
           {"coupling", c.coupling},
           {"base_phase_shift", c.base_phase_shift},
           {"duration", c.duration},
           {"time_step", c.time_step},
           {"rng_seed", c.rng_seed}};
}

void from_json(const Json& j, SimConfig& c) {
  c = SimConfig{};
  c.natural_frequencies = j.value("natural_frequencies", std::vector<double>{});
  c.initial_phases = j.value("initial_phases", std::vector<double>{});
  c.coupling = j.value("coupling", c.coupling);
  c.base_phase_shift = j.value("base_phase_shift", c.base_phase_shift);
  c.duration = j.value("duration", c.duration);
  c.time_step = j.value("time_step", c.time_step);
  c.rng_seed = j.value("rng_seed", c.rng_seed);
}

void to_json(Json& j, const ReconstructionParams& p) {
  j = Json{{"dpi_threshold", p.dpi_threshold},
           {"cut_threshold", p.cut_threshold},
           {"window_boundaries", p.window_boundaries}};
}

void from_json(const Json& j, ReconstructionParams& p) {
  p = ReconstructionParams{};
  p.dpi_threshold = j.value("dpi_threshold", p.dpi_threshold);
  p.cut_threshold = j.value("cut_threshold", p.cut_threshold);
  p.window_boundaries = j.value("window_boundaries", std::vector<double>{});
}

void to_json(Json& j, const LockCriterion& c) { j = Json{{"chi", c.chi}, {"settle_time", c.settle_time}}; }

void from_json(const Json& j, LockCriterion& c) {
  c = LockCriterion{};
  c.chi = j.value("chi", c.chi);
  c.settle_time = j.value("settle_time", c.settle_time);
}

void to_json(Json& j, const LockReport& r) {
  j = Json{{"mean", r.mean},
           {"stddev", r.stddev},
           {"coefficient_of_variation", optional_number(r.coefficient_of_variation)},
           {"chi", r.chi},
           {"settle_time", r.settle_time},
           {"locked", r.locked}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  if (!r.order_magnitude.empty()) {
    double lo = r.order_magnitude.front();
    double hi = lo;
    for (double v : r.order_magnitude) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    j["order_magnitude_min"] = lo;
    j["order_magnitude_max"] = hi;
    j["order_magnitude_final"] = r.order_magnitude.back();
  }
}

void to_json(Json& j, const ConfusionCounts& c) {
  j = Json{{"true_positive", c.true_positive},
           {"false_positive", c.false_positive},
           {"true_negative", c.true_negative},
           {"false_negative", c.false_negative},
           {"total", c.total}};
}

void to_json(Json& j, const MetricsReport& r) {
  j = Json{{"ppv", metric_json(r.ppv)}, {"acc", metric_json(r.acc)}, {"tpr", metric_json(r.tpr)}, {"fpr", metric_json(r.fpr)}};
  Json reasons = Json::object();
  const std::pair<const char*, const Metric*> named[] = {{"ppv", &r.ppv}, {"acc", &r.acc}, {"tpr", &r.tpr}, {"fpr", &r.fpr}};
  for (const auto& [name, metric] : named) {
    if (!metric->present()) reasons[name] = metric->absent_reason;
  }
  if (!reasons.empty()) j["absent"] = reasons;
}

void to_json(Json& j, const InfluenceMatrix& m) {
  j = Json{{"stage", std::string(to_string(m.stage))}, {"n", m.size()}, {"values", matrix_json(m.values)}};
}

void from_json(const Json& j, InfluenceMatrix& m) {
  m.values = matrix_from_json(j.at("values"));
  m.stage = stage_from_string(j.value("stage", std::string("raw")));
}

NetworkSpec network_from_json_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed network JSON: ") + e.what());
  }
  return validate_network(j.get<NetworkSpec>());
}

NetworkSpec load_network(const std::filesystem::path& path) { return network_from_json_text(read_text(path)); }

std::string format_trace_csv(const PhaseTrace& trace) {
  std::string out = "t";
  for (std::size_t i = 0; i < trace.node_count(); ++i) out += ",theta_" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t m = 0; m < trace.sample_count(); ++m) {
    out += format_double(trace.times[m]);
    for (Eigen::Index i = 0; i < trace.phases.cols(); ++i) {
      out += ',';
      out += format_double(trace.phases(static_cast<Eigen::Index>(m), i));
    }
    out += '\n';
  }
  return out;
}

PhaseTrace parse_trace_csv(std::string_view text, int experiment_index) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ValidationError("empty trace file");
  const auto header = split(lines.front(), ',');
  if (header.size() < 2 || trim(header[0]) != "t") {
    throw ValidationError("trace header must be t,theta_1,...,theta_n");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (trim(header[i]) != "theta_" + std::to_string(i)) {
      throw ValidationError("unexpected trace column '" + std::string(header[i]) + "'");
    }
  }
  const std::size_t n = header.size() - 1;
  PhaseTrace trace;
  trace.experiment_index = experiment_index;
  trace.phases.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(n));
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split(lines[row], ',');
    if (fields.size() != n + 1) {
      throw ValidationError("trace row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(n + 1));
    }
    trace.times.push_back(parse_double(fields[0]));
    for (std::size_t i = 0; i < n; ++i) {
      trace.phases(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(i)) = parse_double(fields[i + 1]);
    }
  }
  validate_trace(trace);
  return trace;
}

PhaseTrace load_trace(const std::filesystem::path& path, int experiment_index) {
  return parse_trace_csv(read_text(path), experiment_index);
}

std::string format_order_parameter_csv(const PhaseTrace& trace, const LockReport& report) {
  std::string out = "t,r,psi\n";
  for (std::size_t m = 0; m < trace.sample_count() && m < report.order_phase.size(); ++m) {
    out += format_double(trace.times[m]) + ',' + format_double(report.order_magnitude[m]) + ',' +
           format_double(report.order_phase[m]) + '\n';
  }
  return out;
}

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix parse_matrix_csv(std::string_view text) {
  const auto lines = lines_of(text);
  const auto n = static_cast<Eigen::Index>(lines.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto fields = split(lines[static_cast<std::size_t>(i)], ',');
    if (static_cast<Eigen::Index>(fields.size()) != n) {
      throw ValidationError("matrix row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                            " entries, expected " + std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
  }
  return m;
}

std::string format_influence_dot(const InfluenceMatrix& m, std::string_view name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  os << "  // stage: " << to_string(m.stage) << "; edge j -> i carries rho_ij\n";
  for (std::size_t i = 0; i < m.size(); ++i) os << "  " << i + 1 << ";\n";
  os << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i != j && m(i, j) > 0.0) os << "  " << j + 1 << " -> " << i + 1 << " [label=\"" << m(i, j) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string format_network_dot(const NetworkSpec& spec, std::string_view name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  os << "  // edge j -> i carries a_ij\n";
  for (std::size_t i = 0; i < spec.size(); ++i) os << "  " << i + 1 << ";\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = 0; j < spec.size(); ++j) {
      if (spec.has_edge(i, j)) {
        os << "  " << j + 1 << " -> " << i + 1 << " [label=\"" << format_double(spec.weight(i, j)) << "\"];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

std::string format_metrics_csv(const MetricsReport& r) {
  return "ppv,acc,tpr,fpr\n" + metric_field(r.ppv) + ',' + metric_field(r.acc) + ',' + metric_field(r.tpr) + ',' +
         metric_field(r.fpr) + '\n';
}

std::string format_calibration_csv(const CalibrationMap& map) {
  std::string out = "nu,mu,ppv,acc,tpr,fpr,satisfied,admissible\n";
  auto field = [](const AveragedMetric& m) { return m.mean ? format_double(*m.mean) : std::string(); };
  for (const auto& c : map.cells) {
    out += format_double(c.point.nu) + ',' + format_double(c.point.mu) + ',' + field(c.ppv) + ',' + field(c.acc) +
           ',' + field(c.tpr) + ',' + field(c.fpr) + ',' + std::to_string(c.satisfied) + ',' +
           (c.admissible ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace redraw
