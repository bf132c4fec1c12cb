#include "redraw/topologies.hpp"

#include "redraw/calibrate.hpp"
#include "redraw/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace redraw {

namespace {

constexpr std::size_t kBlockSize = 4;
constexpr std::size_t kBlocks = 4;
constexpr std::size_t kHubNode = kBlocks * kBlockSize + 1;  // 17

void set_edge(Matrix& w, std::size_t source, std::size_t target, double weight) {
  if (source == 0 || target == 0 || source > static_cast<std::size_t>(w.rows()) ||
      target > static_cast<std::size_t>(w.rows())) {
    throw ValidationError("edge " + std::to_string(source) + " -> " + std::to_string(target) +
                          " references a node outside 1.." + std::to_string(w.rows()));
  }
  if (source == target) throw ValidationError("self-loop at node " + std::to_string(source));
  if (!(weight >= 0.0)) throw ValidationError("negative weight on edge " + std::to_string(source) + " -> " + std::to_string(target));
  w(static_cast<Eigen::Index>(target - 1), static_cast<Eigen::Index>(source - 1)) = weight;
}

Matrix zeros(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  return Matrix::Zero(size, size);
}

// Block-local feed-forward edges, every k -> l with k < l.
void add_block(Matrix& w, std::size_t offset, double weight) {
  for (std::size_t k = 1; k <= kBlockSize; ++k) {
    for (std::size_t l = k + 1; l <= kBlockSize; ++l) set_edge(w, offset + k, offset + l, weight);
  }
}

// Last node of every block.
std::vector<std::size_t> gateway_nodes() {
  std::vector<std::size_t> nodes;
  for (std::size_t b = 0; b < kBlocks; ++b) nodes.push_back(b * kBlockSize + kBlockSize);
  return nodes;
}

std::vector<std::size_t> all_block_nodes() {
  std::vector<std::size_t> nodes;
  for (std::size_t v = 1; v < kHubNode; ++v) nodes.push_back(v);
  return nodes;
}

std::size_t parse_label(std::string_view field, std::size_t line_no) {
  std::size_t value = 0;
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end || value == 0) {
    throw ValidationError("line " + std::to_string(line_no) + ": unknown node label '" + std::string(field) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::chain: return "chain";
    case TopologyKind::star: return "star";
    case TopologyKind::fig2d_block: return "fig2d_block";
    case TopologyKind::geometric_hub: return "geometric_hub";
    case TopologyKind::ravasz_barabasi: return "ravasz_barabasi";
    case TopologyKind::regular_ring: return "regular_ring";
    case TopologyKind::rewired_ring: return "rewired_ring";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
    case TopologyKind::from_file: return "from_file";
  }
  return "chain";
}

TopologyKind topology_kind_from_string(std::string_view text) {
  std::string key(text);
  std::replace(key.begin(), key.end(), '-', '_');
  for (auto kind : {TopologyKind::chain, TopologyKind::star, TopologyKind::fig2d_block, TopologyKind::geometric_hub,
                    TopologyKind::ravasz_barabasi, TopologyKind::regular_ring, TopologyKind::rewired_ring,
                    TopologyKind::erdos_renyi, TopologyKind::from_file}) {
    if (key == to_string(kind)) return kind;
  }
  if (key == "er") return TopologyKind::erdos_renyi;
  if (key == "file") return TopologyKind::from_file;
  throw ValidationError("unknown topology kind '" + std::string(text) + "'");
}

NetworkSpec chain(const std::vector<double>& weights, bool reversed) {
  if (weights.empty()) throw ValidationError("chain needs at least one link");
  Matrix w = zeros(weights.size() + 1);
  for (std::size_t k = 1; k <= weights.size(); ++k) {
    if (reversed) set_edge(w, k + 1, k, weights[k - 1]);
    else set_edge(w, k, k + 1, weights[k - 1]);
  }
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec star(const std::vector<double>& weights, bool reversed_first) {
  if (weights.empty()) throw ValidationError("star needs at least one spoke");
  Matrix w = zeros(weights.size() + 1);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (k == 0 && reversed_first) set_edge(w, 2, 1, weights[k]);
    else set_edge(w, 1, k + 2, weights[k]);
  }
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec fig2d_block(double weight) {
  Matrix w = zeros(kBlockSize);
  add_block(w, 0, weight);
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec hub_graph(double block_weight, double hub_weight, const std::vector<std::size_t>& hub_sources,
                      const std::vector<std::size_t>& hub_targets) {
  Matrix w = zeros(kHubNode);
  for (std::size_t b = 0; b < kBlocks; ++b) add_block(w, b * kBlockSize, block_weight);
  for (std::size_t s : hub_sources) set_edge(w, s, kHubNode, hub_weight);
  for (std::size_t t : hub_targets) set_edge(w, kHubNode, t, hub_weight);
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec regular_ring(std::size_t n, double near_weight, double far_weight) {
  if (n < 3) throw ValidationError("ring needs at least 3 nodes");
  Matrix w = zeros(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t prev = (i + n - 2) % n + 1;
    const std::size_t prev2 = (i + n - 3) % n + 1;
    set_edge(w, prev, i, near_weight);
    set_edge(w, prev2, i, far_weight);
  }
  return validate_network(NetworkSpec(std::move(w)));
}

std::vector<Link> default_rewired_links(std::size_t n, double weight) {
  // Every fourth node receives a link from five positions back: 19 -> 4, 3 -> 8, ...
  std::vector<Link> links;
  for (std::size_t target = 4; target <= n; target += 4) {
    const std::size_t source = (target + n - 6) % n + 1;
    links.push_back({source, target, weight});
  }
  return links;
}

NetworkSpec rewired_ring(std::size_t n, double near_weight, double far_weight, const std::vector<Link>& extra) {
  Matrix w = regular_ring(n, near_weight, far_weight).weights();
  for (const Link& link : extra) {
    if (link.source >= 1 && link.target >= 1 && link.source <= n && link.target <= n &&
        w(static_cast<Eigen::Index>(link.target - 1), static_cast<Eigen::Index>(link.source - 1)) > 0.0) {
      throw ValidationError("rewired link " + std::to_string(link.source) + " -> " + std::to_string(link.target) +
                            " duplicates a ring edge");
    }
    set_edge(w, link.source, link.target, link.weight);
  }
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec build(const TopologyRecipe& r) {
  switch (r.kind) {
    case TopologyKind::chain: {
      if (!r.weights.empty()) return chain(r.weights, r.reversed);
      if (r.n < 2) throw ValidationError("chain needs n >= 2");
      return chain(std::vector<double>(r.n - 1, 1.0), r.reversed);
    }
    case TopologyKind::star: {
      if (!r.weights.empty()) return star(r.weights, r.reversed);
      if (r.n < 2) throw ValidationError("star needs n >= 2");
      return star(std::vector<double>(r.n - 1, 1.0), r.reversed);
    }
    case TopologyKind::fig2d_block:
      return fig2d_block(r.block_weight);
    case TopologyKind::geometric_hub:
      return hub_graph(r.block_weight, r.hub_weight, r.hub_sources.value_or(std::vector<std::size_t>{}),
                       r.hub_targets.value_or(gateway_nodes()));
    case TopologyKind::ravasz_barabasi:
      return hub_graph(r.block_weight, r.hub_weight, r.hub_sources.value_or(all_block_nodes()),
                       r.hub_targets.value_or(std::vector<std::size_t>{}));
    case TopologyKind::regular_ring:
      return regular_ring(r.n, r.near_weight, r.far_weight);
    case TopologyKind::rewired_ring:
      return rewired_ring(r.n, r.near_weight, r.far_weight,
                          r.rewired.empty() ? default_rewired_links(r.n, r.rewire_weight) : r.rewired);
    case TopologyKind::erdos_renyi:
      if (r.n < 2) throw ValidationError("random graph needs n >= 2");
      return validate_network(erdos_renyi_directed(r.n, r.p, r.seed));
    case TopologyKind::from_file:
      return ingest_edge_list(r.path, r.nodes);
  }
  throw ValidationError("unknown topology kind");
}

TopologyRecipe preset(std::string_view name) {
  TopologyRecipe r;
  if (name == "fig2a") {
    r.kind = TopologyKind::chain;
    r.weights = {1.0, 1.0, 1.0};
  } else if (name == "fig2b") {
    // a_12 > a_23 > a_34: the chain runs 4 -> 3 -> 2 -> 1.
    r.kind = TopologyKind::chain;
    r.weights = {2.0, 1.5, 1.25};
    r.reversed = true;
  } else if (name == "fig2c") {
    // a_12 > a_31 = a_41: node 2 drives node 1, which drives 3 and 4.
    r.kind = TopologyKind::star;
    r.weights = {2.0, 1.25, 1.25};
    r.reversed = true;
  } else if (name == "fig2d") {
    // Skip links (1 -> 3 etc.) sit on feed-forward triangles and only survive
    // the DPI when their correlation reaches nu, which needs a strong block.
    r.kind = TopologyKind::fig2d_block;
    r.block_weight = 4.0;
  } else if (name == "geometric") {
    r.kind = TopologyKind::geometric_hub;
    r.n = kHubNode;
    r.block_weight = 2.0;
    r.hub_weight = 4.0;
  } else if (name == "ravasz-barabasi") {
    r.kind = TopologyKind::ravasz_barabasi;
    r.n = kHubNode;
    r.block_weight = 2.0;
    r.hub_weight = 4.0;
  } else if (name == "regular-ring") {
    r.kind = TopologyKind::regular_ring;
    r.n = 20;
    r.near_weight = 2.0;
    r.far_weight = 0.5;
  } else if (name == "rewired-ring") {
    // The long links have to dominate the ring input of their targets before
    // those targets stop driving their successors.
    r.kind = TopologyKind::rewired_ring;
    r.n = 20;
    r.near_weight = 2.5;
    r.far_weight = 1.0;
    r.rewire_weight = 8.0;
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  return r;
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig2c", "fig2d", "geometric", "ravasz-barabasi", "regular-ring", "rewired-ring"};
}

NetworkSpec parse_edge_list(std::string_view text, std::optional<std::size_t> nodes) {
  struct Row {
    std::size_t source, target;
    double weight;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::optional<std::size_t> declared = nodes;
  bool first_content = true;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (body.starts_with("nodes=") && !nodes) declared = parse_label(trim(body.substr(6)), line_no);
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t fs = 0;
    while (true) {
      const std::size_t comma = line.find(',', fs);
      fields.push_back(trim(line.substr(fs, comma == std::string_view::npos ? std::string_view::npos : comma - fs)));
      if (comma == std::string_view::npos) break;
      fs = comma + 1;
    }
    const bool numeric_start = !fields[0].empty() && (std::isdigit(static_cast<unsigned char>(fields[0][0])) != 0);
    if (first_content && !numeric_start) {
      first_content = false;  // header
      continue;
    }
    first_content = false;
    if (fields.size() < 2 || fields.size() > 3) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected source,target[,weight]");
    }
    Row row{parse_label(fields[0], line_no), parse_label(fields[1], line_no), 1.0, line_no};
    if (fields.size() == 3 && !fields[2].empty()) {
      try {
        row.weight = parse_double(fields[2]);
      } catch (const ValidationError&) {
        throw ValidationError("line " + std::to_string(line_no) + ": malformed weight '" + std::string(fields[2]) + "'");
      }
    }
    if (row.source == row.target) {
      throw ValidationError("line " + std::to_string(line_no) + ": self-loop at node " + std::to_string(row.source));
    }
    if (!(row.weight >= 0.0)) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative weight");
    }
    rows.push_back(row);
  }

  std::size_t n = declared.value_or(0);
  if (!declared) {
    for (const Row& row : rows) n = std::max({n, row.source, row.target});
  }
  Matrix w = zeros(n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const Row& row : rows) {
    for (std::size_t label : {row.source, row.target}) {
      if (label > n) {
        throw ValidationError("line " + std::to_string(row.line) + ": unknown node label " + std::to_string(label) +
                              " (network has " + std::to_string(n) + " nodes)");
      }
    }
    if (!seen.insert({row.source, row.target}).second) {
      throw ValidationError("line " + std::to_string(row.line) + ": duplicate edge " + std::to_string(row.source) +
                            " -> " + std::to_string(row.target));
    }
    set_edge(w, row.source, row.target, row.weight);
  }
  return validate_network(NetworkSpec(std::move(w)));
}

NetworkSpec ingest_edge_list(const std::filesystem::path& path, std::optional<std::size_t> nodes) {
  return parse_edge_list(read_text(path), nodes);
}

std::string format_edge_list(const NetworkSpec& spec) {
  std::string out = "# nodes=" + std::to_string(spec.size()) + "\nsource,target,weight\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = 0; j < spec.size(); ++j) {
      if (spec.has_edge(i, j)) {
        out += std::to_string(j + 1) + ',' + std::to_string(i + 1) + ',' + format_double(spec.weight(i, j)) + '\n';
      }
    }
  }
  return out;
}

}  // namespace redraw
