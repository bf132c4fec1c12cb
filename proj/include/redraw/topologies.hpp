#pragma once

// Ground-truth topologies of the benchmark experiments and edge-list ingestion.
//
// Labels in this header are 1-based node numbers, and weights follow the
// model convention: a_ij is the weight of the edge j -> i.

#include "redraw/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace redraw {

enum class TopologyKind {
  chain,
  star,
  fig2d_block,
  geometric_hub,
  ravasz_barabasi,
  regular_ring,
  rewired_ring,
  erdos_renyi,
  from_file,
};

std::string_view to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(std::string_view text);

/// Directed edge source -> target, 1-based.
struct Link {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 1.0;
};

struct TopologyRecipe {
  TopologyKind kind = TopologyKind::chain;
  std::size_t n = 4;

  // chain: weights[k] is the weight of the k-th link along the chain.
  //   forward:  k+1 <- k (node k+1 influenced by node k)
  //   reversed: k <- k+1
  // star: weights[k] is the weight of spoke 1 -> k+2; with `reversed` the
  //   first spoke points into the hub instead (2 -> 1).
  std::vector<double> weights;
  bool reversed = false;

  // regular_ring / rewired_ring: node i is influenced by i-1 and i-2 (mod n).
  double near_weight = 1.0;
  double far_weight = 0.5;
  // rewired_ring: extra links; empty means the default set
  // {19 -> 4, 3 -> 8, 7 -> 12, 11 -> 16, 15 -> 20}, scaled to n.
  std::vector<Link> rewired;
  double rewire_weight = 1.0;

  // geometric_hub / ravasz_barabasi: four fig2d blocks (nodes 1-16) plus hub 17.
  // Default wiring: geometric_hub drives nodes 4, 8, 12, 16; in
  // ravasz_barabasi every block node feeds the hub.
  double block_weight = 1.0;
  double hub_weight = 2.0;
  std::optional<std::vector<std::size_t>> hub_sources;  // nodes feeding the hub
  std::optional<std::vector<std::size_t>> hub_targets;  // nodes fed by the hub

  // erdos_renyi
  double p = 0.1;
  std::uint64_t seed = 0;

  // from_file
  std::filesystem::path path;
  std::optional<std::size_t> nodes;
};

NetworkSpec build(const TopologyRecipe& recipe);

/// Chain of weights.size() + 1 nodes.
NetworkSpec chain(const std::vector<double>& weights, bool reversed = false);

/// Star with hub 1 and spokes to nodes 2..weights.size()+1.
NetworkSpec star(const std::vector<double>& weights, bool reversed_first = false);

/// The 4-node feed-forward block (every k -> l with k < l, six edges).
NetworkSpec fig2d_block(double weight = 1.0);

/// Four fig2d blocks with the hub wiring given by sources/targets.
NetworkSpec hub_graph(double block_weight, double hub_weight, const std::vector<std::size_t>& hub_sources,
                      const std::vector<std::size_t>& hub_targets);

NetworkSpec regular_ring(std::size_t n, double near_weight, double far_weight);

std::vector<Link> default_rewired_links(std::size_t n, double weight);

NetworkSpec rewired_ring(std::size_t n, double near_weight, double far_weight, const std::vector<Link>& extra);

/// Recipes of the benchmark experiments: fig2a, fig2b, fig2c, fig2d,
/// geometric, ravasz-barabasi, regular-ring, rewired-ring.
TopologyRecipe preset(std::string_view name);
std::vector<std::string> preset_names();

/// Parses `source,target[,weight]` lines (weight defaults to 1). Blank lines
/// and lines starting with '#' are skipped, except a `# nodes=N` line which
/// fixes the node count. A non-numeric first line is treated as a header.
/// Without a node count, n is the largest label.
NetworkSpec parse_edge_list(std::string_view text, std::optional<std::size_t> nodes = std::nullopt);

NetworkSpec ingest_edge_list(const std::filesystem::path& path,
                             std::optional<std::size_t> nodes = std::nullopt);

/// Edge-list CSV with a `# nodes=N` line and full-precision weights, so that
/// parse_edge_list(format_edge_list(s)) == s.
std::string format_edge_list(const NetworkSpec& spec);

}  // namespace redraw
