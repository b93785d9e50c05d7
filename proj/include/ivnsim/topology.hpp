#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ivnsim/config.hpp"
#include "ivnsim/time.hpp"

namespace ivnsim {

// Configuration/validation failure; `where` is the offending path inside the
// topology document (e.g. "$.links[2].b").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& msg)
      : std::runtime_error(where + ": " + msg), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class NodeKind { Ecu, Switch };

struct Node {
  std::string id;
  NodeKind kind{NodeKind::Ecu};
};

struct PortRef {
  std::string node;
  std::string port;

  bool operator==(const PortRef&) const = default;
  auto operator<=>(const PortRef&) const = default;
  std::string str() const { return node + "." + port; }
};

struct Link {
  std::string id;
  PortRef a;
  PortRef b;
  SimTime delay{microseconds(1)};

  const PortRef& other(const std::string& node) const { return a.node == node ? b : a; }
};

// Shared broadcast medium for the legacy baseline.
struct Segment {
  std::string id;
  std::int64_t bitrate_bps{kDefaultBusBitrate};
  std::vector<std::string> attached;
  // Partition applied when the segment is severed: [side-a nodes, side-b nodes].
  std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> sever_sides;
};

// Dumb repeater between two segments: re-broadcasts every frame transmitted
// by others, with no duplicate suppression.
struct Bridge {
  std::string id;
  std::string seg_a;
  std::string seg_b;
};

struct FlowSpec {
  std::string src;
  std::string dst;
  SimTime period{milliseconds(50)};
  std::uint32_t can_id{0};
  SimTime start{0};

  std::string name() const { return src + "->" + dst; }
};

struct FailureSpec {
  std::string target;  // link id (switched mode) or segment id (bus mode)
  SimTime at{0};
};

enum class RunMode { Sdivn, Livn };

struct Document {
  std::string source;  // file name or label, used in error messages
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<Segment> segments;
  std::vector<Bridge> bridges;
  std::vector<FlowSpec> flows;
  SimTime duration{seconds(60)};
  std::vector<FailureSpec> failures;
  TimingConfig timing;
  ReliabilityConfig reliability;

  RunMode natural_mode() const { return segments.empty() ? RunMode::Sdivn : RunMode::Livn; }
};

// Validated structural view of a switched-network document: indexes, port
// ownership, ECU attachments.
class Topology {
 public:
  explicit Topology(const Document& doc);

  const Document& doc() const { return *doc_; }

  const Node& node(const std::string& id) const;
  bool has_node(const std::string& id) const { return node_index_.count(id) > 0; }
  const Link& link(const std::string& id) const;
  bool has_link(const std::string& id) const { return link_index_.count(id) > 0; }

  // Ports a node owns (derived from link endpoints), sorted by name.
  std::vector<std::string> ports_of(const std::string& node) const;

  // Link touching node.port (every port belongs to exactly one link).
  const Link& link_at(const PortRef& port) const;

  // The single link attaching an ECU, and the switch port on its far side.
  const Link& attachment(const std::string& ecu) const;
  PortRef attachment_switch_port(const std::string& ecu) const;

  std::vector<std::string> switch_ids() const;
  std::vector<std::string> ecu_ids() const;

  // Switches with at least one attached ECU.
  std::vector<std::string> edge_switch_ids() const;

  // Links joining two switches (the reroutable backbone).
  std::vector<const Link*> backbone_links() const;

 private:
  const Document* doc_;
  std::map<std::string, std::size_t> node_index_;
  std::map<std::string, std::size_t> link_index_;
  std::map<PortRef, std::size_t> port_to_link_;
};

// Parses and validates a topology document. Errors carry the offending
// JSON path.
Document load_document_from_text(const std::string& text, const std::string& source);
Document load_document_from_file(const std::string& path);

// Sum of propagation delays over a connected chain of links (empty chain
// sums to zero). Throws ConfigError if the ids do not form a chain.
SimTime path_propagation_delay(const Topology& topo, std::span<const std::string> link_ids);

}  // namespace ivnsim
