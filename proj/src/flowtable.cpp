#include "ivnsim/flowtable.hpp"

#include <algorithm>

namespace ivnsim {

std::string Action::str() const {
  switch (type) {
    case Type::Output: return "output:" + port;
    case Type::Group: return "group:" + std::to_string(group_id);
    case Type::Flood: return "flood";
    case Type::Drop: return "drop";
  }
  return "?";
}

std::string Match::str() const {
  std::string s;
  if (in_port) s += "in_port=" + *in_port;
  if (dst_addr) {
    if (!s.empty()) s += ",";
    s += "dst=" + *dst_addr;
  }
  return s.empty() ? "any" : s;
}

void FlowTable::install(FlowEntry entry) {
  for (auto& e : entries_) {
    if (e.priority == entry.priority && e.match == entry.match) {
      e.action = entry.action;
      return;
    }
  }
  // Insert after existing entries of the same priority, keeping install order
  // stable within a priority level.
  auto pos = std::find_if(entries_.begin(), entries_.end(),
                          [&](const FlowEntry& e) { return e.priority < entry.priority; });
  entries_.insert(pos, std::move(entry));
}

std::optional<Action> FlowTable::lookup(const std::string& in_port, const EthFrame& frame) const {
  for (const auto& e : entries_) {
    if (e.match.matches(in_port, frame)) return e.action;
  }
  return std::nullopt;
}

const Bucket* resolve_group(const GroupEntry& group,
                            const std::function<bool(const std::string&)>& port_live) {
  for (const auto& b : group.buckets) {
    if (port_live(b.watch_port)) return &b;
  }
  return nullptr;
}

}  // namespace ivnsim
