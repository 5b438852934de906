#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "threadlstm/pruner.hpp"
#include "threadlstm/rng.hpp"
#include "threadlstm/thread_graph.hpp"

namespace threadlstm::fixtures {

inline CommentRecord record(std::string id, std::optional<std::string> parent, std::int64_t created,
                            std::string author = "u0", std::string text = "", std::int64_t karma = 0) {
  return {std::move(id), std::move(parent), std::move(author), created, std::move(text), karma};
}

// t1 is the post. t2, t3, t5 reply to t1; t4, t7, t8 to t2; t6 to t3; t9 to
// t5. Creation times follow the index, one minute apart.
inline std::vector<CommentRecord> nine_node_records() {
  const std::vector<std::pair<std::string, std::optional<std::string>>> links = {
      {"t1", std::nullopt}, {"t2", "t1"}, {"t3", "t1"}, {"t4", "t2"}, {"t5", "t1"},
      {"t6", "t3"},         {"t7", "t2"}, {"t8", "t2"}, {"t9", "t5"}};
  std::vector<CommentRecord> out;
  for (std::size_t k = 0; k < links.size(); ++k)
    out.push_back(record(links[k].first, links[k].second, 60 * static_cast<std::int64_t>(k), k % 3 ? "ua" : "op",
                         "comment number " + std::to_string(k + 1), static_cast<std::int64_t>(k) - 2));
  return out;
}

inline ThreadTree nine_node_tree() { return ThreadTree::build(nine_node_records()); }

inline NodeId node(const ThreadTree& tree, const std::string& id) {
  const NodeId t = tree.find(id);
  if (t == kNoNode) throw std::logic_error("fixture has no node " + id);
  return t;
}

// Flags {t5, t6, t7, t9} on the fixture.
inline std::vector<bool> nine_node_flags(const ThreadTree& tree) {
  std::vector<bool> flags(tree.size(), false);
  for (const char* id : {"t5", "t6", "t7", "t9"}) flags[node(tree, id)] = true;
  return flags;
}

// Random valid thread: each comment replies to a uniformly chosen earlier
// one, timestamps are non-decreasing with frequent ties, ids are unrelated to
// creation order and the records come shuffled.
inline std::vector<CommentRecord> random_records(Rng& rng, std::size_t n, std::int64_t max_gap = 3) {
  std::vector<std::size_t> names(n);
  for (std::size_t k = 0; k < n; ++k) names[k] = k;
  rng.shuffle(names);
  std::vector<CommentRecord> recs;
  std::int64_t clock = 1000;
  for (std::size_t k = 0; k < n; ++k) {
    std::optional<std::string> parent;
    if (k > 0) parent = "c" + std::to_string(names[rng.below(k)]);
    clock += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_gap)));
    std::string text;
    const auto words = rng.below(6);
    for (std::uint64_t w = 0; w < words; ++w) text += (w ? " " : "") + std::string(1, static_cast<char>('a' + rng.below(5)));
    recs.push_back(record("c" + std::to_string(names[k]), parent, clock, "u" + std::to_string(rng.below(4)), text,
                          static_cast<std::int64_t>(rng.below(40)) - 10));
  }
  rng.shuffle(recs);
  return recs;
}

inline ThreadTree random_tree(Rng& rng, std::size_t n, std::int64_t max_gap = 3) {
  return ThreadTree::build(random_records(rng, n, max_gap));
}

// Pointers recomputed from the records alone, keyed by comment id: children
// of each comment sorted by (created_utc, id) and linked to their neighbours.
struct OraclePointers {
  std::map<std::string, std::string> parent, first_child, predecessor, successor;
};

inline OraclePointers oracle_pointers(const std::vector<CommentRecord>& recs) {
  OraclePointers o;
  std::map<std::string, std::vector<const CommentRecord*>> kids;
  for (const auto& r : recs)
    if (r.parent_id) kids[*r.parent_id].push_back(&r);
  for (auto& [pid, list] : kids) {
    std::sort(list.begin(), list.end(), [](const CommentRecord* a, const CommentRecord* b) {
      return a->created_utc != b->created_utc ? a->created_utc < b->created_utc : a->id < b->id;
    });
    o.first_child[pid] = list.front()->id;
    for (std::size_t i = 0; i < list.size(); ++i) {
      o.parent[list[i]->id] = pid;
      if (i > 0) o.predecessor[list[i]->id] = list[i - 1]->id;
      if (i + 1 < list.size()) o.successor[list[i]->id] = list[i + 1]->id;
    }
  }
  return o;
}

// Random pruning flags; the root is never flagged.
inline std::vector<bool> random_flags(Rng& rng, std::size_t n, double p) {
  std::vector<bool> flags(n, false);
  for (std::size_t t = 1; t < n; ++t) flags[t] = rng.bernoulli(p);
  return flags;
}

} // namespace threadlstm::fixtures
