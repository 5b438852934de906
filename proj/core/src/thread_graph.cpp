#include "threadlstm/thread_graph.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"

namespace threadlstm {

ThreadTree ThreadTree::build(std::vector<CommentRecord> records) {
  using Kind = ThreadError::Kind;
  const std::size_t n = records.size();

  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(n);
  std::size_t root = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!by_id.emplace(records[i].id, i).second)
      throw ThreadError(Kind::DuplicateId, records[i].id, "duplicate comment id '" + records[i].id + "'");
    if (!records[i].parent_id) {
      if (root != n)
        throw ThreadError(Kind::MultipleRoots, records[i].id,
                          "multiple roots: '" + records[root].id + "' and '" + records[i].id + "'");
      root = i;
    }
  }
  if (root == n) throw ThreadError(Kind::MissingRoot, "", "thread has no root record (parent_id null)");

  std::vector<std::size_t> raw_parent(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == root) continue;
    const auto& pid = *records[i].parent_id;
    auto it = by_id.find(pid);
    if (it == by_id.end())
      throw ThreadError(Kind::DanglingParent, pid,
                        "comment '" + records[i].id + "' refers to unknown parent '" + pid + "'");
    raw_parent[i] = it->second;
  }

  // Depth by walking up with memoization; a walk longer than n means a cycle.
  constexpr std::size_t kUnknown = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> raw_depth(n, kUnknown);
  raw_depth[root] = 0;
  std::vector<std::size_t> path;
  for (std::size_t i = 0; i < n; ++i) {
    path.clear();
    std::size_t cur = i;
    while (raw_depth[cur] == kUnknown) {
      path.push_back(cur);
      if (path.size() > n)
        throw ThreadError(Kind::Cycle, records[i].id, "reply cycle through comment '" + records[i].id + "'");
      cur = raw_parent[cur];
    }
    std::size_t d = raw_depth[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) raw_depth[*it] = ++d;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (i == root) continue;
    const auto& parent = records[raw_parent[i]];
    if (records[i].created_utc < parent.created_utc)
      throw ThreadError(Kind::TimeOrder, records[i].id,
                        "comment '" + records[i].id + "' is older than its parent '" + parent.id + "'");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(records[a].created_utc, raw_depth[a], records[a].id) <
           std::tie(records[b].created_utc, raw_depth[b], records[b].id);
  });
  std::vector<NodeId> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;

  ThreadTree tree;
  tree.records_.reserve(n);
  tree.parent_.assign(n, kNoNode);
  tree.first_child_.assign(n, kNoNode);
  tree.predecessor_.assign(n, kNoNode);
  tree.successor_.assign(n, kNoNode);
  tree.children_.assign(n, {});
  tree.depth_.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    tree.records_.push_back(std::move(records[src]));
    tree.depth_[k] = raw_depth[src];
    if (src != root) {
      const NodeId p = position[raw_parent[src]];
      tree.parent_[k] = p;
      tree.children_[p].push_back(k);  // k increases, so children stay chronological
    }
  }
  for (NodeId t = 0; t < n; ++t) {
    const auto& kids = tree.children_[t];
    if (kids.empty()) continue;
    tree.first_child_[t] = kids.front();
    for (std::size_t j = 1; j < kids.size(); ++j) {
      tree.predecessor_[kids[j]] = kids[j - 1];
      tree.successor_[kids[j - 1]] = kids[j];
    }
  }
  tree.index_.reserve(n);
  for (NodeId t = 0; t < n; ++t) tree.index_.emplace(tree.records_[t].id, t);
  return tree;
}

NodeId ThreadTree::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? kNoNode : it->second;
}

std::vector<NodeId> ThreadTree::forward_order() const {
  std::vector<NodeId> order(size());
  std::iota(order.begin(), order.end(), NodeId{0});
  return order;
}

std::vector<NodeId> ThreadTree::backward_order() const {
  std::vector<NodeId> order = forward_order();
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

const char* const kFields[] = {"id", "parent_id", "author_id", "created_utc", "text", "karma"};

CommentRecord record_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "expected a JSON object");
  for (const char* field : kFields)
    if (!j.contains(field)) throw ParseError(line, std::string("missing field '") + field + "'");
  if (j.size() != std::size(kFields)) {
    for (const auto& item : j.items()) {
      if (std::find_if(std::begin(kFields), std::end(kFields),
                       [&](const char* f) { return item.key() == f; }) == std::end(kFields))
        throw ParseError(line, "unexpected field '" + item.key() + "'");
    }
  }
  auto expect = [&](bool ok, const char* field, const char* type) {
    if (!ok) throw ParseError(line, std::string("field '") + field + "' must be " + type);
  };
  expect(j["id"].is_string(), "id", "a string");
  expect(j["parent_id"].is_string() || j["parent_id"].is_null(), "parent_id", "a string or null");
  expect(j["author_id"].is_string(), "author_id", "a string");
  expect(j["created_utc"].is_number_integer(), "created_utc", "an integer");
  expect(j["text"].is_string(), "text", "a string");
  expect(j["karma"].is_number_integer(), "karma", "an integer");

  CommentRecord r;
  r.id = j["id"].get<std::string>();
  if (!j["parent_id"].is_null()) r.parent_id = j["parent_id"].get<std::string>();
  r.author_id = j["author_id"].get<std::string>();
  r.created_utc = j["created_utc"].get<std::int64_t>();
  r.text = j["text"].get<std::string>();
  r.karma = j["karma"].get<std::int64_t>();
  return r;
}

} // namespace

ThreadTree parse_thread_jsonl(std::istream& in) {
  std::vector<CommentRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    records.push_back(record_from_json(j, line_no));
  }
  return ThreadTree::build(std::move(records));
}

ThreadTree read_thread_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open thread file '" + path + "'");
  try {
    return parse_thread_jsonl(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + std::string(e.what()));
  }
}

void serialize_thread(const ThreadTree& tree, std::ostream& out) {
  for (const auto& r : tree.records()) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["parent_id"] = r.parent_id ? nlohmann::ordered_json(*r.parent_id) : nlohmann::ordered_json(nullptr);
    j["author_id"] = r.author_id;
    j["created_utc"] = r.created_utc;
    j["text"] = r.text;
    j["karma"] = r.karma;
    out << j.dump() << '\n';
  }
}

void write_thread_file(const ThreadTree& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write thread file '" + path + "'");
  serialize_thread(tree, out);
}

std::vector<std::string> list_thread_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: '" + dir + "'");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

} // namespace threadlstm
