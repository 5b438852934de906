#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace threadlstm {

/// Index of a node in a thread's chronological order. The root is always 0.
using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct CommentRecord {
  std::string id;
  std::optional<std::string> parent_id;  // absent for the original post
  std::string author_id;
  std::int64_t created_utc = 0;          // seconds since epoch
  std::string text;
  std::int64_t karma = 0;                // upvotes minus downvotes

  bool operator==(const CommentRecord&) const = default;
};

/// A discussion thread as a timestamped tree.
///
/// Nodes are stored in chronological order sorted by (created_utc, depth, id),
/// so a NodeId doubles as the position in that order. Four pointer maps are
/// kept: parent, first child in time, and the predecessor / successor among
/// siblings in time. Absent pointers are kNoNode. Immutable once built.
class ThreadTree {
public:
  /// Validates the records and links them. Throws ThreadError on duplicate
  /// ids, a missing or repeated root, dangling parent ids, or a child
  /// created before its parent.
  static ThreadTree build(std::vector<CommentRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  NodeId root() const noexcept { return 0; }

  const CommentRecord& record(NodeId t) const { return records_.at(t); }
  std::span<const CommentRecord> records() const noexcept { return records_; }

  NodeId parent(NodeId t) const { return parent_.at(t); }
  NodeId first_child(NodeId t) const { return first_child_.at(t); }
  NodeId predecessor(NodeId t) const { return predecessor_.at(t); }
  NodeId successor(NodeId t) const { return successor_.at(t); }

  /// Children of t in chronological order.
  std::span<const NodeId> children(NodeId t) const { return children_.at(t); }
  std::size_t depth(NodeId t) const { return depth_.at(t); }

  /// Node index for a comment id, or kNoNode.
  NodeId find(const std::string& id) const;

  /// Parents and earlier siblings come first: the chronological order.
  std::vector<NodeId> forward_order() const;
  /// First children and later siblings come first: reverse chronological order.
  std::vector<NodeId> backward_order() const;

  bool operator==(const ThreadTree& other) const { return records_ == other.records_; }

private:
  std::vector<CommentRecord> records_;
  std::vector<NodeId> parent_;
  std::vector<NodeId> first_child_;
  std::vector<NodeId> predecessor_;
  std::vector<NodeId> successor_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::size_t> depth_;
  std::unordered_map<std::string, NodeId> index_;
};

/// One JSON object per line with exactly the CommentRecord fields.
/// Throws ParseError (with line number) or ThreadError.
ThreadTree parse_thread_jsonl(std::istream& in);
ThreadTree read_thread_file(const std::string& path);

/// Writes records in chronological order, one per line.
void serialize_thread(const ThreadTree& tree, std::ostream& out);
void write_thread_file(const ThreadTree& tree, const std::string& path);

/// Every *.jsonl file directly inside dir, sorted by file name.
std::vector<std::string> list_thread_files(const std::string& dir);

} // namespace threadlstm
