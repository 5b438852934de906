#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace threadlstm {

inline constexpr std::size_t kDefaultEmbeddingDim = 100;
inline constexpr std::size_t kMaxCommentTokens = 100;
inline constexpr std::size_t kDefaultMinCount = 10;

/// Lowercases ASCII, splits on whitespace and peels leading/trailing
/// punctuation off each word as one-character tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Token-to-index map. Index 0 is always the unknown-word token.
class Vocabulary {
public:
  static constexpr std::int32_t kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  /// Keeps tokens seen at least min_count times across the corpus. Indices
  /// follow descending frequency, ties by token, after the unknown token.
  static Vocabulary build(std::span<const std::string> corpus, std::size_t min_count = kDefaultMinCount);
  static Vocabulary from_tokens(std::span<const std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::int32_t index(const std::string& token) const;
  const std::string& token(std::int32_t index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }

  /// Indices of the first kMaxCommentTokens tokens of text.
  std::vector<std::int32_t> encode(std::string_view text) const;

  /// FNV-1a over the token list, used to tie checkpoints to a vocabulary.
  std::uint64_t fingerprint() const;

  /// One token per line in index order; the first line is the unknown token.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// |V| x d matrix, one row per vocabulary entry.
using EmbeddingTable = Eigen::MatrixXd;

/// Uniform random table in [-scale, scale].
EmbeddingTable random_embeddings(std::size_t vocab_size, std::size_t dim, double scale, std::uint64_t seed);

/// Mean of the rows selected by the first kMaxCommentTokens token indices;
/// the zero vector for an empty comment.
Eigen::VectorXd embed_comment(std::span<const std::int32_t> token_ids, const EmbeddingTable& table);

/// Truncates to kMaxCommentTokens, maps OOV to the unknown token, averages.
Eigen::VectorXd embed_comment(std::span<const std::string> tokens, const EmbeddingTable& table,
                              const Vocabulary& vocab);

/// Reads "token v1 ... vd" lines. Rows of in-vocabulary tokens are taken from
/// the file; every other row is random with the given seed. Throws
/// DimensionError on a row of the wrong width and ParseError if unreadable.
EmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab, std::size_t dim,
                               double init_scale, std::uint64_t seed);

} // namespace threadlstm
