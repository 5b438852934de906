#include "threadlstm/text_features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "threadlstm/error.hpp"
#include "threadlstm/rng.hpp"

namespace threadlstm {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
// Only ASCII punctuation; UTF-8 continuation bytes are never split.
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;

    std::size_t lo = i, hi = j;
    while (lo < hi && is_punct(static_cast<unsigned char>(text[lo]))) tokens.emplace_back(1, text[lo++]);
    std::size_t trail = hi;
    while (trail > lo && is_punct(static_cast<unsigned char>(text[trail - 1]))) --trail;
    if (trail > lo) {
      std::string word(text.substr(lo, trail - lo));
      for (auto& ch : word)
        if (static_cast<unsigned char>(ch) < 0x80) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      tokens.push_back(std::move(word));
    }
    for (std::size_t k = trail; k < hi; ++k) tokens.emplace_back(1, text[k]);
    i = j;
  }
  return tokens;
}

Vocabulary::Vocabulary() {
  tokens_.emplace_back(kUnkToken);
  index_.emplace(kUnkToken, kUnk);
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& text : corpus)
    for (auto& tok : tokenize(text)) ++counts[tok];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, count] : counts)
    if (count >= min_count && tok != kUnkToken) kept.emplace_back(tok, count);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, count] : kept) tokens.push_back(tok);
  return from_tokens(tokens);
}

Vocabulary Vocabulary::from_tokens(std::span<const std::string> tokens) {
  Vocabulary vocab;
  for (const auto& tok : tokens) {
    if (tok == kUnkToken) continue;
    if (vocab.index_.emplace(tok, static_cast<std::int32_t>(vocab.tokens_.size())).second) vocab.tokens_.push_back(tok);
  }
  return vocab;
}

std::int32_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::int32_t> Vocabulary::encode(std::string_view text) const {
  auto tokens = tokenize(text);
  if (tokens.size() > kMaxCommentTokens) tokens.resize(kMaxCommentTokens);
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(index(tok));
  return ids;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& tok : tokens_) {
    for (unsigned char c : tok) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& tok : tokens_) out << tok << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kUnkToken) throw ParseError(1, "vocabulary must start with the unknown token");
      continue;
    }
    tokens.push_back(line);
  }
  if (line_no == 0) throw ParseError(0, "empty vocabulary file");
  return from_tokens(tokens);
}

EmbeddingTable random_embeddings(std::size_t vocab_size, std::size_t dim, double scale, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingTable table(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < table.rows(); ++r)
    for (Eigen::Index c = 0; c < table.cols(); ++c) table(r, c) = rng.uniform(-scale, scale);
  return table;
}

Eigen::VectorXd embed_comment(std::span<const std::int32_t> token_ids, const EmbeddingTable& table) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.cols());
  const std::size_t n = std::min(token_ids.size(), kMaxCommentTokens);
  if (n == 0) return sum;
  for (std::size_t i = 0; i < n; ++i) sum += table.row(token_ids[i]).transpose();
  return sum / static_cast<double>(n);
}

Eigen::VectorXd embed_comment(std::span<const std::string> tokens, const EmbeddingTable& table,
                              const Vocabulary& vocab) {
  const std::size_t n = std::min(tokens.size(), kMaxCommentTokens);
  std::vector<std::int32_t> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vocab.index(tokens[i]));
  return embed_comment(ids, table);
}

EmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab, std::size_t dim,
                               double init_scale, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open embedding file '" + path + "'");
  EmbeddingTable table = random_embeddings(vocab.size(), dim, init_scale, seed);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) throw ParseError(line_no, path + ": non-numeric embedding value");
    if (values.size() != dim)
      throw DimensionError(path + ": line " + std::to_string(line_no) + " has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(dim));
    const std::int32_t row = vocab.index(token);
    if (row == Vocabulary::kUnk && token != Vocabulary::kUnkToken) continue;
    for (std::size_t c = 0; c < dim; ++c) table(row, static_cast<Eigen::Index>(c)) = values[c];
  }
  return table;
}

} // namespace threadlstm
