#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "threadlstm/error.hpp"
#include "threadlstm/rng.hpp"
#include "threadlstm/text_features.hpp"

using namespace threadlstm;

namespace {

std::string repeat(const std::string& word, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += word + " ";
  return s;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

} // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Hello, world"), (std::vector<std::string>{"hello", ",", "world"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("  \t\n ").empty());
  EXPECT_EQ(tokenize("(Yes!) don't"), (std::vector<std::string>{"(", "yes", "!", ")", "don't"}));
  EXPECT_EQ(tokenize("..."), (std::vector<std::string>{".", ".", "."}));
  EXPECT_EQ(tokenize("CAF\xc3\x89"), (std::vector<std::string>{"caf\xc3\x89"}));
}

TEST(Tokenize, RejoiningIsIdempotent) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> words;
    for (std::uint64_t i = 0, n = rng.below(12); i < n; ++i) {
      std::string w;
      for (std::uint64_t k = 0, len = 1 + rng.below(6); k < len; ++k) w += static_cast<char>('a' + rng.below(26));
      words.push_back(w);
    }
    std::string joined;
    for (const auto& w : words) joined += w + (rng.bernoulli(0.5) ? " " : "\t ");
    EXPECT_EQ(tokenize(joined), words);
  }
}

TEST(Vocabulary, ThresholdBoundary) {
  const std::vector<std::string> corpus{repeat("a", 10), repeat("b", 9)};
  const auto v = Vocabulary::build(corpus, 10);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.token(Vocabulary::kUnk), Vocabulary::kUnkToken);
  EXPECT_EQ(v.index("a"), 1);
  EXPECT_EQ(v.index("b"), Vocabulary::kUnk);

  const std::vector<std::string> sparse{"x y z"};
  EXPECT_EQ(Vocabulary::build(sparse, 10).size(), 1u);
}

TEST(Vocabulary, MatchesFrequencyCount) {
  Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> corpus;
    std::map<std::string, std::size_t> counts;
    for (int d = 0; d < 40; ++d) {
      std::string text;
      for (std::uint64_t k = 0, n = rng.below(15); k < n; ++k) {
        const std::string tok = "w" + std::to_string(rng.below(25));
        text += tok + " ";
        ++counts[tok];
      }
      corpus.push_back(text);
    }
    const std::size_t min_count = 1 + rng.below(30);
    std::size_t expected = 1;
    for (const auto& [tok, c] : counts) expected += c >= min_count;
    const auto v = Vocabulary::build(corpus, min_count);
    EXPECT_EQ(v.size(), expected);
    for (const auto& [tok, c] : counts) EXPECT_EQ(v.index(tok) != Vocabulary::kUnk, c >= min_count);
    for (std::size_t i = 2; i < v.size(); ++i)
      EXPECT_GE(counts[v.token(static_cast<std::int32_t>(i - 1))], counts[v.token(static_cast<std::int32_t>(i))]);
  }
}

TEST(Vocabulary, SaveLoadAndFingerprint) {
  const std::vector<std::string> corpus{repeat("alpha", 3) + repeat("beta", 5)};
  const auto v = Vocabulary::build(corpus, 2);
  std::stringstream s;
  v.save(s);
  const auto back = Vocabulary::load(s);
  EXPECT_EQ(std::vector<std::string>(back.tokens().begin(), back.tokens().end()),
            std::vector<std::string>(v.tokens().begin(), v.tokens().end()));
  EXPECT_EQ(back.fingerprint(), v.fingerprint());
  EXPECT_NE(Vocabulary::build(corpus, 4).fingerprint(), v.fingerprint());
}

TEST(Vocabulary, EncodeTruncatesAndMapsUnknown) {
  const std::vector<std::string> toks{"a", "b"};
  const auto v = Vocabulary::from_tokens(toks);
  EXPECT_EQ(v.encode("a zz b"), (std::vector<std::int32_t>{1, Vocabulary::kUnk, 2}));
  EXPECT_EQ(v.encode(repeat("a", 150)).size(), kMaxCommentTokens);
}

TEST(Embedding, Conventions) {
  const auto table = random_embeddings(5, 4, 0.5, 3);
  ASSERT_EQ(table.rows(), 5);
  ASSERT_EQ(table.cols(), 4);
  EXPECT_TRUE(embed_comment(std::vector<std::int32_t>{}, table).isZero(0.0));
  const std::vector<std::int32_t> one{3};
  EXPECT_EQ(embed_comment(one, table), Eigen::VectorXd(table.row(3).transpose()));

  std::vector<std::int32_t> many;
  for (int i = 0; i < 150; ++i) many.push_back(i % 5);
  const std::vector<std::int32_t> first(many.begin(), many.begin() + 100);
  EXPECT_EQ(embed_comment(many, table), embed_comment(first, table));

  const std::vector<std::string> tokens{"a", "zz"};
  const auto vocab = Vocabulary::from_tokens(std::vector<std::string>{"a"});
  const Eigen::VectorXd expected = (table.row(1) + table.row(0)).transpose() / 2.0;
  EXPECT_TRUE(embed_comment(tokens, table, vocab).isApprox(expected, 1e-15));
}

TEST(Embedding, PermutationInvariantAndBounded) {
  Rng rng(33);
  const auto table = random_embeddings(20, 6, 1.0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int32_t> ids(1 + rng.below(100));
    for (auto& i : ids) i = static_cast<std::int32_t>(rng.below(20));
    const auto e = embed_comment(ids, table);
    auto shuffled = ids;
    rng.shuffle(shuffled);
    EXPECT_LT((embed_comment(shuffled, table) - e).cwiseAbs().maxCoeff(), 1e-12);
    double max_norm = 0;
    for (auto i : ids) max_norm = std::max(max_norm, table.row(i).norm());
    EXPECT_LE(e.norm(), max_norm + 1e-12);
  }
}

TEST(Embedding, RandomInitRangeAndSeed) {
  const auto a = random_embeddings(30, 10, 0.08, 5);
  EXPECT_LE(a.cwiseAbs().maxCoeff(), 0.08);
  EXPECT_EQ(a, random_embeddings(30, 10, 0.08, 5));
  EXPECT_NE(a, random_embeddings(30, 10, 0.08, 6));
}

TEST(Pretrained, FullPartialAndMismatch) {
  const auto vocab = Vocabulary::from_tokens(std::vector<std::string>{"cat", "dog"});
  const auto full = temp_file("threadlstm_emb_full.txt");
  std::ofstream(full) << "<unk> 0 0 0\ncat 1 2 3\ndog -1 -2 -3.5\nextra 9 9 9\n";
  const auto t = load_pretrained(full.string(), vocab, 3, 0.1, 1);
  EXPECT_EQ(t.row(1), Eigen::RowVector3d(1, 2, 3));
  EXPECT_EQ(t.row(2), Eigen::RowVector3d(-1, -2, -3.5));
  EXPECT_EQ(t.row(0), Eigen::RowVector3d(0, 0, 0));

  const auto partial = temp_file("threadlstm_emb_partial.txt");
  std::ofstream(partial) << "dog 4 5 6\n";
  const auto p1 = load_pretrained(partial.string(), vocab, 3, 0.1, 7);
  const auto p2 = load_pretrained(partial.string(), vocab, 3, 0.1, 7);
  EXPECT_EQ(p1.row(2), Eigen::RowVector3d(4, 5, 6));
  EXPECT_EQ(p1, p2);
  EXPECT_GT(p1.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NE(p1.row(1), load_pretrained(partial.string(), vocab, 3, 0.1, 8).row(1));

  const auto wrong = temp_file("threadlstm_emb_wrong.txt");
  {
    std::ofstream out(wrong);
    out << "cat";
    for (int i = 0; i < 50; ++i) out << " 0.5";
    out << "\n";
  }
  EXPECT_THROW(load_pretrained(wrong.string(), vocab, 100, 0.1, 1), DimensionError);
  EXPECT_THROW(load_pretrained(temp_file("threadlstm_no_such_file.txt").string(), vocab, 3, 0.1, 1), Error);
  for (const auto& f : {full, partial, wrong}) std::filesystem::remove(f);
}
