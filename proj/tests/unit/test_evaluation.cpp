#include <gtest/gtest.h>

#include "oracles.hpp"
#include "threadlstm/error.hpp"
#include "threadlstm/evaluation.hpp"
#include "threadlstm/rng.hpp"

using namespace threadlstm;

namespace {

std::vector<std::int64_t> heavy_tailed(Rng& rng, std::size_t n) {
  std::vector<std::int64_t> k(n);
  for (auto& v : k)
    v = rng.bernoulli(0.3) ? -static_cast<std::int64_t>(rng.below(5)) : static_cast<std::int64_t>(std::exp2(rng.uniform(0, 12)));
  return k;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> random_levels(Rng& rng, std::size_t n) {
  std::vector<std::size_t> l(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = rng.below(8);
    p[i] = rng.bernoulli(0.4) ? l[i] : rng.below(8);
  }
  return {l, p};
}

} // namespace

TEST(Quantizer, LevelZeroBelowOne) {
  const KarmaQuantizer q({1, 2, 4, 8, 16, 32, 64});
  for (std::int64_t k : {-1000, -5, -1, 0}) EXPECT_EQ(q.level(k), 0u);
  EXPECT_EQ(q.level(1), 1u);
  EXPECT_EQ(q.level(3), 3u);
  EXPECT_EQ(q.level(64), 7u);
  EXPECT_EQ(q.level(1'000'000), 7u);
}

TEST(Quantizer, MatchesRecursiveMedianOracle) {
  const std::vector<std::int64_t> doubling{1, 1, 2, 3, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, -3, 0};
  EXPECT_EQ(KarmaQuantizer::fit(doubling).thresholds(), oracle::recursive_median(doubling));

  Rng rng(81);
  for (int trial = 0; trial < 100; ++trial) {
    auto karma = heavy_tailed(rng, 1 + rng.below(400));
    karma.push_back(1 + static_cast<std::int64_t>(rng.below(3)));
    const auto q = KarmaQuantizer::fit(karma);
    const auto th = oracle::recursive_median(karma);
    ASSERT_EQ(q.thresholds(), th);
    for (auto k : karma) ASSERT_EQ(q.level(k), oracle::level(th, k));
  }
}

TEST(Quantizer, DegenerateAndErrors) {
  const std::vector<std::int64_t> ones(20, 1);
  const auto q = KarmaQuantizer::fit(ones);
  EXPECT_EQ(q.thresholds()[0], 1);
  EXPECT_EQ(q.level(1), 1u);
  EXPECT_THROW(KarmaQuantizer::fit(std::vector<std::int64_t>{0, -1}), ConfigError);
  EXPECT_THROW(KarmaQuantizer({5, 1, 2, 3, 4, 6, 7}), ConfigError);
  const auto back = KarmaQuantizer::from_json(q.to_json());
  EXPECT_EQ(back.thresholds(), q.thresholds());
}

TEST(Quantizer, MonotoneLevels) {
  Rng rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = KarmaQuantizer::fit(heavy_tailed(rng, 300));
    std::size_t prev = 0;
    for (std::int64_t k = -10; k < 5000; ++k) {
      const auto l = q.level(k);
      ASSERT_GE(l, prev);
      EXPECT_EQ(l == 0, k < 1);
      prev = l;
    }
  }
}

TEST(F1, Examples) {
  const std::vector<std::size_t> labels{0, 1, 3, 7, 2, 5};
  for (std::size_t j = 1; j <= 7; ++j) EXPECT_EQ(binary_f1(labels, labels, j).value, 1.0);
  const std::vector<std::size_t> zeros(labels.size(), 0);
  for (std::size_t j = 1; j <= 7; ++j) EXPECT_EQ(binary_f1(labels, zeros, j).value, 0.0);
  const auto none = binary_f1(zeros, zeros, 3);
  EXPECT_TRUE(none.undefined);
  EXPECT_EQ(none.value, 0.0);
  EXPECT_FALSE(binary_f1(labels, zeros, 3).undefined);
  EXPECT_EQ(macro_f1(labels, labels), 1.0);
  EXPECT_EQ(weighted_f1(labels, labels), 1.0);
  EXPECT_THROW(binary_f1(labels, std::vector<std::size_t>{1}, 1), DimensionError);
  EXPECT_THROW(binary_f1(labels, labels, 0), ConfigError);
  EXPECT_THROW(binary_f1(labels, labels, 8), ConfigError);
}

TEST(F1, MatchesCountingOracle) {
  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [l, p] = random_levels(rng, trial == 0 ? 500 : 1 + rng.below(500));
    for (std::size_t j = 1; j <= 7; ++j) {
      const auto f = binary_f1(l, p, j);
      ASSERT_EQ(f.value, oracle::f1(l, p, j));
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < l.size(); ++i) {
        tp += l[i] >= j && p[i] >= j;
        fp += l[i] < j && p[i] >= j;
        fn += l[i] >= j && p[i] < j;
      }
      EXPECT_EQ(f.true_positives, tp);
      EXPECT_EQ(f.false_positives, fp);
      EXPECT_EQ(f.false_negatives, fn);
    }
    ASSERT_EQ(macro_f1(l, p), oracle::macro(l, p));
    ASSERT_EQ(weighted_f1(l, p), oracle::weighted(l, p));
  }
}

TEST(F1, AveragesWeightLevelsLinearly) {
  // Only level 7 exists, and its comments are found exactly; every subtask
  // sees the same single positive, so F1(j) = 1 for all j.
  const std::vector<std::size_t> l{7, 0, 0}, p{7, 0, 0};
  EXPECT_EQ(macro_f1(l, p), 1.0);
  // Level-7 comments predicted at level 6: subtasks 1..6 are perfect, 7 gets
  // zero recall.
  const std::vector<std::size_t> l2{7, 0}, p2{6, 0};
  EXPECT_NEAR(macro_f1(l2, p2), 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(weighted_f1(l2, p2), 21.0 / 28.0, 1e-15);
  // Perfect on the lowest subtask only.
  const std::vector<std::size_t> l3{7, 0}, p3{1, 0};
  EXPECT_NEAR(macro_f1(l3, p3), 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(weighted_f1(l3, p3), 1.0 / 28.0, 1e-15);
}

TEST(F1, PermutationInvariant) {
  Rng rng(84);
  for (int trial = 0; trial < 50; ++trial) {
    auto [l, p] = random_levels(rng, 100);
    const double m = macro_f1(l, p);
    std::vector<std::size_t> idx(l.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    std::vector<std::size_t> l2, p2;
    for (auto i : idx) l2.push_back(l[i]), p2.push_back(p[i]);
    EXPECT_EQ(macro_f1(l2, p2), m);
  }
}

TEST(Evaluate, ReportStructure) {
  Rng rng(85);
  std::vector<ScoredComment> cs;
  for (int i = 0; i < 400; ++i) {
    ScoredComment c;
    c.comment_id = "c" + std::to_string(i);
    c.label = rng.below(8);
    c.pruned = rng.bernoulli(0.3);
    c.predicted = c.pruned ? 0 : rng.below(8);
    c.n_previous = rng.below(75);
    cs.push_back(c);
  }
  const auto r = evaluate(cs);
  std::size_t total = 0, max_bucket = 0, pruned = 0;
  for (std::size_t l = 0; l < 8; ++l) {
    std::size_t row = 0;
    for (std::size_t p = 0; p < 8; ++p) row += r.confusion[l][p];
    EXPECT_EQ(row, r.label_counts[l]);
    total += row;
  }
  for (const auto& c : cs) max_bucket = std::max<std::size_t>(max_bucket, c.n_previous / 20), pruned += c.pruned;
  EXPECT_EQ(total, cs.size());
  EXPECT_EQ(r.n_scored, cs.size());
  EXPECT_EQ(r.n_pruned, pruned);
  ASSERT_EQ(r.time_buckets.size(), max_bucket + 1);
  for (std::size_t b = 0; b <= max_bucket; ++b) {
    std::vector<std::size_t> l, p;
    for (const auto& c : cs)
      if (c.n_previous / 20 == b) l.push_back(c.label), p.push_back(c.predicted);
    EXPECT_EQ(r.time_buckets[b].bucket_start, 20 * b);
    EXPECT_EQ(r.time_buckets[b].count, l.size());
    EXPECT_EQ(r.time_buckets[b].macro_f1, oracle::macro(l, p));
  }
  double macro = 0;
  for (const auto& f : r.f1) macro += f.value;
  EXPECT_EQ(r.macro, macro / 7.0);
  const std::string csv = r.time_buckets_csv();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), max_bucket + 2);
  EXPECT_EQ(csv.rfind("bucket_start,macro_f1,n\n", 0), 0u);
  EXPECT_NE(r.to_json().find("\"weighted_f1\""), std::string::npos);
}

TEST(Evaluate, PerfectAndAllPruned) {
  std::vector<ScoredComment> cs;
  for (std::size_t i = 0; i < 40; ++i) cs.push_back({"t", "c" + std::to_string(i), i % 8, i % 8, i, false});
  const auto perfect = evaluate(cs);
  EXPECT_EQ(perfect.macro, 1.0);
  for (std::size_t l = 0; l < 8; ++l)
    for (std::size_t p = 0; p < 8; ++p) EXPECT_EQ(perfect.confusion[l][p], l == p ? 5u : 0u);

  for (auto& c : cs) c.pruned = true, c.predicted = 0;
  const auto none = evaluate(cs);
  for (const auto& f : none.f1) EXPECT_EQ(f.value, 0.0);
  EXPECT_EQ(none.n_pruned, cs.size());

  cs[0].predicted = 3;
  EXPECT_THROW(evaluate(cs), ConfigError);
  cs[0].predicted = 9;
  cs[0].pruned = false;
  EXPECT_THROW(evaluate(cs), ConfigError);
}
