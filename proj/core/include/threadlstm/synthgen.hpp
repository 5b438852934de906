#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "threadlstm/thread_graph.hpp"

namespace threadlstm {

/// Signal words planted by the generator.
inline constexpr const char* kPopularToken = "popular";
inline constexpr const char* kControversyToken = "controversy";
inline constexpr const char* kPraiseToken = "praise";

/// Branching-process thread generator with planted, context-dependent karma.
///
/// Every comment draws a hidden type. Popular comments say "popular" only
/// some of the time but attract praising replies; controversial comments
/// attract many disputing replies. A comment that says "controversy" or has
/// at least two disputing replies ends below 1 karma. The rest are filler. Karma is then a fixed function of the comment's own words, its
/// ancestors' words, its replies' words and its subtree size, plus seeded
/// noise, so tree context carries information a node-independent model
/// cannot see.
struct SynthConfig {
  std::size_t n_threads = 100;
  double branching = 0.8;        // mean replies to a filler comment at depth 1
  double root_multiplier = 7.5;  // the post draws branching * root_multiplier replies
  double depth_decay = 0.7;      // branching multiplier per extra level
  std::size_t max_depth = 6;
  double p_popular = 0.15;
  double p_controversy = 0.1;
  double popular_multiplier = 1.8;
  double controversy_multiplier = 3.0;
  double popular_word_rate = 0.6;      // popular comment contains "popular"
  double controversy_word_rate = 0.5;  // controversial comment contains "controversy"
  double praise_rate = 0.7;            // reply to a popular comment contains "praise"
  double background_praise_rate = 0.05;
  double dispute_rate = 0.6;           // reply to a controversial comment contains "controversy"
  std::size_t filler_words = 40;
  std::size_t min_length = 4;
  std::size_t max_length = 12;
  std::size_t n_authors = 30;
  double karma_noise = 0.4;
  double karma_base = 0.9;
  double lateness_penalty = 0.5;  // per doubling of hours since the post
  double no_reply_penalty = 0.8;
  std::uint64_t seed = 1;

  /// Throws ConfigError on probabilities outside [0, 1] or bad sizes.
  void validate() const;
  std::string to_json() const;
  /// Missing keys keep their defaults.
  static SynthConfig from_json(const std::string& text);
};

enum class CommentType { Post, Filler, Popular, Controversial };

struct SynthThread {
  ThreadTree tree;
  std::vector<CommentType> types;  // by NodeId
};

std::vector<SynthThread> generate_annotated(const SynthConfig& config);
std::vector<ThreadTree> generate(const SynthConfig& config);

} // namespace threadlstm
