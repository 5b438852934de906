#include "threadlstm/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "threadlstm/error.hpp"
#include "threadlstm/rng.hpp"

namespace threadlstm {

namespace {

struct Draft {
  std::size_t parent = 0;
  std::size_t depth = 0;
  std::size_t sibling_rank = 0;
  CommentType type = CommentType::Filler;
  bool says_popular = false;
  bool says_controversy = false;
  bool says_praise = false;
  std::int64_t created = 0;
  std::string author;
  std::string text;
  std::vector<std::size_t> children;
};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("synth config: ") + name + " must lie in [0, 1]");
}

SynthThread make_thread(const SynthConfig& cfg, Rng& rng, std::size_t index) {
  std::vector<Draft> nodes(1);
  nodes[0].type = CommentType::Post;
  nodes[0].author = "a" + std::to_string(rng.below(cfg.n_authors));
  nodes[0].created = 1400000000 + static_cast<std::int64_t>(index) * 86400;

  auto filler = [&] {
    std::vector<std::string> words;
    const std::size_t len = cfg.min_length + rng.below(cfg.max_length - cfg.min_length + 1);
    for (std::size_t w = 0; w < len; ++w) words.push_back("w" + std::to_string(rng.below(cfg.filler_words)));
    return words;
  };
  auto join = [](const std::vector<std::string>& words) {
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    return text;
  };
  nodes[0].text = join(filler());

  // Breadth-first growth; children are appended in creation order.
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Draft parent = nodes[k];
    if (parent.depth >= cfg.max_depth) continue;
    double rate;
    if (parent.type == CommentType::Post) {
      rate = cfg.branching * cfg.root_multiplier;
    } else {
      rate = cfg.branching * std::pow(cfg.depth_decay, static_cast<double>(parent.depth - 1));
      if (parent.type == CommentType::Popular) rate *= cfg.popular_multiplier;
      if (parent.type == CommentType::Controversial) rate *= cfg.controversy_multiplier;
    }
    const std::size_t replies = rng.poisson(rate);
    std::int64_t clock = parent.created;
    for (std::size_t r = 0; r < replies; ++r) {
      Draft c;
      c.parent = k;
      c.depth = parent.depth + 1;
      c.sibling_rank = r;
      const double u = rng.uniform();
      c.type = u < cfg.p_popular                       ? CommentType::Popular
               : u < cfg.p_popular + cfg.p_controversy ? CommentType::Controversial
                                                       : CommentType::Filler;
      clock += 1 + static_cast<std::int64_t>(rng.exponential(900.0 * static_cast<double>(c.depth)));
      c.created = clock;
      c.author = rng.bernoulli(0.1) ? nodes[0].author : "a" + std::to_string(rng.below(cfg.n_authors));
      c.says_popular = c.type == CommentType::Popular && rng.bernoulli(cfg.popular_word_rate);
      c.says_controversy = c.type == CommentType::Controversial && rng.bernoulli(cfg.controversy_word_rate);
      if (parent.type == CommentType::Popular)
        c.says_praise = rng.bernoulli(cfg.praise_rate);
      else
        c.says_praise = rng.bernoulli(cfg.background_praise_rate);
      if (parent.type == CommentType::Controversial && rng.bernoulli(cfg.dispute_rate)) c.says_controversy = true;

      auto words = filler();
      auto plant = [&](const char* token) {
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), token);
      };
      if (c.says_popular) plant(kPopularToken);
      if (c.says_controversy) plant(kControversyToken);
      if (c.says_praise) plant(kPraiseToken);
      c.text = join(words);
      nodes[k].children.push_back(nodes.size());
      nodes.push_back(std::move(c));
    }
  }

  // Karma, bottom-up (children always have larger indices).
  const std::size_t n = nodes.size();
  std::vector<std::size_t> subtree(n, 1);
  for (std::size_t k = n; k-- > 1;) subtree[nodes[k].parent] += subtree[k];
  std::vector<std::int64_t> karma(n, 0);
  for (std::size_t k = 1; k < n; ++k) {
    const Draft& c = nodes[k];
    std::size_t praise = 0, dispute = 0;
    for (std::size_t ch : c.children) {
      praise += nodes[ch].says_praise;
      dispute += nodes[ch].says_controversy;
    }
    const double noise = cfg.karma_noise * rng.normal();
    if (c.says_controversy || dispute >= 2) {
      karma[k] = -static_cast<std::int64_t>(rng.below(4));
      continue;
    }
    bool popular_ancestor = false;
    for (std::size_t a = c.parent, hops = 0; a != 0 && hops < 2; a = nodes[a].parent, ++hops)
      popular_ancestor = popular_ancestor || nodes[a].says_popular;
    double score = cfg.karma_base + noise;
    score += 2.2 * (c.says_popular ? 1.0 : 0.0);
    score += 1.2 * static_cast<double>(std::min<std::size_t>(praise, 3));
    if (popular_ancestor && c.sibling_rank < 2) score += 1.5;
    score += 0.15 * std::log2(static_cast<double>(subtree[k]));
    // Late comments and comments nobody answered draw little attention.
    const double hours = static_cast<double>(c.created - nodes[0].created) / 3600.0;
    score -= cfg.lateness_penalty * std::log2(1.0 + hours);
    if (c.children.empty()) score -= cfg.no_reply_penalty;
    if (score > 0.0)
      karma[k] = static_cast<std::int64_t>(std::floor(std::exp2(1.6 * score)));
    else
      karma[k] = -static_cast<std::int64_t>(rng.below(3));
  }
  karma[0] = 1 + static_cast<std::int64_t>(rng.below(100));

  std::vector<CommentRecord> records;
  records.reserve(n);
  const std::string prefix = "t" + std::to_string(index);
  for (std::size_t k = 0; k < n; ++k) {
    CommentRecord r;
    r.id = k == 0 ? prefix : prefix + "_c" + std::to_string(k);
    if (k > 0) r.parent_id = nodes[k].parent == 0 ? prefix : prefix + "_c" + std::to_string(nodes[k].parent);
    r.author_id = nodes[k].author;
    r.created_utc = nodes[k].created;
    r.text = nodes[k].text;
    r.karma = karma[k];
    records.push_back(std::move(r));
  }
  SynthThread out{ThreadTree::build(records), {}};
  out.types.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.types[out.tree.find(records[k].id)] = nodes[k].type;
  return out;
}

} // namespace

void SynthConfig::validate() const {
  check_probability(p_popular, "p_popular");
  check_probability(p_controversy, "p_controversy");
  check_probability(p_popular + p_controversy, "p_popular + p_controversy");
  check_probability(popular_word_rate, "popular_word_rate");
  check_probability(controversy_word_rate, "controversy_word_rate");
  check_probability(praise_rate, "praise_rate");
  check_probability(background_praise_rate, "background_praise_rate");
  check_probability(dispute_rate, "dispute_rate");
  if (root_multiplier < 0.0 || branching < 0.0 || depth_decay < 0.0)
    throw ConfigError("synth config: branching factors must be non-negative");
  if (filler_words == 0 || n_authors == 0 || min_length == 0 || max_length < min_length)
    throw ConfigError("synth config: vocabulary, author and length sizes must be positive");
}

std::string SynthConfig::to_json() const {
  nlohmann::ordered_json j{{"n_threads", n_threads},
                           {"root_multiplier", root_multiplier},
                           {"branching", branching},
                           {"depth_decay", depth_decay},
                           {"max_depth", max_depth},
                           {"p_popular", p_popular},
                           {"p_controversy", p_controversy},
                           {"popular_multiplier", popular_multiplier},
                           {"controversy_multiplier", controversy_multiplier},
                           {"popular_word_rate", popular_word_rate},
                           {"controversy_word_rate", controversy_word_rate},
                           {"praise_rate", praise_rate},
                           {"background_praise_rate", background_praise_rate},
                           {"dispute_rate", dispute_rate},
                           {"filler_words", filler_words},
                           {"min_length", min_length},
                           {"max_length", max_length},
                           {"n_authors", n_authors},
                           {"karma_noise", karma_noise},
                           {"karma_base", karma_base},
                           {"lateness_penalty", lateness_penalty},
                           {"no_reply_penalty", no_reply_penalty},
                           {"seed", seed}};
  return j.dump(2);
}

SynthConfig SynthConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("synth config: ") + e.what());
  }
  SynthConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("n_threads", c.n_threads);
  get("root_multiplier", c.root_multiplier);
  get("branching", c.branching);
  get("depth_decay", c.depth_decay);
  get("max_depth", c.max_depth);
  get("p_popular", c.p_popular);
  get("p_controversy", c.p_controversy);
  get("popular_multiplier", c.popular_multiplier);
  get("controversy_multiplier", c.controversy_multiplier);
  get("popular_word_rate", c.popular_word_rate);
  get("controversy_word_rate", c.controversy_word_rate);
  get("praise_rate", c.praise_rate);
  get("background_praise_rate", c.background_praise_rate);
  get("dispute_rate", c.dispute_rate);
  get("filler_words", c.filler_words);
  get("min_length", c.min_length);
  get("max_length", c.max_length);
  get("n_authors", c.n_authors);
  get("karma_noise", c.karma_noise);
  get("karma_base", c.karma_base);
  get("lateness_penalty", c.lateness_penalty);
  get("no_reply_penalty", c.no_reply_penalty);
  get("seed", c.seed);
  return c;
}

std::vector<SynthThread> generate_annotated(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<SynthThread> threads;
  threads.reserve(config.n_threads);
  for (std::size_t i = 0; i < config.n_threads; ++i) threads.push_back(make_thread(config, rng, i));
  return threads;
}

std::vector<ThreadTree> generate(const SynthConfig& config) {
  std::vector<ThreadTree> trees;
  for (auto& t : generate_annotated(config)) trees.push_back(std::move(t.tree));
  return trees;
}

} // namespace threadlstm
