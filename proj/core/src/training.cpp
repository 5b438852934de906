#include "threadlstm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "threadlstm/error.hpp"

namespace threadlstm {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

std::size_t scored_count(const ThreadExample& ex) {
  std::size_t n = 0;
  for (NodeId t = 1; t < ex.tree.size(); ++t)
    if (ex.pruned.retained[t]) ++n;
  return n;
}

void check_labels(const ThreadExample& ex) {
  if (ex.labels.size() != ex.tree.size()) throw ConfigError("example labels do not cover the thread");
  for (NodeId t = 1; t < ex.tree.size(); ++t)
    if (ex.pruned.retained[t] && ex.labels[t] >= kLevels)
      throw ConfigError("comment '" + ex.tree.record(t).id + "' has no valid karma level");
}

/// Runs f(i) for i in [0, n) on `workers` threads with a static stride.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void add_into(Model& into, const Model& from) {
  auto a = parameters(into);
  const auto b = parameters(from);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (Index i = 0; i < a[k].size(); ++i) a[k].data[i] += b[k].data[i];
}

void check_finite(const Model& grad) {
  for (const auto& p : parameters(grad))
    for (Index i = 0; i < p.size(); ++i)
      if (!std::isfinite(p.data[i])) throw NumericError("non-finite gradient in parameter '" + std::string(p.name) + "'");
}

void scatter_embedding(const ThreadExample& ex, NodeId t, const VectorXd& dx, const Model& model, Model& grad) {
  const auto& ids = ex.tokens[t];
  if (ids.empty()) return;
  const auto e = static_cast<Index>(model.dims.embed_dim);
  const VectorXd d = dx.tail(e) / static_cast<double>(ids.size());
  for (auto id : ids) grad.embedding.row(id) += d.transpose();
}

double graph_gradients(const Model& model, const ThreadExample& ex, const std::vector<VectorXd>& inputs, Model& grad) {
  const auto& pr = ex.pruned;
  const auto& params = model.graph;
  const PredictMode mode = model.mode();
  const bool bidir = mode == PredictMode::Bidirectional;
  const StateCache states = run_passes(pr, inputs, params, mode);
  const std::size_t scored = scored_count(ex);
  if (scored == 0) return 0.0;

  const Index dh = params.forward.hidden_dim();
  const double inv = 1.0 / static_cast<double>(scored);
  const std::size_t n = pr.size();
  std::vector<VectorXd> dh_f(n), dc_f(n), dh_b(n), dc_b(n), dx(n);
  for (NodeId t : pr.order) {
    dh_f[t] = VectorXd::Zero(dh);
    dc_f[t] = VectorXd::Zero(dh);
    if (bidir) {
      dh_b[t] = VectorXd::Zero(dh);
      dc_b[t] = VectorXd::Zero(dh);
    }
    dx[t] = VectorXd::Zero(inputs[t].size());
  }

  double loss = 0.0;
  for (NodeId t : pr.order) {
    if (t == 0) continue;
    const VectorXd z = head_features(states, t, mode);
    const VectorXd logits = params.W_s * z;
    const std::size_t y = ex.labels[t];
    loss -= log_probability(logits, y);
    const Distribution p = softmax(logits);
    VectorXd dlogits(static_cast<Index>(kLevels));
    for (std::size_t j = 0; j < kLevels; ++j) dlogits[static_cast<Index>(j)] = (p[j] - (j == y ? 1.0 : 0.0)) * inv;
    grad.graph.W_s.noalias() += dlogits * z.transpose();
    const VectorXd dz = params.W_s.transpose() * dlogits;
    dh_f[t] += dz.head(dh);
    if (bidir) dh_b[t] += dz.tail(dh);
  }

  const VectorXd zero = VectorXd::Zero(dh);
  // Forward direction: consumers come later in time, so walk backwards.
  for (auto it = pr.order.rbegin(); it != pr.order.rend(); ++it) {
    const NodeId t = *it;
    const NodeId pred = pr.predecessor[t], parent = pr.parent[t];
    VectorXd h_time = pred == kNoNode ? zero : states.forward[pred].h;
    const double m_p = static_cast<double>(pr.pruned_before[t]);
    if (m_p != 0.0) h_time += m_p * params.pruned.r_p;
    const VectorXd& c_time = pred == kNoNode ? zero : states.forward[pred].c;
    const VectorXd& h_hier = parent == kNoNode ? zero : states.forward[parent].h;
    const VectorXd& c_hier = parent == kNoNode ? zero : states.forward[parent].c;
    const CellGradients g = cell_backward(states.forward[t], inputs[t], h_time, c_time, h_hier, c_hier, dh_f[t],
                                          dc_f[t], params.forward, grad.graph.forward);
    dx[t] += g.x;
    if (m_p != 0.0) grad.graph.pruned.r_p += m_p * g.h_time;
    if (pred != kNoNode) {
      dh_f[pred] += g.h_time;
      dc_f[pred] += g.c_time;
    }
    if (parent != kNoNode) {
      dh_f[parent] += g.h_hier;
      dc_f[parent] += g.c_hier;
    }
  }

  if (bidir) {
    // Backward direction: consumers (predecessor sibling, parent) are earlier.
    for (NodeId t : pr.order) {
      const NodeId succ = pr.successor[t], child = pr.first_child[t];
      const double m_s = static_cast<double>(pr.pruned_after[t]);
      const double m_k = static_cast<double>(pr.pruned_levels[t]);
      VectorXd h_time = succ == kNoNode ? zero : states.backward[succ].h;
      if (m_s != 0.0) h_time += m_s * params.pruned.r_s;
      VectorXd h_hier = child == kNoNode ? zero : states.backward[child].h;
      if (m_k != 0.0) h_hier += m_k * params.pruned.r_kappa;
      const VectorXd& c_time = succ == kNoNode ? zero : states.backward[succ].c;
      const VectorXd& c_hier = child == kNoNode ? zero : states.backward[child].c;
      const CellGradients g = cell_backward(states.backward[t], inputs[t], h_time, c_time, h_hier, c_hier, dh_b[t],
                                            dc_b[t], params.backward, grad.graph.backward);
      dx[t] += g.x;
      if (m_s != 0.0) grad.graph.pruned.r_s += m_s * g.h_time;
      if (m_k != 0.0) grad.graph.pruned.r_kappa += m_k * g.h_hier;
      if (succ != kNoNode) {
        dh_b[succ] += g.h_time;
        dc_b[succ] += g.c_time;
      }
      if (child != kNoNode) {
        dh_b[child] += g.h_hier;
        dc_b[child] += g.c_hier;
      }
    }
  }

  if (model.dims.use_text)
    for (NodeId t : pr.order) scatter_embedding(ex, t, dx[t], model, grad);
  return loss * inv;
}

double ffnn_gradients(const Model& model, const ThreadExample& ex, const std::vector<VectorXd>& inputs, Model& grad) {
  const auto& pr = ex.pruned;
  const std::size_t scored = scored_count(ex);
  if (scored == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(scored);
  const auto& p = model.ffnn;
  double loss = 0.0;
  for (NodeId t : pr.order) {
    if (t == 0) continue;
    const VectorXd& x = inputs[t];
    const VectorXd hidden = ffnn_hidden(x, p);
    const VectorXd logits = p.W2 * hidden;
    const std::size_t y = ex.labels[t];
    loss -= log_probability(logits, y);
    const Distribution prob = softmax(logits);
    VectorXd dlogits(static_cast<Index>(kLevels));
    for (std::size_t j = 0; j < kLevels; ++j) dlogits[static_cast<Index>(j)] = (prob[j] - (j == y ? 1.0 : 0.0)) * inv;
    grad.ffnn.W2.noalias() += dlogits * hidden.transpose();
    const VectorXd da = (p.W2.transpose() * dlogits).cwiseProduct((1.0 - hidden.array().square()).matrix());
    grad.ffnn.W1.noalias() += da * x.transpose();
    grad.ffnn.b1 += da;
    if (model.dims.use_text) scatter_embedding(ex, t, p.W1.transpose() * da, model, grad);
  }
  return loss * inv;
}

} // namespace

void TrainConfig::validate() const {
  if (hidden_dims.empty() || std::find(hidden_dims.begin(), hidden_dims.end(), 0) != hidden_dims.end())
    throw ConfigError("hidden dimensions must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("adadelta rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adadelta epsilon must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (batch_size == 0 || workers == 0) throw ConfigError("batch_size and workers must be positive");
  if (use_text && embed_dim == 0) throw ConfigError("embedding dimension must be positive");
  if (!(init_scale > 0.0)) throw ConfigError("init_scale must be positive");
}

double thread_loss(const Model& model, const ThreadExample& ex) {
  check_labels(ex);
  const auto inputs = build_inputs(model, ex);
  const auto& pr = ex.pruned;
  const std::size_t scored = scored_count(ex);
  if (scored == 0) return 0.0;
  double loss = 0.0;
  if (model.is_graph()) {
    const StateCache states = run_passes(pr, inputs, model.graph, model.mode());
    for (NodeId t : pr.order)
      if (t != 0) loss -= log_probability(model.graph.W_s * head_features(states, t, model.mode()), ex.labels[t]);
  } else {
    for (NodeId t : pr.order)
      if (t != 0) loss -= log_probability(ffnn_logits(inputs[t], model.ffnn), ex.labels[t]);
  }
  return loss / static_cast<double>(scored);
}

double thread_loss(std::span<const NodePrediction> predictions, std::span<const std::size_t> labels) {
  double loss = 0.0;
  std::size_t n = 0;
  for (const auto& p : predictions) {
    if (p.pruned) continue;
    if (p.node >= labels.size() || labels[p.node] >= kLevels) throw ConfigError("thread_loss: missing label");
    loss -= std::log(p.probabilities[labels[p.node]]);
    ++n;
  }
  return n ? loss / static_cast<double>(n) : 0.0;
}

double accumulate_gradients(const Model& model, const ThreadExample& ex, Model& grad) {
  if (grad.kind != model.kind || !(grad.dims == model.dims))
    throw DimensionError("gradient buffer does not match the model");
  check_labels(ex);
  const auto inputs = build_inputs(model, ex);
  const double loss = model.is_graph() ? graph_gradients(model, ex, inputs, grad) : ffnn_gradients(model, ex, inputs, grad);
  if (!std::isfinite(loss)) throw NumericError("non-finite loss on thread '" + ex.thread_id() + "'");
  check_finite(grad);
  return loss;
}

Model gradients(const Model& model, const ThreadExample& ex, double* loss) {
  Model grad = Model::zeros(model.kind, model.dims);
  const double l = accumulate_gradients(model, ex, grad);
  if (loss) *loss = l;
  return grad;
}

double clip_gradients(Model& grad, double max_norm) {
  double sq = 0.0;
  auto views = parameters(grad);
  for (const auto& p : views)
    for (Index i = 0; i < p.size(); ++i) sq += p.data[i] * p.data[i];
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : views)
      for (Index i = 0; i < p.size(); ++i) p.data[i] *= scale;
  }
  return norm;
}

AdadeltaState::AdadeltaState(const Model& like, double rho, double epsilon) : rho_(rho), epsilon_(epsilon) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("adadelta rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adadelta epsilon must be positive");
  for (const auto& p : parameters(like)) {
    mean_sq_grad_.push_back(Eigen::ArrayXd::Zero(p.size()));
    mean_sq_delta_.push_back(Eigen::ArrayXd::Zero(p.size()));
  }
}

void AdadeltaState::step(Model& params, const Model& grads) {
  auto x = parameters(params);
  const auto g = parameters(grads);
  if (x.size() != mean_sq_grad_.size() || g.size() != x.size())
    throw DimensionError("adadelta: parameter layout mismatch");
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].size() != g[k].size() || x[k].size() != mean_sq_grad_[k].size())
      throw DimensionError("adadelta: shape mismatch in '" + std::string(x[k].name) + "'");
    auto& eg = mean_sq_grad_[k];
    auto& ed = mean_sq_delta_[k];
    for (Index i = 0; i < x[k].size(); ++i) {
      const double gi = g[k].data[i];
      eg[i] = rho_ * eg[i] + (1.0 - rho_) * gi * gi;
      const double delta = -std::sqrt(ed[i] + epsilon_) / std::sqrt(eg[i] + epsilon_) * gi;
      ed[i] = rho_ * ed[i] + (1.0 - rho_) * delta * delta;
      x[k].data[i] += delta;
    }
  }
}

std::vector<ScoredComment> score_comments(const Model& model, std::span<const ThreadExample> examples,
                                          std::size_t workers) {
  std::vector<std::vector<ScoredComment>> per_thread(examples.size());
  parallel_for(examples.size(), workers, [&](std::size_t i) {
    const auto& ex = examples[i];
    for (const auto& p : predict_thread(model, ex)) {
      ScoredComment c;
      c.thread_id = ex.thread_id();
      c.comment_id = ex.tree.record(p.node).id;
      c.label = ex.labels[p.node];
      c.predicted = p.level;
      c.n_previous = static_cast<std::size_t>(ex.raw_context.empty() ? p.node - 1
                                                                      : ex.raw_context[p.node][kPreviousComments]);
      c.pruned = p.pruned;
      per_thread[i].push_back(std::move(c));
    }
  });
  std::vector<ScoredComment> out;
  for (auto& v : per_thread) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

std::vector<Distribution> predict_distributions(const Model& model, std::span<const ThreadExample> examples,
                                                std::size_t workers) {
  std::vector<std::vector<Distribution>> per_thread(examples.size());
  parallel_for(examples.size(), workers, [&](std::size_t i) {
    for (const auto& p : predict_thread(model, examples[i])) per_thread[i].push_back(p.probabilities);
  });
  std::vector<Distribution> out;
  for (auto& v : per_thread) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string TrainResult::log_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,dev_macro_f1,dev_weighted_f1,seconds,hidden_dim\n";
  for (const auto& e : log)
    out << e.epoch << ',' << e.train_loss << ',' << e.dev_macro_f1 << ',' << e.dev_weighted_f1 << ',' << e.seconds
        << ',' << e.hidden_dim << '\n';
  return out.str();
}

namespace {

TrainResult train_one(std::span<const ThreadExample> train_set, std::span<const ThreadExample> dev_set,
                      const TrainConfig& config, std::size_t hidden_dim, std::size_t vocab_size,
                      const EmbeddingTable* pretrained, const std::function<void(const EpochLog&)>& on_epoch) {
  ModelDims dims;
  dims.hidden_dim = hidden_dim;
  dims.use_text = config.use_text;
  dims.embed_dim = config.embed_dim;
  dims.vocab_size = vocab_size;
  const std::uint64_t run_seed = config.seed * 1000003ull + hidden_dim;
  Model model = Model::random(config.kind, dims, config.init_scale, run_seed);
  if (config.use_text && pretrained) {
    if (pretrained->rows() != static_cast<Index>(vocab_size) || pretrained->cols() != static_cast<Index>(config.embed_dim))
      throw DimensionError("pretrained embedding table does not match vocabulary size x embedding dimension");
    model.embedding = *pretrained;
  }

  AdadeltaState optimizer(model, config.rho, config.epsilon);
  Rng shuffle_rng(run_seed ^ 0x5bd1e995ull);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  result.best_hidden_dim = hidden_dim;
  std::size_t since_best = 0;
  Model grad = Model::zeros(model.kind, model.dims);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      for (auto& p : parameters(grad)) std::fill(p.data, p.data + p.size(), 0.0);
      if (end - b == 1) {
        const auto& ex = train_set[order[b]];
        const double l = accumulate_gradients(model, ex, grad);
        loss_sum += l * static_cast<double>(scored_count(ex));
        loss_count += scored_count(ex);
      } else {
        // Per-thread gradients against a frozen snapshot, summed in batch order.
        std::vector<Model> partial(end - b);
        std::vector<double> losses(end - b);
        parallel_for(end - b, config.workers, [&](std::size_t k) {
          partial[k] = gradients(model, train_set[order[b + k]], &losses[k]);
        });
        for (std::size_t k = 0; k < partial.size(); ++k) {
          add_into(grad, partial[k]);
          const auto n = scored_count(train_set[order[b + k]]);
          loss_sum += losses[k] * static_cast<double>(n);
          loss_count += n;
        }
      }
      clip_gradients(grad, config.clip_norm);
      optimizer.step(model, grad);
    }

    EpochLog entry;
    entry.hidden_dim = hidden_dim;
    entry.epoch = epoch;
    entry.train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    if (!std::isfinite(entry.train_loss))
      throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
    const auto scored = score_comments(model, dev_set, config.workers);
    std::vector<std::size_t> labels, predicted;
    for (const auto& c : scored) {
      labels.push_back(c.label);
      predicted.push_back(c.predicted);
    }
    entry.dev_macro_f1 = macro_f1(labels, predicted);
    entry.dev_weighted_f1 = weighted_f1(labels, predicted);
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.dev_weighted_f1 > result.best_dev_weighted_f1) {
      result.best_dev_weighted_f1 = entry.dev_weighted_f1;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= config.patience) break;
  }
  return result;
}

} // namespace

TrainResult train(std::span<const ThreadExample> train_set, std::span<const ThreadExample> dev_set,
                  const TrainConfig& config, std::size_t vocab_size, const EmbeddingTable* pretrained,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training split is empty");
  if (dev_set.empty()) throw ConfigError("development split is empty");
  TrainResult best;
  for (std::size_t dh : config.hidden_dims) {
    TrainResult r = train_one(train_set, dev_set, config, dh, vocab_size, pretrained, on_epoch);
    const bool better = r.best_dev_weighted_f1 > best.best_dev_weighted_f1;
    std::vector<EpochLog> log = std::move(best.log);
    log.insert(log.end(), r.log.begin(), r.log.end());
    if (better) best = std::move(r);
    best.log = std::move(log);
  }
  return best;
}

ThreadExample random_example(Rng& rng, std::size_t nodes, std::size_t vocab_size, double prune_probability) {
  std::vector<CommentRecord> records;
  std::vector<std::int64_t> times;
  for (std::size_t k = 0; k < nodes; ++k) {
    CommentRecord r;
    r.id = "n" + std::to_string(k);
    r.author_id = "u" + std::to_string(rng.below(3));
    if (k > 0) {
      const std::size_t parent = rng.below(k);
      r.parent_id = records[parent].id;
      r.created_utc = times[parent] + static_cast<std::int64_t>(rng.below(4));
    }
    times.push_back(r.created_utc);
    records.push_back(std::move(r));
  }
  ThreadExample ex{ThreadTree::build(std::move(records)), {}, {}, {}, {}, {}};
  const std::size_t n = ex.tree.size();
  ex.raw_context = extract_context(ex.tree);
  for (NodeId t = 0; t < n; ++t) {
    ContextFeatures f;
    for (auto& v : f) v = rng.normal();
    ex.context.push_back(f);
    std::vector<std::int32_t> ids(rng.below(4));
    for (auto& id : ids) id = static_cast<std::int32_t>(rng.below(std::max<std::size_t>(1, vocab_size)));
    ex.tokens.push_back(std::move(ids));
    ex.labels.push_back(t == 0 ? kNoLabel : rng.below(kLevels));
  }
  std::vector<bool> flags(n, false);
  for (NodeId t = 1; t < n; ++t) flags[t] = rng.bernoulli(prune_probability);
  ex.pruned = prune(ex.tree, flags);
  return ex;
}

const GradcheckGroup* GradcheckReport::group(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

std::string GradcheckReport::to_text() const {
  std::ostringstream out;
  out << "gradcheck: " << trials << " configurations, " << coordinates << " coordinates, " << seconds << " s\n";
  for (const auto& g : groups)
    out << "  " << g.name << ": max rel error " << g.max_relative_error << ", max |grad| " << g.max_abs_gradient
        << " (" << g.checked << " coords)\n";
  out << "max relative error " << max_relative_error << " (tolerance " << tolerance << ") "
      << (passed() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

GradcheckReport gradcheck(const GradcheckConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::size_t kGradcheckVocab = 6;
  constexpr std::size_t kGradcheckEmbed = 3;
  const std::size_t hidden_sizes[] = {2, 4, 8};
  const ModelKind kinds[] = {ModelKind::GraphBidirectional, ModelKind::GraphForward, ModelKind::NodeIndependent};

  Rng rng(config.seed);
  std::map<std::string, GradcheckGroup> groups;
  GradcheckReport report;
  report.tolerance = config.tolerance;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    ModelDims dims;
    dims.hidden_dim = hidden_sizes[trial % 3];
    dims.use_text = (trial / 3) % 2 == 0;
    dims.embed_dim = kGradcheckEmbed;
    dims.vocab_size = kGradcheckVocab;
    const ModelKind kind = kinds[(trial / 6) % 3];
    const bool with_pruning = (trial / 2) % 2 == 0;
    const std::size_t nodes = 3 + rng.below(10);
    const ThreadExample ex = random_example(rng, nodes, kGradcheckVocab, with_pruning ? 0.4 : 0.0);
    Model model = Model::random(kind, dims, config.param_scale, rng.next());

    Model analytic = gradients(model, ex);
    if (config.corrupt) config.corrupt(analytic);
    const auto a_views = parameters(std::as_const(analytic));
    auto p_views = parameters(model);
    for (std::size_t k = 0; k < p_views.size(); ++k) {
      auto& g = groups[std::string(p_views[k].name)];
      g.name = p_views[k].name;
      for (Index i = 0; i < p_views[k].size(); ++i) {
        double& theta = p_views[k].data[i];
        const double saved = theta;
        theta = saved + config.step;
        const double up = thread_loss(model, ex);
        theta = saved - config.step;
        const double down = thread_loss(model, ex);
        theta = saved;
        const double numeric = (up - down) / (2.0 * config.step);
        const double a = a_views[k].data[i];
        const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
        g.max_relative_error = std::max(g.max_relative_error, err);
        g.max_abs_gradient = std::max(g.max_abs_gradient, std::abs(a));
        ++g.checked;
        ++report.coordinates;
        report.max_relative_error = std::max(report.max_relative_error, err);
      }
    }
    ++report.trials;
  }
  for (auto& [name, g] : groups) report.groups.push_back(g);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

} // namespace threadlstm
