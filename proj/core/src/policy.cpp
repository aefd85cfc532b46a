#include "redecide/policy.hpp"

#include <utility>

#include "redecide/errors.hpp"

namespace redecide {

ArchKind arch_kind_from_string(const std::string& s) {
  if (s == "base") return ArchKind::kBase;
  if (s == "fmp1") return ArchKind::kFmp1;
  if (s == "fmp2") return ArchKind::kFmp2;
  throw ArgumentError("unknown architecture: " + s);
}

std::string to_string(ArchKind kind) {
  switch (kind) {
    case ArchKind::kBase: return "base";
    case ArchKind::kFmp1: return "fmp1";
    default: return "fmp2";
  }
}

MemEncoderKind mem_encoder_from_string(const std::string& s) {
  if (s == "identity") return MemEncoderKind::kIdentity;
  if (s == "replica") return MemEncoderKind::kReplica;
  if (s == "learned") return MemEncoderKind::kLearned;
  throw ArgumentError("unknown memory encoder kind: " + s);
}

std::string to_string(MemEncoderKind kind) {
  switch (kind) {
    case MemEncoderKind::kIdentity: return "identity";
    case MemEncoderKind::kReplica: return "replica";
    default: return "learned";
  }
}

namespace {

ParamSet make_encoder(std::size_t in_dim, std::size_t width, Rng& rng) {
  ParamSet p;
  p.add("w1", xavier_matrix(width, in_dim, rng));
  p.add("b1", Array::zeros({width}));
  p.add("w2", xavier_matrix(width, width, rng));
  p.add("b2", Array::zeros({width}));
  return p;
}

ParamSet copy_params(const ParamSet& src, bool trainable) {
  ParamSet out;
  for (const auto& [name, entry] : src) out.add(name, entry.value, trainable);
  return out;
}

Array tile_to(const Array& values, std::size_t width) {
  Array out({width});
  const std::size_t n = values.size();
  for (std::size_t j = 0; j < width; ++j) out[j] = values[j % n];
  return out;
}

}  // namespace

std::size_t argmax_over_support(const Array& scores, const FailureMemory& m) {
  if (scores.size() != m.size()) {
    throw DimensionError("score vector and memory length differ");
  }
  bool found = false;
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (m.values[i] <= 0.0) continue;
    if (!found || scores[i] > best_score) {
      found = true;
      best = i;
      best_score = scores[i];
    }
  }
  if (!found) throw ExhaustedActionsError("every action has already failed");
  return best;
}

PolicyWeights PolicyWeights::make_base(std::size_t obs_dim,
                                       std::size_t action_count,
                                       std::size_t embed_width, Rng& rng) {
  if (obs_dim == 0 || action_count == 0 || embed_width == 0) {
    throw ArgumentError("make_base: dimensions must be positive");
  }
  PolicyWeights w;
  w.arch.kind = ArchKind::kBase;
  w.arch.obs_dim = obs_dim;
  w.arch.action_count = action_count;
  w.arch.embed_width = embed_width;
  w.obs_encoder = make_encoder(obs_dim, embed_width, rng);
  w.base_decoder.add("w", xavier_matrix(action_count, embed_width, rng));
  w.base_decoder.add("b", Array::zeros({action_count}));
  return w;
}

PolicyWeights PolicyWeights::make_failure_aware(const PolicyWeights& base,
                                                ArchKind kind,
                                                MemEncoderKind mem_encoder,
                                                MemoryMode memory_mode,
                                                Rng& rng) {
  if (kind == ArchKind::kBase) {
    throw ArgumentError("make_failure_aware: expected a failure-aware arch");
  }
  PolicyWeights w;
  w.arch = base.arch;
  w.arch.kind = kind;
  w.arch.mem_encoder = mem_encoder;
  w.arch.memory_mode = memory_mode;
  w.obs_encoder = copy_params(base.obs_encoder, /*trainable=*/false);
  w.base_decoder = copy_params(base.base_decoder, /*trainable=*/false);
  const std::size_t n = w.arch.action_count;
  const std::size_t width = w.arch.embed_width;
  if (kind == ArchKind::kFmp1 && mem_encoder == MemEncoderKind::kIdentity) {
    // Value head over the masked affordance map; the identity start point
    // makes the untrained policy coincide with the sorting policy.
    w.decoder.add("w", Array::identity(n));
    w.decoder.add("b", Array::zeros({n}));
  } else {
    w.decoder = copy_params(base.base_decoder, /*trainable=*/true);
  }
  const bool learned_mem =
      (kind == ArchKind::kFmp2) || (mem_encoder == MemEncoderKind::kLearned);
  if (learned_mem) {
    w.mem_encoder = make_encoder(n, width, rng);
  }
  if (kind == ArchKind::kFmp2) {
    w.recurrent = make_gru_params(width, rng);
  }
  return w;
}

std::vector<std::string> PolicyWeights::shared_partition() const {
  std::vector<std::string> names;
  for (const auto& n : obs_encoder.names()) names.push_back("obs_encoder/" + n);
  for (const auto& n : base_decoder.names()) names.push_back("base_decoder/" + n);
  return names;
}

std::vector<std::pair<std::string, const ParamSet*>> PolicyWeights::sections() const {
  return {{"base_decoder", &base_decoder},
          {"decoder", &decoder},
          {"mem_encoder", &mem_encoder},
          {"obs_encoder", &obs_encoder},
          {"recurrent", &recurrent}};
}

std::vector<std::pair<std::string, ParamSet*>> PolicyWeights::sections() {
  return {{"base_decoder", &base_decoder},
          {"decoder", &decoder},
          {"mem_encoder", &mem_encoder},
          {"obs_encoder", &obs_encoder},
          {"recurrent", &recurrent}};
}

Tape::NodeId BoundWeights::at(const std::string& key) const {
  auto it = ids.find(key);
  if (it == ids.end()) throw ArgumentError("unbound weight: " + key);
  return it->second;
}

BoundWeights bind_weights(Tape& t, const PolicyWeights& w) {
  BoundWeights b;
  for (const auto& [prefix, set] : w.sections()) {
    for (const auto& [name, entry] : *set) {
      b.ids.emplace(prefix + "/" + name, t.param(&entry.value));
    }
  }
  return b;
}

Tape::NodeId obs_embedding_node(Tape& t, const BoundWeights& b, Tape::NodeId obs) {
  auto h = t.tanh(t.affine(obs, b.at("obs_encoder/w1"), b.at("obs_encoder/b1")));
  return t.relu(t.affine(h, b.at("obs_encoder/w2"), b.at("obs_encoder/b2")));
}

Tape::NodeId base_logits_node(Tape& t, const BoundWeights& b, Tape::NodeId obs) {
  auto e = obs_embedding_node(t, b, obs);
  return t.affine(e, b.at("base_decoder/w"), b.at("base_decoder/b"));
}

namespace {

Tape::NodeId learned_mem_embedding(Tape& t, const BoundWeights& b,
                                   Tape::NodeId mem) {
  auto h = t.tanh(t.affine(mem, b.at("mem_encoder/w1"), b.at("mem_encoder/b1")));
  return t.relu(t.affine(h, b.at("mem_encoder/w2"), b.at("mem_encoder/b2")));
}

}  // namespace

Tape::NodeId fmp1_q_node(Tape& t, const PolicyWeights& w, const BoundWeights& b,
                         Tape::NodeId obs, Tape::NodeId mem) {
  Tape::NodeId masked = 0;
  switch (w.arch.mem_encoder) {
    case MemEncoderKind::kIdentity: {
      auto aff = t.softmax(base_logits_node(t, b, obs));
      masked = t.mul(aff, mem);
      break;
    }
    case MemEncoderKind::kReplica: {
      auto emb = obs_embedding_node(t, b, obs);
      auto mask = t.input(tile_to(t.value(mem), w.arch.embed_width));
      masked = t.mul(emb, mask);
      break;
    }
    case MemEncoderKind::kLearned: {
      auto emb = obs_embedding_node(t, b, obs);
      masked = t.mul(emb, learned_mem_embedding(t, b, mem));
      break;
    }
  }
  return t.affine(masked, b.at("decoder/w"), b.at("decoder/b"));
}

Tape::NodeId fmp2_hidden_update_node(Tape& t, const PolicyWeights& w,
                                     const BoundWeights& b, Tape::NodeId embed,
                                     Tape::NodeId hidden) {
  (void)w;
  GruNodeIds g{b.at("recurrent/wz"), b.at("recurrent/uz"), b.at("recurrent/bz"),
               b.at("recurrent/wr"), b.at("recurrent/ur"), b.at("recurrent/br"),
               b.at("recurrent/wh"), b.at("recurrent/uh"), b.at("recurrent/bh")};
  return gru_cell_node(t, embed, hidden, g);
}

Tape::NodeId fmp2_mem_embedding_node(Tape& t, const PolicyWeights& w,
                                     const BoundWeights& b, Tape::NodeId mem) {
  (void)w;
  return learned_mem_embedding(t, b, mem);
}

Tape::NodeId fmp2_q_node(Tape& t, const BoundWeights& b, Tape::NodeId hidden) {
  return t.affine(hidden, b.at("decoder/w"), b.at("decoder/b"));
}

FailureMemory derive_memory(const PolicyWeights& w, const Array& obs,
                            const std::vector<std::size_t>& failed) {
  FailureMemory m;
  if (w.arch.memory_mode == MemoryMode::kNormalized) {
    AffordanceMap aff = base_forward(obs, w);
    m = init_memory(MemoryMode::kNormalized, w.arch.action_count, &aff);
  } else {
    m = init_memory(MemoryMode::kBinary, w.arch.action_count);
  }
  for (std::size_t a : failed) m = update_memory(std::move(m), a);
  return m;
}

Tape::NodeId policy_q_node(Tape& t, const PolicyWeights& w,
                           const BoundWeights& b, const Array& obs,
                           const std::vector<std::size_t>& failed_prefix) {
  if (w.arch.kind == ArchKind::kFmp1) {
    FailureMemory m = derive_memory(w, obs, failed_prefix);
    return fmp1_q_node(t, w, b, t.param(&obs), t.input(std::move(m.values)));
  }
  if (w.arch.kind == ArchKind::kFmp2) {
    auto hidden = t.input(Array::zeros({w.arch.embed_width}));
    auto seed = obs_embedding_node(t, b, t.param(&obs));
    hidden = fmp2_hidden_update_node(t, w, b, seed, hidden);
    std::vector<std::size_t> prefix;
    prefix.reserve(failed_prefix.size());
    for (std::size_t a : failed_prefix) {
      prefix.push_back(a);
      FailureMemory m = derive_memory(w, obs, prefix);
      auto embed = fmp2_mem_embedding_node(t, w, b, t.input(std::move(m.values)));
      hidden = fmp2_hidden_update_node(t, w, b, embed, hidden);
    }
    return fmp2_q_node(t, b, hidden);
  }
  throw ArgumentError("policy_q_node: weights are not failure-aware");
}

Array policy_q_values(const PolicyWeights& w, const Array& obs,
                      const std::vector<std::size_t>& failed_prefix) {
  Tape t;
  BoundWeights b = bind_weights(t, w);
  return t.value(policy_q_node(t, w, b, obs, failed_prefix));
}

AffordanceMap base_forward(const Array& obs, const PolicyWeights& w) {
  if (obs.size() != w.arch.obs_dim) {
    throw DimensionError("base_forward: observation shape mismatch");
  }
  Tape t;
  BoundWeights b = bind_weights(t, w);
  auto probs = t.softmax(base_logits_node(t, b, t.param(&obs)));
  return AffordanceMap{t.value(probs)};
}

std::size_t select_random(const FailureMemory& m, Rng& rng) {
  std::vector<std::size_t> support;
  support.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.values[i] > 0.0) support.push_back(i);
  }
  if (support.empty()) throw ExhaustedActionsError("every action has already failed");
  return support[rng.below(support.size())];
}

std::size_t select_sorting(const AffordanceMap& aff, const FailureMemory& m) {
  return argmax_over_support(aff.values, m);
}

std::size_t select_lpre(const AffordanceMap& aff, const FailureMemory& m,
                        std::size_t trial_index, Rng& rng) {
  if (trial_index == 0) return select_sorting(aff, m);
  return select_random(m, rng);
}

std::size_t select_fmp1(const Array& obs, const FailureMemory& m,
                        const PolicyWeights& w) {
  if (w.arch.kind != ArchKind::kFmp1) {
    throw ArgumentError("select_fmp1: weights are not a feature-masking policy");
  }
  if (m.size() != w.arch.action_count) {
    throw DimensionError("select_fmp1: memory length mismatch");
  }
  Tape t;
  BoundWeights b = bind_weights(t, w);
  auto q = fmp1_q_node(t, w, b, t.param(&obs), t.input(m.values));
  return argmax_over_support(t.value(q), m);
}

PolicyState fmp2_initial_state(const PolicyWeights& w) {
  return PolicyState{Array::zeros({w.arch.embed_width}), 0};
}

std::pair<std::size_t, PolicyState> select_fmp2(const Array& obs,
                                                const FailureMemory& m,
                                                const PolicyState& state,
                                                const PolicyWeights& w) {
  if (w.arch.kind != ArchKind::kFmp2) {
    throw ArgumentError("select_fmp2: weights are not a recurrent-memory policy");
  }
  if (state.hidden.size() != w.arch.embed_width) {
    throw DimensionError("select_fmp2: hidden width mismatch");
  }
  if (m.size() != w.arch.action_count) {
    throw DimensionError("select_fmp2: memory length mismatch");
  }
  Tape t;
  BoundWeights b = bind_weights(t, w);
  auto hidden_in = t.input(state.hidden);
  Tape::NodeId embed;
  if (state.trial_index == 0) {
    embed = obs_embedding_node(t, b, t.param(&obs));
  } else {
    embed = fmp2_mem_embedding_node(t, w, b, t.input(m.values));
  }
  auto hidden_out = fmp2_hidden_update_node(t, w, b, embed, hidden_in);

  std::size_t action;
  if (state.trial_index == 0 && !w.arch.fmp2_emits_first) {
    // First action defers to the base policy; the pass above only seeds the
    // hidden state.
    auto probs = t.softmax(base_logits_node(t, b, t.param(&obs)));
    action = argmax_over_support(t.value(probs), m);
  } else {
    auto q = fmp2_q_node(t, b, hidden_out);
    action = argmax_over_support(t.value(q), m);
  }
  return {action, PolicyState{t.value(hidden_out), state.trial_index + 1}};
}

namespace {

class RandomPolicy final : public DecisionPolicy {
 public:
  explicit RandomPolicy(std::size_t n) : n_(n) {}
  std::size_t action_count() const override { return n_; }
  void begin_episode(const Array&) override {}
  std::size_t choose(const FailureMemory& m, std::size_t, Rng& rng) override {
    return select_random(m, rng);
  }

 private:
  std::size_t n_;
};

class SortingPolicy final : public DecisionPolicy {
 public:
  explicit SortingPolicy(const PolicyWeights& base) : weights_(&base) {}
  std::size_t action_count() const override { return weights_->arch.action_count; }
  void begin_episode(const Array& obs) override {
    aff_ = base_forward(obs, *weights_);
  }
  std::size_t choose(const FailureMemory& m, std::size_t, Rng&) override {
    return select_sorting(aff_, m);
  }
  AffordanceMap affordance() const override { return aff_; }

 private:
  const PolicyWeights* weights_;
  AffordanceMap aff_;
};

class LprePolicy final : public DecisionPolicy {
 public:
  explicit LprePolicy(const PolicyWeights& base) : weights_(&base) {}
  std::size_t action_count() const override { return weights_->arch.action_count; }
  void begin_episode(const Array& obs) override {
    aff_ = base_forward(obs, *weights_);
  }
  std::size_t choose(const FailureMemory& m, std::size_t t, Rng& rng) override {
    return select_lpre(aff_, m, t, rng);
  }
  AffordanceMap affordance() const override { return aff_; }

 private:
  const PolicyWeights* weights_;
  AffordanceMap aff_;
};

class Fmp1Policy final : public DecisionPolicy {
 public:
  explicit Fmp1Policy(const PolicyWeights& w) : weights_(&w) {}
  std::size_t action_count() const override { return weights_->arch.action_count; }
  void begin_episode(const Array& obs) override {
    obs_ = obs;
    aff_ = base_forward(obs, *weights_);
  }
  std::size_t choose(const FailureMemory& m, std::size_t t, Rng&) override {
    if (t == 0) return select_sorting(aff_, m);  // first action from the base policy
    return select_fmp1(obs_, m, *weights_);
  }
  AffordanceMap affordance() const override { return aff_; }

 private:
  const PolicyWeights* weights_;
  Array obs_;
  AffordanceMap aff_;
};

class Fmp2Policy final : public DecisionPolicy {
 public:
  explicit Fmp2Policy(const PolicyWeights& w) : weights_(&w) {}
  std::size_t action_count() const override { return weights_->arch.action_count; }
  void begin_episode(const Array& obs) override {
    obs_ = obs;
    aff_ = base_forward(obs, *weights_);
    state_ = fmp2_initial_state(*weights_);
  }
  std::size_t choose(const FailureMemory& m, std::size_t, Rng&) override {
    auto [action, next] = select_fmp2(obs_, m, state_, *weights_);
    state_ = std::move(next);
    return action;
  }
  AffordanceMap affordance() const override { return aff_; }

 private:
  const PolicyWeights* weights_;
  Array obs_;
  AffordanceMap aff_;
  PolicyState state_;
};

}  // namespace

std::unique_ptr<DecisionPolicy> make_random_policy(std::size_t action_count) {
  return std::make_unique<RandomPolicy>(action_count);
}

std::unique_ptr<DecisionPolicy> make_sorting_policy(const PolicyWeights& base) {
  return std::make_unique<SortingPolicy>(base);
}

std::unique_ptr<DecisionPolicy> make_lpre_policy(const PolicyWeights& base) {
  return std::make_unique<LprePolicy>(base);
}

std::unique_ptr<DecisionPolicy> make_fmp1_policy(const PolicyWeights& weights) {
  if (weights.arch.kind != ArchKind::kFmp1) {
    throw ArgumentError("make_fmp1_policy: arch mismatch");
  }
  return std::make_unique<Fmp1Policy>(weights);
}

std::unique_ptr<DecisionPolicy> make_fmp2_policy(const PolicyWeights& weights) {
  if (weights.arch.kind != ArchKind::kFmp2) {
    throw ArgumentError("make_fmp2_policy: arch mismatch");
  }
  return std::make_unique<Fmp2Policy>(weights);
}

bool policy_needs_training(const std::string& name) {
  return name == "fmp1" || name == "fmp1.5" || name == "fmp2";
}

std::unique_ptr<DecisionPolicy> make_policy(const std::string& name,
                                            const PolicyWeights* weights,
                                            std::size_t action_count) {
  if (name == "re") return make_random_policy(action_count);
  if (weights == nullptr) {
    throw ArgumentError("policy '" + name + "' requires weights");
  }
  if (weights->arch.action_count != action_count) {
    throw ArgumentError("policy weights disagree with the task action count");
  }
  if (name == "sp") return make_sorting_policy(*weights);
  if (name == "lpre") return make_lpre_policy(*weights);
  if (name == "fmp1" || name == "fmp1.5") return make_fmp1_policy(*weights);
  if (name == "fmp2") return make_fmp2_policy(*weights);
  throw ArgumentError("unknown policy: " + name);
}

}  // namespace redecide
