#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "redecide/episode.hpp"
#include "redecide/layers.hpp"
#include "redecide/paramset.hpp"
#include "redecide/rng.hpp"
#include "redecide/tape.hpp"

namespace redecide {

enum class ArchKind { kBase, kFmp1, kFmp2 };

// Memory-encoder variants for the feature-masking policy.
//   identity  the observation embedding is the affordance map itself and the
//             memory multiplies it directly; with an identity decoder this is
//             exactly the sorting policy.
//   replica   the memory vector is tiled across the embedding width and
//             multiplies the (rectified) observation embedding.
//   learned   a trained encoder with the same architecture as the observation
//             encoder produces the mask (the "1.5" variant).
enum class MemEncoderKind { kIdentity, kReplica, kLearned };

ArchKind arch_kind_from_string(const std::string& s);
std::string to_string(ArchKind kind);
MemEncoderKind mem_encoder_from_string(const std::string& s);
std::string to_string(MemEncoderKind kind);

struct ArchSpec {
  ArchKind kind = ArchKind::kBase;
  std::size_t obs_dim = 0;
  std::size_t action_count = 0;
  std::size_t embed_width = 64;
  MemEncoderKind mem_encoder = MemEncoderKind::kIdentity;
  MemoryMode memory_mode = MemoryMode::kBinary;
  // When set, the recurrent policy emits the first action itself from its
  // seeded hidden state instead of deferring to the base policy.
  bool fmp2_emits_first = false;
};

// Parameter bundle for one policy. The base sections (observation encoder and
// affordance decoder) are shared with the base policy and frozen during
// failure-aware training; the value head starts from the affordance decoder
// where shapes allow and trains freely.
//
// Observation encoder: affine(obs -> width), tanh, affine(width -> width),
// relu. The rectified output keeps masked embeddings non-negative, so zeroing
// an entry can only demote it. Affordance head: affine(width -> n) + softmax.
struct PolicyWeights {
  ArchSpec arch;
  ParamSet obs_encoder;   // "w1" "b1" "w2" "b2"
  ParamSet base_decoder;  // "w" "b"
  ParamSet mem_encoder;   // learned variants: "w1" "b1" "w2" "b2"
  ParamSet decoder;       // value head "w" "b"
  ParamSet recurrent;     // gated cell blocks (kFmp2 only)

  static PolicyWeights make_base(std::size_t obs_dim, std::size_t action_count,
                                 std::size_t embed_width, Rng& rng);
  // Builds a failure-aware policy around trained base weights: base sections
  // are copied and frozen, the value head is warm-started, and the memory
  // encoder / recurrent cell are freshly initialized.
  static PolicyWeights make_failure_aware(const PolicyWeights& base,
                                          ArchKind kind,
                                          MemEncoderKind mem_encoder,
                                          MemoryMode memory_mode, Rng& rng);

  // Names of the parameters shared with the base policy, "section/name".
  std::vector<std::string> shared_partition() const;

  // All sections keyed by their serialization prefix, sorted.
  std::vector<std::pair<std::string, const ParamSet*>> sections() const;
  std::vector<std::pair<std::string, ParamSet*>> sections();
};

// Tape leaf ids for every parameter of a weight bundle.
struct BoundWeights {
  std::map<std::string, Tape::NodeId> ids;  // "section/name"
  Tape::NodeId at(const std::string& key) const;
};

BoundWeights bind_weights(Tape& t, const PolicyWeights& w);
// Binds FA sections from `fa` but base sections from `base_of`; used by the
// target network, which shares the frozen base.
Tape::NodeId obs_embedding_node(Tape& t, const BoundWeights& b, Tape::NodeId obs);
Tape::NodeId base_logits_node(Tape& t, const BoundWeights& b, Tape::NodeId obs);

// Graph builders shared by action selection and Q-learning. `mem` must be an
// input node holding the failure-memory values.
Tape::NodeId fmp1_q_node(Tape& t, const PolicyWeights& w, const BoundWeights& b,
                         Tape::NodeId obs, Tape::NodeId mem);
Tape::NodeId fmp2_hidden_update_node(Tape& t, const PolicyWeights& w,
                                     const BoundWeights& b, Tape::NodeId embed,
                                     Tape::NodeId hidden);
Tape::NodeId fmp2_mem_embedding_node(Tape& t, const PolicyWeights& w,
                                     const BoundWeights& b, Tape::NodeId mem);
Tape::NodeId fmp2_q_node(Tape& t, const BoundWeights& b, Tape::NodeId hidden);

// argmax of `scores` over {i : m[i] > 0}; ties break to the lowest index.
// Raises ExhaustedActionsError when the support is empty.
std::size_t argmax_over_support(const Array& scores, const FailureMemory& m);

// Failure memory reconstructed from an ordered failure list, using the
// bundle's memory mode (normalized mode seeds from the base affordance).
FailureMemory derive_memory(const PolicyWeights& w, const Array& obs,
                            const std::vector<std::size_t>& failed);

// Q-values of a failure-aware policy at the state reached after the given
// ordered failures. The recurrent architecture unrolls the whole prefix from
// a zero hidden state, so replayed and live evaluations agree exactly.
Array policy_q_values(const PolicyWeights& w, const Array& obs,
                      const std::vector<std::size_t>& failed_prefix);
Tape::NodeId policy_q_node(Tape& t, const PolicyWeights& w,
                           const BoundWeights& b, const Array& obs,
                           const std::vector<std::size_t>& failed_prefix);

// ---- Spec-level operations ----

// Affordance map of the base policy: softmax over decoder logits.
// Deterministic in (obs, weights).
AffordanceMap base_forward(const Array& obs, const PolicyWeights& w);

// Uniform draw over {i : m[i] > 0}.
std::size_t select_random(const FailureMemory& m, Rng& rng);

// argmax of aff[i] over {i : m[i] > 0}; ties break to the lowest index.
std::size_t select_sorting(const AffordanceMap& aff, const FailureMemory& m);

// Trial 0 follows the base policy's argmax; later trials explore uniformly
// over the untried actions.
std::size_t select_lpre(const AffordanceMap& aff, const FailureMemory& m,
                        std::size_t trial_index, Rng& rng);

// Feature-masking selection: argmax over untried actions of the value head
// applied to obs-embedding (.) encoded-memory.
std::size_t select_fmp1(const Array& obs, const FailureMemory& m,
                        const PolicyWeights& w);

struct PolicyState {
  Array hidden;  // zeros at episode start
  std::size_t trial_index = 0;
};

PolicyState fmp2_initial_state(const PolicyWeights& w);

// Recurrent-memory selection. At trial 0 the observation embedding seeds the
// hidden state (and the base policy supplies the action unless the arch flag
// says otherwise); afterwards the encoded memory drives the cell and the
// value head ranks the untried actions. The observation only enters through
// the hidden state after trial 0.
std::pair<std::size_t, PolicyState> select_fmp2(const Array& obs,
                                                const FailureMemory& m,
                                                const PolicyState& state,
                                                const PolicyWeights& w);

// ---- Episode-engine adapters ----

std::unique_ptr<DecisionPolicy> make_random_policy(std::size_t action_count);
std::unique_ptr<DecisionPolicy> make_sorting_policy(const PolicyWeights& base);
std::unique_ptr<DecisionPolicy> make_lpre_policy(const PolicyWeights& base);
std::unique_ptr<DecisionPolicy> make_fmp1_policy(const PolicyWeights& weights);
std::unique_ptr<DecisionPolicy> make_fmp2_policy(const PolicyWeights& weights);

// Baseline names: "re", "lpre", "sp"; learned: "fmp1", "fmp1.5", "fmp2".
bool policy_needs_training(const std::string& name);
std::unique_ptr<DecisionPolicy> make_policy(const std::string& name,
                                            const PolicyWeights* weights,
                                            std::size_t action_count);

}  // namespace redecide
