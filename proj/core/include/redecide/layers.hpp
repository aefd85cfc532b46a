#pragma once

#include <string>

#include "redecide/paramset.hpp"
#include "redecide/rng.hpp"
#include "redecide/tape.hpp"

namespace redecide {

// Gated recurrent cell. Convention (fixed across the project):
//   z = sigmoid(Wz x + Uz h + bz)        update gate
//   r = sigmoid(Wr x + Ur h + br)        reset gate
//   hcand = tanh(Wh x + Uh (r . h) + bh)
//   h' = (1 - z) . h + z . hcand
// i.e. z blends toward the candidate. Parameter names inside a ParamSet:
// "wz" "uz" "bz" "wr" "ur" "br" "wh" "uh" "bh" (nine blocks).
struct GruNodeIds {
  Tape::NodeId wz, uz, bz, wr, ur, br, wh, uh, bh;
};

GruNodeIds bind_gru(Tape& t, const ParamSet& params);
Tape::NodeId gru_cell_node(Tape& t, Tape::NodeId x, Tape::NodeId h,
                           const GruNodeIds& g);

// Value-only conveniences; each builds a scratch tape internally.
Array affine(const Array& x, const Array& w, const Array& b);
Array gru_cell(const Array& x, const Array& h, const ParamSet& params);
Array softmax(const Array& v);

enum class LossKind { kL1, kSmoothL1 };

LossKind loss_kind_from_string(const std::string& s);
std::string to_string(LossKind kind);

double loss(LossKind kind, const Array& pred, const Array& target);
Tape::NodeId loss_node(Tape& t, LossKind kind, Tape::NodeId pred,
                       const Array& target);

// Uniform Xavier/Glorot init over [-limit, limit], limit = sqrt(6/(in+out)).
Array xavier_matrix(std::size_t out, std::size_t in, Rng& rng);

// Nine-block gated-cell parameter set, square [width x width] weights.
ParamSet make_gru_params(std::size_t width, Rng& rng);

}  // namespace redecide
