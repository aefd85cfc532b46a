#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "redecide/paramset.hpp"
#include "redecide/tape.hpp"

namespace redecide {

// Builds a scalar loss graph on the given tape. The checker creates one
// param leaf per ParamSet entry and passes the ids keyed by name.
using LossGraph = std::function<Tape::NodeId(
    Tape&, const std::map<std::string, Tape::NodeId>&)>;

struct GradCheckReport {
  struct Item {
    std::string name;
    double max_rel_err = 0.0;
  };
  std::vector<Item> per_param;
  double max_rel_err = 0.0;
  bool passed = false;
  // The probe point sits within the kink margin of a relu / l1 / smooth-l1
  // joint; finite differences are meaningless there and nothing was checked.
  bool rejected = false;
};

// Central finite differences against tape gradients at the current parameter
// values. rel err = |a - n| / max(|a|, |n|, 0.01). Parameters are perturbed
// in place and restored. Throws ProbeError on a non-finite loss.
GradCheckReport grad_check(const LossGraph& fn, ParamSet& params, double step,
                           double tol);

}  // namespace redecide
