#include "redecide/gradcheck.hpp"

#include <cmath>

#include "redecide/errors.hpp"

namespace redecide {

namespace {

double eval_loss(const LossGraph& fn, const ParamSet& params, double margin,
                 bool* kink) {
  Tape t;
  t.set_kink_margin(margin);
  std::map<std::string, Tape::NodeId> ids;
  for (const auto& [name, entry] : params) {
    ids.emplace(name, t.param(&entry.value));
  }
  Tape::NodeId loss = fn(t, ids);
  if (t.value(loss).size() != 1) {
    throw ArgumentError("grad_check: loss graph must produce a scalar");
  }
  const double v = t.value(loss)[0];
  if (!std::isfinite(v)) throw ProbeError("grad_check: non-finite loss at probe");
  if (kink) *kink = t.kink_proximal();
  return v;
}

}  // namespace

GradCheckReport grad_check(const LossGraph& fn, ParamSet& params, double step,
                           double tol) {
  GradCheckReport report;
  // A probe within 2*step of a relu / l1 / smooth-l1 joint would make the
  // central difference straddle the kink, so the rejection margin tracks the
  // step size.
  const double margin = std::max(2.0 * step, 1e-9);

  // Analytic pass; also decides probe admissibility.
  Tape t;
  t.set_kink_margin(margin);
  std::map<std::string, Tape::NodeId> ids;
  for (const auto& [name, entry] : params) {
    ids.emplace(name, t.param(&entry.value));
  }
  Tape::NodeId loss = fn(t, ids);
  if (t.value(loss).size() != 1) {
    throw ArgumentError("grad_check: loss graph must produce a scalar");
  }
  if (!std::isfinite(t.value(loss)[0])) {
    throw ProbeError("grad_check: non-finite loss at probe");
  }
  if (t.kink_proximal()) {
    report.rejected = true;
    return report;
  }
  t.backward(loss);

  for (auto& [name, entry] : params) {
    double worst = 0.0;
    const Array& analytic = t.grad(ids.at(name));
    Array& w = entry.value;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      bool kink = false;
      w[i] = saved + step;
      const double up = eval_loss(fn, params, margin, &kink);
      bool kink2 = false;
      w[i] = saved - step;
      const double down = eval_loss(fn, params, margin, &kink2);
      w[i] = saved;
      if (kink || kink2) {
        // Perturbation crossed a kink; skip this component rather than
        // reporting a spurious mismatch.
        continue;
      }
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 0.01});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    report.per_param.push_back({name, worst});
    report.max_rel_err = std::max(report.max_rel_err, worst);
  }
  report.passed = report.max_rel_err < tol;
  return report;
}

}  // namespace redecide
