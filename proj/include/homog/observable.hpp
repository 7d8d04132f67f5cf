#pragma once

#include <functional>
#include <stdexcept>

namespace homog {

// observable of the fast variable. The identity kind is what the covariance
// and coupling paths lower onto the batch kernels; custom evaluators run
// through the scalar fallbacks.
struct observable_spec {
  enum class kind_t { identity, custom };
  kind_t kind = kind_t::identity;
  std::function<double(double)> evaluator;  // custom only
  // subtract an empirical mean before summing; identity on a symmetric
  // attractor already has mean zero, but centering is still applied so the
  // estimators never rely on exact symmetry
  bool centered = true;
  // constant shift applied after evaluation, f0(y) = base(y) - shift; used by
  // the superdiffusive driver where f0(0) must not vanish
  double shift = 0.0;

  double operator()(double y) const {
    if (kind == kind_t::identity) return y - shift;
    if (!evaluator) throw std::logic_error("observable: custom kind without evaluator");
    return evaluator(y) - shift;
  }
};

}  // namespace homog
