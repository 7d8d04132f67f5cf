#pragma once

#include <functional>

#include "homog/kernels/kernels.hpp"
#include "homog/path.hpp"
#include "homog/rng.hpp"
#include "homog/transform.hpp"

namespace homog {

// drift F(x). The structured forms are what the batch integrators accept
// directly; custom falls back to scalar stepping.
struct drift_spec {
  enum class form_t {
    zero,
    affine,             // c0 + c1 x
    reciprocal_affine,  // c0/u + c1 u with u = x/2 + e0
    exp_affine,         // c0 exp(-x) + c1
    custom,
  };
  form_t form = form_t::zero;
  double c0 = 0.0, c1 = 0.0, e0 = 0.0;
  std::function<double(double)> fn;

  double operator()(double x) const;
};

struct noise_spec {
  enum class kind_t { brownian, stable };
  kind_t kind = kind_t::brownian;
  double exponent = 2.0;  // stable index in (1,2); ignored for brownian
  double skew = 1.0;      // stable skewness in [-1,1]
  double scale = 1.0;     // stable scale factor
};

// convention for reading the drift/diffusion pair
enum class interpretation {
  ito,                   // dX = F dt + sigma h(X) dW
  stratonovich,          // dX = F dt + sigma h(X) o dW
  drift_corrected,       // Ito with F + (1/2) h h' (sigma2 - m2): the slow limit
  marcus_via_transform,  // integrate Z = r(X) with unit noise, map back
};

struct sde_spec {
  drift_spec drift;      // F, prior to any interpretation correction
  h_function diffusion;  // h
  double sigma = 1.0;    // noise amplitude multiplying h (brownian)
  interpretation interp = interpretation::ito;
  double xi = 0.0;  // initial condition
  noise_spec noise;
  double sigma2 = 0.0;           // limiting variance of the fast sums
  double f0_second_moment = 0.0;  // m2 = int f0^2 dmu
};

// integrator lowering: which stepping loop runs and with what parameters.
// Built once per spec so ensembles and single paths share the exact same
// arithmetic.
struct lowered_sde {
  enum class scheme_t { em, heun, em_jump, scalar_em, scalar_heun, scalar_em_jump };
  scheme_t scheme = scheme_t::em;
  kernels::em_params em{};
  kernels::em_jump_params jp{};
  double z0 = 0.0;           // initial point in integration coordinates
  bool transformed = false;  // integration runs in Z = r(X)
  std::function<double(double)> back_map;  // r_inverse when transformed
  double z_lo = 0.0, z_hi = 0.0;  // open interval the state must stay in
  // scalar fallbacks (integration coordinates)
  std::function<double(double)> drift;
  std::function<double(double)> diff;
  double dg_scale = 0.0, exponent = 2.0, skew = 1.0;  // scalar_em_jump
};

// throws std::invalid_argument for stable noise without the Marcus
// interpretation ("Marcus integral required for jump noise") and for
// out-of-range noise parameters
lowered_sde lower_sde(const sde_spec& spec, double dt);

// one path on the grid {0, dt, ..., T}; T must be an integer multiple of dt.
// pre: 0 < dt <= 0.01. Throws std::runtime_error if a transformed state
// leaves the image interval (jump paths record the exit instead; see levy).
rescaled_path integrate_path(const sde_spec& spec, double T, double dt, rng_stream& rng);

}  // namespace homog
