#include "homog/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homog {

void stable_noise_spec::validate() const {
  if (!(gamma > 0.5) || !(gamma < 1.0))
    throw std::invalid_argument("stable_noise_spec: gamma must lie in (1/2,1)");
  if (!(skew >= -1.0) || !(skew <= 1.0))
    throw std::invalid_argument("stable_noise_spec: skew must lie in [-1,1]");
  if (!(scale > 0.0)) throw std::invalid_argument("stable_noise_spec: scale must be > 0");
}

double stable_sample(const stable_noise_spec& spec, rng_stream& rng) {
  spec.validate();
  return spec.scale * rng.stable(spec.exponent(), spec.skew);
}

levy_increments sample_levy_increments(const stable_noise_spec& spec, double T, double dt,
                                       rng_stream& rng) {
  spec.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("sample_levy_increments: dt must be > 0");
  long n = std::lround(T / dt);
  if (!(T > 0.0) || n < 1 || std::abs(double(n) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("sample_levy_increments: T must be a positive multiple of dt");
  levy_increments out;
  out.t.resize(static_cast<size_t>(n));
  out.dG.resize(static_cast<size_t>(n));
  const double step_scale = std::pow(dt, spec.gamma);
  for (long k = 0; k < n; ++k) {
    out.t[static_cast<size_t>(k)] = double(k) * dt;
    out.dG[static_cast<size_t>(k)] = step_scale * stable_sample(spec, rng);
  }
  return out;
}

rescaled_path evolve_superdiffusive(const slow_system_spec& spec, const fast_map_spec& map,
                                    double eta, double T, double grid_dt,
                                    evolve_stats* stats) {
  spec.validate();
  map.validate();
  if (spec.scaling != scaling_kind::superdiffusive)
    throw std::invalid_argument("evolve_superdiffusive: spec must use superdiffusive scaling");
  if (map.kind == map_family::doubling)
    throw std::invalid_argument(
        "evolve_superdiffusive: the doubling map has no neutral fixed point");
  if (map.gamma != spec.superdiffusive_gamma)
    throw std::invalid_argument(
        "evolve_superdiffusive: map gamma must equal the scaling gamma");
  if (spec.f0(0.0) == 0.0)
    throw std::invalid_argument(
        "evolve_superdiffusive: f0 must not vanish at the neutral fixed point");
  return evolve(spec, map, eta, T, grid_dt, stats);
}

marcus_result marcus_path(const sde_spec& spec, double T, double dt, rng_stream& rng) {
  if (spec.noise.kind != noise_spec::kind_t::stable)
    throw std::invalid_argument("marcus_path: noise must be stable");
  if (spec.interp != interpretation::marcus_via_transform)
    throw std::invalid_argument("marcus_path: interpretation must be marcus_via_transform");
  if (!(dt > 0.0) || dt > 0.01 + 1e-15)
    throw std::invalid_argument("marcus_path: dt must lie in (0, 0.01]");
  const long n = std::lround(T / dt);
  if (!(T > 0.0) || n < 1 || std::abs(double(n) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("marcus_path: T must be a positive multiple of dt");

  lowered_sde L = lower_sde(spec, dt);

  marcus_result res;
  res.z.epsilon = 0.0;
  res.z.interpolation = rescaled_path::interp_kind::piecewise_constant;
  res.z.grid.reserve(static_cast<size_t>(n) + 1);
  res.z.values.reserve(static_cast<size_t>(n) + 1);
  res.z.grid.push_back(0.0);
  res.z.values.push_back(L.z0);

  if (L.scheme == lowered_sde::scheme_t::em_jump) {
    double x[kernels::kBatch], xmin[kernels::kBatch], xmax[kernels::kBatch];
    kernels::stream_state st[kernels::kBatch];
    for (int l = 0; l < kernels::kBatch; ++l) {
      x[l] = L.z0;
      xmin[l] = L.z0;
      xmax[l] = L.z0;
      st[l] = rng.state();
    }
    for (long k = 1; k <= n; ++k) {
      kernels::em_jump_advance(L.jp, x, st, xmin, xmax, 1);
      if (!(x[0] > L.z_lo && x[0] < L.z_hi)) {
        res.domain_exit = true;
        res.exit_step = k;
        break;
      }
      res.z.grid.push_back(double(k) * dt);
      res.z.values.push_back(x[0]);
    }
    rng.state() = st[0];
  } else {
    double z = L.z0;
    for (long k = 1; k <= n; ++k) {
      double y = rng.stable(L.exponent, L.skew);
      double a;
      try {
        a = L.drift(z);
      } catch (const std::domain_error&) {
        res.domain_exit = true;
        res.exit_step = k;
        break;
      }
      z = (z + a * dt) + L.dg_scale * y;
      if (!(z > L.z_lo && z < L.z_hi)) {
        res.domain_exit = true;
        res.exit_step = k;
        break;
      }
      res.z.grid.push_back(double(k) * dt);
      res.z.values.push_back(z);
    }
  }

  res.x.epsilon = 0.0;
  res.x.interpolation = rescaled_path::interp_kind::piecewise_constant;
  res.x.grid = res.z.grid;
  res.x.values.resize(res.z.values.size());
  for (size_t i = 0; i < res.z.values.size(); ++i)
    res.x.values[i] = L.back_map(res.z.values[i]);
  return res;
}

}  // namespace homog
