#include "homog/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int kernel_drift_kind(drift_spec::form_t f) {
  switch (f) {
    case drift_spec::form_t::affine: return 0;
    case drift_spec::form_t::reciprocal_affine: return 1;
    case drift_spec::form_t::zero: return 2;
    case drift_spec::form_t::exp_affine: return 3;
    case drift_spec::form_t::custom: return -1;
  }
  return -1;
}

void fill_stable_constants(kernels::em_jump_params& jp, double alpha, double skew) {
  double ta = std::tan(0.5 * M_PI * alpha);
  jp.alpha = alpha;
  jp.cms_b = std::atan(skew * ta) / alpha;
  jp.cms_s = std::pow(1.0 + skew * skew * ta * ta, 0.5 / alpha);
  jp.inv_alpha = 1.0 / alpha;
  jp.one_minus_alpha_over_alpha = (1.0 - alpha) / alpha;
}

}  // namespace

double drift_spec::operator()(double x) const {
  switch (form) {
    case form_t::zero: return 0.0;
    case form_t::affine: return c0 + c1 * x;
    case form_t::reciprocal_affine: {
      double u = 0.5 * x + e0;
      return c0 / u + c1 * u;
    }
    case form_t::exp_affine: return c0 * std::exp(-x) + c1;
    case form_t::custom: return fn(x);
  }
  return 0.0;
}

lowered_sde lower_sde(const sde_spec& spec, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("lower_sde: dt must be > 0");
  const bool jumps = spec.noise.kind == noise_spec::kind_t::stable;
  if (jumps) {
    if (spec.interp != interpretation::marcus_via_transform)
      throw std::invalid_argument("Marcus integral required for jump noise");
    if (!(spec.noise.exponent > 1.0) || !(spec.noise.exponent < 2.0))
      throw std::invalid_argument("lower_sde: stable exponent must lie in (1,2)");
    if (!(spec.noise.skew >= -1.0) || !(spec.noise.skew <= 1.0))
      throw std::invalid_argument("lower_sde: skew must lie in [-1,1]");
    if (!(spec.noise.scale > 0.0))
      throw std::invalid_argument("lower_sde: scale must be > 0");
  } else if (!(spec.sigma >= 0.0)) {
    throw std::invalid_argument("lower_sde: sigma must be >= 0");
  }

  lowered_sde L;
  const h_function& h = spec.diffusion;
  const drift_spec& F = spec.drift;
  const bool sqrt_h = h.form == h_function::form_t::power && h.p == 0.5;
  const bool unit_h = h.form == h_function::form_t::one;

  if (spec.interp != interpretation::marcus_via_transform) {
    L.z0 = spec.xi;
    L.z_lo = -kInf;
    L.z_hi = kInf;

    drift_spec Fc = F;  // drift after folding the interpretation correction
    bool closed = F.form != drift_spec::form_t::custom;
    if (spec.interp == interpretation::drift_corrected) {
      const double gap = spec.sigma2 - spec.f0_second_moment;
      if (unit_h) {
        // h h' = 0: no correction
      } else if (sqrt_h) {
        // constant correction (1/4)(sigma2 - m2); exactly +0.0 when the
        // constants coincide, so the lowering matches the Ito one bit for bit
        double corr = 0.25 * gap;
        if (Fc.form == drift_spec::form_t::affine) {
          Fc.c0 += corr;
        } else if (Fc.form == drift_spec::form_t::zero) {
          Fc.form = drift_spec::form_t::affine;
          Fc.c0 = corr;
          Fc.c1 = 0.0;
        } else {
          closed = false;
        }
      } else if (h.form == h_function::form_t::linear &&
                 (Fc.form == drift_spec::form_t::affine ||
                  Fc.form == drift_spec::form_t::zero)) {
        // (1/2) a (a x + b) gap is affine in x
        double base_c0 = Fc.form == drift_spec::form_t::zero ? 0.0 : Fc.c0;
        double base_c1 = Fc.form == drift_spec::form_t::zero ? 0.0 : Fc.c1;
        Fc.form = drift_spec::form_t::affine;
        Fc.c0 = base_c0 + 0.5 * h.a * h.b * gap;
        Fc.c1 = base_c1 + 0.5 * h.a * h.a * gap;
      } else {
        closed = false;
      }
    }

    const int dk = kernel_drift_kind(Fc.form);
    const bool kernel_ok = closed && dk >= 0 && (unit_h || sqrt_h);
    const bool strat = spec.interp == interpretation::stratonovich;
    if (kernel_ok) {
      L.scheme = strat ? lowered_sde::scheme_t::heun : lowered_sde::scheme_t::em;
      L.em.drift_kind = dk;
      L.em.c0 = Fc.c0;
      L.em.c1 = Fc.c1;
      L.em.e0 = Fc.e0;
      L.em.diff_kind = sqrt_h ? 1 : 0;
      L.em.dt = dt;
      L.em.noise_scale = spec.sigma * std::sqrt(dt);
    } else {
      L.scheme = strat ? lowered_sde::scheme_t::scalar_heun : lowered_sde::scheme_t::scalar_em;
      std::function<double(double)> Ffn = [F](double x) { return F(x); };
      if (spec.interp == interpretation::drift_corrected)
        Ffn = ito_form_drift(Ffn, h, spec.sigma2, spec.f0_second_moment);
      L.drift = Ffn;
      double sigma = spec.sigma;
      L.diff = [sigma, h](double x) { return sigma * h(x); };
    }
    return L;
  }

  // Marcus route: integrate Z = r(X) with unit diffusion, map back at record
  // times. Brownian noise picks up the Stratonovich correction of the
  // original coordinates; pure-jump noise does not.
  transform_spec t = build_transform(h, spec.xi);
  L.transformed = true;
  L.z0 = 0.0;
  L.back_map = t.r_inverse;
  L.z_lo = t.z_lo;
  L.z_hi = t.z_hi;
  const double m2c = jumps ? 0.0 : spec.f0_second_moment;

  drift_spec Fz;
  bool closed = true;
  if (unit_h && (F.form == drift_spec::form_t::zero ||
                 F.form == drift_spec::form_t::affine)) {
    // z = x - xi, no correction
    if (F.form == drift_spec::form_t::zero) {
      Fz.form = drift_spec::form_t::zero;
    } else {
      Fz.form = drift_spec::form_t::affine;
      Fz.c0 = F.c0 + F.c1 * spec.xi;
      Fz.c1 = F.c1;
    }
  } else if (sqrt_h && (F.form == drift_spec::form_t::zero ||
                        F.form == drift_spec::form_t::affine)) {
    // x = u^2 with u = z/2 + sqrt(xi): (A + B u^2)/u - (m2/4)/u
    double A = F.form == drift_spec::form_t::zero ? 0.0 : F.c0;
    double B = F.form == drift_spec::form_t::zero ? 0.0 : F.c1;
    double c0 = A - 0.25 * m2c;
    if (c0 == 0.0 && B == 0.0) {
      Fz.form = drift_spec::form_t::zero;
    } else {
      Fz.form = drift_spec::form_t::reciprocal_affine;
      Fz.c0 = c0;
      Fz.c1 = B;
      Fz.e0 = std::sqrt(spec.xi);
    }
  } else if (h.form == h_function::form_t::identity &&
             (F.form == drift_spec::form_t::zero ||
              F.form == drift_spec::form_t::affine)) {
    // x = xi e^z: A/(xi e^z) + B - m2/2
    double A = F.form == drift_spec::form_t::zero ? 0.0 : F.c0;
    double B = F.form == drift_spec::form_t::zero ? 0.0 : F.c1;
    double cc0 = A / spec.xi;
    double cc1 = B - 0.5 * m2c;
    if (cc0 == 0.0 && cc1 == 0.0) {
      Fz.form = drift_spec::form_t::zero;
    } else if (cc0 == 0.0) {
      Fz.form = drift_spec::form_t::affine;
      Fz.c0 = cc1;
      Fz.c1 = 0.0;
    } else {
      Fz.form = drift_spec::form_t::exp_affine;
      Fz.c0 = cc0;
      Fz.c1 = cc1;
    }
  } else {
    closed = false;
  }

  if (!jumps) {
    if (closed) {
      L.scheme = lowered_sde::scheme_t::em;
      L.em.drift_kind = kernel_drift_kind(Fz.form);
      L.em.c0 = Fz.c0;
      L.em.c1 = Fz.c1;
      L.em.e0 = Fz.e0;
      L.em.diff_kind = 0;
      L.em.dt = dt;
      L.em.noise_scale = spec.sigma * std::sqrt(dt);
    } else {
      L.scheme = lowered_sde::scheme_t::scalar_em;
      std::function<double(double)> Ffn = [F](double x) { return F(x); };
      L.drift = transformed_drift(strat_correction_drift(Ffn, h, spec.f0_second_moment), h, t);
      double sigma = spec.sigma;
      L.diff = [sigma](double) { return sigma; };
    }
    return L;
  }

  const double gdt = std::pow(dt, 1.0 / spec.noise.exponent);
  if (closed) {
    L.scheme = lowered_sde::scheme_t::em_jump;
    L.jp.drift_kind = kernel_drift_kind(Fz.form);
    L.jp.c0 = Fz.c0;
    L.jp.c1 = Fz.c1;
    L.jp.e0 = Fz.e0;
    L.jp.dt = dt;
    L.jp.dg_scale = spec.noise.scale * gdt;
    fill_stable_constants(L.jp, spec.noise.exponent, spec.noise.skew);
  } else {
    L.scheme = lowered_sde::scheme_t::scalar_em_jump;
    std::function<double(double)> Ffn = [F](double x) { return F(x); };
    L.drift = transformed_drift(Ffn, h, t);
    L.dg_scale = spec.noise.scale * gdt;
    L.exponent = spec.noise.exponent;
    L.skew = spec.noise.skew;
  }
  return L;
}

rescaled_path integrate_path(const sde_spec& spec, double T, double dt, rng_stream& rng) {
  if (!(dt > 0.0) || dt > 0.01 + 1e-15)
    throw std::invalid_argument("integrate_path: dt must lie in (0, 0.01]");
  const long n = std::lround(T / dt);
  if (!(T > 0.0) || n < 1 || std::abs(double(n) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("integrate_path: T must be a positive multiple of dt");

  lowered_sde L = lower_sde(spec, dt);
  rescaled_path out;
  out.grid.resize(static_cast<size_t>(n) + 1);
  out.values.resize(static_cast<size_t>(n) + 1);
  out.epsilon = 0.0;
  out.interpolation = rescaled_path::interp_kind::linear;
  for (long k = 0; k <= n; ++k) out.grid[static_cast<size_t>(k)] = double(k) * dt;

  auto check_domain = [&](double z) {
    if (L.transformed && !(z > L.z_lo && z < L.z_hi))
      throw std::runtime_error("integrate_path: transformed state left the valid domain");
  };

  using sch = lowered_sde::scheme_t;
  if (L.scheme == sch::em || L.scheme == sch::heun || L.scheme == sch::em_jump) {
    double x[kernels::kBatch];
    double xmin[kernels::kBatch], xmax[kernels::kBatch];
    uint64_t clamp[kernels::kBatch] = {0, 0, 0, 0};
    kernels::stream_state st[kernels::kBatch];
    for (int l = 0; l < kernels::kBatch; ++l) {
      x[l] = L.z0;
      xmin[l] = L.z0;
      xmax[l] = L.z0;
      st[l] = rng.state();
    }
    out.values[0] = L.z0;
    for (long k = 1; k <= n; ++k) {
      if (L.scheme == sch::em)
        kernels::em_advance(L.em, x, st, clamp, xmin, xmax, 1);
      else if (L.scheme == sch::heun)
        kernels::heun_advance(L.em, x, st, clamp, 1);
      else
        kernels::em_jump_advance(L.jp, x, st, xmin, xmax, 1);
      check_domain(x[0]);
      out.values[static_cast<size_t>(k)] = x[0];
    }
    rng.state() = st[0];
  } else {
    const double sdt = std::sqrt(dt);
    double x = L.z0;
    out.values[0] = x;
    for (long k = 1; k <= n; ++k) {
      if (L.scheme == sch::scalar_em) {
        double z = rng.normal();
        x = (x + L.drift(x) * dt) + (L.diff(x) * sdt) * z;
      } else if (L.scheme == sch::scalar_heun) {
        double z = rng.normal();
        double dw = sdt * z;
        double a0 = L.drift(x), g0 = L.diff(x);
        double xp = (x + a0 * dt) + g0 * dw;
        double a1 = L.drift(xp), g1 = L.diff(xp);
        x = (x + 0.5 * (a0 + a1) * dt) + 0.5 * ((g0 + g1) * dw);
      } else {
        double y = rng.stable(L.exponent, L.skew);
        x = (x + L.drift(x) * dt) + L.dg_scale * y;
      }
      check_domain(x);
      out.values[static_cast<size_t>(k)] = x;
    }
  }

  if (L.transformed)
    for (double& v : out.values) v = L.back_map(v);
  return out;
}

}  // namespace homog
