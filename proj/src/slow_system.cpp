#include "homog/slow_system.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

namespace {

double noise_prefactor(const slow_system_spec& s) {
  return s.scaling == scaling_kind::diffusive ? s.epsilon
                                              : std::pow(s.epsilon, s.superdiffusive_gamma);
}

double coupling_prefactor(const slow_system_spec& s) {
  return s.scaling == scaling_kind::diffusive ? s.epsilon * s.epsilon : s.epsilon;
}

// map iterations per unit of rescaled time
double step_rate(const slow_system_spec& s) {
  return s.scaling == scaling_kind::diffusive ? 1.0 / (s.epsilon * s.epsilon)
                                              : 1.0 / s.epsilon;
}

long steps_before(double t, double rate) {
  return static_cast<long>(std::floor(t * rate + 1e-9));
}

bool clamps_h(const h_function& h) { return h.form == h_function::form_t::power; }

long checked_grid_size(double T, double grid_dt, const char* who) {
  if (!(grid_dt > 0.0)) throw std::invalid_argument(std::string(who) + ": grid_dt must be > 0");
  long m = std::lround(T / grid_dt);
  if (!(T > 0.0) || m < 1 ||
      std::abs(double(m) * grid_dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument(std::string(who) + ": T must be a positive multiple of grid_dt");
  return m;
}

// exact invariant-measure average of a builtin coupling at fixed x, with the
// orbit estimate m2 standing in for the second moment of y
double coupling_mean(const coupling_spec& f, double x, double m2) {
  switch (f.form) {
    case coupling_spec::form_t::zero: return 0.0;
    case coupling_spec::form_t::separable_quadratic: return f.fa * ((f.fb - x) * m2);
    case coupling_spec::form_t::constant: return f.fa;
    case coupling_spec::form_t::custom: break;
  }
  return 0.0;
}

double lattice_interp(const std::vector<double>& grid, const std::vector<double>& vals,
                      double x) {
  const size_t n = grid.size();
  if (x <= grid.front()) return vals.front();
  if (x >= grid.back()) return vals.back();
  double step = (grid.back() - grid.front()) / double(n - 1);
  size_t i = std::min(n - 2, static_cast<size_t>((x - grid.front()) / step));
  double w = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return vals[i] + w * (vals[i + 1] - vals[i]);
}

}  // namespace

double coupling_spec::operator()(double x, double y, double eps) const {
  switch (form) {
    case form_t::zero: return 0.0;
    case form_t::separable_quadratic: return fa * ((fb - x) * (y * y));
    case form_t::constant: return fa;
    case form_t::custom: return fn(x, y, eps);
  }
  return 0.0;
}

void slow_system_spec::validate() const {
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw std::invalid_argument("slow_system_spec: epsilon must lie in (0,1]");
  if (scaling == scaling_kind::superdiffusive &&
      (!(superdiffusive_gamma > 0.5) || !(superdiffusive_gamma < 1.0)))
    throw std::invalid_argument("slow_system_spec: superdiffusive gamma must lie in (1/2,1)");
}

double step_slow(const slow_system_spec& spec, double x, double y) {
  spec.validate();
  // power-form h is only defined for nonnegative states; the recursion
  // clamps the factor, matching the batch kernels
  double xe = clamps_h(spec.h) ? std::max(x, 0.0) : x;
  double hv = spec.h(xe);
  double f0v = spec.f0(y);
  double fv = spec.f(x, y, spec.epsilon);
  return (x + noise_prefactor(spec) * (hv * f0v)) + coupling_prefactor(spec) * fv;
}

lowered_slow lower_slow(const slow_system_spec& spec, bool k2_on, double k2_m2) {
  lowered_slow L;
  kernels::slow_params& sp = L.sp;
  sp.cn = noise_prefactor(spec);
  sp.cd = coupling_prefactor(spec);
  bool ok = true;
  if (spec.f0.kind == observable_spec::kind_t::identity)
    sp.f0_center = spec.f0.shift;
  else
    ok = false;
  if (spec.h.form == h_function::form_t::one)
    sp.h_kind = 0;
  else if (spec.h.form == h_function::form_t::power && spec.h.p == 0.5)
    sp.h_kind = 1;
  else
    ok = false;
  switch (spec.f.form) {
    case coupling_spec::form_t::zero:
      sp.f_kind = 0;
      break;
    case coupling_spec::form_t::separable_quadratic:
      sp.f_kind = 1;
      sp.fa = spec.f.fa;
      sp.fb = spec.f.fb;
      break;
    case coupling_spec::form_t::constant:
      sp.f_kind = 2;
      sp.fa = spec.f.fa;
      break;
    case coupling_spec::form_t::custom:
      ok = false;
      break;
  }
  sp.k2_on = k2_on ? 1 : 0;
  sp.k2_m2 = k2_m2;
  L.kernel_ok = ok;
  return L;
}

namespace {

struct driver_state {
  double x[kernels::kBatch];
  double y[kernels::kBatch];
  uint64_t dk[kernels::kBatch] = {0, 0, 0, 0};
  uint64_t ds[kernels::kBatch] = {0, 0, 0, 0};
  uint64_t clamp[kernels::kBatch] = {0, 0, 0, 0};
  double k2s[kernels::kBatch] = {0, 0, 0, 0};
  double k2m[kernels::kBatch] = {0, 0, 0, 0};
};

void init_lanes(driver_state& st, const fast_map_spec& map, double xi, double eta) {
  for (int l = 0; l < kernels::kBatch; ++l) {
    st.x[l] = xi;
    st.y[l] = eta;
  }
  if (map.kind == map_family::doubling) {
    uint64_t k, s;
    kernels::doubling_init(eta, &k, &s);
    for (int l = 0; l < kernels::kBatch; ++l) {
      st.dk[l] = k;
      st.ds[l] = s;
    }
  }
}

// scalar slow update with the map always stepped through the batch kernel,
// so custom couplings see the exact same fast orbit as the lowered forms
void scalar_advance(const slow_system_spec& spec, const kernels::map_params& mp,
                    driver_state& st, long steps, const fhat_estimate* fhat,
                    double* k2_sum, double* k2_sup) {
  const double cn = noise_prefactor(spec);
  const double cd = coupling_prefactor(spec);
  const bool clamph = clamps_h(spec.h);
  for (long i = 0; i < steps; ++i) {
    double x = st.x[0], y = st.y[0];
    double xe = x;
    if (clamph) {
      if (x < 0.0) st.clamp[0] += 1;
      xe = std::max(x, 0.0);
    }
    double hv = spec.h(xe);
    double f0v = spec.f0(y);
    double fv = spec.f(x, y, spec.epsilon);
    if (fhat) {
      double target = fhat->separable ? coupling_mean(spec.f, x, fhat->m2)
                                      : lattice_interp(fhat->grid, fhat->values, x);
      *k2_sum += spec.f(x, y, 0.0) - target;
      *k2_sup = std::max(*k2_sup, std::abs(*k2_sum));
    }
    double xn = (x + cn * (hv * f0v)) + cd * fv;
    for (int l = 0; l < kernels::kBatch; ++l) st.x[l] = xn;
    kernels::map_advance(mp, st.y, st.dk, st.ds, 1);
  }
}

}  // namespace

rescaled_path evolve(const slow_system_spec& spec, const fast_map_spec& map, double eta,
                     double T, double grid_dt, evolve_stats* stats) {
  spec.validate();
  map.validate();
  const long m = checked_grid_size(T, grid_dt, "evolve");
  eta = clamp_initial(map, eta);

  rescaled_path out;
  out.grid.resize(static_cast<size_t>(m) + 1);
  out.values.resize(static_cast<size_t>(m) + 1);
  out.epsilon = spec.epsilon;
  out.interpolation = rescaled_path::interp_kind::piecewise_constant;

  const double rate = step_rate(spec);
  const kernels::map_params mp = lower(map);
  lowered_slow L = lower_slow(spec, false, 0.0);

  driver_state st;
  init_lanes(st, map, spec.xi, eta);
  out.grid[0] = 0.0;
  out.values[0] = spec.xi;
  long done = 0;
  for (long k = 1; k <= m; ++k) {
    long target = steps_before(double(k) * grid_dt, rate);
    if (target > done) {
      if (L.kernel_ok)
        kernels::fastslow_advance(mp, L.sp, st.x, st.y, st.dk, st.ds, st.clamp,
                                  st.k2s, st.k2m, target - done);
      else
        scalar_advance(spec, mp, st, target - done, nullptr, nullptr, nullptr);
      done = target;
    }
    out.grid[static_cast<size_t>(k)] = double(k) * grid_dt;
    out.values[static_cast<size_t>(k)] = st.x[0];
  }
  if (stats) {
    stats->clamped_steps = st.clamp[0];
    stats->steps = done;
  }
  return out;
}

fhat_estimate build_fhat(const slow_system_spec& spec, const fast_map_spec& map,
                         double x_lo, double x_hi, long orbit_length,
                         std::uint64_t seed) {
  spec.validate();
  map.validate();
  if (orbit_length < 1000)
    throw std::invalid_argument("build_fhat: orbit_length must be >= 1000");
  rng_stream rng(seed, 0);
  double eta = sample_initial(map, rng);
  orbit_data od = orbit(map, eta, orbit_length, kDefaultBurnIn);

  fhat_estimate est;
  double acc[4] = {0, 0, 0, 0};
  kernels::autocov_partials(od.points.data(), orbit_length, 0, acc);
  est.m2 = ((acc[0] + acc[1]) + (acc[2] + acc[3])) / double(orbit_length);

  est.separable = spec.f.form != coupling_spec::form_t::custom;
  if (!est.separable) {
    const int kLattice = 256;
    est.grid.resize(kLattice);
    est.values.resize(kLattice);
    for (int l = 0; l < kLattice; ++l) {
      double x = x_lo + (x_hi - x_lo) * double(l) / double(kLattice - 1);
      double sum = 0.0;
      for (double y : od.points) sum += spec.f(x, y, 0.0);
      est.grid[static_cast<size_t>(l)] = x;
      est.values[static_cast<size_t>(l)] = sum / double(orbit_length);
    }
  }
  return est;
}

double ldp_diagnostic_k2(const slow_system_spec& spec, const fast_map_spec& map,
                         double eta, double T, const fhat_estimate& fhat) {
  spec.validate();
  map.validate();
  if (!(T > 0.0)) throw std::invalid_argument("ldp_diagnostic_k2: T must be > 0");
  eta = clamp_initial(map, eta);

  const double rate = step_rate(spec);
  const long total = steps_before(T, rate);
  const kernels::map_params mp = lower(map);
  lowered_slow L = lower_slow(spec, true, fhat.m2);

  driver_state st;
  init_lanes(st, map, spec.xi, eta);
  // the remainder term in the slow decomposition carries the second-order
  // prefactor; without it the raw centered sums grow as eps shrinks
  if (L.kernel_ok && fhat.separable) {
    kernels::fastslow_advance(mp, L.sp, st.x, st.y, st.dk, st.ds, st.clamp, st.k2s,
                              st.k2m, total);
    return coupling_prefactor(spec) * st.k2m[0];
  }
  double k2_sum = 0.0, k2_sup = 0.0;
  scalar_advance(spec, mp, st, total, &fhat, &k2_sum, &k2_sup);
  return coupling_prefactor(spec) * k2_sup;
}

}  // namespace homog
