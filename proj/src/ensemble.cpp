#include "homog/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace homog {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr long kGroup = 1024;     // realizations claimed per work unit
constexpr long kMaxErrors = 1000;  // stored error records; the count stays exact

struct record_slot {
  long step = 0;
  int slot = 0;  // sample_times index, or sample_times.size() for terminal
};

struct shared_state {
  const ensemble_config* cfg = nullptr;
  std::vector<record_slot> schedule;  // sorted by step
  long total_steps = 0;
  ensemble_result* out = nullptr;
  std::atomic<long> next_group{0};
  std::mutex error_mu;

  void record_error(long index, std::string what) {
    std::lock_guard<std::mutex> lk(error_mu);
    out->error_count += 1;
    if (static_cast<long>(out->errors.size()) < kMaxErrors)
      out->errors.push_back({index, std::move(what)});
  }
};

void store(shared_state& sh, int slot, long index, double value) {
  if (slot < static_cast<int>(sh.cfg->sample_times.size()))
    sh.out->samples[static_cast<size_t>(slot)][static_cast<size_t>(index)] = value;
  else
    sh.out->terminal[static_cast<size_t>(index)] = value;
}

// ---------------------------------------------------------------- fast-slow

void run_fast_slow_batch(shared_state& sh, long base, long hi) {
  const ensemble_config& cfg = *sh.cfg;
  const slow_system_spec& spec = cfg.fast_slow->slow;
  const fast_map_spec& map = cfg.fast_slow->map;
  const kernels::map_params mp = lower(map);
  lowered_slow L = lower_slow(spec, cfg.record_k2, cfg.k2_m2);

  double x[kernels::kBatch], y[kernels::kBatch];
  uint64_t dk[kernels::kBatch] = {0, 0, 0, 0}, ds[kernels::kBatch] = {0, 0, 0, 0};
  uint64_t clamp[kernels::kBatch] = {0, 0, 0, 0};
  double k2s[kernels::kBatch] = {0, 0, 0, 0}, k2m[kernels::kBatch] = {0, 0, 0, 0};
  bool errored[kernels::kBatch] = {false, false, false, false};

  for (int l = 0; l < kernels::kBatch; ++l) {
    long i = base + l;
    rng_stream rng(cfg.master_seed, static_cast<std::uint64_t>(i));
    double eta = sample_initial(map, rng);
    x[l] = spec.xi;
    y[l] = eta;
    if (map.kind == map_family::doubling) {
      uint64_t k, s;
      kernels::doubling_init(eta, &k, &s);
      dk[l] = k;
      ds[l] = s;
    }
  }
  if (cfg.burn_in > 0) kernels::map_advance(mp, y, dk, ds, cfg.burn_in);

  long done = 0;
  for (const record_slot& rs : sh.schedule) {
    if (rs.step > done) {
      kernels::fastslow_advance(mp, L.sp, x, y, dk, ds, clamp, k2s, k2m, rs.step - done);
      done = rs.step;
    }
    for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
      double v = x[l];
      if (!std::isfinite(v)) {
        if (!errored[l]) {
          errored[l] = true;
          sh.record_error(base + l, "nonfinite slow state at step " + std::to_string(done));
        }
        v = kNaN;
      }
      store(sh, rs.slot, base + l, v);
    }
  }
  if (done < sh.total_steps)
    kernels::fastslow_advance(mp, L.sp, x, y, dk, ds, clamp, k2s, k2m,
                              sh.total_steps - done);
  // the remainder diagnostic carries the second-order prefactor, matching
  // ldp_diagnostic_k2
  const double cd = spec.scaling == scaling_kind::diffusive
                        ? spec.epsilon * spec.epsilon
                        : spec.epsilon;
  for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
    sh.out->clamp_steps[static_cast<size_t>(base + l)] = clamp[l];
    if (cfg.record_k2) sh.out->k2_sup[static_cast<size_t>(base + l)] = cd * k2m[l];
  }
}

// ---------------------------------------------------------------------- sde

void run_sde_batch(shared_state& sh, long base, long hi, const lowered_sde& L) {
  const ensemble_config& cfg = *sh.cfg;
  using sch = lowered_sde::scheme_t;

  if (L.scheme == sch::scalar_em || L.scheme == sch::scalar_heun ||
      L.scheme == sch::scalar_em_jump) {
    // custom forms: integrate one full path per realization and pick records
    for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
      long i = base + l;
      rng_stream rng(cfg.master_seed, static_cast<std::uint64_t>(i));
      try {
        rescaled_path p = integrate_path(*cfg.sde, cfg.T, cfg.dt, rng);
        for (const record_slot& rs : sh.schedule)
          store(sh, rs.slot, i, p.values[static_cast<size_t>(rs.step)]);
      } catch (const std::exception& e) {
        sh.record_error(i, e.what());
        for (const record_slot& rs : sh.schedule) store(sh, rs.slot, i, kNaN);
      }
    }
    return;
  }

  double x[kernels::kBatch], xmin[kernels::kBatch], xmax[kernels::kBatch];
  uint64_t clamp[kernels::kBatch] = {0, 0, 0, 0};
  kernels::stream_state st[kernels::kBatch];
  bool errored[kernels::kBatch] = {false, false, false, false};
  for (int l = 0; l < kernels::kBatch; ++l) {
    x[l] = L.z0;
    xmin[l] = L.z0;
    xmax[l] = L.z0;
    st[l] = kernels::derive_stream(cfg.master_seed,
                                   static_cast<std::uint64_t>(base + l));
  }

  long done = 0;
  for (const record_slot& rs : sh.schedule) {
    if (rs.step > done) {
      if (L.scheme == sch::em)
        kernels::em_advance(L.em, x, st, clamp, xmin, xmax, rs.step - done);
      else if (L.scheme == sch::heun)
        kernels::heun_advance(L.em, x, st, clamp, rs.step - done);
      else
        kernels::em_jump_advance(L.jp, x, st, xmin, xmax, rs.step - done);
      done = rs.step;
    }
    for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
      double v = x[l];
      if (L.transformed && !errored[l] && !(xmin[l] > L.z_lo && xmax[l] < L.z_hi)) {
        errored[l] = true;
        sh.record_error(base + l,
                        "transform domain exit by step " + std::to_string(done));
      }
      if (!std::isfinite(v) && !errored[l]) {
        errored[l] = true;
        sh.record_error(base + l, "nonfinite state at step " + std::to_string(done));
      }
      if (errored[l]) {
        store(sh, rs.slot, base + l, kNaN);
        continue;
      }
      store(sh, rs.slot, base + l, L.transformed ? L.back_map(v) : v);
    }
  }
  if (done < sh.total_steps) {
    if (L.scheme == sch::em)
      kernels::em_advance(L.em, x, st, clamp, xmin, xmax, sh.total_steps - done);
    else if (L.scheme == sch::heun)
      kernels::heun_advance(L.em, x, st, clamp, sh.total_steps - done);
    else
      kernels::em_jump_advance(L.jp, x, st, xmin, xmax, sh.total_steps - done);
  }
  for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
    // a domain exit after the last record still counts as an error
    if (L.transformed && !errored[l] && !(xmin[l] > L.z_lo && xmax[l] < L.z_hi)) {
      errored[l] = true;
      sh.record_error(base + l, "transform domain exit after the last record");
      sh.out->terminal[static_cast<size_t>(base + l)] = kNaN;
    }
    sh.out->clamp_steps[static_cast<size_t>(base + l)] = clamp[l];
  }
}

// ---------------------------------------------------------------------- cir

void run_cir_batch(shared_state& sh, long base, long hi) {
  const ensemble_config& cfg = *sh.cfg;
  const cir_params& cir = *cfg.cir;
  for (int l = 0; l < kernels::kBatch && base + l < hi; ++l) {
    long i = base + l;
    rng_stream rng(cfg.master_seed, static_cast<std::uint64_t>(i));
    for (size_t ti = 0; ti < cfg.sample_times.size(); ++ti) {
      double t = cfg.sample_times[ti];
      double v = t == 0.0 ? cir.xi : cir_exact_sample(cir, t, rng);
      sh.out->samples[ti][static_cast<size_t>(i)] = v;
    }
    sh.out->terminal[static_cast<size_t>(i)] = cir_exact_sample(cir, cfg.T, rng);
  }
}

}  // namespace

std::vector<double> ensemble_result::valid_terminal() const {
  std::vector<double> v;
  v.reserve(terminal.size());
  for (double x : terminal)
    if (!std::isnan(x)) v.push_back(x);
  return v;
}

std::vector<double> ensemble_result::valid_samples(std::size_t time_index) const {
  const std::vector<double>& s = samples.at(time_index);
  std::vector<double> v;
  v.reserve(s.size());
  for (double x : s)
    if (!std::isnan(x)) v.push_back(x);
  return v;
}

ensemble_result run_ensemble(const ensemble_config& config) {
  const int models = (config.fast_slow ? 1 : 0) + (config.sde ? 1 : 0) +
                     (config.cir ? 1 : 0);
  if (models != 1)
    throw std::invalid_argument("run_ensemble: exactly one model must be set");
  if (config.realizations < 1)
    throw std::invalid_argument("run_ensemble: realizations must be >= 1");
  if (!(config.T > 0.0)) throw std::invalid_argument("run_ensemble: T must be > 0");
  for (double t : config.sample_times)
    if (!(t >= 0.0) || t > config.T)
      throw std::invalid_argument("run_ensemble: sample times must lie in [0, T]");

  ensemble_result out;
  out.realizations = config.realizations;
  out.master_seed = config.master_seed;
  out.terminal.assign(static_cast<size_t>(config.realizations), kNaN);
  out.samples.assign(config.sample_times.size(),
                     std::vector<double>(static_cast<size_t>(config.realizations), kNaN));
  out.clamp_steps.assign(static_cast<size_t>(config.realizations), 0);
  if (config.record_k2)
    out.k2_sup.assign(static_cast<size_t>(config.realizations), 0.0);

  shared_state sh;
  sh.cfg = &config;
  sh.out = &out;

  lowered_sde L;
  if (config.fast_slow) {
    config.fast_slow->slow.validate();
    config.fast_slow->map.validate();
    // fail before any worker starts: the batch loops assume lowered forms
    if (!lower_slow(config.fast_slow->slow, config.record_k2, config.k2_m2).kernel_ok)
      throw std::invalid_argument("run_ensemble: custom fast-slow forms are not supported "
                                  "in ensembles; use evolve per realization");
    const double eps = config.fast_slow->slow.epsilon;
    const double rate = config.fast_slow->slow.scaling == scaling_kind::diffusive
                            ? 1.0 / (eps * eps)
                            : 1.0 / eps;
    for (size_t ti = 0; ti < config.sample_times.size(); ++ti)
      sh.schedule.push_back(
          {static_cast<long>(std::floor(config.sample_times[ti] * rate + 1e-9)),
           static_cast<int>(ti)});
    sh.total_steps = static_cast<long>(std::floor(config.T * rate + 1e-9));
    sh.schedule.push_back({sh.total_steps, static_cast<int>(config.sample_times.size())});
  } else if (config.sde) {
    L = lower_sde(*config.sde, config.dt);
    for (size_t ti = 0; ti < config.sample_times.size(); ++ti) {
      double steps = config.sample_times[ti] / config.dt;
      long s = std::lround(steps);
      if (std::abs(steps - double(s)) > 1e-6)
        throw std::invalid_argument("run_ensemble: sample times must align to dt");
      sh.schedule.push_back({s, static_cast<int>(ti)});
    }
    double total = config.T / config.dt;
    sh.total_steps = std::lround(total);
    if (std::abs(total - double(sh.total_steps)) > 1e-6)
      throw std::invalid_argument("run_ensemble: T must align to dt");
    sh.schedule.push_back({sh.total_steps, static_cast<int>(config.sample_times.size())});
  }
  std::stable_sort(sh.schedule.begin(), sh.schedule.end(),
                   [](const record_slot& a, const record_slot& b) { return a.step < b.step; });

  const long ngroups = (config.realizations + kGroup - 1) / kGroup;
  auto worker = [&]() {
    for (;;) {
      long g = sh.next_group.fetch_add(1);
      if (g >= ngroups) return;
      long lo = g * kGroup;
      long hi = std::min(lo + kGroup, config.realizations);
      for (long base = lo; base < hi; base += kernels::kBatch) {
        if (config.fast_slow)
          run_fast_slow_batch(sh, base, hi);
        else if (config.sde)
          run_sde_batch(sh, base, hi, L);
        else
          run_cir_batch(sh, base, hi);
      }
    }
  };

  int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::sort(out.errors.begin(), out.errors.end(),
            [](const realization_error& a, const realization_error& b) {
              return a.index < b.index;
            });
  long clamped = 0;
  for (std::uint64_t c : out.clamp_steps)
    if (c > 0) ++clamped;
  out.clamp_fraction = double(clamped) / double(config.realizations);
  return out;
}

}  // namespace homog
