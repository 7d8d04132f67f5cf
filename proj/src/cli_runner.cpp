#include "homog/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "homog/cir.hpp"
#include "homog/covariance.hpp"
#include "homog/ensemble.hpp"
#include "homog/levy.hpp"
#include "homog/stats.hpp"

namespace homog::cli {
namespace {

using nlohmann::json;

// thrown when an ensemble trips the realization-failure threshold; run_command
// maps it to exit 4 while every other exception is a config error (exit 2)
struct ensemble_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// ----------------------------------------------------------- json accessors

void require_keys(const json& j, const char* where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(std::string(where) + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) fail(std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

double get_num(const json& j, const char* where, const char* key,
               std::optional<double> dflt = std::nullopt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    fail(std::string(where) + ": missing \"" + key + "\"");
  }
  const json& v = j.at(key);
  if (!v.is_number()) fail(std::string(where) + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

long get_count(const json& j, const char* where, const char* key,
               std::optional<long> dflt = std::nullopt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    fail(std::string(where) + ": missing \"" + key + "\"");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer())
    fail(std::string(where) + ": \"" + key + "\" must be an integer");
  return v.get<long>();
}

bool get_bool(const json& j, const char* where, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(std::string(where) + ": \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& j, const char* where, const char* key) {
  if (!j.contains(key)) fail(std::string(where) + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_string()) fail(std::string(where) + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::uint64_t get_seed(const json& j, const char* where) {
  if (!j.contains("seed")) return 0;
  const json& v = j.at("seed");
  if (!v.is_number_integer()) fail(std::string(where) + ": \"seed\" must be an integer");
  if (!v.is_number_unsigned() && v.get<long long>() < 0)
    fail(std::string(where) + ": \"seed\" must be >= 0");
  return v.get<std::uint64_t>();
}

std::vector<double> get_num_array(const json& j, const char* where, const char* key) {
  if (!j.contains(key)) fail(std::string(where) + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_array()) fail(std::string(where) + ": \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number())
      fail(std::string(where) + ": \"" + key + "\" must hold numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

// ------------------------------------------------------------- sub-sections

fast_map_spec parse_map(const json& j) {
  require_keys(j, "map", {"family", "gamma"});
  fast_map_spec m;
  std::string fam = get_str(j, "map", "family");
  if (fam == "pomeau_manneville")
    m.kind = map_family::pomeau_manneville;
  else if (fam == "modified_pomeau_manneville")
    m.kind = map_family::modified_pomeau_manneville;
  else if (fam == "doubling")
    m.kind = map_family::doubling;
  else
    fail("map: unknown family \"" + fam + "\"");
  m.gamma = get_num(j, "map", "gamma", 0.0);
  return m;
}

json echo_map(const fast_map_spec& m) {
  const char* fam = m.kind == map_family::pomeau_manneville ? "pomeau_manneville"
                    : m.kind == map_family::modified_pomeau_manneville
                        ? "modified_pomeau_manneville"
                        : "doubling";
  return json{{"family", fam}, {"gamma", m.gamma}};
}

observable_spec parse_observable(const json& j) {
  require_keys(j, "observable", {"kind", "shift", "centered"});
  observable_spec o;
  if (j.contains("kind")) {
    std::string kind = get_str(j, "observable", "kind");
    if (kind == "constant") {
      o.kind = observable_spec::kind_t::custom;
      o.evaluator = [](double) { return 1.0; };
    } else if (kind != "identity") {
      fail("observable: unknown kind \"" + kind + "\"");
    }
  }
  o.shift = get_num(j, "observable", "shift", 0.0);
  o.centered = get_bool(j, "observable", "centered", true);
  return o;
}

json echo_observable(const observable_spec& o) {
  const char* kind = o.kind == observable_spec::kind_t::identity ? "identity" : "constant";
  return json{{"kind", kind}, {"shift", o.shift}, {"centered", o.centered}};
}

h_function parse_h(const json& j) {
  require_keys(j, "h", {"form", "p", "a", "b"});
  h_function h;
  std::string form = get_str(j, "h", "form");
  if (form == "one")
    h.form = h_function::form_t::one;
  else if (form == "identity")
    h.form = h_function::form_t::identity;
  else if (form == "power")
    h.form = h_function::form_t::power;
  else if (form == "linear")
    h.form = h_function::form_t::linear;
  else
    fail("h: unknown form \"" + form + "\"");
  h.p = get_num(j, "h", "p", 0.5);
  h.a = get_num(j, "h", "a", 1.0);
  h.b = get_num(j, "h", "b", 0.0);
  return h;
}

json echo_h(const h_function& h) {
  switch (h.form) {
    case h_function::form_t::one: return json{{"form", "one"}};
    case h_function::form_t::identity: return json{{"form", "identity"}};
    case h_function::form_t::power: return json{{"form", "power"}, {"p", h.p}};
    case h_function::form_t::linear:
      return json{{"form", "linear"}, {"a", h.a}, {"b", h.b}};
    case h_function::form_t::custom: break;
  }
  fail("h: custom forms cannot be serialized");
}

coupling_spec parse_coupling(const json& j) {
  require_keys(j, "coupling", {"form", "fa", "fb"});
  coupling_spec f;
  std::string form = get_str(j, "coupling", "form");
  if (form == "zero")
    f.form = coupling_spec::form_t::zero;
  else if (form == "separable_quadratic")
    f.form = coupling_spec::form_t::separable_quadratic;
  else if (form == "constant")
    f.form = coupling_spec::form_t::constant;
  else
    fail("coupling: unknown form \"" + form + "\"");
  f.fa = get_num(j, "coupling", "fa", 0.0);
  f.fb = get_num(j, "coupling", "fb", 0.0);
  return f;
}

json echo_coupling(const coupling_spec& f) {
  switch (f.form) {
    case coupling_spec::form_t::zero: return json{{"form", "zero"}};
    case coupling_spec::form_t::separable_quadratic:
      return json{{"form", "separable_quadratic"}, {"fa", f.fa}, {"fb", f.fb}};
    case coupling_spec::form_t::constant: return json{{"form", "constant"}, {"fa", f.fa}};
    case coupling_spec::form_t::custom: break;
  }
  fail("coupling: custom forms cannot be serialized");
}

interpretation parse_interp(const std::string& name) {
  if (name == "ito") return interpretation::ito;
  if (name == "stratonovich") return interpretation::stratonovich;
  if (name == "drift_corrected") return interpretation::drift_corrected;
  if (name == "marcus") return interpretation::marcus_via_transform;
  fail("interpretations: unknown value \"" + name + "\"");
}

// the square-root system with the quadratic coupling has a closed-form
// limiting law; other systems still integrate and compare, just without an
// exact reference
bool exact_law_available(const h_function& h, const coupling_spec& f) {
  return h.form == h_function::form_t::power && h.p == 0.5 &&
         f.form == coupling_spec::form_t::separable_quadratic;
}

// alpha and beta come from the coupling constants plus the quarter-rule
// drift correction
cir_params derive_cir(const h_function& h, const coupling_spec& f, double xi,
                      double sigma2, double m2) {
  if (!exact_law_available(h, f))
    fail("the exact reference law needs h(x) = sqrt(x) and the quadratic coupling");
  double alpha = f.fa * m2;
  if (!(alpha > 0.0)) fail("the exact reference law needs fa * f0_second_moment > 0");
  double beta = (f.fa * f.fb * m2 + 0.25 * (sigma2 - m2)) / alpha;
  cir_params p{sigma2, alpha, beta, xi};
  p.validate();
  return p;
}

// limiting mean drift of the slow equation, by coupling form
drift_spec derive_drift(const coupling_spec& f, double m2) {
  drift_spec d;
  d.form = drift_spec::form_t::affine;
  switch (f.form) {
    case coupling_spec::form_t::zero: d.c0 = 0.0; d.c1 = 0.0; return d;
    case coupling_spec::form_t::constant: d.c0 = f.fa; d.c1 = 0.0; return d;
    case coupling_spec::form_t::separable_quadratic:
      d.c0 = f.fa * f.fb * m2;
      d.c1 = -f.fa * m2;
      return d;
    case coupling_spec::form_t::custom: break;
  }
  fail("coupling: custom forms have no derivable limit drift");
}

// ---------------------------------------------------------------- outputs

std::string fmt_g17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string fmt_g(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail("cannot open " + p.string() + " for writing");
  f << text;
  f.flush();
  if (!f) fail("write failed: " + p.string());
}

void write_run(const std::string& out_dir, const std::string& command,
               const json& config, const json& outputs) {
  json run{{"command", command}, {"config", config}, {"outputs", outputs}};
  write_text(std::filesystem::path(out_dir) / "run.json", run.dump(2) + "\n");
}

struct sample_source {
  std::string label;
  std::vector<double> values;  // valid terminal samples
  std::uint64_t master_seed = 0;
  long realizations = 0;
  long error_count = 0;
  double clamp_fraction = 0.0;
};

json echo_sources(const std::vector<sample_source>& sources) {
  json a = json::array();
  for (const sample_source& s : sources)
    a.push_back(json{{"label", s.label},
                     {"master_seed", s.master_seed},
                     {"realizations", s.realizations},
                     {"error_count", s.error_count},
                     {"clamp_fraction", s.clamp_fraction}});
  return a;
}

sample_source run_source(ensemble_config& ec, const std::string& label) {
  ensemble_result res = run_ensemble(ec);
  if (res.failed()) {
    std::string first = res.errors.empty() ? "no detail" : res.errors.front().what;
    throw ensemble_failure(label + ": " + std::to_string(res.error_count) + " of " +
                           std::to_string(ec.realizations) +
                           " realizations failed (first: " + first + ")");
  }
  sample_source s;
  s.label = label;
  s.values = res.valid_terminal();
  s.master_seed = ec.master_seed;
  s.realizations = ec.realizations;
  s.error_count = res.error_count;
  s.clamp_fraction = res.clamp_fraction;
  return s;
}

// shared bin edges so the per-source masses are directly comparable; an exact
// law contributes analytic rows from CDF differences, with the edge bins
// absorbing the tail mass so every source sums to 1
std::string density_csv(const std::vector<sample_source>& sources, int bins, double lo,
                        double hi, const std::optional<cir_params>& exact, double t) {
  std::string csv = "bin_left,bin_right,mass,source\n";
  std::vector<double> left, right;
  for (const sample_source& s : sources) {
    histogram_result h = histogram(s.values, bins, lo, hi);
    if (left.empty()) {
      left = h.bin_left;
      right = h.bin_right;
    }
    for (std::size_t i = 0; i < h.mass.size(); ++i)
      csv += fmt_g17(h.bin_left[i]) + "," + fmt_g17(h.bin_right[i]) + "," +
             fmt_g17(h.mass[i]) + "," + s.label + "\n";
  }
  if (exact && !left.empty()) {
    std::vector<double> mass(left.size());
    for (std::size_t i = 0; i < left.size(); ++i)
      mass[i] = cir_cdf(*exact, t, right[i]) - cir_cdf(*exact, t, left[i]);
    mass.front() += cir_cdf(*exact, t, left.front());
    mass.back() += 1.0 - cir_cdf(*exact, t, right.back());
    for (std::size_t i = 0; i < left.size(); ++i)
      csv += fmt_g17(left[i]) + "," + fmt_g17(right[i]) + "," + fmt_g17(mass[i]) +
             ",cir exact\n";
  }
  return csv;
}

// ------------------------------------------------------------------- sigma

// the Green-Kubo orbit seed lives far above any moment-estimator block index
// so the two estimates never share a stream
constexpr std::uint64_t kOrbitEtaStream = 1ull << 31;

int run_sigma(const json& doc, const overrides& ov, const std::string& out_dir,
              std::ostream& out) {
  require_keys(doc, "config",
               {"map", "observable", "orbit_length", "burn_in", "lag_cutoff",
                "block_length", "blocks", "seed", "workers"});
  fast_map_spec map = parse_map(doc.at("map"));
  observable_spec obs =
      doc.contains("observable") ? parse_observable(doc.at("observable")) : observable_spec{};
  long orbit_length = get_count(doc, "config", "orbit_length");
  long burn_in = get_count(doc, "config", "burn_in", 10000);
  long lag_cutoff = get_count(doc, "config", "lag_cutoff", 1000);
  long block_length = get_count(doc, "config", "block_length", 100000);
  long blocks = get_count(doc, "config", "blocks", 100);
  std::uint64_t seed = ov.seed ? *ov.seed : get_seed(doc, "config");
  int workers = ov.workers ? *ov.workers
                           : static_cast<int>(get_count(doc, "config", "workers", 1));
  map.validate();

  json echo{{"map", echo_map(map)},       {"observable", echo_observable(obs)},
            {"orbit_length", orbit_length}, {"burn_in", burn_in},
            {"lag_cutoff", lag_cutoff},   {"block_length", block_length},
            {"blocks", blocks},           {"seed", seed},
            {"workers", workers}};

  rng_stream r(seed, kOrbitEtaStream);
  double eta = sample_initial(map, r);
  orbit_data od = orbit(map, eta, orbit_length, burn_in);
  covariance_estimate gk = green_kubo(od, obs, lag_cutoff);
  gk.seed = seed;
  covariance_estimate mm =
      moment_estimator(map, obs, block_length, blocks, seed, workers, burn_in);

  json est{{"green_kubo", json::parse(gk.to_json())}, {"moment", json::parse(mm.to_json())}};
  out << est.dump(2) << "\n";
  write_run(out_dir, "sigma", echo, json{{"estimates", est}});
  return (gk.quality_flag || mm.quality_flag) ? 3 : 0;
}

// ----------------------------------------------------------------- compare

int run_compare(const json& doc, const overrides& ov, const std::string& out_dir,
                std::ostream& out) {
  require_keys(doc, "config",
               {"map", "slow", "epsilons", "interpretations", "sigma2",
                "f0_second_moment", "t", "map_realizations", "sde_realizations",
                "cir_realizations", "include_exact", "sde_dt", "bins", "burn_in",
                "seed", "workers"});
  fast_map_spec map = parse_map(doc.at("map"));
  if (!doc.contains("slow")) fail("config: missing \"slow\"");
  const json& js = doc.at("slow");
  require_keys(js, "slow", {"xi", "h", "coupling"});
  double xi = get_num(js, "slow", "xi");
  if (!js.contains("h")) fail("slow: missing \"h\"");
  h_function h = parse_h(js.at("h"));
  if (!js.contains("coupling")) fail("slow: missing \"coupling\"");
  coupling_spec f = parse_coupling(js.at("coupling"));

  std::vector<double> epsilons = get_num_array(doc, "config", "epsilons");
  std::vector<std::string> interp_names;
  {
    const json& v = doc.at("interpretations");
    if (!v.is_array()) fail("config: \"interpretations\" must be an array");
    for (const json& e : v) {
      if (!e.is_string()) fail("config: \"interpretations\" must hold strings");
      interp_names.push_back(e.get<std::string>());
    }
  }
  double sigma2 = get_num(doc, "config", "sigma2");
  double m2 = get_num(doc, "config", "f0_second_moment");
  double t = get_num(doc, "config", "t", 10.0);
  double sde_dt = get_num(doc, "config", "sde_dt", 1e-3);
  long map_realizations = get_count(doc, "config", "map_realizations", 0);
  long sde_realizations = get_count(doc, "config", "sde_realizations", 0);
  long cir_realizations = get_count(doc, "config", "cir_realizations", 0);
  bool have_exact = exact_law_available(h, f);
  bool include_exact = get_bool(doc, "config", "include_exact", have_exact);
  int bins = static_cast<int>(get_count(doc, "config", "bins", 200));
  long burn_in = get_count(doc, "config", "burn_in", kDefaultBurnIn);
  std::uint64_t seed = ov.seed ? *ov.seed : get_seed(doc, "config");
  int workers = ov.workers ? *ov.workers
                           : static_cast<int>(get_count(doc, "config", "workers", 1));
  if (ov.realizations) {
    if (map_realizations > 0) map_realizations = *ov.realizations;
    if (sde_realizations > 0) sde_realizations = *ov.realizations;
    if (cir_realizations > 0) cir_realizations = *ov.realizations;
  }
  map.validate();
  std::optional<cir_params> cir;
  if (have_exact) cir = derive_cir(h, f, xi, sigma2, m2);
  if ((include_exact || cir_realizations > 0) && !cir)
    fail("the exact reference law is unavailable for this system; set "
         "\"include_exact\": false and \"cir_realizations\": 0");

  json echo{{"map", echo_map(map)},
            {"slow", json{{"xi", xi}, {"h", echo_h(h)}, {"coupling", echo_coupling(f)}}},
            {"epsilons", epsilons},
            {"interpretations", interp_names},
            {"sigma2", sigma2},
            {"f0_second_moment", m2},
            {"t", t},
            {"map_realizations", map_realizations},
            {"sde_realizations", sde_realizations},
            {"cir_realizations", cir_realizations},
            {"include_exact", include_exact},
            {"sde_dt", sde_dt},
            {"bins", bins},
            {"burn_in", burn_in},
            {"seed", seed},
            {"workers", workers}};

  // each source draws from its own master seed, assigned in listed order
  std::vector<sample_source> sources;
  std::uint64_t seq = 0;
  std::string map_ref_label;
  double smallest_eps = 0.0;
  if (map_realizations > 0) {
    for (double eps : epsilons) {
      slow_system_spec s;
      s.epsilon = eps;
      s.xi = xi;
      s.h = h;
      s.f = f;
      ensemble_config ec;
      ec.realizations = map_realizations;
      ec.master_seed = seed + seq++;
      ec.workers = workers;
      ec.T = t;
      ec.burn_in = burn_in;
      ec.fast_slow = ensemble_config::fast_slow_model{s, map};
      std::string label = "map eps=" + fmt_g(eps);
      sources.push_back(run_source(ec, label));
      if (map_ref_label.empty() || eps < smallest_eps) {
        smallest_eps = eps;
        map_ref_label = label;
      }
    }
  }
  if (sde_realizations > 0) {
    for (const std::string& name : interp_names) {
      sde_spec s;
      s.drift = derive_drift(f, m2);
      s.diffusion = h;
      s.sigma = std::sqrt(sigma2);
      s.xi = xi;
      s.interp = parse_interp(name);
      s.sigma2 = sigma2;
      s.f0_second_moment = m2;
      ensemble_config ec;
      ec.realizations = sde_realizations;
      ec.master_seed = seed + seq++;
      ec.workers = workers;
      ec.T = t;
      ec.dt = sde_dt;
      ec.sde = s;
      sources.push_back(run_source(ec, "sde interpretation=" + name));
    }
  }
  if (cir_realizations > 0) {
    ensemble_config ec;
    ec.realizations = cir_realizations;
    ec.master_seed = seed + seq++;
    ec.workers = workers;
    ec.T = t;
    ec.cir = *cir;
    sources.push_back(run_source(ec, "cir sampler"));
  }
  if (sources.empty()) fail("compare: every source count is zero");

  double lo = 0.0, hi = 0.0;
  for (const sample_source& s : sources)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  hi = hi > 0.0 ? 1.05 * hi : hi + 1.0;
  if (hi <= lo) hi = lo + 1.0;
  write_text(std::filesystem::path(out_dir) / "density.csv",
             density_csv(sources, bins, lo, hi,
                         include_exact ? cir : std::optional<cir_params>{}, t));

  json table = json::array();
  auto add_row = [&](const std::string& source, const std::string& reference, double d) {
    table.push_back(json{{"source", source}, {"reference", reference}, {"ks", d}});
    out << "ks  " << source << "  vs  " << reference << "  =  " << fmt_g17(d) << "\n";
  };
  if (cir) {
    auto cdf = [&](double x) { return cir_cdf(*cir, t, x); };
    for (const sample_source& s : sources)
      add_row(s.label, "cir exact", ks_one_sample(s.values, cdf));
  }
  if (!map_ref_label.empty()) {
    const sample_source* ref = nullptr;
    for (const sample_source& s : sources)
      if (s.label == map_ref_label) ref = &s;
    for (const sample_source& s : sources)
      if (s.label.rfind("sde ", 0) == 0)
        add_row(s.label, map_ref_label, ks_two_sample(s.values, ref->values));
  }

  json outputs{{"ks_table", table}, {"sources", echo_sources(sources)}};
  if (cir)
    outputs["cir"] = json{{"sigma2", cir->sigma2},
                          {"alpha", cir->alpha},
                          {"beta", cir->beta},
                          {"xi", cir->xi}};
  write_run(out_dir, "compare", echo, outputs);
  return 0;
}

// ----------------------------------------------------------------- moments

int run_moments(const json& doc, const overrides& ov, const std::string& out_dir,
                std::ostream& out) {
  require_keys(doc, "config",
               {"map", "slow", "epsilons", "sigma2", "f0_second_moment", "t_max",
                "sample_dt", "map_realizations", "cir_realizations", "include_exact",
                "burn_in", "seed", "workers"});
  fast_map_spec map = parse_map(doc.at("map"));
  if (!doc.contains("slow")) fail("config: missing \"slow\"");
  const json& js = doc.at("slow");
  require_keys(js, "slow", {"xi", "h", "coupling"});
  double xi = get_num(js, "slow", "xi");
  if (!js.contains("h")) fail("slow: missing \"h\"");
  h_function h = parse_h(js.at("h"));
  if (!js.contains("coupling")) fail("slow: missing \"coupling\"");
  coupling_spec f = parse_coupling(js.at("coupling"));

  std::vector<double> epsilons = get_num_array(doc, "config", "epsilons");
  double t_max = get_num(doc, "config", "t_max", 15.0);
  double sample_dt = get_num(doc, "config", "sample_dt", 1.0);
  long map_realizations = get_count(doc, "config", "map_realizations", 0);
  long cir_realizations = get_count(doc, "config", "cir_realizations", 0);
  bool include_exact = get_bool(doc, "config", "include_exact", true);
  long burn_in = get_count(doc, "config", "burn_in", kDefaultBurnIn);
  std::uint64_t seed = ov.seed ? *ov.seed : get_seed(doc, "config");
  int workers = ov.workers ? *ov.workers
                           : static_cast<int>(get_count(doc, "config", "workers", 1));
  if (ov.realizations) {
    if (map_realizations > 0) map_realizations = *ov.realizations;
    if (cir_realizations > 0) cir_realizations = *ov.realizations;
  }
  map.validate();
  if (!(sample_dt > 0.0)) fail("config: \"sample_dt\" must be > 0");
  long nsteps = std::lround(t_max / sample_dt);
  if (nsteps < 1 || std::abs(t_max - double(nsteps) * sample_dt) > 1e-9)
    fail("config: \"t_max\" must be a positive multiple of \"sample_dt\"");

  bool want_ref = include_exact || cir_realizations > 0;
  double sigma2 = get_num(doc, "config", "sigma2", want_ref ? std::optional<double>{}
                                                            : std::optional<double>{0.0});
  double m2 = get_num(doc, "config", "f0_second_moment",
                      want_ref ? std::optional<double>{} : std::optional<double>{0.0});
  std::optional<cir_params> cir;
  if (want_ref) cir = derive_cir(h, f, xi, sigma2, m2);

  json echo{{"map", echo_map(map)},
            {"slow", json{{"xi", xi}, {"h", echo_h(h)}, {"coupling", echo_coupling(f)}}},
            {"epsilons", epsilons},
            {"sigma2", sigma2},
            {"f0_second_moment", m2},
            {"t_max", t_max},
            {"sample_dt", sample_dt},
            {"map_realizations", map_realizations},
            {"cir_realizations", cir_realizations},
            {"include_exact", include_exact},
            {"burn_in", burn_in},
            {"seed", seed},
            {"workers", workers}};

  std::vector<double> times;
  for (long k = 0; k <= nsteps; ++k) times.push_back(double(k) * sample_dt);

  struct curve {
    std::string label;
    std::vector<mean_se> points;  // one per time
  };
  std::vector<curve> curves;
  std::vector<sample_source> sources;  // seed/error echo only
  std::uint64_t seq = 0;

  auto curve_from_ensemble = [&](ensemble_config& ec, const std::string& label) {
    ensemble_result res = run_ensemble(ec);
    if (res.failed()) {
      std::string first = res.errors.empty() ? "no detail" : res.errors.front().what;
      throw ensemble_failure(label + ": " + std::to_string(res.error_count) + " of " +
                             std::to_string(ec.realizations) +
                             " realizations failed (first: " + first + ")");
    }
    curve c;
    c.label = label;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      std::vector<double> v = res.valid_samples(ti);
      for (double& x : v) x = std::abs(x);
      c.points.push_back(sample_mean_se(v));
    }
    curves.push_back(std::move(c));
    sample_source s;
    s.label = label;
    s.master_seed = ec.master_seed;
    s.realizations = ec.realizations;
    s.error_count = res.error_count;
    s.clamp_fraction = res.clamp_fraction;
    sources.push_back(std::move(s));
  };

  if (map_realizations > 0) {
    for (double eps : epsilons) {
      slow_system_spec s;
      s.epsilon = eps;
      s.xi = xi;
      s.h = h;
      s.f = f;
      ensemble_config ec;
      ec.realizations = map_realizations;
      ec.master_seed = seed + seq++;
      ec.workers = workers;
      ec.T = t_max;
      ec.burn_in = burn_in;
      ec.sample_times = times;
      ec.fast_slow = ensemble_config::fast_slow_model{s, map};
      curve_from_ensemble(ec, "map eps=" + fmt_g(eps));
    }
  }
  if (cir_realizations > 0) {
    ensemble_config ec;
    ec.realizations = cir_realizations;
    ec.master_seed = seed + seq++;
    ec.workers = workers;
    ec.T = t_max;
    ec.sample_times = times;
    ec.cir = *cir;
    curve_from_ensemble(ec, "cir sampler");
  }
  if (include_exact) {
    curve c;
    c.label = "cir exact";
    for (double t : times) c.points.push_back(mean_se{cir->mean(t), 0.0});
    curves.push_back(std::move(c));
  }
  if (curves.empty()) fail("moments: every source count is zero and include_exact is false");

  std::string csv = "t,mean_abs,se,source\n";
  for (const curve& c : curves)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      csv += fmt_g17(times[ti]) + "," + fmt_g17(c.points[ti].mean) + "," +
             fmt_g17(c.points[ti].se) + "," + c.label + "\n";
  write_text(std::filesystem::path(out_dir) / "moments.csv", csv);

  json devs = json::array();
  if (include_exact || cir) {
    for (const curve& c : curves) {
      if (c.label == "cir exact") continue;
      double sup = 0.0;
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        sup = std::max(sup, std::abs(c.points[ti].mean - cir->mean(times[ti])));
      devs.push_back(json{{"source", c.label}, {"sup_abs_deviation", sup}});
      out << "sup |mean - exact|  " << c.label << "  =  " << fmt_g17(sup) << "\n";
    }
  }
  write_run(out_dir, "moments", echo,
            json{{"deviations", devs}, {"sources", echo_sources(sources)}});
  return 0;
}

// -------------------------------------------------------------------- levy

int run_levy(const json& doc, const overrides& ov, const std::string& out_dir,
             std::ostream& out) {
  require_keys(doc, "config",
               {"map", "slow", "epsilon", "observable", "noise", "t",
                "map_realizations", "marcus", "stable_samples", "tail",
                "density_halfwidth", "bins", "burn_in", "seed", "workers"});
  fast_map_spec map = parse_map(doc.at("map"));
  if (!doc.contains("slow")) fail("config: missing \"slow\"");
  const json& js = doc.at("slow");
  require_keys(js, "slow", {"xi", "h", "coupling"});
  double xi = get_num(js, "slow", "xi", 0.0);
  h_function h = js.contains("h") ? parse_h(js.at("h")) : h_function{};
  coupling_spec f = js.contains("coupling") ? parse_coupling(js.at("coupling")) : coupling_spec{};
  double epsilon = get_num(doc, "config", "epsilon");
  observable_spec obs =
      doc.contains("observable") ? parse_observable(doc.at("observable")) : observable_spec{};

  if (!doc.contains("noise")) fail("config: missing \"noise\"");
  const json& jn = doc.at("noise");
  require_keys(jn, "noise", {"gamma", "skew", "scale"});
  stable_noise_spec noise;
  noise.gamma = get_num(jn, "noise", "gamma");
  noise.skew = get_num(jn, "noise", "skew", 1.0);
  noise.scale = get_num(jn, "noise", "scale", 1.0);

  double t = get_num(doc, "config", "t", 1.0);
  long map_realizations = get_count(doc, "config", "map_realizations", 0);
  long stable_samples = get_count(doc, "config", "stable_samples", 0);

  double marcus_c0 = 0.0, marcus_c1 = 0.0, marcus_xi = 0.0, marcus_dt = 1e-3;
  h_function marcus_h;
  long marcus_realizations = 0;
  if (doc.contains("marcus")) {
    const json& jm = doc.at("marcus");
    require_keys(jm, "marcus", {"drift_c0", "drift_c1", "h", "xi", "dt", "realizations"});
    marcus_c0 = get_num(jm, "marcus", "drift_c0", 0.0);
    marcus_c1 = get_num(jm, "marcus", "drift_c1", 0.0);
    if (jm.contains("h")) marcus_h = parse_h(jm.at("h"));
    marcus_xi = get_num(jm, "marcus", "xi", 0.0);
    marcus_dt = get_num(jm, "marcus", "dt", 1e-3);
    marcus_realizations = get_count(jm, "marcus", "realizations", 0);
  }

  double q_lo = 0.99, q_hi = 0.9999, w_lo = 10.0, w_hi = 1000.0;
  if (doc.contains("tail")) {
    const json& jt = doc.at("tail");
    require_keys(jt, "tail", {"quantile_lo", "quantile_hi", "window_lo", "window_hi"});
    q_lo = get_num(jt, "tail", "quantile_lo", 0.99);
    q_hi = get_num(jt, "tail", "quantile_hi", 0.9999);
    w_lo = get_num(jt, "tail", "window_lo", 10.0);
    w_hi = get_num(jt, "tail", "window_hi", 1000.0);
  }
  double density_halfwidth = get_num(doc, "config", "density_halfwidth", 20.0);
  int bins = static_cast<int>(get_count(doc, "config", "bins", 200));
  long burn_in = get_count(doc, "config", "burn_in", 1000);
  std::uint64_t seed = ov.seed ? *ov.seed : get_seed(doc, "config");
  int workers = ov.workers ? *ov.workers
                           : static_cast<int>(get_count(doc, "config", "workers", 1));
  if (ov.realizations) {
    if (map_realizations > 0) map_realizations = *ov.realizations;
    if (marcus_realizations > 0) marcus_realizations = *ov.realizations;
    if (stable_samples > 0) stable_samples = *ov.realizations;
  }
  map.validate();
  noise.validate();
  if (map_realizations > 0) {
    if (map.kind == map_family::doubling)
      fail("the superdiffusive regime needs an intermittent map family");
    if (map.gamma != noise.gamma)
      fail("map gamma=" + fmt_g(map.gamma) + " must match noise gamma=" + fmt_g(noise.gamma));
    if (obs.shift == 0.0)
      fail("the observable must be nonzero at the neutral fixed point; set a nonzero "
           "observable.shift");
  }
  if (map_realizations == 0 && marcus_realizations == 0 && stable_samples == 0)
    fail("levy: every source count is zero");

  json echo{{"map", echo_map(map)},
            {"slow", json{{"xi", xi}, {"h", echo_h(h)}, {"coupling", echo_coupling(f)}}},
            {"epsilon", epsilon},
            {"observable", echo_observable(obs)},
            {"noise", json{{"gamma", noise.gamma}, {"skew", noise.skew}, {"scale", noise.scale}}},
            {"t", t},
            {"map_realizations", map_realizations},
            {"marcus", json{{"drift_c0", marcus_c0},
                            {"drift_c1", marcus_c1},
                            {"h", echo_h(marcus_h)},
                            {"xi", marcus_xi},
                            {"dt", marcus_dt},
                            {"realizations", marcus_realizations}}},
            {"stable_samples", stable_samples},
            {"tail", json{{"quantile_lo", q_lo},
                          {"quantile_hi", q_hi},
                          {"window_lo", w_lo},
                          {"window_hi", w_hi}}},
            {"density_halfwidth", density_halfwidth},
            {"bins", bins},
            {"burn_in", burn_in},
            {"seed", seed},
            {"workers", workers}};

  std::vector<sample_source> sources;
  json fits = json::array();
  std::uint64_t seq = 0;
  auto add_fit = [&](const std::string& label, long n, const char* kind, double lo,
                     double hi, double exponent) {
    fits.push_back(json{{"source", label},
                        {"n", n},
                        {"fit", kind},
                        {"lo", lo},
                        {"hi", hi},
                        {"exponent", exponent}});
    out << "tail exponent  " << label << "  =  " << fmt_g17(exponent) << "  (" << kind
        << " " << fmt_g(lo) << ".." << fmt_g(hi) << ")\n";
  };

  if (map_realizations > 0) {
    slow_system_spec s;
    s.epsilon = epsilon;
    s.xi = xi;
    s.f0 = obs;
    s.h = h;
    s.f = f;
    s.scaling = scaling_kind::superdiffusive;
    s.superdiffusive_gamma = noise.gamma;
    ensemble_config ec;
    ec.realizations = map_realizations;
    ec.master_seed = seed + seq++;
    ec.workers = workers;
    ec.T = t;
    ec.burn_in = burn_in;
    ec.fast_slow = ensemble_config::fast_slow_model{s, map};
    sources.push_back(run_source(ec, "map eps=" + fmt_g(epsilon)));
    add_fit(sources.back().label, long(sources.back().values.size()), "quantile", q_lo,
            q_hi, tail_exponent_quantile(sources.back().values, q_lo, q_hi));
  }
  if (marcus_realizations > 0) {
    sde_spec s;
    s.drift.form = drift_spec::form_t::affine;
    s.drift.c0 = marcus_c0;
    s.drift.c1 = marcus_c1;
    s.diffusion = marcus_h;
    s.sigma = 1.0;
    s.xi = marcus_xi;
    s.interp = interpretation::marcus_via_transform;
    s.noise.kind = noise_spec::kind_t::stable;
    s.noise.exponent = noise.exponent();
    s.noise.skew = noise.skew;
    s.noise.scale = noise.scale;
    ensemble_config ec;
    ec.realizations = marcus_realizations;
    ec.master_seed = seed + seq++;
    ec.workers = workers;
    ec.T = t;
    ec.dt = marcus_dt;
    ec.sde = s;
    sources.push_back(run_source(ec, "marcus"));
    add_fit("marcus", long(sources.back().values.size()), "window", w_lo, w_hi,
            tail_exponent_window(sources.back().values, w_lo, w_hi));
  }
  if (stable_samples > 0) {
    rng_stream r(seed + seq, 0);
    sample_source s;
    s.label = "stable sampler";
    s.master_seed = seed + seq++;
    s.realizations = stable_samples;
    s.values.resize(static_cast<std::size_t>(stable_samples));
    for (double& v : s.values) v = stable_sample(noise, r);
    sources.push_back(std::move(s));
    add_fit("stable sampler", stable_samples, "window", w_lo, w_hi,
            tail_exponent_window(sources.back().values, w_lo, w_hi));
  }

  write_text(std::filesystem::path(out_dir) / "density.csv",
             density_csv(sources, bins, -density_halfwidth, density_halfwidth,
                         std::nullopt, 0.0));
  std::string tail_csv = "source,n,fit,lo,hi,exponent\n";
  for (const json& row : fits)
    tail_csv += row.at("source").get<std::string>() + "," +
                std::to_string(row.at("n").get<long>()) + "," +
                row.at("fit").get<std::string>() + "," + fmt_g17(row.at("lo").get<double>()) +
                "," + fmt_g17(row.at("hi").get<double>()) + "," +
                fmt_g17(row.at("exponent").get<double>()) + "\n";
  write_text(std::filesystem::path(out_dir) / "tail.csv", tail_csv);
  write_run(out_dir, "levy", echo,
            json{{"tail_fits", fits}, {"sources", echo_sources(sources)}});
  return 0;
}

// ----------------------------------------------------------------- presets

const std::map<std::string, std::pair<std::string, std::string>>& preset_table() {
  // name -> (command, document); the documents double as commented examples
  static const std::map<std::string, std::pair<std::string, std::string>> table = {
      {"sigma-estimate",
       {"sigma", R"cfg(// limiting-variance constants of the intermittent square-root system:
// both estimators on the modified intermittent map at gamma = 0.1
{
  "map": {"family": "modified_pomeau_manneville", "gamma": 0.1},
  // f0(y) = y - shift; the attractor is symmetric, so no shift is needed
  "observable": {"shift": 0.0, "centered": true},
  "orbit_length": 10000000, // Green-Kubo orbit length
  "burn_in": 10000,         // iterates discarded before sampling starts
  "lag_cutoff": 1000,       // autocovariance lags summed by Green-Kubo
  "block_length": 400000,   // moment-estimator block size; shorter blocks bias low
  "blocks": 100,            // independent moment-estimator blocks
  "seed": 0,
  "workers": 1
}
)cfg"}},
      {"density-convergence",
       {"compare", R"cfg(// terminal-law convergence of the fast-slow map to the square-root
// diffusion: map marginals at t = 10 for shrinking eps against the exact law
{
  "map": {"family": "modified_pomeau_manneville", "gamma": 0.1},
  "slow": {
    "xi": 1.0,                        // slow initial condition
    "h": {"form": "power", "p": 0.5}, // noise factor sqrt(x)
    "coupling": {"form": "separable_quadratic", "fa": 0.5, "fb": 0.75}
  },
  "epsilons": [0.8, 0.4, 0.2],
  "interpretations": [],       // no integrated SDEs in this run
  "sigma2": 0.085,             // limiting variance (see sigma-estimate)
  "f0_second_moment": 0.319,   // int y^2 dmu
  "t": 10.0,
  "map_realizations": 100000,
  "sde_realizations": 0,
  "cir_realizations": 100000,  // exact-sampler ensemble shows the noise floor
  "include_exact": true,       // analytic density rows labeled "cir exact"
  "sde_dt": 0.001,
  "bins": 200,
  "burn_in": 10000,
  "seed": 0,
  "workers": 8
}
)cfg"}},
      {"drift-comparison",
       {"compare", R"cfg(// drift discrimination at eps = 0.2: the corrected drift against the pure
// Ito and pure Stratonovich readings of the same coefficients
{
  "map": {"family": "modified_pomeau_manneville", "gamma": 0.1},
  "slow": {
    "xi": 1.0,
    "h": {"form": "power", "p": 0.5},
    "coupling": {"form": "separable_quadratic", "fa": 0.5, "fb": 0.75}
  },
  "epsilons": [0.2],
  "interpretations": ["drift_corrected", "ito", "stratonovich"],
  "sigma2": 0.085,
  "f0_second_moment": 0.319,
  "t": 10.0,
  "map_realizations": 100000,
  "sde_realizations": 100000,
  "cir_realizations": 100000,
  "include_exact": true,
  "sde_dt": 0.001,             // Euler-Maruyama / Heun step
  "bins": 200,
  "burn_in": 10000,
  "seed": 0,
  "workers": 8
}
)cfg"}},
      {"moment-convergence",
       {"moments", R"cfg(// first absolute moment of the rescaled slow variable on t in [0, 15]
// against the exact mean-reversion curve
{
  "map": {"family": "modified_pomeau_manneville", "gamma": 0.1},
  "slow": {
    "xi": 1.0,
    "h": {"form": "power", "p": 0.5},
    "coupling": {"form": "separable_quadratic", "fa": 0.5, "fb": 0.75}
  },
  "epsilons": [0.8, 0.4, 0.2],
  "sigma2": 0.085,
  "f0_second_moment": 0.319,
  "t_max": 15.0,
  "sample_dt": 1.0,            // record the mean at every integer time
  "map_realizations": 100000,
  "cir_realizations": 100000,  // exact-sampler curve with its own noise
  "include_exact": true,       // closed-form mean curve, se = 0
  "burn_in": 10000,
  "seed": 0,
  "workers": 8
}
)cfg"}},
      {"superdiffusive-tails",
       {"levy", R"cfg(// heavy-tail regime: Birkhoff paths of the intermittent map at gamma = 0.75
// against the one-sided stable law with index 1/gamma = 4/3
{
  "map": {"family": "pomeau_manneville", "gamma": 0.75},
  "slow": {"xi": 0.0, "h": {"form": "one"}, "coupling": {"form": "zero"}},
  "epsilon": 0.01,             // path length T/eps map steps
  // f0(y) = y - 0.28 recenters the observable (orbit mean of y is ~0.28)
  // while keeping f0 nonzero at the neutral fixed point
  "observable": {"shift": 0.28, "centered": true},
  "noise": {"gamma": 0.75, "skew": 1.0, "scale": 1.0},
  "t": 1.0,
  "map_realizations": 1000000,
  "marcus": {
    "drift_c0": 0.0, "drift_c1": 0.0,  // driftless jump SDE
    "h": {"form": "one"},              // additive coordinates coincide with x
    "xi": 0.0,
    "dt": 0.001,
    "realizations": 100000
  },
  "stable_samples": 10000000,  // direct draws from the stable law
  "tail": {
    "quantile_lo": 0.99,       // map fit window by |x| quantiles
    "quantile_hi": 0.9999,
    "window_lo": 10.0,         // sampler fit window by |x| value
    "window_hi": 1000.0
  },
  "density_halfwidth": 20.0,   // density.csv covers [-20, 20]
  "bins": 200,
  "burn_in": 1000,
  "seed": 0,
  "workers": 8
}
)cfg"}},
  };
  return table;
}

std::string load_config_text(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::exists(arg, ec)) {
    std::ifstream f(arg, std::ios::binary);
    if (!f) fail("cannot read config file " + arg);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return text;
  }
  const auto& table = preset_table();
  auto it = table.find(arg);
  if (it != table.end()) return it->second.second;
  std::string names;
  for (const auto& [name, rest] : table) names += (names.empty() ? "" : ", ") + name;
  fail("config \"" + arg + "\" is neither a file nor a preset (presets: " + names + ")");
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, rest] : preset_table()) names.push_back(name);
  return names;
}

const std::string& preset_text(const std::string& name) {
  const auto& table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) fail("unknown preset \"" + name + "\"");
  return it->second.second;
}

int run_command(const std::string& command, const std::string& config_text,
                const overrides& ov, const std::string& out_dir, std::ostream& out,
                std::ostream& err) {
  try {
    json doc = json::parse(config_text, nullptr, true, /*ignore_comments=*/true);
    if (doc.is_object() && doc.contains("config")) {
      // a previous run.json; unwrap its echoed config
      require_keys(doc, "run document", {"command", "config", "outputs"});
      if (doc.contains("command")) {
        std::string prev = doc.at("command").get<std::string>();
        if (prev != command)
          fail("this run document came from \"" + prev + "\", not \"" + command + "\"");
      }
      doc = doc.at("config");
    }
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    if (command == "sigma") return run_sigma(doc, ov, out_dir, out);
    if (command == "compare") return run_compare(doc, ov, out_dir, out);
    if (command == "moments") return run_moments(doc, ov, out_dir, out);
    if (command == "levy") return run_levy(doc, ov, out_dir, out);
    fail("unknown command \"" + command + "\"");
  } catch (const ensemble_failure& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"deterministic fast-slow map systems and their stochastic limits"};
  app.require_subcommand(1);
  std::string config_arg, out_dir = ".";
  overrides ov;
  const std::pair<const char*, const char*> cmds[] = {
      {"sigma", "limiting-variance estimators on one map/observable pair"},
      {"compare", "terminal densities of map, integrated SDE, and exact law"},
      {"moments", "mean |x| curves against the exact mean-reversion curve"},
      {"levy", "superdiffusive tails: map paths, jump SDE, stable sampler"},
  };
  for (const auto& [name, desc] : cmds) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--config", config_arg, "config file, preset name, or previous run.json")
        ->required();
    sc->add_option("--seed", ov.seed, "master seed (default: the config's seed, else 0)");
    sc->add_option("--workers", ov.workers, "worker-thread hint; never changes outputs");
    sc->add_option("--realizations", ov.realizations,
                   "override every enabled ensemble size in the config");
    sc->add_option("--out", out_dir, "output directory (default .)");
  }

  std::vector<const char*> argv;
  argv.push_back("homog");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string& cmd = app.get_subcommands().front()->get_name();
  std::string text;
  try {
    text = load_config_text(config_arg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return run_command(cmd, text, ov, out_dir, out, err);
}

}  // namespace homog::cli
