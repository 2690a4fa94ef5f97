// SPDX-License-Identifier: Apache-2.0
#include "rdars/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rdars/error.hpp"
#include "rdars/model.hpp"

namespace rdars {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kAxisNames = {"power_dbm", "n_elements", "n_connected",
                                                        "rician_factor"};
constexpr std::string_view kCsvHeader = "scheme,sweep_value,trial,seed,anmse,objective_exact,objective_approx,"
                                        "iterations,converged,wall_time_ms,channel_hash,status";

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Collects every problem in a config document before failing.
class Reader {
public:
  std::vector<std::string> errors;

  bool object(const json &j, const std::string &path) {
    if (!j.is_object()) {
      errors.push_back(path + ": expected an object");
      return false;
    }
    return true;
  }

  void allow(const json &j, const std::string &path, std::initializer_list<std::string_view> keys) {
    for (const auto &[k, v] : j.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        errors.push_back(path + ": unknown key \"" + k + "\"");
      }
    }
  }

  const json *find(const json &j, const std::string &path, const char *key, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
      if (required) {
        errors.push_back(join(path, key) + ": missing required key");
      }
      return nullptr;
    }
    return &*it;
  }

  void number(const json &j, const std::string &path, const char *key, double &out, bool required = false) {
    if (const json *v = find(j, path, key, required)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        errors.push_back(join(path, key) + ": expected a number");
      }
    }
  }

  void integer(const json &j, const std::string &path, const char *key, int &out, bool required = false) {
    if (const json *v = find(j, path, key, required)) {
      if (v->is_number_integer() && v->get<std::int64_t>() >= std::numeric_limits<int>::min() &&
          v->get<std::int64_t>() <= std::numeric_limits<int>::max()) {
        out = v->get<int>();
      } else {
        errors.push_back(join(path, key) + ": expected an integer");
      }
    }
  }

  void boolean(const json &j, const std::string &path, const char *key, bool &out) {
    if (const json *v = find(j, path, key, false)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        errors.push_back(join(path, key) + ": expected true or false");
      }
    }
  }

  void string(const json &j, const std::string &path, const char *key, std::string &out) {
    if (const json *v = find(j, path, key, false)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        errors.push_back(join(path, key) + ": expected a string");
      }
    }
  }

  void vec3(const json &j, const std::string &path, const char *key, Vec3 &out) {
    if (const json *v = find(j, path, key, false)) {
      if (v->is_array() && v->size() == 3 && std::all_of(v->begin(), v->end(), [](const json &e) {
            return e.is_number();
          })) {
        for (std::size_t i = 0; i < 3; ++i) {
          out[i] = (*v)[i].get<double>();
        }
      } else {
        errors.push_back(join(path, key) + ": expected an array of 3 numbers");
      }
    }
  }

  static std::string join(const std::string &path, const char *key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }
};

void read_dims(Reader &r, const json &j, SystemDims &d) {
  if (!r.object(j, "dims")) {
    return;
  }
  r.allow(j, "dims", {"n_bs_antennas", "n_users", "n_elements", "n_connected"});
  r.integer(j, "dims", "n_bs_antennas", d.n_bs_antennas, true);
  r.integer(j, "dims", "n_users", d.n_users, true);
  r.integer(j, "dims", "n_elements", d.n_elements, true);
  r.integer(j, "dims", "n_connected", d.n_connected, true);
}

void read_topology(Reader &r, const json &j, Topology &t) {
  if (!r.object(j, "topology")) {
    return;
  }
  r.allow(j, "topology", {"bs_position", "rdars_position", "user_center", "user_radius"});
  r.vec3(j, "topology", "bs_position", t.bs_position);
  r.vec3(j, "topology", "rdars_position", t.rdars_position);
  r.vec3(j, "topology", "user_center", t.user_center);
  r.number(j, "topology", "user_radius", t.user_radius);
}

void read_path_loss(Reader &r, const json &j, PathLossParams &p) {
  if (!r.object(j, "path_loss")) {
    return;
  }
  r.allow(j, "path_loss", {"beta0_db", "exponent_rb", "exponent_ur", "exponent_ub", "shadow_sigma_db"});
  r.number(j, "path_loss", "beta0_db", p.beta0_db);
  r.number(j, "path_loss", "exponent_rb", p.exponent_rb);
  r.number(j, "path_loss", "exponent_ur", p.exponent_ur);
  r.number(j, "path_loss", "exponent_ub", p.exponent_ub);
  r.number(j, "path_loss", "shadow_sigma_db", p.shadow_sigma_db);
}

void read_radio(Reader &r, const json &j, RadioParams &p) {
  if (!r.object(j, "radio")) {
    return;
  }
  r.allow(j, "radio", {"total_power_dbm", "noise_bs_dbm", "noise_conn_dbm"});
  r.number(j, "radio", "total_power_dbm", p.total_power_dbm);
  r.number(j, "radio", "noise_bs_dbm", p.noise_bs_dbm);
  r.number(j, "radio", "noise_conn_dbm", p.noise_conn_dbm);
}

void read_pdd(Reader &r, const json &j, PddConfig &p) {
  if (!r.object(j, "pdd")) {
    return;
  }
  r.allow(j, "pdd",
          {"rho0", "alpha", "eps_violation", "eps_rbp", "max_outer", "max_inner", "ccp_iters", "qp_tol",
           "qp_max_iter", "ball_tol", "ball_max_iter"});
  r.number(j, "pdd", "rho0", p.rho0);
  r.number(j, "pdd", "alpha", p.alpha);
  r.number(j, "pdd", "eps_violation", p.eps_violation);
  r.number(j, "pdd", "eps_rbp", p.eps_rbp);
  r.integer(j, "pdd", "max_outer", p.max_outer);
  r.integer(j, "pdd", "max_inner", p.max_inner);
  r.integer(j, "pdd", "ccp_iters", p.ccp_iters);
  r.number(j, "pdd", "qp_tol", p.qp.tol);
  r.integer(j, "pdd", "qp_max_iter", p.qp.max_iter);
  r.number(j, "pdd", "ball_tol", p.ball.tol);
  r.integer(j, "pdd", "ball_max_iter", p.ball.max_iter);
}

void read_ao(Reader &r, const json &j, AOConfig &a) {
  if (!r.object(j, "ao")) {
    return;
  }
  r.allow(j, "ao", {"eps_ao", "max_ao_rounds", "mm_iters_p9", "mm_rel_tol"});
  r.number(j, "ao", "eps_ao", a.eps_ao);
  r.integer(j, "ao", "max_ao_rounds", a.max_ao_rounds);
  r.integer(j, "ao", "mm_iters_p9", a.mm_iters_p9);
  r.number(j, "ao", "mm_rel_tol", a.mm_rel_tol);
}

void read_sweep(Reader &r, const json &j, ExperimentConfig &cfg) {
  if (!r.object(j, "sweep")) {
    return;
  }
  r.allow(j, "sweep", {"axis", "values"});
  std::string axis;
  r.find(j, "sweep", "axis", true);
  r.string(j, "sweep", "axis", axis);
  if (j.contains("axis") && j["axis"].is_string()) {
    if (auto a = parse_sweep_axis(axis)) {
      cfg.sweep_axis = *a;
    } else {
      r.errors.push_back("sweep.axis: unknown axis \"" + axis + "\"");
    }
  }
  if (const json *v = r.find(j, "sweep", "values", true)) {
    if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json &e) { return e.is_number(); })) {
      cfg.sweep_values = v->get<std::vector<double>>();
    } else {
      r.errors.push_back("sweep.values: expected an array of numbers");
    }
  }
}

void read_schemes(Reader &r, const json &j, std::vector<SchemeId> &out) {
  if (!j.is_array()) {
    r.errors.push_back("schemes: expected an array of scheme names");
    return;
  }
  for (const auto &e : j) {
    if (!e.is_string()) {
      r.errors.push_back("schemes: expected scheme names as strings");
      continue;
    }
    if (auto id = parse_scheme(e.get<std::string>())) {
      out.push_back(*id);
    } else {
      r.errors.push_back("schemes: unknown scheme \"" + e.get<std::string>() + "\"");
    }
  }
}

template <typename F> void collect(std::vector<std::string> &errors, const char *what, F &&f) {
  try {
    f();
  } catch (const std::exception &e) {
    errors.push_back(std::string(what) + ": " + e.what());
  }
}

[[noreturn]] void fail(const std::vector<std::string> &errors) {
  std::string msg = "invalid config";
  for (const auto &e : errors) {
    msg += "; " + e;
  }
  throw Error(ErrorKind::Config, msg);
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

int scheme_rank(const std::string &name) {
  const auto id = parse_scheme(name);
  return id ? static_cast<int>(*id) : std::numeric_limits<int>::max();
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

std::string_view to_string(SweepAxis axis) { return kAxisNames.at(static_cast<std::size_t>(axis)); }

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) {
    if (kAxisNames[i] == name) {
      return static_cast<SweepAxis>(i);
    }
  }
  return std::nullopt;
}

std::optional<Profile> parse_profile(std::string_view name) {
  if (name == "desk") {
    return Profile::Desk;
  }
  if (name == "paper") {
    return Profile::Paper;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  collect(errors, "dims", [&] { dims.validate(); });
  collect(errors, "topology", [&] { topo.validate(); });
  collect(errors, "path_loss", [&] { pl.validate(); });
  collect(errors, "rician", [&] { ric.validate(); });
  collect(errors, "pdd", [&] { pdd.validate(); });
  collect(errors, "ao", [&] { ao.validate(); });
  if (!std::isfinite(radio.total_power_dbm) || !std::isfinite(radio.noise_bs_dbm) ||
      !std::isfinite(radio.noise_conn_dbm)) {
    errors.emplace_back("radio: levels must be finite");
  }
  if (schemes.empty()) {
    errors.emplace_back("schemes: at least one scheme is required");
  }
  if (sweep_values.empty()) {
    errors.emplace_back("sweep.values: at least one value is required");
  }
  for (double v : sweep_values) {
    const bool ok = [&] {
      switch (sweep_axis) {
      case SweepAxis::PowerDbm:
        return std::isfinite(v);
      case SweepAxis::NElements:
        return is_integral(v) && v >= 1.0 && v >= dims.n_connected;
      case SweepAxis::NConnected:
        return is_integral(v) && v >= 0.0 && v <= dims.n_elements;
      case SweepAxis::RicianFactor:
        return v >= 0.0 && v <= 1.0;
      }
      return false;
    }();
    if (!ok) {
      errors.push_back("sweep.values: " + format_double(v) + " is invalid for axis " +
                       std::string(to_string(sweep_axis)));
    }
  }
  if (trials < 1) {
    errors.emplace_back("trials: must be at least 1");
  }
  if (threads < 0) {
    errors.emplace_back("threads: must be non-negative");
  }
  if (!(exhaustive_cap >= 1.0)) {
    errors.emplace_back("exhaustive_cap: must be at least 1");
  }
  if (output_path.empty()) {
    errors.emplace_back("output_path: must not be empty");
  }
  if (!errors.empty()) {
    fail(errors);
  }
}

void ExperimentConfig::apply_profile(Profile p) {
  if (p == Profile::Desk) {
    dims.n_elements = 64;
    trials = 50;
  } else {
    dims.n_elements = 256;
    trials = 300;
  }
}

ExperimentConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader r;
  if (!r.object(doc, "config")) {
    fail(r.errors);
  }
  r.allow(doc, "config",
          {"dims", "topology", "path_loss", "rician", "radio", "schemes", "sweep", "trials", "base_seed", "pdd", "ao",
           "das_placement", "exhaustive_cap", "threads", "timing", "output_path"});
  if (const json *j = r.find(doc, "", "dims", true)) {
    read_dims(r, *j, cfg.dims);
  }
  if (const json *j = r.find(doc, "", "topology", false)) {
    read_topology(r, *j, cfg.topo);
  }
  if (const json *j = r.find(doc, "", "path_loss", false)) {
    read_path_loss(r, *j, cfg.pl);
  }
  if (const json *j = r.find(doc, "", "rician", false)) {
    if (r.object(*j, "rician")) {
      r.allow(*j, "rician", {"kappa"});
      r.number(*j, "rician", "kappa", cfg.ric.kappa);
    }
  }
  if (const json *j = r.find(doc, "", "radio", false)) {
    read_radio(r, *j, cfg.radio);
  }
  if (const json *j = r.find(doc, "", "schemes", true)) {
    read_schemes(r, *j, cfg.schemes);
  }
  if (const json *j = r.find(doc, "", "sweep", true)) {
    read_sweep(r, *j, cfg);
  }
  r.integer(doc, "", "trials", cfg.trials, true);
  if (const json *j = r.find(doc, "", "base_seed", false)) {
    if (j->is_number_unsigned() || (j->is_number_integer() && j->get<std::int64_t>() >= 0)) {
      cfg.base_seed = j->get<std::uint64_t>();
    } else {
      r.errors.emplace_back("base_seed: expected a non-negative integer");
    }
  }
  if (const json *j = r.find(doc, "", "pdd", false)) {
    read_pdd(r, *j, cfg.pdd);
  }
  if (const json *j = r.find(doc, "", "ao", false)) {
    read_ao(r, *j, cfg.ao);
  }
  std::string placement = std::string(to_string(cfg.das_placement));
  r.string(doc, "", "das_placement", placement);
  if (auto p = parse_das_placement(placement)) {
    cfg.das_placement = *p;
  } else {
    r.errors.push_back("das_placement: expected \"greedy\" or \"fixed\", got \"" + placement + "\"");
  }
  r.number(doc, "", "exhaustive_cap", cfg.exhaustive_cap);
  r.integer(doc, "", "threads", cfg.threads);
  r.boolean(doc, "", "timing", cfg.timing);
  r.string(doc, "", "output_path", cfg.output_path);

  if (!r.errors.empty()) {
    fail(r.errors);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot read config file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const ExperimentConfig &cfg) {
  json j;
  j["dims"] = {{"n_bs_antennas", cfg.dims.n_bs_antennas},
               {"n_users", cfg.dims.n_users},
               {"n_elements", cfg.dims.n_elements},
               {"n_connected", cfg.dims.n_connected}};
  j["topology"] = {{"bs_position", cfg.topo.bs_position},
                   {"rdars_position", cfg.topo.rdars_position},
                   {"user_center", cfg.topo.user_center},
                   {"user_radius", cfg.topo.user_radius}};
  j["path_loss"] = {{"beta0_db", cfg.pl.beta0_db},
                    {"exponent_rb", cfg.pl.exponent_rb},
                    {"exponent_ur", cfg.pl.exponent_ur},
                    {"exponent_ub", cfg.pl.exponent_ub},
                    {"shadow_sigma_db", cfg.pl.shadow_sigma_db}};
  j["rician"] = {{"kappa", cfg.ric.kappa}};
  j["radio"] = {{"total_power_dbm", cfg.radio.total_power_dbm},
                {"noise_bs_dbm", cfg.radio.noise_bs_dbm},
                {"noise_conn_dbm", cfg.radio.noise_conn_dbm}};
  json schemes = json::array();
  for (SchemeId id : cfg.schemes) {
    schemes.push_back(std::string(to_string(id)));
  }
  j["schemes"] = schemes;
  j["sweep"] = {{"axis", std::string(to_string(cfg.sweep_axis))}, {"values", cfg.sweep_values}};
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["pdd"] = {{"rho0", cfg.pdd.rho0},
              {"alpha", cfg.pdd.alpha},
              {"eps_violation", cfg.pdd.eps_violation},
              {"eps_rbp", cfg.pdd.eps_rbp},
              {"max_outer", cfg.pdd.max_outer},
              {"max_inner", cfg.pdd.max_inner},
              {"ccp_iters", cfg.pdd.ccp_iters},
              {"qp_tol", cfg.pdd.qp.tol},
              {"qp_max_iter", cfg.pdd.qp.max_iter},
              {"ball_tol", cfg.pdd.ball.tol},
              {"ball_max_iter", cfg.pdd.ball.max_iter}};
  j["ao"] = {{"eps_ao", cfg.ao.eps_ao},
             {"max_ao_rounds", cfg.ao.max_ao_rounds},
             {"mm_iters_p9", cfg.ao.mm_iters_p9},
             {"mm_rel_tol", cfg.ao.mm_rel_tol}};
  j["das_placement"] = std::string(to_string(cfg.das_placement));
  j["exhaustive_cap"] = cfg.exhaustive_cap;
  j["threads"] = cfg.threads;
  j["timing"] = cfg.timing;
  j["output_path"] = cfg.output_path;
  return j.dump(2) + "\n";
}

std::uint64_t cell_seed(std::uint64_t base_seed, double sweep_value, int trial) {
  const std::uint64_t coords =
      splitmix64(std::bit_cast<std::uint64_t>(sweep_value) ^ splitmix64(static_cast<std::uint64_t>(trial)));
  return splitmix64(base_seed ^ coords);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

CellSetup cell_setup(const ExperimentConfig &cfg, double sweep_value) {
  CellSetup s{cfg.dims, cfg.ric, cfg.radio};
  switch (cfg.sweep_axis) {
  case SweepAxis::PowerDbm:
    s.radio.total_power_dbm = sweep_value;
    break;
  case SweepAxis::NElements:
    s.dims.n_elements = static_cast<int>(sweep_value);
    break;
  case SweepAxis::NConnected:
    s.dims.n_connected = static_cast<int>(sweep_value);
    break;
  case SweepAxis::RicianFactor:
    s.ric.kappa = sweep_value;
    break;
  }
  return s;
}

namespace {

struct CellOutput {
  std::vector<ResultRecord> records;
  std::vector<DiagnosticRecord> diagnostics;
};

CellOutput run_cell(const ExperimentConfig &cfg, double sweep_value, int trial, bool collect_diagnostics) {
  using clock = std::chrono::steady_clock;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  CellOutput out;
  const std::uint64_t seed = cell_seed(cfg.base_seed, sweep_value, trial);
  auto blank = [&](SchemeId id) {
    ResultRecord r;
    r.scheme = std::string(to_string(id));
    r.sweep_value = sweep_value;
    r.trial = trial;
    r.seed = seed;
    r.anmse = r.objective_exact = r.objective_approx = kNaN;
    return r;
  };

  ChannelSet ch;
  CellSetup setup;
  try {
    setup = cell_setup(cfg, sweep_value);
    ch = generate_channel_set(setup.dims, cfg.topo, cfg.pl, setup.ric, setup.radio, seed);
  } catch (const Error &e) {
    for (SchemeId id : cfg.schemes) {
      ResultRecord r = blank(id);
      r.status = std::string(to_string(e.kind()));
      out.records.push_back(std::move(r));
    }
    return out;
  }

  SchemeContext ctx;
  ctx.theta0 = random_phases(setup.dims.n_elements, derive_seed(seed, 1));
  ctx.seed = derive_seed(seed, 2);
  ctx.pdd = cfg.pdd;
  ctx.ao = cfg.ao;
  ctx.das_placement = cfg.das_placement;
  ctx.exhaustive_cap = cfg.exhaustive_cap;
  const std::uint64_t hash = channel_fingerprint(ch);

  for (SchemeId id : cfg.schemes) {
    ResultRecord r = blank(id);
    r.channel_hash = hash;
    const auto t0 = clock::now();
    try {
      const SchemeResult res = run_scheme(id, ch, setup.dims, ctx);
      r.objective_exact = res.objective_exact;
      r.objective_approx = res.objective_approx;
      r.anmse = res.objective_exact / setup.dims.n_users;
      r.iterations = res.iterations;
      r.converged = res.converged;
      if (collect_diagnostics) {
        for (const auto &o : res.pdd_trace) {
          out.diagnostics.push_back(
              {r.scheme, sweep_value, trial, o.outer, o.al_value, o.violation, o.rho, o.lambda, o.nu});
        }
        for (std::size_t k = 0; k < res.ao_trace.size(); ++k) {
          out.diagnostics.push_back(
              {r.scheme, sweep_value, trial, static_cast<int>(k), res.ao_trace[k], kNaN, kNaN, kNaN, kNaN});
        }
      }
    } catch (const Error &e) {
      r.status = std::string(to_string(e.kind()));
    } catch (const std::exception &) {
      r.status = "internal";
    }
    if (cfg.timing) {
      r.wall_time_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

} // namespace

ExperimentOutput run_experiment(const ExperimentConfig &cfg, bool collect_diagnostics) {
  cfg.validate();
  const std::size_t n_cells = cfg.sweep_values.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<CellOutput> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells) {
        return;
      }
      const double value = cfg.sweep_values[i / static_cast<std::size_t>(cfg.trials)];
      const int trial = static_cast<int>(i % static_cast<std::size_t>(cfg.trials));
      try {
        cells[i] = run_cell(cfg, value, trial, collect_diagnostics);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(n_cells, cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  ExperimentOutput out;
  for (auto &c : cells) {
    std::move(c.records.begin(), c.records.end(), std::back_inserter(out.records));
    std::move(c.diagnostics.begin(), c.diagnostics.end(), std::back_inserter(out.diagnostics));
  }
  std::stable_sort(out.records.begin(), out.records.end(), [](const ResultRecord &a, const ResultRecord &b) {
    return std::tuple(a.sweep_value, a.trial, scheme_rank(a.scheme)) <
           std::tuple(b.sweep_value, b.trial, scheme_rank(b.scheme));
  });
  std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                   [](const DiagnosticRecord &a, const DiagnosticRecord &b) {
                     return std::tuple(a.sweep_value, a.trial, scheme_rank(a.scheme), a.iter) <
                            std::tuple(b.sweep_value, b.trial, scheme_rank(b.scheme), b.iter);
                   });
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_text(const std::vector<ResultRecord> &records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto &r : records) {
    out += r.scheme + ',' + format_double(r.sweep_value) + ',' + std::to_string(r.trial) + ',' +
           std::to_string(r.seed) + ',' + format_double(r.anmse) + ',' + format_double(r.objective_exact) + ',' +
           format_double(r.objective_approx) + ',' + std::to_string(r.iterations) + ',' + (r.converged ? "1" : "0") +
           ',' + format_double(r.wall_time_ms) + ',' + hex64(r.channel_hash) + ',' + r.status + '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRecord> &records, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  }
  out << csv_text(records);
  out.flush();
  if (!out) {
    throw Error(ErrorKind::Io, "write failed for " + path);
  }
}

std::vector<ResultRecord> parse_csv_text(std::string_view text) {
  std::vector<ResultRecord> out;
  std::size_t pos = 0;
  int line_no = 0;
  auto bad = [&](const std::string &why) {
    throw Error(ErrorKind::InvalidInput, "csv line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) {
        bad("unexpected header");
      }
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 12) {
      bad("expected 12 fields");
    }
    try {
      ResultRecord r;
      r.scheme = f[0];
      r.sweep_value = std::stod(f[1]);
      r.trial = std::stoi(f[2]);
      r.seed = std::stoull(f[3]);
      r.anmse = std::stod(f[4]);
      r.objective_exact = std::stod(f[5]);
      r.objective_approx = std::stod(f[6]);
      r.iterations = std::stoi(f[7]);
      r.converged = f[8] == "1";
      r.wall_time_ms = std::stod(f[9]);
      r.channel_hash = std::stoull(f[10], nullptr, 16);
      r.status = f[11];
      out.push_back(std::move(r));
    } catch (const std::logic_error &) {
      bad("malformed field");
    }
  }
  if (line_no == 0) {
    throw Error(ErrorKind::InvalidInput, "csv: missing header");
  }
  return out;
}

std::vector<ResultRecord> parse_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot read " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str());
}

std::string diagnostics_csv_text(const std::vector<DiagnosticRecord> &records) {
  std::string out = "scheme,sweep_value,trial,iter,objective,violation,rho,lambda,nu\n";
  for (const auto &d : records) {
    out += d.scheme + ',' + format_double(d.sweep_value) + ',' + std::to_string(d.trial) + ',' +
           std::to_string(d.iter) + ',' + format_double(d.objective) + ',' + format_double(d.violation) + ',' +
           format_double(d.rho) + ',' + format_double(d.lambda) + ',' + format_double(d.nu) + '\n';
  }
  return out;
}

std::vector<SchemeMean> summarize(const std::vector<ResultRecord> &records) {
  std::map<std::tuple<int, double, std::string>, std::pair<double, int>> acc;
  for (const auto &r : records) {
    if (r.status != "ok") {
      continue;
    }
    auto &[sum, n] = acc[{scheme_rank(r.scheme), r.sweep_value, r.scheme}];
    sum += r.anmse;
    ++n;
  }
  std::vector<SchemeMean> out;
  for (const auto &[key, v] : acc) {
    out.push_back({std::get<2>(key), std::get<1>(key), v.first / v.second, v.second});
  }
  return out;
}

} // namespace rdars
