#pragma once

// Experiment configuration, orchestration and export. Payloads (CSV/JSON) are
// deterministic for a given config; only manifest.json carries wall-clock time.

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resonant/basis.hpp"
#include "resonant/bubble_dynamics.hpp"
#include "resonant/cr_resonance.hpp"
#include "resonant/quadrature.hpp"
#include "resonant/spectral_evolution.hpp"

namespace resonant::harness {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { tables, trajectory, evolve, growth, cr_demo };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::tables: return "tables";
    case Experiment::trajectory: return "trajectory";
    case Experiment::evolve: return "evolve";
    case Experiment::growth: return "growth";
    case Experiment::cr_demo: return "cr-demo";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  if (s == "tables") return Experiment::tables;
  if (s == "trajectory") return Experiment::trajectory;
  if (s == "evolve") return Experiment::evolve;
  if (s == "growth") return Experiment::growth;
  if (s == "cr-demo") return Experiment::cr_demo;
  throw ConfigError("field 'experiment': unknown experiment '" + s +
                    "' (expected tables, trajectory, evolve, growth or cr-demo)");
}

struct RunConfig {
  Experiment experiment = Experiment::tables;
  double s0 = 20.0;
  std::vector<double> M{1e3, 1e4};
  std::size_t K = 128;
  double tol = 1e-10;
  double r_exponent = 2.0;
  std::vector<double> t_samples;  // empty: chosen from the run
  double mu = 0.1;
  std::string out = "out";

  bool operator==(const RunConfig&) const = default;

  void validate() const {
    if (!(s0 > std::numbers::e)) throw ConfigError("field 's0': must exceed e");
    if (M.empty()) throw ConfigError("field 'M': schedule is empty");
    for (std::size_t i = 0; i < M.size(); ++i) {
      if (!(M[i] > s0)) throw ConfigError("field 'M[" + std::to_string(i) + "]': must exceed s0");
      if (i > 0 && !(M[i] > M[i - 1])) throw ConfigError("field 'M': schedule must increase strictly");
    }
    if (K < 2) throw ConfigError("field 'K': must be at least 2");
    if (!(tol > 0.0)) throw ConfigError("field 'tol': must be positive");
    if (!(r_exponent >= 0.0)) throw ConfigError("field 'r_exponent': must be nonnegative");
    if (!(mu >= 0.0)) throw ConfigError("field 'mu': must be nonnegative");
    for (std::size_t i = 1; i < t_samples.size(); ++i)
      if (!(t_samples[i] > t_samples[i - 1])) throw ConfigError("field 't_samples': must increase strictly");
    if (out.empty()) throw ConfigError("field 'out': empty output directory");
  }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["s0"] = c.s0;
  j["M"] = c.M;
  j["K"] = c.K;
  j["tol"] = c.tol;
  j["r_exponent"] = c.r_exponent;
  j["t_samples"] = c.t_samples;
  j["mu"] = c.mu;
  j["out"] = c.out;
  return j;
}

namespace detail {

inline double number_field(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("field '" + key + "': expected a number");
  return v.get<double>();
}

inline std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("field '" + key + "': expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_field(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

// Line and column of a byte offset, 1-based.
inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Applies the keys present in `j` on top of `base`.
inline RunConfig merge(RunConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "experiment") {
      if (!v.is_string()) throw ConfigError("field 'experiment': expected a string");
      base.experiment = parse_experiment(v.get<std::string>());
    } else if (key == "s0") {
      base.s0 = detail::number_field(v, key);
    } else if (key == "M") {
      base.M = v.is_number() ? std::vector<double>{v.get<double>()} : detail::number_list(v, key);
    } else if (key == "K") {
      if (!v.is_number_unsigned()) throw ConfigError("field 'K': expected a positive integer");
      base.K = v.get<std::size_t>();
    } else if (key == "tol") {
      base.tol = detail::number_field(v, key);
    } else if (key == "r_exponent") {
      base.r_exponent = detail::number_field(v, key);
    } else if (key == "t_samples") {
      base.t_samples = detail::number_list(v, key);
    } else if (key == "mu") {
      base.mu = detail::number_field(v, key);
    } else if (key == "out") {
      if (!v.is_string()) throw ConfigError("field 'out': expected a string");
      base.out = v.get<std::string>();
    } else {
      throw ConfigError("field '" + key + "': unknown field");
    }
  }
  return base;
}

inline RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("config: parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  RunConfig c = merge(RunConfig{}, j);
  c.validate();
  return c;
}

inline std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Shortest decimal string that reads back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
  }
  void row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::logic_error("Csv: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text_ += ',';
      text_ += format_number(values[i]);
    }
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::size_t cols_;
  std::string text_;
};

/// SHA-1 hex digest of "blob <size>\0<content>", as git names file contents.
inline std::string git_blob_hash(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("git_blob_hash: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

struct RunOutput {
  RunConfig config;
  std::map<std::string, std::string> payloads;  // file name -> contents
  std::vector<Check> checks;
  json manifest;
  double wall_seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

namespace detail {

inline json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}});
  return arr;
}

inline Check at_most(std::string name, double value, double limit) {
  return {std::move(name), value <= limit, value, limit};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void run_tables(const RunConfig& cfg, RunOutput& out) {
  constexpr std::size_t kMax = 30;
  Csv inner({"n", "k", "closed_h0", "oracle_h0", "closed_h0sq", "oracle_h0sq"});
  double worst = 0.0;
  for (std::size_t n = 0; n <= kMax; ++n)
    for (std::size_t k = 0; k <= kMax; ++k) {
      const double c1 = inner_h_h0_h(n, k), o1 = quad_product_integral({n, 0, k}).value;
      const double c2 = inner_h_h0sq_h(n, k), o2 = quad_product_integral({n, 0, 0, k}).value;
      worst = std::max({worst, std::abs(c1 - o1), std::abs(c2 - o2)});
      inner.row({double(n), double(k), c1, o1, c2, o2});
    }
  out.payloads["inner_products.csv"] = inner.str();

  const std::size_t Kc = std::min<std::size_t>(cfg.K, 16);
  const auto tensor = chi_tensor(Kc);
  Csv chi_csv({"n1", "n2", "n3", "n4", "value"});
  double worst_sym = 0.0;
  for (const auto& e : tensor->entries()) {
    chi_csv.row({double(e.index[0]), double(e.index[1]), double(e.index[2]), double(e.index[3]), e.value});
    const auto& q = e.index;
    worst_sym = std::max(worst_sym, std::abs(e.value - (*tensor)(q[2], q[3], q[0], q[1])));
  }
  out.payloads["chi.csv"] = chi_csv.str();

  out.checks.push_back(at_most("inner_closed_vs_oracle", worst, 1e-10));
  out.checks.push_back(at_most("inner_h1_h0_h0", std::abs(inner_h_h0_h(1, 0) - 2.0 / (9.0 * std::sqrt(kPi))), 1e-12));
  out.checks.push_back(at_most("chi_1100", std::abs(chi(1, 1, 0, 0) - kPi / 4.0), 1e-9));
  out.checks.push_back(at_most("chi_symmetry", worst_sym, 1e-9));
}

inline ShootOptions shoot_options(const RunConfig& cfg) {
  ShootOptions o;
  o.rtol = cfg.tol;
  return o;
}

inline std::vector<ResonantTrajectory> shoot_all(const RunConfig& cfg) {
  std::vector<std::future<ResonantTrajectory>> jobs;
  for (double M : cfg.M)
    jobs.push_back(std::async(std::launch::async, [&cfg, M] { return backward_shoot(M, cfg.s0, cfg.tol, shoot_options(cfg)); }));
  std::vector<ResonantTrajectory> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline json report_json(const TrajectoryReport& r) {
  return {{"s_lo", r.s_lo},
          {"s_hi", r.s_hi},
          {"slope", r.slope},
          {"intercept", r.intercept},
          {"env_rho", r.env_rho},
          {"env_psi", r.env_psi},
          {"time_const", r.time_const},
          {"l_sq_log_const", r.l_sq_log_const},
          {"energy_residual", r.energy_residual},
          {"monotone_B", r.monotone_B},
          {"t_increasing", r.t_increasing}};
}

inline void run_trajectory(const RunConfig& cfg, RunOutput& out) {
  const auto trajs = shoot_all(cfg);
  json diag = json::object();
  json runs = json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const auto& tr = trajs[i];
    const auto rep = trajectory_diagnostics(tr, std::min(1e3, cfg.M[i] / 10.0), tr.s_max);
    json r = {{"M", cfg.M[i]}, {"records", tr.samples().size()}, {"diagnostics", report_json(rep)}};
    runs.push_back(r);
    out.checks.push_back({"t_increasing_M" + format_number(cfg.M[i]), rep.t_increasing, 0.0, 0.0});
    out.checks.push_back(at_most("energy_residual_M" + format_number(cfg.M[i]), rep.energy_residual, 1e-8));
  }
  diag["runs"] = runs;
  json cauchy = json::array();
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < trajs.size(); ++i) {
    const double d = cauchy_distance(trajs[i - 1], trajs[i], cfg.s0, cfg.M[i - 1] / 2.0);
    cauchy.push_back({{"M_a", cfg.M[i - 1]}, {"M_b", cfg.M[i]}, {"sup_distance", d}});
    out.checks.push_back(at_most("cauchy_" + format_number(cfg.M[i - 1]) + "_" + format_number(cfg.M[i]), d, 1e-2));
    if (i > 1) out.checks.push_back({"cauchy_shrinks_" + std::to_string(i), d < prev, d, prev});
    prev = d;
  }
  diag["cauchy"] = cauchy;
  out.payloads["diagnostics.json"] = dump(diag);

  Csv csv({"s", "a", "theta", "rho", "psi", "L", "b", "t"});
  for (const auto& r : trajs.back().samples()) csv.row({r.s, r.a, r.theta, r.rho, r.psi, r.L, r.b, r.t});
  out.payloads["trajectory.csv"] = csv.str();
}

inline RemainderOptions remainder_options(const RunConfig& cfg) {
  RemainderOptions o;
  o.rtol = cfg.tol;
  o.record_ds = 0.25;
  return o;
}

// sup over records with s <= s_hi of sqrt(s) ||w||_{H^r}, and max mass deviation.
struct RemainderSummary {
  double envelope = 0.0;
  double mass_dev = 0.0;
};

inline RemainderSummary summarize(const RemainderRun& run, double s_hi, double r) {
  RemainderSummary sm;
  const auto& S = run.record_s();
  const auto& G = run.record_g();
  for (std::size_t i = 0; i < S.size(); ++i) {
    sm.mass_dev = std::max(sm.mass_dev, std::abs(RemainderRun::mass(G[i]) - 1.0));
    if (S[i] <= s_hi) sm.envelope = std::max(sm.envelope, std::sqrt(S[i]) * sobolev_norm(G[i], r));
  }
  return sm;
}

inline void run_evolve(const RunConfig& cfg, RunOutput& out) {
  std::vector<std::future<RemainderRun>> jobs;
  for (double M : cfg.M)
    jobs.push_back(std::async(std::launch::async,
                              [&cfg, M] { return construct_remainder(M, cfg.s0, cfg.K, remainder_options(cfg)); }));
  std::vector<RemainderRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  const double s_common = cfg.M.front() / 2.0;
  json summary = json::array();
  std::optional<double> first_env;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto sm = summarize(runs[i], s_common, cfg.r_exponent);
    summary.push_back({{"M", cfg.M[i]},
                       {"K", cfg.K},
                       {"envelope", sm.envelope},
                       {"mass_deviation", sm.mass_dev},
                       {"spill", runs[i].spill},
                       {"steps", runs[i].stats.accepted}});
    out.checks.push_back(at_most("mass_M" + format_number(cfg.M[i]), sm.mass_dev, 1e-8));
    if (!first_env) first_env = sm.envelope;
    else
      out.checks.push_back(
          at_most("envelope_stable_M" + format_number(cfg.M[i]), std::abs(sm.envelope / *first_env - 1.0), 0.1));
  }
  out.payloads["remainder.json"] = dump(json{{"r_exponent", cfg.r_exponent}, {"runs", summary}});

  Csv csv({"s", "w_norm", "sqrt_s_w_norm", "mass"});
  const auto& last = runs.back();
  for (std::size_t i = 0; i < last.record_s().size(); ++i) {
    const double s = last.record_s()[i];
    const double w = sobolev_norm(last.record_g()[i], cfg.r_exponent);
    csv.row({s, w, std::sqrt(s) * w, RemainderRun::mass(last.record_g()[i])});
  }
  out.payloads["remainder.csv"] = csv.str();
}

inline std::string potential_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "potential_t%.3f.csv", t);
  return buf;
}

inline void run_growth(const RunConfig& cfg, RunOutput& out) {
  const double M = cfg.M.back();
  auto traj_job = std::async(std::launch::async, [&] { return backward_shoot(M, cfg.s0, cfg.tol, shoot_options(cfg)); });
  auto rem_job = std::async(std::launch::async, [&] { return construct_remainder(M, cfg.s0, cfg.K, remainder_options(cfg)); });
  const auto traj = traj_job.get();
  const auto run = rem_job.get();

  std::vector<double> ts = cfg.t_samples;
  if (ts.empty()) {
    const double lo = std::max(std::min(1e3, M / 4.0), cfg.s0), hi = M / 2.0;
    constexpr int n = 40;
    for (int i = 0; i < n; ++i) ts.push_back(traj.at(lo * std::pow(hi / lo, double(i) / (n - 1))).t);
  }
  const auto series = measure_growth(traj, run, ts);
  Csv csv({"t", "s", "h1_norm_sq", "four_a", "remainder_h1", "ratio_log_t"});
  double worst = 0.0;
  for (const auto& g : series) {
    csv.row({g.t, g.s, g.h1_norm_sq, g.four_a, g.remainder_h1, g.h1_norm_sq / std::log(g.t)});
    if (g.s >= 1e3) worst = std::max(worst, std::abs(g.h1_norm_sq - g.four_a));
  }
  out.payloads["growth.csv"] = csv.str();
  out.checks.push_back(at_most("growth_identity", worst, 0.05));

  std::vector<double> radii;
  for (int j = 0; j <= 200; ++j) radii.push_back(0.05 * j);
  for (double t : {ts.front(), ts[ts.size() / 2], ts.back()}) {
    const auto p = potential_field(traj, t, radii);
    Csv pc({"radius", "value"});
    for (std::size_t j = 0; j < radii.size(); ++j) pc.row({radii[j], p.values[j]});
    out.payloads[potential_name(t)] = pc.str();
  }
}

inline void run_cr_demo(const RunConfig& cfg, RunOutput& out) {
  const std::size_t K = std::min<std::size_t>(cfg.K, 64);
  std::vector<double> ss;
  for (int i = 0; i <= 50; ++i) ss.push_back(0.1 * i);
  const auto rep = cr_residual(cfg.mu, ss, K);
  const auto mode = solve_mode_equation(0.0, cfg.mu, 0.0);

  ModulationCoefficients co;
  co.kappa = [](double) { return 0.3; };
  co.nu = [](double) { return 0.2; };
  co.mu = [mu = cfg.mu](double) { return mu; };
  const double lam = solve_mode_equation(0.2, cfg.mu, 0.3).lambda;
  co.lambda = [lam](double) { return lam; };
  std::vector<double> sm;
  for (int i = 0; i <= 10; ++i) sm.push_back(0.05 * i);
  const auto states = modulation_odes(co, {0.0, 1.0, 0.0, 0.0, 0.0}, sm);
  const auto fam = modulated_family_residual(co, states, std::min<std::size_t>(K, 48));
  const double fam_max = *std::max_element(fam.begin(), fam.end());

  json res = {{"mu", cfg.mu},
              {"K", K},
              {"beta_re", mode.beta.real()},
              {"beta_im", mode.beta.imag()},
              {"lambda", mode.lambda},
              {"mode_residual", mode.residual},
              {"max_residual", rep.max_residual},
              {"growth_rate", rep.growth_rate},
              {"expected_rate", rep.expected_rate},
              {"modulated_family_residual", fam_max}};
  out.payloads["residuals.json"] = dump(res);

  Csv chi_csv({"n1", "n2", "n3", "n4", "value"});
  for (const auto& e : chi_tensor(std::min<std::size_t>(K, 16))->entries())
    chi_csv.row({double(e.index[0]), double(e.index[1]), double(e.index[2]), double(e.index[3]), e.value});
  out.payloads["chi.csv"] = chi_csv.str();

  out.checks.push_back(at_most("cr_residual", rep.max_residual, 1e-8));
  out.checks.push_back(at_most("mode_residual", mode.residual, 1e-10));
  out.checks.push_back(at_most("modulated_family_residual", fam_max, 1e-6));
}

}  // namespace detail

/// Runs the configured experiment and fills payloads, checks and manifest. Does
/// not touch the filesystem; see write_output.
inline RunOutput run(const RunConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (cfg.experiment) {
      case Experiment::tables: detail::run_tables(cfg, out); break;
      case Experiment::trajectory: detail::run_trajectory(cfg, out); break;
      case Experiment::evolve: detail::run_evolve(cfg, out); break;
      case Experiment::growth: detail::run_growth(cfg, out); break;
      case Experiment::cr_demo: detail::run_cr_demo(cfg, out); break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment '" + to_string(cfg.experiment) + "': " + e.what());
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json files = json::object();
  std::string combined;
  for (const auto& [name, body] : out.payloads) {
    const std::string h = git_blob_hash(body);
    files[name] = h;
    combined += name + " " + h + "\n";
  }
  out.manifest = {{"config", to_json(cfg)},
                  {"files", files},
                  {"content_hash", git_blob_hash(combined)},
                  {"checks", detail::checks_json(out.checks)},
                  {"passed", out.passed()},
                  {"wall_clock_seconds", out.wall_seconds}};
  return out;
}

inline void write_output(const RunOutput& out) {
  namespace fs = std::filesystem;
  const fs::path dir(out.config.out);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  };
  for (const auto& [name, body] : out.payloads) write(name, body);
  write("manifest.json", detail::dump(out.manifest));
}

}  // namespace resonant::harness
