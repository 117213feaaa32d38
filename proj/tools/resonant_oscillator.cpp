// resonant-oscillator <experiment> [--config path] [--s0 X --M a,b,c --K N --tol T --out DIR]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "resonant/harness.hpp"

namespace h = resonant::harness;

int main(int argc, char** argv) {
  CLI::App app{"Resonant trajectories, remainder evolution and CR demos for the 2D harmonic oscillator"};
  std::string experiment, config_path, out_dir;
  std::optional<double> s0, tol, mu, r_exp;
  std::optional<std::size_t> K;
  std::vector<double> M, t_samples;
  bool print_config = false;

  app.add_option("experiment", experiment, "tables | trajectory | evolve | growth | cr-demo")->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--s0", s0, "initial renormalized time (> e)");
  app.add_option("--M", M, "horizon schedule, comma separated")->delimiter(',');
  app.add_option("--K", K, "number of Hermite modes");
  app.add_option("--tol", tol, "integration tolerance");
  app.add_option("--r", r_exp, "Sobolev exponent for the remainder envelope");
  app.add_option("--mu", mu, "dilation rate for cr-demo");
  app.add_option("--t", t_samples, "physical times for growth samples, comma separated")->delimiter(',');
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    h::RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw h::ConfigError("config: cannot open " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = h::parse_config(ss.str());
    }
    cfg.experiment = h::parse_experiment(experiment);
    if (s0) cfg.s0 = *s0;
    if (!M.empty()) cfg.M = M;
    if (K) cfg.K = *K;
    if (tol) cfg.tol = *tol;
    if (r_exp) cfg.r_exponent = *r_exp;
    if (mu) cfg.mu = *mu;
    if (!t_samples.empty()) cfg.t_samples = t_samples;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.validate();
    if (print_config) {
      std::cout << h::serialize(cfg);
      return 0;
    }

    const auto out = h::run(cfg);
    h::write_output(out);
    for (const auto& c : out.checks)
      std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << " value=" << h::format_number(c.value)
                << " limit=" << h::format_number(c.limit) << "\n";
    std::cout << "wrote " << out.payloads.size() + 1 << " files to " << cfg.out << "\n";
    return out.passed() ? 0 : 1;
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
