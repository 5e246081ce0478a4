// Command-line front end for the dfosr shared library.
//
// Subcommands:
//   fit        fit a model to CSV data, save draws + summaries
//   simulate   run a paired simulation study and write the metric table
//   summarize  post-process a stored draws file
//   basis      export the spline basis of a dataset's grid (debugging)

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dfosr/dfosr.h"

namespace {

// Flat key=value config support: the file's entries become --key=value
// tokens for options that were not given explicitly on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;

  std::ifstream in(config_path);
  if (!in) {
    throw CLI::FileError::Missing(config_path);
  }
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw CLI::ConversionError(config_path + ": line " +
                                 std::to_string(lineno) + " is not key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : out) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) {
        given = true;
        break;
      }
    }
    if (!given) out.push_back(flag + "=" + value);
  }
  return out;
}

int runtime_fail(dfosr_status status) {
  std::fprintf(stderr, "error: %s\n", dfosr_last_error());
  return status == DFOSR_OK ? 0 : 2;
}

struct FitFlags {
  std::string response, predictors, out;
  std::string save_draws;
  std::string config_file;
  bool center_scale = false;
  bool sv = false;
  bool flat_phi = false;
  int k = 6;
  long long iters = 5000, burnin = 2000, thin = 1;
  unsigned long long seed = 1;
  int variant = DFOSR_VARIANT_HS;
  double band_level = 0.95;
  long long grid_points = 0;
};

void add_mcmc_options(CLI::App* cmd, FitFlags& f) {
  static const std::map<std::string, int> variant_map{
      {"hs", DFOSR_VARIANT_HS},
      {"nig", DFOSR_VARIANT_NIG},
      {"fosr-ar", DFOSR_VARIANT_FOSR_AR}};
  cmd->add_option("--k", f.k, "number of factors")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", f.iters, "MCMC iterations");
  cmd->add_option("--burnin", f.burnin, "burn-in iterations");
  cmd->add_option("--thin", f.thin, "thinning interval");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--variant", f.variant, "model variant")
      ->transform(CLI::CheckedTransformer(variant_map, CLI::ignore_case));
  cmd->add_flag("--sv", f.sv, "stochastic volatility for the noise variance");
  cmd->add_flag("--flat-phi", f.flat_phi,
                "flat AR-coefficient prior instead of Beta(5,2)");
  cmd->add_option("--config", f.config_file,
                  "flat key=value configuration file (handled before parsing)");
}

dfosr_fit_config to_config(const FitFlags& f) {
  dfosr_fit_config config;
  dfosr_fit_config_init(&config);
  config.k = f.k;
  config.n_iter = f.iters;
  config.burn_in = f.burnin;
  config.thin = f.thin;
  config.variant = f.variant;
  config.sv_enabled = f.sv ? 1 : 0;
  config.stationary_phi = f.flat_phi ? 0 : 1;
  config.seed = f.seed;
  return config;
}

int cmd_fit(const FitFlags& f) {
  dfosr_dataset* data = nullptr;
  dfosr_status st = dfosr_dataset_load(
      f.response.c_str(), f.predictors.empty() ? nullptr : f.predictors.c_str(),
      f.center_scale ? 1 : 0, &data);
  if (st != DFOSR_OK) return runtime_fail(st);

  int64_t T = 0, M = 0, p = 0;
  dfosr_dataset_dims(data, &T, &M, &p);
  std::printf("fitting: T = %lld, M = %lld, p = %lld\n",
              static_cast<long long>(T), static_cast<long long>(M),
              static_cast<long long>(p));

  const dfosr_fit_config config = to_config(f);
  dfosr_draws* draws = nullptr;
  st = dfosr_fit(data, &config, &draws);
  dfosr_dataset_free(data);
  if (st != DFOSR_OK) return runtime_fail(st);

  const std::string draws_path =
      f.save_draws.empty() ? f.out + "/draws.bin" : f.save_draws;
  st = dfosr_draws_save(draws, draws_path.c_str());
  if (st == DFOSR_OK) {
    st = dfosr_summarize(draws, f.out.c_str(), f.band_level, f.grid_points);
  }
  int64_t n = 0;
  dfosr_draws_count(draws, &n);
  dfosr_draws_free(draws);
  if (st != DFOSR_OK) return runtime_fail(st);
  std::printf("retained %lld draws; draws -> %s, summaries -> %s\n",
              static_cast<long long>(n), draws_path.c_str(), f.out.c_str());
  return 0;
}

int cmd_summarize(const std::string& draws_path, const std::string& out,
                  double band_level, long long grid_points) {
  dfosr_draws* draws = nullptr;
  dfosr_status st = dfosr_draws_load(draws_path.c_str(), &draws);
  if (st != DFOSR_OK) return runtime_fail(st);
  st = dfosr_summarize(draws, out.c_str(), band_level, grid_points);
  dfosr_draws_free(draws);
  if (st != DFOSR_OK) return runtime_fail(st);
  std::printf("summaries -> %s\n", out.c_str());
  return 0;
}

int cmd_simulate(const std::string& design, long long reps,
                 unsigned long long seed, const std::vector<std::string>& methods,
                 const FitFlags& f) {
  std::vector<dfosr_fit_config> configs;
  std::vector<const char*> names;
  static const std::map<std::string, int> variant_map{
      {"hs", DFOSR_VARIANT_HS},
      {"nig", DFOSR_VARIANT_NIG},
      {"fosr-ar", DFOSR_VARIANT_FOSR_AR}};
  for (const auto& m : methods) {
    const auto it = variant_map.find(m);
    if (it == variant_map.end()) {
      std::fprintf(stderr, "error: unknown method '%s'\n", m.c_str());
      return 1;
    }
    dfosr_fit_config c = to_config(f);
    c.variant = it->second;
    configs.push_back(c);
    names.push_back(m.c_str());
  }
  const std::string out_csv = f.out + "/metrics.csv";
  const dfosr_status st =
      dfosr_run_study(design.c_str(), reps, seed, configs.data(), names.data(),
                      static_cast<int64_t>(configs.size()), out_csv.c_str());
  if (st != DFOSR_OK) return runtime_fail(st);
  std::printf("metrics -> %s\n", out_csv.c_str());
  return 0;
}

int cmd_basis(const std::string& response, const std::string& out) {
  dfosr_dataset* data = nullptr;
  dfosr_status st = dfosr_dataset_load(response.c_str(), nullptr, 0, &data);
  if (st != DFOSR_OK) return runtime_fail(st);
  st = dfosr_export_basis(data, out.c_str());
  dfosr_dataset_free(data);
  if (st != DFOSR_OK) return runtime_fail(st);
  std::printf("basis matrices -> %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic function-on-scalars regression"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit a model to CSV data");
  fit->add_option("--response", fit_flags.response, "wide response CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--predictors", fit_flags.predictors, "T x p predictor CSV")
      ->check(CLI::ExistingFile);
  fit->add_flag("--center-scale", fit_flags.center_scale,
                "standardize predictor columns");
  fit->add_option("--out", fit_flags.out, "output directory")->required();
  fit->add_option("--save-draws", fit_flags.save_draws,
                  "draws file path (default <out>/draws.bin)");
  fit->add_option("--band-level", fit_flags.band_level, "credible band level")
      ->check(CLI::Range(0.0, 1.0));
  fit->add_option("--grid-points", fit_flags.grid_points,
                  "evaluate summaries on a denser grid of this size");
  add_mcmc_options(fit, fit_flags);

  std::string draws_path;
  FitFlags sum_flags;
  auto* summarize = app.add_subcommand("summarize", "post-process stored draws");
  summarize->add_option("--draws", draws_path, "draws file from fit")
      ->required()
      ->check(CLI::ExistingFile);
  summarize->add_option("--out", sum_flags.out, "output directory")->required();
  summarize->add_option("--band-level", sum_flags.band_level,
                        "credible band level")
      ->check(CLI::Range(0.0, 1.0));
  summarize->add_option("--grid-points", sum_flags.grid_points,
                        "evaluate summaries on a denser grid of this size");
  summarize->add_option("--config", sum_flags.config_file,
                        "flat key=value configuration file (handled before parsing)");

  FitFlags sim_flags;
  std::string design = "dynamic-small";
  long long reps = 10;
  std::vector<std::string> methods{"hs", "nig"};
  auto* simulate = app.add_subcommand("simulate", "run a simulation study");
  simulate->add_option("--design", design, "design name")
      ->check(CLI::IsMember({"dynamic-small", "dynamic-large", "static-small",
                             "static-large"}));
  simulate->add_option("--reps", reps, "number of replicates")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--methods", methods, "model variants to compare")
      ->delimiter(',');
  simulate->add_option("--out", sim_flags.out, "output directory")->required();
  add_mcmc_options(simulate, sim_flags);

  std::string basis_response, basis_out;
  auto* basis = app.add_subcommand("basis", "export the spline basis as CSV");
  basis->add_option("--response", basis_response, "wide response CSV")
      ->required()
      ->check(CLI::ExistingFile);
  basis->add_option("--out", basis_out, "output directory")->required();

  try {
    const std::vector<std::string> raw(argv + 1, argv + argc);
    const std::vector<std::string> expanded = expand_config(raw);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : expanded) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (fit->parsed()) return cmd_fit(fit_flags);
  if (summarize->parsed()) {
    return cmd_summarize(draws_path, sum_flags.out, sum_flags.band_level,
                         sum_flags.grid_points);
  }
  if (simulate->parsed()) {
    return cmd_simulate(design, reps, sim_flags.seed, methods, sim_flags);
  }
  if (basis->parsed()) return cmd_basis(basis_response, basis_out);
  return 1;
}
