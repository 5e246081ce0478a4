#include "dfosr/dfosr.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "dataset.hpp"
#include "errors.hpp"
#include "gibbs.hpp"
#include "simstudy.hpp"
#include "summary.hpp"

struct dfosr_dataset {
  dfosr::FunctionalDataset data;
};

struct dfosr_draws {
  dfosr::PosteriorDraws draws;
};

namespace {

thread_local std::string g_last_error;

dfosr_status fail(dfosr_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
dfosr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DFOSR_OK;
  } catch (const dfosr::InvalidArgument& e) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const dfosr::ParseError& e) {
    return fail(DFOSR_ERR_PARSE, e.what());
  } catch (const dfosr::IoError& e) {
    return fail(DFOSR_ERR_IO, e.what());
  } catch (const dfosr::NumericalError& e) {
    return fail(DFOSR_ERR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return fail(DFOSR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DFOSR_ERR_INTERNAL, "unknown error");
  }
}

dfosr::McmcConfig to_config(const dfosr_fit_config& c) {
  dfosr::McmcConfig config;
  if (c.k < 1 || c.n_iter < 1 || c.burn_in < 0 || c.thin < 1) {
    throw dfosr::InvalidArgument("invalid fit configuration");
  }
  config.K = static_cast<arma::uword>(c.k);
  config.n_iter = static_cast<arma::uword>(c.n_iter);
  config.burn_in = static_cast<arma::uword>(c.burn_in);
  config.thin = static_cast<arma::uword>(c.thin);
  switch (c.variant) {
    case DFOSR_VARIANT_HS: config.variant = dfosr::ModelVariant::DfosrHs; break;
    case DFOSR_VARIANT_NIG: config.variant = dfosr::ModelVariant::DfosrNig; break;
    case DFOSR_VARIANT_FOSR_AR: config.variant = dfosr::ModelVariant::FosrAr; break;
    default: throw dfosr::InvalidArgument("unknown variant code");
  }
  config.sv_enabled = c.sv_enabled != 0;
  config.stationary_phi = c.stationary_phi != 0;
  config.seed = c.seed;
  config.validate();
  return config;
}

}  // namespace

extern "C" {

const char* dfosr_last_error(void) { return g_last_error.c_str(); }

void dfosr_fit_config_init(dfosr_fit_config* config) {
  if (!config) return;
  config->k = 6;
  config->n_iter = 5000;
  config->burn_in = 2000;
  config->thin = 1;
  config->variant = DFOSR_VARIANT_HS;
  config->sv_enabled = 0;
  config->stationary_phi = 1;
  config->seed = 1;
}

dfosr_status dfosr_dataset_load(const char* response_csv,
                                const char* predictor_csv_or_null,
                                int center_scale, dfosr_dataset** out) {
  if (!response_csv || !out) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto* handle = new dfosr_dataset{dfosr::load_dataset(
        response_csv, predictor_csv_or_null ? predictor_csv_or_null : "",
        center_scale != 0)};
    *out = handle;
  });
}

dfosr_status dfosr_dataset_save(const dfosr_dataset* dataset,
                                const char* response_csv,
                                const char* predictor_csv_or_null) {
  if (!dataset || !response_csv) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    dfosr::save_dataset(dataset->data, response_csv,
                        predictor_csv_or_null ? predictor_csv_or_null : "");
  });
}

dfosr_status dfosr_dataset_dims(const dfosr_dataset* dataset, int64_t* n_times,
                                int64_t* n_points, int64_t* n_predictors) {
  if (!dataset) return fail(DFOSR_ERR_INVALID_ARGUMENT, "null dataset");
  if (n_times) *n_times = static_cast<int64_t>(dataset->data.n_times());
  if (n_points) *n_points = static_cast<int64_t>(dataset->data.n_points());
  if (n_predictors) *n_predictors = static_cast<int64_t>(dataset->data.n_pred());
  return DFOSR_OK;
}

void dfosr_dataset_free(dfosr_dataset* dataset) { delete dataset; }

dfosr_status dfosr_fit(const dfosr_dataset* dataset,
                       const dfosr_fit_config* config, dfosr_draws** out) {
  if (!dataset || !config || !out) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto* handle =
        new dfosr_draws{dfosr::run_gibbs(to_config(*config), dataset->data)};
    *out = handle;
  });
}

dfosr_status dfosr_draws_save(const dfosr_draws* draws, const char* path) {
  if (!draws || !path) return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { draws->draws.save(path); });
}

dfosr_status dfosr_draws_load(const char* path, dfosr_draws** out) {
  if (!path || !out) return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* handle = new dfosr_draws{dfosr::PosteriorDraws::load(path)};
    *out = handle;
  });
}

dfosr_status dfosr_draws_count(const dfosr_draws* draws, int64_t* n) {
  if (!draws || !n) return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  *n = static_cast<int64_t>(draws->draws.n_draws());
  return DFOSR_OK;
}

dfosr_status dfosr_summarize(const dfosr_draws* draws, const char* out_dir,
                             double band_level, int64_t grid_points) {
  if (!draws || !out_dir) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    if (!(band_level > 0.0 && band_level < 1.0)) {
      throw dfosr::InvalidArgument("band level must be in (0, 1)");
    }
    dfosr::SummaryOptions options;
    options.band_level = band_level;
    options.grid_points =
        grid_points > 0 ? static_cast<arma::uword>(grid_points) : 0;
    dfosr::write_summaries(draws->draws, out_dir, options);
  });
}

void dfosr_draws_free(dfosr_draws* draws) { delete draws; }

dfosr_status dfosr_export_basis(const dfosr_dataset* dataset,
                                const char* out_dir) {
  if (!dataset || !out_dir) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw dfosr::IoError(std::string("cannot create directory: ") + out_dir);
    const auto sys = dfosr::build_basis(
        dfosr::ObservationGrid::from_points(dataset->data.tau));
    const fs::path dir(out_dir);
    if (!sys.B.save((dir / "basis_B.csv").string(), arma::csv_ascii) ||
        !sys.Omega.save((dir / "basis_Omega.csv").string(), arma::csv_ascii) ||
        !sys.knots.save((dir / "basis_knots.csv").string(), arma::csv_ascii)) {
      throw dfosr::IoError("cannot write basis files");
    }
  });
}

dfosr_status dfosr_run_study(const char* design, int64_t n_reps, uint64_t seed,
                             const dfosr_fit_config* methods,
                             const char* const* method_names,
                             int64_t n_methods, const char* out_csv) {
  if (!design || !methods || !out_csv || n_methods < 1 || n_reps < 1) {
    return fail(DFOSR_ERR_INVALID_ARGUMENT, "bad study arguments");
  }
  return guarded([&] {
    const std::string d(design);
    dfosr::SimKind kind;
    arma::uword T, M;
    if (d == "dynamic-small") {
      kind = dfosr::SimKind::Dynamic; T = 50; M = 20;
    } else if (d == "dynamic-large") {
      kind = dfosr::SimKind::Dynamic; T = 200; M = 100;
    } else if (d == "static-small") {
      kind = dfosr::SimKind::Static; T = 50; M = 20;
    } else if (d == "static-large") {
      kind = dfosr::SimKind::Static; T = 200; M = 100;
    } else {
      throw dfosr::InvalidArgument("unknown design: " + d);
    }
    std::vector<dfosr::StudyMethod> ms;
    for (int64_t i = 0; i < n_methods; ++i) {
      dfosr::StudyMethod m;
      m.config = to_config(methods[i]);
      m.name = method_names && method_names[i]
                   ? method_names[i]
                   : dfosr::variant_name(m.config.variant);
      ms.push_back(std::move(m));
    }
    const auto rows = dfosr::run_study(kind, T, M, ms,
                                       static_cast<arma::uword>(n_reps), seed);
    dfosr::write_study_csv(rows, out_csv);
  });
}

}  // extern "C"
