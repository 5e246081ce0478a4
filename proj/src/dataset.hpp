#pragma once

#include <armadillo>
#include <string>
#include <vector>

namespace dfosr {

// A functional time series with scalar predictors. Y is T x M with NaN at
// missing cells (missing(t, m) = 1 there); X is T x p and fully observed.
struct FunctionalDataset {
  arma::mat Y;                // T x M, NaN marks missing
  arma::umat missing;         // T x M, 1 where Y is missing
  arma::vec tau;              // M observation points, strictly increasing
  arma::mat X;                // T x p predictors
  std::vector<std::string> time_labels;      // length T
  std::vector<std::string> predictor_names;  // length p
  std::string time_header = "time";

  arma::uword n_times() const { return Y.n_rows; }
  arma::uword n_points() const { return Y.n_cols; }
  arma::uword n_pred() const { return X.n_cols; }
  arma::uword n_missing() const { return arma::accu(missing); }

  void validate() const;
};

// Wide-format response CSV (first column a time label, remaining columns
// named by observation point, empty cells missing) plus an optional T x p
// predictor CSV with header. center_scale standardizes each predictor column.
FunctionalDataset load_dataset(const std::string& response_path,
                               const std::string& predictor_path,
                               bool center_scale = false,
                               const std::string& format = "wide");

void save_dataset(const FunctionalDataset& data, const std::string& response_path,
                  const std::string& predictor_path);

// Canonical in-memory serialization (same bytes save_dataset would write),
// used for content hashing.
std::string serialize_dataset(const FunctionalDataset& data);

std::uint64_t content_hash(const std::string& bytes);

}  // namespace dfosr
