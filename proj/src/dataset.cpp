#include "dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace dfosr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& cell, const std::string& file,
                    std::size_t row, std::size_t col) {
  const std::string t = trim(cell);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ParseError(file + ": non-numeric cell '" + t + "' at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw ParseError(path + ": empty file");
  return rows;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void FunctionalDataset::validate() const {
  const arma::uword T = n_times();
  const arma::uword M = n_points();
  if (T < 2 || M < 4) {
    throw InvalidArgument("dataset too small: need T >= 2 and M >= 4");
  }
  if (missing.n_rows != T || missing.n_cols != M || tau.n_elem != M ||
      X.n_rows != T || time_labels.size() != T ||
      predictor_names.size() != n_pred()) {
    throw InvalidArgument("dataset: inconsistent dimensions");
  }
  if (!tau.is_sorted("strictascend")) {
    throw InvalidArgument("dataset: observation points must be strictly increasing");
  }
  if (!X.is_finite()) throw InvalidArgument("dataset: non-finite predictor");
  for (arma::uword t = 0; t < T; ++t) {
    arma::uword observed = 0;
    for (arma::uword m = 0; m < M; ++m) {
      const bool miss = missing(t, m) != 0;
      if (miss != !std::isfinite(Y(t, m))) {
        throw InvalidArgument("dataset: missing mask disagrees with Y");
      }
      observed += miss ? 0 : 1;
    }
    if (observed == 0) {
      throw InvalidArgument("dataset: row " + std::to_string(t + 1) +
                            " has no observed values");
    }
  }
}

FunctionalDataset load_dataset(const std::string& response_path,
                               const std::string& predictor_path,
                               bool center_scale, const std::string& format) {
  if (format != "wide") {
    throw InvalidArgument("unsupported dataset format: " + format);
  }
  const auto rows = read_csv(response_path);
  if (rows.size() < 2) throw ParseError(response_path + ": no data rows");
  const auto& header = rows[0];
  if (header.size() < 5) {
    throw ParseError(response_path +
                     ": need a time column plus at least 4 observation columns");
  }
  const arma::uword M = header.size() - 1;
  const arma::uword T = rows.size() - 1;

  FunctionalDataset data;
  data.time_header = trim(header[0]);
  data.tau.set_size(M);
  for (arma::uword m = 0; m < M; ++m) {
    data.tau(m) = parse_number(header[m + 1], response_path, 1, m + 2);
  }
  if (!data.tau.is_sorted("strictascend")) {
    throw ParseError(response_path +
                     ": observation-point columns must be strictly increasing");
  }

  data.Y.set_size(T, M);
  data.missing.zeros(T, M);
  data.time_labels.resize(T);
  for (arma::uword t = 0; t < T; ++t) {
    const auto& r = rows[t + 1];
    if (r.size() != M + 1) {
      throw ParseError(response_path + ": row " + std::to_string(t + 2) +
                       " has " + std::to_string(r.size()) + " cells, expected " +
                       std::to_string(M + 1));
    }
    data.time_labels[t] = trim(r[0]);
    for (arma::uword m = 0; m < M; ++m) {
      const std::string cell = trim(r[m + 1]);
      if (cell.empty()) {
        data.Y(t, m) = arma::datum::nan;
        data.missing(t, m) = 1;
      } else {
        data.Y(t, m) = parse_number(cell, response_path, t + 2, m + 2);
      }
    }
  }

  if (predictor_path.empty()) {
    data.X.set_size(T, 0);
  } else {
    const auto prows = read_csv(predictor_path);
    const arma::uword p = prows[0].size();
    if (prows.size() - 1 != T) {
      throw ParseError(predictor_path + ": " + std::to_string(prows.size() - 1) +
                       " data rows but response has " + std::to_string(T));
    }
    data.predictor_names.resize(p);
    for (arma::uword j = 0; j < p; ++j) data.predictor_names[j] = trim(prows[0][j]);
    data.X.set_size(T, p);
    for (arma::uword t = 0; t < T; ++t) {
      const auto& r = prows[t + 1];
      if (r.size() != p) {
        throw ParseError(predictor_path + ": row " + std::to_string(t + 2) +
                         " has " + std::to_string(r.size()) + " cells, expected " +
                         std::to_string(p));
      }
      for (arma::uword j = 0; j < p; ++j) {
        data.X(t, j) = parse_number(r[j], predictor_path, t + 2, j + 1);
      }
    }
  }

  if (center_scale && data.n_pred() > 0) {
    for (arma::uword j = 0; j < data.n_pred(); ++j) {
      const double m = arma::mean(data.X.col(j));
      const double s = arma::stddev(data.X.col(j));
      if (!(s > 0.0)) {
        throw InvalidArgument("cannot standardize constant predictor column " +
                              std::to_string(j + 1));
      }
      data.X.col(j) = (data.X.col(j) - m) / s;
    }
  }

  data.validate();
  return data;
}

std::string serialize_dataset(const FunctionalDataset& data) {
  std::ostringstream out;
  out << data.time_header;
  for (arma::uword m = 0; m < data.n_points(); ++m) {
    out << ',' << format_double(data.tau(m));
  }
  out << '\n';
  for (arma::uword t = 0; t < data.n_times(); ++t) {
    out << data.time_labels[t];
    for (arma::uword m = 0; m < data.n_points(); ++m) {
      out << ',';
      if (!data.missing(t, m)) out << format_double(data.Y(t, m));
    }
    out << '\n';
  }
  out << '\x1e';  // record separator between the two files
  if (data.n_pred() > 0) {
    for (arma::uword j = 0; j < data.n_pred(); ++j) {
      if (j) out << ',';
      out << data.predictor_names[j];
    }
    out << '\n';
    for (arma::uword t = 0; t < data.n_times(); ++t) {
      for (arma::uword j = 0; j < data.n_pred(); ++j) {
        if (j) out << ',';
        out << format_double(data.X(t, j));
      }
      out << '\n';
    }
  }
  return out.str();
}

void save_dataset(const FunctionalDataset& data, const std::string& response_path,
                  const std::string& predictor_path) {
  const std::string blob = serialize_dataset(data);
  const auto sep = blob.find('\x1e');
  {
    std::ofstream out(response_path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + response_path);
    out << blob.substr(0, sep);
  }
  if (data.n_pred() > 0) {
    if (predictor_path.empty()) {
      throw InvalidArgument("dataset has predictors but no predictor path given");
    }
    std::ofstream out(predictor_path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + predictor_path);
    out << blob.substr(sep + 1);
  }
}

std::uint64_t content_hash(const std::string& bytes) {
  // FNV-1a
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace dfosr
