#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "minimax/dataset.hpp"
#include "minimax/errors.hpp"
#include "minimax/rng.hpp"
#include "minimax/stability.hpp"

namespace minimax {

/// Text that reads back to the identical double (17 significant digits
/// suffice for IEEE binary64). Used for all file output.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Short human-facing formatting for log lines.
inline std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Parse "<label> <idx>:<val> ..." lines with 1-based strictly increasing
/// indices. Blank lines and '#' comments are skipped. Labels must be one of
/// {+1, 0, -1} (0 and -1 both map to -1) unless allow_real_labels is set.
/// Feature dimension is the maximum index seen anywhere in the stream.
inline Dataset parse_libsvm(std::istream& in, bool allow_real_labels = false) {
  struct SparseRow {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<SparseRow> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    SparseRow row;
    std::string label_tok;
    ls >> label_tok;
    try {
      std::size_t used = 0;
      row.label = std::stod(label_tok, &used);
      if (used != label_tok.size()) throw std::invalid_argument(label_tok);
    } catch (const std::exception&) {
      throw parse_error("unparsable label '" + label_tok + "'", line_no);
    }
    if (!allow_real_labels) {
      if (row.label != 1.0 && row.label != 0.0 && row.label != -1.0)
        throw parse_error("label must be one of {+1, 0, -1}, got '" +
                              label_tok + "'",
                          line_no);
      if (row.label == 0.0) row.label = -1.0;
    }
    std::string tok;
    std::size_t prev_index = 0;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw parse_error("expected <index>:<value>, got '" + tok + "'",
                          line_no);
      std::size_t idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        const long long raw = std::stoll(tok.substr(0, colon), &used);
        if (used != colon || raw < 1) throw std::invalid_argument(tok);
        idx = static_cast<std::size_t>(raw);
        used = 0;
        const std::string vs = tok.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw parse_error("unparsable feature token '" + tok + "'", line_no);
      }
      if (idx <= prev_index)
        throw parse_error("feature indices must be strictly increasing",
                          line_no);
      prev_index = idx;
      max_index = std::max(max_index, idx);
      row.entries.emplace_back(idx, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("empty dataset", line_no);

  Dataset ds;
  ds.examples.reserve(rows.size());
  for (const SparseRow& row : rows) {
    Example e;
    e.label = row.label;
    e.features = zeros(max_index);
    for (const auto& [idx, val] : row.entries) e.features[idx - 1] = val;
    ds.examples.push_back(std::move(e));
  }
  ds.validate();
  return ds;
}

inline Dataset parse_libsvm_file(const std::string& path,
                                 bool allow_real_labels = false) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open input file", path);
  return parse_libsvm(in, allow_real_labels);
}

/// Inverse of parse_libsvm: sparse text with zero entries omitted. The first
/// row carries an explicit trailing <dim>:0 entry whenever no row has a
/// nonzero value in the last column, so the inferred dimension round-trips.
inline void serialize_libsvm(const Dataset& ds, std::ostream& out) {
  ds.validate();
  const std::size_t dim = ds.feature_dim();
  bool last_col_present = false;
  for (const Example& e : ds.examples)
    if (dim > 0 && e.features[dim - 1] != 0.0) last_col_present = true;
  for (std::size_t r = 0; r < ds.examples.size(); ++r) {
    const Example& e = ds.examples[r];
    out << format_real(e.label);
    for (std::size_t i = 0; i < dim; ++i)
      if (e.features[i] != 0.0)
        out << ' ' << (i + 1) << ':' << format_real(e.features[i]);
    if (r == 0 && dim > 0 && !last_col_present) out << ' ' << dim << ":0";
    out << '\n';
  }
}

/// Scale every feature vector to unit Euclidean norm (zero rows are kept).
inline Dataset normalize_rows(Dataset ds) {
  for (Example& e : ds.examples) {
    const double n = norm2(e.features);
    if (n > 0.0) scale(e.features, 1.0 / n);
  }
  return ds;
}

enum class SyntheticFamily {
  gaussian_features_linear_labels,
  quadratic_saddle_coeffs,
  heavy_tailed_scalar,
};

inline std::string synthetic_family_name(SyntheticFamily f) {
  switch (f) {
    case SyntheticFamily::gaussian_features_linear_labels:
      return "gaussian-features-linear-labels";
    case SyntheticFamily::quadratic_saddle_coeffs:
      return "quadratic-saddle-coeffs";
    case SyntheticFamily::heavy_tailed_scalar:
      return "heavy-tailed-scalar";
  }
  return "?";
}

inline SyntheticFamily synthetic_family_from_name(const std::string& s) {
  if (s == "gaussian-features-linear-labels")
    return SyntheticFamily::gaussian_features_linear_labels;
  if (s == "quadratic-saddle-coeffs")
    return SyntheticFamily::quadratic_saddle_coeffs;
  if (s == "heavy-tailed-scalar") return SyntheticFamily::heavy_tailed_scalar;
  throw config_error("data.family: unknown value '" + s + "'");
}

/// Seeded synthetic dataset recipe.
///  gaussian-features-linear-labels: x_j ~ N(0, (1+j)^{-2 scale_decay}),
///    y = sign(<u, x>) for a seed-drawn unit direction u (sign(0) := +1),
///    then flipped with probability label_flip. The defaults
///    (scale_decay = 0, label_flip = 0) give clean standard-normal data;
///    nonzero values mimic poorly conditioned, noisily labelled datasets.
///  quadratic-saddle-coeffs: features pack (z1, z2, z3) with z1 ~ U[-kappa,
///    kappa] and z2, z3 ~ N(0, I_dim); label 0.
///  heavy-tailed-scalar: single constant feature 1, label ~ Student-t(nu).
struct SyntheticSpec {
  SyntheticFamily family = SyntheticFamily::gaussian_features_linear_labels;
  std::size_t dim = 1;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double kappa = 1.0;        // quadratic-saddle-coeffs coupling range
  double nu = 2.5;           // heavy-tailed-scalar degrees of freedom
  double scale_decay = 0.0;  // gaussian family per-coordinate scale decay
  double label_flip = 0.0;   // gaussian family label noise probability
};

inline Dataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1) throw config_error("data.n: must be >= 1");
  RngStream rng(spec.seed);
  Dataset ds;
  ds.examples.reserve(spec.n);
  switch (spec.family) {
    case SyntheticFamily::gaussian_features_linear_labels: {
      if (spec.dim < 1) throw config_error("data.dim: must be >= 1");
      if (spec.scale_decay < 0.0)
        throw config_error("data.scale_decay: must be >= 0");
      if (spec.label_flip < 0.0 || spec.label_flip >= 1.0)
        throw config_error("data.label_flip: must be in [0, 1)");
      Vec u(spec.dim);
      for (double& e : u) e = rng.next_gaussian();
      const double nu_ = norm2(u);
      if (nu_ > 0.0) scale(u, 1.0 / nu_);
      for (std::size_t i = 0; i < spec.n; ++i) {
        Example e;
        e.features.resize(spec.dim);
        for (std::size_t j = 0; j < spec.dim; ++j) {
          const double s =
              spec.scale_decay > 0.0
                  ? std::pow(1.0 + static_cast<double>(j), -spec.scale_decay)
                  : 1.0;
          e.features[j] = s * rng.next_gaussian();
        }
        e.label = dot(u, e.features) >= 0.0 ? 1.0 : -1.0;
        if (spec.label_flip > 0.0 && rng.next_unit() < spec.label_flip)
          e.label = -e.label;
        ds.examples.push_back(std::move(e));
      }
      break;
    }
    case SyntheticFamily::quadratic_saddle_coeffs: {
      if (spec.dim < 1) throw config_error("data.dim: must be >= 1");
      if (!(spec.kappa >= 0.0)) throw config_error("data.kappa: must be >= 0");
      for (std::size_t i = 0; i < spec.n; ++i) {
        Example e;
        e.features.resize(1 + 2 * spec.dim);
        e.features[0] = rng.next_uniform(-spec.kappa, spec.kappa);
        for (std::size_t j = 1; j < e.features.size(); ++j)
          e.features[j] = rng.next_gaussian();
        e.label = 0.0;
        ds.examples.push_back(std::move(e));
      }
      break;
    }
    case SyntheticFamily::heavy_tailed_scalar: {
      if (!(spec.nu > 1.0))
        throw config_error("data.nu: must be > 1 so the mean exists");
      for (std::size_t i = 0; i < spec.n; ++i) {
        Example e;
        e.features = {1.0};
        e.label = rng.next_student_t(spec.nu);
        ds.examples.push_back(std::move(e));
      }
      break;
    }
  }
  ds.validate();
  return ds;
}

namespace detail {

inline void write_echo(std::ostream& out, const std::vector<std::string>& echo) {
  for (const std::string& line : echo) out << "# " << line << '\n';
}

}  // namespace detail

/// Stability traces as CSV: optional '#' config-echo lines, then the exact
/// header "pass,eta,mean_delta,std_delta" and one row per recorded pass,
/// grouped by eta and sorted by pass.
inline void write_trace_csv(const std::vector<StabilityTrace>& traces,
                            std::ostream& out,
                            const std::vector<std::string>& echo = {}) {
  detail::write_echo(out, echo);
  out << "pass,eta,mean_delta,std_delta\n";
  for (const StabilityTrace& tr : traces)
    for (std::size_t i = 0; i < tr.passes.size(); ++i)
      out << format_real(tr.passes[i]) << ',' << format_real(tr.eta_label)
          << ',' << format_real(tr.delta_mean[i]) << ','
          << format_real(tr.delta_std[i]) << '\n';
}

struct MetricRow {
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
  std::string method;
};

/// Risk-style metric rows: "metric,value,stderr,method".
inline void write_metrics_csv(const std::vector<MetricRow>& rows,
                              std::ostream& out,
                              const std::vector<std::string>& echo = {}) {
  detail::write_echo(out, echo);
  out << "metric,value,stderr,method\n";
  for (const MetricRow& r : rows)
    out << r.metric << ',' << format_real(r.value) << ','
        << format_real(r.stderr_) << ',' << r.method << '\n';
}

template <typename WriteFn>
inline void write_file(const std::string& path, const WriteFn& fn) {
  std::ofstream out(path, std::ios::binary);  // \n kept as-is on all hosts
  if (!out) throw io_error("cannot open output file", path);
  fn(out);
  out.flush();
  if (!out) throw io_error("write failed", path);
}

}  // namespace minimax
