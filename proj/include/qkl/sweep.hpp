#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qkl/quadrature.hpp"

namespace qkl {

enum class GridKind { log, linear };

struct SweepOutput {
  std::string csv_path;  // empty = skip
  std::string svg_path;  // empty = skip
};

struct SweepSpec {
  std::vector<std::string> models{"gup_oscillator", "nonlocal_box"};
  double beta_min = 1e-6;
  double beta_max = 1e-1;
  int points = 50;
  GridKind grid = GridKind::log;
  double r = 1.0;  // oscillator scale
  QuadratureSpec quadrature;
  std::vector<SweepOutput> outputs;
  int workers = 0;  // 0 = hardware concurrency
};

enum RowFlag : unsigned {
  FLAG_TRUNCATED_SUPPORT = 1u << 0,
  FLAG_NOT_CONVERGED = 1u << 1,
  FLAG_EXPANSION_INVALID = 1u << 2,
};

struct SweepRow {
  std::string model;
  double beta = 0.0;
  double kl = 0.0;
  std::optional<double> log10_kl;  // null unless kl exceeds its error estimate
  double error_estimate = 0.0;
  double deformed_norm = 0.0;
  unsigned flags = 0;
};

// points >= 2; log grids place points geometrically, linear ones evenly;
// both grids hit the endpoints exactly.
std::vector<double> make_grid(double lo, double hi, int points, GridKind kind);

// One row per (model, beta), sorted by (model name, beta). Rows are
// independent work items evaluated by a worker pool; the assembled output is
// bit-identical whatever the worker count. Per-row failures are recorded in
// flags, never aborting the sweep. Throws std::invalid_argument on a bad spec.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Shortest round-trip decimal formatting (the formatting used in CSV and SVG).
std::string format_double(double v);

// CSV grammar: header `model,beta,kl,log10_kl,error_estimate,deformed_norm,flags`,
// flags |-joined in the order TRUNCATED_SUPPORT|NOT_CONVERGED|EXPANSION_INVALID,
// empty when none; UTF-8, LF line endings; numbers in shortest round-trip form.
void write_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_csv(const std::string& path);

// Self-contained static SVG line chart (viewBox 0 0 960 540): one polyline
// per model, x = log-scaled beta, y = log10 kl, axis labels and a legend.
// Byte-deterministic for identical rows. Throws std::invalid_argument on
// empty input and std::runtime_error with path context on I/O failure.
void write_svg_chart(const std::vector<SweepRow>& rows, const std::string& path);

} // namespace qkl
