#include "qkl/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qkl/kl.hpp"
#include "qkl/models.hpp"

namespace qkl {
namespace {

constexpr const char* kCsvHeader =
    "model,beta,kl,log10_kl,error_estimate,deformed_norm,flags";

struct FlagName {
  unsigned bit;
  const char* token;
};

// Fixed serialization order for the flags column.
constexpr std::array<FlagName, 3> kFlagNames{{
    {FLAG_TRUNCATED_SUPPORT, "TRUNCATED_SUPPORT"},
    {FLAG_NOT_CONVERGED, "NOT_CONVERGED"},
    {FLAG_EXPANSION_INVALID, "EXPANSION_INVALID"},
}};

std::string flags_to_string(unsigned flags) {
  std::string out;
  for (const auto& f : kFlagNames) {
    if (flags & f.bit) {
      if (!out.empty()) {
        out += '|';
      }
      out += f.token;
    }
  }
  return out;
}

unsigned flags_from_string(const std::string& field, const std::string& path) {
  unsigned flags = 0;
  std::size_t start = 0;
  while (start < field.size()) {
    std::size_t end = field.find('|', start);
    if (end == std::string::npos) {
      end = field.size();
    }
    const std::string token = field.substr(start, end - start);
    bool known = false;
    for (const auto& f : kFlagNames) {
      if (token == f.token) {
        flags |= f.bit;
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error("unknown flag token '" + token + "' in '" + path + "'");
    }
    start = end + 1;
  }
  return flags;
}

double parse_double(const std::string& field, const std::string& path) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error("cannot parse number '" + field + "' in '" + path + "'");
  }
  return value;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(',', start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

void write_file(const std::string& content, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for '" + path + "'");
  }
}

std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<double> make_grid(double lo, double hi, int points, GridKind kind) {
  if (points < 2) {
    throw std::invalid_argument("grid requires at least 2 points");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("grid requires finite lo < hi");
  }
  if (kind == GridKind::log && !(lo > 0.0)) {
    throw std::invalid_argument("log grid requires lo > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (kind == GridKind::log) {
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] =
          std::exp(llo + (lhi - llo) * i / (points - 1));
    }
  } else {
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    }
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.models.empty()) {
    throw std::invalid_argument("sweep: no models selected");
  }
  if (!std::isfinite(spec.beta_min) || !std::isfinite(spec.beta_max) ||
      !(spec.beta_min > 0.0) || !(spec.beta_min < spec.beta_max)) {
    throw std::invalid_argument("sweep: requires 0 < beta_min < beta_max");
  }
  if (spec.points < 2) {
    throw std::invalid_argument("sweep: points must be at least 2");
  }
  if (spec.workers < 0) {
    throw std::invalid_argument("sweep: workers must be non-negative");
  }
  validate(spec.quadrature);

  const auto catalogue = model_catalogue(spec.r);
  std::vector<std::string> names = spec.models;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<const DeformedDensityModel*> models;
  models.reserve(names.size());
  for (const auto& name : names) {
    models.push_back(&lookup_model(catalogue, name));
  }

  const std::vector<double> grid =
      make_grid(spec.beta_min, spec.beta_max, spec.points, spec.grid);

  struct Task {
    const DeformedDensityModel* model;
    double beta;
  };
  std::vector<Task> tasks;
  tasks.reserve(models.size() * grid.size());
  for (const auto* model : models) {
    for (double beta : grid) {
      tasks.push_back(Task{model, beta});
    }
  }

  const auto evaluate = [&spec](const Task& task) {
    SweepRow row;
    row.model = task.model->name;
    row.beta = task.beta;
    try {
      const KlResult res = kl_divergence(*task.model, task.beta, spec.quadrature);
      row.kl = res.value;
      row.error_estimate = res.error_estimate;
      row.deformed_norm = res.deformed_norm;
      if (res.support_used.truncated) {
        row.flags |= FLAG_TRUNCATED_SUPPORT;
      }
      if (res.divergent) {
        row.flags |= FLAG_NOT_CONVERGED;
      }
      if (std::isfinite(row.kl) && row.kl > row.error_estimate) {
        row.log10_kl = std::log10(row.kl);
      }
    } catch (const std::exception&) {
      row.kl = std::numeric_limits<double>::quiet_NaN();
      row.error_estimate = std::numeric_limits<double>::quiet_NaN();
      row.deformed_norm = std::numeric_limits<double>::quiet_NaN();
      row.flags |= FLAG_NOT_CONVERGED;
    }
    if (row.model == "gup_oscillator" && row.beta >= 0.1 * spec.r) {
      row.flags |= FLAG_EXPANSION_INVALID;
    }
    return row;
  };

  std::vector<SweepRow> rows(tasks.size());
  std::size_t workers = spec.workers > 0
                            ? static_cast<std::size_t>(spec.workers)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      rows[i] = evaluate(tasks[i]);
    }
  } else {
    // Indexed result slots + an atomic task cursor: the assembled vector is
    // independent of scheduling, so parallel and serial runs are bit-identical.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&tasks, &rows, &next, &evaluate] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) {
            return;
          }
          rows[i] = evaluate(tasks[i]);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  return rows;
}

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += row.model;
    out += ',';
    out += format_double(row.beta);
    out += ',';
    out += format_double(row.kl);
    out += ',';
    if (row.log10_kl) {
      out += format_double(*row.log10_kl);
    }
    out += ',';
    out += format_double(row.error_estimate);
    out += ',';
    out += format_double(row.deformed_norm);
    out += ',';
    out += flags_to_string(row.flags);
    out += '\n';
  }
  write_file(out, path);
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("unexpected CSV header in '" + path + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 7) {
      throw std::runtime_error("malformed CSV row in '" + path + "': " + line);
    }
    SweepRow row;
    row.model = fields[0];
    row.beta = parse_double(fields[1], path);
    row.kl = parse_double(fields[2], path);
    if (!fields[3].empty()) {
      row.log10_kl = parse_double(fields[3], path);
    }
    row.error_estimate = parse_double(fields[4], path);
    row.deformed_norm = parse_double(fields[5], path);
    row.flags = flags_from_string(fields[6], path);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_svg_chart(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) {
    throw std::invalid_argument("svg chart requires at least one row");
  }

  // Model order = first appearance; run_sweep emits rows already sorted.
  std::vector<std::string> order;
  for (const auto& row : rows) {
    if (std::find(order.begin(), order.end(), row.model) == order.end()) {
      order.push_back(row.model);
    }
  }

  double lb_min = std::numeric_limits<double>::infinity();
  double lb_max = -std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.beta > 0.0 && std::isfinite(row.beta)) {
      lb_min = std::min(lb_min, std::log10(row.beta));
      lb_max = std::max(lb_max, std::log10(row.beta));
    }
    if (row.log10_kl) {
      y_min = std::min(y_min, *row.log10_kl);
      y_max = std::max(y_max, *row.log10_kl);
    }
  }
  if (!std::isfinite(lb_min)) {
    lb_min = -1.0;
    lb_max = 1.0;
  }
  if (!std::isfinite(y_min)) {
    y_min = -1.0;
    y_max = 1.0;
  }
  if (lb_max - lb_min < 1e-12) {
    lb_min -= 0.5;
    lb_max += 0.5;
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  constexpr double kLeft = 70.0;
  constexpr double kRight = 940.0;
  constexpr double kTop = 20.0;
  constexpr double kBottom = 490.0;
  const auto sx = [&](double beta) {
    return kLeft + (std::log10(beta) - lb_min) / (lb_max - lb_min) * (kRight - kLeft);
  };
  const auto sy = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  static constexpr std::array<const char*, 6> kPalette{
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" "
         "font-family=\"monospace\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"#ffffff\"/>\n";
  svg += "<rect x=\"70\" y=\"20\" width=\"870\" height=\"470\" fill=\"none\" "
         "stroke=\"#444444\"/>\n";

  // x ticks at integer decade exponents when the range holds any, otherwise at
  // the two endpoints.
  std::vector<double> x_ticks;
  for (int e = static_cast<int>(std::ceil(lb_min - 1e-9));
       e <= static_cast<int>(std::floor(lb_max + 1e-9)); ++e) {
    x_ticks.push_back(static_cast<double>(e));
  }
  if (x_ticks.empty()) {
    x_ticks = {lb_min, lb_max};
  }
  for (double e : x_ticks) {
    const double x = kLeft + (e - lb_min) / (lb_max - lb_min) * (kRight - kLeft);
    svg += "<line x1=\"" + format_fixed2(x) + "\" y1=\"490\" x2=\"" +
           format_fixed2(x) + "\" y2=\"496\" stroke=\"#444444\"/>\n";
    char label[48];
    if (e == std::floor(e)) {
      std::snprintf(label, sizeof label, "1e%d", static_cast<int>(e));
    } else {
      std::snprintf(label, sizeof label, "%.2f", e);
    }
    svg += "<text x=\"" + format_fixed2(x) +
           "\" y=\"510\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  // y ticks: five evenly spaced values.
  for (int k = 0; k <= 4; ++k) {
    const double yv = y_min + (y_max - y_min) * k / 4.0;
    const double y = sy(yv);
    svg += "<line x1=\"64\" y1=\"" + format_fixed2(y) + "\" x2=\"70\" y2=\"" +
           format_fixed2(y) + "\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"60\" y=\"" + format_fixed2(y + 4.0) +
           "\" text-anchor=\"end\">" + format_fixed2(yv) + "</text>\n";
  }
  svg += "<text x=\"505\" y=\"530\" text-anchor=\"middle\">beta (log scale)</text>\n";
  svg += "<text transform=\"translate(16,255) rotate(-90)\" text-anchor=\"middle\">"
         "log10 KL divergence (nats)</text>\n";

  for (std::size_t m = 0; m < order.size(); ++m) {
    const char* color = kPalette[m % kPalette.size()];
    std::string points;
    for (const auto& row : rows) {
      if (row.model != order[m] || !row.log10_kl || !(row.beta > 0.0)) {
        continue;
      }
      if (!points.empty()) {
        points += ' ';
      }
      points += format_fixed2(sx(row.beta));
      points += ',';
      points += format_fixed2(sy(*row.log10_kl));
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    // legend entry
    const double ly = 40.0 + 18.0 * static_cast<double>(m);
    svg += "<line x1=\"760\" y1=\"" + format_fixed2(ly - 4.0) + "\" x2=\"790\" y2=\"" +
           format_fixed2(ly - 4.0) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"796\" y=\"" + format_fixed2(ly) + "\">" + order[m] + "</text>\n";
  }
  svg += "</svg>\n";
  write_file(svg, path);
}

}  // namespace qkl
