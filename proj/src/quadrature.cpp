#include "qkl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace qkl {
namespace {

// Gauss-Kronrod 7/15 nodes and weights (classical QUADPACK constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double err = 0.0;
};

struct PanelWorse {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.err != b.err) return a.err < b.err;  // top() = largest error
    return a.lo > b.lo;                        // deterministic tie-break
  }
};

struct EvalState {
  std::int64_t evaluations = 0;
  bool saw_non_finite = false;
  double non_finite_at = 0.0;
};

Panel gk15(const Integrand& f, double lo, double hi, EvalState& st) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double sample[15];
  auto eval = [&](double x) {
    const double v = f(x);
    ++st.evaluations;
    if (!std::isfinite(v) && !st.saw_non_finite) {
      st.saw_non_finite = true;
      st.non_finite_at = x;
    }
    return v;
  };
  const double fc = eval(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = eval(c - dx);
    const double f2 = eval(c + dx);
    sample[2 * j] = f1;
    sample[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(sample[2 * j] - reskh) +
                         std::abs(sample[2 * j + 1] - reskh));
  }
  const double value = resk * h;
  const double scale = std::abs(h);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return Panel{lo, hi, value, err};
}

// Compensated summation over panels in canonical (left-to-right) order, so
// the final value never depends on the refinement schedule's arithmetic path.
void canonical_totals(std::vector<Panel>& panels, double& value, double& err) {
  std::sort(panels.begin(), panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  double sum = 0.0, comp = 0.0;
  double esum = 0.0, ecomp = 0.0;
  for (const Panel& p : panels) {
    double y = p.value - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    y = p.err - ecomp;
    t = esum + y;
    ecomp = (t - esum) - y;
    esum = t;
  }
  value = sum;
  err = esum;
}

IntegralResult refine(const Integrand& f, std::vector<Panel> initial,
                      const QuadratureSpec& spec, EvalState& st,
                      double extra_err, std::string pre_diagnostic) {
  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
  double value_sum = 0.0;
  double err_sum = extra_err;
  for (const Panel& p : initial) {
    value_sum += p.value;
    err_sum += p.err;
    heap.push(p);
  }
  int subdivisions = 0;
  bool budget_exhausted = false;
  while (!st.saw_non_finite) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(value_sum));
    if (err_sum <= target) break;
    if (subdivisions >= spec.max_subdivisions) {
      budget_exhausted = true;
      break;
    }
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi) || worst.err == 0.0) {
      break;  // panel no longer representable or already exact
    }
    heap.pop();
    const Panel left = gk15(f, worst.lo, mid, st);
    const Panel right = gk15(f, mid, worst.hi, st);
    value_sum += left.value + right.value - worst.value;
    err_sum += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  IntegralResult res;
  canonical_totals(panels, res.value, res.error_estimate);
  res.error_estimate += extra_err;
  res.evaluations = st.evaluations;
  res.diagnostic = std::move(pre_diagnostic);
  if (st.saw_non_finite) {
    res.converged = false;
    res.value = std::numeric_limits<double>::quiet_NaN();
    res.diagnostic = "non-finite integrand value near x = " + std::to_string(st.non_finite_at);
  } else {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value));
    res.converged = res.error_estimate <= target && res.diagnostic.empty();
    if (!res.converged && res.diagnostic.empty()) {
      res.diagnostic = budget_exhausted
                           ? "subdivision budget exhausted before reaching tolerance"
                           : "tolerance not reached";
    }
  }
  return res;
}

std::vector<double> interior_splits(const QuadratureSpec& spec, double lo, double hi,
                                    const std::vector<double>* more = nullptr) {
  std::vector<double> pts;
  auto add = [&](double x) {
    if (lo < x && x < hi) pts.push_back(x);
  };
  for (double x : spec.split_points) add(x);
  if (more != nullptr) {
    for (double x : *more) add(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<Panel> seed_panels(const Integrand& f, double lo, double hi,
                               const std::vector<double>& splits, EvalState& st) {
  std::vector<Panel> panels;
  double left = lo;
  for (double x : splits) {
    if (x > left) {
      panels.push_back(gk15(f, left, x, st));
      left = x;
    }
  }
  if (hi > left) panels.push_back(gk15(f, left, hi, st));
  return panels;
}

} // namespace

void validate(const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0)) throw std::invalid_argument("quadrature: abs_tol must be positive");
  if (!(spec.rel_tol > 0.0)) throw std::invalid_argument("quadrature: rel_tol must be positive");
  if (spec.max_subdivisions < 1) {
    throw std::invalid_argument("quadrature: max_subdivisions must be at least 1");
  }
  if (spec.truncation_radius && !(*spec.truncation_radius > 0.0)) {
    throw std::invalid_argument("quadrature: truncation_radius must be positive");
  }
  for (std::size_t i = 0; i + 1 < spec.split_points.size(); ++i) {
    if (!(spec.split_points[i] < spec.split_points[i + 1])) {
      throw std::invalid_argument("quadrature: split_points must be strictly increasing");
    }
  }
  for (double x : spec.split_points) {
    if (!std::isfinite(x)) throw std::invalid_argument("quadrature: split_points must be finite");
  }
}

IntegralResult integrate_interval(const Integrand& f, double lo, double hi,
                                  const QuadratureSpec& spec) {
  validate(spec);
  if (!(lo < hi)) throw std::invalid_argument("integrate_interval: requires lo < hi");
  EvalState st;
  std::vector<Panel> panels = seed_panels(f, lo, hi, interior_splits(spec, lo, hi), st);
  return refine(f, std::move(panels), spec, st, 0.0, {});
}

IntegralResult integrate_line(const Integrand& f, const QuadratureSpec& spec) {
  validate(spec);
  if (spec.truncation_radius) {
    const double radius = *spec.truncation_radius;
    return integrate_interval(f, -radius, radius, spec);
  }
  // Auto mode: a core interval wide enough to contain every declared split,
  // then geometrically doubled tail slices until they stop contributing.
  double core = 50.0;
  if (!spec.split_points.empty()) {
    const double outermost = std::max(std::abs(spec.split_points.front()),
                                      std::abs(spec.split_points.back()));
    core = std::max(core, outermost + 1.0);
  }
  EvalState st;
  std::vector<Panel> panels =
      seed_panels(f, -core, core, interior_splits(spec, -core, core), st);

  const double tail_cutoff = 0.01 * spec.abs_tol;
  double radius = core;
  double extra_err = 0.0;
  std::string diagnostic;
  constexpr int kMaxDoublings = 60;
  for (int k = 0;; ++k) {
    if (k == kMaxDoublings) {
      diagnostic = "tail truncation did not converge within " +
                   std::to_string(kMaxDoublings) + " doublings";
      break;
    }
    const Panel plus = gk15(f, radius, 2.0 * radius, st);
    const Panel minus = gk15(f, -2.0 * radius, -radius, st);
    panels.push_back(plus);
    panels.push_back(minus);
    if (st.saw_non_finite) break;
    const double contribution = std::max(std::abs(plus.value), std::abs(minus.value));
    if (contribution < tail_cutoff) {
      // Bound the remaining mass by the last (geometrically dominating) slice.
      extra_err = std::abs(plus.value) + std::abs(minus.value);
      break;
    }
    radius *= 2.0;
  }
  return refine(f, std::move(panels), spec, st, extra_err, std::move(diagnostic));
}

} // namespace qkl
