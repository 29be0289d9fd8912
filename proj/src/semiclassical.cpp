#include "maglab/semiclassical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "maglab/parallel.hpp"

namespace maglab {

namespace {

constexpr double kBesselJ01 = 2.404825557695773;

struct Solve {
  double lambda = 0.0;
  double residual = 0.0;
  bool converged = true;
  Eigen::VectorXcd vector;
};

Solve solve_flagged(const OperatorMatrix& s, const SolverOpts& opts) {
  try {
    const auto r = ground_state(s, opts);
    return {r.lambda, r.residual, true, r.vector};
  } catch (const NoConvergence& e) {
    return {e.best().lambda, e.best().residual, false, e.best().vector};
  }
}

void check_n_list(std::span<const double> n_list) {
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (!std::isfinite(n_list[k]) || n_list[k] < 0)
      throw Error(ErrorKind::InvalidArgument, "n values must be finite and nonnegative");
    if (k > 0 && !(n_list[k] > n_list[k - 1]))
      throw Error(ErrorKind::InvalidArgument, "n values must be strictly increasing");
  }
}

}  // namespace

std::vector<SweepRecord> sweep(const GridDomain& g, const Weight& w, std::span<const double> n_list,
                               const SolverOpts& opts, int workers) {
  opts.validate();
  check_n_list(n_list);
  std::vector<SweepRecord> out(n_list.size());
  parallel_for(n_list.size(), workers, [&](std::size_t k) {
    const auto t0 = std::chrono::steady_clock::now();
    const double n = n_list[k];
    const Solve mag = solve_flagged(assemble_magnetic(g, w, n), opts);
    const Solve nonmag = solve_flagged(assemble_nonmagnetic(g, w, n), opts);
    SweepRecord& r = out[k];
    r.n = n;
    r.lambda_mag = mag.lambda;
    r.lambda_nonmag = nonmag.lambda;
    r.gap = mag.lambda - nonmag.lambda;
    r.residual_mag = mag.residual;
    r.residual_nonmag = nonmag.residual;
    r.h = g.h();
    r.converged = mag.converged && nonmag.converged;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  return out;
}

std::string_view to_string(VerdictKind kind) noexcept {
  switch (kind) {
    case VerdictKind::diverging: return "diverging";
    case VerdictKind::bounded: return "bounded";
    case VerdictKind::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict classify_limit(std::span<const double> keys, std::span<const double> values, const ClassifyOptions& opts) {
  if (keys.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "keys and values differ in length");
  if (values.size() < 4) throw Error(ErrorKind::TooFewRecords, "classification needs at least 4 records");
  if (!(opts.ratio > 1) || !(opts.tail_ratio > 0))
    throw Error(ErrorKind::InvalidArgument, "classification thresholds must be positive (ratio > 1)");

  const std::size_t m = values.size();
  Verdict v;
  v.growth_ratio = values[0] != 0 ? values[m - 1] / values[0] : std::numeric_limits<double>::infinity();
  const double last_step = values[m - 1] - values[m - 2];
  const double prev_step = values[m - 2] - values[m - 3];
  v.tail_ratio = prev_step != 0 ? last_step / prev_step : (last_step > 0 ? std::numeric_limits<double>::infinity() : 0.0);

  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (!(keys[k] > 0) || !(values[k] > 0)) continue;
      const double x = std::log(keys[k]), y = std::log(values[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    v.growth_exponent = cnt >= 2 && den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
  }

  const bool tail_increasing = values[m - 1] > values[m - 2] && values[m - 2] > values[m - 3];
  if (values[m - 1] > opts.ratio * values[0] && tail_increasing && v.tail_ratio >= opts.tail_ratio) {
    v.kind = VerdictKind::diverging;
    v.label = std::string(to_string(v.kind));
    return v;
  }

  const double vmax = *std::max_element(values.begin(), values.end());
  auto all_below = [&](double b) { return vmax <= b * (1 + 1e-6); };
  std::optional<double> bound;
  if (opts.certified_bound && all_below(*opts.certified_bound)) {
    bound = *opts.certified_bound;
  } else if (last_step <= 0) {
    // Tail not increasing: the values so far bound the remainder of a monotone tail.
    if (v.tail_ratio < opts.tail_ratio) bound = vmax;
  } else if (v.tail_ratio < opts.tail_ratio && v.tail_ratio < 1 && v.tail_ratio >= 0) {
    bound = values[m - 1] + last_step * v.tail_ratio / (1 - v.tail_ratio);
  }
  if (bound && all_below(*bound)) {
    v.kind = VerdictKind::bounded;
    v.bound = bound;
  }
  v.label = std::string(to_string(v.kind));
  return v;
}

Verdict classify_limit(std::span<const SweepRecord> records, SweepColumn column, const ClassifyOptions& opts) {
  std::vector<double> keys, values;
  for (const auto& r : records) {
    keys.push_back(r.n);
    values.push_back(column == SweepColumn::magnetic ? r.lambda_mag : r.lambda_nonmag);
  }
  return classify_limit(keys, values, opts);
}

std::optional<double> certified_sweep_bound(const GridDomain& g, const Weight& w, std::span<const double> n_list,
                                            SweepColumn column, const SolverOpts& opts) {
  check_n_list(n_list);
  const auto zero_set = vanishing_set(w, g);
  if (zero_set.nodes.empty() || n_list.empty()) return std::nullopt;
  const GridDomain sub = g.subgrid(zero_set.nodes);
  const double resolved = std::pow(kBesselJ01 / (4 * g.h()), 2);
  double bound = 0.0;
  for (const double n : n_list) {
    const auto s = column == SweepColumn::magnetic ? assemble_magnetic(sub, w, n) : assemble_nonmagnetic(sub, w, n);
    const auto r = ground_state(s, opts);
    bound = std::max(bound, r.lambda + r.residual);
  }
  if (bound > resolved) return std::nullopt;
  return bound;
}

KatoReport kato_report(const GridDomain& g, const Weight& w, double n, const SolverOpts& opts) {
  const auto mag = ground_state(assemble_magnetic(g, w, n), opts);
  const auto nonmag = ground_state(assemble_nonmagnetic(g, w, n), opts);
  return {mag.lambda, nonmag.lambda, mag.lambda - nonmag.lambda, mag.residual, nonmag.residual};
}

std::vector<FluxPoint> flux_scan(const GridDomain& g, const Weight& w, std::span<const double> t_list,
                                 const SolverOpts& opts, int workers) {
  if (w.tag() != WeightTag::harmonic_log)
    throw Error(ErrorKind::WrongWeightTag, "flux scans need a harmonic_log weight");
  opts.validate();
  const double beta = w.params().beta * w.params().scale;
  if (beta == 0) throw Error(ErrorKind::InvalidArgument, "flux scans need beta != 0");
  if (t_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty t list");
  const auto [lo, hi] = std::minmax_element(t_list.begin(), t_list.end());
  if ((*hi - *lo) * std::abs(beta) < 1 - 1e-12)
    throw Error(ErrorKind::InvalidArgument, "t list must cover at least one period 1/beta");

  std::vector<FluxPoint> out(t_list.size());
  parallel_for(t_list.size(), workers, [&](std::size_t k) {
    const double t = t_list[k];
    const Solve s = solve_flagged(assemble_magnetic(g, w, t), opts);
    out[k] = {t, t * beta, s.lambda, s.residual, s.converged};
  });
  std::stable_sort(out.begin(), out.end(), [](const FluxPoint& a, const FluxPoint& b) { return a.t < b.t; });
  return out;
}

ParamagneticReport paramagnetic_check(const GridDomain& g, const Weight& w, const SolverOpts& opts) {
  if (w.tag() != WeightTag::hol_squares)
    throw Error(ErrorKind::WrongWeightTag, "the paramagnetic comparison needs a hol_squares weight");
  ParamagneticReport rep;
  rep.lambda_mag_phi = ground_state(assemble_magnetic(g, w, 1.0), opts).lambda;
  rep.lambda_nonmag_2phi = ground_state(assemble_nonmagnetic(g, w, 2.0), opts).lambda;
  rep.satisfied = rep.lambda_mag_phi <= rep.lambda_nonmag_2phi + 1e-6 * std::abs(rep.lambda_nonmag_2phi);
  return rep;
}

Eigen::VectorXcd smooth_bump(const GridDomain& g, Point center, double radius) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidArgument, "bump radius must be positive");
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.point(k);
    const double r = std::hypot(p.x - center.x, p.y - center.y);
    if (r < radius) {
      const double c = std::cos(std::numbers::pi * r / (2 * radius));
      u[static_cast<Eigen::Index>(k)] = c * c;
    }
  }
  return u;
}

double lavine_ocarroll_residual(const GridDomain& g, const Weight& w, double n, const Eigen::VectorXcd& test_u,
                                const SolverOpts& opts, double delta) {
  const auto dim = static_cast<Eigen::Index>(g.size());
  if (test_u.size() != dim) throw Error(ErrorKind::InvalidArgument, "test function length does not match the grid");
  if (!(delta >= 0) || !(delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in [0, 1)");
  const double h = g.h();
  const double unorm = std::sqrt(test_u.squaredNorm() * h * h);
  if (!(unorm > 0)) throw Error(ErrorKind::ZeroVector, "test function vanishes");

  const auto ground = ground_state(assemble_nonmagnetic(g, w, n), opts);
  const double lambda0 = ground.lambda;
  const Eigen::VectorXd u0 = ground.vector.real();
  const double floor = delta * u0.maxCoeff();
  for (Eigen::Index k = 0; k < dim; ++k)
    if (test_u[k] != Complex(0) && !(u0[k] > floor))
      throw Error(ErrorKind::SupportViolation, "test function touches nodes where the ground state is small");

  const Eigen::VectorXcd u = test_u / unorm;
  double lhs = -lambda0, rhs = 0.0;
  auto link = [&](std::int64_t a, std::int64_t b, Point pa, Point pb) {
    const Complex ua = a >= 0 ? u[a] : Complex(0), ub = b >= 0 ? u[b] : Complex(0);
    const double u0a = a >= 0 ? u0[a] : 0.0, u0b = b >= 0 ? u0[b] : 0.0;
    const Complex avg = (ua + ub) / 2.0;
    const Complex du = (ub - ua) / h;
    if (avg == Complex(0) && du == Complex(0)) return;
    const double theta = link_phase(w, pa, pb, n, h);
    const Complex cov = du - Complex(0, theta / h) * avg;
    lhs += h * h * std::norm(cov);
    const double avg0 = (u0a + u0b) / 2;
    const double log_deriv = (u0b - u0a) / h / avg0;
    rhs += h * h * std::norm(cov - log_deriv * avg);
  };
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Node p = g.node(k);
    const Point pp = g.point(k);
    const auto kk = static_cast<std::int64_t>(k);
    lhs += h * h * n * w.lap(pp) * std::norm(u[kk]);
    for (const Node q : {Node{p.i + 1, p.j}, Node{p.i, p.j + 1}}) link(kk, g.index_of(q), pp, g.point_of(q));
    // Links to the Dirichlet boundary on the low side are not reached from another node.
    for (const Node q : {Node{p.i - 1, p.j}, Node{p.i, p.j - 1}})
      if (!g.contains(q)) link(-1, kk, g.point_of(q), pp);
  }
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + std::abs(lambda0));
}

}  // namespace maglab
