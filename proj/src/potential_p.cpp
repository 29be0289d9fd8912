#include "maglab/potential_p.hpp"

#include <cmath>
#include <numbers>

#include "maglab/parallel.hpp"

namespace maglab {

HPolicy cells_per_radius(double cells) {
  if (!(cells > 0) || !std::isfinite(cells)) throw Error(ErrorKind::InvalidArgument, "cells per radius must be positive");
  return [cells](double r) { return r / cells; };
}

NeighborhoodFamily lambda_shrinking(const CompactSetSpec& K, std::span<const double> radii, const HPolicy& h_policy,
                                    const SolverOpts& opts, int workers) {
  opts.validate();
  if (!h_policy) throw Error(ErrorKind::InvalidArgument, "missing resolution policy");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0) || !std::isfinite(radii[j])) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    if (j > 0 && !(radii[j] < radii[j - 1])) throw Error(ErrorKind::InvalidArgument, "radii must strictly decrease");
  }
  const std::size_t m = radii.size();
  NeighborhoodFamily f{K, {radii.begin(), radii.end()}, std::vector<double>(m), std::vector<double>(m),
                       std::vector<double>(m), std::vector<double>(m), std::vector<std::size_t>(m)};
  static const Weight zero = make_weight(WeightTag::zero);
  parallel_for(m, workers, [&](std::size_t j) {
    const double h = h_policy(radii[j]);
    const GridDomain g = neighborhood_grid(K, radii[j], h);
    const auto r = ground_state(assemble_nonmagnetic(g, zero, 0.0), opts);
    f.lambdas[j] = r.lambda;
    f.h_used[j] = h;
    f.residuals[j] = r.residual;
    f.areas[j] = area(g);
    f.dims[j] = g.size();
  });
  return f;
}

double poincare_bound(const GridDomain& g) { return std::numbers::pi / area(g); }

Verdict property_p_verdict(const NeighborhoodFamily& f, const ClassifyOptions& opts) {
  std::vector<double> keys;
  for (const double r : f.radii) keys.push_back(1.0 / r);
  Verdict v = classify_limit(keys, f.lambdas, opts);
  if (v.kind == VerdictKind::diverging) v.label = std::string(kPropertyPHolds);
  if (v.kind == VerdictKind::bounded) v.label = std::string(kPropertyPFails);
  return v;
}

}  // namespace maglab
