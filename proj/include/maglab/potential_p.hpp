#pragma once

#include <functional>
#include <span>
#include <vector>

#include "maglab/eigensolve.hpp"
#include "maglab/semiclassical.hpp"

namespace maglab {

/// Grid spacing to use for the neighbourhood of radius r.
using HPolicy = std::function<double(double r)>;

/// h = r / cells.
HPolicy cells_per_radius(double cells);

/// lambda(U_j) for the Euclidean neighbourhoods U_j = {dist(., K) < r_j}.
struct NeighborhoodFamily {
  CompactSetSpec K;
  std::vector<double> radii;
  std::vector<double> lambdas;
  std::vector<double> h_used;
  std::vector<double> residuals;
  std::vector<double> areas;  ///< discrete area N h^2 of each mask
  std::vector<std::size_t> dims;
};

NeighborhoodFamily lambda_shrinking(const CompactSetSpec& K, std::span<const double> radii, const HPolicy& h_policy,
                                    const SolverOpts& opts = {}, int workers = 1);

/// pi / area(g).
double poincare_bound(const GridDomain& g);

inline constexpr std::string_view kPropertyPHolds = "consistent with property (P)";
inline constexpr std::string_view kPropertyPFails = "property (P) fails (fine interior nonempty at grid scale)";

/// classify_limit on (1/r_j, lambda_j) with the verdict relabelled.
Verdict property_p_verdict(const NeighborhoodFamily& f, const ClassifyOptions& opts = {});

}  // namespace maglab
