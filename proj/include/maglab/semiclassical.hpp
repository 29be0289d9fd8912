#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maglab/eigensolve.hpp"

namespace maglab {

struct SweepRecord {
  double n = 0.0;
  double lambda_mag = 0.0;
  double lambda_nonmag = 0.0;
  double gap = 0.0;  ///< lambda_mag - lambda_nonmag
  double residual_mag = 0.0;
  double residual_nonmag = 0.0;
  double h = 0.0;
  double wall_time = 0.0;  ///< seconds for both solves
  bool converged = true;   ///< false if either solve missed its target (best iterate kept)
};

/// One record per n, both operators assembled on the same grid. Solver
/// non-convergence flags the record instead of aborting the sweep.
std::vector<SweepRecord> sweep(const GridDomain& g, const Weight& w, std::span<const double> n_list,
                               const SolverOpts& opts = {}, int workers = 1);

enum class VerdictKind { diverging, bounded, inconclusive };

std::string_view to_string(VerdictKind kind) noexcept;

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::string label;
  double growth_ratio = 0.0;     ///< last value / first value
  double growth_exponent = 0.0;  ///< least-squares slope of log(value) against log(key)
  double tail_ratio = 0.0;       ///< last increment / previous increment
  std::optional<double> bound;   ///< exhibited constant bound when kind == bounded
};

struct ClassifyOptions {
  double ratio = 5.0;        ///< diverging needs last > ratio * first
  double tail_ratio = 1.05;  ///< tail increment ratio separating growth from saturation
  /// A bound known to hold for every value (e.g. from domain monotonicity).
  /// When present it is tried before the geometric extrapolation.
  std::optional<double> certified_bound;
};

/// Classifies a sequence indexed by increasing keys (n, or 1/r_j).
///
/// diverging: last > ratio * first, the last three values strictly increase
/// and the tail increment ratio is at least tail_ratio.
/// bounded: every value lies below an exhibited constant, either the
/// certified bound or, when the tail increment ratio is below both
/// tail_ratio and 1, the geometric extrapolation of the tail.
Verdict classify_limit(std::span<const double> keys, std::span<const double> values,
                       const ClassifyOptions& opts = {});

enum class SweepColumn { magnetic, nonmagnetic };

Verdict classify_limit(std::span<const SweepRecord> records, SweepColumn column, const ClassifyOptions& opts = {});

/// Upper bound for every record of a sweep: the largest ground value of the
/// operator restricted to the vanishing set of the Laplacian (a principal
/// submatrix, so its smallest eigenvalue dominates the full one). Returned
/// only when that set resolves a disc of radius 4h; otherwise the bound would
/// just be the grid ceiling.
std::optional<double> certified_sweep_bound(const GridDomain& g, const Weight& w, std::span<const double> n_list,
                                            SweepColumn column, const SolverOpts& opts = {});

struct KatoReport {
  double lambda_mag = 0.0;
  double lambda_nonmag = 0.0;
  double gap = 0.0;
  double residual_mag = 0.0;
  double residual_nonmag = 0.0;
};

KatoReport kato_report(const GridDomain& g, const Weight& w, double n, const SolverOpts& opts = {});

struct FluxPoint {
  double t = 0.0;
  double flux = 0.0;  ///< t * beta, the number of flux quanta through the hole
  double lambda_mag = 0.0;
  double residual = 0.0;
  bool converged = true;
};

/// lambda of S_{t phi} for phi = beta log|z - c| across t_list. The weight must
/// be harmonic_log and t_list must span at least one period 1/beta.
std::vector<FluxPoint> flux_scan(const GridDomain& g, const Weight& w, std::span<const double> t_list,
                                 const SolverOpts& opts = {}, int workers = 1);

struct ParamagneticReport {
  double lambda_mag_phi = 0.0;
  double lambda_nonmag_2phi = 0.0;
  bool satisfied = false;
};

/// lambda_phi <= lambda^0_{2 phi} for a sum of squares of holomorphic functions.
ParamagneticReport paramagnetic_check(const GridDomain& g, const Weight& w, const SolverOpts& opts = {});

/// cos^2(pi |x - c| / (2 R)) inside the disc of radius R about c, zero outside.
Eigen::VectorXcd smooth_bump(const GridDomain& g, Point center, double radius);

/// Relative residual of the ground-state factorisation identity
///   |grad_A u|^2 + n lap(phi) |u|^2 - lambda0 |u|^2 = |(grad - iA - grad(u0)/u0) u|^2
/// for a test function u, with u0 the non-magnetic ground state. Differences
/// live on links; the test function is normalised in the nodal rule.
double lavine_ocarroll_residual(const GridDomain& g, const Weight& w, double n, const Eigen::VectorXcd& test_u,
                                const SolverOpts& opts = {}, double delta = 1e-3);

}  // namespace maglab
