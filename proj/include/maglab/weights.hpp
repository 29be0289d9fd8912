#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maglab/grid.hpp"

namespace maglab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class WeightTag { zero, harmonic_log, abs2, abs4, flat_disc, hol_squares, custom };

std::string_view to_string(WeightTag tag) noexcept;
std::optional<WeightTag> weight_tag_from_string(std::string_view name) noexcept;

/// Parameters of the builtin weights. Unused fields are ignored by a tag.
struct WeightParams {
  /// Overall real multiplier applied to phi (e.g. -1 gives a superharmonic weight).
  double scale = 1.0;
  /// harmonic_log: phi = beta * log|z - center|.
  double beta = 1.0;
  /// Centre of the radial weights and the expansion point of the polynomials.
  Point center{};
  /// flat_disc: phi = ((|z - center| - r0)_+)^4.
  double r0 = 0.25;
  /// hol_squares: phi = sum_j |h_j(z)|^2, h_j(z) = sum_k c_jk (z - center)^k.
  std::vector<std::vector<std::complex<double>>> polynomials;

  friend bool operator==(const WeightParams&, const WeightParams&) = default;
};

/// User-supplied weight. Callbacks must be pure and reentrant.
struct WeightCallbacks {
  std::function<double(Point)> value;
  std::function<Vec2(Point)> grad;
  std::function<double(Point)> lap;
  /// Optional exact integral of A = (-phi_y, phi_x) along the segment p -> q.
  std::function<double(Point, Point)> link_integral;
};

/// The weight phi in C^2 together with its analytic gradient and Laplacian
/// and the magnetic potential A = (-phi_y, phi_x). Immutable.
class Weight {
 public:
  WeightTag tag() const noexcept { return tag_; }
  const WeightParams& params() const noexcept { return params_; }

  double phi(Point p) const { return fns_.value(p); }
  Vec2 grad(Point p) const { return fns_.grad(p); }
  double lap(Point p) const { return fns_.lap(p); }
  Vec2 potential(Point p) const {
    const Vec2 g = grad(p);
    return {-g.y, g.x};
  }

  bool has_exact_links() const noexcept { return static_cast<bool>(fns_.link_integral); }
  /// Exact line integral of A along p -> q, if this weight provides one.
  std::optional<double> link_integral(Point p, Point q) const;
  /// Exact integral where available, otherwise the midpoint rule.
  double line_integral(Point p, Point q) const;

  friend Weight make_weight(WeightTag tag, const WeightParams& params);
  friend Weight make_custom_weight(WeightCallbacks callbacks);

 private:
  Weight(WeightTag tag, WeightParams params, WeightCallbacks fns)
      : tag_(tag), params_(std::move(params)), fns_(std::move(fns)) {}

  WeightTag tag_;
  WeightParams params_;
  WeightCallbacks fns_;
};

Weight make_weight(WeightTag tag, const WeightParams& params = {});
Weight make_custom_weight(WeightCallbacks callbacks);

/// Default threshold for "Laplacian vanishes": 1e-9 * max|lap| over the mask,
/// floored at 1e-12.
double default_vanishing_threshold(const Weight& w, const GridDomain& g);

struct SubharmonicityReport {
  double min_lap;
  bool is_subharmonic;
};

SubharmonicityReport subharmonicity_check(const Weight& w, const GridDomain& g,
                                          std::optional<double> eps = std::nullopt);

struct VanishingSet {
  std::vector<std::size_t> nodes;  ///< indices into the grid mask
  double eps;
};

VanishingSet vanishing_set(const Weight& w, const GridDomain& g, std::optional<double> eps = std::nullopt);

}  // namespace maglab
