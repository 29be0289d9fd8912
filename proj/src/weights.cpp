#include "maglab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maglab/error.hpp"

namespace maglab {

std::string_view to_string(WeightTag tag) noexcept {
  switch (tag) {
    case WeightTag::zero: return "zero";
    case WeightTag::harmonic_log: return "harmonic_log";
    case WeightTag::abs2: return "abs2";
    case WeightTag::abs4: return "abs4";
    case WeightTag::flat_disc: return "flat_disc";
    case WeightTag::hol_squares: return "hol_squares";
    case WeightTag::custom: return "custom";
  }
  return "unknown";
}

std::optional<WeightTag> weight_tag_from_string(std::string_view name) noexcept {
  for (auto tag : {WeightTag::zero, WeightTag::harmonic_log, WeightTag::abs2, WeightTag::abs4,
                   WeightTag::flat_disc, WeightTag::hol_squares}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

std::optional<double> Weight::link_integral(Point p, Point q) const {
  if (!fns_.link_integral) return std::nullopt;
  return fns_.link_integral(p, q);
}

double Weight::line_integral(Point p, Point q) const {
  if (fns_.link_integral) return fns_.link_integral(p, q);
  const Point mid{(p.x + q.x) / 2, (p.y + q.y) / 2};
  const Vec2 a = potential(mid);
  return a.x * (q.x - p.x) + a.y * (q.y - p.y);
}

namespace {

using cplx = std::complex<double>;

cplx eval_poly(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx eval_derivative(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
  return acc;
}

WeightCallbacks builtin(WeightTag tag, const WeightParams& prm) {
  const double c = prm.scale;
  const Point ctr = prm.center;
  WeightCallbacks f;
  switch (tag) {
    case WeightTag::zero:
      f.value = [](Point) { return 0.0; };
      f.grad = [](Point) { return Vec2{}; };
      f.lap = [](Point) { return 0.0; };
      f.link_integral = [](Point, Point) { return 0.0; };
      break;

    case WeightTag::harmonic_log: {
      const double cb = c * prm.beta;
      f.value = [=](Point p) { return cb * std::log(std::hypot(p.x - ctr.x, p.y - ctr.y)); };
      f.grad = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y, r2 = x * x + y * y;
        return Vec2{cb * x / r2, cb * y / r2};
      };
      f.lap = [](Point) { return 0.0; };
      // A = beta d(theta): the integral is beta times the angle subtended at the centre.
      f.link_integral = [=](Point p, Point q) {
        const double px = p.x - ctr.x, py = p.y - ctr.y, qx = q.x - ctr.x, qy = q.y - ctr.y;
        return cb * std::atan2(px * qy - py * qx, px * qx + py * qy);
      };
      break;
    }

    case WeightTag::abs2:
      f.value = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y;
        return c * (x * x + y * y);
      };
      f.grad = [=](Point p) { return Vec2{2 * c * (p.x - ctr.x), 2 * c * (p.y - ctr.y)}; };
      f.lap = [=](Point) { return 4 * c; };
      // A is linear, so the integral is A(mid).(q - p) = 2c * cross(p, q).
      f.link_integral = [=](Point p, Point q) {
        const double px = p.x - ctr.x, py = p.y - ctr.y, qx = q.x - ctr.x, qy = q.y - ctr.y;
        return 2 * c * (px * qy - py * qx);
      };
      break;

    case WeightTag::abs4:
      f.value = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y, r2 = x * x + y * y;
        return c * r2 * r2;
      };
      f.grad = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y, r2 = x * x + y * y;
        return Vec2{4 * c * r2 * x, 4 * c * r2 * y};
      };
      f.lap = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y;
        return 16 * c * (x * x + y * y);
      };
      break;

    case WeightTag::flat_disc: {
      const double r0 = prm.r0;
      f.value = [=](Point p) {
        const double s = std::max(0.0, std::hypot(p.x - ctr.x, p.y - ctr.y) - r0);
        return c * s * s * s * s;
      };
      f.grad = [=](Point p) {
        const double x = p.x - ctr.x, y = p.y - ctr.y, r = std::hypot(x, y);
        const double s = r - r0;
        if (s <= 0) return Vec2{};
        const double dphi_over_r = 4 * c * s * s * s / r;
        return Vec2{dphi_over_r * x, dphi_over_r * y};
      };
      // phi'' + phi'/r with phi = s^4.
      f.lap = [=](Point p) {
        const double r = std::hypot(p.x - ctr.x, p.y - ctr.y);
        const double s = r - r0;
        if (s <= 0) return 0.0;
        return c * (12 * s * s + 4 * s * s * s / r);
      };
      break;
    }

    case WeightTag::hol_squares: {
      const auto polys = prm.polynomials;
      f.value = [=](Point p) {
        const cplx z{p.x - ctr.x, p.y - ctr.y};
        double acc = 0;
        for (const auto& poly : polys) acc += std::norm(eval_poly(poly, z));
        return c * acc;
      };
      // d|h|^2/dx = 2 Re(conj(h) h'),  d|h|^2/dy = -2 Im(conj(h) h').
      f.grad = [=](Point p) {
        const cplx z{p.x - ctr.x, p.y - ctr.y};
        Vec2 g;
        for (const auto& poly : polys) {
          const cplx t = std::conj(eval_poly(poly, z)) * eval_derivative(poly, z);
          g.x += 2 * c * t.real();
          g.y -= 2 * c * t.imag();
        }
        return g;
      };
      f.lap = [=](Point p) {
        const cplx z{p.x - ctr.x, p.y - ctr.y};
        double acc = 0;
        for (const auto& poly : polys) acc += std::norm(eval_derivative(poly, z));
        return 4 * c * acc;
      };
      break;
    }

    case WeightTag::custom:
      throw Error(ErrorKind::InvalidParams, "custom weights are built with make_custom_weight");
  }
  return f;
}

void validate(WeightTag tag, const WeightParams& p) {
  auto bad = [](const char* msg) { throw Error(ErrorKind::InvalidParams, msg); };
  if (!std::isfinite(p.scale)) bad("scale must be finite");
  if (!std::isfinite(p.center.x) || !std::isfinite(p.center.y)) bad("center must be finite");
  switch (tag) {
    case WeightTag::harmonic_log:
      if (!std::isfinite(p.beta)) bad("beta must be a finite real");
      break;
    case WeightTag::flat_disc:
      if (!(p.r0 > 0) || !std::isfinite(p.r0)) bad("flat_disc needs r0 > 0");
      break;
    case WeightTag::hol_squares:
      for (const auto& poly : p.polynomials)
        for (const auto& coef : poly)
          if (!std::isfinite(coef.real()) || !std::isfinite(coef.imag()))
            bad("hol_squares coefficients must be finite");
      break;
    default:
      break;
  }
}

}  // namespace

Weight make_weight(WeightTag tag, const WeightParams& params) {
  validate(tag, params);
  return Weight(tag, params, builtin(tag, params));
}

Weight make_custom_weight(WeightCallbacks callbacks) {
  if (!callbacks.value || !callbacks.grad || !callbacks.lap)
    throw Error(ErrorKind::InvalidParams, "custom weight needs value, grad and lap callbacks");
  return Weight(WeightTag::custom, WeightParams{}, std::move(callbacks));
}

double default_vanishing_threshold(const Weight& w, const GridDomain& g) {
  double max_lap = 0;
  for (std::size_t k = 0; k < g.size(); ++k) max_lap = std::max(max_lap, std::abs(w.lap(g.point(k))));
  return std::max(1e-9 * max_lap, 1e-12);
}

SubharmonicityReport subharmonicity_check(const Weight& w, const GridDomain& g, std::optional<double> eps) {
  const double tol = eps ? *eps : default_vanishing_threshold(w, g);
  double min_lap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) min_lap = std::min(min_lap, w.lap(g.point(k)));
  return {min_lap, min_lap >= -tol};
}

VanishingSet vanishing_set(const Weight& w, const GridDomain& g, std::optional<double> eps) {
  if (eps && !(*eps > 0)) throw Error(ErrorKind::InvalidArgument, "vanishing threshold must be positive");
  VanishingSet out{{}, eps ? *eps : default_vanishing_threshold(w, g)};
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(w.lap(g.point(k))) <= out.eps) out.nodes.push_back(k);
  return out;
}

}  // namespace maglab
