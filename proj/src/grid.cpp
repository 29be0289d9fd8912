#include "maglab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "maglab/error.hpp"

namespace maglab {

namespace {

bool finite(double v) { return std::isfinite(v); }

void require(bool ok, const char* msg) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, msg);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sq(double v) { return v * v; }

}  // namespace

// --- DomainSpec -------------------------------------------------------------

DomainSpec::DomainSpec(Shape shape) : shape_(std::move(shape)) {}

DomainSpec DomainSpec::rectangle(double x0, double x1, double y0, double y1) {
  require(finite(x0) && finite(x1) && finite(y0) && finite(y1), "rectangle bounds must be finite");
  require(x0 < x1 && y0 < y1, "rectangle requires x0 < x1 and y0 < y1");
  return DomainSpec(Rectangle{x0, x1, y0, y1});
}

DomainSpec DomainSpec::disc(Point center, double radius) {
  require(finite(center.x) && finite(center.y) && finite(radius), "disc parameters must be finite");
  require(radius > 0, "disc radius must be positive");
  return DomainSpec(Disc{center, radius});
}

DomainSpec DomainSpec::annulus(Point center, double r_inner, double r_outer) {
  require(finite(center.x) && finite(center.y) && finite(r_inner) && finite(r_outer),
          "annulus parameters must be finite");
  require(0 < r_inner && r_inner < r_outer, "annulus requires 0 < r_inner < r_outer");
  return DomainSpec(Annulus{center, r_inner, r_outer});
}

DomainSpec DomainSpec::predicate(std::function<bool(Point)> inside, Rectangle bbox) {
  require(static_cast<bool>(inside), "predicate domain needs an inside test");
  require(finite(bbox.x0) && finite(bbox.x1) && finite(bbox.y0) && finite(bbox.y1) &&
              bbox.x0 < bbox.x1 && bbox.y0 < bbox.y1,
          "predicate domain needs a nondegenerate bounding box");
  return DomainSpec(PredicateRegion{std::move(inside), bbox});
}

bool DomainSpec::contains(Point p) const {
  return std::visit(
      overloaded{
          [&](const Rectangle& r) { return r.x0 < p.x && p.x < r.x1 && r.y0 < p.y && p.y < r.y1; },
          [&](const Disc& d) { return sq(p.x - d.center.x) + sq(p.y - d.center.y) < sq(d.radius); },
          [&](const Annulus& a) {
            const double r2 = sq(p.x - a.center.x) + sq(p.y - a.center.y);
            return sq(a.r_inner) < r2 && r2 < sq(a.r_outer);
          },
          [&](const PredicateRegion& pr) {
            const auto& b = pr.bbox;
            return b.x0 < p.x && p.x < b.x1 && b.y0 < p.y && p.y < b.y1 && pr.inside(p);
          },
      },
      shape_);
}

Rectangle DomainSpec::bounding_box() const {
  return std::visit(overloaded{
                        [](const Rectangle& r) { return r; },
                        [](const Disc& d) {
                          return Rectangle{d.center.x - d.radius, d.center.x + d.radius,
                                           d.center.y - d.radius, d.center.y + d.radius};
                        },
                        [](const Annulus& a) {
                          return Rectangle{a.center.x - a.r_outer, a.center.x + a.r_outer,
                                           a.center.y - a.r_outer, a.center.y + a.r_outer};
                        },
                        [](const PredicateRegion& pr) { return pr.bbox; },
                    },
                    shape_);
}

double DomainSpec::exact_area() const {
  using std::numbers::pi;
  return std::visit(overloaded{
                        [](const Rectangle& r) { return (r.x1 - r.x0) * (r.y1 - r.y0); },
                        [](const Disc& d) { return pi * d.radius * d.radius; },
                        [](const Annulus& a) { return pi * (sq(a.r_outer) - sq(a.r_inner)); },
                        [](const PredicateRegion&) { return -1.0; },
                    },
                    shape_);
}

// --- GridDomain -------------------------------------------------------------

GridDomain::GridDomain(double h, Point origin, std::vector<Node> nodes) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  if (nodes.empty()) throw Error(ErrorKind::EmptyMask, "no grid point lies inside the domain");
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  });
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw Error(ErrorKind::InvalidArgument, "duplicate grid node");

  auto data = std::make_shared<Data>();
  data->h = h;
  data->origin = origin;
  std::int32_t imin = nodes.front().i, imax = imin;
  for (const auto& n : nodes) {
    imin = std::min(imin, n.i);
    imax = std::max(imax, n.i);
  }
  data->imin = imin;
  data->jmin = nodes.front().j;
  data->width = imax - imin + 1;
  data->height = nodes.back().j - data->jmin + 1;
  data->lookup.assign(static_cast<std::size_t>(data->width) * data->height, -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    data->lookup[static_cast<std::size_t>(n.j - data->jmin) * data->width + (n.i - imin)] =
        static_cast<std::int64_t>(k);
  }
  data->nodes = std::move(nodes);
  data_ = std::move(data);
}

std::int64_t GridDomain::index_of(Node n) const noexcept {
  const auto& d = *data_;
  const std::int64_t di = std::int64_t{n.i} - d.imin;
  const std::int64_t dj = std::int64_t{n.j} - d.jmin;
  if (di < 0 || dj < 0 || di >= d.width || dj >= d.height) return -1;
  return d.lookup[static_cast<std::size_t>(dj) * d.width + static_cast<std::size_t>(di)];
}

std::size_t GridDomain::component_count() const {
  const std::size_t n = size();
  std::vector<char> seen(n, 0);
  std::size_t components = 0;
  std::queue<std::size_t> todo;
  static constexpr int kDi[4] = {1, -1, 0, 0};
  static constexpr int kDj[4] = {0, 0, 1, -1};
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    seen[start] = 1;
    todo.push(start);
    while (!todo.empty()) {
      const Node cur = node(todo.front());
      todo.pop();
      for (int d = 0; d < 4; ++d) {
        const auto k = index_of({cur.i + kDi[d], cur.j + kDj[d]});
        if (k >= 0 && !seen[static_cast<std::size_t>(k)]) {
          seen[static_cast<std::size_t>(k)] = 1;
          todo.push(static_cast<std::size_t>(k));
        }
      }
    }
  }
  return components;
}

bool GridDomain::is_connected() const { return component_count() == 1; }

GridDomain GridDomain::subgrid(std::span<const std::size_t> indices) const {
  std::vector<Node> sub;
  sub.reserve(indices.size());
  for (auto k : indices) {
    if (k >= size()) throw Error(ErrorKind::InvalidArgument, "subgrid index out of range");
    sub.push_back(node(k));
  }
  return GridDomain(h(), origin(), std::move(sub));
}

double area(const GridDomain& g) { return static_cast<double>(g.size()) * g.h() * g.h(); }

GridDomain build_grid(const DomainSpec& spec, double h, Point origin) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidSpec, "grid spacing h must be positive");
  const Rectangle box = spec.bounding_box();
  const auto lo_i = static_cast<std::int64_t>(std::floor((box.x0 - origin.x) / h)) - 1;
  const auto hi_i = static_cast<std::int64_t>(std::ceil((box.x1 - origin.x) / h)) + 1;
  const auto lo_j = static_cast<std::int64_t>(std::floor((box.y0 - origin.y) / h)) - 1;
  const auto hi_j = static_cast<std::int64_t>(std::ceil((box.y1 - origin.y) / h)) + 1;
  if ((hi_i - lo_i) * (hi_j - lo_j) > std::int64_t{1} << 32)
    throw Error(ErrorKind::InvalidSpec, "grid too fine for the bounding box");

  std::vector<Node> nodes;
  for (auto j = lo_j; j <= hi_j; ++j) {
    for (auto i = lo_i; i <= hi_i; ++i) {
      const Point p{origin.x + static_cast<double>(i) * h, origin.y + static_cast<double>(j) * h};
      if (spec.contains(p)) nodes.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
    }
  }
  if (nodes.empty()) {
    std::ostringstream msg;
    msg << "no grid point lies inside the domain at h=" << h;
    throw Error(ErrorKind::EmptyMask, msg.str());
  }
  return GridDomain(h, origin, std::move(nodes));
}

// --- CompactSetSpec ---------------------------------------------------------

CompactSetSpec::CompactSetSpec(Shape shape) : shape_(std::move(shape)) {}

CompactSetSpec CompactSetSpec::point(Point p) {
  require(finite(p.x) && finite(p.y), "point must be finite");
  return CompactSetSpec(PointSet{p});
}

CompactSetSpec CompactSetSpec::segment(Point p, Point q) {
  require(finite(p.x) && finite(p.y) && finite(q.x) && finite(q.y), "segment must be finite");
  return CompactSetSpec(Segment{p, q});
}

CompactSetSpec CompactSetSpec::closed_disc(Point center, double radius) {
  require(finite(center.x) && finite(center.y) && finite(radius) && radius >= 0,
          "closed disc needs a finite nonnegative radius");
  return CompactSetSpec(ClosedDisc{center, radius});
}

CompactSetSpec CompactSetSpec::finite_union(std::vector<CompactSetSpec> parts) {
  require(!parts.empty(), "union needs at least one part");
  return CompactSetSpec(Union{std::move(parts)});
}

double CompactSetSpec::dist(Point x) const {
  return std::visit(
      overloaded{
          [&](const PointSet& s) { return std::hypot(x.x - s.p.x, x.y - s.p.y); },
          [&](const Segment& s) {
            const double dx = s.q.x - s.p.x, dy = s.q.y - s.p.y;
            const double len2 = dx * dx + dy * dy;
            const double ux = x.x - s.p.x, uy = x.y - s.p.y;
            const double t = len2 > 0 ? (ux * dx + uy * dy) / len2 : 0.0;
            if (t <= 0) return std::hypot(ux, uy);
            if (t >= 1) return std::hypot(x.x - s.q.x, x.y - s.q.y);
            // Perpendicular distance via the cross product: exactly zero on the segment.
            return std::abs(ux * dy - uy * dx) / std::sqrt(len2);
          },
          [&](const ClosedDisc& d) {
            return std::max(0.0, std::hypot(x.x - d.center.x, x.y - d.center.y) - d.radius);
          },
          [&](const Union& u) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& part : u.parts) best = std::min(best, part.dist(x));
            return best;
          },
      },
      shape_);
}

Rectangle CompactSetSpec::bounding_box() const {
  return std::visit(
      overloaded{
          [](const PointSet& s) { return Rectangle{s.p.x, s.p.x, s.p.y, s.p.y}; },
          [](const Segment& s) {
            return Rectangle{std::min(s.p.x, s.q.x), std::max(s.p.x, s.q.x), std::min(s.p.y, s.q.y),
                             std::max(s.p.y, s.q.y)};
          },
          [](const ClosedDisc& d) {
            return Rectangle{d.center.x - d.radius, d.center.x + d.radius, d.center.y - d.radius,
                             d.center.y + d.radius};
          },
          [](const Union& u) {
            Rectangle box = u.parts.front().bounding_box();
            for (const auto& part : u.parts) {
              const auto b = part.bounding_box();
              box = {std::min(box.x0, b.x0), std::max(box.x1, b.x1), std::min(box.y0, b.y0),
                     std::max(box.y1, b.y1)};
            }
            return box;
          },
      },
      shape_);
}

GridDomain neighborhood_grid(const CompactSetSpec& K, double r, double h) {
  if (!(r > 0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidSpec, "neighbourhood radius must be positive");
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidSpec, "grid spacing h must be positive");
  if (h > r / 4) {
    std::ostringstream msg;
    msg << "h=" << h << " exceeds r/4=" << r / 4;
    throw Error(ErrorKind::ResolutionTooCoarse, msg.str());
  }
  const Rectangle b = K.bounding_box();
  const Rectangle box{b.x0 - r, b.x1 + r, b.y0 - r, b.y1 + r};
  auto domain = DomainSpec::predicate([K, r](Point p) { return K.dist(p) < r; }, box);
  return build_grid(domain, h);
}

}  // namespace maglab
