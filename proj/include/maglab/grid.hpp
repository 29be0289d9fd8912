#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace maglab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Rectangle {
  double x0, x1, y0, y1;
};

struct Disc {
  Point center;
  double radius;
};

struct Annulus {
  Point center;
  double r_inner;
  double r_outer;
};

/// Arbitrary region given by an inside test. The bounding box must contain it.
struct PredicateRegion {
  std::function<bool(Point)> inside;
  Rectangle bbox;
};

/// Bounded open planar domain.
class DomainSpec {
 public:
  using Shape = std::variant<Rectangle, Disc, Annulus, PredicateRegion>;

  static DomainSpec rectangle(double x0, double x1, double y0, double y1);
  static DomainSpec disc(Point center, double radius);
  static DomainSpec annulus(Point center, double r_inner, double r_outer);
  static DomainSpec predicate(std::function<bool(Point)> inside, Rectangle bbox);

  const Shape& shape() const noexcept { return shape_; }

  /// Strict containment: boundary points are outside.
  bool contains(Point p) const;
  Rectangle bounding_box() const;
  /// Continuum area when known in closed form, negative otherwise.
  double exact_area() const;

 private:
  explicit DomainSpec(Shape shape);
  Shape shape_;
};

/// Integer lattice coordinates of a grid node; its point is origin + h*(i, j).
struct Node {
  std::int32_t i = 0;
  std::int32_t j = 0;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Interior nodes of a domain on a uniform grid, with Dirichlet data on
/// everything else. Copies share the same immutable storage.
class GridDomain {
 public:
  GridDomain(double h, Point origin, std::vector<Node> nodes);

  double h() const noexcept { return data_->h; }
  Point origin() const noexcept { return data_->origin; }
  std::size_t size() const noexcept { return data_->nodes.size(); }
  std::span<const Node> nodes() const noexcept { return data_->nodes; }
  const Node& node(std::size_t k) const { return data_->nodes[k]; }
  Point point(std::size_t k) const { return point_of(data_->nodes[k]); }
  Point point_of(Node n) const noexcept {
    return {data_->origin.x + n.i * data_->h, data_->origin.y + n.j * data_->h};
  }

  /// Index of a node in 0..N-1, or -1 if the node is not in the mask.
  std::int64_t index_of(Node n) const noexcept;
  bool contains(Node n) const noexcept { return index_of(n) >= 0; }

  /// Connected under the 4-neighbour stencil.
  bool is_connected() const;
  std::size_t component_count() const;

  /// Principal sub-grid on the given subset of node indices (kept in order).
  GridDomain subgrid(std::span<const std::size_t> indices) const;

 private:
  struct Data {
    double h;
    Point origin;
    std::vector<Node> nodes;
    std::int32_t imin = 0, jmin = 0, width = 0, height = 0;
    std::vector<std::int64_t> lookup;
  };
  std::shared_ptr<const Data> data_;
};

/// N * h^2.
double area(const GridDomain& g);

GridDomain build_grid(const DomainSpec& spec, double h, Point origin = {});

/// Compact planar set given by a distance function.
class CompactSetSpec {
 public:
  struct PointSet {
    Point p;
  };
  struct Segment {
    Point p, q;
  };
  struct ClosedDisc {
    Point center;
    double radius;
  };
  struct Union {
    std::vector<CompactSetSpec> parts;
  };
  using Shape = std::variant<PointSet, Segment, ClosedDisc, Union>;

  static CompactSetSpec point(Point p);
  static CompactSetSpec segment(Point p, Point q);
  static CompactSetSpec closed_disc(Point center, double radius);
  static CompactSetSpec finite_union(std::vector<CompactSetSpec> parts);

  const Shape& shape() const noexcept { return shape_; }

  /// Euclidean distance to the set; zero exactly on it.
  double dist(Point x) const;
  Rectangle bounding_box() const;

 private:
  explicit CompactSetSpec(Shape shape);
  Shape shape_;
};

/// Grid for the open r-neighbourhood {x : dist(x, K) < r}. Requires h <= r/4.
GridDomain neighborhood_grid(const CompactSetSpec& K, double r, double h);

}  // namespace maglab
