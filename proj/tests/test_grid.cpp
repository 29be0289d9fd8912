#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "maglab/grid.hpp"
#include "maglab/error.hpp"
#include "oracles.hpp"

using namespace maglab;

namespace {

std::set<std::pair<long, long>> coords(const GridDomain& g, double scale = 1.0) {
  std::set<std::pair<long, long>> out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.point(k);
    out.insert({std::lround(p.x * scale), std::lround(p.y * scale)});
  }
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // sentinel: nothing thrown
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("domain specs validate their geometry") {
    CHECK(kind_of([] { DomainSpec::rectangle(1, 0, 0, 1); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { DomainSpec::disc({0, 0}, 0); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { DomainSpec::annulus({0, 0}, 2, 1); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { DomainSpec::annulus({0, 0}, 0, 1); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { DomainSpec::predicate(nullptr, {0, 1, 0, 1}); }) == ErrorKind::InvalidSpec);
    CHECK_FALSE(DomainSpec::disc({0, 0}, 1).contains({1, 0}));
    CHECK(DomainSpec::disc({0, 0}, 1).contains({0.99, 0}));
  }

  TEST_CASE("unit square at h = 1/4 has a 3x3 interior") {
    const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), 0.25);
    CHECK(g.size() == 9);
    CHECK(area(g) == doctest::Approx(0.5625).epsilon(1e-15));
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(g.index_of(g.node(k)) == static_cast<std::int64_t>(k));
      const Point p = g.point(k);
      CHECK(p.x > 0);
      CHECK(p.x < 1);
    }
  }

  TEST_CASE("unit disc at h = 1/2 has 9 nodes, matching lattice enumeration") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 0.5);
    CHECK(g.size() == 9);
    for (double h : {0.5, 0.25, 0.1, 1.0 / 16, 1.0 / 64})
      CHECK(static_cast<long>(build_grid(DomainSpec::disc({0, 0}, 1), h).size()) ==
            oracle::lattice_points_in_disc(1, h));
  }

  TEST_CASE("a disc missing every lattice point is an empty mask") {
    CHECK(kind_of([] { build_grid(DomainSpec::disc({0.25, 0.25}, 0.1), 0.5); }) == ErrorKind::EmptyMask);
    CHECK(kind_of([] { build_grid(DomainSpec::rectangle(0, 1, 0, 1), -1); }) == ErrorKind::InvalidSpec);
  }

  TEST_CASE("disc area converges under refinement") {
    double prev = 1;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
      const double err = std::abs(area(build_grid(DomainSpec::disc({0, 0}, 1), h)) - oracle::pi) / oracle::pi;
      CHECK(err <= 2.0 * h);  // O(h) boundary layer with a modest constant
      if (h <= 1.0 / 64) CHECK(err < 0.02);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("mask monotonicity and refinement consistency") {
    const auto small = build_grid(DomainSpec::disc({0, 0}, 0.6), 1.0 / 16);
    const auto big = build_grid(DomainSpec::disc({0, 0}, 0.8), 1.0 / 16);
    for (const Node n : small.nodes()) CHECK(big.contains(n));
    const auto coarse = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 1.0 / 8);
    const auto fine = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 1.0 / 16);
    const auto fine_pts = coords(fine, 16);
    for (const auto& c : coords(coarse, 16)) CHECK(fine_pts.count(c) == 1);
  }

  TEST_CASE("build_grid is deterministic and index_of rejects absent nodes") {
    const auto a = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 0.1);
    const auto b = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 0.1);
    REQUIRE(a.size() == b.size());
    CHECK(std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin()));
    CHECK(a.index_of({0, 0}) == -1);
    CHECK(a.index_of({1000, 0}) == -1);
  }

  TEST_CASE("duplicate nodes are rejected") {
    CHECK(kind_of([] { GridDomain(0.1, {}, {{0, 0}, {0, 0}}); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("connectivity is reported") {
    CHECK(build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 1.0 / 8).is_connected());
    const auto two = DomainSpec::predicate([](Point p) { return std::abs(p.x) > 0.3 && std::abs(p.x) < 0.9 && std::abs(p.y) < 0.5; },
                                           {-1, 1, -1, 1});
    CHECK(build_grid(two, 0.1).component_count() == 2);
  }

  TEST_CASE("compact set distance vanishes exactly on the set") {
    const auto pt = CompactSetSpec::point({0.5, -0.25});
    CHECK(pt.dist({0.5, -0.25}) == 0);
    CHECK(pt.dist({0.5, 0.75}) == doctest::Approx(1.0));
    const auto seg = CompactSetSpec::segment({-0.5, 0}, {0.5, 0});
    CHECK(seg.dist({0.2, 0}) == 0);
    CHECK(seg.dist({0.2, 0.3}) == doctest::Approx(0.3));
    CHECK(seg.dist({1.5, 0}) == doctest::Approx(1.0));
    const auto disc = CompactSetSpec::closed_disc({0, 0}, 0.25);
    CHECK(disc.dist({0.1, 0.1}) == 0);
    CHECK(disc.dist({0.25, 0}) == 0);
    CHECK(disc.dist({0.5, 0}) == doctest::Approx(0.25));
    const auto uni = CompactSetSpec::finite_union({pt, seg});
    CHECK(uni.dist({0.5, -0.25}) == 0);
    CHECK(uni.dist({0, 0}) == 0);
    CHECK(uni.dist({0, 1}) == doctest::Approx(1.0));
    for (double x = -2; x <= 2; x += 0.37)
      for (double y = -2; y <= 2; y += 0.41) CHECK(uni.dist({x, y}) >= 0);
  }

  TEST_CASE("neighbourhood grids match the expected shapes") {
    const auto pt = neighborhood_grid(CompactSetSpec::point({0, 0}), 0.5, 0.125);
    CHECK(coords(pt, 8) == coords(build_grid(DomainSpec::disc({0, 0}, 0.5), 0.125), 8));

    const auto stadium = neighborhood_grid(CompactSetSpec::segment({-0.5, 0}, {0.5, 0}), 0.25, 1.0 / 64);
    const double exact = 2 * 0.5 * 0.25 * 2 + oracle::pi / 16;
    CHECK(std::abs(area(stadium) - exact) / exact < 0.1);

    const auto grown = neighborhood_grid(CompactSetSpec::closed_disc({0, 0}, 0.25), 0.125, 1.0 / 32);
    CHECK(coords(grown, 32) == coords(build_grid(DomainSpec::disc({0, 0}, 0.375), 1.0 / 32), 32));
  }

  TEST_CASE("neighbourhood resolution policy") {
    CHECK(kind_of([] { neighborhood_grid(CompactSetSpec::point({0, 0}), 0.5, 0.2); }) ==
          ErrorKind::ResolutionTooCoarse);
    CHECK_NOTHROW(neighborhood_grid(CompactSetSpec::point({0, 0}), 0.5, 0.125));
  }

  TEST_CASE("subgrid keeps order and geometry") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 0.25);
    const std::vector<std::size_t> pick{0, 3, 7};
    const auto s = g.subgrid(pick);
    REQUIRE(s.size() == 3);
    for (std::size_t k = 0; k < pick.size(); ++k) CHECK(s.node(k) == g.node(pick[k]));
    CHECK(s.h() == g.h());
  }
}
