#include <doctest.h>

#include <cmath>
#include <random>

#include "maglab/eigensolve.hpp"
#include "oracles.hpp"

using namespace maglab;

namespace {

const double kSquareQuarter = 128 * std::pow(std::sin(oracle::pi / 8), 2);

Eigen::VectorXcd random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v[k] = {re, im};
  }
  return v;
}

OperatorMatrix square(double h, bool magnetic = false) {
  const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), h);
  const auto w = make_weight(WeightTag::zero);
  return magnetic ? assemble_magnetic(g, w, 1) : assemble_nonmagnetic(g, w, 1);
}

}  // namespace

TEST_SUITE("eigensolve") {
  TEST_CASE("options are validated") {
    SolverOpts o;
    CHECK_NOTHROW(o.validate());
    o.tol = 0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.max_iter = 0;
    CHECK_THROWS_AS(o.validate(), Error);
    o = {};
    o.block_size = 0;
    CHECK_THROWS_AS(o.validate(), Error);
  }

  TEST_CASE("unit square at h = 1/4") {
    CHECK(kSquareQuarter == doctest::Approx(32 * (2 - std::sqrt(2.0))).epsilon(1e-14));
    const auto r = ground_state(square(0.25));
    CHECK(std::abs(r.lambda - kSquareQuarter) <= 1e-8);
    CHECK(std::abs(ground_state(square(0.25, true)).lambda - r.lambda) <= 1e-12);
    const auto dense = dense_oracle(square(0.25));
    REQUIRE(dense.size() == 9);
    CHECK(std::abs(dense.front() - kSquareQuarter) <= 1e-10);
  }

  TEST_CASE("iterative solve on the unit square at h = 1/32") {
    for (bool magnetic : {false, true}) {
      const auto r = ground_state(square(1.0 / 32, magnetic));
      const double exact = oracle::rectangle_discrete(1, 1, 1.0 / 32);
      CHECK(r.converged);
      CHECK(std::abs(r.lambda - exact) <= 1e-8 * exact);
      CHECK(r.residual <= residual_target(r.lambda, 1.0 / 32, 1e-8));
      CHECK(r.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("1x3 strip matches the Dirichlet chain") {
    const double h = 0.25;
    const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 0.5), h);
    REQUIRE(g.size() == 3);
    const auto s = assemble_nonmagnetic(g, make_weight(WeightTag::zero), 0);
    const auto ev = dense_oracle(s);
    const auto chain = oracle::chain_spectrum(3, h);
    REQUIRE(ev.size() == 3);
    // The strip is one node tall, so every value carries the transverse 2/h^2.
    for (int k = 0; k < 3; ++k) CHECK(ev[k] - 2 / (h * h) == doctest::Approx(chain[k]).epsilon(1e-12));
  }

  TEST_CASE("iterative ground values match the dense oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int k = 0; k < 8; ++k) {
      const double r = 0.6 + 0.4 * uni(rng);
      const double n = 1 + 9 * uni(rng);
      const auto g = build_grid(DomainSpec::disc({0, 0}, r), 0.1);
      REQUIRE(g.size() <= 400);
      const auto w = make_weight(k % 3 == 0 ? WeightTag::abs4 : WeightTag::abs2);
      const auto s = k % 2 ? assemble_magnetic(g, w, n) : assemble_nonmagnetic(g, w, n);
      const double ref = dense_oracle(s).front();
      CHECK(std::abs(ground_state(s).lambda - ref) <= 1e-9 * ref);
    }
  }

  TEST_CASE("integer flux on the annulus is a pure gauge") {
    const auto g = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 1.0 / 8);
    REQUIRE(g.size() <= 2000);
    const auto base = dense_oracle(assemble_nonmagnetic(g, make_weight(WeightTag::zero), 0));
    for (double n : {1.0, 2.0}) {
      const auto ev = dense_oracle(assemble_magnetic(g, make_weight(WeightTag::harmonic_log), n));
      REQUIRE(ev.size() == base.size());
      for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] - base[k]) <= 1e-10 * std::max(1.0, base[k]));
    }
    const auto half = dense_oracle(assemble_magnetic(g, make_weight(WeightTag::harmonic_log), 0.5));
    CHECK(half.front() > base.front() + 1e-3);
  }

  TEST_CASE("dense oracle size limit") {
    const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 64);
    REQUIRE(g.size() > 2000);
    try {
      dense_oracle(assemble_nonmagnetic(g, make_weight(WeightTag::zero), 0));
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooLarge);
    }
  }

  TEST_CASE("generalized problems") {
    const double h = 0.25;
    const auto g = build_grid(DomainSpec::rectangle(0, 1, 0, 1), h);
    const auto s = assemble_nonmagnetic(g, make_weight(WeightTag::zero), 0);
    GeneralizedPair unit;
    unit.stiffness = s.as_complex();
    unit.mass = Eigen::VectorXd::Ones(9);
    unit.h = h;
    CHECK(std::abs(ground_state_generalized(unit).lambda - kSquareQuarter) <= 1e-8);

    const auto pair = assemble_weighted_form(g, make_weight(WeightTag::zero), 0);
    const auto r = ground_state_generalized(pair);
    CHECK(std::abs(r.lambda - kSquareQuarter) / kSquareQuarter <= 0.02);

    unit.mass[4] = 0;
    try {
      ground_state_generalized(unit);
      FAIL("expected MassNotPD");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MassNotPD);
    }
  }

  TEST_CASE("generalized iterative solve with a nontrivial mass") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 1.0 / 32);
    const auto r = ground_state_generalized(assemble_weighted_form(g, make_weight(WeightTag::abs2), 1));
    const double mag = ground_state(assemble_magnetic(g, make_weight(WeightTag::abs2), 1)).lambda;
    CHECK(r.converged);
    CHECK(std::abs(r.lambda - mag) / mag <= 0.03);
  }

  TEST_CASE("Rayleigh quotient") {
    const auto s = square(0.25);
    CHECK_THROWS_AS(rayleigh(s, Eigen::VectorXcd::Zero(9)), Error);
    CHECK_THROWS_AS(rayleigh(s, Eigen::VectorXcd::Ones(4)), Error);
    const auto r = ground_state(s);
    CHECK(std::abs(rayleigh(s, r.vector) - r.lambda) <= 10 * r.residual + 1e-12);

    double prev_err = 1;
    for (double h : {1.0 / 16, 1.0 / 32}) {
      const auto sq = square(h);
      const auto& g = sq.grid();
      Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
      for (std::size_t k = 0; k < g.size(); ++k)
        v[static_cast<Eigen::Index>(k)] = std::sin(oracle::pi * g.point(k).x) * std::sin(oracle::pi * g.point(k).y);
      const double err = std::abs(rayleigh(sq, v) - oracle::square_continuum);
      CHECK(err <= 20 * h * h);
      CHECK(err < prev_err);
      prev_err = err;
    }
  }

  TEST_CASE("variational consistency") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 1.0 / 16);
    std::mt19937_64 rng(4);
    for (const auto& s : {assemble_magnetic(g, make_weight(WeightTag::abs2), 2),
                          assemble_nonmagnetic(g, make_weight(WeightTag::flat_disc), 8)}) {
      const auto r = ground_state(s);
      CHECK(r.lambda >= -10 * r.residual);
      for (int k = 0; k < 100; ++k) CHECK(rayleigh(s, random_vector(g.size(), rng)) >= r.lambda - 10 * r.residual);
    }
  }

  TEST_CASE("non-magnetic ground states are positive") {
    const auto g = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), 1.0 / 16);
    REQUIRE(g.is_connected());
    for (const auto& w : {make_weight(WeightTag::zero), make_weight(WeightTag::abs4)}) {
      const auto r = ground_state(assemble_nonmagnetic(g, w, 4));
      CHECK(r.vector.real().minCoeff() > 0);
      CHECK(r.vector.imag().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("non-magnetic ground values are simple") {
    for (double r : {0.5, 0.8, 1.0}) {
      const auto g = build_grid(DomainSpec::disc({0.05, 0}, r), 0.1);
      const auto ev = dense_oracle(assemble_nonmagnetic(g, make_weight(WeightTag::abs2), 3));
      CHECK(ev[1] - ev[0] > 1e-6 * ev[0]);
    }
  }

  TEST_CASE("solves are deterministic") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 1.0 / 24);
    const auto s = assemble_magnetic(g, make_weight(WeightTag::abs4), 8);
    const auto a = ground_state(s), b = ground_state(s);
    CHECK(a.lambda == b.lambda);
    CHECK(a.iters == b.iters);
    CHECK((a.vector - b.vector).norm() == 0);
  }

  TEST_CASE("every method reaches the same value") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 1.0 / 16);
    const auto s = assemble_magnetic(g, make_weight(WeightTag::abs2), 3);
    const double ref = dense_oracle(s).front();
    for (auto m : {SolverMethod::automatic, SolverMethod::lobpcg, SolverMethod::inverse_iteration}) {
      SolverOpts o;
      o.method = m;
      CHECK(std::abs(ground_state(s, o).lambda - ref) <= 1e-9 * ref);
    }
  }

  TEST_CASE("iteration cap reports the best iterate") {
    const auto g = build_grid(DomainSpec::disc({0, 0}, 1), 1.0 / 32);
    SolverOpts o;
    o.max_iter = 2;
    o.method = SolverMethod::lobpcg;
    try {
      ground_state(assemble_nonmagnetic(g, make_weight(WeightTag::zero), 0), o);
      FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
      CHECK(e.kind() == ErrorKind::NoConvergence);
      CHECK_FALSE(e.best().converged);
      CHECK(e.best().residual > e.best().target);
      CHECK(e.best().vector.size() == static_cast<Eigen::Index>(g.size()));
    }
  }
}
