#include "maglab/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "maglab/parallel.hpp"
#include "maglab/potential_p.hpp"
#include "maglab/semiclassical.hpp"

namespace maglab::cli {

namespace {

WeightParams centered(Point c, double scale = 1.0) {
  WeightParams p;
  p.center = c;
  p.scale = scale;
  return p;
}

WeightParams polys(std::vector<std::vector<std::complex<double>>> ps) {
  WeightParams p;
  p.polynomials = std::move(ps);
  return p;
}

std::string describe(const char* what, double value, const char* op, double limit) {
  std::ostringstream s;
  s.precision(12);
  s << what << " " << value << " " << op << " " << limit;
  return s.str();
}

}  // namespace

std::vector<SuiteCase> shipped_suite() {
  const auto square = DomainSpec::rectangle(0, 1, 0, 1);
  const auto disc = DomainSpec::disc({0, 0}, 1);
  const auto annulus = DomainSpec::annulus({0, 0}, 0.5, 2);
  const Point mid{0.5, 0.5};
  WeightParams flat_sq = centered(mid);
  flat_sq.r0 = 0.2;
  return {
      {"square/zero/n=1", square, make_weight(WeightTag::zero), 1},
      {"square/abs2/n=1", square, make_weight(WeightTag::abs2, centered(mid)), 1},
      {"square/abs4/n=4", square, make_weight(WeightTag::abs4, centered(mid)), 4},
      {"square/flat_disc/n=16", square, make_weight(WeightTag::flat_disc, flat_sq), 16},
      {"disc/zero/n=1", disc, make_weight(WeightTag::zero), 1},
      {"disc/abs2/n=1", disc, make_weight(WeightTag::abs2), 1},
      {"disc/abs2/n=8", disc, make_weight(WeightTag::abs2), 8},
      {"disc/abs4/n=16", disc, make_weight(WeightTag::abs4), 16},
      {"disc/flat_disc/n=64", disc, make_weight(WeightTag::flat_disc), 64},
      {"disc/hol_squares[z^2]/n=1", disc, make_weight(WeightTag::hol_squares, polys({{0, 0, 1}})), 1},
      {"disc/hol_squares[z,z^2+1/2]/n=2", disc,
       make_weight(WeightTag::hol_squares, polys({{0, 1}, {0.5, 0, 1}})), 2},
      {"disc/abs2[scale=-1]/n=1", disc, make_weight(WeightTag::abs2, centered({0, 0}, -1)), 1},
      {"annulus/zero/n=1", annulus, make_weight(WeightTag::zero), 1},
      {"annulus/harmonic_log/n=1", annulus, make_weight(WeightTag::harmonic_log), 1},
      {"annulus/harmonic_log/n=0.5", annulus, make_weight(WeightTag::harmonic_log), 0.5},
      {"annulus/abs2/n=1", annulus, make_weight(WeightTag::abs2), 1},
  };
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  const auto suite = shipped_suite();

  // Per-case solves: magnetic, non-magnetic and the zero-weight floor.
  struct CaseSolve {
    double lambda_mag, lambda_nonmag, lambda_zero;
    bool subharmonic;
  };
  std::vector<CaseSolve> solves(suite.size());
  const Weight zero = make_weight(WeightTag::zero);
  parallel_for(suite.size(), opts.workers, [&](std::size_t k) {
    const auto& c = suite[k];
    const GridDomain g = build_grid(c.domain, opts.h);
    const auto kato = kato_report(g, c.weight, c.n, opts.solver);
    const double floor = ground_state(assemble_nonmagnetic(g, zero, 0.0), opts.solver).lambda;
    solves[k] = {kato.lambda_mag, kato.lambda_nonmag, floor, subharmonicity_check(c.weight, g).is_subharmonic};
  });
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const auto& s = solves[k];
    const double limit = -1e-6 * std::max(1.0, s.lambda_nonmag);
    const double gap = s.lambda_mag - s.lambda_nonmag;
    out.push_back({"kato/" + suite[k].name, gap >= limit, gap, limit, describe("gap", gap, ">=", limit)});
  }
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const auto& s = solves[k];
    if (!s.subharmonic) continue;
    const double limit = s.lambda_zero - 1e-8 * std::max(1.0, s.lambda_zero);
    out.push_back({"subharmonic_floor/" + suite[k].name, s.lambda_nonmag >= limit, s.lambda_nonmag, limit,
                   describe("lambda0", s.lambda_nonmag, ">=", limit)});
  }

  // Non-magnetic ground value nondecreasing in n for subharmonic weights.
  {
    const std::vector<double> n_list{1, 2, 4, 8, 16};
    const GridDomain g = build_grid(DomainSpec::disc({0, 0}, 1), opts.h);
    const std::pair<const char*, Weight> weights[] = {
        {"abs4", make_weight(WeightTag::abs4)},
        {"flat_disc", make_weight(WeightTag::flat_disc)},
        {"hol_squares[z]", make_weight(WeightTag::hol_squares, polys({{0, 1}}))},
    };
    for (const auto& [name, w] : weights) {
      const auto recs = sweep(g, w, n_list, opts.solver, opts.workers);
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < recs.size(); ++k)
        worst = std::min(worst, (recs[k].lambda_nonmag - recs[k - 1].lambda_nonmag) /
                                    std::max(1.0, recs[k - 1].lambda_nonmag));
      out.push_back({std::string("monotone_in_n/disc/") + name, worst >= -1e-8, worst, -1e-8,
                     describe("min relative increment", worst, ">=", -1e-8)});
    }
  }

  // Flux periodicity and the integer-flux minimum on the annulus.
  {
    const GridDomain g = build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), opts.flux_h);
    const Weight w = make_weight(WeightTag::harmonic_log);
    const std::vector<double> t_list{0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2};
    const auto pts = flux_scan(g, w, t_list, opts.solver, opts.workers);
    double worst = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        if (std::abs(pts[b].t - pts[a].t - 1) < 1e-12)
          worst = std::max(worst, std::abs(pts[b].lambda_mag - pts[a].lambda_mag) / pts[a].lambda_mag);
    out.push_back({"flux_periodicity/annulus", worst <= 1e-6, worst, 1e-6,
                   describe("max relative period mismatch", worst, "<=", 1e-6)});
    const double base = pts[0].lambda_mag;
    const double integer_dev = std::max(std::abs(pts[4].lambda_mag - base), std::abs(pts[8].lambda_mag - base)) / base;
    out.push_back({"flux_integer_equality/annulus", integer_dev <= 1e-6, integer_dev, 1e-6,
                   describe("relative deviation at integer flux", integer_dev, "<=", 1e-6)});
    const double half_gap = (pts[2].lambda_mag - base) / base;
    out.push_back({"flux_half_excess/annulus", half_gap > 1e-3, half_gap, 1e-3,
                   describe("relative excess at half flux", half_gap, ">", 1e-3)});
  }

  // Poincare lower bound pi/|D|.
  {
    const std::pair<const char*, DomainSpec> domains[] = {
        {"square", DomainSpec::rectangle(0, 1, 0, 1)},
        {"disc", DomainSpec::disc({0, 0}, 1)},
        {"annulus", DomainSpec::annulus({0, 0}, 0.5, 2)},
    };
    std::vector<CheckResult> rows(std::size(domains));
    parallel_for(std::size(domains), opts.workers, [&](std::size_t k) {
      const GridDomain g = build_grid(domains[k].second, opts.poincare_h);
      const double lambda = ground_state(assemble_nonmagnetic(g, zero, 0.0), opts.solver).lambda;
      const double bound = poincare_bound(g);
      rows[k] = {std::string("poincare/") + domains[k].first, lambda >= bound, lambda, bound,
                 describe("lambda", lambda, ">=", bound)};
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }

  // Iterative solver against the dense oracle on small random instances.
  {
    std::mt19937_64 rng(opts.oracle_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < opts.oracle_instances; ++k) {
      // Draws are sequenced explicitly so the instances do not depend on argument evaluation order.
      const bool disc = uni(rng) < 0.5;
      const double a = uni(rng), b = uni(rng);
      const DomainSpec dom =
          disc ? DomainSpec::disc({0, 0}, 0.5 + 0.5 * a) : DomainSpec::rectangle(0, 0.6 + 0.9 * a, 0, 0.6 + 0.9 * b);
      const int kind = static_cast<int>(uni(rng) * 5);
      const double cx = uni(rng), cy = uni(rng), sc = uni(rng);
      WeightParams p = centered({0.1 * cx, 0.1 * cy}, 0.5 + 1.5 * sc);
      WeightTag tag = WeightTag::zero;
      switch (kind) {
        case 0: tag = WeightTag::abs2; break;
        case 1: tag = WeightTag::abs4; break;
        case 2: tag = WeightTag::flat_disc; break;
        case 3: {
          tag = WeightTag::hol_squares;
          const double c0 = uni(rng), c1r = uni(rng), c1i = uni(rng);
          p.polynomials = {{c0, {c1r, c1i}, 1}};
          break;
        }
        default:
          tag = WeightTag::harmonic_log;
          p.center = {-1.6, 0.2};
          p.beta = 0.3 + uni(rng);
          break;
      }
      const double n = 8 * uni(rng);
      const bool magnetic = k % 2 == 0;
      const GridDomain g = build_grid(dom, 0.1);
      const Weight w = make_weight(tag, p);
      const auto s = magnetic ? assemble_magnetic(g, w, n) : assemble_nonmagnetic(g, w, n);
      const double dense = dense_oracle(s).front();
      const double iter = ground_state(s, opts.solver).lambda;
      const double err = std::abs(iter - dense) / std::max(1.0, std::abs(dense));
      std::ostringstream name;
      name << "oracle/" << k << "/" << (magnetic ? "magnetic" : "nonmagnetic") << "/" << to_string(tag)
           << "/dim=" << g.size();
      out.push_back({name.str(), err <= 1e-9, err, 1e-9, describe("relative error", err, "<=", 1e-9)});
    }
  }
  return out;
}

}  // namespace maglab::cli
