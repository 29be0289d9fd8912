// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maglab/cli/verify.hpp"
#include "maglab/potential_p.hpp"
#include "maglab/semiclassical.hpp"
#include "oracles.hpp"

using namespace maglab;
namespace fs = std::filesystem;

namespace {

/// Collects the individual comparisons made for one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      failures_.push_back(what);
    }
    notes_.push_back(what);
  }
  bool passed() const { return passed_; }
  std::string summary() const {
    const auto& list = passed_ ? notes_ : failures_;
    std::string out;
    for (std::size_t k = 0; k < list.size() && k < 4; ++k) out += (k ? "; " : "") + list[k];
    if (list.size() > 4) out += "; ... (" + std::to_string(list.size()) + " items)";
    return out;
  }

 private:
  bool passed_ = true;
  std::vector<std::string> notes_, failures_;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Weight& zero_weight() {
  static const Weight w = make_weight(WeightTag::zero);
  return w;
}

double dirichlet(const GridDomain& g) { return ground_state(assemble_nonmagnetic(g, zero_weight(), 0)).lambda; }

GridDomain unit_disc(double h) { return build_grid(DomainSpec::disc({0, 0}, 1), h); }
GridDomain annulus(double h) { return build_grid(DomainSpec::annulus({0, 0}, 0.5, 2), h); }

Weight hol(std::vector<std::vector<std::complex<double>>> polys) {
  WeightParams p;
  p.polynomials = std::move(polys);
  return make_weight(WeightTag::hol_squares, p);
}

const std::vector<double> kSchedule{1, 4, 16, 64, 256};
constexpr double kJ01sq = oracle::j01 * oracle::j01;

void square_benchmark(Criterion& c) {
  const double fine = dirichlet(build_grid(DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 64));
  const double rel = std::abs(fine - oracle::square_continuum) / oracle::square_continuum;
  c.expect(rel <= 1e-3, fmt("h=1/64 lambda %.6f, rel err %.2e <= 1e-3", fine, rel));
  const double coarse = dirichlet(build_grid(DomainSpec::rectangle(0, 1, 0, 1), 0.25));
  const double exact = 128 * std::pow(std::sin(oracle::pi / 8), 2);
  c.expect(std::abs(coarse - exact) <= 1e-8, fmt("h=1/4 lambda %.10f vs %.10f", coarse, exact));
}

void disc_benchmark(Criterion& c) {
  const double e64 = std::abs(dirichlet(unit_disc(1.0 / 64)) - kJ01sq) / kJ01sq;
  const double e128 = std::abs(dirichlet(unit_disc(1.0 / 128)) - kJ01sq) / kJ01sq;
  c.expect(e128 <= 0.03, fmt("h=1/128 rel err %.3e <= 0.03", e128));
  c.expect(e128 < e64, fmt("error decreases %.3e -> %.3e", e64, e128));
}

void kato_suite(Criterion& c) {
  const auto suite = cli::shipped_suite();
  c.expect(suite.size() >= 12, fmt("%zu suite combinations", suite.size()));
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : suite) {
    const auto r = kato_report(build_grid(s.domain, 1.0 / 32), s.weight, s.n);
    const double margin = r.gap + 1e-6 * std::max(1.0, r.lambda_nonmag);
    worst = std::min(worst, margin);
    if (margin < 0) c.expect(false, s.name + fmt(" gap %.3e", r.gap));
  }
  c.expect(worst >= 0, fmt("min gap + 1e-6 max(1, lambda0) = %.3e >= 0", worst));
}

void flux_criterion(Criterion& c) {
  const auto g = annulus(1.0 / 32);
  std::vector<double> ts;
  for (int k = 0; k <= 8; ++k) ts.push_back(0.25 * k);
  const auto pts = flux_scan(g, make_weight(WeightTag::harmonic_log), ts);
  const double l0 = pts[0].lambda_mag, l1 = pts[4].lambda_mag, l2 = pts[8].lambda_mag;
  const double spread = std::max({std::abs(l0 - l1), std::abs(l1 - l2), std::abs(l0 - l2)}) / l0;
  c.expect(spread <= 1e-6, fmt("integer-flux spread %.2e <= 1e-6", spread));
  const double excess = (pts[2].lambda_mag - std::max({l0, l1, l2})) / l0;
  c.expect(excess > 1e3 * 1e-6, fmt("half-flux excess %.3e > 1e-3", excess));
  double period = 0;
  for (std::size_t k = 0; k + 4 < pts.size(); ++k)
    period = std::max(period, std::abs(pts[k].lambda_mag - pts[k + 4].lambda_mag) / pts[k].lambda_mag);
  c.expect(period <= 1e-6, fmt("period mismatch %.2e <= 1e-6", period));
}

void paramagnetic_criterion(Criterion& c) {
  const auto g = unit_disc(1.0 / 32);
  const double base = dirichlet(g);
  const auto z = paramagnetic_check(g, hol({{0, 1}}));
  c.expect(z.lambda_mag_phi <= z.lambda_nonmag_2phi * (1 + 1e-6),
           fmt("|z|^2: %.6f <= %.6f", z.lambda_mag_phi, z.lambda_nonmag_2phi));
  const double shift = std::abs(z.lambda_nonmag_2phi - (base + 8)) / (base + 8);
  c.expect(shift <= 1e-8, fmt("lambda0_2phi - (lambda + 8) rel %.2e <= 1e-8", shift));
  const auto z2 = paramagnetic_check(g, hol({{0, 0, 1}}));
  c.expect(z2.lambda_mag_phi <= z2.lambda_nonmag_2phi * (1 + 1e-6),
           fmt("|z^2|^2: %.6f <= %.6f", z2.lambda_mag_phi, z2.lambda_nonmag_2phi));
}

void divergence_criterion(Criterion& c) {
  const auto g = unit_disc(1.0 / 128);
  const auto w = make_weight(WeightTag::abs4);
  const auto recs = sweep(g, w, kSchedule);
  bool monotone = true, kato = true;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (k > 0 && recs[k].lambda_nonmag < recs[k - 1].lambda_nonmag) monotone = false;
    if (recs[k].gap < -1e-6 * std::max(1.0, recs[k].lambda_nonmag)) kato = false;
  }
  c.expect(monotone, "lambda0 nondecreasing in n");
  c.expect(kato, "lambda_mag >= lambda0 at every n");
  const double scaled = recs.back().lambda_nonmag / 16;
  c.expect(std::abs(scaled - 8) <= 0.8, fmt("lambda0(256)/16 = %.4f within 10%% of 8", scaled));
  for (auto col : {SweepColumn::magnetic, SweepColumn::nonmagnetic}) {
    const ClassifyOptions opts{5, 1.05, certified_sweep_bound(g, w, kSchedule, col)};
    const auto v = classify_limit(recs, col, opts);
    c.expect(v.kind == VerdictKind::diverging,
             std::string(col == SweepColumn::magnetic ? "mag" : "nonmag") + " verdict " + v.label);
  }
}

void boundedness_criterion(Criterion& c) {
  const auto g = unit_disc(1.0 / 128);
  const auto w = make_weight(WeightTag::flat_disc);
  const auto recs = sweep(g, w, kSchedule);
  const double ceiling = 1.03 * 16 * kJ01sq;
  double top = 0;
  for (const auto& r : recs) top = std::max(top, r.lambda_mag);
  c.expect(top <= ceiling, fmt("max lambda_mag %.4f <= %.4f", top, ceiling));
  const auto bound = certified_sweep_bound(g, w, kSchedule, SweepColumn::magnetic);
  const auto v = classify_limit(recs, SweepColumn::magnetic, {5, 1.05, bound});
  c.expect(v.kind == VerdictKind::bounded,
           "verdict " + v.label + (v.bound ? fmt(" (bound %.4f)", *v.bound) : std::string()));
}

void property_p_criterion(Criterion& c) {
  std::vector<double> radii;
  for (int j = 1; j <= 5; ++j) radii.push_back(std::ldexp(1.0, -j));
  const auto pt = lambda_shrinking(CompactSetSpec::point({0, 0}), radii, cells_per_radius(16));
  double worst = 0;
  for (std::size_t j = 0; j < radii.size(); ++j)
    worst = std::max(worst, std::abs(pt.lambdas[j] * radii[j] * radii[j] - kJ01sq) / kJ01sq);
  c.expect(worst <= 0.05, fmt("point: max |lambda r^2 - j01^2|/j01^2 = %.3f <= 0.05", worst));
  const auto vp = property_p_verdict(pt);
  c.expect(vp.kind == VerdictKind::diverging, "point verdict: " + vp.label);

  std::vector<double> disc_radii;
  for (int j = 3; j <= 7; ++j) disc_radii.push_back(std::ldexp(1.0, -j));
  const auto cd = lambda_shrinking(CompactSetSpec::closed_disc({0, 0}, 0.25), disc_radii, cells_per_radius(4));
  const auto vd = property_p_verdict(cd);
  c.expect(vd.kind == VerdictKind::bounded, "closed disc verdict: " + vd.label);
  const double limit = 16 * kJ01sq;
  if (vd.bound) {
    const double rel = std::abs(*vd.bound - limit) / limit;
    c.expect(rel <= 0.03, fmt("closed disc limit %.3f vs %.3f, rel %.4f <= 0.03", *vd.bound, limit, rel));
  } else {
    c.expect(false, "closed disc: no limit exhibited");
  }

  std::vector<double> seg_radii;
  for (int j = 2; j <= 6; ++j) seg_radii.push_back(std::ldexp(1.0, -j));
  const auto sg = lambda_shrinking(CompactSetSpec::segment({-0.5, 0}, {0.5, 0}), seg_radii, cells_per_radius(8));
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < seg_radii.size(); ++j)
    ratio = std::min(ratio, sg.lambdas[j] / (oracle::pi * oracle::pi / (4 * seg_radii[j] * seg_radii[j])));
  c.expect(ratio >= 0.9, fmt("segment: min lambda / (pi^2/4r^2) = %.4f >= 0.9", ratio));
}

void lavine_criterion(Criterion& c) {
  for (const auto& [w, n, name] : {std::tuple{make_weight(WeightTag::zero), 0.0, "zero"},
                                   std::tuple{make_weight(WeightTag::abs2), 1.0, "abs2"}}) {
    std::vector<double> res;
    for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
      const auto g = unit_disc(h);
      res.push_back(lavine_ocarroll_residual(g, w, n, smooth_bump(g, {0.1, -0.05}, 0.5)));
    }
    c.expect(res[0] > res[1] && res[1] > res[2],
             fmt("%s: residuals %.2e > %.2e > %.2e", name, res[0], res[1], res[2]));
    c.expect(res[2] <= 0.02, fmt("%s: residual at 1/128 %.2e <= 0.02", name, res[2]));
  }
}

void oracle_criterion(Criterion& c) {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> uni(0, 1);
  const WeightTag tags[] = {WeightTag::abs2, WeightTag::abs4, WeightTag::flat_disc, WeightTag::zero};
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const double r = 0.7 + 0.9 * uni(rng);
    const double n = 0.5 + 7.5 * uni(rng);
    const double cx = 0.2 * uni(rng) - 0.1;
    const WeightTag tag = tags[k % 4];
    const auto g = build_grid(DomainSpec::disc({cx, 0}, r), r / 10);
    if (g.size() > 400) {
      c.expect(false, fmt("instance %d has dim %zu > 400", k, g.size()));
      continue;
    }
    const auto w = make_weight(tag);
    const auto s = k % 2 ? assemble_magnetic(g, w, n) : assemble_nonmagnetic(g, w, n);
    const double ref = dense_oracle(s).front();
    worst = std::max(worst, std::abs(ground_state(s).lambda - ref) / ref);
  }
  c.expect(worst <= 1e-9, fmt("10 instances, max rel err %.2e <= 1e-9", worst));
}

void floor_criterion(Criterion& c) {
  const DomainSpec domains[] = {DomainSpec::rectangle(0, 1, 0, 1), DomainSpec::disc({0, 0}, 1),
                                DomainSpec::annulus({0, 0}, 0.5, 2)};
  const std::vector<Weight> weights{make_weight(WeightTag::zero), make_weight(WeightTag::abs2),
                                    make_weight(WeightTag::abs4), make_weight(WeightTag::flat_disc),
                                    hol({{0, 1}, {0.5, 0, 1}})};
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& d : domains) {
    const auto g = build_grid(d, 1.0 / 32);
    const double base = dirichlet(g);
    for (const auto& w : weights)
      for (const auto& r : sweep(g, w, kSchedule)) worst = std::min(worst, r.lambda_nonmag / base - 1);
    const auto fine = build_grid(d, 1.0 / 64);
    const double lam = dirichlet(fine), pb = poincare_bound(fine);
    c.expect(lam >= pb, fmt("lambda %.4f >= pi/|D| %.4f", lam, pb));
  }
  c.expect(worst >= -1e-8, fmt("min lambda0/lambda - 1 = %.3e >= -1e-8", worst));
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism_criterion(Criterion& c) {
  const fs::path dir = fs::temp_directory_path() / ("maglab_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "sweep.json") << R"({
    "domain": {"type": "disc", "radius": 1},
    "weight": {"tag": "abs4"},
    "grid": {"h": 0.03125},
    "sweep": {"n_list": [1, 4, 16, 64]},
    "output": {"csv": "sweep.csv"}
  })";
  const std::string bin = MAGLAB_BINARY;
  const std::string run = "cd " + dir.string() + " && " + bin + " run sweep.json > /dev/null";
  const int a = shell(run);
  const auto first = slurp(dir / "sweep.csv");
  const int b = shell(run);
  const auto second = slurp(dir / "sweep.csv");
  c.expect(a == 0 && b == 0, fmt("run exit codes %d, %d", a, b));
  c.expect(!first.empty() && first == second, fmt("CSV identical across runs (%zu bytes)", first.size()));
  const int v = shell(bin + " verify > " + (dir / "verify.txt").string());
  c.expect(v == 0, fmt("verify exit code %d", v));
  std::error_code ec;
  fs::remove_all(dir, ec);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria{
      {"Dirichlet benchmark (square)", square_benchmark},
      {"Dirichlet benchmark (disc)", disc_benchmark},
      {"Discrete Kato invariant", kato_suite},
      {"Integer-flux equality and periodicity", flux_criterion},
      {"Paramagnetic inequality", paramagnetic_criterion},
      {"Semi-classical divergence (abs4)", divergence_criterion},
      {"Semi-classical boundedness (flat_disc)", boundedness_criterion},
      {"Property (P) diagnostics", property_p_criterion},
      {"Ground-state factorisation identity", lavine_criterion},
      {"Oracle equivalence", oracle_criterion},
      {"Subharmonic floor and Poincare bound", floor_criterion},
      {"Determinism and schema", determinism_criterion},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (c.passed() ? "[PASS] " : "[FAIL] ") << k + 1 << ". " << criteria[k].first << " -- " << c.summary()
              << fmt(" (%.1fs)", secs) << std::endl;
    failed += c.passed() ? 0 : 1;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
