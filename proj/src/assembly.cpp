#include "maglab/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "maglab/error.hpp"
#include "maglab/numfmt.hpp"

namespace maglab {

OperatorMatrix::OperatorMatrix(OperatorKind kind, double scale, GridDomain grid, Weight weight,
                               std::variant<RealSparse, ComplexSparse> entries)
    : kind_(kind), scale_(scale), grid_(std::move(grid)), weight_(std::move(weight)), entries_(std::move(entries)) {}

ComplexSparse OperatorMatrix::as_complex() const {
  if (is_complex()) return complex_entries();
  return real_entries().cast<Complex>();
}

Complex OperatorMatrix::entry(std::size_t row, std::size_t col) const {
  const auto r = static_cast<Eigen::Index>(row), c = static_cast<Eigen::Index>(col);
  if (is_complex()) return complex_entries().coeff(r, c);
  return real_entries().coeff(r, c);
}

namespace {

void check_scale(double n) {
  if (!std::isfinite(n)) throw Error(ErrorKind::InvalidArgument, "scale n must be finite");
  if (n < 0) throw Error(ErrorKind::NegativeScale, "scale n must be nonnegative");
}

bool lex_less(Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

}  // namespace

OperatorMatrix assemble_nonmagnetic(const GridDomain& g, const Weight& w, double n) {
  check_scale(n);
  const double h = g.h();
  const double off = -1.0 / (h * h);
  const double diag0 = 4.0 / (h * h);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * g.size());
  static constexpr int kDi[4] = {-1, 1, 0, 0};
  static constexpr int kDj[4] = {0, 0, -1, 1};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Node p = g.node(k);
    const double pot = n == 0 ? 0.0 : n * w.lap(g.point(k));
    trips.emplace_back(k, k, diag0 + pot);
    for (int d = 0; d < 4; ++d) {
      const auto q = g.index_of({p.i + kDi[d], p.j + kDj[d]});
      if (q >= 0) trips.emplace_back(k, q, off);
    }
  }
  const auto dim = static_cast<Eigen::Index>(g.size());
  RealSparse m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return OperatorMatrix(OperatorKind::nonmagnetic, n, g, w, std::move(m));
}

double link_phase(const Weight& w, Point p, Point q, double n, double h) {
  const double dx = q.x - p.x, dy = q.y - p.y;
  const double tol = 1e-9 * h;
  const bool horizontal = std::abs(dy) <= tol && std::abs(std::abs(dx) - h) <= tol;
  const bool vertical = std::abs(dx) <= tol && std::abs(std::abs(dy) - h) <= tol;
  if (!horizontal && !vertical) throw Error(ErrorKind::NonAdjacent, "link endpoints are not grid neighbours");
  if (n == 0) return 0.0;
  // Evaluate on a canonical orientation so that theta(q, p) == -theta(p, q) bit for bit.
  if (lex_less(q, p)) return -(n * w.line_integral(q, p));
  return n * w.line_integral(p, q);
}

double plaquette_holonomy(const Weight& w, Point p, double n, double h) {
  const Point a = p, b{p.x + h, p.y}, c{p.x + h, p.y + h}, d{p.x, p.y + h};
  return link_phase(w, a, b, n, h) + link_phase(w, b, c, n, h) + link_phase(w, c, d, n, h) +
         link_phase(w, d, a, n, h);
}

OperatorMatrix assemble_magnetic(const GridDomain& g, const Weight& w, double n) {
  check_scale(n);
  const double h = g.h();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(5 * g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Node p = g.node(k);
    const Point pp = g.point(k);
    const double pot = n == 0 ? 0.0 : n * w.lap(pp);
    trips.emplace_back(k, k, Complex(4.0 * inv_h2 + pot, 0.0));
    // Each link once, from its lower endpoint; the mirror entry is the exact conjugate.
    for (const Node nb : {Node{p.i + 1, p.j}, Node{p.i, p.j + 1}}) {
      const auto q = g.index_of(nb);
      if (q < 0) continue;
      const double theta = link_phase(w, pp, g.point_of(nb), n, h);
      const Complex v = -std::polar(inv_h2, theta);
      trips.emplace_back(k, q, v);
      trips.emplace_back(q, k, std::conj(v));
    }
  }
  const auto dim = static_cast<Eigen::Index>(g.size());
  ComplexSparse m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return OperatorMatrix(OperatorKind::magnetic, n, g, w, std::move(m));
}

GeneralizedPair assemble_weighted_form(const GridDomain& g, const Weight& w, double n) {
  check_scale(n);
  const double h = g.h();

  // Links and cells touching the mask, identified by their lower-left node.
  std::vector<Node> xlinks, ylinks, cells;
  {
    auto push_unique = [](std::vector<Node>& v) {
      std::sort(v.begin(), v.end(), [](Node a, Node b) { return a.j != b.j ? a.j < b.j : a.i < b.i; });
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    for (const Node p : g.nodes()) {
      xlinks.push_back(p);
      xlinks.push_back({p.i - 1, p.j});
      ylinks.push_back(p);
      ylinks.push_back({p.i, p.j - 1});
      for (int di = -1; di <= 0; ++di)
        for (int dj = -1; dj <= 0; ++dj) cells.push_back({p.i + di, p.j + dj});
    }
    push_unique(xlinks);
    push_unique(ylinks);
    push_unique(cells);
  }
  const Point o = g.origin();
  auto at = [&](double i, double j) { return Point{o.x + i * h, o.y + j * h}; };

  std::vector<double> phi_node(g.size()), phi_x(xlinks.size()), phi_y(ylinks.size()), phi_c(cells.size());
  double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
  auto track = [&](double v) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
    return v;
  };
  for (std::size_t k = 0; k < g.size(); ++k) phi_node[k] = track(w.phi(g.point(k)));
  for (std::size_t k = 0; k < xlinks.size(); ++k) phi_x[k] = track(w.phi(at(xlinks[k].i + 0.5, xlinks[k].j)));
  for (std::size_t k = 0; k < ylinks.size(); ++k) phi_y[k] = track(w.phi(at(ylinks[k].i, ylinks[k].j + 0.5)));
  for (std::size_t k = 0; k < cells.size(); ++k) phi_c[k] = track(w.phi(at(cells[k].i + 0.5, cells[k].j + 0.5)));
  if (!std::isfinite(hi) || !std::isfinite(lo))
    throw Error(ErrorKind::WeightOverflow, "weight is not finite on the grid");
  if (n * (hi - lo) > 300) throw Error(ErrorKind::WeightOverflow, "n * (max phi - min phi) exceeds 300");
  auto weight_of = [&](double phi) { return n == 0 ? 1.0 : std::exp(2 * n * (phi - hi)); };

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(9 * g.size() + 16 * cells.size());
  auto add_pair = [&](std::int64_t a, std::int64_t b, Complex v) {
    trips.emplace_back(a, b, v);
    trips.emplace_back(b, a, std::conj(v));
  };

  // |u_x|^2 + |u_y|^2 on links.
  auto add_link = [&](Node p, Node q, double wt) {
    const auto a = g.index_of(p), b = g.index_of(q);
    if (a >= 0) trips.emplace_back(a, a, Complex(wt, 0));
    if (b >= 0) trips.emplace_back(b, b, Complex(wt, 0));
    if (a >= 0 && b >= 0) add_pair(a, b, Complex(-wt, 0));
  };
  for (std::size_t k = 0; k < xlinks.size(); ++k)
    add_link(xlinks[k], {xlinks[k].i + 1, xlinks[k].j}, weight_of(phi_x[k]));
  for (std::size_t k = 0; k < ylinks.size(); ++k)
    add_link(ylinks[k], {ylinks[k].i, ylinks[k].j + 1}, weight_of(phi_y[k]));

  // Cross term 2 Im(conj(u_x) u_y) with cell-centred differences.
  static constexpr int kCi[4] = {0, 1, 0, 1};
  static constexpr int kCj[4] = {0, 0, 1, 1};
  static constexpr double kCx[4] = {-0.5, 0.5, -0.5, 0.5};
  static constexpr double kCy[4] = {-0.5, -0.5, 0.5, 0.5};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double wt = weight_of(phi_c[k]);
    std::int64_t idx[4];
    for (int s = 0; s < 4; ++s) idx[s] = g.index_of({cells[k].i + kCi[s], cells[k].j + kCj[s]});
    for (int s = 0; s < 4; ++s) {
      for (int t = 0; t < 4; ++t) {
        if (idx[s] < 0 || idx[t] < 0 || idx[s] >= idx[t]) continue;
        const double c = kCx[s] * kCy[t] - kCy[s] * kCx[t];
        if (c != 0) add_pair(idx[s], idx[t], Complex(0, -c * wt));
      }
    }
  }

  GeneralizedPair out;
  const auto dim = static_cast<Eigen::Index>(g.size());
  out.stiffness.resize(dim, dim);
  out.stiffness.setFromTriplets(trips.begin(), trips.end());
  out.stiffness.makeCompressed();
  out.mass.resize(dim);
  for (std::size_t k = 0; k < g.size(); ++k) out.mass[static_cast<Eigen::Index>(k)] = h * h * weight_of(phi_node[k]);
  out.phi_shift = hi;
  out.h = h;
  return out;
}

void write_triplets(std::ostream& out, const OperatorMatrix& s) {
  auto emit = [&](const auto& m) {
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (typename std::decay_t<decltype(m)>::InnerIterator it(m, r); it; ++it) {
        const Complex v(it.value());
        out << it.row() << ' ' << it.col() << ' ' << format_double(v.real()) << ' ' << format_double(v.imag())
            << '\n';
      }
    }
  };
  if (s.is_complex())
    emit(s.complex_entries());
  else
    emit(s.real_entries());
}

}  // namespace maglab
