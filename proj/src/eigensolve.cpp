#include "maglab/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace maglab {

void SolverOpts::validate() const {
  if (!(tol > 0) || !std::isfinite(tol)) throw Error(ErrorKind::InvalidArgument, "solver tol must be positive");
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "solver max_iter must be >= 1");
  if (block_size < 1) throw Error(ErrorKind::InvalidArgument, "solver block_size must be >= 1");
}

namespace {

std::string describe(const EigenResult& r) {
  std::ostringstream msg;
  msg << "best residual " << r.residual << " above target " << r.target << " after " << r.iters << " iterations";
  return msg.str();
}

}  // namespace

NoConvergence::NoConvergence(EigenResult best)
    : Error(ErrorKind::NoConvergence, describe(best)), best_(std::move(best)) {}

double residual_target(double lambda, double h, double tol) {
  return tol * std::max(std::abs(lambda), 4.0 / (h * h) * 1e-3);
}

namespace {

template <class Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// A x = lambda B x with B = diag(mass) or the identity.
template <class Scalar>
struct Problem {
  const Sparse<Scalar>& a;
  const Eigen::VectorXd* mass = nullptr;
  Eigen::VectorXd inv_precond;
  /// Residual threshold for an eigenvalue estimate and ||B x||.
  std::function<double(double, double)> target;

  Eigen::Index dim() const { return a.rows(); }

  Block<Scalar> apply_b(const Block<Scalar>& x) const {
    if (!mass) return x;
    return mass->template cast<Scalar>().asDiagonal() * x;
  }
  Vec<Scalar> apply_b(const Vec<Scalar>& x) const {
    if (!mass) return x;
    return mass->template cast<Scalar>().cwiseProduct(x);
  }
};

template <class Scalar>
struct Iterate {
  Vec<Scalar> x;
  double lambda = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double target = 0.0;
};

/// Explicit Rayleigh quotient and residual of a single vector.
template <class Scalar>
Iterate<Scalar> certify(const Problem<Scalar>& pb, const Vec<Scalar>& x) {
  Iterate<Scalar> it;
  it.x = x;
  const Vec<Scalar> ax = pb.a * x;
  const Vec<Scalar> bx = pb.apply_b(x);
  it.lambda = std::real(x.dot(ax)) / std::real(x.dot(bx));
  it.residual = (ax - it.lambda * bx).norm();
  it.target = pb.target(it.lambda, bx.norm());
  return it;
}

template <class Scalar>
void fill_random(Block<Scalar>& x, Eigen::Index col, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      x(i, col) = uni(rng);
    } else {
      const double re = uni(rng);
      const double im = uni(rng);
      x(i, col) = Scalar(re, im);
    }
  }
}

/// B-orthonormalise the columns of v in place (SVQB), dropping numerically
/// dependent directions; the same transform is applied to av when given.
template <class Scalar>
void orthonormalize(const Problem<Scalar>& pb, Block<Scalar>& v, Block<Scalar>* av) {
  if (v.cols() == 0) return;
  const Block<Scalar> bv = pb.apply_b(v);
  Block<Scalar> gram = v.adjoint() * bv;
  gram = (gram + gram.adjoint()).eval() * 0.5;
  Eigen::VectorXd d(gram.rows());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double g = std::real(gram(i, i));
    d[i] = g > 0 ? 1.0 / std::sqrt(g) : 0.0;
  }
  const Block<Scalar> scaled = d.template cast<Scalar>().asDiagonal() * gram * d.template cast<Scalar>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Block<Scalar>> es(scaled);
  const auto& theta = es.eigenvalues();
  const double top = theta.size() ? theta[theta.size() - 1] : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (theta[i] > 1e-12 * top && top > 0) keep.push_back(i);
  Block<Scalar> t(v.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    t.col(static_cast<Eigen::Index>(c)) =
        d.template cast<Scalar>().asDiagonal() * es.eigenvectors().col(keep[c]) / std::sqrt(theta[keep[c]]);
  v = (v * t).eval();
  if (av) *av = (*av * t).eval();
}

/// Remove the B-components of v along the B-orthonormal columns of basis.
template <class Scalar>
void project_out(const Problem<Scalar>& pb, const Block<Scalar>& basis, const Block<Scalar>& abasis,
                 Block<Scalar>& v, Block<Scalar>* av) {
  if (basis.cols() == 0 || v.cols() == 0) return;
  const Block<Scalar> coef = pb.apply_b(basis).adjoint() * v;
  v -= basis * coef;
  if (av) *av -= abasis * coef;
}

template <class Scalar>
struct Outcome {
  Iterate<Scalar> best;
  int iters = 0;
  bool converged = false;
};

template <class Scalar>
Outcome<Scalar> dense_solve(const Problem<Scalar>& pb) {
  Block<Scalar> a = Block<Scalar>(pb.a);
  if (pb.mass) {
    const Eigen::VectorXd s = pb.mass->cwiseSqrt().cwiseInverse();
    a = s.template cast<Scalar>().asDiagonal() * a * s.template cast<Scalar>().asDiagonal();
  }
  a = (a + a.adjoint()).eval() * 0.5;
  Eigen::SelfAdjointEigenSolver<Block<Scalar>> es(a);
  Vec<Scalar> x = es.eigenvectors().col(0);
  if (pb.mass) x = pb.mass->cwiseSqrt().cwiseInverse().template cast<Scalar>().cwiseProduct(x);
  Outcome<Scalar> out;
  out.best = certify(pb, x);
  out.iters = 1;
  out.converged = out.best.residual <= out.best.target;
  return out;
}

template <class Scalar>
Outcome<Scalar> lobpcg(const Problem<Scalar>& pb, const SolverOpts& opts, int max_iter) {
  const Eigen::Index n = pb.dim();
  const Eigen::Index k = std::min<Eigen::Index>(opts.block_size, n);

  std::mt19937_64 rng(opts.seed);
  Block<Scalar> x(n, k);
  x.col(0).setOnes();
  for (Eigen::Index c = 1; c < k; ++c) fill_random(x, c, rng);
  orthonormalize<Scalar>(pb, x, nullptr);
  if (x.cols() == 0) throw Error(ErrorKind::ZeroVector, "degenerate start block");

  Block<Scalar> ax = pb.a * x;
  {
    Block<Scalar> h = x.adjoint() * ax;
    h = (h + h.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Block<Scalar>> es(h);
    x = (x * es.eigenvectors()).eval();
  }
  Block<Scalar> p(n, 0), ap(n, 0);
  Eigen::VectorXd theta(x.cols());

  Outcome<Scalar> out;
  double best_ratio = std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  const int stall_window = std::max(500, max_iter / 10);

  for (int it = 1; it <= max_iter; ++it) {
    out.iters = it;
    ax = pb.a * x;
    const Block<Scalar> bx = pb.apply_b(x);
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      theta[c] = std::real(x.col(c).dot(ax.col(c))) / std::real(x.col(c).dot(bx.col(c)));
    Block<Scalar> r = ax - bx * theta.template cast<Scalar>().asDiagonal();

    const double rn = r.col(0).norm();
    const double tgt = pb.target(theta[0], bx.col(0).norm());
    const double ratio = rn / tgt;
    if (ratio < best_ratio) {
      if (ratio < 0.99 * best_ratio) last_improvement = it;
      best_ratio = ratio;
      out.best.x = x.col(0);
      out.best.lambda = theta[0];
      out.best.residual = rn;
      out.best.target = tgt;
    }
    if (rn <= tgt) {
      out.converged = true;
      break;
    }
    if (it - last_improvement > stall_window) break;

    // Preconditioned residuals, orthogonal to X (twice for stability).
    Block<Scalar> w = pb.inv_precond.template cast<Scalar>().asDiagonal() * r;
    project_out<Scalar>(pb, x, ax, w, nullptr);
    orthonormalize<Scalar>(pb, w, nullptr);
    Block<Scalar> aw = pb.a * w;

    if (p.cols() > 0) {
      project_out<Scalar>(pb, x, ax, p, &ap);
      project_out<Scalar>(pb, w, aw, p, &ap);
      orthonormalize<Scalar>(pb, p, &ap);
    }

    const Eigen::Index nx = x.cols(), nw = w.cols(), np = p.cols();
    Block<Scalar> s(n, nx + nw + np), as(n, nx + nw + np);
    s << x, w, p;
    as << ax, aw, ap;

    Block<Scalar> h = s.adjoint() * as;
    h = (h + h.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Block<Scalar>> es(h);
    const Block<Scalar> c = es.eigenvectors().leftCols(nx);

    const Block<Scalar> c_rest = c.bottomRows(nw + np);
    p = s.rightCols(nw + np) * c_rest;
    ap = as.rightCols(nw + np) * c_rest;
    x = s * c;
  }
  return out;
}

template <class Scalar>
std::pair<Vec<Scalar>, int> conjugate_gradient(const Problem<Scalar>& pb, double shift, const Vec<Scalar>& rhs,
                                               const Vec<Scalar>& guess, double rel_tol, int max_iter) {
  auto apply = [&](const Vec<Scalar>& v) -> Vec<Scalar> {
    Vec<Scalar> out = pb.a * v;
    if (shift != 0) out -= shift * pb.apply_b(v);
    return out;
  };
  Eigen::VectorXd diag(pb.dim());
  for (Eigen::Index i = 0; i < pb.dim(); ++i) {
    const double bi = pb.mass ? (*pb.mass)[i] : 1.0;
    diag[i] = std::real(pb.a.coeff(i, i)) - shift * bi;
  }
  const Eigen::VectorXd inv_diag = diag.cwiseInverse();
  Vec<Scalar> x = guess;
  Vec<Scalar> r = rhs - apply(x);
  Vec<Scalar> z = inv_diag.template cast<Scalar>().cwiseProduct(r);
  Vec<Scalar> d = z;
  double rz = std::real(r.dot(z));
  const double stop = rel_tol * rhs.norm();
  int it = 0;
  for (; it < max_iter && r.norm() > stop; ++it) {
    const Vec<Scalar> ad = apply(d);
    const double alpha = rz / std::real(d.dot(ad));
    x += alpha * d;
    r -= alpha * ad;
    z = inv_diag.template cast<Scalar>().cwiseProduct(r);
    const double rz_new = std::real(r.dot(z));
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  return {x, it};
}

/// Inverse iteration with a fixed shift below the Gershgorin lower bound, so
/// that A - shift B is positive definite and CG applies.
template <class Scalar>
Outcome<Scalar> inverse_iteration(const Problem<Scalar>& pb, const Vec<Scalar>& start, int max_iter) {
  double lower = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < pb.a.outerSize(); ++i) {
    double diag = 0, off = 0;
    for (typename Sparse<Scalar>::InnerIterator e(pb.a, i); e; ++e) {
      if (e.col() == i)
        diag = std::real(e.value());
      else
        off += std::abs(e.value());
    }
    const double bi = pb.mass ? (*pb.mass)[i] : 1.0;
    lower = std::min(lower, (diag - off) / bi);
    scale = std::max(scale, (std::abs(diag) + off) / bi);
  }
  const double shift = std::min(lower, 0.0) - 1e-6 * std::max(scale, 1.0);

  Outcome<Scalar> out;
  Vec<Scalar> x = start;
  x /= std::sqrt(std::real(x.dot(pb.apply_b(x))));
  out.best = certify(pb, x);
  double rel = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    out.iters = it;
    const double inner_tol = std::clamp(0.1 * rel, 1e-14, 1e-2);
    auto [y, cg_iters] = conjugate_gradient<Scalar>(pb, shift, pb.apply_b(x), x, inner_tol,
                                                    static_cast<int>(std::min<Eigen::Index>(10 * pb.dim(), 200000)));
    (void)cg_iters;
    const double nrm = std::sqrt(std::real(y.dot(pb.apply_b(y))));
    if (!(nrm > 0) || !std::isfinite(nrm)) break;
    x = y / nrm;
    const auto cur = certify(pb, x);
    rel = cur.residual / std::max(std::abs(cur.lambda - shift), 1e-300);
    if (cur.residual / cur.target < out.best.residual / out.best.target) out.best = cur;
    if (cur.residual <= cur.target) {
      out.best = cur;
      out.converged = true;
      break;
    }
  }
  return out;
}

template <class Scalar>
EigenResult solve(const Problem<Scalar>& pb, const SolverOpts& opts) {
  Outcome<Scalar> out;
  const Eigen::Index small = std::max<Eigen::Index>(4 * opts.block_size, 16);
  if (pb.dim() <= small) {
    out = dense_solve(pb);
  } else if (opts.method == SolverMethod::inverse_iteration) {
    Vec<Scalar> start = Vec<Scalar>::Ones(pb.dim());
    out = inverse_iteration(pb, start, opts.max_iter);
  } else {
    out = lobpcg(pb, opts, opts.max_iter);
    if (!out.converged && opts.method == SolverMethod::automatic) {
      auto fallback = inverse_iteration(pb, out.best.x, std::max(50, opts.max_iter / 20));
      fallback.iters += out.iters;
      if (fallback.converged || fallback.best.residual / fallback.best.target < out.best.residual / out.best.target)
        out = fallback;
      else
        out.iters = fallback.iters;
    }
  }

  EigenResult res;
  Vec<Scalar> v = out.best.x;
  // Fix the global phase: the entry sum (or the largest entry) becomes real positive.
  Scalar anchor = v.sum();
  if (std::abs(anchor) < 1e-8 * v.norm() * std::sqrt(static_cast<double>(v.size()))) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    anchor = v[imax];
  }
  if (std::abs(anchor) > 0) v *= std::abs(anchor) / anchor;
  v /= v.norm();
  res.vector = v.template cast<Complex>();
  res.lambda = out.best.lambda;
  res.residual = out.best.residual / out.best.x.norm();
  res.target = out.best.target / out.best.x.norm();
  res.iters = out.iters;
  res.converged = out.converged;
  if (!res.converged) throw NoConvergence(res);
  return res;
}

template <class Scalar>
Eigen::VectorXd jacobi(const Sparse<Scalar>& a) {
  Eigen::VectorXd inv(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = std::abs(std::real(a.coeff(i, i)));
    inv[i] = d > 0 ? 1.0 / d : 1.0;
  }
  return inv;
}

}  // namespace

EigenResult ground_state(const OperatorMatrix& s, const SolverOpts& opts) {
  opts.validate();
  const double h = s.h();
  auto target = [h, tol = opts.tol](double lambda, double bnorm) { return residual_target(lambda, h, tol) * bnorm; };
  if (s.is_complex()) {
    Problem<Complex> pb{s.complex_entries(), nullptr, jacobi(s.complex_entries()), target};
    return solve(pb, opts);
  }
  Problem<double> pb{s.real_entries(), nullptr, jacobi(s.real_entries()), target};
  return solve(pb, opts);
}

EigenResult ground_state_generalized(const GeneralizedPair& pair, const SolverOpts& opts) {
  opts.validate();
  if (pair.mass.size() != pair.stiffness.rows() || pair.stiffness.rows() != pair.stiffness.cols())
    throw Error(ErrorKind::InvalidArgument, "stiffness and mass dimensions disagree");
  if (pair.mass.size() == 0 || !(pair.mass.minCoeff() > 0))
    throw Error(ErrorKind::MassNotPD, "lumped mass must be strictly positive");
  double a_norm = 0;
  for (Eigen::Index i = 0; i < pair.stiffness.outerSize(); ++i) {
    double row = 0;
    for (ComplexSparse::InnerIterator e(pair.stiffness, i); e; ++e) row += std::abs(e.value());
    a_norm = std::max(a_norm, row);
  }
  // tol * |lambda| * ||M v||, with a floor at the rounding level of ||A v||.
  auto target = [tol = opts.tol, a_norm](double lambda, double bnorm) {
    return std::max(tol * std::abs(lambda) * bnorm, 64 * std::numeric_limits<double>::epsilon() * a_norm);
  };
  Problem<Complex> pb{pair.stiffness, &pair.mass, jacobi(pair.stiffness), target};
  return solve(pb, opts);
}

std::vector<double> dense_oracle(const OperatorMatrix& s) {
  if (s.dim() > 2000) throw Error(ErrorKind::TooLarge, "dense oracle is limited to dim <= 2000");
  Eigen::VectorXd evals;
  if (s.is_complex()) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd(s.complex_entries());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    evals = es.eigenvalues();
  } else {
    Eigen::MatrixXd m = Eigen::MatrixXd(s.real_entries());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    evals = es.eigenvalues();
  }
  std::vector<double> out(evals.data(), evals.data() + evals.size());
  std::sort(out.begin(), out.end());
  return out;
}

double rayleigh(const OperatorMatrix& s, const Eigen::VectorXcd& v) {
  if (v.size() != static_cast<Eigen::Index>(s.dim()))
    throw Error(ErrorKind::InvalidArgument, "vector length does not match the operator");
  const double vv = v.squaredNorm();
  if (!(vv > 0)) throw Error(ErrorKind::ZeroVector, "Rayleigh quotient of the zero vector");
  Complex num;
  if (s.is_complex())
    num = v.dot(s.complex_entries() * v);
  else
    num = v.dot(s.real_entries().cast<Complex>() * v);
  return num.real() / vv;
}

}  // namespace maglab
