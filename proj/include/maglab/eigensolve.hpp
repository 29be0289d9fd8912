#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "maglab/assembly.hpp"
#include "maglab/error.hpp"

namespace maglab {

enum class SolverMethod {
  automatic,          ///< LOBPCG, falling back to inverse iteration on stagnation
  lobpcg,             ///< LOBPCG only
  inverse_iteration,  ///< shift-invert power iteration with CG inner solves only
};

struct SolverOpts {
  double tol = 1e-8;  ///< relative residual target
  int max_iter = 20000;
  int block_size = 2;
  std::uint64_t seed = 42;
  SolverMethod method = SolverMethod::automatic;

  void validate() const;
  friend bool operator==(const SolverOpts&, const SolverOpts&) = default;
};

struct EigenResult {
  double lambda = 0.0;
  Eigen::VectorXcd vector;  ///< unit Euclidean norm
  double residual = 0.0;    ///< explicitly recomputed ||S v - lambda v|| (or ||A v - lambda M v||)
  double target = 0.0;      ///< residual threshold the solve was held to
  int iters = 0;
  bool converged = false;
};

/// Thrown when the residual target is not met; carries the best iterate.
class NoConvergence : public Error {
 public:
  explicit NoConvergence(EigenResult best);
  const EigenResult& best() const noexcept { return best_; }

 private:
  EigenResult best_;
};

/// Residual threshold used by ground_state: tol * max(|lambda|, 4/h^2 * 1e-3).
double residual_target(double lambda, double h, double tol);

EigenResult ground_state(const OperatorMatrix& s, const SolverOpts& opts = {});

/// Smallest eigenpair of A v = lambda M v with M the lumped (diagonal) mass.
EigenResult ground_state_generalized(const GeneralizedPair& pair, const SolverOpts& opts = {});

/// Full spectrum by dense Hermitian eigendecomposition, ascending. dim <= 2000.
std::vector<double> dense_oracle(const OperatorMatrix& s);

/// (v* S v) / (v* v).
double rayleigh(const OperatorMatrix& s, const Eigen::VectorXcd& v);

}  // namespace maglab
