#pragma once

#include <complex>
#include <iosfwd>
#include <variant>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "maglab/grid.hpp"
#include "maglab/weights.hpp"

namespace maglab {

using Complex = std::complex<double>;
using RealSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ComplexSparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

enum class OperatorKind { magnetic, nonmagnetic };

/// Sparse Hermitian discretisation of S_{n phi} (magnetic, complex storage)
/// or S^0_{n phi} (non-magnetic, real storage) on a grid mask.
class OperatorMatrix {
 public:
  OperatorMatrix(OperatorKind kind, double scale, GridDomain grid, Weight weight,
                 std::variant<RealSparse, ComplexSparse> entries);

  OperatorKind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  double h() const noexcept { return grid_.h(); }
  std::size_t dim() const noexcept { return grid_.size(); }
  const GridDomain& grid() const noexcept { return grid_; }
  const Weight& weight() const noexcept { return weight_; }

  bool is_complex() const noexcept { return std::holds_alternative<ComplexSparse>(entries_); }
  const RealSparse& real_entries() const { return std::get<RealSparse>(entries_); }
  const ComplexSparse& complex_entries() const { return std::get<ComplexSparse>(entries_); }
  /// Entries promoted to complex (copies for the real case).
  ComplexSparse as_complex() const;

  Complex entry(std::size_t row, std::size_t col) const;

 private:
  OperatorKind kind_;
  double scale_;
  GridDomain grid_;
  Weight weight_;
  std::variant<RealSparse, ComplexSparse> entries_;
};

/// Discretised weighted form 4 int |u_z|^2 e^{2 n phi~} over int |u|^2 e^{2 n phi~},
/// phi~ = phi - max phi. The mass matrix is lumped and stored as its diagonal.
struct GeneralizedPair {
  ComplexSparse stiffness;
  Eigen::VectorXd mass;
  double phi_shift = 0.0;  ///< max phi over the evaluation points
  double h = 0.0;
};

OperatorMatrix assemble_nonmagnetic(const GridDomain& g, const Weight& w, double n);
OperatorMatrix assemble_magnetic(const GridDomain& g, const Weight& w, double n);

/// Peierls phase n * int_{p->q} A.dl for adjacent grid points p, q (spacing h).
/// Exactly antisymmetric in (p, q).
double link_phase(const Weight& w, Point p, Point q, double n, double h);

/// Sum of link phases counter-clockwise around the unit plaquette with
/// lower-left corner p.
double plaquette_holonomy(const Weight& w, Point p, double n, double h);

GeneralizedPair assemble_weighted_form(const GridDomain& g, const Weight& w, double n);

/// "row col real imag" per line, sorted by (row, col), shortest round-trip decimals.
void write_triplets(std::ostream& out, const OperatorMatrix& s);

}  // namespace maglab
