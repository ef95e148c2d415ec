#pragma once

#include "cgsense/array.hpp"

namespace cgsense::linalg {

// Cholesky factor L (lower) of a Hermitian positive-definite matrix, A = L L^H.
// Returns false (and the failing pivot index) instead of throwing.
bool cholesky(const Array2D<Cx>& a, Array2D<Cx>& lower, index_t& bad_pivot);

// Inverse of a lower-triangular matrix by forward substitution.
Array2D<Cx> invert_lower(const Array2D<Cx>& lower);

// Eigenvalues of a Hermitian matrix via cyclic complex Jacobi rotations.
// Small matrices only (coil counts); used for diagnostics.
std::vector<double> hermitian_eigenvalues(const Array2D<Cx>& a);

Array2D<Cx> matmul(const Array2D<Cx>& a, const Array2D<Cx>& b);
Array2D<Cx> adjoint(const Array2D<Cx>& a);

}  // namespace cgsense::linalg
