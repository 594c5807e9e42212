#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lov/circuit.hpp"

namespace lov {

using Matrix = Eigen::MatrixXcd;

// Largest |entry| of M^dagger M - I.
double unitarity_defect(const Matrix& m);
bool is_unitary(const Matrix& m, double tol = 1e-9);

// Single-photon semantics. Column j holds the image of input wire j, so
// composing circuits left to right multiplies matrices right to left:
// matrix_of(c1 then c2) == matrix_of(c2) * matrix_of(c1).
Matrix matrix_of(const Circuit& c);

Matrix direct_sum(const Matrix& a, const Matrix& b);
Matrix multiply(const Matrix& a, const Matrix& b);

// Haar-distributed unitary, deterministic per seed across platforms.
Matrix random_unitary(int n, std::uint64_t seed);

}  // namespace lov
