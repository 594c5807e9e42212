#pragma once

#include <utility>

#include "lov/unitary.hpp"

namespace lov {

// Angle sets for the two-axis and three-axis rotation identities. The
// reconstruction conventions, as matrix products:
//   lhs2: B(a1) * diag(e^{i a0}, e^{i a2}) * B(a3)
//   rhs2: diag(e^{i b0}, e^{i b3}) * B(b2) * diag(1, e^{i b1})
//   lhs3: B01(g1) * B12(g2) * B01(g3)
//   rhs3: B12(d1) * B01(d2) * B12(d3)
// where B(t) = [[cos t, i sin t], [i sin t, cos t]] and Bjk acts on wires
// (j, k) of three.

struct E2Lhs {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
};
struct E2Rhs {
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
};
struct E3Lhs {
  double g1 = 0, g2 = 0, g3 = 0;
};
struct E3Rhs {
  double d1 = 0, d2 = 0, d3 = 0;
};

// Canonical ranges: a0,a2,b0,b1,b3 in [0,2pi), a1 in [0,pi/2), a3 in [0,pi),
// b2 in [0,pi/2]; a1 = 0 whenever a0 - a2 = 0 mod pi, b1 = 0 whenever
// b2 is 0 or pi/2. All e3 angles in [0,2pi) with the first angle of a
// degenerate branch pinned to 0.
E2Rhs solve_e2_rhs(const Matrix& u);
E2Lhs solve_e2_lhs(const Matrix& u);
std::pair<E3Lhs, E3Rhs> solve_e3(const Matrix& u);

Matrix reconstruct_e2_lhs(const E2Lhs& a);
Matrix reconstruct_e2_rhs(const E2Rhs& b);
Matrix reconstruct_e3_lhs(const E3Lhs& g);
Matrix reconstruct_e3_rhs(const E3Rhs& d);

// The same forms as two- and three-mode circuits (for the axiom suite).
Circuit e2_lhs_circuit(const E2Lhs& a);
Circuit e2_rhs_circuit(const E2Rhs& b);
Circuit e3_lhs_circuit(const E3Lhs& g);
Circuit e3_rhs_circuit(const E3Rhs& d);

double mod_2pi(double x);  // into [0,2pi), snapping within 1e-12 of 2pi to 0

Matrix bs_matrix(double theta);
Matrix bs3_matrix(int wire, double theta);

}  // namespace lov
