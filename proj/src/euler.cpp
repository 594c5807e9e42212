#include "lov/euler.hpp"

#include <cmath>

namespace lov {

namespace {

constexpr double kBranchEps = 1e-9;  // acos conditioning near endpoints
constexpr double kSnapEps = 1e-12;

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

void require_unitary(const Matrix& u, int dim) {
  if (u.rows() != dim || u.cols() != dim || !is_unitary(u, 1e-9))
    fail(ErrorKind::NotUnitary, "input matrix is not unitary");
}

Matrix phase_diag(double a, double b) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::exp(Complex(0, a));
  d(1, 1) = std::exp(Complex(0, b));
  return d;
}

const Matrix& hadamard() {
  static const Matrix h = [] {
    Matrix m(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  return h;
}

// diag(1, i, 1); conjugation turns B01/B12 into real zxz / xzx rotations.
const Matrix& p_iy() {
  static const Matrix p = [] {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = Complex(0, 1);
    m(2, 2) = 1.0;
    return m;
  }();
  return p;
}

}  // namespace

double mod_2pi(double x) {
  double y = std::fmod(x, 2.0 * M_PI);
  if (y < 0) y += 2.0 * M_PI;
  if (y > 2.0 * M_PI - kSnapEps) y = 0.0;
  if (std::abs(y) < kSnapEps) y = 0.0;
  return y;
}

Matrix bs_matrix(double theta) {
  Matrix m(2, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  m << Complex(c, 0), Complex(0, s), Complex(0, s), Complex(c, 0);
  return m;
}

Matrix bs3_matrix(int wire, double theta) {
  Matrix m = Matrix::Identity(3, 3);
  const double c = std::cos(theta), s = std::sin(theta);
  m(wire, wire) = c;
  m(wire + 1, wire + 1) = c;
  m(wire, wire + 1) = Complex(0, s);
  m(wire + 1, wire) = Complex(0, s);
  return m;
}

Matrix reconstruct_e2_lhs(const E2Lhs& a) {
  return bs_matrix(a.a1) * phase_diag(a.a0, a.a2) * bs_matrix(a.a3);
}

Matrix reconstruct_e2_rhs(const E2Rhs& b) {
  return phase_diag(b.b0, b.b3) * bs_matrix(b.b2) * phase_diag(0.0, b.b1);
}

Matrix reconstruct_e3_lhs(const E3Lhs& g) {
  return bs3_matrix(0, g.g1) * bs3_matrix(1, g.g2) * bs3_matrix(0, g.g3);
}

Matrix reconstruct_e3_rhs(const E3Rhs& d) {
  return bs3_matrix(1, d.d1) * bs3_matrix(0, d.d2) * bs3_matrix(1, d.d3);
}

Circuit e2_lhs_circuit(const E2Lhs& a) {
  Circuit c = identity_circuit(2);
  c.columns.push_back({{BeamSplitter{0, a.a3}}});
  c.columns.push_back({{PhaseShifter{0, a.a0}, PhaseShifter{1, a.a2}}});
  c.columns.push_back({{BeamSplitter{0, a.a1}}});
  return c;
}

Circuit e2_rhs_circuit(const E2Rhs& b) {
  Circuit c = identity_circuit(2);
  c.columns.push_back({{PhaseShifter{1, b.b1}}});
  c.columns.push_back({{BeamSplitter{0, b.b2}}});
  c.columns.push_back({{PhaseShifter{0, b.b0}, PhaseShifter{1, b.b3}}});
  return c;
}

Circuit e3_lhs_circuit(const E3Lhs& g) {
  Circuit c = identity_circuit(3);
  c.columns.push_back({{BeamSplitter{0, g.g3}}});
  c.columns.push_back({{BeamSplitter{1, g.g2}}});
  c.columns.push_back({{BeamSplitter{0, g.g1}}});
  return c;
}

Circuit e3_rhs_circuit(const E3Rhs& d) {
  Circuit c = identity_circuit(3);
  c.columns.push_back({{BeamSplitter{1, d.d3}}});
  c.columns.push_back({{BeamSplitter{0, d.d2}}});
  c.columns.push_back({{BeamSplitter{1, d.d1}}});
  return c;
}

E2Rhs solve_e2_rhs(const Matrix& u) {
  require_unitary(u, 2);
  E2Rhs b;
  const double a = clamp01(std::abs(u(0, 0)));
  if (a >= 1.0 - kBranchEps) {
    b.b2 = 0.0;
    b.b1 = 0.0;
    b.b0 = std::arg(u(0, 0));
    b.b3 = std::arg(u(1, 1));
  } else if (a <= kBranchEps) {
    b.b2 = M_PI / 2.0;
    b.b1 = 0.0;
    b.b0 = std::arg(u(0, 1)) - M_PI / 2.0;
    b.b3 = std::arg(u(1, 0)) - M_PI / 2.0;
  } else {
    b.b0 = std::arg(u(0, 0));
    b.b1 = std::arg(u(1, 1)) - std::arg(u(1, 0)) + M_PI / 2.0;
    b.b2 = std::acos(a);
    b.b3 = std::arg(u(1, 0)) - M_PI / 2.0;
  }
  b.b0 = mod_2pi(b.b0);
  b.b1 = mod_2pi(b.b1);
  b.b3 = mod_2pi(b.b3);
  return b;
}

namespace {

// Same matrix under: a1 += pi with a0 += pi, a2 += pi (M1); a3 += pi with
// a0 += pi, a2 += pi (M2); and the quarter shift
// (a0,a1,a2,a3) -> (a2, a1 - pi/2, a0, a3 + pi/2) (M3).
E2Lhs canonicalize_e2_lhs(E2Lhs a) {
  a.a1 = mod_2pi(a.a1);
  while (a.a1 >= M_PI - kSnapEps) {
    a.a1 -= M_PI;
    a.a0 += M_PI;
    a.a2 += M_PI;
  }
  if (a.a1 >= M_PI / 2.0 - kSnapEps) {
    const double na1 = a.a1 - M_PI / 2.0;
    const double na3 = a.a3 + M_PI / 2.0;
    std::swap(a.a0, a.a2);
    a.a1 = na1;
    a.a3 = na3;
  }
  a.a3 = mod_2pi(a.a3);
  while (a.a3 >= M_PI - kSnapEps) {
    a.a3 -= M_PI;
    a.a0 += M_PI;
    a.a2 += M_PI;
  }
  a.a0 = mod_2pi(a.a0);
  a.a2 = mod_2pi(a.a2);
  // Pin a1 = 0 when the middle phases commute through the beam splitters.
  if (a.a1 > kSnapEps) {
    const double diff = mod_2pi(a.a0 - a.a2);
    const bool zero_mod_pi = diff < kBranchEps ||
                             std::abs(diff - M_PI) < kBranchEps ||
                             std::abs(diff - 2.0 * M_PI) < kBranchEps;
    if (zero_mod_pi) {
      if (std::abs(diff - M_PI) < kBranchEps)
        a.a3 = a.a3 - a.a1;  // diag(1,-1) flips the first splitter
      else
        a.a3 = a.a3 + a.a1;
      a.a1 = 0.0;
      a.a3 = mod_2pi(a.a3);
      while (a.a3 >= M_PI - kSnapEps) {
        a.a3 -= M_PI;
        a.a0 += M_PI;
        a.a2 += M_PI;
      }
      a.a0 = mod_2pi(a.a0);
      a.a2 = mod_2pi(a.a2);
    }
  }
  if (a.a1 < kSnapEps) a.a1 = 0.0;
  if (a.a3 < kSnapEps) a.a3 = 0.0;
  return a;
}

}  // namespace

E2Lhs solve_e2_lhs(const Matrix& u) {
  require_unitary(u, 2);
  const Matrix up = hadamard() * u * hadamard();
  // u' factors as g * P(-2 a1) * B((a0-a2)/2) * P(-2 a3); read the pieces
  // off its two-axis form.
  const E2Rhs bp = solve_e2_rhs(up);
  E2Lhs a;
  a.a1 = (bp.b0 - bp.b3) / 2.0;
  a.a3 = -bp.b1 / 2.0;
  a.a0 = bp.b0 - a.a1 - a.a3 + bp.b2;
  a.a2 = bp.b0 - a.a1 - a.a3 - bp.b2;
  return canonicalize_e2_lhs(a);
}

std::pair<E3Lhs, E3Rhs> solve_e3(const Matrix& u) {
  if (u.rows() != 3 || u.cols() != 3 || !is_unitary(u, 1e-9))
    fail(ErrorKind::NotRealRotation, "input matrix is not unitary");
  const Matrix rc = p_iy().adjoint() * u * p_iy();
  if (rc.imag().cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorKind::NotRealRotation,
         "matrix is not a beam-splitter rotation (complex residue)");
  const Eigen::Matrix3d r = rc.real();

  // Conjugation maps the upper splitter to R_z(+theta) but the lower one to
  // R_x(-theta); the extracted middle x-angles flip sign on the way back.
  E3Lhs g;
  {
    const double r33 = r(2, 2);
    if (r33 >= 1.0 - kBranchEps) {
      g.g2 = 0.0;
      g.g1 = 0.0;
      g.g3 = std::atan2(r(1, 0), r(0, 0));
    } else if (r33 <= -1.0 + kBranchEps) {
      g.g2 = M_PI;
      g.g1 = 0.0;
      g.g3 = -std::atan2(r(1, 0), r(0, 0));
    } else {
      const double b = std::acos(clamp01(std::abs(r33)) * (r33 < 0 ? -1. : 1.));
      g.g2 = -b;
      g.g3 = std::atan2(r(2, 0), r(2, 1));
      g.g1 = std::atan2(r(0, 2), -r(1, 2));
    }
    g.g1 = mod_2pi(g.g1);
    g.g2 = mod_2pi(g.g2);
    g.g3 = mod_2pi(g.g3);
  }

  E3Rhs d;
  {
    const double r11 = r(0, 0);
    if (r11 >= 1.0 - kBranchEps) {
      d.d2 = 0.0;
      d.d1 = 0.0;
      d.d3 = -std::atan2(r(2, 1), r(2, 2));
    } else if (r11 <= -1.0 + kBranchEps) {
      d.d2 = M_PI;
      d.d1 = 0.0;
      d.d3 = std::atan2(-r(2, 1), r(2, 2));
    } else {
      d.d2 = std::acos(clamp01(std::abs(r11)) * (r11 < 0 ? -1.0 : 1.0));
      d.d3 = -std::atan2(r(0, 2), -r(0, 1));
      d.d1 = -std::atan2(r(2, 0), r(1, 0));
    }
    d.d1 = mod_2pi(d.d1);
    d.d2 = mod_2pi(d.d2);
    d.d3 = mod_2pi(d.d3);
  }
  return {g, d};
}

}  // namespace lov
