#include <doctest.h>

#include "helpers.hpp"
#include "lov/euler.hpp"

using namespace lov;

namespace {

double mat_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool e2_lhs_canonical(const E2Lhs& a) {
  const bool ranges = a.a0 >= 0 && a.a0 < 2 * M_PI && a.a2 >= 0 &&
                      a.a2 < 2 * M_PI && a.a1 >= 0 &&
                      a.a1 < M_PI / 2 + 1e-12 && a.a3 >= 0 &&
                      a.a3 < M_PI + 1e-12;
  double diff = mod_2pi(a.a0 - a.a2);
  const bool degenerate = diff < 1e-9 || std::abs(diff - M_PI) < 1e-9 ||
                          std::abs(diff - 2 * M_PI) < 1e-9;
  return ranges && (!degenerate || a.a1 == 0.0);
}

}  // namespace

TEST_CASE("two-axis solver on the identity and on bare splitters") {
  const E2Rhs b = solve_e2_rhs(Matrix::Identity(2, 2));
  CHECK(b.b0 == 0.0);
  CHECK(b.b1 == 0.0);
  CHECK(b.b2 == 0.0);
  CHECK(b.b3 == 0.0);

  for (double theta : {0.3, 0.9, 1.4}) {
    const E2Rhs s = solve_e2_rhs(bs_matrix(theta));
    CHECK(s.b0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.b1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.b2 == doctest::Approx(theta));
    CHECK(s.b3 == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("two-axis round trips") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Matrix u = random_unitary(2, seed);
    const E2Rhs b = solve_e2_rhs(u);
    CHECK(mat_diff(reconstruct_e2_rhs(b), u) < 1e-12);
    CHECK(b.b2 >= 0.0);
    CHECK(b.b2 <= M_PI / 2 + 1e-12);
    const E2Lhs a = solve_e2_lhs(u);
    CHECK(mat_diff(reconstruct_e2_lhs(a), u) < 1e-12);
    CHECK(e2_lhs_canonical(a));
  }
}

TEST_CASE("two-axis solver on a phase diagonal takes the degenerate branch") {
  for (double phi : {0.4, 1.7, 3.3, 5.6}) {
    Matrix u = Matrix::Identity(2, 2);
    u(1, 1) = std::exp(Complex(0, phi));
    const E2Lhs a = solve_e2_lhs(u);
    CHECK(a.a1 == 0.0);
    CHECK(a.a3 == 0.0);
    CHECK(mat_diff(reconstruct_e2_lhs(a), u) < 1e-12);
  }
}

TEST_CASE("two-axis canonicity: solving a reconstruction returns the angles") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Matrix u = random_unitary(2, seed * 31 + 1);
    const E2Lhs a = solve_e2_lhs(u);
    const E2Lhs a2 = solve_e2_lhs(reconstruct_e2_lhs(a));
    CHECK(std::abs(a.a0 - a2.a0) < 1e-10);
    CHECK(std::abs(a.a1 - a2.a1) < 1e-10);
    CHECK(std::abs(a.a2 - a2.a2) < 1e-10);
    CHECK(std::abs(a.a3 - a2.a3) < 1e-10);
    const E2Rhs b = solve_e2_rhs(u);
    const E2Rhs b2 = solve_e2_rhs(reconstruct_e2_rhs(b));
    CHECK(std::abs(b.b0 - b2.b0) < 1e-10);
    CHECK(std::abs(b.b1 - b2.b1) < 1e-10);
    CHECK(std::abs(b.b2 - b2.b2) < 1e-10);
    CHECK(std::abs(b.b3 - b2.b3) < 1e-10);
  }
}

TEST_CASE("two-axis degenerate neighborhoods stay finite") {
  std::mt19937_64 rng(3);
  auto u01 = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int rep = 0; rep < 100; ++rep) {
    // |u11| within 1e-9 of 1: a diagonal with a tiny off-diagonal leak
    const double eps = 1e-9 * u01();
    const double phi = 2 * M_PI * u01();
    Matrix u(2, 2);
    const double c = std::sqrt(1 - eps * eps);
    u << Complex(c, 0), Complex(0, eps),
        Complex(0, eps) * std::exp(Complex(0, phi)),
        Complex(c, 0) * std::exp(Complex(0, phi));
    const E2Rhs b = solve_e2_rhs(u);
    CHECK(std::isfinite(b.b0));
    CHECK(std::isfinite(b.b1));
    CHECK(mat_diff(reconstruct_e2_rhs(b), u) < 1e-8);
    const E2Lhs a = solve_e2_lhs(u);
    CHECK(mat_diff(reconstruct_e2_lhs(a), u) < 1e-8);
  }
}

TEST_CASE("three-axis solver on the identity") {
  const auto [g, d] = solve_e3(Matrix::Identity(3, 3));
  CHECK(g.g1 == 0.0);
  CHECK(g.g2 == 0.0);
  CHECK(g.g3 == 0.0);
  CHECK(d.d1 == 0.0);
  CHECK(d.d2 == 0.0);
  CHECK(d.d3 == 0.0);
}

TEST_CASE("three-axis degenerate branch pins the first angle") {
  // r33 = 1 exactly: a product of two splitters on the same upper pair
  const Matrix u = bs3_matrix(0, 0.7) * bs3_matrix(0, 0.5);
  const auto [g, d] = solve_e3(u);
  CHECK(g.g2 == 0.0);
  CHECK(g.g1 == 0.0);
  CHECK(g.g3 == doctest::Approx(1.2));
  CHECK(mat_diff(reconstruct_e3_lhs(g), u) < 1e-10);
  CHECK(mat_diff(reconstruct_e3_rhs(d), u) < 1e-10);
}

TEST_CASE("three-axis round trips") {
  std::mt19937_64 rng(17);
  auto u01 = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int rep = 0; rep < 300; ++rep) {
    const Matrix u = bs3_matrix(0, 2 * M_PI * u01()) *
                     bs3_matrix(1, 2 * M_PI * u01()) *
                     bs3_matrix(0, 2 * M_PI * u01());
    const auto [g, d] = solve_e3(u);
    CHECK(mat_diff(reconstruct_e3_lhs(g), u) < 1e-10);
    CHECK(mat_diff(reconstruct_e3_rhs(d), u) < 1e-10);
  }
  // and from the other side
  for (int rep = 0; rep < 300; ++rep) {
    const Matrix u = bs3_matrix(1, 2 * M_PI * u01()) *
                     bs3_matrix(0, 2 * M_PI * u01()) *
                     bs3_matrix(1, 2 * M_PI * u01());
    const auto [g, d] = solve_e3(u);
    CHECK(mat_diff(reconstruct_e3_lhs(g), u) < 1e-10);
    CHECK(mat_diff(reconstruct_e3_rhs(d), u) < 1e-10);
  }
}

TEST_CASE("three-axis rejects a matrix that is not a splitter rotation") {
  Matrix u = Matrix::Identity(3, 3);
  u(0, 0) = std::exp(Complex(0, 0.3));
  CHECK_THROWS_AS(solve_e3(u), Error);
}

TEST_CASE("circuit forms match the reconstruction matrices") {
  const E2Lhs a{0.3, 0.4, 5.1, 2.0};
  CHECK(mat_diff(matrix_of(e2_lhs_circuit(a)), reconstruct_e2_lhs(a)) < 1e-12);
  const E2Rhs b{0.9, 1.2, 0.7, 4.0};
  CHECK(mat_diff(matrix_of(e2_rhs_circuit(b)), reconstruct_e2_rhs(b)) < 1e-12);
  const E3Lhs g{0.5, 1.0, 1.5};
  CHECK(mat_diff(matrix_of(e3_lhs_circuit(g)), reconstruct_e3_lhs(g)) < 1e-12);
  const E3Rhs d{2.5, 3.0, 3.5};
  CHECK(mat_diff(matrix_of(e3_rhs_circuit(d)), reconstruct_e3_rhs(d)) < 1e-12);
}
