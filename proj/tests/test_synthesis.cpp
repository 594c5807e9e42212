#include <doctest.h>

#include "helpers.hpp"
#include "lov/synthesis.hpp"

using namespace lov;

namespace {
double mat_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("one-mode synthesis is a bare phase") {
  Matrix u(1, 1);
  u(0, 0) = std::exp(Complex(0, 1.234));
  const TriangleParams t = synthesize_triangle(u);
  CHECK(t.phi(1, 1) == doctest::Approx(1.234));
  CHECK(mat_diff(triangle_matrix(t), u) < 1e-12);
}

TEST_CASE("two-mode splitter synthesizes to a single grid slot") {
  for (double theta : {0.3, 0.9, 1.5}) {
    const TriangleParams t = synthesize_triangle(bs_matrix(theta));
    CHECK(t.theta(1, 1) == doctest::Approx(theta));
    CHECK(std::abs(t.phi(1, 1)) < 1e-9);
    CHECK(std::abs(t.phi(1, 2)) < 1e-9);
    CHECK(std::abs(t.phi(2, 1)) < 1e-9);
  }
}

TEST_CASE("triangle slot counts") {
  const TriangleParams t = random_triangle(4, 9);
  CHECK(t.bs_slots() == 6);
  CHECK(t.phase_slots() == 10);
  CHECK(t.bs_count() == 6);
}

TEST_CASE("triangle to circuit on the empty grid is the identity") {
  const TriangleParams t(3);
  const Circuit c = triangle_to_circuit(t);
  CHECK(c.columns.empty());
  CHECK(mat_diff(matrix_of(c), Matrix::Identity(3, 3)) < 1e-15);
}

TEST_CASE("triangle circuit and fast matrix agree") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TriangleParams t = random_triangle(2 + int(seed % 5), seed);
    CHECK(mat_diff(matrix_of(triangle_to_circuit(t)), triangle_matrix(t)) <
          1e-12);
  }
}

TEST_CASE("synthesis round trips Haar unitaries") {
  for (int n = 2; n <= 6; ++n)
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Matrix u = random_unitary(n, seed * 977 + std::uint64_t(n));
      const TriangleParams t = synthesize_triangle(u);
      CHECK(mat_diff(triangle_matrix(t), u) < 1e-9);
      t.check();
    }
}

TEST_CASE("synthesis is exact on triangle-generated matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 2 + int(seed % 4);
    const TriangleParams t = random_triangle(n, seed * 13 + 5);
    const TriangleParams back = synthesize_triangle(triangle_matrix(t));
    CHECK(t.approx_equal(back, 1e-10));
  }
}

TEST_CASE("synthesis handles degenerate unitaries") {
  const TriangleParams t1 = synthesize_triangle(Matrix::Identity(4, 4));
  CHECK(t1.bs_count() == 0);
  CHECK(mat_diff(triangle_matrix(t1), Matrix::Identity(4, 4)) < 1e-12);

  const Matrix u = direct_sum(bs_matrix(0.7), Matrix::Identity(2, 2));
  const TriangleParams t2 = synthesize_triangle(u);
  CHECK(mat_diff(triangle_matrix(t2), u) < 1e-10);

  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = Complex(0, 1);
  x(1, 0) = Complex(0, 1);
  const TriangleParams t3 = synthesize_triangle(x);
  CHECK(t3.theta(1, 1) == doctest::Approx(M_PI / 2));
  CHECK(mat_diff(triangle_matrix(t3), x) < 1e-12);
}

TEST_CASE("path coefficients reproduce the matrix entries") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 2 + int(seed % 3);
    const TriangleParams t = random_triangle(n, seed * 31 + 2);
    const Matrix m = triangle_matrix(t);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        CHECK(std::abs(path_coefficient(t, i, j) - m(i - 1, j - 1)) < 1e-10);
  }
  const TriangleParams id(3);
  CHECK(std::abs(path_coefficient(id, 1, 1) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(path_coefficient(id, 1, 2)) < 1e-15);
  CHECK_THROWS_AS(path_coefficient(id, 0, 1), Error);
}

TEST_CASE("the first path product from the uniqueness argument") {
  // t_{1,2} = cos(theta_12) e^{i phi_12} i sin(theta_11) e^{i phi_11}
  TriangleParams t = random_triangle(3, 4);
  const Complex expect = std::cos(t.theta(1, 2)) *
                         std::exp(Complex(0, t.phi(1, 2))) * Complex(0, 1) *
                         std::sin(t.theta(1, 1)) *
                         std::exp(Complex(0, t.phi(1, 1)));
  CHECK(std::abs(path_coefficient(t, 1, 2) - expect) < 1e-12);
}

TEST_CASE("small perturbations of any grid angle move the matrix") {
  const TriangleParams t = random_triangle(4, 77);
  const Matrix base = triangle_matrix(t);
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j <= 4 - i; ++j) {
      TriangleParams p = t;
      p.set_theta(i, j, p.theta(i, j) + 1e-6);
      CHECK(mat_diff(triangle_matrix(p), base) > 1e-8);
    }
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 5 - i; ++j) {
      TriangleParams p = t;
      p.set_phi(i, j, p.phi(i, j) + 1e-6);
      CHECK(mat_diff(triangle_matrix(p), base) > 1e-8);
    }
}

TEST_CASE("classification of plain, Tmn and Trec grids") {
  const TriangleParams t = random_triangle(3, 5);
  const TriangleClass plain = classify(t, SplitDims{3, 0, 3, 0});
  CHECK(plain.kind == TriangleClass::Kind::PlainT);

  const SplitDims split{2, 2, 3, 1};
  const TriangleParams tmn = random_tmn(split, 11);
  const TriangleClass cls = classify(tmn, split);
  CHECK(cls.kind == TriangleClass::Kind::Tmn);

  const SplitDims rec{1, 2, 2, 1};  // m~ == n
  const TriangleParams trec = random_tmn(rec, 12);
  CHECK(classify(trec, rec).kind == TriangleClass::Kind::Trec);

  // a splitter hanging off the ancilla inputs with no shield above it
  TriangleParams bad(4);
  bad.set_theta(3, 1, 0.4);
  const TriangleClass v = classify(bad, split);
  CHECK(v.kind == TriangleClass::Kind::NotTriangular);
  CHECK(v.violated_property >= 2);
}

TEST_CASE("classification is deterministic and total") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const TriangleParams t = random_triangle(4, seed);
    const TriangleClass a = classify(t, SplitDims{2, 2, 2, 2});
    const TriangleClass b = classify(t, SplitDims{2, 2, 2, 2});
    CHECK(a.kind == b.kind);
    CHECK(a.violated_property == b.violated_property);
  }
}

TEST_CASE("a Tmn grid is recoverable from its upper-left block") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const SplitDims split{2, 2, 3, 1};
    const TriangleParams t = random_tmn(split, seed * 7 + 3);
    REQUIRE(classify(t, split).is_tmn());
    const Matrix u = triangle_matrix(t);
    const TriangleParams back =
        synthesize_tmn_block(u.topLeftCorner(split.m, split.n), split);
    CHECK(t.approx_equal(back, 1e-9));
  }
}

TEST_CASE("Trec extraction factorizes a Tmn circuit") {
  const SplitDims split{2, 2, 3, 1};
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const TriangleParams t = random_tmn(split, seed * 101 + 17);
    REQUIRE(classify(t, split).is_tmn());
    const TrecExtraction ex = extract_trec(t, split);
    const Matrix u = triangle_matrix(t);
    const Matrix rebuilt =
        direct_sum(matrix_of(ex.d2),
                   Matrix::Identity(split.m_tilde, split.m_tilde)) *
        direct_sum(Matrix::Identity(split.n - split.m_tilde,
                                    split.n - split.m_tilde),
                   triangle_matrix(ex.diamond)) *
        direct_sum(matrix_of(ex.d),
                   Matrix::Identity(split.n_tilde, split.n_tilde));
    CHECK(mat_diff(rebuilt, u) < 1e-8);
    CHECK(classify(ex.diamond, ex.diamond_split).kind ==
          TriangleClass::Kind::Trec);
  }
}

TEST_CASE("Trec extraction degenerate corners") {
  // n~ = 0: the diamond spans only the detector block
  const SplitDims split{3, 0, 2, 1};
  const TriangleParams t = random_tmn(split, 5);
  REQUIRE(classify(t, split).is_tmn());
  const TrecExtraction ex = extract_trec(t, split);
  CHECK(ex.diamond_split.n_tilde == 0);

  // already Trec with zero identity prefix: the diamond keeps the splitter
  // angles, phases may migrate into the outer circuits
  const SplitDims rec{1, 2, 2, 1};
  const TriangleParams trec = random_tmn(rec, 6);
  REQUIRE(classify(trec, rec).kind == TriangleClass::Kind::Trec);
  const TrecExtraction ex2 = extract_trec(trec, rec);
  CHECK(classify(ex2.diamond, ex2.diamond_split).kind ==
        TriangleClass::Kind::Trec);
  for (int i = 1; i < 3; ++i)
    for (int j = 1; j <= 3 - i; ++j)
      CHECK(std::abs(ex2.diamond.theta(i, j) - trec.theta(i, j)) < 1e-8);
}
