#pragma once

#include <cstdint>
#include <string>

#include "lov/unitary.hpp"

namespace lov {

// Triangular circuit parameters. theta(i,j) exists for i,j >= 1 with
// i+j <= n and sits on wires (i+j-1, i+j) (1-based), on the i-th right
// diagonal ("staircase") and (i+j-1)-th beam-splitter row. Each staircase is
// laid out bottom-up: j = n-i first, then descending j. phi(i,j) exists for
// i+j <= n+1: for j >= 2 it sits on wire i+j-1 directly before theta(i,j-1)
// (the splitter's lower-left input), and phi(i,1) is the final phase on
// output wire i.
class TriangleParams {
 public:
  TriangleParams() : n_(0) {}
  explicit TriangleParams(int n);

  int size() const { return n_; }

  bool has_theta(int i, int j) const;
  bool has_phi(int i, int j) const;
  double theta(int i, int j) const;
  double phi(int i, int j) const;
  void set_theta(int i, int j, double v);
  void set_phi(int i, int j, double v);

  int bs_count() const;     // nonzero thetas
  int bs_slots() const;     // n(n-1)/2
  int phase_slots() const;  // n(n+1)/2

  // Snap angles to {0, pi/2} within angle_eps and apply the structural
  // implications: a zero theta wipes the rest of its staircase, theta = pi/2
  // forces its attached phase to zero.
  void enforce(double angle_eps = 1e-9);
  // Throws Error(InvariantViolation) when ranges or implications fail.
  void check(double angle_eps = 1e-9) const;

  bool approx_equal(const TriangleParams& other, double angle_eps) const;

 private:
  int n_;
  std::vector<double> thetas_;
  std::vector<double> phis_;
  std::size_t theta_index(int i, int j) const;
  std::size_t phi_index(int i, int j) const;
};

struct SplitDims {
  int n = 0, n_tilde = 0, m = 0, m_tilde = 0;
  int total_in() const { return n + n_tilde; }
  int total_out() const { return m + m_tilde; }
};

struct TriangleClass {
  enum class Kind { PlainT, Tmn, Trec, NotTriangular };
  Kind kind = Kind::NotTriangular;
  SplitDims split;
  int violated_property = 0;  // 1..4 when NotTriangular
  std::string reason;

  bool is_tmn() const {
    return kind == Kind::Tmn || kind == Kind::Trec || kind == Kind::PlainT;
  }
};

TriangleParams synthesize_triangle(const Matrix& u);
Circuit triangle_to_circuit(const TriangleParams& t);
// Fast single-photon matrix of the triangle (no circuit materialization).
Matrix triangle_matrix(const TriangleParams& t);

TriangleClass classify(const TriangleParams& t, const SplitDims& split);

// Entry (i,j), 1-based, by explicit enumeration of photon paths through the
// staircases; the independent route against triangle_matrix.
Complex path_coefficient(const TriangleParams& t, int i, int j);

struct TrecExtraction {
  Circuit d;               // n -> n
  TriangleParams diamond;  // classifies Trec for diamond_split
  SplitDims diamond_split;
  Circuit d2;  // m -> m
};

// Factor a Tmn triangle as (d2 x id^{m~}) o (id^{n-m~} x diamond) o
// (d x id^{n~}); requires m~ <= n.
TrecExtraction extract_trec(const TriangleParams& t, const SplitDims& split);

// Free-slot mask of the canonical Tmn shape: thetas on (i <= m, j <= n),
// phases on (i <= m, j <= n).
bool tmn_theta_free(const SplitDims& s, int i, int j);
bool tmn_phi_free(const SplitDims& s, int i, int j);

// Peel a Tmn grid from just the upper-left m x n block of its matrix.
TriangleParams synthesize_tmn_block(const Matrix& block,
                                    const SplitDims& split);

// Random instances for tests: angles seeded and placed on the free slots.
TriangleParams random_triangle(int n, std::uint64_t seed);
TriangleParams random_tmn(const SplitDims& split, std::uint64_t seed);

}  // namespace lov
