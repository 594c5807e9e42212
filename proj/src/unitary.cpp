#include "lov/unitary.hpp"

#include <cmath>
#include <random>

namespace lov {

double unitarity_defect(const Matrix& m) {
  const Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

bool is_unitary(const Matrix& m, double tol) {
  return m.rows() == m.cols() && unitarity_defect(m) < tol;
}

Matrix matrix_of(const Circuit& c) {
  if (!c.is_lopp())
    fail(ErrorKind::NotLOpp,
         "single-photon semantics requires a circuit without sources or "
         "detectors");
  require_valid(c);
  const int n = c.n_in;
  Matrix acc = Matrix::Identity(n, n);
  for (const auto& col : c.columns) {
    Matrix m = Matrix::Identity(n, n);
    for (const auto& g : col.gens) {
      if (const auto* ps = std::get_if<PhaseShifter>(&g)) {
        m(ps->wire, ps->wire) = std::exp(Complex(0.0, ps->phi.value));
      } else if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
        const double co = std::cos(bs->theta.value);
        const double si = std::sin(bs->theta.value);
        const int w = bs->wire;
        m(w, w) = co;
        m(w + 1, w + 1) = co;
        m(w, w + 1) = Complex(0.0, si);
        m(w + 1, w) = Complex(0.0, si);
      } else if (const auto* sw = std::get_if<Swap>(&g)) {
        const int w = sw->wire;
        m(w, w) = 0.0;
        m(w + 1, w + 1) = 0.0;
        m(w, w + 1) = 1.0;
        m(w + 1, w) = 1.0;
      }
    }
    acc = m * acc;
  }
  return acc;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::DimMismatch, "matrix dimensions do not match");
  return a * b;
}

namespace {
// Platform-independent standard normals: 53-bit uniforms + Box-Muller.
class NormalGen {
 public:
  explicit NormalGen(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    return double(rng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};
}  // namespace

Matrix random_unitary(int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::BadInput, "unitary dimension must be positive");
  NormalGen gen(seed);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex(gen.normal(), gen.normal());
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : Complex(1.0, 0.0));
  }
  return q;
}

}  // namespace lov
