#include "lov/synthesis.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "lov/euler.hpp"

namespace lov {

namespace {
constexpr double kZeroEps = 1e-9;

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

std::mt19937_64 seeded(std::uint64_t seed) { return std::mt19937_64(seed); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = double(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}
}  // namespace

TriangleParams::TriangleParams(int n) : n_(n) {
  if (n < 0) fail(ErrorKind::BadInput, "negative triangle size");
  thetas_.assign(std::size_t(n * (n - 1) / 2), 0.0);
  phis_.assign(std::size_t(n * (n + 1) / 2), 0.0);
}

bool TriangleParams::has_theta(int i, int j) const {
  return i >= 1 && j >= 1 && i + j <= n_;
}

bool TriangleParams::has_phi(int i, int j) const {
  return i >= 1 && j >= 1 && i + j <= n_ + 1;
}

std::size_t TriangleParams::theta_index(int i, int j) const {
  if (!has_theta(i, j)) fail(ErrorKind::BadIndex, "theta index out of range");
  // Row-major over staircases: staircase i holds n-i slots.
  const int off = (i - 1) * n_ - (i - 1) * i / 2;
  return std::size_t(off + (j - 1));
}

std::size_t TriangleParams::phi_index(int i, int j) const {
  if (!has_phi(i, j)) fail(ErrorKind::BadIndex, "phi index out of range");
  const int off = (i - 1) * (n_ + 1) - (i - 1) * i / 2;
  return std::size_t(off + (j - 1));
}

double TriangleParams::theta(int i, int j) const {
  return thetas_[theta_index(i, j)];
}
double TriangleParams::phi(int i, int j) const { return phis_[phi_index(i, j)]; }
void TriangleParams::set_theta(int i, int j, double v) {
  thetas_[theta_index(i, j)] = v;
}
void TriangleParams::set_phi(int i, int j, double v) {
  phis_[phi_index(i, j)] = v;
}

int TriangleParams::bs_count() const {
  int c = 0;
  for (double t : thetas_)
    if (std::abs(t) > kZeroEps) ++c;
  return c;
}

int TriangleParams::bs_slots() const { return n_ * (n_ - 1) / 2; }
int TriangleParams::phase_slots() const { return n_ * (n_ + 1) / 2; }

void TriangleParams::enforce(double angle_eps) {
  for (int i = 1; i < n_; ++i) {
    bool dead = false;
    for (int j = 1; j <= n_ - i; ++j) {
      double& th = thetas_[theta_index(i, j)];
      th = mod_2pi(th);
      if (std::abs(th) < angle_eps) th = 0.0;
      if (std::abs(th - M_PI / 2) < angle_eps) {
        th = M_PI / 2;
        phis_[phi_index(i, j)] = 0.0;
      }
      if (dead) {
        th = 0.0;
        phis_[phi_index(i, j)] = 0.0;
      } else if (th == 0.0) {
        dead = true;  // wipes strictly later slots of this staircase
      }
    }
    if (dead) phis_[phi_index(i, n_ + 1 - i)] = 0.0;
  }
  for (double& p : phis_) {
    p = mod_2pi(p);
    if (std::abs(p) < angle_eps) p = 0.0;
  }
}

void TriangleParams::check(double angle_eps) const {
  for (int i = 1; i <= n_; ++i)
    for (int j = 1; j <= n_ + 1 - i; ++j) {
      const double p = phis_[phi_index(i, j)];
      if (p < -angle_eps || p >= 2 * M_PI + angle_eps)
        fail(ErrorKind::InvariantViolation, "phi out of [0,2pi)");
    }
  for (int i = 1; i < n_; ++i) {
    bool dead = false;
    for (int j = 1; j <= n_ - i; ++j) {
      const double th = thetas_[theta_index(i, j)];
      if (th < -angle_eps || th > M_PI / 2 + angle_eps)
        fail(ErrorKind::InvariantViolation, "theta out of [0,pi/2]");
      if (std::abs(th - M_PI / 2) < angle_eps &&
          std::abs(phis_[phi_index(i, j)]) > angle_eps)
        fail(ErrorKind::InvariantViolation,
             "theta = pi/2 requires its attached phase to vanish");
      if (dead && (std::abs(th) > angle_eps ||
                   std::abs(phis_[phi_index(i, j)]) > angle_eps))
        fail(ErrorKind::InvariantViolation,
             "zero theta must wipe the rest of its staircase");
      if (std::abs(th) <= angle_eps) dead = true;
    }
    if (dead && std::abs(phis_[phi_index(i, n_ + 1 - i)]) > angle_eps)
      fail(ErrorKind::InvariantViolation,
           "zero theta must wipe the staircase's leading phase");
  }
}

bool TriangleParams::approx_equal(const TriangleParams& other,
                                  double angle_eps) const {
  if (other.n_ != n_) return false;
  for (std::size_t k = 0; k < thetas_.size(); ++k)
    if (std::abs(thetas_[k] - other.thetas_[k]) > angle_eps) return false;
  for (std::size_t k = 0; k < phis_.size(); ++k) {
    double d = std::abs(phis_[k] - other.phis_[k]);
    d = std::min(d, std::abs(d - 2 * M_PI));
    if (d > angle_eps) return false;
  }
  return true;
}

namespace {

struct FlatGen {
  bool is_bs;
  int wire;  // 0-based top wire for bs, the wire itself for ps
  double angle;
};

// Generators in circuit order; zero angles are skipped.
std::vector<FlatGen> flatten_triangle(const TriangleParams& t) {
  std::vector<FlatGen> gens;
  const int n = t.size();
  for (int i = 1; i < n; ++i)
    for (int j = n - i; j >= 1; --j) {
      const double p = t.phi(i, j + 1);
      if (p != 0.0) gens.push_back({false, i + j - 1, p});
      const double th = t.theta(i, j);
      if (th != 0.0) gens.push_back({true, i + j - 2, th});
    }
  for (int i = 1; i <= n; ++i) {
    const double p = t.phi(i, 1);
    if (p != 0.0) gens.push_back({false, i - 1, p});
  }
  return gens;
}

}  // namespace

Matrix triangle_matrix(const TriangleParams& t) {
  const int n = t.size();
  Matrix acc = Matrix::Identity(n, n);
  for (const FlatGen& g : flatten_triangle(t)) {
    if (g.is_bs) {
      const Complex c(std::cos(g.angle), 0.0), is(0.0, std::sin(g.angle));
      const Eigen::RowVectorXcd top = acc.row(g.wire);
      acc.row(g.wire) = c * top + is * acc.row(g.wire + 1);
      acc.row(g.wire + 1) = is * top + c * acc.row(g.wire + 1);
    } else {
      acc.row(g.wire) *= std::exp(Complex(0.0, g.angle));
    }
  }
  return acc;
}

Circuit triangle_to_circuit(const TriangleParams& t) {
  t.check();
  const int n = t.size();
  Circuit c = identity_circuit(n);
  for (int i = 1; i < n; ++i)
    for (int j = n - i; j >= 1; --j) {
      const double p = t.phi(i, j + 1);
      if (p != 0.0) c.columns.push_back({{PhaseShifter{i + j - 1, p}}});
      const double th = t.theta(i, j);
      if (th != 0.0) c.columns.push_back({{BeamSplitter{i + j - 2, th}}});
    }
  Column out_phases;
  for (int i = 1; i <= n; ++i) {
    const double p = t.phi(i, 1);
    if (p != 0.0) out_phases.gens.push_back(PhaseShifter{i - 1, p});
  }
  if (!out_phases.gens.empty()) c.columns.push_back(std::move(out_phases));
  return c;
}

namespace {

// Peel angles entry by entry: each probe-pair isolates the affine
// dependence of one matrix entry on e^{i phi(i,j)} cos theta(i,j).
TriangleParams peel(int n, const std::function<Complex(int, int)>& entry,
                    int max_col,
                    const std::function<bool(int, int)>& slot_free) {
  TriangleParams t(n);
  constexpr double kQEps = 1e-10;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n + 1 - i; ++j) {
      if (!slot_free(i, j)) continue;
      const bool has_th = i + j <= n;
      bool broken = false;
      for (int l = 1; l < j; ++l)
        if (t.has_theta(i, l) && t.theta(i, l) == 0.0 && slot_free(i, l))
          broken = true;
      if (broken) continue;  // slots stay zero
      for (int jj = j; jj <= max_col; ++jj) {
        Complex q, r;
        if (has_th) {
          // entry = q * e^{i phi} cos(theta) + r
          t.set_theta(i, j, 0.0);
          t.set_phi(i, j, 0.0);
          const Complex e0 = triangle_matrix(t)(i - 1, jj - 1);
          t.set_theta(i, j, M_PI / 2);
          const Complex e1 = triangle_matrix(t)(i - 1, jj - 1);
          t.set_theta(i, j, 0.0);
          q = e0 - e1;
          r = e1;
        } else {
          // entry = q * e^{i phi} + r
          t.set_phi(i, j, 0.0);
          const Complex ea = triangle_matrix(t)(i - 1, jj - 1);
          t.set_phi(i, j, M_PI);
          const Complex eb = triangle_matrix(t)(i - 1, jj - 1);
          t.set_phi(i, j, 0.0);
          q = 0.5 * (ea - eb);
          r = 0.5 * (ea + eb);
        }
        if (std::abs(q) <= kQEps) continue;
        const Complex z = (entry(i, jj) - r) / q;
        const double az = std::abs(z);
        // |z| far above one means the coupling was numerical noise.
        if (az > 1.0 + 1e-6) continue;
        if (has_th) {
          // Snap on |z| before acos; the arc cosine loses half the digits
          // near its endpoints.
          if (az >= 1.0 - kZeroEps) {
            t.set_theta(i, j, 0.0);
            t.set_phi(i, j, mod_2pi(std::arg(z)));
          } else if (az <= kZeroEps) {
            t.set_theta(i, j, M_PI / 2);
            t.set_phi(i, j, 0.0);
          } else {
            t.set_theta(i, j, std::acos(clamp01(az)));
            t.set_phi(i, j, mod_2pi(std::arg(z)));
          }
        } else {
          t.set_phi(i, j, az > kZeroEps ? mod_2pi(std::arg(z)) : 0.0);
        }
        break;
      }
    }
  }
  t.enforce();
  return t;
}

}  // namespace

TriangleParams synthesize_triangle(const Matrix& u) {
  const int n = int(u.rows());
  if (n < 1) fail(ErrorKind::BadInput, "empty unitary");
  if (!is_unitary(u, 1e-9))
    fail(ErrorKind::NotUnitary, "synthesis input is not unitary");
  TriangleParams t =
      peel(n, [&](int i, int j) { return u(i - 1, j - 1); }, n,
           [](int, int) { return true; });
  const double defect = (triangle_matrix(t) - u).cwiseAbs().maxCoeff();
  if (defect > 1e-7)
    fail(ErrorKind::Internal,
         "triangle synthesis failed to reproduce the matrix (defect " +
             std::to_string(defect) + ")");
  return t;
}

bool tmn_theta_free(const SplitDims& s, int i, int j) {
  return i <= s.m && j <= s.n;
}

bool tmn_phi_free(const SplitDims& s, int i, int j) {
  return i <= s.m && j <= s.n;
}

TriangleParams synthesize_tmn_block(const Matrix& block,
                                    const SplitDims& split) {
  if (block.rows() != split.m || block.cols() != split.n)
    fail(ErrorKind::BadInput, "block dimensions do not match the split");
  const int n = split.total_in();
  if (split.total_out() != n)
    fail(ErrorKind::BadInput, "split is not square");
  return peel(
      n, [&](int i, int j) { return block(i - 1, j - 1); }, split.n,
      [&](int i, int j) {
        return (i + j <= n) ? tmn_theta_free(split, i, j)
                            : tmn_phi_free(split, i, j);
      });
}

namespace {

bool shield_before(const TriangleParams& t, int row, int k_lo, int k_hi) {
  // Nonzero theta at row-1 with staircase index in [k_lo, k_hi].
  for (int k = std::max(1, k_lo); k <= k_hi; ++k) {
    const int l = row - k;  // k + l - 1 == row - 1
    if (t.has_theta(k, l) && std::abs(t.theta(k, l)) > kZeroEps) return true;
  }
  return false;
}

}  // namespace

TriangleClass classify(const TriangleParams& t, const SplitDims& split) {
  if (split.total_in() != t.size() || split.total_out() != t.size())
    fail(ErrorKind::BadInput, "split does not match the triangle size");
  TriangleClass out;
  out.split = split;
  try {
    t.check();
  } catch (const Error& e) {
    out.kind = TriangleClass::Kind::NotTriangular;
    out.violated_property = 1;
    out.reason = e.what();
    return out;
  }
  const int N = t.size();
  // Property 2: nothing hangs fully and directly off the last n~ inputs.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N + 1 - i; ++j) {
      const int row = i + j - 1;
      if (row <= split.n) continue;
      const bool theta_nz =
          t.has_theta(i, j) && std::abs(t.theta(i, j)) > kZeroEps;
      const bool phi_nz = std::abs(t.phi(i, j)) > kZeroEps;
      if (!theta_nz && !phi_nz) continue;
      if (!shield_before(t, row, 1, std::min(i - 1, row - 1))) {
        out.kind = TriangleClass::Kind::NotTriangular;
        out.violated_property = 2;
        out.reason = "generator (" + std::to_string(i) + "," +
                     std::to_string(j) + ") directly connected to the " +
                     std::to_string(split.n_tilde) + " last inputs";
        return out;
      }
    }
  // Property 3: dual condition on the last m~ outputs.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N + 1 - i; ++j) {
      const int row = i + j - 1;
      if (row <= split.m) continue;
      const bool theta_nz =
          t.has_theta(i, j) && std::abs(t.theta(i, j)) > kZeroEps;
      const bool phi_nz = std::abs(t.phi(i, j)) > kZeroEps;
      if (!theta_nz && !phi_nz) continue;
      if (!shield_before(t, row, i, row - 1)) {
        out.kind = TriangleClass::Kind::NotTriangular;
        out.violated_property = 3;
        out.reason = "generator (" + std::to_string(i) + "," +
                     std::to_string(j) + ") directly connected to the " +
                     std::to_string(split.m_tilde) + " last outputs";
        return out;
      }
    }
  // Property 4: a nonzero splitter in each of the last max(n~, m~) rows.
  const int last = std::max(split.n_tilde, split.m_tilde);
  for (int row = N - last; row <= N - 1 && row >= 1 && last > 0; ++row) {
    bool found = false;
    for (int k = 1; k <= row; ++k) {
      const int l = row + 1 - k;
      if (t.has_theta(k, l) && std::abs(t.theta(k, l)) > kZeroEps)
        found = true;
    }
    if (!found) {
      out.kind = TriangleClass::Kind::NotTriangular;
      out.violated_property = 4;
      out.reason = "row " + std::to_string(row) + " has no beam splitter";
      return out;
    }
  }
  // Shape companion of properties 3-4 (the necessarily-zero slots): at most
  // m~ + (N-1-r) staircases may end on row r once r reaches n, or the
  // circuit cannot shed its tail into a d2 / diamond / d factorization.
  {
    std::vector<int> ends(std::size_t(N) + 1, 0);
    for (int i = 1; i < N; ++i) {
      int extent = 0;
      for (int j = 1; j <= N - i; ++j)
        if (std::abs(t.theta(i, j)) > kZeroEps) extent = j;
      if (extent > 0) ends[std::size_t(i + extent - 1)] += 1;
    }
    for (int r = std::max(1, split.n); r <= N - 1; ++r) {
      if (ends[std::size_t(r)] > split.m_tilde + (N - 1 - r)) {
        out.kind = TriangleClass::Kind::NotTriangular;
        out.violated_property = 4;
        out.reason = "row " + std::to_string(r) +
                     " terminates too many splitter diagonals";
        return out;
      }
    }
  }
  if (split.n_tilde == 0 && split.m_tilde == 0)
    out.kind = TriangleClass::Kind::PlainT;
  else if (split.m_tilde == split.n)
    out.kind = TriangleClass::Kind::Trec;
  else
    out.kind = TriangleClass::Kind::Tmn;
  return out;
}

Complex path_coefficient(const TriangleParams& t, int i, int j) {
  const int n = t.size();
  if (i < 1 || i > n || j < 1 || j > n)
    fail(ErrorKind::BadIndex, "entry index out of range");
  const auto gens = flatten_triangle(t);
  Complex total{0.0, 0.0};
  // Walk every photon path from input wire j to output wire i, multiplying
  // stay/cross splitter factors and crossed phases.
  std::function<void(std::size_t, int, Complex)> rec =
      [&](std::size_t idx, int wire, Complex amp) {
        if (std::abs(amp) == 0.0) return;
        if (idx == gens.size()) {
          if (wire == i - 1) total += amp;
          return;
        }
        const FlatGen& g = gens[idx];
        if (!g.is_bs) {
          rec(idx + 1, wire,
              wire == g.wire ? amp * std::exp(Complex(0.0, g.angle)) : amp);
          return;
        }
        if (wire == g.wire) {
          rec(idx + 1, wire, amp * std::cos(g.angle));
          rec(idx + 1, wire + 1, amp * Complex(0.0, std::sin(g.angle)));
        } else if (wire == g.wire + 1) {
          rec(idx + 1, wire, amp * std::cos(g.angle));
          rec(idx + 1, wire - 1, amp * Complex(0.0, std::sin(g.angle)));
        } else {
          rec(idx + 1, wire, amp);
        }
      };
  rec(0, j - 1, Complex(1.0, 0.0));
  return total;
}

namespace {

Matrix flip_matrix(Eigen::Index k) {
  Matrix j = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) j(i, k - 1 - i) = 1.0;
  return j;
}

// A = Q * L with L lower triangular (QR of the doubly flipped matrix).
void ql_decompose(const Matrix& a, Matrix& q, Matrix& l) {
  const Matrix j = flip_matrix(a.rows());
  Eigen::HouseholderQR<Matrix> qr(j * a * j);
  const Matrix qq = qr.householderQ();
  const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  q = j * qq * j;
  l = j * rr * j;
}

// A = R * Q with R upper triangular (from the QR of the adjoint of the
// doubly flipped matrix).
void rq_decompose(const Matrix& a, Matrix& r, Matrix& q) {
  const Matrix j = flip_matrix(a.rows());
  const Matrix m = j * a * j;  // want m = L * Q'
  Eigen::HouseholderQR<Matrix> qr(m.adjoint());
  const Matrix qx = qr.householderQ();
  const Matrix rx = qr.matrixQR().triangularView<Eigen::Upper>();
  const Matrix l = rx.adjoint();
  const Matrix qp = qx.adjoint();
  r = j * l * j;
  q = j * qp * j;
}

}  // namespace

TrecExtraction extract_trec(const TriangleParams& t, const SplitDims& split) {
  const TriangleClass cls = classify(t, split);
  if (!cls.is_tmn())
    fail(ErrorKind::NotTmn, "triangle does not classify as Tmn: " + cls.reason);
  if (split.m_tilde > split.n)
    fail(ErrorKind::NotTmn,
         "extraction needs m~ <= n (identity prefix would be negative)");
  const int N = t.size();
  const int n = split.n, m = split.m, nt = split.n_tilde, mt = split.m_tilde;
  const int k = n - mt;
  const Matrix u = triangle_matrix(t);

  TrecExtraction out;
  out.diamond_split = SplitDims{mt, nt, nt, mt};

  // Kernel of the last m~ rows restricted to the first n inputs gives the
  // directions that bypass the diamond entirely.
  Matrix bmat = Matrix::Identity(n, n);
  Matrix amat = Matrix::Identity(m, m);
  if (k > 0) {
    const Matrix x = u.block(m, 0, mt, n);
    Eigen::FullPivLU<Matrix> lu(x);
    lu.setThreshold(1e-9);
    const Matrix null_space = lu.kernel();
    if (null_space.cols() < k)
      fail(ErrorKind::Internal, "unexpected kernel dimension in extraction");
    // Unitary whose first k columns span the kernel.
    Eigen::HouseholderQR<Matrix> qr(null_space.leftCols(k));
    const Matrix bdag = qr.householderQ();
    bmat = bdag.adjoint();
    Matrix a0(m, k);
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXcd in = Eigen::VectorXcd::Zero(N);
      in.head(n) = bdag.col(c);
      a0.col(c) = (u * in).head(m);  // last m~ entries vanish by construction
    }
    Eigen::HouseholderQR<Matrix> qra(a0);
    amat = qra.householderQ();
  }

  Matrix w = direct_sum(amat, Matrix::Identity(mt, mt)).adjoint() * u *
             direct_sum(bmat, Matrix::Identity(nt, nt)).adjoint();
  if (k > 0) {
    // The top-left k x k corner is unitary; fold it into A so the block
    // for the diamond is exactly the identity complement.
    const Matrix rblk = w.topLeftCorner(k, k);
    amat = amat * direct_sum(rblk, Matrix::Identity(m - k, m - k));
    w = direct_sum(rblk, Matrix::Identity(N - k, N - k)).adjoint() * w;
  }
  Matrix v = w.block(k, k, N - k, N - k);

  // Residual gauges: rows of the real outputs mix through the left factor,
  // columns of the real inputs through the right one. A Trec matrix has a
  // lower-triangular real-out x ancilla-in block, an upper-triangular
  // ancilla-out x real-in block, and i^{n~}-phased diagonal entries there
  // (the all-transmit paths), which pins both gauges.
  if (nt > 0 && mt > 0) {
    Matrix p, l;
    ql_decompose(v.block(0, mt, nt, nt), p, l);
    v = direct_sum(p, Matrix::Identity(mt, mt)).adjoint() * v;
    Matrix corr = Matrix::Identity(m, m);
    corr.block(k, k, nt, nt) = p;
    amat = amat * corr;

    Matrix r, q;
    rq_decompose(v.block(nt, 0, mt, mt), r, q);
    Matrix g = q.adjoint();
    v = v * direct_sum(g, Matrix::Identity(nt, nt));
    // Pin the column phases: the diagonal of the block carries the
    // all-transmit amplitude i^{n~} * positive.
    Matrix diag_fix = Matrix::Identity(mt, mt);
    for (int b = 0; b < mt; ++b) {
      const Complex entry = v(nt + b, b);
      if (std::abs(entry) > 1e-12) {
        const Complex want = std::exp(Complex(0, nt * M_PI / 2));
        diag_fix(b, b) = want * std::abs(entry) / entry;
      }
    }
    v = v * direct_sum(diag_fix, Matrix::Identity(nt, nt));
    g = g * diag_fix;
    Matrix corrb = Matrix::Identity(n, n);
    corrb.block(k, k, mt, mt) = g.adjoint();
    bmat = corrb * bmat;
  }

  out.diamond = synthesize_triangle(v);
  out.d = triangle_to_circuit(synthesize_triangle(bmat));
  out.d2 = triangle_to_circuit(synthesize_triangle(amat));

  const Matrix rebuilt =
      direct_sum(amat, Matrix::Identity(mt, mt)) *
      direct_sum(Matrix::Identity(k, k), triangle_matrix(out.diamond)) *
      direct_sum(bmat, Matrix::Identity(nt, nt));
  if ((rebuilt - u).cwiseAbs().maxCoeff() > 1e-8)
    fail(ErrorKind::Internal, "Trec factorization does not reproduce the map");
  return out;
}

TriangleParams random_triangle(int n, std::uint64_t seed) {
  auto rng = seeded(seed);
  TriangleParams t(n);
  for (int i = 1; i < n; ++i)
    for (int j = 1; j <= n - i; ++j)
      t.set_theta(i, j, uniform(rng, 0.05, M_PI / 2 - 0.05));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n + 1 - i; ++j)
      t.set_phi(i, j, uniform(rng, 0.0, 2 * M_PI - 0.05));
  return t;
}

TriangleParams random_tmn(const SplitDims& split, std::uint64_t seed) {
  const int N = split.total_in();
  if (split.total_out() != N)
    fail(ErrorKind::BadInput, "split is not square");
  auto rng = seeded(seed);
  TriangleParams t(N);
  // Canonical dense shape: leading staircases run as wide as the rectangle
  // and the row-termination budget allow.
  const int stairs =
      std::min(split.m, split.m_tilde + std::max(N - split.n, 1) - 1);
  for (int i = 1; i <= stairs; ++i)
    for (int j = 1; j <= std::min(split.n, N - i); ++j)
      t.set_theta(i, j, uniform(rng, 0.05, M_PI / 2 - 0.05));
  {
    const TriangleClass c = classify(t, split);
    if (!c.is_tmn())
      fail(ErrorKind::BadInput,
           "no canonical Tmn shape for this split: " + c.reason);
  }
  // Grant every phase slot the classification tolerates.
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N + 1 - i; ++j) {
      const double v = uniform(rng, 0.05, 2 * M_PI - 0.05);
      t.set_phi(i, j, v);
      bool ok = true;
      try {
        t.check();
      } catch (const Error&) {
        ok = false;
      }
      if (ok && !classify(t, split).is_tmn()) ok = false;
      if (!ok) t.set_phi(i, j, 0.0);
    }
  return t;
}

}  // namespace lov
