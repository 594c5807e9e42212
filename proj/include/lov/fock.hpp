#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lov/errors.hpp"

namespace lov {

using Complex = std::complex<double>;

// Occupation-number basis label: one photon count per mode.
using OccVec = std::vector<int>;

struct Circuit;  // circuit.hpp

struct EvalConfig {
  double prune_eps = 1e-12;
  std::optional<int> max_photons;
};

inline int total_photons(const OccVec& v) {
  int t = 0;
  for (int k : v) t += k;
  return t;
}

// Finite-support state over a fixed number of modes. modes == 0 is a scalar
// (single term keyed by the empty occupation vector). Terms are kept in
// lexicographic key order; amplitudes below prune_eps are dropped.
class FockVector {
 public:
  FockVector() : modes_(0) {}
  explicit FockVector(int modes) : modes_(modes) {}

  static FockVector basis(const OccVec& occ);
  static FockVector scalar(Complex z);
  static FockVector vacuum(int modes);

  int modes() const { return modes_; }
  bool is_zero() const { return amps_.empty(); }
  std::size_t term_count() const { return amps_.size(); }

  Complex amplitude(const OccVec& occ) const;
  void add_term(const OccVec& occ, Complex amp);
  void set_term(const OccVec& occ, Complex amp);

  const std::map<OccVec, Complex>& terms() const { return amps_; }

  void prune(double eps = 1e-12);
  double norm() const;
  FockVector scaled(Complex z) const;
  FockVector plus(const FockVector& other) const;

  int max_total_photons() const;

  // Text form used by the DSL and CLI: `{ n1,...,nk: a+bi ; ... }`.
  std::string to_text() const;

  bool approx_equal(const FockVector& other, double eps) const;

 private:
  int modes_;
  std::map<OccVec, Complex> amps_;
};

// A bra with the same storage; coefficients are the literal bra coefficients,
// so pairing with a ket is the conjugation-free sum over shared support.
struct DualFockVector {
  FockVector coeffs;

  DualFockVector() = default;
  explicit DualFockVector(int modes) : coeffs(modes) {}
  explicit DualFockVector(FockVector c) : coeffs(std::move(c)) {}
  int modes() const { return coeffs.modes(); }
};

FockVector apply_phase(double phi, int mode, const FockVector& v);
FockVector apply_bs(double theta, int wire, const FockVector& v);
FockVector apply_creation(int mode, const FockVector& v);
FockVector apply_swap(int wire, const FockVector& v);
FockVector tensor(const FockVector& a, const FockVector& b);

// Insert `state` so that its modes occupy positions [at, at+state.modes()).
FockVector tensor_insert(const FockVector& v, const FockVector& state, int at);

// Contract modes [at, at+effect.modes()) against the bra `effect`.
FockVector contract(const FockVector& v, const DualFockVector& effect, int at);

Complex inner_product(const DualFockVector& g, const FockVector& v);

FockVector eval_circuit(const Circuit& c, const FockVector& v,
                        const EvalConfig& cfg = {});

// All occupation vectors over `modes` modes with total photons <= max_total,
// in lexicographic order.
std::vector<OccVec> probe_basis(int modes, int max_total);

double ln_factorial(int n);

// `a+bi` with 17 significant digits; parse_complex_text accepts the same
// forms plus bare reals and bare imaginaries.
std::string complex_to_text(Complex z);

}  // namespace lov
