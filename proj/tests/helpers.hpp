#pragma once

#include <cmath>
#include <random>

#include "lov/analysis.hpp"
#include "lov/circuit.hpp"
#include "lov/euler.hpp"
#include "lov/unitary.hpp"

namespace lov::testing {

// Independent beam-splitter oracle: expand
// (c a1+ + i s a2+)^{k1} (i s a1+ + c a2+)^{k2} |0,0> / sqrt(k1! k2!)
// term by term. No shared code with apply_bs.
inline FockVector bs_oracle(double theta, int k1, int k2) {
  const double c = std::cos(theta), s = std::sin(theta);
  auto binom = [](int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * double(n - i) / double(i + 1);
    return b;
  };
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  FockVector out(2);
  for (int p = 0; p <= k1; ++p)
    for (int q = 0; q <= k2; ++q) {
      const int m = p + q;                 // photons in mode 1
      const int n = k1 + k2 - m;           // photons in mode 2
      Complex amp = binom(k1, p) * binom(k2, q);
      amp *= std::pow(c, p) * std::pow(Complex(0, s), k1 - p);
      amp *= std::pow(Complex(0, s), q) * std::pow(c, k2 - q);
      amp *= std::sqrt(fact(m) * fact(n) / (fact(k1) * fact(k2)));
      out.add_term({m, n}, amp);
    }
  out.prune(1e-14);
  return out;
}

inline double max_amp_diff(const FockVector& a, const FockVector& b) {
  double worst = 0.0;
  const FockVector d = a.plus(b.scaled(Complex(-1, 0)));
  for (const auto& [occ, amp] : d.terms())
    worst = std::max(worst, std::abs(amp));
  return worst;
}

inline double eval_residual(const Circuit& a, const Circuit& b, int cutoff) {
  double worst = 0.0;
  for (const OccVec& occ : probe_basis(a.n_in, cutoff)) {
    const FockVector in = FockVector::basis(occ);
    worst = std::max(worst,
                     max_amp_diff(eval_circuit(a, in), eval_circuit(b, in)));
  }
  return worst;
}

struct RandomCircuitSpec {
  int min_modes = 2;
  int max_modes = 4;
  int max_generators = 20;
  int max_sources = 2;
  int max_detectors = 2;
  int max_state_terms = 3;
  int max_state_photons = 2;
  bool allow_out_of_range_angles = true;
};

inline Complex rand_amp(std::mt19937_64& rng) {
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  return Complex(u(), u());
}

inline FockVector rand_state(std::mt19937_64& rng, int modes, int max_terms,
                             int max_photons) {
  FockVector v(modes);
  const int terms = 1 + int(rng() % std::uint64_t(max_terms));
  for (int t = 0; t < terms; ++t) {
    OccVec occ(static_cast<std::size_t>(modes), 0);
    int budget = max_photons;
    for (int i = 0; i < modes; ++i) {
      occ[std::size_t(i)] = int(rng() % std::uint64_t(budget + 1));
      budget -= occ[std::size_t(i)];
    }
    v.add_term(occ, rand_amp(rng));
  }
  v.prune();
  if (v.is_zero()) v.add_term(OccVec(static_cast<std::size_t>(modes), 0),
                              Complex(1, 0));
  return v;
}

// Random circuit with sources and detectors sprinkled in; always valid.
inline Circuit random_circuit(std::uint64_t seed,
                              const RandomCircuitSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return int(rng() % std::uint64_t(n)); };
  auto angle = [&]() {
    const double lo = spec.allow_out_of_range_angles ? -4 * M_PI : 0.0;
    const double hi = spec.allow_out_of_range_angles ? 4 * M_PI : 2 * M_PI;
    return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
  };
  const int n0 =
      spec.min_modes + pick(spec.max_modes - spec.min_modes + 1);
  Circuit c;
  c.n_in = n0;
  int width = n0;
  int gens = 1 + pick(spec.max_generators);
  int sources_left = pick(spec.max_sources + 1);
  int detectors_left = pick(spec.max_detectors + 1);
  for (int g = 0; g < gens; ++g) {
    const int kind = pick(10);
    Column col;
    if (kind == 0 && sources_left > 0) {
      const int k = 1 + pick(2);
      const int at = pick(width + 1);
      col.gens.push_back(Source{
          at, rand_state(rng, k, spec.max_state_terms,
                         spec.max_state_photons)});
      width += k;
      --sources_left;
    } else if (kind == 1 && detectors_left > 0 && width >= 2) {
      const int k = 1 + pick(std::min(2, width - 1));
      const int at = pick(width - k + 1);
      col.gens.push_back(Detector{
          at, DualFockVector(rand_state(rng, k, spec.max_state_terms,
                                        spec.max_state_photons))});
      width -= k;
      --detectors_left;
    } else if (kind <= 4 && width >= 1) {
      col.gens.push_back(PhaseShifter{pick(width), Angle(angle())});
    } else if (kind <= 8 && width >= 2) {
      col.gens.push_back(BeamSplitter{pick(width - 1), Angle(angle())});
    } else if (width >= 2) {
      col.gens.push_back(Swap{pick(width - 1)});
    } else {
      col.gens.push_back(PhaseShifter{0, Angle(angle())});
    }
    c.columns.push_back(std::move(col));
  }
  c.n_out = width;
  return c;
}

}  // namespace lov::testing
