#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lov/synthesis.hpp"

namespace lov {

enum class RuleId {
  PhaseMod2Pi,   // phase angle outside [0,2pi)
  BsMod2Pi,      // splitter angle outside [0,2pi)
  PhaseFusion,   // adjacent phases on one wire
  ZeroPhase,     // remove a zero phase
  ZeroBs,        // remove a zero splitter
  TopPhase,      // phase on a splitter's upper input commutes through
  PiOverTwo,     // phase below a pi/2 splitter hops to the upper output
  ThetaRange,    // theta in [pi,2pi) sheds a pi
  MinusPi,       // theta in (pi/2,pi) reflects to pi-theta
  E3Rewrite,     // three-splitter zigzag re-triangulated downward
  E2Rewrite,     // same-pair splitter pair fused to canonical form
  ZeroF,         // drop source terms orthogonal to the detector
  ZeroG,         // drop detector terms orthogonal to the source
  RemoveG,       // transfer detector coefficients onto the source
  WireRemoval,   // merge two connecting identity wires via pairing
  MergeSources,      // ss
  AbsorbBsSource,    // s-b
  AbsorbPsSource,    // s-p
  MergeDetectors,    // dd
  AbsorbBsDetector,  // b-d
  AbsorbPsDetector,  // p-d
};

const char* rule_name(RuleId id);
constexpr int kRuleCount = 21;

struct Location {
  int column = 0;
  int wire = 0;
};

// Lexicographic termination measure. x3 is a base-9 coefficient vector
// (little-endian digits), since phase scores grow like 9^depth.
struct RankTuple {
  std::uint64_t x1 = 0, x2 = 0;
  std::vector<std::uint32_t> x3;
  std::uint64_t x4 = 0, x5 = 0, x6 = 0;

  bool operator==(const RankTuple& o) const;
  bool operator<(const RankTuple& o) const;
  std::string to_string() const;
};

long long cantor_pair(long long l, long long l2);
std::pair<long long, long long> cantor_unpair(long long x);
long long pair_m(const OccVec& v);
OccVec unpair_m(long long x, int m);

RankTuple ranking(const Circuit& c);

// Desugar swaps, move sources to a single bottom-left column and detectors
// to a single bottom-right column (routing with explicit swaps), and add the
// |0> -> <0| wire that the pairing convention relies on.
Circuit preprocess_for_rewriting(const Circuit& c);

std::optional<std::pair<RuleId, Location>> find_redex(const Circuit& c);
Circuit apply_rule(const Circuit& c, RuleId rule, Location loc);

struct NormalForm {
  int n = 0, m = 0, n_tilde = 0, m_tilde = 0;
  TriangleParams triangle;  // size n + n_tilde
  FockVector f;             // over n_tilde + 1 modes

  std::vector<long long> support() const;  // K: last-mode indices of f
  Complex scalar() const;                  // f amplitude on |0>, the n~ = m~ = 0 case
  DualFockVector derived_g() const;        // sum over K of <N_m~(l)| x <l|
  Circuit to_circuit() const;
};

struct ZeroForm {
  int n = 0, m = 0;
};

struct NormalizeResult {
  bool zero = false;
  ZeroForm zero_form;
  NormalForm nf;
  long steps = 0;
  bool triangle_prop4_ok = true;
};

struct RewriteOptions {
  double angle_eps = 1e-9;
  double amp_eps = 1e-9;
  double prune_eps = 1e-12;
  long step_limit = 1000000;
  bool check_rank = true;
  bool check_soundness = false;  // semantic probe residual per step
  int soundness_cutoff = 4;
  std::function<void(long step, RuleId rule, Location loc,
                     const RankTuple& rank)>
      trace;
};

NormalizeResult normalize(const Circuit& c, const RewriteOptions& opts = {});

bool nf_equal(const NormalizeResult& a, const NormalizeResult& b,
              double angle_eps = 1e-9, double amp_eps = 1e-9);

}  // namespace lov
