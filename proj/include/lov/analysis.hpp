#pragma once

#include <map>
#include <string>

#include "lov/rewrite.hpp"

namespace lov {

// Finite-support view of a linear map F_v(n) -> F_v(m): outputs cached on a
// probe basis, never materialized as a full matrix.
struct LinearMapSample {
  int in_modes = 0;
  int out_modes = 0;
  std::map<OccVec, FockVector> entries;

  FockVector apply(const FockVector& v) const;
  double max_difference(const LinearMapSample& other) const;
};

struct EquivVerdict {
  enum class Kind { EquivalentNF, DistinctNF, NumericMismatch };
  Kind kind = Kind::EquivalentNF;
  std::string witness;     // differing normal-form component
  OccVec witness_input;    // separating basis state, when one was found
  double witness_delta = 0.0;

  bool equivalent() const { return kind == Kind::EquivalentNF; }
};

// Plug |i> into the n~ ancilla inputs and project the m~ ancilla outputs
// onto <j|; sampled on inputs with at most `cutoff` photons.
LinearMapSample omega(const TriangleParams& t, const SplitDims& split,
                      const OccVec& i_occ, const OccVec& j_occ, int cutoff);

// Delta^{s,t} = (creations s on the outputs) o Omega^{0,t}, Trec only.
LinearMapSample delta_map(const TriangleParams& trec, const SplitDims& split,
                          const OccVec& s, const OccVec& tvec, int cutoff);

// Apply the creation-operator product Lambda^u = prod_j (a^dag_j)^{u_j}.
FockVector apply_lambda(const OccVec& u, const FockVector& v);

// Residual of eval(d, Lambda^u x) = prod_j (sum_i d_ij a^dag_i)^{u_j}
// eval(d, x) over probe inputs.
double lambda_commute_check(const Circuit& d, const OccVec& u, int cutoff);

EquivVerdict equiv(const Circuit& a, const Circuit& b, int cutoff = 4,
                   const RewriteOptions& opts = {});

enum class AxiomId {
  P2Pi,    // phase plus full turn
  SwapAx,  // swap as splitter plus phases
  PMerge,  // adjacent phases add
  E2,      // two-axis rotation identity
  E3,      // three-axis rotation identity
  S00D,    // vacuum source into vacuum detector is the empty diagram
  ZeroAx,  // a zero scalar annihilates the diagram
  SS,      // stacked sources merge
  SB,      // a splitter absorbs into a source
  SP,      // a phase absorbs into a source
  S0D,     // projecting the last source mode on <0|
  DD,      // stacked detectors merge
  BD,      // a splitter absorbs into a detector
  PD,      // a phase absorbs into a detector
  S0Dual,  // plugging |0> into the last detector mode
  H2,      // a two-mode map slides between source and detector
};

const char* axiom_name(AxiomId id);
constexpr int kAxiomCount = 16;

// Semantic residual between both sides of the axiom on a random instance.
double check_axiom(AxiomId id, std::uint64_t seed, int cutoff = 4);

}  // namespace lov
