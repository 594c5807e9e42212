#include "lov/analysis.hpp"

#include <cmath>
#include <random>

#include "lov/euler.hpp"

namespace lov {

namespace {

std::mt19937_64 seeded(std::uint64_t seed) { return std::mt19937_64(seed); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

Complex random_amp(std::mt19937_64& rng) {
  return Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
}

FockVector random_state(std::mt19937_64& rng, int modes, int max_terms,
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
    v.add_term(occ, random_amp(rng));
  }
  v.prune();
  if (v.is_zero()) v.add_term(OccVec(std::size_t(modes), 0), Complex(1, 0));
  return v;
}

double circuits_residual(const Circuit& a, const Circuit& b, int cutoff) {
  if (a.n_in != b.n_in || a.n_out != b.n_out)
    fail(ErrorKind::ArityMismatch, "axiom sides have different arity");
  double worst = 0.0;
  for (const OccVec& occ : probe_basis(a.n_in, cutoff)) {
    const FockVector in = FockVector::basis(occ);
    const FockVector oa = eval_circuit(a, in);
    const FockVector ob = eval_circuit(b, in);
    const FockVector diff = oa.plus(ob.scaled(Complex(-1, 0)));
    for (const auto& [k, amp] : diff.terms())
      worst = std::max(worst, std::abs(amp));
  }
  return worst;
}

}  // namespace

FockVector LinearMapSample::apply(const FockVector& v) const {
  FockVector out(out_modes);
  for (const auto& [occ, amp] : v.terms()) {
    auto it = entries.find(occ);
    if (it == entries.end()) continue;
    out = out.plus(it->second.scaled(amp));
  }
  return out;
}

double LinearMapSample::max_difference(const LinearMapSample& other) const {
  double worst = 0.0;
  auto scan = [&](const LinearMapSample& x, const LinearMapSample& y) {
    for (const auto& [occ, out] : x.entries) {
      FockVector o = out;
      auto it = y.entries.find(occ);
      if (it != y.entries.end())
        o = o.plus(it->second.scaled(Complex(-1, 0)));
      for (const auto& [k, amp] : o.terms())
        worst = std::max(worst, std::abs(amp));
    }
  };
  scan(*this, other);
  scan(other, *this);
  return worst;
}

LinearMapSample omega(const TriangleParams& t, const SplitDims& split,
                      const OccVec& i_occ, const OccVec& j_occ, int cutoff) {
  const TriangleClass cls = classify(t, split);
  if (!cls.is_tmn())
    fail(ErrorKind::NotTmn, "omega needs a Tmn triangle: " + cls.reason);
  if (int(i_occ.size()) != split.n_tilde ||
      int(j_occ.size()) != split.m_tilde)
    fail(ErrorKind::BadInput, "ancilla occupation sizes do not match split");
  Circuit c;
  c.n_in = split.n;
  c.n_out = split.m;
  if (split.n_tilde > 0) {
    Column col0;
    col0.gens.push_back(Source{split.n, FockVector::basis(i_occ)});
    c.columns.push_back(std::move(col0));
  }
  for (const auto& col : triangle_to_circuit(t).columns)
    c.columns.push_back(col);
  if (split.m_tilde > 0) {
    Column last;
    last.gens.push_back(
        Detector{split.m, DualFockVector(FockVector::basis(j_occ))});
    c.columns.push_back(std::move(last));
  }
  LinearMapSample sample;
  sample.in_modes = split.n;
  sample.out_modes = split.m;
  for (const OccVec& occ : probe_basis(split.n, cutoff))
    sample.entries[occ] = eval_circuit(c, FockVector::basis(occ));
  return sample;
}

FockVector apply_lambda(const OccVec& u, const FockVector& v) {
  FockVector out = v;
  for (std::size_t j = 0; j < u.size(); ++j)
    for (int r = 0; r < u[j]; ++r) out = apply_creation(int(j), out);
  return out;
}

LinearMapSample delta_map(const TriangleParams& trec, const SplitDims& split,
                          const OccVec& s, const OccVec& tvec, int cutoff) {
  const TriangleClass cls = classify(trec, split);
  if (cls.kind != TriangleClass::Kind::Trec)
    fail(ErrorKind::NotTrec, "delta needs a Trec triangle: " + cls.reason);
  if (int(s.size()) != split.m || int(tvec.size()) != split.m_tilde)
    fail(ErrorKind::BadInput, "delta occupation sizes do not match split");
  const OccVec zeros(std::size_t(split.n_tilde), 0);
  LinearMapSample base = omega(trec, split, zeros, tvec, cutoff);
  LinearMapSample out;
  out.in_modes = base.in_modes;
  out.out_modes = base.out_modes;
  for (const auto& [occ, val] : base.entries)
    out.entries[occ] = apply_lambda(s, val);
  return out;
}

double lambda_commute_check(const Circuit& d, const OccVec& u, int cutoff) {
  for (int x : u)
    if (x > 3) fail(ErrorKind::CostGuard, "creation powers capped at 3");
  if (cutoff > 8) fail(ErrorKind::CostGuard, "commutation cutoff capped at 8");
  if (int(u.size()) != d.n_in)
    fail(ErrorKind::BadInput, "creation vector length must match the inputs");
  const Matrix dm = matrix_of(d);
  double worst = 0.0;
  for (const OccVec& occ : probe_basis(d.n_in, cutoff)) {
    const FockVector in = FockVector::basis(occ);
    const FockVector lhs = eval_circuit(d, apply_lambda(u, in));
    FockVector rhs = eval_circuit(d, in);
    for (std::size_t j = 0; j < u.size(); ++j)
      for (int r = 0; r < u[j]; ++r) {
        FockVector next(rhs.modes());
        for (int i = 0; i < int(dm.rows()); ++i) {
          const Complex w = dm(i, int(j));
          if (std::abs(w) == 0.0) continue;
          next = next.plus(apply_creation(i, rhs).scaled(w));
        }
        rhs = std::move(next);
      }
    const FockVector diff = lhs.plus(rhs.scaled(Complex(-1, 0)));
    for (const auto& [k, amp] : diff.terms())
      worst = std::max(worst, std::abs(amp));
  }
  return worst;
}

EquivVerdict equiv(const Circuit& a, const Circuit& b, int cutoff,
                   const RewriteOptions& opts) {
  if (a.n_in != b.n_in || a.n_out != b.n_out)
    fail(ErrorKind::ArityMismatch, "circuits have different arity");
  const NormalizeResult na = normalize(a, opts);
  const NormalizeResult nb = normalize(b, opts);
  EquivVerdict verdict;
  if (nf_equal(na, nb, opts.angle_eps, opts.amp_eps)) {
    verdict.kind = EquivVerdict::Kind::EquivalentNF;
    return verdict;
  }
  verdict.kind = EquivVerdict::Kind::DistinctNF;
  if (na.zero != nb.zero) {
    verdict.witness = "one side is the zero form";
  } else if (na.nf.n_tilde != nb.nf.n_tilde ||
             na.nf.m_tilde != nb.nf.m_tilde) {
    verdict.witness = "ancilla dimensions differ";
  } else if (!na.nf.triangle.approx_equal(nb.nf.triangle, opts.angle_eps)) {
    verdict.witness = "triangle angle grids differ";
  } else {
    verdict.witness = "source states differ";
  }
  // Completeness makes the normal forms decisive; a numeric witness is
  // attached when one exists at this cutoff.
  for (const OccVec& occ : probe_basis(a.n_in, cutoff)) {
    const FockVector in = FockVector::basis(occ);
    const FockVector oa = eval_circuit(a, in);
    const FockVector ob = eval_circuit(b, in);
    const FockVector diff = oa.plus(ob.scaled(Complex(-1, 0)));
    double delta = 0.0;
    for (const auto& [k, amp] : diff.terms())
      delta = std::max(delta, std::abs(amp));
    if (delta > 1e-9) {
      verdict.witness_input = occ;
      verdict.witness_delta = delta;
      break;
    }
  }
  return verdict;
}

const char* axiom_name(AxiomId id) {
  switch (id) {
    case AxiomId::P2Pi: return "p2pi";
    case AxiomId::SwapAx: return "swap";
    case AxiomId::PMerge: return "p-p";
    case AxiomId::E2: return "E2";
    case AxiomId::E3: return "E3";
    case AxiomId::S00D: return "s0-0d";
    case AxiomId::ZeroAx: return "zero";
    case AxiomId::SS: return "ss";
    case AxiomId::SB: return "s-b";
    case AxiomId::SP: return "s-p";
    case AxiomId::S0D: return "s-0d";
    case AxiomId::DD: return "dd";
    case AxiomId::BD: return "b-d";
    case AxiomId::PD: return "p-d";
    case AxiomId::S0Dual: return "s0-d";
    case AxiomId::H2: return "h2";
  }
  return "?";
}

double check_axiom(AxiomId id, std::uint64_t seed, int cutoff) {
  auto rng = seeded(seed ^ 0x9e3779b97f4a7c15ULL);
  switch (id) {
    case AxiomId::P2Pi: {
      const double phi = uniform(rng, -6, 6);
      return circuits_residual(single_ps(1, 0, Angle(phi)),
                               single_ps(1, 0, Angle(phi + 2 * M_PI)),
                               cutoff);
    }
    case AxiomId::SwapAx: {
      Circuit rhs = identity_circuit(2);
      rhs.columns.push_back({{PhaseShifter{0, Angle(3 * M_PI / 2)},
                              PhaseShifter{1, Angle(3 * M_PI / 2)}}});
      rhs.columns.push_back({{BeamSplitter{0, Angle(M_PI / 2)}}});
      return circuits_residual(single_swap(2, 0), rhs, cutoff);
    }
    case AxiomId::PMerge: {
      const double p1 = uniform(rng, 0, 2 * M_PI), p2 = uniform(rng, 0, 2 * M_PI);
      Circuit lhs = identity_circuit(1);
      lhs.columns.push_back({{PhaseShifter{0, Angle(p1)}}});
      lhs.columns.push_back({{PhaseShifter{0, Angle(p2)}}});
      return circuits_residual(lhs, single_ps(1, 0, Angle(p1 + p2)), cutoff);
    }
    case AxiomId::E2: {
      E2Lhs a{uniform(rng, 0, 2 * M_PI), uniform(rng, 0, M_PI / 2),
              uniform(rng, 0, 2 * M_PI), uniform(rng, 0, M_PI)};
      const E2Rhs b = solve_e2_rhs(reconstruct_e2_lhs(a));
      return circuits_residual(e2_lhs_circuit(a), e2_rhs_circuit(b), cutoff);
    }
    case AxiomId::E3: {
      E3Lhs g{uniform(rng, 0, 2 * M_PI), uniform(rng, 0, 2 * M_PI),
              uniform(rng, 0, 2 * M_PI)};
      const E3Rhs d = solve_e3(reconstruct_e3_lhs(g)).second;
      return circuits_residual(e3_lhs_circuit(g), e3_rhs_circuit(d), cutoff);
    }
    case AxiomId::S00D: {
      // A circuit gains a vacuum source wired straight into a vacuum
      // detector.
      const double th = uniform(rng, 0, M_PI / 2);
      Circuit lhs = single_bs(2, 0, Angle(th));
      Circuit rhs = identity_circuit(2);
      Column col0;
      col0.gens.push_back(Source{2, FockVector::vacuum(1)});
      rhs.columns.push_back(std::move(col0));
      rhs.columns.push_back({{BeamSplitter{0, Angle(th)}}});
      Column last;
      last.gens.push_back(Detector{2, DualFockVector(FockVector::vacuum(1))});
      rhs.columns.push_back(std::move(last));
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::ZeroAx: {
      // C tensored with <1|0> evaluates to the null map, the same as the
      // all-zero source/detector circuit.
      const double th = uniform(rng, 0, M_PI / 2);
      Circuit lhs = identity_circuit(2);
      Column col0;
      col0.gens.push_back(Source{2, FockVector::vacuum(1)});
      lhs.columns.push_back(std::move(col0));
      lhs.columns.push_back({{BeamSplitter{0, Angle(th)}}});
      Column last;
      last.gens.push_back(
          Detector{2, DualFockVector(FockVector::basis({1}))});
      lhs.columns.push_back(std::move(last));
      Circuit rhs;
      rhs.n_in = 2;
      rhs.n_out = 2;
      Column kill;
      kill.gens.push_back(Detector{0, DualFockVector(FockVector(1))});
      kill.gens.push_back(Detector{1, DualFockVector(FockVector(1))});
      rhs.columns.push_back(std::move(kill));
      Column make;
      make.gens.push_back(Source{0, FockVector(1)});
      make.gens.push_back(Source{1, FockVector(1)});
      rhs.columns.push_back(std::move(make));
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::SS: {
      const FockVector f1 = random_state(rng, 1, 2, 2);
      const FockVector f2 = random_state(rng, 2, 3, 2);
      Circuit lhs;
      lhs.n_in = 0;
      lhs.n_out = 3;
      Column col0;
      col0.gens.push_back(Source{0, f1});
      col0.gens.push_back(Source{1, f2});
      lhs.columns.push_back(std::move(col0));
      Circuit rhs;
      rhs.n_in = 0;
      rhs.n_out = 3;
      rhs.columns.push_back({{Source{0, tensor(f1, f2)}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::SB: {
      const FockVector f = random_state(rng, 2, 3, 3);
      const double th = uniform(rng, 0, 2 * M_PI);
      Circuit lhs;
      lhs.n_in = 0;
      lhs.n_out = 2;
      lhs.columns.push_back({{Source{0, f}}});
      lhs.columns.push_back({{BeamSplitter{0, Angle(th)}}});
      Circuit rhs;
      rhs.n_in = 0;
      rhs.n_out = 2;
      rhs.columns.push_back({{Source{0, apply_bs(th, 0, f)}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::SP: {
      const FockVector f = random_state(rng, 2, 3, 3);
      const double phi = uniform(rng, 0, 2 * M_PI);
      Circuit lhs;
      lhs.n_in = 0;
      lhs.n_out = 2;
      lhs.columns.push_back({{Source{0, f}}});
      lhs.columns.push_back({{PhaseShifter{1, Angle(phi)}}});
      Circuit rhs;
      rhs.n_in = 0;
      rhs.n_out = 2;
      rhs.columns.push_back({{Source{0, apply_phase(phi, 1, f)}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::S0D: {
      // Source then <0| on its last mode drops to the |.,0> slice; terms
      // with other occupations there cancel.
      const FockVector f = random_state(rng, 3, 4, 3);
      Circuit lhs;
      lhs.n_in = 0;
      lhs.n_out = 2;
      lhs.columns.push_back({{Source{0, f}}});
      Column det;
      det.gens.push_back(Detector{2, DualFockVector(FockVector::vacuum(1))});
      lhs.columns.push_back(std::move(det));
      FockVector slice(2);
      for (const auto& [occ, amp] : f.terms())
        if (occ.back() == 0) slice.add_term({occ[0], occ[1]}, amp);
      Circuit rhs;
      rhs.n_in = 0;
      rhs.n_out = 2;
      if (!slice.is_zero()) rhs.columns.push_back({{Source{0, slice}}});
      else {
        rhs.columns.push_back({{Source{0, FockVector(2)}}});
      }
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::DD: {
      const FockVector g1 = random_state(rng, 1, 2, 2);
      const FockVector g2 = random_state(rng, 2, 3, 2);
      Circuit lhs;
      lhs.n_in = 3;
      lhs.n_out = 0;
      Column col0;
      col0.gens.push_back(Detector{0, DualFockVector(g1)});
      col0.gens.push_back(Detector{1, DualFockVector(g2)});
      lhs.columns.push_back(std::move(col0));
      Circuit rhs;
      rhs.n_in = 3;
      rhs.n_out = 0;
      rhs.columns.push_back({{Detector{0, DualFockVector(tensor(g1, g2))}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::BD: {
      const FockVector g = random_state(rng, 2, 3, 3);
      const double th = uniform(rng, 0, 2 * M_PI);
      Circuit lhs;
      lhs.n_in = 2;
      lhs.n_out = 0;
      lhs.columns.push_back({{BeamSplitter{0, Angle(th)}}});
      lhs.columns.push_back({{Detector{0, DualFockVector(g)}}});
      Circuit rhs;
      rhs.n_in = 2;
      rhs.n_out = 0;
      rhs.columns.push_back({{Detector{0, DualFockVector(apply_bs(th, 0, g))}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::PD: {
      const FockVector g = random_state(rng, 2, 3, 3);
      const double phi = uniform(rng, 0, 2 * M_PI);
      Circuit lhs;
      lhs.n_in = 2;
      lhs.n_out = 0;
      lhs.columns.push_back({{PhaseShifter{0, Angle(phi)}}});
      lhs.columns.push_back({{Detector{0, DualFockVector(g)}}});
      Circuit rhs;
      rhs.n_in = 2;
      rhs.n_out = 0;
      rhs.columns.push_back(
          {{Detector{0, DualFockVector(apply_phase(phi, 0, g))}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::S0Dual: {
      const FockVector g = random_state(rng, 3, 4, 3);
      Circuit lhs;
      lhs.n_in = 2;
      lhs.n_out = 0;
      Column col0;
      col0.gens.push_back(Source{2, FockVector::vacuum(1)});
      lhs.columns.push_back(std::move(col0));
      lhs.columns.push_back({{Detector{0, DualFockVector(g)}}});
      FockVector slice(2);
      for (const auto& [occ, amp] : g.terms())
        if (occ.back() == 0) slice.add_term({occ[0], occ[1]}, amp);
      Circuit rhs;
      rhs.n_in = 2;
      rhs.n_out = 0;
      rhs.columns.push_back({{Detector{0, DualFockVector(slice)}}});
      return circuits_residual(lhs, rhs, cutoff);
    }
    case AxiomId::H2: {
      // <g| (h f) against (g h) |f> for a random kernel on a bounded block.
      const FockVector f = random_state(rng, 2, 4, 3);
      const FockVector g = random_state(rng, 2, 4, 3);
      std::map<std::pair<OccVec, OccVec>, Complex> h;
      const auto block = probe_basis(2, 3);
      for (const auto& a : block)
        for (const auto& b : block)
          if (rng() % 4 == 0) h[{a, b}] = random_amp(rng);
      FockVector hf(2);
      for (const auto& [occ, amp] : f.terms())
        for (const auto& [key, w] : h)
          if (key.second == occ) hf.add_term(key.first, w * amp);
      FockVector gh(2);
      for (const auto& [occ, amp] : g.terms())
        for (const auto& [key, w] : h)
          if (key.first == occ) gh.add_term(key.second, w * amp);
      const Complex lhs = inner_product(DualFockVector(g), hf);
      const Complex rhs = inner_product(DualFockVector(gh), f);
      return std::abs(lhs - rhs);
    }
  }
  return 0.0;
}

}  // namespace lov
