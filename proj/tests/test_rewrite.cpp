#include <doctest.h>

#include "helpers.hpp"
#include "lov/rewrite.hpp"

using namespace lov;
using lov::testing::eval_residual;
using lov::testing::max_amp_diff;
using lov::testing::random_circuit;

namespace {

double probe_residual(const Circuit& a, const Circuit& b, int cutoff = 3) {
  return eval_residual(a, b, cutoff);
}

// One rewrite step at the first redex; checks semantics and ranking.
void check_step_sound(const Circuit& c, int cutoff = 3) {
  const auto redex = find_redex(c);
  REQUIRE(redex.has_value());
  const Circuit next = apply_rule(c, redex->first, redex->second);
  CHECK(probe_residual(c, next, cutoff) < 1e-9);
  CHECK(ranking(next) < ranking(c));
}

}  // namespace

TEST_CASE("cantor pairing") {
  CHECK(cantor_pair(0, 0) == 0);
  CHECK(cantor_pair(1, 0) == 1);
  CHECK(cantor_pair(0, 1) == 2);
  CHECK(unpair_m(0, 3) == OccVec{0, 0, 0});
  for (long long x = 0; x < 200; ++x) {
    const auto [a, b] = cantor_unpair(x);
    CHECK(cantor_pair(a, b) == x);
  }
  for (int m = 1; m <= 4; ++m)
    for (long long x = 0; x < 50; ++x)
      CHECK(pair_m(unpair_m(x, m)) == x);
}

TEST_CASE("ranking components") {
  CHECK(ranking(identity_circuit(3)).to_string() == "(0,0,0,0,0,0)");

  // one source |1,0> + |0,1>, no detector: x6 counts its components
  Circuit c;
  c.n_in = 0;
  c.n_out = 2;
  FockVector f(2);
  f.add_term({1, 0}, Complex(1, 0));
  f.add_term({0, 1}, Complex(1, 0));
  c.columns.push_back({{Source{0, f}}});
  const RankTuple r = ranking(c);
  CHECK(r.x5 == 1);
  CHECK(r.x6 == 2);

  // splitter angle counting: 3 pi counts three, 3 pi / 2 twice
  CHECK(ranking(single_bs(2, 0, Angle(3 * M_PI))).x2 == 3);
  CHECK(ranking(single_bs(2, 0, Angle(3 * M_PI / 2))).x2 == 2);
  CHECK(ranking(single_bs(2, 0, Angle(0.7))).x2 == 0);
}

TEST_CASE("redex search is deterministic with fixed priorities") {
  CHECK(!find_redex(single_bs(2, 0, Angle(0.7))).has_value());

  Circuit c = identity_circuit(1);
  c.columns.push_back({{PhaseShifter{0, Angle(7.0)}}});
  const auto r = find_redex(c);
  REQUIRE(r.has_value());
  CHECK(r->first == RuleId::PhaseMod2Pi);

  Circuit d = identity_circuit(1);
  d.columns.push_back({{PhaseShifter{0, Angle(1.5)}}});
  d.columns.push_back({{PhaseShifter{0, Angle(1.0)}}});
  const auto rd = find_redex(d);
  REQUIRE(rd.has_value());
  CHECK(rd->first == RuleId::PhaseFusion);
  CHECK(rd->second.column == 0);
}

TEST_CASE("phase fusion adds angles") {
  Circuit d = identity_circuit(1);
  d.columns.push_back({{PhaseShifter{0, Angle(1.5)}}});
  d.columns.push_back({{PhaseShifter{0, Angle(1.0)}}});
  const Circuit next = apply_rule(d, RuleId::PhaseFusion, {0, 0});
  int count = 0;
  double value = 0;
  for (const auto& col : next.columns)
    for (const auto& g : col.gens) {
      ++count;
      value = std::get<PhaseShifter>(g).phi.value;
    }
  CHECK(count == 1);
  CHECK(value == doctest::Approx(2.5));
  CHECK(probe_residual(d, next) < 1e-12);
}

TEST_CASE("zero splitters vanish") {
  Circuit c = identity_circuit(2);
  c.columns.push_back({{BeamSplitter{0, Angle(0.0)}}});
  const auto r = find_redex(c);
  REQUIRE(r.has_value());
  CHECK(r->first == RuleId::ZeroBs);
  const Circuit next = apply_rule(c, r->first, r->second);
  for (const auto& col : next.columns) CHECK(col.gens.empty());
}

TEST_CASE("every structural rule preserves semantics and lowers the rank") {
  std::mt19937_64 rng(33);
  auto u01 = [&] { return double(rng() >> 11) * 0x1.0p-53; };

  for (int rep = 0; rep < 50; ++rep) {
    const double phi = mod_2pi(0.05 + 6.0 * u01());
    const double theta = 0.05 + 1.45 * u01();

    // top-phase: phase on the splitter's upper input
    if (phi != 0.0) {
      Circuit c = identity_circuit(2);
      c.columns.push_back({{PhaseShifter{0, Angle(phi)}}});
      c.columns.push_back({{BeamSplitter{0, Angle(theta)}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::TopPhase);
      check_step_sound(c);
    }
    // pi-over-2: phase under a pi/2 splitter
    if (phi != 0.0) {
      Circuit c = identity_circuit(2);
      c.columns.push_back({{PhaseShifter{1, Angle(phi)}}});
      c.columns.push_back({{BeamSplitter{0, Angle(M_PI / 2)}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::PiOverTwo);
      check_step_sound(c);
    }
    // theta-range: angle in [pi, 2 pi)
    {
      Circuit c = identity_circuit(2);
      c.columns.push_back({{BeamSplitter{0, Angle(M_PI + 3.0 * u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::ThetaRange);
      check_step_sound(c);
    }
    // minus-pi: angle in (pi/2, pi)
    {
      Circuit c = identity_circuit(2);
      c.columns.push_back(
          {{BeamSplitter{0, Angle(M_PI / 2 + 0.02 + 1.5 * u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::MinusPi);
      check_step_sound(c);
    }
    // E2: two splitters on the same pair with a phase between
    {
      Circuit c = identity_circuit(2);
      c.columns.push_back({{BeamSplitter{0, Angle(0.05 + 1.4 * u01())}}});
      c.columns.push_back({{PhaseShifter{1, Angle(0.05 + 3.0 * u01())}}});
      c.columns.push_back({{BeamSplitter{0, Angle(0.05 + 1.4 * u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::E2Rewrite);
      check_step_sound(c);
    }
    // E3: the three-splitter zigzag
    {
      Circuit c = identity_circuit(3);
      c.columns.push_back({{BeamSplitter{0, Angle(0.05 + 1.4 * u01())}}});
      c.columns.push_back({{BeamSplitter{1, Angle(0.05 + 1.4 * u01())}}});
      c.columns.push_back({{BeamSplitter{0, Angle(0.05 + 1.4 * u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::E3Rewrite);
      check_step_sound(c);
    }
  }
}

TEST_CASE("endpoint rules: absorption, zeroing, transfer, wire removal") {
  std::mt19937_64 rng(34);
  auto u01 = [&] { return double(rng() >> 11) * 0x1.0p-53; };

  for (int rep = 0; rep < 25; ++rep) {
    {
      Circuit c;
      c.n_in = 0;
      c.n_out = 2;
      c.columns.push_back(
          {{Source{0, lov::testing::rand_state(rng, 2, 3, 2)}}});
      c.columns.push_back({{BeamSplitter{0, Angle(0.2 + u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::AbsorbBsSource);
      check_step_sound(c);
    }
    {
      Circuit c;
      c.n_in = 0;
      c.n_out = 1;
      c.columns.push_back(
          {{Source{0, lov::testing::rand_state(rng, 1, 2, 2)}}});
      c.columns.push_back({{PhaseShifter{0, Angle(0.2 + u01())}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::AbsorbPsSource);
      check_step_sound(c);
    }
    {
      Circuit c;
      c.n_in = 2;
      c.n_out = 0;
      c.columns.push_back({{BeamSplitter{0, Angle(0.2 + u01())}}});
      c.columns.push_back({{Detector{
          0, DualFockVector(lov::testing::rand_state(rng, 2, 3, 2))}}});
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::AbsorbBsDetector);
      check_step_sound(c);
    }
    {
      Circuit c;
      c.n_in = 0;
      c.n_out = 2;
      Column col;
      col.gens.push_back(Source{0, lov::testing::rand_state(rng, 1, 2, 2)});
      col.gens.push_back(Source{1, lov::testing::rand_state(rng, 1, 2, 2)});
      c.columns.push_back(std::move(col));
      const auto r = find_redex(c);
      REQUIRE(r.has_value());
      CHECK(r->first == RuleId::MergeSources);
      check_step_sound(c);
    }
  }

  // zero-f: source terms with no detector partner vanish
  {
    Circuit c;
    c.n_in = 0;
    c.n_out = 0;
    FockVector f(1);
    f.add_term({0}, Complex(0.6, 0));
    f.add_term({2}, Complex(0.8, 0));
    c.columns.push_back({{Source{0, f}}});
    FockVector g(1);
    g.add_term({0}, Complex(1.0, 0));
    c.columns.push_back({{Detector{0, DualFockVector(g)}}});
    const auto r = find_redex(c);
    REQUIRE(r.has_value());
    CHECK(r->first == RuleId::ZeroF);
    check_step_sound(c);
  }

  // remove-g: detector coefficients migrate onto the source
  {
    Circuit c;
    c.n_in = 0;
    c.n_out = 0;
    FockVector f(1);
    f.add_term({0}, Complex(0.5, 0.1));
    f.add_term({1}, Complex(-0.3, 0.2));
    c.columns.push_back({{Source{0, f}}});
    FockVector g(1);
    g.add_term({0}, Complex(0.7, -0.4));
    g.add_term({1}, Complex(0.2, 0.0));
    c.columns.push_back({{Detector{0, DualFockVector(g)}}});
    const auto r = find_redex(c);
    REQUIRE(r.has_value());
    CHECK(r->first == RuleId::RemoveG);
    check_step_sound(c);
    const Circuit next = apply_rule(c, r->first, r->second);
    const auto& det = std::get<Detector>(next.columns[1].gens[0]);
    CHECK(std::abs(det.effect.coeffs.amplitude({0}) - Complex(1, 0)) < 1e-12);
  }

  // wire-removal: two identity wires between source and detector collapse
  {
    Circuit c;
    c.n_in = 0;
    c.n_out = 0;
    FockVector f(2);
    f.add_term({1, 0}, Complex(0.8, 0));
    f.add_term({0, 1}, Complex(0.6, 0));
    c.columns.push_back({{Source{0, f}}});
    FockVector g(2);
    g.add_term({1, 0}, Complex(1.0, 0));
    g.add_term({0, 1}, Complex(0.5, 0));
    c.columns.push_back({{Detector{0, DualFockVector(g)}}});
    const auto r = find_redex(c);
    REQUIRE(r.has_value());
    CHECK(r->first == RuleId::WireRemoval);
    check_step_sound(c);
  }
}

TEST_CASE("preprocessing stages a circuit without changing its meaning") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Circuit c = random_circuit(seed);
    const Circuit staged = preprocess_for_rewriting(c);
    CHECK(staged.n_in == c.n_in);
    CHECK(staged.n_out == c.n_out);
    CHECK(probe_residual(c, staged, 2) < 1e-9);
  }
}

TEST_CASE("normalize on splitter-and-phase circuits") {
  lov::testing::RandomCircuitSpec spec;
  spec.max_sources = 0;
  spec.max_detectors = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Circuit c = random_circuit(seed, spec);
    const NormalizeResult r = normalize(c);
    REQUIRE(!r.zero);
    CHECK(r.nf.n_tilde == 0);
    CHECK(r.nf.m_tilde == 0);
    CHECK(std::abs(r.nf.scalar() - Complex(1, 0)) < 1e-9);
    CHECK((triangle_matrix(r.nf.triangle) - matrix_of(c))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }
}

TEST_CASE("normalize finds the zero form for an impossible event") {
  Circuit z = identity_circuit(2);
  Column src;
  src.gens.push_back(Source{2, FockVector::vacuum(1)});
  z.columns.push_back(std::move(src));
  Column det;
  det.gens.push_back(Detector{2, DualFockVector(FockVector::basis({1}))});
  z.columns.push_back(std::move(det));
  const NormalizeResult r = normalize(z);
  CHECK(r.zero);
  CHECK(r.zero_form.n == 2);
  CHECK(r.zero_form.m == 2);
}

TEST_CASE("normal forms are reproducible and render back faithfully") {
  lov::testing::RandomCircuitSpec spec;
  spec.max_generators = 10;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Circuit c = random_circuit(seed, spec);
    RewriteOptions opts;
    const NormalizeResult r1 = normalize(c, opts);
    if (r1.zero) continue;
    const Circuit rendered = r1.nf.to_circuit();
    CHECK(probe_residual(c, rendered, 2) < 1e-7);
    const NormalizeResult r2 = normalize(rendered, opts);
    REQUIRE(!r2.zero);
    CHECK(nf_equal(r1, r2, 1e-7, 1e-7));
  }
}

TEST_CASE("nf_equal compares all components") {
  const Circuit c = single_bs(2, 0, Angle(0.7));
  const NormalizeResult a = normalize(c);
  CHECK(nf_equal(a, a));
  const NormalizeResult b = normalize(single_bs(2, 0, Angle(0.7 + 1e-3)));
  CHECK(!nf_equal(a, b));
  Circuit zc = identity_circuit(2);
  Column src;
  src.gens.push_back(Source{2, FockVector::vacuum(1)});
  zc.columns.push_back(std::move(src));
  Column det;
  det.gens.push_back(Detector{2, DualFockVector(FockVector::basis({1}))});
  zc.columns.push_back(std::move(det));
  const NormalizeResult z = normalize(zc);
  CHECK(!nf_equal(a, z));
}

TEST_CASE("normalize handles sources and detectors end to end") {
  lov::testing::RandomCircuitSpec spec;
  spec.max_generators = 12;
  for (std::uint64_t seed = 100; seed <= 140; ++seed) {
    const Circuit c = random_circuit(seed, spec);
    RewriteOptions opts;
    opts.check_rank = true;
    const NormalizeResult r = normalize(c, opts);
    if (r.zero) continue;
    CHECK(probe_residual(c, r.nf.to_circuit(), 2) < 1e-7);
    const DualFockVector g = r.nf.derived_g();
    for (const auto& [occ, amp] : g.coeffs.terms())
      CHECK(std::abs(amp - Complex(1, 0)) < 1e-12);
  }
}
