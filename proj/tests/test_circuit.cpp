#include <doctest.h>

#include "helpers.hpp"
#include "lov/dsl.hpp"
#include "lov/json_io.hpp"

using namespace lov;
using lov::testing::eval_residual;
using lov::testing::max_amp_diff;
using lov::testing::random_circuit;

TEST_CASE("sequential composition") {
  const Circuit id2 = identity_circuit(2);
  const Circuit both = compose_seq(id2, id2);
  CHECK(both.n_in == 2);
  CHECK(both.n_out == 2);

  const Circuit ps = compose_seq(single_ps(1, 0, Angle(1.0)),
                                 single_ps(1, 0, Angle(0.5)));
  const FockVector out = eval_circuit(ps, FockVector::basis({1}));
  CHECK(std::abs(out.amplitude({1}) - std::exp(Complex(0, 1.5))) < 1e-12);

  CHECK_THROWS_AS(compose_seq(identity_circuit(2), identity_circuit(3)),
                  Error);
}

TEST_CASE("tensor composition") {
  const Circuit id = compose_tensor(identity_circuit(1), identity_circuit(1));
  CHECK(id.n_in == 2);

  const Circuit ps = compose_tensor(single_ps(1, 0, Angle(0.7)),
                                    identity_circuit(1));
  const Matrix m = matrix_of(ps);
  CHECK(std::abs(m(0, 0) - std::exp(Complex(0, 0.7))) < 1e-12);
  CHECK(std::abs(m(1, 1) - Complex(1, 0)) < 1e-12);

  Circuit src;
  src.n_in = 0;
  src.n_out = 2;
  src.columns.push_back({{Source{0, FockVector::basis({1, 0})}}});
  Circuit det;
  det.n_in = 2;
  det.n_out = 0;
  det.columns.push_back({{Detector{0, DualFockVector(FockVector::basis({1, 0}))}}});
  const Circuit t = compose_tensor(src, det);
  CHECK(t.n_in == 2);
  CHECK(t.n_out == 2);
  CHECK(validate(t).ok());
}

TEST_CASE("tensor composition is associative on flattened columns") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    lov::testing::RandomCircuitSpec spec;
    spec.max_sources = 1;
    spec.max_detectors = 1;
    spec.max_generators = 5;
    const Circuit a = random_circuit(seed, spec);
    const Circuit b = random_circuit(seed + 100, spec);
    const Circuit c = random_circuit(seed + 200, spec);
    const Circuit left = compose_tensor(compose_tensor(a, b), c);
    const Circuit right = compose_tensor(a, compose_tensor(b, c));
    CHECK(structurally_equal(left, right));
  }
}

TEST_CASE("validation reports") {
  CHECK(validate(identity_circuit(3)).ok());

  Circuit overlap = identity_circuit(3);
  Column col;
  col.gens.push_back(BeamSplitter{0, Angle(0.5)});
  col.gens.push_back(BeamSplitter{1, Angle(0.5)});
  overlap.columns.push_back(std::move(col));
  const ValidationReport r = validate(overlap);
  REQUIRE(!r.ok());
  CHECK(r.issues.front().code == "OverlapViolation");

  Circuit bad_det = identity_circuit(1);
  bad_det.columns.push_back({{Detector{0, DualFockVector(FockVector(0))}}});
  bool has_arity = false;
  for (const auto& issue : validate(bad_det).issues)
    if (issue.code == "ArityViolation") has_arity = true;
  CHECK(has_arity);
}

TEST_CASE("composition agrees with staged evaluation") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    lov::testing::RandomCircuitSpec spec;
    spec.max_sources = 0;
    spec.max_detectors = 0;
    spec.max_generators = 8;
    const Circuit a = random_circuit(seed, spec);
    Circuit b = random_circuit(seed + 50, spec);
    // force matching arity
    b.n_in = a.n_out;
    b.n_out = a.n_out;
    b.columns.clear();
    b.columns.push_back({{PhaseShifter{0, Angle(0.3)}}});
    if (a.n_out >= 2) b.columns.push_back({{BeamSplitter{0, Angle(0.9)}}});
    const Circuit both = compose_seq(a, b);
    for (const OccVec& occ : probe_basis(a.n_in, 2)) {
      const FockVector in = FockVector::basis(occ);
      CHECK(max_amp_diff(eval_circuit(both, in),
                         eval_circuit(b, eval_circuit(a, in))) < 1e-10);
    }
  }
}

TEST_CASE("layout canonicalization keeps the semantics") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    lov::testing::RandomCircuitSpec spec;
    spec.max_generators = 10;
    const Circuit c = random_circuit(seed, spec);
    const Circuit packed = canonicalize_layout(c);
    CHECK(eval_residual(c, packed, 2) < 1e-10);
    // idempotent
    CHECK(structurally_equal(packed, canonicalize_layout(packed)));
  }
}

TEST_CASE("wire deformation does not change the semantics") {
  // Slide generators into different columns by hand and compare.
  Circuit a = identity_circuit(3);
  a.columns.push_back({{BeamSplitter{0, Angle(0.4)}}});
  a.columns.push_back({{PhaseShifter{2, Angle(1.1)}}});
  a.columns.push_back({{BeamSplitter{1, Angle(0.8)}}});

  Circuit b = identity_circuit(3);
  Column c0;
  c0.gens.push_back(BeamSplitter{0, Angle(0.4)});
  c0.gens.push_back(PhaseShifter{2, Angle(1.1)});
  b.columns.push_back(std::move(c0));
  b.columns.push_back({{BeamSplitter{1, Angle(0.8)}}});

  CHECK(eval_residual(a, b, 3) < 1e-12);
  CHECK(structurally_equal(canonicalize_layout(a), canonicalize_layout(b)));
}

TEST_CASE("dsl parses the basic statements") {
  const Circuit c = parse_dsl("circuit 2 -> 2\nbs 0 pi/4\n");
  REQUIRE(c.columns.size() == 1);
  const auto& bs = std::get<BeamSplitter>(c.columns[0].gens[0]);
  CHECK(bs.theta.value == doctest::Approx(M_PI / 4));
  CHECK(bs.theta.expr == "pi/4");

  const Circuit s = parse_dsl(
      "circuit 0 -> 2\nsource 2 { 1,0: 1.0 ; 0,1: 0+1.0i }\n");
  const auto& src = std::get<Source>(s.columns[0].gens[0]);
  CHECK(std::abs(src.state.amplitude({1, 0}) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(src.state.amplitude({0, 1}) - Complex(0, 1)) < 1e-15);

  CHECK_THROWS_AS(parse_dsl("circuit 2 -> 2\nbs 5 pi/4\n"), Error);
  try {
    parse_dsl("circuit 2 -> 2\nbs 5 pi/4\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SemanticError);
  }
}

TEST_CASE("dsl round trips structurally") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Circuit c = random_circuit(seed);
    const Circuit back = parse_dsl(print_dsl(c));
    CHECK(structurally_equal(c, back, 0.0, 0.0));
  }
}

TEST_CASE("json round trips exactly") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Circuit c = random_circuit(seed);
    const Circuit back = circuit_from_json(circuit_to_json(c));
    CHECK(structurally_equal(c, back, 0.0, 0.0));
  }

  // angle expressions survive
  const Circuit c = parse_dsl("circuit 1 -> 1\nps 0 pi/4\n");
  const Circuit back = circuit_from_json(circuit_to_json(c));
  const auto& ps = std::get<PhaseShifter>(back.columns[0].gens[0]);
  CHECK(ps.phi.expr == "pi/4");
  CHECK(ps.phi.value == std::get<PhaseShifter>(c.columns[0].gens[0]).phi.value);

  CHECK_THROWS_AS(circuit_from_json("{\"n_in\": 2,"), Error);
}

TEST_CASE("angle expressions") {
  CHECK(parse_angle_text("pi/4").value == doctest::Approx(M_PI / 4));
  CHECK(parse_angle_text("3*pi/2").value == doctest::Approx(3 * M_PI / 2));
  CHECK(parse_angle_text("-pi").value == doctest::Approx(-M_PI));
  CHECK(parse_angle_text("1.25").value == doctest::Approx(1.25));
  CHECK_THROWS_AS(parse_angle_text("pie"), Error);
}
