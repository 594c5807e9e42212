#include "lov/json_io.hpp"

#include <json.hpp>

namespace lov {

using nlohmann::json;

namespace {

json angle_to_j(const Angle& a) {
  json j;
  j["value"] = a.value;
  if (!a.expr.empty()) j["expr"] = a.expr;
  return j;
}

Angle angle_from_j(const json& j) {
  Angle a;
  if (j.is_number()) {
    a.value = j.get<double>();
    return a;
  }
  a.value = j.at("value").get<double>();
  if (j.contains("expr")) a.expr = j.at("expr").get<std::string>();
  return a;
}

json fock_to_j(const FockVector& v) {
  json terms = json::array();
  for (const auto& [occ, amp] : v.terms()) {
    json t;
    t["occ"] = occ;
    t["amp"] = {amp.real(), amp.imag()};
    terms.push_back(std::move(t));
  }
  return json{{"modes", v.modes()}, {"terms", std::move(terms)}};
}

FockVector fock_from_j(const json& j) {
  FockVector v(j.at("modes").get<int>());
  for (const auto& t : j.at("terms")) {
    const auto occ = t.at("occ").get<OccVec>();
    const auto& amp = t.at("amp");
    v.add_term(occ, Complex(amp.at(0).get<double>(), amp.at(1).get<double>()));
  }
  return v;
}

json gen_to_j(const Generator& g) {
  json j;
  if (const auto* ps = std::get_if<PhaseShifter>(&g)) {
    j["type"] = "ps";
    j["wire"] = ps->wire;
    j["phi"] = angle_to_j(ps->phi);
  } else if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
    j["type"] = "bs";
    j["wire"] = bs->wire;
    j["theta"] = angle_to_j(bs->theta);
  } else if (const auto* sw = std::get_if<Swap>(&g)) {
    j["type"] = "swap";
    j["wire"] = sw->wire;
  } else if (const auto* src = std::get_if<Source>(&g)) {
    j["type"] = "source";
    j["wire"] = src->wire;
    j["state"] = fock_to_j(src->state);
  } else if (const auto* det = std::get_if<Detector>(&g)) {
    j["type"] = "detector";
    j["wire"] = det->wire;
    j["effect"] = fock_to_j(det->effect.coeffs);
  }
  return j;
}

Generator gen_from_j(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const int wire = j.at("wire").get<int>();
  if (type == "ps") return PhaseShifter{wire, angle_from_j(j.at("phi"))};
  if (type == "bs") return BeamSplitter{wire, angle_from_j(j.at("theta"))};
  if (type == "swap") return Swap{wire};
  if (type == "source") return Source{wire, fock_from_j(j.at("state"))};
  if (type == "detector")
    return Detector{wire, DualFockVector(fock_from_j(j.at("effect")))};
  fail(ErrorKind::SchemaError, "unknown generator type '" + type + "'");
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
  json cols = json::array();
  for (const auto& col : c.columns) {
    json jcol = json::array();
    for (const auto& g : col.gens) jcol.push_back(gen_to_j(g));
    cols.push_back(std::move(jcol));
  }
  json j{{"n_in", c.n_in}, {"n_out", c.n_out}, {"columns", std::move(cols)}};
  return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Circuit c;
    c.n_in = j.at("n_in").get<int>();
    c.n_out = j.at("n_out").get<int>();
    for (const auto& jcol : j.at("columns")) {
      Column col;
      for (const auto& jg : jcol) col.gens.push_back(gen_from_j(jg));
      c.columns.push_back(std::move(col));
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, e.what());
  }
}

std::string fock_to_json(const FockVector& v) { return fock_to_j(v).dump(2); }

FockVector fock_from_json(const std::string& text) {
  try {
    return fock_from_j(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, e.what());
  }
}

std::string matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.rows()}, {"entries", std::move(rows)}}.dump(2);
}

Matrix matrix_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const auto& entries = j.at("entries");
    const int n = int(entries.size());
    int cols = n;
    if (n > 0) cols = int(entries.at(0).size());
    Matrix m(n, cols);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < cols; ++k) {
        const auto& e = entries.at(std::size_t(i)).at(std::size_t(k));
        m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
      }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, e.what());
  }
}

}  // namespace lov
