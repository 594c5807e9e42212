#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "lov/analysis.hpp"
#include "lov/dsl.hpp"
#include "lov/euler.hpp"
#include "lov/json_io.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) lov::fail(lov::ErrorKind::BadInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lov::Circuit load_circuit(const std::string& path) {
  const std::string text = read_input(path);
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') return lov::circuit_from_json(text);
    break;
  }
  return lov::parse_dsl(text);
}

struct Options {
  std::string format = "text";
  double angle_eps = 1e-9;
  double amp_eps = 1e-9;
  double prune_eps = 1e-12;
  int cutoff = -1;  // -1: derive from sources
  long step_limit = 1000000;
  std::uint64_t seed = 1;

  lov::RewriteOptions rewrite() const {
    lov::RewriteOptions o;
    o.angle_eps = angle_eps;
    o.amp_eps = amp_eps;
    o.prune_eps = prune_eps;
    o.step_limit = step_limit;
    return o;
  }
};

void emit(const Options& opt, const std::string& command, const json& result,
          const std::string& text) {
  if (opt.format == "json") {
    json wrapper{{"command", command}, {"version", kVersion},
                 {"result", result}};
    std::cout << wrapper.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

json triangle_json(const lov::TriangleParams& t) {
  json thetas = json::array(), phis = json::array();
  for (int i = 1; i < t.size(); ++i) {
    json row = json::array();
    for (int j = 1; j <= t.size() - i; ++j) row.push_back(t.theta(i, j));
    thetas.push_back(std::move(row));
  }
  for (int i = 1; i <= t.size(); ++i) {
    json row = json::array();
    for (int j = 1; j <= t.size() + 1 - i; ++j) row.push_back(t.phi(i, j));
    phis.push_back(std::move(row));
  }
  return json{{"size", t.size()}, {"theta", std::move(thetas)},
              {"phi", std::move(phis)}};
}

int total_source_photons(const lov::Circuit& c) {
  int total = 0;
  for (const auto& col : c.columns)
    for (const auto& g : col.gens)
      if (const auto* s = std::get_if<lov::Source>(&g))
        total += s->state.max_total_photons();
  return total;
}

int effective_cutoff(const Options& opt, const lov::Circuit& c) {
  if (opt.cutoff >= 0) return opt.cutoff;
  return total_source_photons(c) + 4;
}

lov::OccVec parse_occ(const std::string& text) {
  lov::OccVec occ;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    occ.push_back(std::stoi(tok));
  return occ;
}

json fock_json(const lov::FockVector& v) {
  json terms = json::array();
  for (const auto& [occ, amp] : v.terms())
    terms.push_back(json{{"occ", occ}, {"amp", {amp.real(), amp.imag()}}});
  return json{{"modes", v.modes()}, {"terms", std::move(terms)}};
}

std::string matrix_text(const lov::Matrix& m) {
  std::string out;
  char buf[96];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      if (im >= 0)
        std::snprintf(buf, sizeof buf, "%.12g+%.12gi", re, im);
      else
        std::snprintf(buf, sizeof buf, "%.12g-%.12gi", re, -im);
      out += buf;
      if (j + 1 < m.cols()) out += "  ";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOv-calculus toolkit: evaluation, normal forms, synthesis"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("LOV_CUTOFF")) opt.cutoff = std::atoi(env);
  if (const char* env = std::getenv("LOV_SEED"))
    opt.seed = std::strtoull(env, nullptr, 10);
  app.add_option("--format", opt.format, "Output format (text|json)")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--angle-eps", opt.angle_eps, "Angle comparison tolerance");
  app.add_option("--amp-eps", opt.amp_eps, "Amplitude comparison tolerance");
  app.add_option("--prune-eps", opt.prune_eps, "State pruning threshold");
  app.add_option("--cutoff", opt.cutoff, "Photon cutoff for probe bases");
  app.add_option("--step-limit", opt.step_limit, "Rewrite step limit");
  app.add_option("--seed", opt.seed, "Random seed");

  // eval
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate a circuit on a state");
  std::string eval_file, eval_input;
  cmd_eval->add_option("file", eval_file)->required();
  cmd_eval->add_option("--input", eval_input,
                       "Input occupation vector, e.g. 1,0,1,0");

  // normalize
  auto* cmd_norm =
      app.add_subcommand("normalize", "Rewrite a circuit to normal form");
  std::string norm_file;
  bool norm_trace = false;
  cmd_norm->add_option("file", norm_file)->required();
  cmd_norm->add_flag("--trace", norm_trace, "Print one line per rewrite step");

  // equiv
  auto* cmd_equiv =
      app.add_subcommand("equiv", "Decide semantic equivalence");
  std::string equiv_a, equiv_b;
  cmd_equiv->add_option("a", equiv_a)->required();
  cmd_equiv->add_option("b", equiv_b)->required();

  // synth
  auto* cmd_synth =
      app.add_subcommand("synth", "Triangular synthesis of a unitary");
  std::string synth_file;
  int synth_random = 0;
  bool synth_grid = false;
  cmd_synth->add_option("file", synth_file, "Matrix JSON ('-' for stdin)");
  cmd_synth->add_option("--random", synth_random,
                        "Synthesize a Haar-random unitary of this size");
  cmd_synth->add_flag("--grid", synth_grid, "Emit the angle grid as JSON");

  // euler2 / euler3
  auto* cmd_e2 = app.add_subcommand("euler2", "Two-axis Euler angles");
  std::string e2_file;
  cmd_e2->add_option("file", e2_file)->required();
  auto* cmd_e3 = app.add_subcommand("euler3", "Three-axis Euler angles");
  std::string e3_file;
  cmd_e3->add_option("file", e3_file)->required();

  // check-axioms
  auto* cmd_axioms =
      app.add_subcommand("check-axioms", "Numeric soundness of every axiom");
  int axiom_instances = 50;
  cmd_axioms->add_option("--instances", axiom_instances);

  // rank
  auto* cmd_rank = app.add_subcommand("rank", "Termination ranking tuple");
  std::string rank_file;
  cmd_rank->add_option("file", rank_file)->required();

  // fmt
  auto* cmd_fmt = app.add_subcommand("fmt", "Convert between DSL and JSON");
  std::string fmt_file, fmt_to = "dsl";
  cmd_fmt->add_option("file", fmt_file)->required();
  cmd_fmt->add_option("--to", fmt_to, "Target format (dsl|json)")
      ->check(CLI::IsMember({"dsl", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_eval->parsed()) {
      const lov::Circuit c = load_circuit(eval_file);
      lov::FockVector in = eval_input.empty()
                               ? lov::FockVector::vacuum(c.n_in)
                               : lov::FockVector::basis(parse_occ(eval_input));
      lov::EvalConfig cfg;
      cfg.prune_eps = opt.prune_eps;
      const lov::FockVector out = lov::eval_circuit(c, in, cfg);
      emit(opt, "eval", fock_json(out), out.to_text() + "\n");
      return 0;
    }
    if (cmd_norm->parsed()) {
      const lov::Circuit c = load_circuit(norm_file);
      lov::RewriteOptions ropts = opt.rewrite();
      if (norm_trace)
        ropts.trace = [](long step, lov::RuleId rule, lov::Location loc,
                         const lov::RankTuple& rank) {
          std::cerr << "step=" << step << " rule=" << lov::rule_name(rule)
                    << " loc=" << loc.column << "," << loc.wire
                    << " rank=" << rank.to_string() << "\n";
        };
      const lov::NormalizeResult r = lov::normalize(c, ropts);
      if (r.zero) {
        emit(opt, "normalize",
             json{{"zero", true}, {"n", r.zero_form.n}, {"m", r.zero_form.m}},
             "zero form: " + std::to_string(r.zero_form.n) + " -> " +
                 std::to_string(r.zero_form.m) + "\n");
        return 0;
      }
      json res{{"zero", false},
               {"n", r.nf.n},
               {"m", r.nf.m},
               {"n_tilde", r.nf.n_tilde},
               {"m_tilde", r.nf.m_tilde},
               {"triangle", triangle_json(r.nf.triangle)},
               {"f", fock_json(r.nf.f)},
               {"K", r.nf.support()},
               {"g", fock_json(r.nf.derived_g().coeffs)},
               {"steps", r.steps}};
      std::string text = "normal form " + std::to_string(r.nf.n) + " -> " +
                         std::to_string(r.nf.m) +
                         "  (n~=" + std::to_string(r.nf.n_tilde) +
                         ", m~=" + std::to_string(r.nf.m_tilde) + ")\n";
      text += "triangle: " + triangle_json(r.nf.triangle).dump() + "\n";
      text += "f: " + r.nf.f.to_text() + "\n";
      text += "K:";
      for (long long k : r.nf.support()) text += " " + std::to_string(k);
      text += "\ng: " + r.nf.derived_g().coeffs.to_text() + "\n";
      emit(opt, "normalize", res, text);
      return 0;
    }
    if (cmd_equiv->parsed()) {
      const lov::Circuit a = load_circuit(equiv_a);
      const lov::Circuit b = load_circuit(equiv_b);
      const int cutoff = std::max(effective_cutoff(opt, a),
                                  effective_cutoff(opt, b));
      const lov::EquivVerdict v = lov::equiv(a, b, cutoff, opt.rewrite());
      json res{{"equivalent", v.equivalent()}};
      std::string text = v.equivalent() ? "equivalent\n" : "distinct";
      if (!v.equivalent()) {
        res["witness"] = v.witness;
        text += ": " + v.witness;
        if (!v.witness_input.empty()) {
          res["witness_input"] = v.witness_input;
          res["witness_delta"] = v.witness_delta;
          text += " (witness input photons:";
          for (int k : v.witness_input) text += " " + std::to_string(k);
          text += ")";
        }
        text += "\n";
      }
      emit(opt, "equiv", res, text);
      return v.equivalent() ? 0 : 1;
    }
    if (cmd_synth->parsed()) {
      lov::Matrix u;
      if (synth_random > 0)
        u = lov::random_unitary(synth_random, opt.seed);
      else if (!synth_file.empty())
        u = lov::matrix_from_json(read_input(synth_file));
      else
        lov::fail(lov::ErrorKind::BadInput,
                  "synth needs a matrix file or --random");
      const lov::TriangleParams t = lov::synthesize_triangle(u);
      if (synth_grid || opt.format == "json") {
        emit(opt, "synth", triangle_json(t), triangle_json(t).dump(2) + "\n");
      } else {
        std::cout << lov::print_dsl(lov::triangle_to_circuit(t));
      }
      return 0;
    }
    if (cmd_e2->parsed()) {
      const lov::Matrix u = lov::matrix_from_json(read_input(e2_file));
      const lov::E2Lhs a = lov::solve_e2_lhs(u);
      const lov::E2Rhs b = lov::solve_e2_rhs(u);
      json res{{"lhs", {{"a0", a.a0}, {"a1", a.a1}, {"a2", a.a2}, {"a3", a.a3}}},
               {"rhs", {{"b0", b.b0}, {"b1", b.b1}, {"b2", b.b2}, {"b3", b.b3}}}};
      emit(opt, "euler2", res, res.dump(2) + "\n");
      return 0;
    }
    if (cmd_e3->parsed()) {
      const lov::Matrix u = lov::matrix_from_json(read_input(e3_file));
      const auto [g, d] = lov::solve_e3(u);
      json res{{"lhs", {{"g1", g.g1}, {"g2", g.g2}, {"g3", g.g3}}},
               {"rhs", {{"d1", d.d1}, {"d2", d.d2}, {"d3", d.d3}}}};
      emit(opt, "euler3", res, res.dump(2) + "\n");
      return 0;
    }
    if (cmd_axioms->parsed()) {
      json table = json::array();
      std::string text;
      bool all_ok = true;
      for (int a = 0; a < lov::kAxiomCount; ++a) {
        const auto id = static_cast<lov::AxiomId>(a);
        double worst = 0.0;
        for (int i = 0; i < axiom_instances; ++i)
          worst = std::max(worst,
                           lov::check_axiom(id, opt.seed + std::uint64_t(i)));
        const bool ok = worst < 1e-9;
        all_ok = all_ok && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-8s residual %.3e  %s\n",
                      lov::axiom_name(id), worst, ok ? "ok" : "FAIL");
        text += buf;
        table.push_back(json{{"axiom", lov::axiom_name(id)},
                             {"residual", worst},
                             {"ok", ok}});
      }
      emit(opt, "check-axioms", table, text);
      return all_ok ? 0 : 1;
    }
    if (cmd_rank->parsed()) {
      const lov::Circuit c = load_circuit(rank_file);
      const lov::RankTuple r = lov::ranking(c);
      emit(opt, "rank", json{{"rank", r.to_string()}}, r.to_string() + "\n");
      return 0;
    }
    if (cmd_fmt->parsed()) {
      const lov::Circuit c = load_circuit(fmt_file);
      if (fmt_to == "json")
        emit(opt, "fmt", json::parse(lov::circuit_to_json(c)),
             lov::circuit_to_json(c) + "\n");
      else
        std::cout << lov::print_dsl(c);
      return 0;
    }
  } catch (const lov::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.kind()) {
      case lov::ErrorKind::Internal:
      case lov::ErrorKind::StepLimitExceeded:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
