#include "lov/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lov {

namespace {

[[noreturn]] void syntax_error(int line, int col, const std::string& msg) {
  fail(ErrorKind::SyntaxError,
       "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " +
           msg);
}

[[noreturn]] void semantic_error(int line, const std::string& msg) {
  fail(ErrorKind::SemanticError, "line " + std::to_string(line) + ": " + msg);
}

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  void expect(char c) {
    if (peek() != c)
      syntax_error(line, int(pos) + 1, std::string("expected '") + c + "'");
    ++pos;
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '{' && s[pos] != '}' && s[pos] != ';' && s[pos] != ':' &&
           s[pos] != ',' && s[pos] != '@')
      ++pos;
    if (start == pos) syntax_error(line, int(pos) + 1, "expected a token");
    return s.substr(start, pos - start);
  }
};

int parse_int(const std::string& t, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(t, &used);
  } catch (const std::exception&) {
    semantic_error(line, "bad integer '" + t + "'");
  }
  if (used != t.size()) semantic_error(line, "bad integer '" + t + "'");
  return int(v);
}

FockVector parse_state_block(Cursor& cur, int modes) {
  FockVector state(modes);
  cur.expect('{');
  if (cur.peek() == '}') {
    ++cur.pos;
    return state;  // explicit zero state
  }
  while (true) {
    OccVec occ;
    while (true) {
      occ.push_back(parse_int(cur.word(), cur.line));
      if (cur.peek() == ',') {
        ++cur.pos;
        continue;
      }
      break;
    }
    if (int(occ.size()) != modes)
      semantic_error(cur.line, "occupation vector has " +
                                   std::to_string(occ.size()) +
                                   " entries, state declares " +
                                   std::to_string(modes) + " modes");
    for (int k : occ)
      if (k < 0) semantic_error(cur.line, "negative photon count");
    cur.expect(':');
    state.add_term(occ, parse_complex_text(cur.word()));
    if (cur.peek() == ';') {
      ++cur.pos;
      continue;
    }
    cur.expect('}');
    break;
  }
  return state;
}

bool try_insert(Column& col, int in_width, const Generator& g) {
  for (std::size_t pos = 0; pos <= col.gens.size(); ++pos) {
    Column trial = col;
    trial.gens.insert(trial.gens.begin() + long(pos), g);
    try {
      column_layout(trial, in_width);
    } catch (const Error&) {
      continue;
    }
    col = trial;
    return true;
  }
  return false;
}

struct PendingColumn {
  std::vector<Generator> anchored;          // ps/bs/swap, explicit wires
  std::vector<Generator> anchored_endcaps;  // source/detector with @wire
  std::vector<Generator> trailing;          // bottom-block sources/detectors
  int line = 0;

  bool empty() const {
    return anchored.empty() && anchored_endcaps.empty() && trailing.empty();
  }
};

// Anchors the bottom block: detectors take the last inputs, sources hang
// below everything; listed order is top to bottom inside the block.
void assign_bottom_anchors(std::vector<Generator>& trailing, int width,
                           int in_used, int out_used, int line) {
  int det_total = 0;
  for (const auto& g : trailing)
    if (gen_is_detector(g)) det_total += gen_in_width(g);
  if (in_used > width - det_total)
    semantic_error(line, "detectors overlap other generators");
  int vin = width - det_total;
  int vout = out_used + (vin - in_used);
  for (auto& g : trailing) {
    if (gen_is_detector(g)) {
      std::get<Detector>(g).wire = vin;
      vin += gen_in_width(g);
    } else {
      std::get<Source>(g).wire = vout;
      vout += gen_out_width(g);
    }
  }
}

void flush_column(Circuit& c, PendingColumn& pending, int& width) {
  if (pending.empty()) return;
  Column col;
  std::stable_sort(pending.anchored.begin(), pending.anchored.end(),
                   [](const Generator& a, const Generator& b) {
                     return gen_anchor(a) < gen_anchor(b);
                   });
  int in_pos = 0, out_pos = 0;
  for (const auto& g : pending.anchored) {
    const int a = gen_anchor(g);
    if (a < in_pos)
      semantic_error(pending.line, "generators overlap within a column");
    if (a + gen_in_width(g) > width)
      semantic_error(pending.line, "wire index " + std::to_string(a) +
                                       " out of range for " +
                                       std::to_string(width) + " wires");
    out_pos += (a - in_pos) + gen_out_width(g);
    in_pos = a + gen_in_width(g);
    col.gens.push_back(g);
  }
  assign_bottom_anchors(pending.trailing, width, in_pos, out_pos,
                        pending.line);
  for (const auto& g : pending.trailing) col.gens.push_back(g);
  for (const auto& g : pending.anchored_endcaps)
    if (!try_insert(col, width, g))
      semantic_error(pending.line, "anchored source/detector does not fit");
  try {
    width = column_layout(col, width).out_width;
  } catch (const Error& e) {
    semantic_error(pending.line, e.what());
  }
  c.columns.push_back(std::move(col));
  pending = PendingColumn{};
}

}  // namespace

Angle parse_angle_text(const std::string& token) {
  try {
    const bool has_pi = token.find("pi") != std::string::npos;
    if (!has_pi) {
      std::size_t used = 0;
      double v = std::stod(token, &used);
      if (used != token.size())
        fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
      return Angle(v);
    }
    // [-][<m>*]pi[/<d>]
    const std::string& t = token;
    double sign = 1.0;
    std::size_t p = 0;
    if (p < t.size() && (t[p] == '-' || t[p] == '+')) {
      if (t[p] == '-') sign = -1.0;
      ++p;
    }
    double mult = 1.0;
    const std::size_t star = t.find('*', p);
    if (star != std::string::npos) {
      std::size_t used = 0;
      mult = std::stod(t.substr(p, star - p), &used);
      if (used != star - p)
        fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
      p = star + 1;
    }
    if (t.compare(p, 2, "pi") != 0)
      fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
    p += 2;
    double div = 1.0;
    if (p < t.size()) {
      if (t[p] != '/')
        fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
      std::size_t used = 0;
      div = std::stod(t.substr(p + 1), &used);
      if (used != t.size() - p - 1 || div == 0.0)
        fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
    }
    return Angle(sign * mult * M_PI / div, token);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::SyntaxError, "bad angle '" + token + "'");
  }
}

std::string angle_to_text(const Angle& a) {
  if (!a.expr.empty()) return a.expr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a.value);
  return buf;
}

Complex parse_complex_text(const std::string& token) {
  const std::string& t = token;
  if (t.empty()) fail(ErrorKind::SyntaxError, "empty complex literal");
  auto parse_part = [&](std::size_t from, std::size_t to, bool imag) {
    std::string part = t.substr(from, to - from);
    if (imag) {
      if (part.empty() || part == "+")
        part = "1";
      else if (part == "-")
        part = "-1";
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::SyntaxError, "bad complex literal '" + token + "'");
    }
    if (used != part.size())
      fail(ErrorKind::SyntaxError, "bad complex literal '" + token + "'");
    return v;
  };
  if (t.back() == 'i') {
    std::size_t split = std::string::npos;
    for (std::size_t k = t.size() - 1; k > 0; --k) {
      if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    if (split == std::string::npos)
      return Complex(0.0, parse_part(0, t.size() - 1, true));
    return Complex(parse_part(0, split, false),
                   parse_part(split, t.size() - 1, true));
  }
  return Complex(parse_part(0, t.size(), false), 0.0);
}

Circuit parse_dsl(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  Circuit c;
  bool have_header = false;
  int width = 0;
  PendingColumn pending;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    Cursor cur{raw, 0, line_no};
    if (cur.eof()) continue;
    std::string kw = cur.word();
    if (!have_header) {
      if (kw != "circuit")
        syntax_error(line_no, 1, "expected 'circuit <n_in> -> <n_out>'");
      int n_in = parse_int(cur.word(), line_no);
      if (cur.word() != "->") syntax_error(line_no, 1, "expected '->'");
      int n_out = parse_int(cur.word(), line_no);
      if (n_in < 0 || n_out < 0) semantic_error(line_no, "negative arity");
      c.n_in = n_in;
      c.n_out = n_out;
      width = n_in;
      have_header = true;
      continue;
    }
    pending.line = line_no;
    if (kw == "---") {
      flush_column(c, pending, width);
      continue;
    }
    if (kw == "ps" || kw == "bs") {
      int wire = parse_int(cur.word(), line_no);
      Angle a = parse_angle_text(cur.word());
      if (wire < 0) semantic_error(line_no, "negative wire index");
      if (kw == "ps")
        pending.anchored.push_back(PhaseShifter{wire, std::move(a)});
      else
        pending.anchored.push_back(BeamSplitter{wire, std::move(a)});
    } else if (kw == "swap") {
      int wire = parse_int(cur.word(), line_no);
      if (wire < 0) semantic_error(line_no, "negative wire index");
      pending.anchored.push_back(Swap{wire});
    } else if (kw == "source" || kw == "detector") {
      int k = parse_int(cur.word(), line_no);
      if (k < 1) semantic_error(line_no, kw + " must span at least one mode");
      int at = -1;
      if (cur.peek() == '@') {
        ++cur.pos;
        at = parse_int(cur.word(), line_no);
        if (at < 0) semantic_error(line_no, "negative wire index");
      }
      FockVector state = parse_state_block(cur, k);
      Generator g;
      if (kw == "source")
        g = Source{at < 0 ? 0 : at, std::move(state)};
      else
        g = Detector{at < 0 ? 0 : at, DualFockVector(std::move(state))};
      if (at < 0)
        pending.trailing.push_back(std::move(g));
      else
        pending.anchored_endcaps.push_back(std::move(g));
    } else {
      syntax_error(line_no, 1, "unknown statement '" + kw + "'");
    }
    if (!cur.eof())
      syntax_error(line_no, int(cur.pos) + 1, "trailing characters");
  }
  if (!have_header) fail(ErrorKind::SyntaxError, "missing circuit header");
  flush_column(c, pending, width);
  if (width != c.n_out)
    semantic_error(line_no, "circuit ends with " + std::to_string(width) +
                                " wires, header declares " +
                                std::to_string(c.n_out));
  return c;
}

std::string print_dsl(const Circuit& c) {
  require_valid(c);
  std::string out = "circuit " + std::to_string(c.n_in) + " -> " +
                    std::to_string(c.n_out) + "\n";
  const auto widths = boundary_widths(c);
  for (std::size_t j = 0; j < c.columns.size(); ++j) {
    if (j) out += "---\n";
    const Column& col = c.columns[j];
    // Check whether the plain bottom-block form reparses to these anchors.
    std::vector<Generator> anchored, endcaps;
    for (const auto& g : col.gens)
      (gen_is_source(g) || gen_is_detector(g) ? endcaps : anchored)
          .push_back(g);
    bool plain = true;
    {
      int in_pos = 0, out_pos = 0;
      for (const auto& g : anchored) {
        const int a = gen_anchor(g);
        out_pos += (a - in_pos) + gen_out_width(g);
        in_pos = a + gen_in_width(g);
      }
      std::vector<Generator> probe = endcaps;
      try {
        assign_bottom_anchors(probe, widths[j], in_pos, out_pos, 0);
        for (std::size_t i = 0; i < endcaps.size(); ++i)
          if (gen_anchor(probe[i]) != gen_anchor(endcaps[i])) plain = false;
        // Listed order must also match: endcaps must come after anchored
        // gens in the stored order for the plain form to reproduce it.
        std::size_t first_endcap = col.gens.size();
        for (std::size_t i = 0; i < col.gens.size(); ++i)
          if (gen_is_source(col.gens[i]) || gen_is_detector(col.gens[i])) {
            first_endcap = i;
            break;
          }
        for (std::size_t i = first_endcap; i < col.gens.size(); ++i)
          if (!gen_is_source(col.gens[i]) && !gen_is_detector(col.gens[i]))
            plain = false;
      } catch (const Error&) {
        plain = false;
      }
    }
    for (const auto& g : col.gens) {
      if (const auto* ps = std::get_if<PhaseShifter>(&g)) {
        out += "ps " + std::to_string(ps->wire) + " " +
               angle_to_text(ps->phi) + "\n";
      } else if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
        out += "bs " + std::to_string(bs->wire) + " " +
               angle_to_text(bs->theta) + "\n";
      } else if (const auto* sw = std::get_if<Swap>(&g)) {
        out += "swap " + std::to_string(sw->wire) + "\n";
      } else if (const auto* src = std::get_if<Source>(&g)) {
        out += "source " + std::to_string(src->state.modes());
        if (!plain) out += " @ " + std::to_string(src->wire);
        out += " " + src->state.to_text() + "\n";
      } else if (const auto* det = std::get_if<Detector>(&g)) {
        out += "detector " + std::to_string(det->effect.modes());
        if (!plain) out += " @ " + std::to_string(det->wire);
        out += " " + det->effect.coeffs.to_text() + "\n";
      }
    }
  }
  return out;
}

}  // namespace lov
