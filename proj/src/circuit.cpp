#include "lov/circuit.hpp"

#include <algorithm>
#include <cmath>

namespace lov {

int gen_in_width(const Generator& g) {
  if (std::get_if<PhaseShifter>(&g)) return 1;
  if (std::get_if<BeamSplitter>(&g)) return 2;
  if (std::get_if<Swap>(&g)) return 2;
  if (const auto* d = std::get_if<Detector>(&g)) return d->effect.modes();
  return 0;  // Source
}

int gen_out_width(const Generator& g) {
  if (std::get_if<PhaseShifter>(&g)) return 1;
  if (std::get_if<BeamSplitter>(&g)) return 2;
  if (std::get_if<Swap>(&g)) return 2;
  if (const auto* s = std::get_if<Source>(&g)) return s->state.modes();
  return 0;  // Detector
}

int gen_anchor(const Generator& g) {
  return std::visit([](const auto& x) { return x.wire; }, g);
}

bool gen_is_source(const Generator& g) {
  return std::holds_alternative<Source>(g);
}
bool gen_is_detector(const Generator& g) {
  return std::holds_alternative<Detector>(g);
}

bool Circuit::is_lopp() const {
  for (const auto& col : columns)
    for (const auto& g : col.gens)
      if (gen_is_source(g) || gen_is_detector(g)) return false;
  return true;
}

ColumnLayout column_layout(const Column& col, int in_width) {
  ColumnLayout layout;
  layout.in_width = in_width;
  int in_pos = 0, out_pos = 0;
  for (std::size_t i = 0; i < col.gens.size(); ++i) {
    const Generator& g = col.gens[i];
    const int anchor = gen_anchor(g);
    const bool src = gen_is_source(g);
    const int cursor = src ? out_pos : in_pos;
    if (anchor < cursor)
      fail(ErrorKind::InvariantViolation,
           "generator anchors overlap or are out of order in a column");
    if (anchor > cursor) {
      const int run = anchor - cursor;
      layout.slots.push_back({-1, run, in_pos, out_pos});
      in_pos += run;
      out_pos += run;
    }
    if (!src && in_pos + gen_in_width(g) > in_width)
      fail(ErrorKind::InvariantViolation, "generator extends past column");
    layout.slots.push_back({int(i), 0, in_pos, out_pos});
    in_pos += gen_in_width(g);
    out_pos += gen_out_width(g);
  }
  if (in_pos > in_width)
    fail(ErrorKind::InvariantViolation, "column consumes too many wires");
  if (in_pos < in_width)
    layout.slots.push_back({-1, in_width - in_pos, in_pos, out_pos});
  out_pos += in_width - in_pos;
  layout.out_width = out_pos;
  return layout;
}

std::vector<int> boundary_widths(const Circuit& c) {
  std::vector<int> widths;
  widths.reserve(c.columns.size() + 1);
  widths.push_back(c.n_in);
  for (const auto& col : c.columns) {
    const ColumnLayout layout = column_layout(col, widths.back());
    widths.push_back(layout.out_width);
  }
  return widths;
}

ValidationReport validate(const Circuit& c) {
  ValidationReport report;
  if (c.n_in < 0 || c.n_out < 0)
    report.issues.push_back({"ArityViolation", "negative mode count", -1});
  int width = c.n_in;
  for (std::size_t j = 0; j < c.columns.size(); ++j) {
    const Column& col = c.columns[j];
    for (const auto& g : col.gens) {
      if (const auto* s = std::get_if<Source>(&g)) {
        if (s->state.modes() < 1)
          report.issues.push_back(
              {"ArityViolation", "source must produce at least one mode",
               int(j)});
      } else if (const auto* d = std::get_if<Detector>(&g)) {
        if (d->effect.modes() < 1)
          report.issues.push_back(
              {"ArityViolation", "detector must consume at least one mode",
               int(j)});
      }
    }
    // Anchor scan; overlaps surface as layout failures.
    int in_pos = 0, out_pos = 0;
    bool broken = false;
    for (const auto& g : col.gens) {
      const int anchor = gen_anchor(g);
      const bool src = gen_is_source(g);
      const int cursor = src ? out_pos : in_pos;
      if (anchor < cursor) {
        report.issues.push_back(
            {"OverlapViolation",
             "generators overlap or are out of order within the column",
             int(j)});
        broken = true;
        break;
      }
      const int run = anchor - cursor;
      in_pos += run + gen_in_width(g);
      out_pos += run + gen_out_width(g);
    }
    if (broken) break;
    if (in_pos > width) {
      report.issues.push_back(
          {"OverlapViolation", "column consumes more wires than available",
           int(j)});
      break;
    }
    out_pos += width - in_pos;
    width = out_pos;
  }
  if (report.ok() && width != c.n_out)
    report.issues.push_back(
        {"ModeChain", "columns end with " + std::to_string(width) +
                          " wires, circuit declares " +
                          std::to_string(c.n_out),
         -1});
  return report;
}

void require_valid(const Circuit& c) {
  const ValidationReport r = validate(c);
  if (!r.ok())
    fail(ErrorKind::InvariantViolation,
         r.issues.front().code + ": " + r.issues.front().message);
}

Circuit compose_seq(const Circuit& c1, const Circuit& c2) {
  if (c1.n_out != c2.n_in)
    fail(ErrorKind::ModeMismatch,
         "cannot compose " + std::to_string(c1.n_out) + " outputs into " +
             std::to_string(c2.n_in) + " inputs");
  Circuit out;
  out.n_in = c1.n_in;
  out.n_out = c2.n_out;
  out.columns = c1.columns;
  out.columns.insert(out.columns.end(), c2.columns.begin(), c2.columns.end());
  return out;
}

namespace {
Generator shifted(const Generator& g, int delta_in, int delta_out) {
  Generator out = g;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Source>)
          x.wire += delta_out;
        else
          x.wire += delta_in;
      },
      out);
  return out;
}
}  // namespace

Circuit compose_tensor(const Circuit& c1, const Circuit& c2) {
  Circuit out;
  out.n_in = c1.n_in + c2.n_in;
  out.n_out = c1.n_out + c2.n_out;
  const auto w1 = boundary_widths(c1);
  const std::size_t cols = std::max(c1.columns.size(), c2.columns.size());
  out.columns.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    Column& col = out.columns[j];
    if (j < c1.columns.size()) col.gens = c1.columns[j].gens;
    const int din = j < c1.columns.size() ? w1[j] : c1.n_out;
    const int dout = j < c1.columns.size() ? w1[j + 1] : c1.n_out;
    if (j < c2.columns.size())
      for (const auto& g : c2.columns[j].gens)
        col.gens.push_back(shifted(g, din, dout));
  }
  return out;
}

Circuit identity_circuit(int n) {
  Circuit c;
  c.n_in = c.n_out = n;
  return c;
}

Circuit single_ps(int n_modes, int wire, Angle phi) {
  Circuit c = identity_circuit(n_modes);
  c.columns.push_back({{PhaseShifter{wire, std::move(phi)}}});
  return c;
}

Circuit single_bs(int n_modes, int wire, Angle theta) {
  Circuit c = identity_circuit(n_modes);
  c.columns.push_back({{BeamSplitter{wire, std::move(theta)}}});
  return c;
}

Circuit single_swap(int n_modes, int wire) {
  Circuit c = identity_circuit(n_modes);
  c.columns.push_back({{Swap{wire}}});
  return c;
}

namespace {

// Pass-through map of a column: for each output position, the input position
// feeding it through an identity, or -1 when a generator produces it.
std::vector<int> passthrough_map(const Column& col, int in_width) {
  const ColumnLayout layout = column_layout(col, in_width);
  std::vector<int> map(std::size_t(layout.out_width), -1);
  for (const ColumnSlot& slot : layout.slots) {
    if (slot.gen_index < 0)
      for (int i = 0; i < slot.identity_count; ++i)
        map[std::size_t(slot.out_pos + i)] = slot.in_pos + i;
  }
  return map;
}

bool insert_sorted(Column& col, int in_width, const Generator& g) {
  // Anchors pin the vertical slot; probe insertion points until the scan
  // validates.
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

}  // namespace

Circuit canonicalize_layout(const Circuit& c) {
  require_valid(c);
  Circuit out = c;
  bool moved = true;
  while (moved) {
    moved = false;
    auto widths = boundary_widths(out);
    for (std::size_t j = 1; j < out.columns.size() && !moved; ++j) {
      Column& col = out.columns[j];
      for (std::size_t gi = 0; gi < col.gens.size() && !moved; ++gi) {
        const Generator& g = col.gens[gi];
        if (gen_is_source(g) || gen_is_detector(g)) continue;
        const int a = gen_anchor(g);
        const int k = gen_in_width(g);
        const auto map = passthrough_map(out.columns[j - 1], widths[j - 1]);
        bool ok = true;
        for (int i = 0; i < k; ++i) {
          if (a + i >= int(map.size()) || map[std::size_t(a + i)] < 0 ||
              (i > 0 && map[std::size_t(a + i)] !=
                            map[std::size_t(a + i - 1)] + 1)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        Generator moved_gen = shifted(g, map[std::size_t(a)] - a,
                                      map[std::size_t(a)] - a);
        Column prev = out.columns[j - 1];
        if (!insert_sorted(prev, widths[j - 1], moved_gen)) continue;
        out.columns[j - 1] = prev;
        col.gens.erase(col.gens.begin() + long(gi));
        moved = true;
      }
    }
  }
  // Drop empty columns.
  Circuit packed;
  packed.n_in = out.n_in;
  packed.n_out = out.n_out;
  for (auto& col : out.columns)
    if (!col.gens.empty()) packed.columns.push_back(std::move(col));
  return packed;
}

namespace {
bool gen_equal(const Generator& a, const Generator& b, double angle_eps,
               double amp_eps) {
  if (a.index() != b.index()) return false;
  if (gen_anchor(a) != gen_anchor(b)) return false;
  if (const auto* pa = std::get_if<PhaseShifter>(&a))
    return std::abs(pa->phi.value - std::get<PhaseShifter>(b).phi.value) <=
           angle_eps;
  if (const auto* ba = std::get_if<BeamSplitter>(&a))
    return std::abs(ba->theta.value - std::get<BeamSplitter>(b).theta.value) <=
           angle_eps;
  if (std::get_if<Swap>(&a)) return true;
  if (const auto* sa = std::get_if<Source>(&a))
    return sa->state.approx_equal(std::get<Source>(b).state, amp_eps);
  const auto& da = std::get<Detector>(a);
  return da.effect.coeffs.approx_equal(std::get<Detector>(b).effect.coeffs,
                                       amp_eps);
}
}  // namespace

bool structurally_equal(const Circuit& a, const Circuit& b, double angle_eps,
                        double amp_eps) {
  const Circuit ca = canonicalize_layout(a);
  const Circuit cb = canonicalize_layout(b);
  if (ca.n_in != cb.n_in || ca.n_out != cb.n_out) return false;
  if (ca.columns.size() != cb.columns.size()) return false;
  for (std::size_t j = 0; j < ca.columns.size(); ++j) {
    const auto& ga = ca.columns[j].gens;
    const auto& gb = cb.columns[j].gens;
    if (ga.size() != gb.size()) return false;
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (!gen_equal(ga[i], gb[i], angle_eps, amp_eps)) return false;
  }
  return true;
}

}  // namespace lov
