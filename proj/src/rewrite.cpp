#include "lov/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "lov/euler.hpp"

namespace lov {

namespace {
constexpr double kAngleEps = 1e-9;
constexpr double kAmpEps = 1e-9;
}  // namespace

const char* rule_name(RuleId id) {
  switch (id) {
    case RuleId::PhaseMod2Pi: return "phase-mod-2pi";
    case RuleId::BsMod2Pi: return "bs-mod-2pi";
    case RuleId::PhaseFusion: return "phase-fusion";
    case RuleId::ZeroPhase: return "zero-phase";
    case RuleId::ZeroBs: return "zero-bs";
    case RuleId::TopPhase: return "top-phase";
    case RuleId::PiOverTwo: return "pi-over-2";
    case RuleId::ThetaRange: return "theta-range";
    case RuleId::MinusPi: return "minus-pi";
    case RuleId::E3Rewrite: return "E3-rewrite";
    case RuleId::E2Rewrite: return "E2-rewrite";
    case RuleId::ZeroF: return "zero-f";
    case RuleId::ZeroG: return "zero-g";
    case RuleId::RemoveG: return "remove-g";
    case RuleId::WireRemoval: return "wire-removal";
    case RuleId::MergeSources: return "ss";
    case RuleId::AbsorbBsSource: return "s-b";
    case RuleId::AbsorbPsSource: return "s-p";
    case RuleId::MergeDetectors: return "dd";
    case RuleId::AbsorbBsDetector: return "b-d";
    case RuleId::AbsorbPsDetector: return "p-d";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Cantor pairing

long long cantor_pair(long long l, long long l2) {
  const long long s = l + l2;
  return s * (s + 1) / 2 + l2;
}

std::pair<long long, long long> cantor_unpair(long long x) {
  long long w = (long long)((std::sqrt(8.0 * double(x) + 1.0) - 1.0) / 2.0);
  while (w * (w + 1) / 2 > x) --w;
  while ((w + 1) * (w + 2) / 2 <= x) ++w;
  const long long l2 = x - w * (w + 1) / 2;
  return {w - l2, l2};
}

long long pair_m(const OccVec& v) {
  if (v.empty()) return 0;
  long long acc = v.back();
  for (int i = int(v.size()) - 2; i >= 0; --i)
    acc = cantor_pair(v[std::size_t(i)], acc);
  return acc;
}

OccVec unpair_m(long long x, int m) {
  OccVec v;
  if (m <= 0) return v;
  for (int i = 0; i < m - 1; ++i) {
    auto [a, b] = cantor_unpair(x);
    v.push_back(int(a));
    x = b;
  }
  v.push_back(int(x));
  return v;
}

// ---------------------------------------------------------------------------
// Rank tuple

bool RankTuple::operator==(const RankTuple& o) const {
  return x1 == o.x1 && x2 == o.x2 && x3 == o.x3 && x4 == o.x4 && x5 == o.x5 &&
         x6 == o.x6;
}

namespace {
// digits little-endian base 9, normalized (each < 9, no leading zeros)
void normalize_digits(std::vector<std::uint32_t>& d) {
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint64_t v = d[i] + carry;
    d[i] = std::uint32_t(v % 9);
    carry = v / 9;
  }
  while (carry) {
    d.push_back(std::uint32_t(carry % 9));
    carry /= 9;
  }
  while (!d.empty() && d.back() == 0) d.pop_back();
}

bool digits_less(const std::vector<std::uint32_t>& a,
                 const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

std::string digits_to_decimal(std::vector<std::uint32_t> d) {
  if (d.empty()) return "0";
  std::string out;
  while (!d.empty()) {
    // divide the base-9 number by 10
    std::uint64_t rem = 0;
    for (std::size_t i = d.size(); i-- > 0;) {
      const std::uint64_t cur = rem * 9 + d[i];
      d[i] = std::uint32_t(cur / 10);
      rem = cur % 10;
    }
    out.push_back(char('0' + rem));
    while (!d.empty() && d.back() == 0) d.pop_back();
  }
  std::reverse(out.begin(), out.end());
  return out;
}
}  // namespace

bool RankTuple::operator<(const RankTuple& o) const {
  if (x1 != o.x1) return x1 < o.x1;
  if (x2 != o.x2) return x2 < o.x2;
  if (x3 != o.x3) return digits_less(x3, o.x3);
  if (x4 != o.x4) return x4 < o.x4;
  if (x5 != o.x5) return x5 < o.x5;
  return x6 < o.x6;
}

std::string RankTuple::to_string() const {
  return "(" + std::to_string(x1) + "," + std::to_string(x2) + "," +
         digits_to_decimal(x3) + "," + std::to_string(x4) + "," +
         std::to_string(x5) + "," + std::to_string(x6) + ")";
}

// ---------------------------------------------------------------------------
// Wire walking

namespace {

struct WireHit {
  bool found = false;
  int col = -1;
  int gen = -1;
  int port = 0;
  int end_pos = -1;  // position at circuit output when !found
};

WireHit follow_wire(const Circuit& c, const std::vector<int>& widths,
                    int col_from, int pos) {
  WireHit hit;
  for (int j = col_from; j < int(c.columns.size()); ++j) {
    const ColumnLayout layout = column_layout(c.columns[std::size_t(j)],
                                              widths[std::size_t(j)]);
    bool advanced = false;
    for (const ColumnSlot& s : layout.slots) {
      if (s.gen_index < 0) {
        if (pos >= s.in_pos && pos < s.in_pos + s.identity_count) {
          pos = s.out_pos + (pos - s.in_pos);
          advanced = true;
          break;
        }
        continue;
      }
      const Generator& g = c.columns[std::size_t(j)].gens[std::size_t(s.gen_index)];
      const int w = gen_in_width(g);
      if (w > 0 && pos >= s.in_pos && pos < s.in_pos + w) {
        hit.found = true;
        hit.col = j;
        hit.gen = s.gen_index;
        hit.port = pos - s.in_pos;
        return hit;
      }
    }
    if (!advanced)
      fail(ErrorKind::Internal, "wire walk lost its position");
  }
  hit.end_pos = pos;
  return hit;
}

WireHit backtrack_wire(const Circuit& c, const std::vector<int>& widths,
                       int col_from, int pos) {
  // pos is an output position of column col_from.
  WireHit hit;
  for (int j = col_from; j >= 0; --j) {
    const ColumnLayout layout = column_layout(c.columns[std::size_t(j)],
                                              widths[std::size_t(j)]);
    bool advanced = false;
    for (const ColumnSlot& s : layout.slots) {
      if (s.gen_index < 0) {
        if (pos >= s.out_pos && pos < s.out_pos + s.identity_count) {
          pos = s.in_pos + (pos - s.out_pos);
          advanced = true;
          break;
        }
        continue;
      }
      const Generator& g = c.columns[std::size_t(j)].gens[std::size_t(s.gen_index)];
      const int w = gen_out_width(g);
      if (w > 0 && pos >= s.out_pos && pos < s.out_pos + w) {
        hit.found = true;
        hit.col = j;
        hit.gen = s.gen_index;
        hit.port = pos - s.out_pos;
        return hit;
      }
    }
    if (!advanced)
      fail(ErrorKind::Internal, "wire walk lost its position");
  }
  hit.end_pos = pos;
  return hit;
}

const Generator& gen_at(const Circuit& c, int col, int idx) {
  return c.columns[std::size_t(col)].gens[std::size_t(idx)];
}

double norm_angle(double v) { return mod_2pi(v); }

bool angle_is(double v, double target, double eps = kAngleEps) {
  return std::abs(norm_angle(v) - target) < eps ||
         std::abs(norm_angle(v) - target - 2 * M_PI) < eps;
}

bool angle_zero(double v, double eps = kAngleEps) {
  const double a = norm_angle(v);
  return a < eps || a > 2 * M_PI - eps;
}

bool in_range_2pi(double v) { return v >= 0.0 && v < 2 * M_PI; }

}  // namespace

// ---------------------------------------------------------------------------
// Ranking

RankTuple ranking(const Circuit& c) {
  require_valid(c);
  const auto widths = boundary_widths(c);
  const int ncols = int(c.columns.size());
  // splitter depths per boundary, computed right to left
  std::vector<std::vector<int>> depth(std::size_t(ncols) + 1);
  depth[std::size_t(ncols)] =
      std::vector<int>(std::size_t(widths.back()), 0);
  for (int j = ncols - 1; j >= 0; --j) {
    const ColumnLayout layout =
        column_layout(c.columns[std::size_t(j)], widths[std::size_t(j)]);
    std::vector<int> din(std::size_t(widths[std::size_t(j)]), 0);
    const auto& dout = depth[std::size_t(j) + 1];
    for (const ColumnSlot& s : layout.slots) {
      if (s.gen_index < 0) {
        for (int i = 0; i < s.identity_count; ++i)
          din[std::size_t(s.in_pos + i)] = dout[std::size_t(s.out_pos + i)];
        continue;
      }
      const Generator& g = gen_at(c, j, s.gen_index);
      if (std::get_if<PhaseShifter>(&g)) {
        din[std::size_t(s.in_pos)] = dout[std::size_t(s.out_pos)];
      } else if (std::get_if<BeamSplitter>(&g)) {
        const int v = 1 + std::max(dout[std::size_t(s.out_pos)],
                                   dout[std::size_t(s.out_pos) + 1]);
        din[std::size_t(s.in_pos)] = v;
        din[std::size_t(s.in_pos) + 1] = v;
      } else if (std::get_if<Swap>(&g)) {
        din[std::size_t(s.in_pos)] = dout[std::size_t(s.out_pos) + 1];
        din[std::size_t(s.in_pos) + 1] = dout[std::size_t(s.out_pos)];
      } else if (std::get_if<Detector>(&g)) {
        for (int i = 0; i < gen_in_width(g); ++i)
          din[std::size_t(s.in_pos + i)] = 0;
      }
    }
    depth[std::size_t(j)] = std::move(din);
  }

  RankTuple r;
  for (int j = 0; j < ncols; ++j) {
    const ColumnLayout layout =
        column_layout(c.columns[std::size_t(j)], widths[std::size_t(j)]);
    for (const ColumnSlot& s : layout.slots) {
      if (s.gen_index < 0) continue;
      const Generator& g = gen_at(c, j, s.gen_index);
      if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
        r.x1 += std::uint64_t(widths[std::size_t(j)] - bs->wire);
        const double th = bs->theta.value;
        if (!(th >= 0.0 && th <= M_PI / 2)) ++r.x2;
        if (!(th >= 0.0 && th < M_PI)) ++r.x2;
        if (!in_range_2pi(th)) ++r.x2;
      } else if (std::get_if<Swap>(&g)) {
        r.x1 += std::uint64_t(widths[std::size_t(j)] -
                              std::get<Swap>(g).wire);
      } else if (const auto* ps = std::get_if<PhaseShifter>(&g)) {
        const int d = depth[std::size_t(j) + 1][std::size_t(s.out_pos)];
        // Weight 4 on a splitter's upper input (the commuting pattern),
        // plus 1 when the angle still needs range reduction.
        int w = 2;
        const WireHit nxt = follow_wire(c, widths, j + 1, s.out_pos);
        if (nxt.found && nxt.port == 0 &&
            std::holds_alternative<BeamSplitter>(gen_at(c, nxt.col, nxt.gen)))
          w = 4;
        if (!in_range_2pi(ps->phi.value)) w += 1;
        if (int(r.x3.size()) <= d) r.x3.resize(std::size_t(d) + 1, 0);
        r.x3[std::size_t(d)] += std::uint32_t(w);
      } else if (const auto* src = std::get_if<Source>(&g)) {
        r.x5 += 1;
        // C1 counts the nonzero f_k components (distinct last indices);
        // counting raw terms would let remove-g increase x6.
        std::set<int> ks;
        for (const auto& [occ, amp] : src->state.terms())
          ks.insert(occ.back());
        r.x6 += std::uint64_t(ks.size());
        for (int i = 0; i < src->state.modes(); ++i) {
          const WireHit h = follow_wire(c, widths, j + 1, s.out_pos + i);
          if (h.found &&
              std::holds_alternative<Detector>(gen_at(c, h.col, h.gen)))
            r.x4 += 1;
        }
      } else if (const auto* det = std::get_if<Detector>(&g)) {
        r.x5 += 1;
        const FockVector& gv = det->effect.coeffs;
        const int mt = gv.modes() - 1;
        std::uint64_t c2 = gv.term_count(), c3 = 0;
        for (const auto& [occ, amp] : gv.terms()) {
          const long long ell = occ.back();
          const OccVec head(occ.begin(), occ.end() - 1);
          if (head == unpair_m(ell, mt) &&
              std::abs(amp - Complex(1.0, 0.0)) <= kAmpEps)
            ++c3;
        }
        // 3 C2 - 2 C3 rather than 2 C2 - C3: the coefficient transfer can
        // add one source component while removing a single detector term,
        // and the weaker weights would not strictly decrease there.
        r.x6 += 3 * c2 - 2 * c3;
      }
    }
  }
  normalize_digits(r.x3);
  return r;
}

// ---------------------------------------------------------------------------
// Preprocessing: swap desugaring, hoisting, pairing wire

namespace {

Circuit desugar_swaps(const Circuit& c) {
  Circuit out;
  out.n_in = c.n_in;
  out.n_out = c.n_out;
  for (const auto& col : c.columns) {
    bool has_swap = false;
    for (const auto& g : col.gens)
      if (std::holds_alternative<Swap>(g)) has_swap = true;
    if (!has_swap) {
      out.columns.push_back(col);
      continue;
    }
    // Split the column: each swap becomes phases then a pi/2 splitter.
    for (const auto& g : col.gens) {
      if (const auto* sw = std::get_if<Swap>(&g)) {
        Column ph;
        ph.gens.push_back(PhaseShifter{sw->wire, Angle(3 * M_PI / 2)});
        ph.gens.push_back(PhaseShifter{sw->wire + 1, Angle(3 * M_PI / 2)});
        out.columns.push_back(std::move(ph));
        out.columns.push_back({{BeamSplitter{sw->wire, Angle(M_PI / 2)}}});
      } else {
        out.columns.push_back({{g}});
      }
    }
  }
  return out;
}

void emit_block_up(std::vector<Column>& cols, int block_pos, int width) {
  // Move the wire at block_pos-1 below a block of `width` wires.
  for (int s = 0; s < width; ++s)
    cols.push_back({{Swap{block_pos - 1 + s}}});
}

void emit_block_down(std::vector<Column>& cols, int block_pos, int width) {
  // Move the wire at block_pos+width above the block.
  for (int s = 0; s < width; ++s)
    cols.push_back({{Swap{block_pos + width - 1 - s}}});
}

}  // namespace

Circuit preprocess_for_rewriting(const Circuit& c0) {
  require_valid(c0);
  // Collect sources and detectors in encounter order.
  struct Planned {
    FockVector state;
    int width;
  };
  std::vector<Planned> sources;
  int total_src = 0;
  for (const auto& col : c0.columns)
    for (const auto& g : col.gens)
      if (const auto* s = std::get_if<Source>(&g)) {
        sources.push_back({s->state, s->state.modes()});
        total_src += s->state.modes();
      }

  const int n = c0.n_in;
  const int w_total = n + total_src + 1;  // plus the pairing wire

  Circuit out;
  out.n_in = n;
  out.n_out = c0.n_out;
  Column col0;
  {
    int at = n;
    for (const auto& s : sources) {
      col0.gens.push_back(Source{at, s.state});
      at += s.width;
    }
    col0.gens.push_back(Source{at, FockVector::vacuum(1)});
  }
  out.columns.push_back(std::move(col0));

  // Simulation state: original-live wires occupy the top positions in their
  // original order, pending source blocks follow, then dead detector wires,
  // then the pairing wire.
  int live = n;
  int pending = total_src;
  int dead = 0;
  std::vector<DualFockVector> dead_effects;  // in death order
  std::size_t next_source = 0;

  const auto widths0 = boundary_widths(c0);
  for (std::size_t j = 0; j < c0.columns.size(); ++j) {
    const ColumnLayout layout =
        column_layout(c0.columns[j], widths0[j]);
    for (const ColumnSlot& s : layout.slots) {
      if (s.gen_index < 0) continue;
      const Generator& g = c0.columns[j].gens[std::size_t(s.gen_index)];
      if (std::holds_alternative<PhaseShifter>(g) ||
          std::holds_alternative<BeamSplitter>(g) ||
          std::holds_alternative<Swap>(g)) {
        out.columns.push_back({{g}});
      } else if (std::get_if<Source>(&g)) {
        const int k = sources[next_source].width;
        ++next_source;
        // The block sits at the top of the pending zone.
        int pos = live;
        const int dest = s.out_pos;
        while (pos > dest) {
          emit_block_up(out.columns, pos, k);
          --pos;
        }
        live += k;
        pending -= k;
      } else if (const auto* det = std::get_if<Detector>(&g)) {
        const int k = det->effect.modes();
        int pos = s.in_pos;
        const int dest = w_total - 1 - dead - k;
        while (pos < dest) {
          emit_block_down(out.columns, pos, k);
          ++pos;
        }
        live -= k;
        dead += k;
        dead_effects.push_back(det->effect);
      }
    }
  }
  (void)pending;

  Column last;
  {
    // Each dying block lands just above the previous one, so the bottom
    // block is the oldest: emit in reverse death order.
    int at = live;
    for (auto it = dead_effects.rbegin(); it != dead_effects.rend(); ++it) {
      last.gens.push_back(Detector{at, *it});
      at += it->modes();
    }
    last.gens.push_back(
        Detector{at, DualFockVector(FockVector::vacuum(1))});
  }
  out.columns.push_back(std::move(last));
  out = desugar_swaps(out);
  require_valid(out);
  return out;
}

// ---------------------------------------------------------------------------
// Matching

namespace {

struct Match {
  RuleId rule;
  Location loc;
  int col_a = -1, gen_a = -1;  // primary generator
  int col_b = -1, gen_b = -1;  // secondary (fusion partner, splitter, ...)
  std::vector<std::pair<int, int>> segment;  // captured window, in order
  int port = 0;                               // source/detector-local mode
  long long label = 0;                        // k', l' or L
  int src_col = -1, src_gen = -1;
  int det_col = -1, det_gen = -1;
  int src_port = -1, det_port = -1;
};

const PhaseShifter* as_ps(const Generator& g) {
  return std::get_if<PhaseShifter>(&g);
}
const BeamSplitter* as_bs(const Generator& g) {
  return std::get_if<BeamSplitter>(&g);
}

// Finds a generator with the given anchor in a column.
int find_gen(const Circuit& c, int col, int wire) {
  if (col < 0 || col >= int(c.columns.size())) return -1;
  const auto& gens = c.columns[std::size_t(col)].gens;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gen_anchor(gens[i]) == wire) return int(i);
  return -1;
}

// Capture an E2/E3 window starting from a splitter at (col, wire).
// span == 2: [bs@w, phases, bs@w]; span == 3: [bs@w, ph, bs@w+1, ph, bs@w].
bool capture_window(const Circuit& c, const std::vector<int>&, int col,
                    int wire, int span, Match& m) {
  const int g0 = find_gen(c, col, wire);
  if (g0 < 0 || !as_bs(gen_at(c, col, g0))) return false;
  m.segment.clear();
  m.segment.push_back({col, g0});
  int stage = 0;  // for span 3: 0 = expect bs@w+1, 1 = expect bs@w
  for (int j = col + 1; j < int(c.columns.size()); ++j) {
    const auto& gens = c.columns[std::size_t(j)].gens;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Generator& g = gens[i];
      const int a = gen_anchor(g);
      const int win = gen_in_width(g);
      const int gw = std::max(win, gen_out_width(g));
      const bool touches = a + gw > wire && a < wire + span;
      if (!touches) continue;
      const bool inside = a >= wire && a + gw <= wire + span;
      if (!inside) return false;
      if (as_ps(g)) {
        m.segment.push_back({j, int(i)});
        continue;
      }
      if (!as_bs(g)) return false;
      if (span == 2) {
        if (a != wire) return false;
        m.segment.push_back({j, int(i)});
        return true;
      }
      if (stage == 0) {
        if (a != wire + 1) return false;
        m.segment.push_back({j, int(i)});
        stage = 1;
      } else {
        if (a != wire) return false;
        m.segment.push_back({j, int(i)});
        return true;
      }
    }
  }
  return false;
}

Matrix window_matrix(const Circuit& c, const Match& m, int wire, int span) {
  Matrix acc = Matrix::Identity(span, span);
  for (const auto& [col, idx] : m.segment) {
    const Generator& g = gen_at(c, col, idx);
    Matrix step = Matrix::Identity(span, span);
    if (const auto* ps = as_ps(g)) {
      step(ps->wire - wire, ps->wire - wire) =
          std::exp(Complex(0, ps->phi.value));
    } else if (const auto* bs = as_bs(g)) {
      const int w = bs->wire - wire;
      const double co = std::cos(bs->theta.value);
      const double si = std::sin(bs->theta.value);
      step(w, w) = co;
      step(w + 1, w + 1) = co;
      step(w, w + 1) = Complex(0, si);
      step(w + 1, w) = Complex(0, si);
    }
    acc = step * acc;
  }
  return acc;
}

// Source feeding the generator port-for-port, with identities in between.
bool fed_by_source(const Circuit& c, const std::vector<int>& widths, int col,
                   int wire, int nports, Match& m) {
  for (int p = 0; p < nports; ++p) {
    const WireHit h = backtrack_wire(c, widths, col - 1, wire + p);
    if (!h.found) return false;
    const Generator& g = gen_at(c, h.col, h.gen);
    if (!std::holds_alternative<Source>(g)) return false;
    if (p == 0) {
      m.src_col = h.col;
      m.src_gen = h.gen;
      m.src_port = h.port;
    } else if (h.col != m.src_col || h.gen != m.src_gen ||
               h.port != m.src_port + p) {
      return false;
    }
  }
  return true;
}

bool feeds_detector(const Circuit& c, const std::vector<int>& widths, int col,
                    int wire, int nports, Match& m) {
  for (int p = 0; p < nports; ++p) {
    const WireHit h = follow_wire(c, widths, col + 1, wire + p);
    if (!h.found) return false;
    const Generator& g = gen_at(c, h.col, h.gen);
    if (!std::holds_alternative<Detector>(g)) return false;
    if (p == 0) {
      m.det_col = h.col;
      m.det_gen = h.gen;
      m.det_port = h.port;
    } else if (h.col != m.det_col || h.gen != m.det_gen ||
               h.port != m.det_port + p) {
      return false;
    }
  }
  return true;
}

// The source/detector pair joined by their last modes (the pairing wire),
// plus the local bookkeeping both endpoint rules need.
bool paired_endpoints(const Circuit& c, const std::vector<int>& widths,
                      int src_col, int src_gen, Match& m) {
  const Generator& g = gen_at(c, src_col, src_gen);
  const auto* src = std::get_if<Source>(&g);
  if (!src) return false;
  const int k = src->state.modes();
  const WireHit h =
      follow_wire(c, widths, src_col + 1, src->wire + k - 1);
  if (!h.found) return false;
  const Generator& dg = gen_at(c, h.col, h.gen);
  const auto* det = std::get_if<Detector>(&dg);
  if (!det) return false;
  if (h.port != det->effect.modes() - 1) return false;
  m.src_col = src_col;
  m.src_gen = src_gen;
  m.det_col = h.col;
  m.det_gen = h.gen;
  return true;
}

std::set<long long> last_mode_support(const FockVector& v) {
  std::set<long long> s;
  for (const auto& [occ, amp] : v.terms()) s.insert(occ.back());
  return s;
}

bool match_rule(const Circuit& c, const std::vector<int>& widths, RuleId rule,
                Location loc, Match& m) {
  m.rule = rule;
  m.loc = loc;
  const int gi = find_gen(c, loc.column, loc.wire);
  switch (rule) {
    case RuleId::PhaseMod2Pi: {
      if (gi < 0) return false;
      const auto* ps = as_ps(gen_at(c, loc.column, gi));
      if (!ps || in_range_2pi(ps->phi.value)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::BsMod2Pi: {
      if (gi < 0) return false;
      const auto* bs = as_bs(gen_at(c, loc.column, gi));
      if (!bs || in_range_2pi(bs->theta.value)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::PhaseFusion: {
      if (gi < 0) return false;
      const auto* ps = as_ps(gen_at(c, loc.column, gi));
      if (!ps) return false;
      if (!in_range_2pi(ps->phi.value) || angle_zero(ps->phi.value))
        return false;
      const WireHit h = follow_wire(c, widths, loc.column + 1, loc.wire);
      if (!h.found) return false;
      const auto* ps2 = as_ps(gen_at(c, h.col, h.gen));
      if (!ps2) return false;
      if (!in_range_2pi(ps2->phi.value) || angle_zero(ps2->phi.value))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      m.col_b = h.col;
      m.gen_b = h.gen;
      return true;
    }
    case RuleId::ZeroPhase: {
      if (gi < 0) return false;
      const auto* ps = as_ps(gen_at(c, loc.column, gi));
      if (!ps || !in_range_2pi(ps->phi.value) || !angle_zero(ps->phi.value))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::ZeroBs: {
      if (gi < 0) return false;
      const auto* bs = as_bs(gen_at(c, loc.column, gi));
      if (!bs || !in_range_2pi(bs->theta.value) ||
          !angle_zero(bs->theta.value))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::TopPhase: {
      if (gi < 0) return false;
      const auto* ps = as_ps(gen_at(c, loc.column, gi));
      if (!ps || !in_range_2pi(ps->phi.value) || angle_zero(ps->phi.value))
        return false;
      const WireHit h = follow_wire(c, widths, loc.column + 1, loc.wire);
      if (!h.found || h.port != 0) return false;
      if (!as_bs(gen_at(c, h.col, h.gen))) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      m.col_b = h.col;
      m.gen_b = h.gen;
      return true;
    }
    case RuleId::PiOverTwo: {
      if (gi < 0) return false;
      const auto* ps = as_ps(gen_at(c, loc.column, gi));
      if (!ps || !in_range_2pi(ps->phi.value) || angle_zero(ps->phi.value))
        return false;
      const WireHit h = follow_wire(c, widths, loc.column + 1, loc.wire);
      if (!h.found || h.port != 1) return false;
      const auto* bs = as_bs(gen_at(c, h.col, h.gen));
      if (!bs || !angle_is(bs->theta.value, M_PI / 2)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      m.col_b = h.col;
      m.gen_b = h.gen;
      return true;
    }
    case RuleId::ThetaRange: {
      if (gi < 0) return false;
      const auto* bs = as_bs(gen_at(c, loc.column, gi));
      if (!bs) return false;
      const double th = bs->theta.value;
      if (!(th >= M_PI && th < 2 * M_PI)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::MinusPi: {
      if (gi < 0) return false;
      const auto* bs = as_bs(gen_at(c, loc.column, gi));
      if (!bs) return false;
      const double th = bs->theta.value;
      if (!(th > M_PI / 2 + kAngleEps && th < M_PI)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::E3Rewrite:
      return capture_window(c, widths, loc.column, loc.wire, 3, m);
    case RuleId::E2Rewrite:
      return capture_window(c, widths, loc.column, loc.wire, 2, m);
    case RuleId::ZeroF: {
      if (gi < 0) return false;
      if (!paired_endpoints(c, widths, loc.column, gi, m)) return false;
      const auto& f =
          std::get<Source>(gen_at(c, m.src_col, m.src_gen)).state;
      const auto& g =
          std::get<Detector>(gen_at(c, m.det_col, m.det_gen)).effect.coeffs;
      const auto fs = last_mode_support(f);
      const auto gs = last_mode_support(g);
      for (long long k : fs)
        if (!gs.count(k)) {
          m.label = k;
          return true;
        }
      return false;
    }
    case RuleId::ZeroG: {
      if (gi < 0) return false;
      if (!paired_endpoints(c, widths, loc.column, gi, m)) return false;
      const auto& f =
          std::get<Source>(gen_at(c, m.src_col, m.src_gen)).state;
      const auto& g =
          std::get<Detector>(gen_at(c, m.det_col, m.det_gen)).effect.coeffs;
      const auto fs = last_mode_support(f);
      const auto gs = last_mode_support(g);
      for (long long l : gs)
        if (!fs.count(l)) {
          m.label = l;
          return true;
        }
      return false;
    }
    case RuleId::RemoveG: {
      if (gi < 0) return false;
      if (!paired_endpoints(c, widths, loc.column, gi, m)) return false;
      const auto& g =
          std::get<Detector>(gen_at(c, m.det_col, m.det_gen)).effect.coeffs;
      // Group detector terms by their leading block; L = pair index.
      std::map<long long, std::map<long long, Complex>> blocks;
      for (const auto& [occ, amp] : g.terms()) {
        const OccVec head(occ.begin(), occ.end() - 1);
        blocks[pair_m(head)][occ.back()] += amp;
      }
      for (const auto& [L, xi] : blocks) {
        auto it = xi.find(L);
        const Complex xiL = it == xi.end() ? Complex(0, 0) : it->second;
        bool other = false;
        for (const auto& [l, v] : xi)
          if (l != L && std::abs(v) > kAmpEps) other = true;
        if (std::abs(xiL - Complex(1, 0)) <= kAmpEps && !other) continue;
        // The transfer uses a map acting on |L> of the pairing wire, so L
        // may not appear under any other head.
        bool foreign = false;
        for (const auto& [L2, xi2] : blocks) {
          if (L2 == L) continue;
          auto f2 = xi2.find(L);
          if (f2 != xi2.end() && std::abs(f2->second) > kAmpEps)
            foreign = true;
        }
        if (foreign) continue;
        m.label = L;
        return true;
      }
      return false;
    }
    case RuleId::WireRemoval: {
      if (gi < 0) return false;
      if (!paired_endpoints(c, widths, loc.column, gi, m)) return false;
      const auto& src = std::get<Source>(gen_at(c, m.src_col, m.src_gen));
      const int k = src.state.modes();
      for (int p = 0; p < k - 1; ++p) {
        const WireHit h =
            follow_wire(c, widths, m.src_col + 1, src.wire + p);
        if (h.found && h.col == m.det_col && h.gen == m.det_gen) {
          m.port = p;
          m.label = h.port;  // detector port
          return true;
        }
      }
      return false;
    }
    case RuleId::MergeSources: {
      if (gi < 0) return false;
      const auto* s1 = std::get_if<Source>(&gen_at(c, loc.column, gi));
      if (!s1) return false;
      const int g2 = find_gen(c, loc.column, s1->wire + s1->state.modes());
      if (g2 < 0) return false;
      if (!std::holds_alternative<Source>(gen_at(c, loc.column, g2)))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      m.col_b = loc.column;
      m.gen_b = g2;
      return true;
    }
    case RuleId::MergeDetectors: {
      if (gi < 0) return false;
      const auto* d1 = std::get_if<Detector>(&gen_at(c, loc.column, gi));
      if (!d1) return false;
      const int g2 = find_gen(c, loc.column, d1->wire + d1->effect.modes());
      if (g2 < 0) return false;
      if (!std::holds_alternative<Detector>(gen_at(c, loc.column, g2)))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      m.col_b = loc.column;
      m.gen_b = g2;
      return true;
    }
    case RuleId::AbsorbBsSource: {
      if (gi < 0) return false;
      if (!as_bs(gen_at(c, loc.column, gi))) return false;
      if (!fed_by_source(c, widths, loc.column, loc.wire, 2, m)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::AbsorbPsSource: {
      if (gi < 0) return false;
      if (!as_ps(gen_at(c, loc.column, gi))) return false;
      if (!fed_by_source(c, widths, loc.column, loc.wire, 1, m)) return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::AbsorbBsDetector: {
      if (gi < 0) return false;
      if (!as_bs(gen_at(c, loc.column, gi))) return false;
      if (!feeds_detector(c, widths, loc.column, loc.wire, 2, m))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
    case RuleId::AbsorbPsDetector: {
      if (gi < 0) return false;
      if (!as_ps(gen_at(c, loc.column, gi))) return false;
      if (!feeds_detector(c, widths, loc.column, loc.wire, 1, m))
        return false;
      m.col_a = loc.column;
      m.gen_a = gi;
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<std::pair<RuleId, Location>> find_redex(const Circuit& c) {
  const auto widths = boundary_widths(c);
  int max_w = 0;
  for (int w : widths) max_w = std::max(max_w, w);
  static const RuleId kOrder[kRuleCount] = {
      RuleId::PhaseMod2Pi,   RuleId::BsMod2Pi,
      RuleId::PhaseFusion,   RuleId::ZeroPhase,
      RuleId::ZeroBs,        RuleId::TopPhase,
      RuleId::PiOverTwo,     RuleId::ThetaRange,
      RuleId::MinusPi,       RuleId::E3Rewrite,
      RuleId::E2Rewrite,     RuleId::ZeroF,
      RuleId::ZeroG,         RuleId::RemoveG,
      RuleId::WireRemoval,   RuleId::MergeSources,
      RuleId::AbsorbBsSource, RuleId::AbsorbPsSource,
      RuleId::MergeDetectors, RuleId::AbsorbBsDetector,
      RuleId::AbsorbPsDetector};
  Match m;
  for (RuleId rule : kOrder)
    for (int w = 0; w < max_w; ++w)
      for (int j = 0; j < int(c.columns.size()); ++j)
        if (match_rule(c, widths, rule, {j, w}, m))
          return std::make_pair(rule, Location{j, w});
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule application

namespace {

void erase_gen(Circuit& c, int col, int idx) {
  auto& gens = c.columns[std::size_t(col)].gens;
  gens.erase(gens.begin() + idx);
}

// Insert single-generator columns after column `after`.
void insert_columns(Circuit& c, int after, std::vector<Column> cols) {
  c.columns.insert(c.columns.begin() + after + 1,
                   std::make_move_iterator(cols.begin()),
                   std::make_move_iterator(cols.end()));
}

std::vector<Column> triangle_columns(const TriangleParams& t, int offset) {
  std::vector<Column> cols;
  const Circuit tc = triangle_to_circuit(t);
  for (const auto& col : tc.columns) {
    Column shifted_col;
    for (const auto& g : col.gens) {
      Generator h = g;
      std::visit([&](auto& x) { x.wire += offset; }, h);
      shifted_col.gens.push_back(std::move(h));
    }
    cols.push_back(std::move(shifted_col));
  }
  return cols;
}

FockVector permute_modes(const FockVector& v, const std::vector<int>& perm) {
  FockVector out(v.modes());
  for (const auto& [occ, amp] : v.terms()) {
    OccVec key(occ.size());
    for (std::size_t i = 0; i < occ.size(); ++i)
      key[i] = occ[std::size_t(perm[i])];
    out.add_term(key, amp);
  }
  return out;
}

FockVector pair_last_two(const FockVector& v) {
  FockVector out(v.modes() - 1);
  for (const auto& [occ, amp] : v.terms()) {
    OccVec key(occ.begin(), occ.end() - 2);
    key.push_back(int(cantor_pair(occ[occ.size() - 2], occ.back())));
    out.add_term(key, amp);
  }
  return out;
}

}  // namespace

Circuit apply_rule(const Circuit& c0, RuleId rule, Location loc) {
  const auto widths = boundary_widths(c0);
  Match m;
  if (!match_rule(c0, widths, rule, loc, m))
    fail(ErrorKind::NotARedex, std::string(rule_name(rule)) + " at column " +
                                   std::to_string(loc.column) + ", wire " +
                                   std::to_string(loc.wire));
  Circuit c = c0;
  switch (rule) {
    case RuleId::PhaseMod2Pi: {
      auto& ps = std::get<PhaseShifter>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      ps.phi = Angle(norm_angle(ps.phi.value));
      break;
    }
    case RuleId::BsMod2Pi: {
      auto& bs = std::get<BeamSplitter>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      bs.theta = Angle(norm_angle(bs.theta.value));
      break;
    }
    case RuleId::PhaseFusion: {
      const double p1 = std::get<PhaseShifter>(gen_at(c, m.col_a, m.gen_a))
                            .phi.value;
      auto& ps2 = std::get<PhaseShifter>(
          c.columns[std::size_t(m.col_b)].gens[std::size_t(m.gen_b)]);
      ps2.phi = Angle(ps2.phi.value + p1);
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::ZeroPhase:
    case RuleId::ZeroBs:
      erase_gen(c, m.col_a, m.gen_a);
      break;
    case RuleId::TopPhase: {
      const double phi = std::get<PhaseShifter>(gen_at(c, m.col_a, m.gen_a))
                             .phi.value;
      const int w =
          std::get<BeamSplitter>(gen_at(c, m.col_b, m.gen_b)).wire;
      Column after;
      after.gens.push_back(PhaseShifter{w, Angle(phi)});
      after.gens.push_back(PhaseShifter{w + 1, Angle(phi)});
      insert_columns(c, m.col_b, {std::move(after)});
      Column before;
      before.gens.push_back(
          PhaseShifter{w + 1, Angle(norm_angle(2 * M_PI - phi))});
      insert_columns(c, m.col_b - 1, {std::move(before)});
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::PiOverTwo: {
      const double phi = std::get<PhaseShifter>(gen_at(c, m.col_a, m.gen_a))
                             .phi.value;
      const int w =
          std::get<BeamSplitter>(gen_at(c, m.col_b, m.gen_b)).wire;
      insert_columns(c, m.col_b, {Column{{PhaseShifter{w, Angle(phi)}}}});
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::ThetaRange: {
      auto& bs = std::get<BeamSplitter>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      const int w = bs.wire;
      bs.theta = Angle(bs.theta.value - M_PI);
      Column after;
      after.gens.push_back(PhaseShifter{w, Angle(M_PI)});
      after.gens.push_back(PhaseShifter{w + 1, Angle(M_PI)});
      insert_columns(c, m.col_a, {std::move(after)});
      break;
    }
    case RuleId::MinusPi: {
      auto& bs = std::get<BeamSplitter>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      const int w = bs.wire;
      bs.theta = Angle(M_PI - bs.theta.value);
      insert_columns(c, m.col_a, {Column{{PhaseShifter{w, Angle(M_PI)}}}});
      insert_columns(c, m.col_a - 1,
                     {Column{{PhaseShifter{w + 1, Angle(M_PI)}}}});
      break;
    }
    case RuleId::E3Rewrite:
    case RuleId::E2Rewrite: {
      const int span = rule == RuleId::E3Rewrite ? 3 : 2;
      const Matrix mat = window_matrix(c, m, loc.wire, span);
      const TriangleParams t = synthesize_triangle(mat);
      const int last_col = m.segment.back().first;
      insert_columns(c, last_col, triangle_columns(t, loc.wire));
      // Delete captured generators (descending order keeps indices valid).
      for (auto it = m.segment.rbegin(); it != m.segment.rend(); ++it)
        erase_gen(c, it->first, it->second);
      break;
    }
    case RuleId::ZeroF: {
      auto& src = std::get<Source>(
          c.columns[std::size_t(m.src_col)].gens[std::size_t(m.src_gen)]);
      FockVector next(src.state.modes());
      for (const auto& [occ, amp] : src.state.terms())
        if (occ.back() != int(m.label)) next.add_term(occ, amp);
      src.state = std::move(next);
      break;
    }
    case RuleId::ZeroG: {
      auto& det = std::get<Detector>(
          c.columns[std::size_t(m.det_col)].gens[std::size_t(m.det_gen)]);
      FockVector next(det.effect.coeffs.modes());
      for (const auto& [occ, amp] : det.effect.coeffs.terms())
        if (occ.back() != int(m.label)) next.add_term(occ, amp);
      det.effect = DualFockVector(std::move(next));
      break;
    }
    case RuleId::RemoveG: {
      auto& det = std::get<Detector>(
          c.columns[std::size_t(m.det_col)].gens[std::size_t(m.det_gen)]);
      auto& src = std::get<Source>(
          c.columns[std::size_t(m.src_col)].gens[std::size_t(m.src_gen)]);
      const long long L = m.label;
      const int mt = det.effect.coeffs.modes() - 1;
      const OccVec head = unpair_m(L, mt);
      // Collect and strip the block, then reinstate the canonical term.
      std::map<long long, Complex> xi;
      FockVector g_next(det.effect.coeffs.modes());
      for (const auto& [occ, amp] : det.effect.coeffs.terms()) {
        const OccVec h(occ.begin(), occ.end() - 1);
        if (h == head)
          xi[occ.back()] += amp;
        else
          g_next.add_term(occ, amp);
      }
      OccVec canon = head;
      canon.push_back(int(L));
      g_next.add_term(canon, Complex(1.0, 0.0));
      det.effect = DualFockVector(std::move(g_next));
      // f_L := sum_i xi_i f_i, other components unchanged.
      const int fm = src.state.modes();
      FockVector f_next(fm);
      FockVector fL(fm);
      for (const auto& [occ, amp] : src.state.terms()) {
        const long long k = occ.back();
        if (k != L) f_next.add_term(occ, amp);
        auto it = xi.find(k);
        if (it != xi.end() && std::abs(it->second) > 0.0) {
          OccVec key = occ;
          key.back() = int(L);
          fL.add_term(key, amp * it->second);
        }
      }
      for (const auto& [occ, amp] : fL.terms()) f_next.add_term(occ, amp);
      f_next.prune();
      src.state = std::move(f_next);
      break;
    }
    case RuleId::WireRemoval: {
      auto& src = std::get<Source>(
          c.columns[std::size_t(m.src_col)].gens[std::size_t(m.src_gen)]);
      auto& det = std::get<Detector>(
          c.columns[std::size_t(m.det_col)].gens[std::size_t(m.det_gen)]);
      const int k = src.state.modes();
      const int dk = det.effect.modes();
      const int p = m.port;            // source mode to merge
      const int q = int(m.label);      // its detector port
      // Permutations moving (p, last) and (q, last) to the back.
      std::vector<int> sperm;
      for (int i = 0; i < k; ++i)
        if (i != p && i != k - 1) sperm.push_back(i);
      sperm.push_back(p);
      sperm.push_back(k - 1);
      std::vector<int> dperm;
      for (int i = 0; i < dk; ++i)
        if (i != q && i != dk - 1) dperm.push_back(i);
      dperm.push_back(q);
      dperm.push_back(dk - 1);
      src.state = pair_last_two(permute_modes(src.state, sperm));
      det.effect =
          DualFockVector(pair_last_two(permute_modes(det.effect.coeffs, dperm)));
      // The merged wire keeps the pairing wire's track; the wire that held
      // source mode p disappears, so wires beyond it shift up.
      const int gone = src.wire + p;
      for (auto& col : c.columns)
        for (auto& g : col.gens) {
          std::visit(
              [&](auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Source>) {
                  if (x.wire > gone) x.wire -= 1;
                } else {
                  if (x.wire > gone) x.wire -= 1;
                }
              },
              g);
        }
      break;
    }
    case RuleId::MergeSources: {
      auto& s1 = std::get<Source>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      const auto& s2 = std::get<Source>(gen_at(c, m.col_b, m.gen_b));
      s1.state = tensor(s1.state, s2.state);
      erase_gen(c, m.col_b, m.gen_b);
      break;
    }
    case RuleId::MergeDetectors: {
      auto& d1 = std::get<Detector>(
          c.columns[std::size_t(m.col_a)].gens[std::size_t(m.gen_a)]);
      const auto& d2 = std::get<Detector>(gen_at(c, m.col_b, m.gen_b));
      d1.effect =
          DualFockVector(tensor(d1.effect.coeffs, d2.effect.coeffs));
      erase_gen(c, m.col_b, m.gen_b);
      break;
    }
    case RuleId::AbsorbBsSource: {
      const auto& bs = std::get<BeamSplitter>(gen_at(c, m.col_a, m.gen_a));
      auto& src = std::get<Source>(
          c.columns[std::size_t(m.src_col)].gens[std::size_t(m.src_gen)]);
      src.state = apply_bs(bs.theta.value, m.src_port, src.state);
      src.state.prune();
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::AbsorbPsSource: {
      const auto& ps = std::get<PhaseShifter>(gen_at(c, m.col_a, m.gen_a));
      auto& src = std::get<Source>(
          c.columns[std::size_t(m.src_col)].gens[std::size_t(m.src_gen)]);
      src.state = apply_phase(ps.phi.value, m.src_port, src.state);
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::AbsorbBsDetector: {
      const auto& bs = std::get<BeamSplitter>(gen_at(c, m.col_a, m.gen_a));
      auto& det = std::get<Detector>(
          c.columns[std::size_t(m.det_col)].gens[std::size_t(m.det_gen)]);
      // <v| B = (B^T applied to the stored coefficients); B is symmetric in
      // the Fock basis.
      det.effect = DualFockVector(
          apply_bs(bs.theta.value, m.det_port, det.effect.coeffs));
      det.effect.coeffs.prune();
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
    case RuleId::AbsorbPsDetector: {
      const auto& ps = std::get<PhaseShifter>(gen_at(c, m.col_a, m.gen_a));
      auto& det = std::get<Detector>(
          c.columns[std::size_t(m.det_col)].gens[std::size_t(m.det_gen)]);
      det.effect = DualFockVector(
          apply_phase(ps.phi.value, m.det_port, det.effect.coeffs));
      erase_gen(c, m.col_a, m.gen_a);
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Normal forms

std::vector<long long> NormalForm::support() const {
  std::vector<long long> out;
  std::set<long long> seen;
  for (const auto& [occ, amp] : f.terms()) seen.insert(occ.back());
  out.assign(seen.begin(), seen.end());
  return out;
}

Complex NormalForm::scalar() const {
  OccVec zero(std::size_t(f.modes()), 0);
  return f.amplitude(zero);
}

DualFockVector NormalForm::derived_g() const {
  FockVector g(m_tilde + 1);
  for (long long l : support()) {
    OccVec occ = unpair_m(l, m_tilde);
    occ.push_back(int(l));
    g.add_term(occ, Complex(1.0, 0.0));
  }
  return DualFockVector(std::move(g));
}

Circuit NormalForm::to_circuit() const {
  Circuit c;
  c.n_in = n;
  c.n_out = m;
  Column col0;
  col0.gens.push_back(Source{n, f});
  c.columns.push_back(std::move(col0));
  const Circuit tc = triangle_to_circuit(triangle);
  for (const auto& col : tc.columns) c.columns.push_back(col);
  Column last;
  last.gens.push_back(Detector{m, derived_g()});
  c.columns.push_back(std::move(last));
  return c;
}

namespace {

double semantic_residual(const Circuit& a, const Circuit& b, int cutoff,
                         double prune_eps) {
  EvalConfig cfg;
  cfg.prune_eps = prune_eps;
  double worst = 0.0;
  for (const OccVec& occ : probe_basis(a.n_in, cutoff)) {
    const FockVector in = FockVector::basis(occ);
    const FockVector oa = eval_circuit(a, in, cfg);
    const FockVector ob = eval_circuit(b, in, cfg);
    const FockVector diff = oa.plus(ob.scaled(Complex(-1.0, 0.0)));
    for (const auto& [k, amp] : diff.terms())
      worst = std::max(worst, std::abs(amp));
  }
  return worst;
}

}  // namespace

NormalizeResult normalize(const Circuit& c, const RewriteOptions& opts) {
  Circuit work = preprocess_for_rewriting(c);
  NormalizeResult result;

  // The mesh left between the endpoints after each fixed point is
  // re-triangulated; when the triangle still hangs generators off the
  // ancilla wires, its circuit form exposes them to the absorption rules
  // and the loop continues.
  for (int round = 0;; ++round) {
    if (round > 100)
      fail(ErrorKind::Internal, "triangulation rounds did not converge");
    RankTuple rank = ranking(work);
    while (true) {
      const auto redex = find_redex(work);
      if (!redex) break;
      if (result.steps >= opts.step_limit)
        fail(ErrorKind::StepLimitExceeded,
             "no normal form after " + std::to_string(result.steps) +
                 " steps");
      Circuit next = apply_rule(work, redex->first, redex->second);
      const RankTuple next_rank = ranking(next);
      if (opts.check_rank && !(next_rank < rank))
        fail(ErrorKind::Internal,
             std::string("rule ") + rule_name(redex->first) +
                 " did not decrease the ranking: " + rank.to_string() +
                 " -> " + next_rank.to_string());
      rank = next_rank;
      if (opts.check_soundness) {
        const double res = semantic_residual(work, next,
                                             opts.soundness_cutoff,
                                             opts.prune_eps);
        if (res > 1e-9)
          fail(ErrorKind::Internal,
               std::string("rule ") + rule_name(redex->first) +
                   " changed the semantics (residual " +
                   std::to_string(res) + ")");
      }
      work = std::move(next);
      ++result.steps;
      if (opts.trace)
        opts.trace(result.steps, redex->first, redex->second, rank);
    }

    // Locate the staged endpoints.
    int src_col = -1, src_gen = -1, det_col = -1, det_gen = -1;
    int n_sources = 0, n_detectors = 0;
    for (int j = 0; j < int(work.columns.size()); ++j)
      for (int i = 0; i < int(work.columns[std::size_t(j)].gens.size()); ++i) {
        const Generator& g = gen_at(work, j, i);
        if (gen_is_source(g)) {
          ++n_sources;
          src_col = j;
          src_gen = i;
        } else if (gen_is_detector(g)) {
          ++n_detectors;
          det_col = j;
          det_gen = i;
        }
      }
    if (n_sources != 1 || n_detectors != 1)
      fail(ErrorKind::Internal, "irreducible circuit is not in staged form");
    const auto& src = std::get<Source>(gen_at(work, src_col, src_gen));
    const auto& det = std::get<Detector>(gen_at(work, det_col, det_gen));

    if (src.state.is_zero() || det.effect.coeffs.is_zero()) {
      result.zero = true;
      result.zero_form = ZeroForm{c.n_in, c.n_out};
      return result;
    }

    NormalForm nf;
    nf.n = c.n_in;
    nf.m = c.n_out;
    nf.n_tilde = src.state.modes() - 1;
    nf.m_tilde = det.effect.modes() - 1;
    nf.f = src.state;

    Circuit mesh;
    mesh.n_in = nf.n + nf.n_tilde;
    mesh.n_out = nf.m + nf.m_tilde;
    for (int j = 0; j < int(work.columns.size()); ++j) {
      if (j == src_col || j == det_col) {
        if (work.columns[std::size_t(j)].gens.size() != 1)
          fail(ErrorKind::Internal,
               "endpoint column carries extra generators");
        continue;
      }
      if (work.columns[std::size_t(j)].gens.empty()) continue;
      for (const auto& g : work.columns[std::size_t(j)].gens)
        if (gen_anchor(g) + std::max(gen_in_width(g), gen_out_width(g)) >
            mesh.n_in)
          fail(ErrorKind::Internal, "mesh generator touches the pairing wire");
      mesh.columns.push_back(work.columns[std::size_t(j)]);
    }
    nf.triangle = synthesize_triangle(matrix_of(mesh));
    const TriangleClass cls = classify(
        nf.triangle, SplitDims{nf.n, nf.n_tilde, nf.m, nf.m_tilde});
    if (!cls.is_tmn() && cls.violated_property != 4) {
      // Swap the mesh for its triangle. Generators that sit entirely on the
      // ancilla wires at the triangle's edges are folded straight into the
      // endpoint states; leaving them in place would let the phase-motion
      // rules walk them away from the absorption sites again.
      std::vector<Generator> gens;
      for (const auto& col : triangle_to_circuit(nf.triangle).columns)
        for (const auto& g : col.gens) gens.push_back(g);
      std::vector<bool> taken(gens.size(), false);
      FockVector f2 = src.state;
      FockVector g2 = det.effect.coeffs;
      // Left prefix into the source (ancilla inputs start at wire n).
      {
        std::vector<bool> blocked(std::size_t(mesh.n_in), false);
        for (std::size_t i = 0; i < gens.size(); ++i) {
          const int a = gen_anchor(gens[i]);
          const int wdt = gen_in_width(gens[i]);
          bool free = a >= nf.n;
          for (int w = a; w < a + wdt; ++w)
            if (blocked[std::size_t(w)]) free = false;
          if (free) {
            taken[i] = true;
            if (const auto* ps = std::get_if<PhaseShifter>(&gens[i]))
              f2 = apply_phase(ps->phi.value, a - nf.n, f2);
            else
              f2 = apply_bs(std::get<BeamSplitter>(gens[i]).theta.value,
                            a - nf.n, f2);
          } else {
            for (int w = a; w < a + wdt; ++w) blocked[std::size_t(w)] = true;
          }
        }
      }
      // Right suffix into the detector (ancilla outputs start at wire m).
      {
        std::vector<bool> blocked(std::size_t(mesh.n_in), false);
        for (std::size_t i = gens.size(); i-- > 0;) {
          if (taken[i]) continue;
          const int a = gen_anchor(gens[i]);
          const int wdt = gen_in_width(gens[i]);
          bool free = a >= nf.m;
          for (int w = a; w < a + wdt; ++w)
            if (blocked[std::size_t(w)]) free = false;
          if (free) {
            taken[i] = true;
            if (const auto* ps = std::get_if<PhaseShifter>(&gens[i]))
              g2 = apply_phase(ps->phi.value, a - nf.m, g2);
            else
              g2 = apply_bs(std::get<BeamSplitter>(gens[i]).theta.value,
                            a - nf.m, g2);
          } else {
            for (int w = a; w < a + wdt; ++w) blocked[std::size_t(w)] = true;
          }
        }
      }
      f2.prune(opts.prune_eps);
      g2.prune(opts.prune_eps);
      Circuit rebuilt;
      rebuilt.n_in = c.n_in;
      rebuilt.n_out = c.n_out;
      Column src_col2;
      src_col2.gens.push_back(Source{src.wire, std::move(f2)});
      rebuilt.columns.push_back(std::move(src_col2));
      for (std::size_t i = 0; i < gens.size(); ++i)
        if (!taken[i]) rebuilt.columns.push_back(Column{{gens[i]}});
      Column det_col2;
      det_col2.gens.push_back(Detector{det.wire, DualFockVector(std::move(g2))});
      rebuilt.columns.push_back(std::move(det_col2));
      work = std::move(rebuilt);
      continue;
    }

    // The detector must be the canonical pairing of the support.
    {
      const DualFockVector expect = nf.derived_g();
      if (!expect.coeffs.approx_equal(det.effect.coeffs, opts.amp_eps))
        fail(ErrorKind::Internal,
             "irreducible detector is not the canonical pairing");
    }
    result.triangle_prop4_ok = cls.is_tmn();
    result.nf = std::move(nf);
    return result;
  }
}

bool nf_equal(const NormalizeResult& a, const NormalizeResult& b,
              double angle_eps, double amp_eps) {
  if (a.zero != b.zero) return false;
  if (a.zero)
    return a.zero_form.n == b.zero_form.n && a.zero_form.m == b.zero_form.m;
  const NormalForm& x = a.nf;
  const NormalForm& y = b.nf;
  if (x.n != y.n || x.m != y.m || x.n_tilde != y.n_tilde ||
      x.m_tilde != y.m_tilde)
    return false;
  if (!x.triangle.approx_equal(y.triangle, angle_eps)) return false;
  return x.f.approx_equal(y.f, amp_eps);
}

}  // namespace lov
