#include "lov/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "lov/circuit.hpp"

namespace lov {

namespace {

constexpr int kMaxFact = 170;

const std::array<double, kMaxFact + 1>& ln_fact_table() {
  static const std::array<double, kMaxFact + 1> table = [] {
    std::array<double, kMaxFact + 1> t{};
    t[0] = 0.0;
    for (int n = 1; n <= kMaxFact; ++n) t[n] = t[n - 1] + std::log(double(n));
    return t;
  }();
  return table;
}

// sign * exp(ln|base|*e) for integer powers of a real base, safe at base == 0.
bool real_pow_log(double base, int e, double& ln_mag, int& sign) {
  if (e == 0) return true;
  double a = std::abs(base);
  if (a == 0.0) return false;  // whole term vanishes
  ln_mag += e * std::log(a);
  if (base < 0.0 && (e & 1)) sign = -sign;
  return true;
}

Complex i_power(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// <l1,l2| B_theta |k1,k2> via the double-sum formula, factorials in log space.
Complex bs_pair_coef(int k1, int k2, int l1, double c, double s) {
  const int l2 = k1 + k2 - l1;
  Complex acc{0.0, 0.0};
  for (int p = 0; p <= std::min(l1, k1); ++p) {
    const int q = l1 - p;
    if (q > k2) continue;
    const int delta = p - q;
    const int ec = k2 + delta;  // cos exponent, always >= 0
    const int es = k1 - delta;  // (i sin) exponent, always >= 0
    double ln_mag = 0.5 * (ln_factorial(l1) + ln_factorial(l2) -
                           ln_factorial(k1) - ln_factorial(k2));
    ln_mag += ln_factorial(k1) - ln_factorial(p) - ln_factorial(k1 - p);
    ln_mag += ln_factorial(k2) - ln_factorial(q) - ln_factorial(k2 - q);
    int sign = 1;
    if (!real_pow_log(c, ec, ln_mag, sign)) continue;
    if (!real_pow_log(s, es, ln_mag, sign)) continue;
    acc += double(sign) * std::exp(ln_mag) * i_power(es);
  }
  return acc;
}

}  // namespace

std::string complex_to_text(Complex z) {
  char buf[80];
  double re = z.real(), im = z.imag();
  if (im >= 0 || std::isnan(im))
    std::snprintf(buf, sizeof buf, "%.17g+%.17gi", re, im);
  else
    std::snprintf(buf, sizeof buf, "%.17g-%.17gi", re, -im);
  return buf;
}

double ln_factorial(int n) {
  if (n < 0 || n > kMaxFact)
    fail(ErrorKind::BadInput,
         "photon count " + std::to_string(n) + " outside factorial table");
  return ln_fact_table()[std::size_t(n)];
}

FockVector FockVector::basis(const OccVec& occ) {
  FockVector v(int(occ.size()));
  v.amps_[occ] = Complex(1.0, 0.0);
  return v;
}

FockVector FockVector::scalar(Complex z) {
  FockVector v(0);
  if (std::abs(z) > 0.0) v.amps_[{}] = z;
  return v;
}

FockVector FockVector::vacuum(int modes) {
  return basis(OccVec(std::size_t(modes), 0));
}

Complex FockVector::amplitude(const OccVec& occ) const {
  auto it = amps_.find(occ);
  return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
}

void FockVector::add_term(const OccVec& occ, Complex amp) {
  if (int(occ.size()) != modes_)
    fail(ErrorKind::BadMode, "occupation vector length does not match modes");
  auto [it, inserted] = amps_.try_emplace(occ, amp);
  if (!inserted) it->second += amp;
}

void FockVector::set_term(const OccVec& occ, Complex amp) {
  if (int(occ.size()) != modes_)
    fail(ErrorKind::BadMode, "occupation vector length does not match modes");
  amps_[occ] = amp;
}

void FockVector::prune(double eps) {
  for (auto it = amps_.begin(); it != amps_.end();) {
    if (std::abs(it->second) < eps)
      it = amps_.erase(it);
    else
      ++it;
  }
}

double FockVector::norm() const {
  double n2 = 0.0;
  for (const auto& [occ, a] : amps_) n2 += std::norm(a);
  return std::sqrt(n2);
}

FockVector FockVector::scaled(Complex z) const {
  FockVector out(modes_);
  for (const auto& [occ, a] : amps_) out.amps_[occ] = a * z;
  return out;
}

FockVector FockVector::plus(const FockVector& other) const {
  if (other.modes_ != modes_)
    fail(ErrorKind::BadMode, "mode count mismatch in sum");
  FockVector out = *this;
  for (const auto& [occ, a] : other.amps_) out.add_term(occ, a);
  return out;
}

int FockVector::max_total_photons() const {
  int m = 0;
  for (const auto& [occ, a] : amps_) m = std::max(m, total_photons(occ));
  return m;
}

std::string FockVector::to_text() const {
  std::string out = "{ ";
  bool first = true;
  for (const auto& [occ, a] : amps_) {
    if (!first) out += " ; ";
    first = false;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(occ[i]);
    }
    if (occ.empty()) out += "-";  // scalar term
    out += ": ";
    out += complex_to_text(a);
  }
  out += " }";
  return out;
}

bool FockVector::approx_equal(const FockVector& other, double eps) const {
  if (other.modes_ != modes_) return false;
  for (const auto& [occ, a] : amps_)
    if (std::abs(a - other.amplitude(occ)) > eps) return false;
  for (const auto& [occ, a] : other.amps_)
    if (std::abs(a - amplitude(occ)) > eps) return false;
  return true;
}

FockVector apply_phase(double phi, int mode, const FockVector& v) {
  if (mode < 0 || mode >= v.modes())
    fail(ErrorKind::BadMode, "phase mode out of range");
  FockVector out(v.modes());
  for (const auto& [occ, a] : v.terms()) {
    const int k = occ[std::size_t(mode)];
    out.set_term(occ, a * std::exp(Complex(0.0, k * phi)));
  }
  return out;
}

FockVector apply_bs(double theta, int wire, const FockVector& v) {
  if (wire < 0 || wire + 1 >= v.modes())
    fail(ErrorKind::BadMode, "beam splitter wire out of range");
  const double c = std::cos(theta), s = std::sin(theta);
  FockVector out(v.modes());
  for (const auto& [occ, a] : v.terms()) {
    const int k1 = occ[std::size_t(wire)], k2 = occ[std::size_t(wire) + 1];
    OccVec key = occ;
    for (int l1 = 0; l1 <= k1 + k2; ++l1) {
      const Complex coef = bs_pair_coef(k1, k2, l1, c, s);
      if (std::abs(coef) == 0.0) continue;
      key[std::size_t(wire)] = l1;
      key[std::size_t(wire) + 1] = k1 + k2 - l1;
      out.add_term(key, a * coef);
    }
  }
  out.prune();
  return out;
}

FockVector apply_creation(int mode, const FockVector& v) {
  if (mode < 0 || mode >= v.modes())
    fail(ErrorKind::BadMode, "creation mode out of range");
  FockVector out(v.modes());
  for (const auto& [occ, a] : v.terms()) {
    OccVec key = occ;
    const int k = key[std::size_t(mode)];
    key[std::size_t(mode)] = k + 1;
    out.add_term(key, a * std::sqrt(double(k + 1)));
  }
  return out;
}

FockVector apply_swap(int wire, const FockVector& v) {
  if (wire < 0 || wire + 1 >= v.modes())
    fail(ErrorKind::BadMode, "swap wire out of range");
  FockVector out(v.modes());
  for (const auto& [occ, a] : v.terms()) {
    OccVec key = occ;
    std::swap(key[std::size_t(wire)], key[std::size_t(wire) + 1]);
    out.add_term(key, a);
  }
  return out;
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  FockVector out(a.modes() + b.modes());
  for (const auto& [oa, za] : a.terms())
    for (const auto& [ob, zb] : b.terms()) {
      OccVec key = oa;
      key.insert(key.end(), ob.begin(), ob.end());
      out.add_term(key, za * zb);
    }
  return out;
}

FockVector tensor_insert(const FockVector& v, const FockVector& state,
                         int at) {
  if (at < 0 || at > v.modes())
    fail(ErrorKind::BadMode, "insertion position out of range");
  FockVector out(v.modes() + state.modes());
  for (const auto& [ov, zv] : v.terms())
    for (const auto& [os, zs] : state.terms()) {
      OccVec key(ov.begin(), ov.begin() + at);
      key.insert(key.end(), os.begin(), os.end());
      key.insert(key.end(), ov.begin() + at, ov.end());
      out.add_term(key, zv * zs);
    }
  return out;
}

FockVector contract(const FockVector& v, const DualFockVector& effect,
                    int at) {
  const int k = effect.modes();
  if (at < 0 || at + k > v.modes())
    fail(ErrorKind::BadMode, "contraction window out of range");
  FockVector out(v.modes() - k);
  OccVec inside(static_cast<std::size_t>(k), 0);
  for (const auto& [occ, a] : v.terms()) {
    std::copy(occ.begin() + at, occ.begin() + at + k, inside.begin());
    const Complex g = effect.coeffs.amplitude(inside);
    if (std::abs(g) == 0.0) continue;
    OccVec key(occ.begin(), occ.begin() + at);
    key.insert(key.end(), occ.begin() + at + k, occ.end());
    out.add_term(key, a * g);
  }
  return out;
}

Complex inner_product(const DualFockVector& g, const FockVector& v) {
  if (g.modes() != v.modes())
    fail(ErrorKind::BadMode, "mode count mismatch in inner product");
  Complex acc{0.0, 0.0};
  for (const auto& [occ, c] : g.coeffs.terms()) acc += c * v.amplitude(occ);
  return acc;
}

FockVector eval_circuit(const Circuit& c, const FockVector& v,
                        const EvalConfig& cfg) {
  if (v.modes() != c.n_in)
    fail(ErrorKind::BadInput, "input state has " + std::to_string(v.modes()) +
                                  " modes, circuit expects " +
                                  std::to_string(c.n_in));
  require_valid(c);
  const auto widths = boundary_widths(c);
  FockVector cur = v;
  for (std::size_t j = 0; j < c.columns.size(); ++j) {
    const ColumnLayout layout = column_layout(c.columns[j], widths[j]);
    int pos = 0;
    for (const ColumnSlot& slot : layout.slots) {
      if (slot.gen_index < 0) {
        pos += slot.identity_count;
        continue;
      }
      const Generator& g = c.columns[j].gens[std::size_t(slot.gen_index)];
      if (const auto* ps = std::get_if<PhaseShifter>(&g)) {
        cur = apply_phase(ps->phi.value, pos, cur);
        pos += 1;
      } else if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
        cur = apply_bs(bs->theta.value, pos, cur);
        pos += 2;
      } else if (std::get_if<Swap>(&g)) {
        cur = apply_swap(pos, cur);
        pos += 2;
      } else if (const auto* src = std::get_if<Source>(&g)) {
        cur = tensor_insert(cur, src->state, pos);
        pos += src->state.modes();
      } else if (const auto* det = std::get_if<Detector>(&g)) {
        cur = contract(cur, det->effect, pos);
      }
    }
    cur.prune(cfg.prune_eps);
    if (cfg.max_photons && cur.max_total_photons() > *cfg.max_photons)
      fail(ErrorKind::PhotonCapExceeded,
           "state exceeded photon cap " + std::to_string(*cfg.max_photons));
  }
  return cur;
}

namespace {
void probe_rec(int modes, int budget, OccVec& cur, std::vector<OccVec>& out) {
  if (int(cur.size()) == modes) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= budget; ++k) {
    cur.push_back(k);
    probe_rec(modes, budget - k, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<OccVec> probe_basis(int modes, int max_total) {
  std::vector<OccVec> out;
  OccVec cur;
  probe_rec(modes, max_total, cur, out);
  return out;
}

}  // namespace lov
