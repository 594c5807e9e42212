#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lov/fock.hpp"

namespace lov {

// Angles are carried as radians plus an optional display expression ("pi/4").
// Equality is always on `value`; `expr` is presentation only.
struct Angle {
  double value = 0.0;
  std::string expr;

  Angle() = default;
  Angle(double v) : value(v) {}
  Angle(double v, std::string e) : value(v), expr(std::move(e)) {}
};

struct PhaseShifter {
  int wire = 0;  // input wire index
  Angle phi;
};

struct BeamSplitter {
  int wire = 0;  // acts on (wire, wire+1)
  Angle theta;
};

struct Swap {
  int wire = 0;  // swaps (wire, wire+1)
};

struct Source {
  int wire = 0;  // index of its first output wire
  FockVector state;
};

struct Detector {
  int wire = 0;  // index of its first input wire
  DualFockVector effect;
};

using Generator =
    std::variant<PhaseShifter, BeamSplitter, Swap, Source, Detector>;

int gen_in_width(const Generator& g);
int gen_out_width(const Generator& g);
// Input anchor for everything except Source, which anchors on its outputs.
int gen_anchor(const Generator& g);
bool gen_is_source(const Generator& g);
bool gen_is_detector(const Generator& g);

struct Column {
  std::vector<Generator> gens;  // in vertical (top to bottom) order
};

struct Circuit {
  int n_in = 0;
  int n_out = 0;
  std::vector<Column> columns;

  bool is_lopp() const;  // no sources or detectors
};

// Vertical layout of one column: identity runs interleaved with generators,
// in top-to-bottom order. gen_index == -1 marks an identity run.
struct ColumnSlot {
  int gen_index;  // index into Column::gens, or -1
  int identity_count;
  int in_pos;   // first input wire consumed (or where insertion happens)
  int out_pos;  // first output wire produced
};

struct ColumnLayout {
  std::vector<ColumnSlot> slots;
  int in_width = 0;
  int out_width = 0;
};

// Throws Error(InvariantViolation) if the column's anchors are inconsistent.
ColumnLayout column_layout(const Column& col, int in_width);

// Widths at every column boundary; size columns.size()+1.
std::vector<int> boundary_widths(const Circuit& c);

struct ValidationIssue {
  std::string code;  // OverlapViolation, ArityViolation, ModeChain, ...
  std::string message;
  int column = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

ValidationReport validate(const Circuit& c);
void require_valid(const Circuit& c);  // throws InvariantViolation

Circuit compose_seq(const Circuit& c1, const Circuit& c2);
Circuit compose_tensor(const Circuit& c1, const Circuit& c2);

Circuit identity_circuit(int n);

// Left-pack phase shifters, beam splitters and swaps into the earliest
// column where their wires pass through untouched; drop empty columns.
// Sources and detectors keep their columns.
Circuit canonicalize_layout(const Circuit& c);

bool structurally_equal(const Circuit& a, const Circuit& b,
                        double angle_eps = 1e-9, double amp_eps = 1e-9);

// Convenience builders.
Circuit single_ps(int n_modes, int wire, Angle phi);
Circuit single_bs(int n_modes, int wire, Angle theta);
Circuit single_swap(int n_modes, int wire);

}  // namespace lov
