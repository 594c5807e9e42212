#pragma once

#include <string>

#include "lov/circuit.hpp"

namespace lov {

// Line-based circuit text:
//   circuit <n_in> -> <n_out>
//   ps <wire> <angle>        bs <wire> <angle>       swap <wire>
//   source <k> { <occ>: <a+bi> ; ... }
//   detector <k> { <occ>: <a+bi> ; ... }
//   ---                      (column separator)
// Angles are decimal literals or pi expressions (pi/4, 3*pi/2, -pi).
// Sources and detectors sit at the bottom of their column; `@ <wire>` after
// the mode count overrides the anchor for circuits the plain form cannot
// express.
Circuit parse_dsl(const std::string& text);
std::string print_dsl(const Circuit& c);

Angle parse_angle_text(const std::string& token);
std::string angle_to_text(const Angle& a);
Complex parse_complex_text(const std::string& token);

}  // namespace lov
