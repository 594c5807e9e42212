#pragma once

#include <string>

#include "lov/circuit.hpp"
#include "lov/unitary.hpp"

namespace lov {

std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);

std::string fock_to_json(const FockVector& v);
FockVector fock_from_json(const std::string& text);

std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const std::string& text);

}  // namespace lov
