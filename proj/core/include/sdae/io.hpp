#pragma once

#include <string>

#include "sdae/circuit.hpp"
#include "sdae/law.hpp"

namespace sdae {

// File helpers; both raise ParseError with the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Problem files:
// {
//   "A": [[...], ...], "B": [[...], ...],          square, same size
//   "Lambda": [[...], ...],                        optional, n rows
//   "forcing": [null | {"pieces": [{"lo", "hi", "coeffs"}, ...]}, ...],
//   "u0": [...],                                   optional
//   "phi0": {"center", "radius", "poly", "maxDerivOrder"?}   optional
// }
// Missing phi0 defaults to the normalized standard window on [0.5, 1.5].
// All shape or type violations raise ParseError naming the field.
SdaeProblem problem_from_json(const std::string& text);
std::string problem_to_json(const SdaeProblem& problem);
SdaeProblem load_problem(const std::string& path);

// Test-function specs: {"center", "radius", "poly", "maxDerivOrder"?}.
BumpTestFunction testfn_from_json(const std::string& text);
std::string testfn_to_json(const BumpTestFunction& phi);

// Netlists:
// {"nodes": N, "devices": [{"type", "name", "from", "to", "value", "tau"?}]}
// with type one of resistor | inductor | capacitor | current_source |
// voltage_source and 1-based node indices.
Netlist netlist_from_json(const std::string& text);
std::string netlist_to_json(const Netlist& netlist);
Netlist load_netlist(const std::string& path);

} // namespace sdae
