#pragma once

#include <string>
#include <vector>

#include "sdae/forcing.hpp"
#include "sdae/pencil.hpp"
#include "sdae/types.hpp"

namespace sdae {

enum class DeviceKind { Resistor, Inductor, Capacitor, CurrentSource, VoltageSource };

// One oriented arc of the network. value holds the resistance, inductance,
// capacitance, or source level; tau > 0 attaches a white-noise channel to the
// device characteristic.
struct Device {
  DeviceKind kind = DeviceKind::Resistor;
  std::string name;
  int from = 0; // 1-based origin node
  int to = 0;   // 1-based destination node
  double value = 0.0;
  double tau = 0.0;
};

struct Netlist {
  int nodeCount = 0;
  std::vector<Device> devices;
};

// Assembled descriptor system A z' + B z = f + Lambda xi together with the
// labels needed to read it: variables are the surviving arc tensions (by arc
// index) followed by the surviving arc flows, rows are the retained
// conservation relations followed by the dynamic characteristics, noise
// channels are the tau > 0 devices in arc order.
struct CircuitSystem {
  MatrixPencil pencil;
  Matrix Lambda;
  ForcingSpec forcing;
  std::vector<std::string> variableNames;
  std::vector<std::string> noiseNames;
  std::vector<std::string> rowLabels;
};

bool is_dynamic(DeviceKind kind); // inductor or capacitor

// Node-arc incidence: +1 at the origin, -1 at the destination.
// InvalidArc on out-of-range nodes or self-loops.
Matrix incidence_matrix(const Netlist& netlist);

// Orthonormal basis of the cycle space ker(incidence), one column per
// independent loop, each column's sign pinned by its first significant entry.
Matrix cycle_basis(const Matrix& incidence, double rankTol = 1e-10);

// Reduction to a minimal descriptor system:
//  - algebraic characteristics are solved for one variable (flow for
//    resistors and current sources, tension for voltage sources) and
//    substituted into the conservation relations;
//  - leftover algebraic-arc variables are eliminated through exact
//    conservation rows, which are consumed as pivots;
//  - redundant conservation rows are dropped, preferring to keep rows that
//    absorbed a device characteristic; a row whose coefficients vanish
//    against the retained set while its forcing or noise does not raises
//    InconsistentNetwork.
CircuitSystem assemble_sdae(const Netlist& netlist, const ToleranceConfig& tol = {});

} // namespace sdae
