#include "sdae/circuit.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <set>

namespace sdae {

namespace {

constexpr double kForcingSpan = 1e9; // constant sources live on [-span, span]

const char* kind_word(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Resistor: return "resistor";
    case DeviceKind::Inductor: return "inductor";
    case DeviceKind::Capacitor: return "capacitor";
    case DeviceKind::CurrentSource: return "current source";
    case DeviceKind::VoltageSource: return "voltage source";
  }
  return "device";
}

void validate(const Netlist& netlist) {
  if (netlist.nodeCount < 1) fail(ErrorCode::InvalidArc, "netlist needs at least one node");
  if (netlist.devices.empty()) fail(ErrorCode::InvalidArc, "netlist has no devices");
  std::set<std::string> names;
  for (const Device& dev : netlist.devices) {
    if (dev.name.empty()) fail(ErrorCode::InvalidArc, "every device needs a name");
    if (!names.insert(dev.name).second)
      fail(ErrorCode::InvalidArc, "duplicate device name '" + dev.name + "'");
    if (dev.from < 1 || dev.from > netlist.nodeCount || dev.to < 1 ||
        dev.to > netlist.nodeCount)
      fail(ErrorCode::InvalidArc, "device '" + dev.name + "' references a node outside 1.." +
                                      std::to_string(netlist.nodeCount));
    if (dev.from == dev.to)
      fail(ErrorCode::InvalidArc, "device '" + dev.name + "' is a self-loop");
    if (dev.tau < 0.0)
      fail(ErrorCode::InvalidArc, "device '" + dev.name + "' has a negative noise amplitude");
    const bool needsPositive = dev.kind == DeviceKind::Resistor ||
                               dev.kind == DeviceKind::Inductor ||
                               dev.kind == DeviceKind::Capacitor;
    if (needsPositive && !(dev.value > 0.0))
      fail(ErrorCode::InvalidArc, std::string("device '") + dev.name + "' (" +
                                      kind_word(dev.kind) + ") needs a positive value");
    if (!std::isfinite(dev.value) || !std::isfinite(dev.tau))
      fail(ErrorCode::InvalidArc, "device '" + dev.name + "' has a non-finite parameter");
  }
}

// Fundamental cycles of the arc graph: one exact 0/±1 column per chord of a
// BFS spanning forest, sign pinned so the first nonzero entry is +1. Exact
// integer rows keep the assembled matrices free of rescaling roundoff.
std::vector<Vector> fundamental_cycles(const Netlist& netlist) {
  const int nodes = netlist.nodeCount;
  const int arcs = static_cast<int>(netlist.devices.size());
  std::vector<std::vector<std::pair<int, int>>> adj(nodes); // (neighbor, arc)
  for (int j = 0; j < arcs; ++j) {
    adj[netlist.devices[j].from - 1].push_back({netlist.devices[j].to - 1, j});
    adj[netlist.devices[j].to - 1].push_back({netlist.devices[j].from - 1, j});
  }

  // Signed arc-path from each component root to the node.
  std::vector<Vector> pathTo(nodes, Vector::Zero(arcs));
  std::vector<bool> seen(nodes, false);
  std::vector<bool> treeArc(arcs, false);
  for (int root = 0; root < nodes; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::vector<int> queue{root};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int at = queue[head];
      for (const auto& [next, arc] : adj[at]) {
        if (seen[next]) continue;
        seen[next] = true;
        treeArc[arc] = true;
        pathTo[next] = pathTo[at];
        pathTo[next](arc) += netlist.devices[arc].from - 1 == at ? 1.0 : -1.0;
        queue.push_back(next);
      }
    }
  }

  std::vector<Vector> cycles;
  for (int j = 0; j < arcs; ++j) {
    if (treeArc[j]) continue;
    Vector c = Vector::Zero(arcs);
    c(j) = 1.0;
    c += pathTo[netlist.devices[j].from - 1] - pathTo[netlist.devices[j].to - 1];
    for (int r = 0; r < arcs; ++r)
      if (c(r) != 0.0) {
        if (c(r) < 0.0) c = -c;
        break;
      }
    cycles.push_back(std::move(c));
  }
  return cycles;
}

// One working equation over the raw variable layout (all tensions, then all
// flows). Conservation rows have no derivative part; characteristics do.
struct Row {
  Vector a;
  Vector b;
  double f = 0.0;
  Vector lam;
  std::string label;
  bool conservation = false;
  bool substituted = false;
  int pos = 0;
};

} // namespace

bool is_dynamic(DeviceKind kind) {
  return kind == DeviceKind::Inductor || kind == DeviceKind::Capacitor;
}

Matrix incidence_matrix(const Netlist& netlist) {
  validate(netlist);
  Matrix inc = Matrix::Zero(netlist.nodeCount, static_cast<int>(netlist.devices.size()));
  for (std::size_t j = 0; j < netlist.devices.size(); ++j) {
    inc(netlist.devices[j].from - 1, static_cast<int>(j)) = 1.0;
    inc(netlist.devices[j].to - 1, static_cast<int>(j)) = -1.0;
  }
  return inc;
}

Matrix cycle_basis(const Matrix& incidence, double rankTol) {
  const int arcs = static_cast<int>(incidence.cols());
  Eigen::JacobiSVD<Matrix> svd(incidence, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * rankTol;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  Matrix basis = svd.matrixV().rightCols(arcs - rank);
  for (int c = 0; c < basis.cols(); ++c) {
    const double mx = basis.col(c).cwiseAbs().maxCoeff();
    for (int r = 0; r < arcs; ++r)
      if (std::abs(basis(r, c)) > 1e-8 * mx) {
        if (basis(r, c) < 0.0) basis.col(c) = -basis.col(c);
        break;
      }
  }
  return basis;
}

CircuitSystem assemble_sdae(const Netlist& netlist, const ToleranceConfig& tol) {
  const Matrix inc = incidence_matrix(netlist); // validates
  const int arcs = static_cast<int>(netlist.devices.size());
  const int vars = 2 * arcs; // raw layout: tension j, then flow arcs + j

  // Noise channels in arc order.
  std::vector<int> channel(arcs, -1);
  std::vector<std::string> noiseNames;
  for (int j = 0; j < arcs; ++j)
    if (netlist.devices[j].tau > 0.0) {
      channel[j] = static_cast<int>(noiseNames.size());
      noiseNames.push_back(netlist.devices[j].name);
    }
  const int chans = static_cast<int>(noiseNames.size());

  std::vector<Row> rowsTopo, rowsChar;
  auto blank = [&]() {
    Row r;
    r.a = Vector::Zero(vars);
    r.b = Vector::Zero(vars);
    r.lam = Vector::Zero(chans);
    return r;
  };

  // Conservation of flow at every node.
  for (int nd = 0; nd < netlist.nodeCount; ++nd) {
    Row r = blank();
    r.conservation = true;
    r.label = "kcl:" + std::to_string(nd + 1);
    for (int j = 0; j < arcs; ++j) r.b(arcs + j) = inc(nd, j);
    r.pos = static_cast<int>(rowsTopo.size());
    rowsTopo.push_back(std::move(r));
  }
  // Conservation of tension around every fundamental loop (exact 0/±1 rows).
  const std::vector<Vector> cycles = fundamental_cycles(netlist);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    Row r = blank();
    r.conservation = true;
    r.label = "kvl:" + std::to_string(c + 1);
    r.b.head(arcs) = cycles[c];
    r.pos = static_cast<int>(rowsTopo.size());
    rowsTopo.push_back(std::move(r));
  }

  // Dynamic characteristics, derivative coefficient positive.
  for (int j = 0; j < arcs; ++j) {
    const Device& dev = netlist.devices[j];
    if (!is_dynamic(dev.kind)) continue;
    Row r = blank();
    r.label = "char:" + dev.name;
    if (dev.kind == DeviceKind::Inductor) {
      r.a(arcs + j) = dev.value; // L x' - u = -tau xi
      r.b(j) = -1.0;
    } else {
      r.a(j) = dev.value; // C u' - x = -tau xi
      r.b(arcs + j) = -1.0;
    }
    if (channel[j] >= 0) r.lam(channel[j]) = -dev.tau;
    rowsChar.push_back(std::move(r));
  }

  // Solve each algebraic characteristic for one variable and substitute it
  // into the conservation rows.
  std::vector<bool> tensionActive(arcs, true), flowActive(arcs, true);
  for (int j = 0; j < arcs; ++j) {
    const Device& dev = netlist.devices[j];
    if (is_dynamic(dev.kind)) continue;
    if (dev.kind == DeviceKind::Resistor) {
      // x = u/R - (tau/R) xi
      for (Row& r : rowsTopo) {
        const double c = r.b(arcs + j);
        if (c == 0.0) continue;
        r.b(arcs + j) = 0.0;
        r.b(j) += c / dev.value;
        if (channel[j] >= 0) r.lam(channel[j]) += c * dev.tau / dev.value;
        r.substituted = true;
      }
      flowActive[j] = false;
    } else if (dev.kind == DeviceKind::CurrentSource) {
      // x = level + tau xi
      for (Row& r : rowsTopo) {
        const double c = r.b(arcs + j);
        if (c == 0.0) continue;
        r.b(arcs + j) = 0.0;
        r.f -= c * dev.value;
        if (channel[j] >= 0) r.lam(channel[j]) -= c * dev.tau;
        r.substituted = true;
      }
      flowActive[j] = false;
    } else {
      // u = level + tau xi
      for (Row& r : rowsTopo) {
        const double c = r.b(j);
        if (c == 0.0) continue;
        r.b(j) = 0.0;
        r.f -= c * dev.value;
        if (channel[j] >= 0) r.lam(channel[j]) -= c * dev.tau;
        r.substituted = true;
      }
      tensionActive[j] = false;
    }
  }

  // Eliminate the leftover variable of each algebraic arc through an exact
  // conservation row (no forcing, no noise), preferring rows that are still
  // pure topology; the pivot row is consumed.
  std::vector<bool> consumed(rowsTopo.size(), false);
  for (int j = 0; j < arcs; ++j) {
    const Device& dev = netlist.devices[j];
    if (is_dynamic(dev.kind)) continue;
    const int var = dev.kind == DeviceKind::VoltageSource ? arcs + j : j;
    int pivot = -1;
    double best = 0.0;
    bool bestPure = false;
    for (std::size_t r = 0; r < rowsTopo.size(); ++r) {
      if (consumed[r]) continue;
      const Row& row = rowsTopo[r];
      if (row.f != 0.0 || !row.lam.isZero(0.0)) continue;
      const double c = std::abs(row.b(var));
      if (c <= 1e-12) continue;
      const bool pure = !row.substituted;
      if (pivot < 0 || (pure && !bestPure) || (pure == bestPure && c > best)) {
        pivot = static_cast<int>(r);
        best = c;
        bestPure = pure;
      }
    }
    if (pivot < 0) continue; // variable stays in the system
    const Row pivotRow = rowsTopo[pivot];
    const double p = pivotRow.b(var);
    for (std::size_t r = 0; r < rowsTopo.size(); ++r) {
      if (consumed[r] || static_cast<int>(r) == pivot) continue;
      Row& row = rowsTopo[r];
      const double c = row.b(var);
      if (c == 0.0) continue;
      row.b -= (c / p) * pivotRow.b;
      row.f -= (c / p) * pivotRow.f;
      row.lam -= (c / p) * pivotRow.lam;
      row.b(var) = 0.0;
    }
    consumed[pivot] = true;
    if (var < arcs)
      tensionActive[j] = false;
    else
      flowActive[j] = false;
  }

  // Drop redundant conservation rows. Rows that absorbed a characteristic are
  // considered first so the noise-carrying relations survive; a row whose
  // coefficients lie in the retained span while forcing or noise does not is
  // a contradiction.
  std::vector<int> order;
  for (std::size_t r = 0; r < rowsTopo.size(); ++r)
    if (!consumed[r]) order.push_back(static_cast<int>(r));
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    if (rowsTopo[x].substituted != rowsTopo[y].substituted) return rowsTopo[x].substituted;
    return x < y;
  });

  std::vector<int> retained;
  Matrix coeffSpan(0, vars), fullSpan(0, vars + 1 + chans);
  for (int idx : order) {
    const Row& row = rowsTopo[idx];
    Vector full(vars + 1 + chans);
    full << row.b, row.f, row.lam;
    const double scale = std::max(full.cwiseAbs().maxCoeff(), 1.0);
    auto residual = [](const Matrix& span, const Vector& v) {
      if (span.rows() == 0) return v.norm();
      const Vector sol =
          span.transpose().completeOrthogonalDecomposition().solve(v);
      return (v - span.transpose() * sol).norm();
    };
    const bool fullDep = residual(fullSpan, full) <= 10.0 * tol.rankTol * scale;
    if (fullDep) continue;
    const bool coeffDep = residual(coeffSpan, row.b) <= 10.0 * tol.rankTol * scale;
    if (coeffDep)
      fail(ErrorCode::InconsistentNetwork,
           "conservation row " + row.label +
               " contradicts the rest of the network (same coefficients, different "
               "forcing or noise)");
    retained.push_back(idx);
    coeffSpan.conservativeResize(coeffSpan.rows() + 1, Eigen::NoChange);
    coeffSpan.row(coeffSpan.rows() - 1) = row.b.transpose();
    fullSpan.conservativeResize(fullSpan.rows() + 1, Eigen::NoChange);
    fullSpan.row(fullSpan.rows() - 1) = full.transpose();
  }
  std::sort(retained.begin(), retained.end());

  // Compress to the surviving variables: tensions by arc index, then flows.
  std::vector<int> colOf(vars, -1);
  std::vector<std::string> variableNames;
  for (int j = 0; j < arcs; ++j)
    if (tensionActive[j]) {
      colOf[j] = static_cast<int>(variableNames.size());
      variableNames.push_back("u(" + netlist.devices[j].name + ")");
    }
  for (int j = 0; j < arcs; ++j)
    if (flowActive[j]) {
      colOf[arcs + j] = static_cast<int>(variableNames.size());
      variableNames.push_back("x(" + netlist.devices[j].name + ")");
    }
  const int n = static_cast<int>(variableNames.size());

  CircuitSystem out;
  const int rowCount = static_cast<int>(retained.size() + rowsChar.size());
  if (rowCount != n)
    fail(ErrorCode::InconsistentNetwork,
         "network reduces to " + std::to_string(rowCount) + " equations in " +
             std::to_string(n) + " variables");
  out.pencil.A = Matrix::Zero(rowCount, n);
  out.pencil.B = Matrix::Zero(rowCount, n);
  out.Lambda = Matrix::Zero(rowCount, chans);
  out.forcing = ForcingSpec::zero(rowCount);
  out.variableNames = std::move(variableNames);
  out.noiseNames = noiseNames;

  int outRow = 0;
  auto emit = [&](const Row& row) {
    for (int v = 0; v < vars; ++v) {
      if (colOf[v] < 0) {
        if (std::abs(row.a(v)) > 0.0 || std::abs(row.b(v)) > 0.0)
          fail(ErrorCode::InconsistentNetwork,
               "row " + row.label + " still references an eliminated variable");
        continue;
      }
      out.pencil.A(outRow, colOf[v]) = row.a(v);
      out.pencil.B(outRow, colOf[v]) = row.b(v);
    }
    out.Lambda.row(outRow) = row.lam.transpose();
    if (row.f != 0.0)
      out.forcing.set(outRow, PiecewisePoly{{{-kForcingSpan, kForcingSpan, {row.f}}}});
    out.rowLabels.push_back(row.label);
    ++outRow;
  };
  for (int idx : retained) emit(rowsTopo[idx]);
  for (const Row& row : rowsChar) emit(row);
  return out;
}

} // namespace sdae
