#include "sdae/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sdae {

using nlohmann::json;

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SingularNormalization: return "SingularNormalization";
    case ErrorCode::ZeroTestFunction: return "ZeroTestFunction";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidArc: return "InvalidArc";
    case ErrorCode::InconsistentNetwork: return "InconsistentNetwork";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

namespace {

json parse_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::ParseError, what + " is not valid JSON");
  return j;
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorCode::ParseError, where + " is missing field '" + key + "'");
  return j.at(key);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorCode::ParseError, where + " must be a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(ErrorCode::ParseError, where + " must be an integer");
  return j.get<int>();
}

Vector vector_at(const json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorCode::ParseError, where + " must be an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = number_at(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_at(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    fail(ErrorCode::ParseError, where + " must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<int>(j.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      fail(ErrorCode::ParseError,
           where + " row " + std::to_string(r) + " has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) =
          number_at(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

BumpTestFunction testfn_at(const json& j, const std::string& where) {
  const double center = number_at(need(j, "center", where), where + ".center");
  const double radius = number_at(need(j, "radius", where), where + ".radius");
  const Vector polyV = vector_at(need(j, "poly", where), where + ".poly");
  std::vector<double> poly(polyV.data(), polyV.data() + polyV.size());
  int order = 8;
  if (j.contains("maxDerivOrder"))
    order = int_at(j.at("maxDerivOrder"), where + ".maxDerivOrder");
  return make_bump(center, radius, std::move(poly), order);
}

json testfn_json(const BumpTestFunction& phi) {
  json j;
  j["center"] = phi.center;
  j["radius"] = phi.radius;
  j["poly"] = phi.poly;
  j["maxDerivOrder"] = phi.maxDerivOrder;
  return j;
}

PiecewisePoly pieces_at(const json& j, const std::string& where) {
  PiecewisePoly poly;
  const json& arr = need(j, "pieces", where);
  if (!arr.is_array()) fail(ErrorCode::ParseError, where + ".pieces must be an array");
  for (std::size_t p = 0; p < arr.size(); ++p) {
    const std::string pw = where + ".pieces[" + std::to_string(p) + "]";
    PolyPiece piece;
    piece.lo = number_at(need(arr[p], "lo", pw), pw + ".lo");
    piece.hi = number_at(need(arr[p], "hi", pw), pw + ".hi");
    const Vector cv = vector_at(need(arr[p], "coeffs", pw), pw + ".coeffs");
    piece.coeffs.assign(cv.data(), cv.data() + cv.size());
    if (!(piece.lo < piece.hi))
      fail(ErrorCode::ParseError, pw + " needs lo < hi");
    poly.pieces.push_back(std::move(piece));
  }
  return poly;
}

} // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::ParseError, "writing '" + path + "' failed");
}

SdaeProblem problem_from_json(const std::string& text) {
  const json j = parse_text(text, "problem");
  MatrixPencil pencil;
  pencil.A = matrix_at(need(j, "A", "problem"), "A");
  pencil.B = matrix_at(need(j, "B", "problem"), "B");
  if (pencil.A.rows() != pencil.A.cols())
    fail(ErrorCode::ParseError, "A must be square");
  if (pencil.B.rows() != pencil.A.rows() || pencil.B.cols() != pencil.A.cols())
    fail(ErrorCode::ParseError, "B must have the same shape as A");
  const int n = pencil.size();

  Matrix Lambda = Matrix::Zero(n, 0);
  if (j.contains("Lambda")) {
    Lambda = matrix_at(j.at("Lambda"), "Lambda");
    if (Lambda.rows() != n) fail(ErrorCode::ParseError, "Lambda must have n rows");
  }

  ForcingSpec forcing = ForcingSpec::zero(n);
  if (j.contains("forcing")) {
    const json& arr = j.at("forcing");
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
      fail(ErrorCode::ParseError, "forcing must be an array with one entry per equation");
    for (int i = 0; i < n; ++i) {
      if (arr[i].is_null()) continue;
      forcing.set(i, pieces_at(arr[i], "forcing[" + std::to_string(i) + "]"));
    }
  }

  Vector u0;
  if (j.contains("u0")) u0 = vector_at(j.at("u0"), "u0");

  BumpTestFunction phi0 = j.contains("phi0")
                              ? testfn_at(j.at("phi0"), "phi0")
                              : normalized(make_bump(1.0, 0.5, {1.0}));
  return make_problem(std::move(pencil), std::move(Lambda), std::move(forcing), std::move(u0),
                      std::move(phi0));
}

std::string problem_to_json(const SdaeProblem& problem) {
  json j;
  j["A"] = to_json(problem.pencil.A);
  j["B"] = to_json(problem.pencil.B);
  if (problem.Lambda.cols() > 0) j["Lambda"] = to_json(problem.Lambda);
  if (!problem.forcing.all_zero()) {
    json arr = json::array();
    for (int i = 0; i < problem.forcing.size(); ++i) {
      if (problem.forcing.is_zero(i)) {
        arr.push_back(nullptr);
        continue;
      }
      json pieces = json::array();
      for (const PolyPiece& piece : problem.forcing.component(i)->pieces) {
        json p;
        p["lo"] = piece.lo;
        p["hi"] = piece.hi;
        p["coeffs"] = piece.coeffs;
        pieces.push_back(std::move(p));
      }
      json comp;
      comp["pieces"] = std::move(pieces);
      arr.push_back(std::move(comp));
    }
    j["forcing"] = std::move(arr);
  }
  if (problem.u0.size() > 0) j["u0"] = to_json(problem.u0);
  j["phi0"] = testfn_json(problem.phi0);
  return j.dump(2) + "\n";
}

SdaeProblem load_problem(const std::string& path) {
  return problem_from_json(read_text_file(path));
}

BumpTestFunction testfn_from_json(const std::string& text) {
  return testfn_at(parse_text(text, "test function"), "testfn");
}

std::string testfn_to_json(const BumpTestFunction& phi) {
  return testfn_json(phi).dump(2) + "\n";
}

namespace {

DeviceKind kind_from(const std::string& word, const std::string& where) {
  if (word == "resistor") return DeviceKind::Resistor;
  if (word == "inductor") return DeviceKind::Inductor;
  if (word == "capacitor") return DeviceKind::Capacitor;
  if (word == "current_source") return DeviceKind::CurrentSource;
  if (word == "voltage_source") return DeviceKind::VoltageSource;
  fail(ErrorCode::ParseError, where + " has unknown device type '" + word + "'");
}

const char* kind_to(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Resistor: return "resistor";
    case DeviceKind::Inductor: return "inductor";
    case DeviceKind::Capacitor: return "capacitor";
    case DeviceKind::CurrentSource: return "current_source";
    case DeviceKind::VoltageSource: return "voltage_source";
  }
  return "resistor";
}

} // namespace

Netlist netlist_from_json(const std::string& text) {
  const json j = parse_text(text, "netlist");
  Netlist net;
  net.nodeCount = int_at(need(j, "nodes", "netlist"), "nodes");
  const json& devices = need(j, "devices", "netlist");
  if (!devices.is_array()) fail(ErrorCode::ParseError, "devices must be an array");
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string where = "devices[" + std::to_string(i) + "]";
    const json& dj = devices[i];
    Device dev;
    const json& type = need(dj, "type", where);
    if (!type.is_string()) fail(ErrorCode::ParseError, where + ".type must be a string");
    dev.kind = kind_from(type.get<std::string>(), where);
    const json& name = need(dj, "name", where);
    if (!name.is_string()) fail(ErrorCode::ParseError, where + ".name must be a string");
    dev.name = name.get<std::string>();
    dev.from = int_at(need(dj, "from", where), where + ".from");
    dev.to = int_at(need(dj, "to", where), where + ".to");
    dev.value = number_at(need(dj, "value", where), where + ".value");
    if (dj.contains("tau")) dev.tau = number_at(dj.at("tau"), where + ".tau");
    net.devices.push_back(std::move(dev));
  }
  return net;
}

std::string netlist_to_json(const Netlist& netlist) {
  json j;
  j["nodes"] = netlist.nodeCount;
  json devices = json::array();
  for (const Device& dev : netlist.devices) {
    json dj;
    dj["type"] = kind_to(dev.kind);
    dj["name"] = dev.name;
    dj["from"] = dev.from;
    dj["to"] = dev.to;
    dj["value"] = dev.value;
    if (dev.tau != 0.0) dj["tau"] = dev.tau;
    devices.push_back(std::move(dj));
  }
  j["devices"] = std::move(devices);
  return j.dump(2) + "\n";
}

Netlist load_netlist(const std::string& path) {
  return netlist_from_json(read_text_file(path));
}

} // namespace sdae
