#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdae/cli.hpp"
#include "sdae/io.hpp"
#include "support.hpp"

using namespace sdae;

namespace {

const std::string kDataDir = SDAE_TEST_DATA_DIR;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"sdae"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult res;
  res.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  res.out = out.str();
  res.err = err.str();
  return res;
}

std::string report_of(const std::string& out) {
  const auto pos = out.find("--- report ---");
  REQUIRE(pos != std::string::npos);
  return out.substr(pos);
}

std::filesystem::path scratch_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sdae_io_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("test function specs round-trip through JSON byte for byte") {
  const auto phi = make_bump(1.25, 0.375, {0.5, -0.125, 2.0}, 6);
  const std::string text = testfn_to_json(phi);
  const auto back = testfn_from_json(text);
  CHECK(back.center == phi.center);
  CHECK(back.radius == phi.radius);
  CHECK(back.poly == phi.poly);
  CHECK(back.maxDerivOrder == phi.maxDerivOrder);
  CHECK(testfn_to_json(back) == text);

  // non-dyadic values still survive because the writer prints shortest
  // round-trip representations
  const auto odd = make_bump(1.0 / 3.0 + 1.0, 0.1 + 0.2, {std::acos(-1.0)});
  CHECK(testfn_from_json(testfn_to_json(odd)).center == odd.center);
  CHECK(testfn_from_json(testfn_to_json(odd)).poly == odd.poly);

  CHECK(error_code_of([] { testfn_from_json("{\"center\": 1.0}"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { testfn_from_json("not json"); }) == ErrorCode::ParseError);
  // make_bump validation surfaces through the parser too
  CHECK(error_code_of([] {
          testfn_from_json("{\"center\": 1.0, \"radius\": -1.0, \"poly\": [1]}");
        }) == ErrorCode::ParseError);
}

TEST_CASE("problem files round-trip and reject malformed input") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  Matrix B(2, 2);
  B << 0.5, -0.25, 1.0 / 3.0, 2.0;
  Matrix Lambda(2, 1);
  Lambda << 0.7, -0.1;
  ForcingSpec forcing = ForcingSpec::zero(2);
  forcing.set(1, PiecewisePoly{{{0.0, 1.5, {1.0, -2.0}}, {1.5, 3.0, {0.25}}}});
  Vector u0(1);
  u0 << 0.4;
  const SdaeProblem problem =
      make_problem({A, B}, Lambda, forcing, u0, normalized(make_bump(1.0, 0.5, {1.0})));

  const std::string text = problem_to_json(problem);
  const SdaeProblem back = problem_from_json(text);
  CHECK((back.pencil.A - A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.pencil.B - B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.Lambda - Lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.u0 == u0);
  CHECK(back.forcing.is_zero(0));
  CHECK(back.forcing.eval(1, 1.0) == forcing.eval(1, 1.0));
  CHECK(back.forcing.eval(1, 2.0) == forcing.eval(1, 2.0));
  CHECK(back.phi0.poly == problem.phi0.poly);
  // a second pass produces identical bytes, so files are diff-stable
  CHECK(problem_to_json(back) == text);

  // minimal file: everything optional falls back to documented defaults
  const SdaeProblem minimal = problem_from_json("{\"A\": [[1]], \"B\": [[2]]}");
  CHECK(minimal.m() == 0);
  CHECK(minimal.forcing.all_zero());
  CHECK(minimal.u0.size() == 0);
  CHECK(minimal.phi0.center == 1.0);
  CHECK(total_mass(minimal.phi0) == doctest::Approx(1.0).epsilon(1e-10));

  auto parse_fails = [](const std::string& t) {
    return error_code_of([&] { problem_from_json(t); }) == ErrorCode::ParseError;
  };
  CHECK(parse_fails("["));
  CHECK(parse_fails("{\"B\": [[1]]}"));
  CHECK(parse_fails("{\"A\": [[1, 2]], \"B\": [[1]]}"));
  CHECK(parse_fails("{\"A\": [[1]], \"B\": [[1, 0], [0, 1]]}"));
  CHECK(parse_fails("{\"A\": [[1]], \"B\": [[1]], \"Lambda\": [[1], [2]]}"));
  CHECK(parse_fails("{\"A\": [[1]], \"B\": [[1]], \"forcing\": []}"));
  CHECK(parse_fails(
      "{\"A\": [[1]], \"B\": [[1]], \"forcing\": [{\"pieces\": [{\"lo\": 2, \"hi\": 1, "
      "\"coeffs\": [1]}]}]}"));
  CHECK(parse_fails("{\"A\": [[1], [2]], \"B\": [[1], [2]]}"));
  CHECK(parse_fails("{\"A\": [[1, \"x\"], [0, 1]], \"B\": [[1, 0], [0, 1]]}"));

  CHECK(error_code_of([] { load_problem("/nonexistent/path.json"); }) == ErrorCode::ParseError);
}

TEST_CASE("netlist files round-trip and the shipped example assembles consistently") {
  Netlist net;
  net.nodeCount = 2;
  Device dev;
  dev.kind = DeviceKind::VoltageSource;
  dev.name = "V";
  dev.from = 1;
  dev.to = 2;
  dev.value = 1.5;
  net.devices.push_back(dev);
  dev.kind = DeviceKind::Capacitor;
  dev.name = "C";
  dev.from = 2;
  dev.to = 1;
  dev.value = 0.25;
  dev.tau = 0.5;
  net.devices.push_back(dev);

  const std::string text = netlist_to_json(net);
  const Netlist back = netlist_from_json(text);
  REQUIRE(back.devices.size() == 2);
  CHECK(back.nodeCount == 2);
  CHECK(back.devices[0].kind == DeviceKind::VoltageSource);
  CHECK(back.devices[0].tau == 0.0);
  CHECK(back.devices[1].kind == DeviceKind::Capacitor);
  CHECK(back.devices[1].tau == 0.5);
  CHECK(netlist_to_json(back) == text);

  CHECK(error_code_of([] {
          netlist_from_json("{\"nodes\": 2, \"devices\": [{\"type\": \"diode\", \"name\": "
                            "\"d\", \"from\": 1, \"to\": 2, \"value\": 1}]}");
        }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { netlist_from_json("{\"nodes\": 2}"); }) == ErrorCode::ParseError);

  // the shipped two-inductor example matches the shipped problem file
  const Netlist example = load_netlist(kDataDir + "/ll_cutset.netlist.json");
  const CircuitSystem sys = assemble_sdae(example);
  const SdaeProblem shipped = load_problem(kDataDir + "/ll_cutset_pencil.json");
  CHECK((sys.pencil.A - shipped.pencil.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.pencil.B - shipped.pencil.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.Lambda - shipped.Lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK(total_mass(shipped.phi0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("command line: help, usage errors, and missing files") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "regularity"));
  CHECK(contains(help.out, "simulate"));
  CHECK(contains(help.out, "circuit"));

  CHECK(run({}).code == 2);
  CHECK(run({"kcf"}).code == 2);                       // --pencil is required
  CHECK(run({"law", "--bogus-flag", "x"}).code == 2);
  CHECK(run({"kcf", "--pencil", "/nonexistent.json"}).code == 2);

  const auto badJson = scratch_file("bad.json");
  write_text_file(badJson.string(), "{ not json");
  CHECK(run({"kcf", "--pencil", badJson.string()}).code == 2);
}

TEST_CASE("command line: analysis subcommands on the shipped example") {
  const std::string pencil = kDataDir + "/ll_cutset_pencil.json";

  const auto reg = run({"regularity", "--pencil", pencil});
  CHECK(reg.code == 0);
  CHECK(contains(reg.out, "regular"));

  const auto kcf = run({"kcf", "--pencil", pencil});
  CHECK(kcf.code == 0);
  CHECK(contains(kcf.out, "d = 1"));
  CHECK(contains(kcf.out, "blocks = [2,1]"));
  CHECK(contains(kcf.out, "(ok)"));

  const auto law = run({"law", "--pencil", pencil});
  CHECK(law.code == 0);
  CHECK(contains(law.out, "rank 3"));

  // the joint law of this network is supported on a hyperplane, which the
  // analysis reports as a domain failure
  const auto abs = run({"abscont", "--pencil", pencil});
  CHECK(abs.code == 1);
  CHECK(contains(abs.out, "singular"));

  // reports parse as JSON and carry the decomposition shape
  const auto j = nlohmann::json::parse(report_of(kcf.out).substr(std::string("--- report ---\n").size()));
  CHECK(j.at("d") == 1);
  CHECK(j.at("q") == 3);
  CHECK(j.at("index") == 2);
  CHECK(j.at("validated") == true);

  // an explicit test function flag reaches the law
  const auto lawPhi =
      run({"law", "--pencil", pencil, "--phi",
           "{\"center\": 1.0, \"radius\": 0.4, \"poly\": [1.0]}"});
  CHECK(lawPhi.code == 0);
  const auto lawBadPhi = run({"law", "--pencil", pencil, "--phi", "{\"center\": 1.0}"});
  CHECK(lawBadPhi.code == 2);
}

TEST_CASE("command line: ODE problem is absolutely continuous") {
  const auto path = scratch_file("ode.json");
  write_text_file(path.string(),
                  "{\"A\": [[1, 0], [0, 1]], \"B\": [[1, 0], [0, 2]], "
                  "\"Lambda\": [[1, 0], [0, 1]]}");
  const auto abs = run({"abscont", "--pencil", path.string()});
  CHECK(abs.code == 0);
  CHECK(contains(abs.out, "absolutely continuous"));
}

TEST_CASE("command line: simulation reports are deterministic in the seed") {
  const auto path = scratch_file("scalar.json");
  write_text_file(path.string(),
                  "{\"A\": [[1]], \"B\": [[0.8]], \"Lambda\": [[0.9]], \"u0\": [0.2]}");

  const std::vector<std::string> base = {"simulate",  "--pencil", path.string(),
                                         "--samples", "400",      "--steps",
                                         "1200",      "--horizon", "2.0"};
  auto withSeed = [&](const std::string& seed) {
    auto args = base;
    args.push_back("--seed");
    args.push_back(seed);
    return run(args);
  };
  const auto a = withSeed("7");
  const auto b = withSeed("7");
  const auto c = withSeed("8");
  CHECK(a.code == 0);
  CHECK(contains(a.out, "pass"));
  CHECK(report_of(a.out) == report_of(b.out));
  CHECK(report_of(a.out) != report_of(c.out));

  // an absurd acceptance bound turns the same run into a reported failure
  auto tight = base;
  tight.insert(tight.end(), {"--seed", "7", "--z-threshold", "1e-9"});
  const auto failing = run(tight);
  CHECK(failing.code == 1);
  CHECK(contains(failing.out, "FAIL"));
}

TEST_CASE("command line: circuit assembly emits a loadable problem") {
  const std::string netlist = kDataDir + "/ll_cutset.netlist.json";
  const auto emitted = scratch_file("emitted_pencil.json");

  const auto res =
      run({"circuit", "--netlist", netlist, "--emit-pencil", emitted.string()});
  CHECK(res.code == 0);
  CHECK(contains(res.out, "4 equations"));
  CHECK(contains(res.out, "3 noise channel(s)"));
  CHECK(contains(res.out, "u(L1)"));
  CHECK(contains(res.out, "d = 1"));

  const SdaeProblem loaded = load_problem(emitted.string());
  const CircuitSystem sys = assemble_sdae(load_netlist(netlist));
  CHECK((loaded.pencil.A - sys.pencil.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.pencil.B - sys.pencil.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.Lambda - sys.Lambda).cwiseAbs().maxCoeff() == 0.0);

  const auto badNet = scratch_file("bad_netlist.json");
  write_text_file(badNet.string(), "{\"nodes\": 1}");
  CHECK(run({"circuit", "--netlist", badNet.string()}).code == 2);
}
