#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhspectral/io.hpp"
#include "support.hpp"

using namespace mhs;

namespace {

const std::filesystem::path kData = MHSPECTRAL_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Instance load(const std::string& name) { return parse_instance_text(slurp(kData / name)); }

std::string pointer_of(const std::string& text) {
  try {
    parse_instance_text(text);
  } catch (const ParseError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("canonical serialization is idempotent on every instance file") {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kData)) {
    const json doc = parse_json_text(slurp(entry.path()));
    std::vector<json> docs;
    if (doc.is_array()) docs.assign(doc.begin(), doc.end());
    else if (doc.contains("map")) docs.push_back(doc);
    for (const json& d : docs) {
      CAPTURE(entry.path().filename().string());
      const std::string once = serialize_instance(parse_instance(d));
      const std::string twice = serialize_instance(parse_instance_text(once));
      CHECK(once == twice);
      ++files;
    }
  }
  CHECK(files >= 15);
}

TEST_CASE("canonical form fills defaults") {
  const Instance inst = parse_instance_text(R"({"map": {"family": "motivating"}})");
  const json c = inst.canonical;
  CHECK(c["shape"] == json::array({2, 2}));
  CHECK(c["norms"] == json::array({2.0, 2.0}));
  CHECK(c["weights"] == "auto");
  CHECK(c["solver"]["tol"] == 1e-10);
  CHECK(c["solver"]["max_iter"] == 10000);
  CHECK(c["solver"]["cycle_window"] == 2);
  CHECK(c["solver"]["x0"] == "uniform");
  CHECK(c["solver"]["delta_schedule"]["floor"] == 1e-8);
  // numbers survive the round trip bit for bit
  const Instance t = parse_instance_text(
      R"({"map": {"family": "max_example", "eps": 0.30000000000000004}})");
  const json back = json::parse(serialize_instance(t));
  CHECK(back["map"]["eps"].get<double>() == 0.30000000000000004);
}

TEST_CASE("parse errors name the offending value") {
  CHECK(pointer_of("{") == "");
  CHECK(pointer_of(R"({"map": {"family": "nope"}})") == "/map/family");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "extra": 1})") == "/extra");
  CHECK(pointer_of(R"({"map": {"family": "linear", "matrix": [[1, 2], [3]]}})") ==
        "/map/matrix/1");
  CHECK(pointer_of(R"({"map": {"family": "linear", "matrix": [[1, -2], [3, 4]]}})") ==
        "/map/matrix");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "norms": [2, 0.5]})") == "/norms/1");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "weights": [1, 0]})") == "/weights/1");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "shape": [2, 3]})") == "/shape");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "solver": {"x0": [[1, 0], [1, 1]]}})") ==
        "/solver/x0/0/1");
  CHECK(pointer_of(R"({"map": {"family": "motivating"}, "solver": {"max_iter": 0}})") ==
        "/solver/max_iter");
  CHECK(pointer_of(R"({"map": {"family": "motivating"},
                      "solver": {"delta_schedule": {"factor": 2}}})") ==
        "/solver/delta_schedule");
  CHECK(pointer_of(R"({"map": {"family": "shifted", "base": {"family": "irrex"}}})") ==
        "/map/delta");
  try {
    parse_json_text("{\"a\": }");
    FAIL("accepted invalid JSON");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("nested map families") {
  const Instance inst = parse_instance_text(R"({
    "map": {"family": "weighted_sum", "D": [[1, 2], [0.5, 1]],
            "left": {"family": "motivating"},
            "right": {"family": "dual", "base": {"family": "irrex"}}}})");
  CHECK(inst.map.A().matrix()(0, 1) == 2.0);
  CHECK(verify_multihomogeneous(inst.map, 200, 1e-9).passed);
  const Instance h = parse_instance_text(R"({
    "map": {"family": "hadamard", "left": {"family": "motivating"},
            "right": {"family": "shifted", "delta": 0.5, "base": {"family": "irrex"}}}})");
  CHECK(h.map.A().matrix()(1, 0) == doctest::Approx(0.125));
}

TEST_CASE("initial vectors") {
  const Instance given = load("motivating.json");
  const ProductVector x = initial_vector(given, 0);
  CHECK(x(0, 0) == doctest::Approx(1 / std::sqrt(5.0)));
  const Instance random = load("linear_positive.json");
  const ProductVector a = initial_vector(random, 7), b = initial_vector(random, 7),
                      c = initial_vector(random, 8);
  CHECK(a == b);
  CHECK(!(a == c));
  CHECK(block_norms(a, random.norms)[0] == doctest::Approx(1.0));
}

TEST_CASE("analyze command") {
  const CommandResult m = run_command("analyze", load("motivating.json"));
  CHECK(m.exit_code == 0);
  CHECK(m.report["rho"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.report["regime"] == "strict_contraction");
  CHECK(run_command("analyze", load("identity.json")).report["regime"] == "non_expansive");
  const CommandResult t = run_command("analyze", load("tight_expansive.json"));
  CHECK(t.report["regime"] == "expansive");
  CHECK(t.report["solve_supported"] == false);
  CHECK(t.report["rho"].get<double>() == doctest::Approx(1.2));
}

TEST_CASE("solve command") {
  const CommandResult m = run_command("solve", load("motivating.json"));
  CHECK(m.exit_code == 0);
  CHECK(m.report["status"] == "converged");
  CHECK(m.report["r_b"].get<double>() == doctest::Approx(std::pow(2.0, 5.0 / 16)).epsilon(1e-9));
  CHECK(m.report["certificate"]["kind"] == "contraction");
  CHECK(m.report["envelope_holds"] == true);

  const CommandResult mx = run_command("solve", load("max_example.json"));
  CHECK(mx.exit_code == 0);
  CHECK(mx.report["status"] == "converged");
  CHECK(mx.report["certificate"]["kind"] == "none");

  const CommandResult pq = run_command("solve", load("pq_singular.json"));
  CHECK(pq.exit_code == 0);

  const CommandResult ex = run_command("solve", load("tight_expansive.json"));
  CHECK(ex.exit_code == 2);
  CHECK(ex.report["status"] == "refused");

  CHECK(run_command("solve", load("jordan_short.json")).exit_code == 3);
  CHECK(run_command("solve", load("overflow.json")).exit_code == 4);
  const CommandResult perm = run_command("solve", load("permutation.json"));
  CHECK(perm.exit_code == 0);
  CHECK(perm.report["status"] == "bracket_converged_cycling");

  const CommandResult jc = run_command("solve", load("jordan_continuation.json"));
  CHECK(jc.exit_code == 0);
  CHECK(jc.report["delta_monotone"] == true);
  CHECK(jc.report["eigenvector"][0][1].get<double>() < 1e-3);
  CHECK_THROWS_AS(run_command("frobnicate", load("motivating.json")), DomainError);
}

TEST_CASE("reports are deterministic") {
  const Instance inst = load("linear_positive.json");
  CommandOptions o;
  o.seed = 99;
  CHECK(run_command("solve", inst, o).report.dump() == run_command("solve", inst, o).report.dump());
}

TEST_CASE("graph command") {
  const CommandResult g = run_command("graph", load("nonirr.json"));
  CHECK(g.report["existence_condition"] == true);
  CHECK(g.report["strongly_connected"] == false);
  CHECK(g.report["edges"].size() == 6);
  CHECK(g.report["provenance"] == "oracle");
  CommandOptions dual;
  dual.dual = true;
  const CommandResult d = run_command("graph", load("nonirr.json"), dual);
  CHECK(d.report["edges"] == json::array({"1,1 -> 1,1", "1,2 -> 1,2"}));
  const CommandResult m = run_command("graph", load("max_example.json"));
  CHECK(m.report["existence_condition"] == true);
  CHECK(m.report["strongly_connected"] == true);
}

TEST_CASE("certify command") {
  CHECK(run_command("certify", load("motivating.json")).report["certificate"]["kind"] ==
        "contraction");
  CHECK(run_command("certify", load("linear_positive.json")).report["certificate"]["kind"] ==
        "jacobian_irreducible");

  CommandOptions o;
  o.prior_report = parse_json_text(slurp(kData / "irrex_report.json"));
  const CommandResult x = run_command("certify", load("irrex.json"), o);
  CHECK(x.exit_code == 0);
  CHECK(x.report["certificate"]["kind"] == "dirr");
  CHECK(x.report["certificate"]["jacobian_irreducible"] == false);
  CHECK(x.report["certificate"]["dirr"]["block"] == 1);
  CHECK(x.report["certificate"]["dirr"]["tau"] == 2);
  CHECK(run_command("certify", load("irrex.json")).exit_code == 2);

  // M = [[2, 0], [1, 1]]: boundary eigenvector (0, 1) with theta = 1, positive (1, 1) with 2
  const Instance up = parse_instance_text(
      R"({"map": {"family": "linear", "matrix": [[2, 0], [1, 1]]}})");
  CommandOptions b;
  b.prior_report = json{{"status", "converged"}, {"eigenvector", {{0.0, 1.0}}}, {"lambda", {1.0}}};
  const CommandResult mr = run_command("certify", up, b);
  CHECK(mr.exit_code == 0);
  CHECK(mr.report["maximality"]["strictly_smaller"] == true);
  CHECK(mr.report["maximality"]["boundary_r"].get<double>() == doctest::Approx(1.0));
  CHECK(mr.report["maximality"]["positive_r"].get<double>() == doctest::Approx(2.0));
  CHECK(mr.report["certificate"]["kind"] == "kernel_dim_one");

  CommandOptions bad;
  bad.prior_report = json{{"status", "converged"}, {"eigenvector", {{1.0}}}, {"lambda", {1.0}}};
  CHECK_THROWS_AS(run_command("certify", up, bad), ParseError);
}
