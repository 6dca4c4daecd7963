#include <doctest.h>

#include "opcalc/runner.hpp"

using namespace opcalc;

namespace {

Json run(const std::string& text, int expect_code) {
  const auto out = run_config(text);
  CHECK(out.exit_code == expect_code);
  CHECK(out.report.at("exit_code").get<int>() == expect_code);
  return out.report;
}

}  // namespace

TEST_CASE("weyl(3) verify_sq config passes") {
  const Json r = run(R"({"backend":{"kind":"discrete_weyl","N":3},"seed":1,"tasks":["verify_sq"]})", 0);
  CHECK(r["verdict"] == "pass");
  CHECK(r["tasks"][0]["verdict"] == "pass");
  CHECK(r["tasks"][0]["commutant_dim"] == 1);
}

TEST_CASE("exit codes: parse 2, validation 3, task failure 1") {
  Json r = run("{not json", kExitParse);
  CHECK(r["error"]["stage"] == "parse");
  r = run(R"({"backend":{"kind":"discrete_weyl","N":3},"seed":1,"tasks":[]})", kExitValidation);
  CHECK(r["error"]["stage"] == "validation");
  r = run(R"({"backend":{"kind":"abelian_metaplectic","G":"Z2","k":2},"seed":1,"tasks":["verify_sq"]})", kExitValidation);
  CHECK(r["error"]["message"].get<std::string>().find("automorphism") != std::string::npos);
  run(R"({"backend":{"kind":"discrete_weyl","N":3},"tasks":["nonsense"]})", kExitValidation);
  run(R"({"backend":{"kind":"warp_drive"},"tasks":["verify_sq"]})", kExitValidation);
  run(R"({"backend":{"kind":"discrete_weyl","N":3},"seed":-4,"tasks":["verify_sq"]})", kExitValidation);
  // The S3 irrep with raw counting weights is a legal backend that fails SQ.
  r = run(R"({"backend":{"kind":"finite_group","group":"S3","irrep":"standard","normalization":0.5},
              "seed":1,"tasks":["verify_sq"]})",
          kExitTaskFailed);
  CHECK(r["tasks"][0]["verdict"] == "fail");
  CHECK(r["verdict"] == "fail");
}

TEST_CASE("quantize and dequantize tasks accept explicit inputs") {
  const Json r = run(R"({"backend":{"kind":"discrete_weyl","N":2},"seed":3,"tasks":[
      {"type":"quantize","symbols":[{"space":"weyl2","re":[1,0,0,0],"im":[0,0,0,0]}]},
      {"type":"dequantize","operators":[{"dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}]}]})",
                     0);
  // The indicator of the identity point quantizes to its weight times the identity.
  const Operator t = operator_from_json(r["tasks"][0]["operators"][0]);
  CHECK((t - 0.5 * Operator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  const auto& sym = r["tasks"][1]["symbols"][0];
  CHECK(sym["re"][0].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("describe reports the documented summaries") {
  Json d = describe_backend(Json::parse(R"({"kind":"discrete_weyl","N":3})"));
  CHECK(d["hdim"] == 3);
  CHECK(d["points"] == 9);
  CHECK(d["total_mass"].get<double>() == doctest::Approx(3.0));
  CHECK(d["b2_rank"] == 9);
  d = describe_backend(Json::parse(R"({"kind":"trivial"})"));
  CHECK(d["hdim"] == 1);
  CHECK(d["points"] == 1);
  CHECK(d["total_mass"].get<double>() == doctest::Approx(1.0));
  d = describe_backend(Json::parse(R"({"kind":"finite_group","group":"S3","irrep":"standard"})"));
  CHECK(d["hdim"] == 2);
  CHECK(d["points"] == 6);
  CHECK(d["total_mass"].get<double>() == doctest::Approx(2.0));
  CHECK(d["b2_rank"] == 4);
}

TEST_CASE("composite backend kinds") {
  Json d = describe_backend(Json::parse(
      R"({"kind":"tensor","factors":[{"kind":"discrete_weyl","N":2},{"kind":"discrete_weyl","N":3}]})"));
  CHECK(d["hdim"] == 6);
  CHECK(d["points"] == 36);
  const Json r = run(R"({"backend":{"kind":"direct_sum","parts":[{"kind":"discrete_weyl","N":2},{"kind":"discrete_weyl","N":2}]},
                         "seed":1,"tasks":["verify_sq"]})",
                     kExitTaskFailed);
  CHECK(r["tasks"][0]["max_deviation"].get<double>() == doctest::Approx(1.0));
  CHECK(r["tasks"][0]["commutant_dim"].get<int>() >= 2);
}

TEST_CASE("seed and tolerance overrides") {
  const std::string cfg = R"({"backend":{"kind":"discrete_weyl","N":3},"seed":1,"tasks":[{"type":"quantize","random":5}]})";
  RunOptions o;
  o.seed = 99;
  o.tol = 1e-9;
  const auto out = run_config(cfg, o);
  CHECK(out.report["seed"] == 99);
  CHECK(out.report["tolerance"].get<double>() == 1e-9);
  CHECK(dump_report(run_config(cfg).report) == dump_report(run_config(cfg).report));
  CHECK(dump_report(run_config(cfg).report) != dump_report(out.report));
}

TEST_CASE("timings appear only on request") {
  const std::string cfg = R"({"backend":{"kind":"trivial"},"seed":1,"tasks":["verify_sq"]})";
  CHECK_FALSE(run_config(cfg).report["tasks"][0].contains("seconds"));
  RunOptions o;
  o.timings = true;
  CHECK(run_config(cfg, o).report["tasks"][0].contains("seconds"));
}

TEST_CASE("table rendering lists every task") {
  const auto out = run_config(R"({"backend":{"kind":"discrete_weyl","N":2},"seed":1,"tasks":["verify_sq","star_table"]})");
  const std::string t = render_table(out.report);
  CHECK(t.find("verify_sq") != std::string::npos);
  CHECK(t.find("star_table") != std::string::npos);
  CHECK(t.find("overall pass") != std::string::npos);
}
