#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

/* End-to-end tests of the command-line binary: exit codes, report shape,
 * and byte-level determinism. The binary path is injected by the build. */

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string out_path =
      "cli_stdout_" + std::to_string(counter++) + ".tmp";
  const std::string cmd = std::string(NHMECH_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  std::remove(out_path.c_str());
  return r;
}

nlohmann::json parse(const RunResult& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("simulate writes a csv and a summary") {
  RunResult r = run(
      "simulate --system free_particle --q0 0,1,0 --v0 1,1,1 --dt 1e-3 "
      "--steps 200 --out cli_traj.tmp");
  REQUIRE(r.exit_code == 0);
  auto j = parse(r);
  CHECK(j["steps"] == 200);
  CHECK(j["rows"] == 201);
  CHECK(j["energy_drift"].get<double>() < 1e-8);
  const std::string csv = slurp("cli_traj.tmp");
  CHECK(csv.rfind("t,q1,q2,q3,v1,v2,v3,lam1,energy,psi_max\n", 0) == 0);
  std::remove("cli_traj.tmp");
}

TEST_CASE("simulate with zero steps emits one row") {
  RunResult r =
      run("simulate --system free_particle --steps 0 --out cli_one.tmp");
  REQUIRE(r.exit_code == 0);
  auto j = parse(r);
  CHECK(j["rows"] == 1);
  std::remove("cli_one.tmp");
}

TEST_CASE("off-manifold initial data is a config error") {
  RunResult r = run(
      "simulate --system free_particle --q0 0,1,0 --v0 1,0,0 "
      "--out cli_bad.tmp");
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown names and parameters exit with code 2") {
  CHECK(run("check --system unobtainium --check classify").exit_code == 2);
  CHECK(run("check --system free_particle --check vibes").exit_code == 2);
  CHECK(run("check --system free_particle --param q=1 --check classify")
            .exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("check --system free_particle --check hj_strong").exit_code == 2);
}

TEST_CASE("passing and failing checks map to exit codes 0 and 1") {
  RunResult good = run(
      "check --system free_particle --candidate family --c1 1 --c2 2 "
      "--check hj_strong");
  REQUIRE(good.exit_code == 0);
  auto j = parse(good);
  CHECK(j["pass"] == true);
  CHECK(j["report"]["max_residual"].get<double>() < 1e-8);

  RunResult grow = run("check --system carriage --check chow --depth 4");
  CHECK(grow.exit_code == 1);
  auto g = parse(grow);
  CHECK(g["report"]["growth"] == nlohmann::json({2, 3, 4, 4}));
  CHECK(g["report"]["complete"] == false);
}

TEST_CASE("classification verdicts through the cli") {
  auto fp = parse(run("check --system free_particle --check classify"));
  CHECK(fp["report"]["verdict"] == "general");
  CHECK(fp["report"]["dim_VN_cap_H"] == 1);
  CHECK(fp["report"]["dim_VN"] == 2);
  auto car = parse(run("check --system carriage --check classify"));
  CHECK(car["report"]["verdict"] == "pure_kinematic");
}

TEST_CASE("reduce pipeline reports and gates correctly") {
  RunResult r1 = run("reduce --system carriage --candidate xbar1");
  REQUIRE(r1.exit_code == 0);
  auto j = parse(r1);
  CHECK(j["reduced_hj"]["satisfied_sign"] == "minus");
  CHECK(j["invariance"]["pass"] == true);
  /* The unreduced comparison is reported but does not gate. */
  CHECK(j["full_relatedness"]["pass"] == false);

  RunResult r2 = run("reduce --system carriage --candidate xbar2");
  CHECK(r2.exit_code == 0);
  CHECK(parse(r2)["reduced_hj"]["satisfied_sign"] == "plus");

  CHECK(run("reduce --system rolling_disk").exit_code == 2);
  CHECK(run("reduce --system carriage").exit_code == 2);
}

TEST_CASE("reports are byte-identical across runs") {
  const std::string cmd =
      "check --system carriage --candidate xbar1 --check reduced --seed 5";
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());

  RunResult s1 = run("simulate --system carriage --steps 50 --out cli_d1.tmp");
  RunResult s2 = run("simulate --system carriage --steps 50 --out cli_d2.tmp");
  CHECK(s1.exit_code == 0);
  CHECK(slurp("cli_d1.tmp") == slurp("cli_d2.tmp"));
  std::remove("cli_d1.tmp");
  std::remove("cli_d2.tmp");
}

TEST_CASE("config files supply options and flags win") {
  {
    std::ofstream f("cli_opts.tmp");
    f << "# options for a strong check\n"
      << "system=free_particle\n"
      << "check=hj_strong\n"
      << "candidate=family\n"
      << "c1=1\n"
      << "c2=2\n";
  }
  RunResult r = run("check --config cli_opts.tmp");
  CHECK(r.exit_code == 0);
  CHECK(parse(r)["check"] == "hj_strong");
  RunResult o = run("check --config cli_opts.tmp --check classify");
  CHECK(parse(o)["check"] == "classify");
  CHECK(run("check --config cli_missing.tmp").exit_code == 2);
  std::remove("cli_opts.tmp");
}

TEST_CASE("chow transfer agreement through the cli") {
  RunResult fp = run("check --system free_particle --check chow_transfer");
  CHECK(fp.exit_code == 0);
  CHECK(parse(fp)["report"]["agree"] == true);
  RunResult car = run("check --system carriage --check chow_transfer");
  CHECK(car.exit_code == 1);
  CHECK(parse(car)["report"]["agree"] == false);
}
