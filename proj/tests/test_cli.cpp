#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

// Drives the installed binary end to end through a shell, the way a user
// would. PHASE_ENGINE_BIN is injected by the build.

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("phase-engine-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

int run(const Sandbox& box, const std::string& args) {
  const std::string cmd = "cd " + box.dir.string() + " && " PHASE_ENGINE_BIN " " + args +
                          " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const std::string kTiny = "--bath.n_modes 24 --evolution.t_max 2 --evolution.dt 0.01 ";

}  // namespace

TEST_CASE("help lists every subcommand and mirrors config keys") {
  Sandbox box;
  CHECK(run(box, "--help") == 0);
  const std::string top = slurp(box.dir / "stdout.txt");
  for (const char* name : {"spectrum", "evolve", "wigner", "transition", "validate"}) {
    CHECK(top.find(name) != std::string::npos);
  }

  CHECK(run(box, "evolve --help") == 0);
  const std::string sub = slurp(box.dir / "stdout.txt");
  for (const char* flag : {"--bath.eta", "--evolution.t_max", "--initial.kind", "--output.path"}) {
    CHECK(sub.find(flag) != std::string::npos);
  }
}

TEST_CASE("spectrum runs are deterministic") {
  // Identical config, different working directories: every artifact must be
  // byte-identical, summary.json included.
  Sandbox first;
  Sandbox second;
  const std::string flags = "spectrum --bath.n_modes 16 --output.path out";
  REQUIRE(run(first, flags) == 0);
  REQUIRE(run(second, flags) == 0);
  for (const char* name : {"bath_modes.csv", "spectrum.csv", "summary.json"}) {
    CHECK(slurp(first.dir / "out" / name) == slurp(second.dir / "out" / name));
  }
}

TEST_CASE("bad flags and keys exit with the configuration code") {
  Sandbox box;
  CHECK(run(box, "spectrum --bath.lambda 1") == 2);
  CHECK(run(box, "spectrum --bath.eta frog") == 2);
  CHECK(run(box, "frobnicate") == 2);

  spit(box.dir / "bad.cfg", "bath.lambda = 1\n");
  CHECK(run(box, "spectrum -c bad.cfg") == 2);
  const std::string err = slurp(box.dir / "stderr.txt");
  CHECK(err.find("bath.lambda") != std::string::npos);
}

TEST_CASE("config file and flag overrides match pure flags") {
  Sandbox file_based;
  Sandbox flag_based;
  spit(file_based.dir / "run.cfg", "bath.eta = 0.2\nbath.n_modes = 16\n");
  REQUIRE(run(file_based, "spectrum -c run.cfg --bath.eta 0.35 --output.path out") == 0);
  REQUIRE(run(flag_based, "spectrum --bath.eta 0.35 --bath.n_modes 16 --output.path out") == 0);

  const auto a = nlohmann::json::parse(slurp(file_based.dir / "out/summary.json"));
  const auto b = nlohmann::json::parse(slurp(flag_based.dir / "out/summary.json"));
  CHECK(a["config_hash"] == b["config_hash"]);
  CHECK(slurp(file_based.dir / "out/spectrum.csv") == slurp(flag_based.dir / "out/spectrum.csv"));
}

TEST_CASE("evolve writes the pinned moments header") {
  Sandbox box;
  REQUIRE(run(box, "evolve " + kTiny + "--output.path out") == 0);
  const std::string csv = slurp(box.dir / "out/moments.csv");
  CHECK(csv.rfind("t,re_u,im_u,abs_u,v,c_qq,c_qp,c_pp,occupation,purity\n", 0) == 0);

  const auto summary = nlohmann::json::parse(slurp(box.dir / "out/summary.json"));
  CHECK(summary["tool"] == "phase-engine");
  CHECK(summary["subcommand"] == "evolve");
  REQUIRE(summary.contains("files"));
  CHECK(std::find(summary["files"].begin(), summary["files"].end(), "moments.csv") !=
        summary["files"].end());
}

TEST_CASE("wigner snapshots in both formats") {
  Sandbox box;
  const std::string common = "wigner " + kTiny +
                             "--grid.auto false --grid.n_q 41 --grid.n_p 41 "
                             "--output.wigner_stride 100 --output.path ";
  REQUIRE(run(box, common + "csvdir") == 0);
  const std::string csv = slurp(box.dir / "csvdir/wigner_t0.csv");
  CHECK(csv.rfind("q,p,w\n", 0) == 0);

  REQUIRE(run(box, common + "jsondir --output.format json") == 0);
  const auto j = nlohmann::json::parse(slurp(box.dir / "jsondir/wigner_t0.json"));
  REQUIRE(j.contains("grid"));
  CHECK(j["grid"]["n_q"] == 41);
  CHECK(j["values"].size() == 41 * 41);
}

TEST_CASE("transition sweep has one row per coupling") {
  Sandbox box;
  REQUIRE(run(box, "transition --transition.n_eta 5 --output.path out") == 0);
  const std::string csv = slurp(box.dir / "out/transition.csv");
  CHECK(csv.rfind("eta,eta_c,phase,e1,c0sq,p0_inf,p1_inf\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("validate passes on a small healthy configuration") {
  Sandbox box;
  REQUIRE(run(box, "validate --bath.n_modes 48 --evolution.t_max 5 --output.path out") == 0);
  const auto checks = nlohmann::json::parse(slurp(box.dir / "out/validate.json"));
  REQUIRE(checks.is_array());
  CHECK(checks.size() >= 6);
  for (const auto& check : checks) {
    CHECK(check["status"] == "passed");
    CHECK(check.contains("max_error"));
    CHECK(check.contains("tolerance"));
  }
  const std::string shown = slurp(box.dir / "stdout.txt");
  CHECK(shown.find("sum_rule") != std::string::npos);
}

TEST_CASE("qbm coupling swaps the validation list") {
  Sandbox box;
  REQUIRE(run(box,
              "validate --coupling.model qbm --initial.kind vacuum --bath.n_modes 12 "
              "--bath.omega_c 2 --bath.eta 0.3 --evolution.t_max 3 --output.path out") == 0);
  const auto checks = nlohmann::json::parse(slurp(box.dir / "out/validate.json"));
  bool canonical = false;
  for (const auto& check : checks) {
    if (check["check_name"] == "canonical_form") canonical = true;
    CHECK(check["status"] == "passed");
  }
  CHECK(canonical);
}
