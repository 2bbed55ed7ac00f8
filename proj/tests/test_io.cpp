#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "thouless/experiment.hpp"
#include "thouless/table_io.hpp"

using namespace thouless;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thouless_tests_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(THOULESS_PUMP_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("column tables round trip") {
  const fs::path dir = scratch("tables");
  write_columns(dir / "a.tsv", "demo", {{"t", "1/J", {0.0, 1.5}}, {"x", "", {2.0, -3.25}}});
  const std::string text = slurp(dir / "a.tsv");
  CHECK(text.rfind("# demo\n# t[1/J]\tx\n", 0) == 0);
  const auto m = read_table(dir / "a.tsv");
  REQUIRE(m.rows() == 2);
  CHECK(m(1, 0) == 1.5);
  CHECK(m(1, 1) == -3.25);
  CHECK_THROWS_AS(write_columns(dir / "b.tsv", "bad", {{"a", "", {1.0}}, {"b", "", {1.0, 2.0}}}), Error);

  Eigen::MatrixXd mat(2, 3);
  mat << 1, 2, 3, 4, 5, 6;
  write_matrix(dir / "m.tsv", "matrix", mat);
  CHECK(read_table(dir / "m.tsv") == mat);
}

TEST_CASE("experiment names") {
  CHECK(parse_experiment("pump-echo") == Experiment::PumpEcho);
  CHECK(to_string(Experiment::EffectiveCompare) == "effective-compare");
  CHECK_THROWS_AS(parse_experiment("pump"), InvalidArgument);
}

TEST_CASE("chern experiment writes a manifest and is deterministic") {
  RunConfig cfg;
  cfg.experiment = Experiment::Chern;
  cfg.model.tunneling_mode = TunnelingMode::SineModulated;
  cfg.n_t = 60;
  std::ostringstream log;
  cfg.output_dir = scratch("chern1");
  const auto a = run(cfg, log);
  CHECK(a.passed());
  CHECK(a.manifest["results"]["chern"] == nlohmann::json::array({-1, 2, -1}));
  CHECK(fs::exists(cfg.output_dir / "manifest.json"));
  const std::string first = slurp(cfg.output_dir / "chern.tsv");
  cfg.output_dir = scratch("chern2");
  run(cfg, log);
  CHECK(slurp(cfg.output_dir / "chern.tsv") == first);
}

TEST_CASE("flatness and phases experiments") {
  std::ostringstream log;
  RunConfig cfg;
  cfg.experiment = Experiment::Flatness;
  cfg.n_t = 48;
  cfg.output_dir = scratch("flat");
  CHECK(run(cfg, log).passed());
  CHECK(fs::exists(cfg.output_dir / "flatness.tsv"));

  cfg.experiment = Experiment::Phases;
  cfg.n_t_phases = 800;
  cfg.output_dir = scratch("phases");
  const auto r = run(cfg, log);
  CHECK(r.passed());
  CHECK(read_table(cfg.output_dir / "phases.tsv").rows() == 15);
}

TEST_CASE("invalid configurations fail with status 1") {
  RunConfig cfg;
  cfg.model.L = 1;
  cfg.output_dir = scratch("bad");
  std::ostringstream log, err;
  CHECK(run_with_status(cfg, log, err) == 1);
  CHECK(!err.str().empty());
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(cli("--help") == 0);
  CHECK(cli("--experiment nonsense") == 2);
  CHECK(cli("--experiment chern --L 1 --out " + (dir / "a").string()) == 1);
  CHECK(cli("--experiment chern --tunneling sine --nt 40 --out " + (dir / "b").string()) == 0);
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "experiment = chern\nnt = 40\nbogus = 1\n";
  }
  CHECK(cli((dir / "run.ini").string() + " --out " + (dir / "c").string()) == 2);
}
