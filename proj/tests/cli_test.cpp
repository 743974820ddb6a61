#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "tdreg/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tdreg_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(TDREG_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_scenario(const std::string& name, const nlohmann::json& j) {
  const fs::path p = work_dir() / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("design reproduces the published retarded-example gains") {
  const fs::path result = work_dir() / "e2_design.json";
  const RunResult r = run_cli("design example2 --out " + result.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("regulation: PASS") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(slurp(result));
  const std::vector<double> published = {0.0, -21.3792, 13.2131, -13.2131, 21.3792};
  REQUIRE(j["gains"].size() == published.size());
  for (std::size_t k = 0; k < published.size(); ++k)
    CHECK(std::abs(j["gains"][k].get<double>() - published[k]) < 5e-4);
  CHECK(j["rank"].get<int>() == 5);
  CHECK(j["pass"].get<bool>());
}

TEST_CASE("design flags aliased spacing with exit code 2") {
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["qm"]["spacing"] = 0.25;  // omega_l * spacing = 2 pi l for every harmonic
  const fs::path scenario = write_scenario("aliased.json", j);
  const RunResult r = run_cli("design " + scenario.string() + " --out " +
                              (work_dir() / "aliased_design.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("aliases") != std::string::npos);
  CHECK(r.out.find("harmonic 1") != std::string::npos);
}

TEST_CASE("spectrum CSV carries the placed harmonic zeros") {
  const fs::path csv = work_dir() / "e2_zeros.csv";
  const RunResult r = run_cli("spectrum example2 --kind zeros --out " + csv.string());
  CHECK(r.exit_code == 0);

  const std::string content = slurp(csv);
  std::istringstream lines(content);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "re,im,residual,kind,coincident");
  bool near_8pi = false, near_16pi = false;
  while (std::getline(lines, line)) {
    std::istringstream row(line);
    std::string re_s, im_s;
    std::getline(row, re_s, ',');
    std::getline(row, im_s, ',');
    const double re = std::stod(re_s), im = std::stod(im_s);
    if (std::abs(re) < 1e-6 && std::abs(im - 25.1327) < 1e-3) near_8pi = true;
    if (std::abs(re) < 1e-6 && std::abs(im - 50.2655) < 1e-3) near_16pi = true;
    CHECK(line.find("pole") == std::string::npos);
  }
  CHECK(near_8pi);
  CHECK(near_16pi);
}

TEST_CASE("spectrum poles stay in the open left half-plane") {
  const fs::path csv = work_dir() / "e2_poles.csv";
  const RunResult r = run_cli("spectrum example2 --kind poles --out " + csv.string());
  CHECK(r.exit_code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::stod(line.substr(0, line.find(','))) < 0.0);
  }
  CHECK(rows > 0);
}

TEST_CASE("spectrum output is byte-identical across runs") {
  const fs::path a = work_dir() / "det_a.csv";
  const fs::path b = work_dir() / "det_b.csv";
  CHECK(run_cli("spectrum example1 --out " + a.string()).exit_code == 0);
  CHECK(run_cli("spectrum example1 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("empty spectrum region yields a header-only CSV") {
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["spectrum"] = {{"re_min", -0.8},  {"re_max", -0.2}, {"im_min", 3.0},
                   {"im_max", 4.0},   {"grid_step", 0.05}};
  const fs::path scenario = write_scenario("empty_region.json", j);
  const fs::path csv = work_dir() / "empty.csv";
  const RunResult r = run_cli("spectrum " + scenario.string() + " --out " + csv.string());
  CHECK(r.exit_code == 0);
  CHECK(slurp(csv) == "re,im,residual,kind,coincident\n");
}

TEST_CASE("coarse-grid warnings stop the spectrum unless forced") {
  // widening the window over the quadruple (s+10)^4 factorization artifact
  // of the first example leaves an unresolvable root cluster in one cell
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example1"));
  j["spectrum"]["re_min"] = -12.0;
  const fs::path scenario = write_scenario("wide_window.json", j);
  const fs::path csv = work_dir() / "forced.csv";

  const RunResult strict = run_cli("spectrum " + scenario.string() + " --out " + csv.string());
  CHECK(strict.exit_code == 1);
  CHECK(strict.err.find("grid too coarse") != std::string::npos);

  const RunResult forced =
      run_cli("spectrum " + scenario.string() + " --force --out " + csv.string());
  CHECK(forced.exit_code == 0);
  CHECK(!slurp(csv).empty());
}

TEST_CASE("verify separates stability from regulation") {
  // stable plant under a feeble controller with the augmentation pinned off:
  // the loop is stable but the harmonics stay unregulated
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["plant"]["den"] = {{{"delay", 0.0}, {"coeffs", {1.0, 1.0}}}};  // 1/(s+1)
  j["controller"]["kp"] = 0.1;
  j["controller"]["ki"] = 0.1;
  j["qm"]["gains"] = {0.0, 0.0, 0.0, 0.0, 0.0};
  const fs::path scenario = write_scenario("stable_unregulated.json", j);
  const RunResult r = run_cli("verify " + scenario.string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("PASS closed loop") != std::string::npos);
  CHECK(r.out.find("FAIL regulation") != std::string::npos);
}

TEST_CASE("simulate writes the run and a residual summary") {
  const fs::path csv = work_dir() / "e2_sim.csv";
  const RunResult r = run_cli("simulate example2 --out " + csv.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("steady residual before activation") != std::string::npos);

  std::istringstream lines(slurp(csv));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,y,u,d,e");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 15001);
}

TEST_CASE("zero disturbance settles to zero residuals") {
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["simulation"]["disturbance"] = {{"c0", 0.0}, {"harmonics", nlohmann::json::array()}};
  j["simulation"]["initial_output"] = 0.0;
  const fs::path scenario = write_scenario("quiet.json", j);
  const RunResult r = run_cli("simulate " + scenario.string() + " --out " +
                              (work_dir() / "quiet.csv").string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("before activation: 0 ") != std::string::npos);
  CHECK(r.out.find("after activation: 0 ") != std::string::npos);
}

TEST_CASE("freqresp samples the designed sensitivity") {
  const fs::path csv = work_dir() / "e2_freq.csv";
  const RunResult r = run_cli(
      "freqresp example2 --wmin 25.132741228718345 --wmax 50.26548245743669 --points 2 --out " +
      csv.string());
  CHECK(r.exit_code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "omega,abs_S,arg_S");
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) < 1e-8);
  }
}

TEST_CASE("freqresp limits of the unaugmented loop") {
  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["qm"]["gains"] = {0.0, 0.0, 0.0, 0.0, 0.0};
  const fs::path scenario = write_scenario("plain_pi.json", j);

  const fs::path low = work_dir() / "low.csv";
  CHECK(run_cli("freqresp " + scenario.string() + " --wmin 1e-4 --wmax 1e-4 --points 1 --out " +
                low.string())
            .exit_code == 0);
  std::string line, header;
  {
    std::istringstream lines(slurp(low));
    std::getline(lines, header);
    std::getline(lines, line);
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) < 1e-2);  // integrator zero at DC
  }

  const fs::path high = work_dir() / "high.csv";
  CHECK(run_cli("freqresp " + scenario.string() + " --wmin 1e6 --wmax 1e6 --points 1 --out " +
                high.string())
            .exit_code == 0);
  {
    std::istringstream lines(slurp(high));
    std::getline(lines, header);
    std::getline(lines, line);
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) ==
          doctest::Approx(1.0).epsilon(1e-3));  // high-frequency limit
  }
}

TEST_CASE("verify passes the bundled presets and fails a destabilized loop") {
  const RunResult ok = run_cli("verify example2");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("VERIFY PASS") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example1"));
  j["controller"]["kp"] = 0.0;  // the weak integral gain alone cannot stabilize
  const fs::path scenario = write_scenario("unstable.json", j);
  const RunResult bad = run_cli("verify " + scenario.string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("FAIL closed loop") != std::string::npos);
  CHECK(bad.out.find("VERIFY FAIL") != std::string::npos);
}

TEST_CASE("input errors exit with code 1") {
  CHECK(run_cli("design nonexistent_preset").exit_code == 1);

  const fs::path junk = work_dir() / "junk.json";
  std::ofstream(junk) << "{ not json";
  CHECK(run_cli("design " + junk.string()).exit_code == 1);

  nlohmann::json j = nlohmann::json::parse(tdreg::preset_text("example2"));
  j["simulation"]["step"] = 0.0003;  // unit plant delay is not a multiple
  const fs::path mis = write_scenario("mismatch.json", j);
  CHECK(run_cli("simulate " + mis.string() + " --out " + (work_dir() / "mis.csv").string())
            .exit_code == 1);
}
