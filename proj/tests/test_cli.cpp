#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cf/series.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cf_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
  }
};

const char* kOneParam = "dim=1 maxlen=1 alphabet=x0,x1\nx1 :: 1 * D[1]\n";
const char* kNonlinear = "dim=1 maxlen=2 alphabet=x0,x1\nx1 x1 :: 1 * D[0]\n";

}  // namespace

TEST_CASE("solve transport writes a field and a certified report") {
  TempDir dir;
  Result r = run({"solve", "transport", "--V", "1", "--y0", "sin(theta_1)", "--u", "t*sin(2*theta_1)",
                  "--N", "16", "--grid", "0:6.283:65,0:1:129", "--out", dir / "y.csv"});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "y.csv");
  CHECK(csv.rfind("theta_1,t,re,im\n", 0) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "y.csv.json"));
  for (const char* key : {"command", "params", "truncation", "bound", "runtime_ms"}) {
    CHECK(report.contains(key));
  }
  CHECK(report["command"] == "solve transport");
  CHECK(report["truncation"]["N"] == 16);
  CHECK(report["bound"]["kind"] == "gevrey_tail");
  CHECK(report["bound"]["converged"] == true);
  CHECK(report["params"]["grid"].get<std::string>().find(":65,") != std::string::npos);

  // Rows are theta outer, t inner: compare with the closed form.
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double worst = 0.0;
  while (std::getline(in, line)) {
    double th, t, re, im;
    char c;
    std::istringstream row(line);
    row >> th >> c >> t >> c >> re >> c >> im;
    const double exact = std::sin(th - t) + (std::sin(2 * (t - th)) + std::sin(2 * th) -
                                             2 * t * std::cos(2 * th)) / 4.0;
    worst = std::max(worst, std::abs(re - exact));
  }
  CHECK(worst < 1e-3);
  CHECK(!fs::exists(dir / "y.csv.tmp"));
}

TEST_CASE("identical jobs give identical bytes") {
  TempDir dir;
  auto job = [&](const std::string& name) {
    return run({"solve", "wave", "--u", "sin(theta_1)", "--N", "9", "--grid", "0:3:17,0:1:33",
                "--out", dir / name, "--report", dir / (name + ".report"), "--deterministic"});
  };
  REQUIRE(job("a.csv").code == 0);
  REQUIRE(job("b.csv").code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv.report") == slurp(dir / "b.csv.report"));
}

TEST_CASE("overlapping shuffle is a validation error") {
  TempDir dir;
  dir.write("c.series", kOneParam);
  Result r = run({"algebra", "shuffle", "--left", dir / "c.series", "--right", dir / "c.series",
                  "--out", dir / "cd.series"});
  CHECK(r.code == 1);
  CHECK(r.err.find("OverlappingSupport") != std::string::npos);
  CHECK(!fs::exists(dir / "cd.series"));
}

TEST_CASE("nonlinear composition is a validation error") {
  TempDir dir;
  dir.write("c.series", kNonlinear);
  dir.write("d.series", kOneParam);
  Result r = run({"algebra", "compose", "--left", dir / "c.series", "--right", dir / "d.series"});
  CHECK(r.code == 1);
  CHECK(r.err.find("NotLinear") != std::string::npos);
}

TEST_CASE("algebra results are series files") {
  TempDir dir;
  dir.write("c.series", kOneParam);
  dir.write("d.series", "dim=1 maxlen=2 alphabet=x0,x1\ne :: theta_1 * D[0]\nx0 x1 :: 2 * D[0]\n");
  Result sum = run({"algebra", "sum", "--left", dir / "c.series", "--right", dir / "d.series"});
  REQUIRE(sum.code == 0);
  cf::GenSeries s = cf::parse_series(sum.out);
  CHECK(s.size() == 3);
  Result cat = run({"algebra", "sum", "--left", dir / "c.series", "--right", dir / "d.series",
                    "--policy", "concatenate"});
  REQUIRE(cat.code == 0);
  CHECK(cf::parse_series(cat.out).dim() == 2);
  Result comp = run({"algebra", "compose", "--left", dir / "c.series", "--right", dir / "d.series"});
  REQUIRE(comp.code == 0);
  CHECK(cf::parse_series(comp.out).contains(cf::Word::parse("x0 x0 x1")));
  Result shift = run({"algebra", "shift", "--series", dir / "d.series", "--letter", "x0"});
  REQUIRE(shift.code == 0);
  CHECK(cf::parse_series(shift.out).contains(cf::Word::parse("x1")));
  Result trunc = run({"algebra", "truncate", "--series", dir / "d.series", "--N", "0"});
  REQUIRE(trunc.code == 0);
  CHECK(cf::parse_series(trunc.out).size() == 1);
}

TEST_CASE("eval and exit codes") {
  TempDir dir;
  dir.write("c.series", kOneParam);
  Result ok = run({"eval", "--series", dir / "c.series", "--u", "theta_1*t", "--grid", "0:1:3,0:1:3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("1,1,0.5,0") != std::string::npos);
  Result pole = run({"eval", "--series", dir / "c.series", "--u", "1/theta_1", "--grid", "0:1:3,0:1:3"});
  CHECK(pole.code == 2);
  CHECK(run({"eval", "--series", dir / "missing.series", "--grid", "0:1:3,0:1:3"}).code == 1);
  CHECK(run({"eval", "--series", dir / "c.series", "--u", "theta_1", "--grid", "0:1:3"}).code == 1);
  CHECK(run({"solve", "diffusion"}).code == 1);
  CHECK(run({"solve", "second-order", "--alpha1", "2", "--alpha2", "1", "--form",
             "partial-fraction", "--u", "t", "--grid", "0:1:5,0:1:5"})
            .code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("bounds commands") {
  Result geo = run({"bounds", "check", "--M", "0.5", "--R", "1", "--T", "1", "--s", "1", "--K-E", "1",
                    "--deterministic"});
  REQUIRE(geo.code == 0);
  auto j = nlohmann::json::parse(geo.out);
  CHECK(j["bound"]["value"] == 4.0);
  CHECK(j["runtime_ms"] == 0.0);
  Result div = run({"bounds", "check", "--M", "1", "--R", "1", "--T", "1", "--s", "1"});
  CHECK(div.code == 2);
  Result full = run({"bounds", "check", "--M", "1", "--R", "1", "--T", "1", "--s", "0", "--K-E", "1"});
  REQUIRE(full.code == 0);
  CHECK(std::abs(nlohmann::json::parse(full.out)["bound"]["value"].get<double>() -
                 2 * std::exp(1.0)) < 1e-12);
  Result est = run({"bounds", "estimate", "--u", "t*sin(2*theta_1)", "--grid",
                    "0:6.283185307179586:129,0:1:65"});
  REQUIRE(est.code == 0);
  CHECK(nlohmann::json::parse(est.out)["estimate"]["input"]["rate"].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("verify runs selected criteria") {
  Result r = run({"verify", "8", "9", "--deterministic"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"].size() == 2);
  CHECK(r.err.find("criterion 8 PASS") != std::string::npos);
}
