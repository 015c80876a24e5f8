#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("minsurf_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(MINSURF_CLI) + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFlat = R"({"g":{"kind":"poly","coeffs":[[1,0]]},"phi3":{"kind":"poly","coeffs":[[1,0]]},"domain":"disk"})";

}  // namespace

TEST_CASE("labyrinth export") {
  CHECK(run("labyrinth --N 4 --rp 0.3 --Rp 0.9 --emit-json " + path("lab.json") + " --emit-svg " + path("lab.svg")) == 0);
  const json j = json::parse(slurp(path("lab.json")));
  CHECK(j["pieces"].size() == 32);
  CHECK(j["pieces"][0]["inner"].get<double>() == doctest::Approx(0.88828125));
  CHECK(slurp(path("lab.svg")).find("<svg") != std::string::npos);
  CHECK(run("labyrinth --N 4 --rp 0.5 --Rp 0.9") != 0);
}

TEST_CASE("malformed configuration exits with 2") {
  write("bad.json", "{ not json");
  CHECK(run("run " + path("bad.json")) == 2);
  write("wrong.json", R"({"command":"iterate","epsilon":"big","fprime":{"kind":"poly","coeffs":[1]}})");
  CHECK(run("run " + path("wrong.json")) == 2);
  write("unknown.json", R"({"command":"dance"})");
  CHECK(run("run " + path("unknown.json")) == 2);
  CHECK(run("no-such-command") == 2);
}

TEST_CASE("iterate at depth 1") {
  write("d1.json", R"({"command":"iterate","fprime":{"kind":"poly","coeffs":[[1,0]]},"depth":1,"epsilon":0.1,)"
                   R"("domain":"disk","output":")" + path("d1_report.json") + R"("})");
  CHECK(run("run " + path("d1.json")) == 0);
  const json r = json::parse(slurp(path("d1_report.json")));
  CHECK(r["ok"] == true);
  CHECK(r["steps"].empty());
  CHECK(r["x3_final_residual"].get<double>() < 1e-8);

  write("one.json", R"({"kind":"poly","coeffs":[[1,0]]})");
  CHECK(run("iterate --fprime " + path("one.json") + " --depth 1 --out " + path("d1b.json")) == 0);
  CHECK(json::parse(slurp(path("d1b.json")))["steps"].empty());

  write("zero.json", R"({"kind":"poly","coeffs":[[0,0]]})");
  CHECK(run("iterate --fprime " + path("zero.json") + " --depth 2 --out " + path("z.json")) == 3);
}

TEST_CASE("verify-distance") {
  write("flat.json", kFlat);
  CHECK(run("verify-distance --data " + path("flat.json") + " --R 0.9 --res 32 --threshold 0.5 --out " +
            path("dist.json")) == 0);
  const json j = json::parse(slurp(path("dist.json")));
  CHECK(j["distance"].get<double>() == doctest::Approx(0.9).epsilon(0.02));
  CHECK(j["certified"] == true);
  CHECK(run("verify-distance --data " + path("flat.json") + " --R 0.9 --res 32 --threshold 5 --out " +
            path("dist2.json")) == 1);
}

TEST_CASE("lemma-step with the trivial target") {
  write("flat.json", kFlat);
  CHECK(run("lemma-step --data " + path("flat.json") + " --s 0.5 --out " + path("lem.json") + " --data-out " +
            path("lem_data.json")) == 0);
  const json j = json::parse(slurp(path("lem.json")));
  CHECK(j["ok"] == true);
  CHECK(j["step"]["N"] == 0);
  const json out = json::parse(slurp(path("lem_data.json")));
  CHECK(out["domain"] == "disk");
  CHECK(out["g"]["kind"] == "poly");
}

TEST_CASE("mesh and companions") {
  write("flat.json", kFlat);
  CHECK(run("mesh --data " + path("flat.json") + " --R 0.5 --res 4 --angular 8 --out " + path("m.obj")) == 0);
  CHECK(slurp(path("m.obj")).find("\nf ") != std::string::npos);

  CHECK(run("companions --mode null --data " + path("flat.json") + " --z 0.5,0.25 --out " + path("null.json")) == 0);
  const json n = json::parse(slurp(path("null.json")));
  REQUIRE(n["samples"].size() == 1);
  CHECK(n["samples"][0]["F"][2][0].get<double>() == doctest::Approx(0.5));

  CHECK(run("companions --mode ray --data " + path("flat.json") + " --coord 3 --upper 0.99 --out " +
            path("ray.json")) == 0);
  CHECK(json::parse(slurp(path("ray.json")))["integral"].get<double>() == doctest::Approx(0.99));
}

TEST_CASE("claim-scan output") {
  CHECK(run("claim-scan --c 1 --N 3 --rp 0.1 --Rp 0.9 --res 16 --refinements 1 --out " + path("scan.json")) == 0);
  const json j = json::parse(slurp(path("scan.json")));
  CHECK(j["entries"].size() == 1);
  CHECK(j["rho_hat"].get<double>() > 0.0);
}
