#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  json j;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "retfront_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

Result run(std::vector<std::string> args, const fs::path& dir) {
  args.push_back("--out");
  args.push_back(dir.string());
  std::ostringstream out, err;
  Result r{retfront::cli::run(args, out, err), out.str(), err.str(), nullptr};
  if (r.code != retfront::cli::kExitInputError && !r.out.empty()) r.j = json::parse(r.out);
  return r;
}

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli determinacy") {
  const auto dir = scratch("determinacy");
  auto r = run({"determinacy", "x^3", "--r", "1", "--k", "0"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["order"] == 3);
  CHECK(r.j["parse_truncation"].is_number());
  CHECK(slurp(dir / "determinacy.json") == r.out);

  r = run({"determinacy", "y1^2*y2 - y2^3", "--r", "0", "--k", "2"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["order"] == 3);

  r = run({"determinacy", "y1^3", "--r", "0", "--k", "2", "--l-max", "4"}, dir);
  CHECK(r.code == retfront::cli::kExitInconclusive);
  CHECK(r.j["order"].is_null());

  r = run({"determinacy", "0", "--r", "1", "--k", "0"}, dir);
  CHECK(r.code == retfront::cli::kExitInputError);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("cli rejects malformed input without crashing") {
  const auto dir = scratch("malformed");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"determinacy", "x^^3"},
           {"determinacy", "x^3 +"},
           {"determinacy", "(x"},
           {"determinacy", "q1*x", "--r", "1"},
           {"determinacy", "x^3", "--r", "0", "--k", "0"},
           {"classify", "x*y +* y^3", "--r", "1", "--k", "1"},
           {"check-stability", "x^3 + w", "--n", "1"},
           {"check-stability"},
           {"check-stability", "--label", "9Z9"},
           {"wavefront", "--label", "1B3", "--t", "1,0"},
           {"wavefront", "--label", "1B3", "--t", "a,b"},
           {"wavefront", "--label", "1B3", "--format", "png"},
           {"wavefront", "--label", "1C4", "--format", "svg"},
           {"propagate", "--shape", "nope"},
           {"propagate", "--metric", "diag:1"},
           {"propagate", "--front", "/nonexistent.json"},
           {"verify-lift", "--family", "nope"},
           {"bogus"},
           {},
       }) {
    CAPTURE(args.empty() ? std::string("<none>") : args[0] + (args.size() > 1 ? " " + args[1] : ""));
    CHECK(run(args, dir).code == retfront::cli::kExitInputError);
  }
}

TEST_CASE("cli classify") {
  const auto dir = scratch("classify");
  auto r = run({"classify", "x*y + y^3", "--r", "1", "--k", "1"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["family"] == "C3");
  CHECK(r.j["sign"] == "+");
  r = run({"classify", "x^3", "--r", "1", "--k", "0"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["family"] == "B3");
  CHECK(r.j["sign"].is_null());
  r = run({"classify", "y^7", "--r", "0", "--k", "1"}, dir);
  CHECK(r.code == retfront::cli::kExitInconclusive);
  CHECK(r.j["classified"] == false);
}

TEST_CASE("cli check-stability") {
  const auto dir = scratch("stability");
  auto r = run({"check-stability", "--label", "1B3"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["stable"] == true);
  CHECK(r.j["truncation"] == 8);
  r = run({"check-stability", "--label", "1F4"}, dir);
  CHECK(r.j["stable"] == true);
  r = run({"check-stability", "x^3+q1*x+z", "--n", "2"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["stable"] == false);
  const auto cobasis = r.j["cobasis"].get<std::vector<std::string>>();
  CHECK(std::find(cobasis.begin(), cobasis.end(), "x^2") != cobasis.end());
  r = run({"check-stability", "x^3+t*x^2", "--n", "1"}, dir);
  CHECK(r.code == retfront::cli::kExitInconclusive);
  CHECK(r.j["pc_nondegenerate"] == false);
}

TEST_CASE("cli verify-catalog") {
  const auto dir = scratch("catalog");
  auto r = run({"verify-catalog", "--r", "1", "--n", "1"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["all_passed"] == true);
  CHECK(r.j["entries"].size() == 4);
  CHECK(r.err.find("all passed") != std::string::npos);
  CHECK(run({"verify-catalog", "--r", "1"}, dir).code == retfront::cli::kExitInputError);
}

TEST_CASE("cli wavefront") {
  auto dir = scratch("wave1");
  auto r = run({"wavefront", "--label", "1B3", "--t", "-1,0,1", "--format", "svg"}, dir);
  CHECK(r.code == 0);
  auto files = listing(dir);
  CHECK(std::count_if(files.begin(), files.end(), [](const std::string& f) { return f.ends_with(".svg"); }) == 9);
  CHECK(std::count_if(files.begin(), files.end(), [](const std::string& f) { return f.find("overlay") != std::string::npos; }) ==
        3);
  CHECK(r.j["sheets"].size() == 6);
  CHECK(r.j["sheets"][0]["cusps"] == 1);

  dir = scratch("wave2");
  r = run({"wavefront", "--label", "1C4", "--t-values", "-1,0,1", "--format", "obj", "--grid", "15"}, dir);
  CHECK(r.code == 0);
  files = listing(dir);
  CHECK(std::count_if(files.begin(), files.end(), [](const std::string& f) {
          return f.ends_with(".obj") && f.find("overlay") == std::string::npos;
        }) == 6);
  CHECK(r.j["grid"]["surface"] == 15);

  dir = scratch("wave3");
  r = run({"wavefront", "--label", "0B2", "--t", "0", "--window", "0.5", "--format", "json"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["window"]["hi"] == 0.5);
  CHECK(fs::exists(dir / "0B2_t0_overlay.json"));
}

TEST_CASE("cli wavefront output is deterministic") {
  std::string outputs[2];
  std::vector<std::string> names[2];
  for (int i = 0; i < 2; ++i) {
    const auto dir = scratch("det" + std::to_string(i));
    outputs[i] = run({"wavefront", "--label", "1C3+", "--t", "-1,0,1"}, dir).out;
    names[i] = listing(dir);
  }
  CHECK(outputs[0] == outputs[1]);
  REQUIRE(names[0] == names[1]);
  const auto base = fs::temp_directory_path() / "retfront_cli_tests";
  for (const auto& n : names[0]) CHECK(slurp(base / "det0" / n) == slurp(base / "det1" / n));
}

TEST_CASE("cli propagate") {
  auto dir = scratch("prop1");
  auto r = run({"propagate", "--shape", "segment-with-endpoint", "--t", "0.5"}, dir);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "segment-endpoint_t0.5_overlay.svg"));
  CHECK(r.j["sheets"].size() == 2);
  CHECK(r.j["max_h_drift"].get<double>() < 1e-8);

  dir = scratch("prop2");
  const auto front = dir / "front.json";
  fs::create_directories(dir);
  std::ofstream(front) << R"({"name": "front", "dim": 2, "r": 0, "k": 1, "shape": [3], "ranges": [[0, 1]],
                              "points": [[0, 0], [0.5, 0], [1, 0]]})";
  r = run({"propagate", "--front", front.string(), "--t", "-0.25", "--metric", "diag:1,4", "--format", "json"}, dir);
  CHECK(r.code == 0);
  CHECK(r.j["metric"] == "diag:1,4");
  CHECK(fs::exists(dir / "front_t-0.25_overlay.json"));
}

TEST_CASE("cli verify-lift") {
  const auto dir = scratch("lift");
  auto r = run({"verify-lift", "--n", "2", "--samples", "10"}, dir);
  CHECK(r.code == 0);
  REQUIRE(r.j["results"].size() == 4);
  for (const auto& res : r.j["results"]) CHECK(res["contact"] == true);
  r = run({"verify-lift", "--family", "noncontact"}, dir);
  CHECK(r.j["results"][0]["contact"] == false);
}
