#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlhelm/errors.hpp"
#include "nlhelm/io.hpp"

using namespace nlhelm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlhelm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ForwardConfig small_config() {
  ForwardConfig cfg;
  cfg.k = 1.0;
  cfg.nu = RadialProfile::constant(0.1);
  cfg.eps = RadialProfile::constant(2.0);
  cfg.R1 = 1.05;
  cfg.N = 8;
  cfg.nonlinearity = Nonlinearity::power(2);
  cfg.intensity = IntensityMode::square;
  cfg.max_step = 5e-3;
  return cfg;
}

}  // namespace

TEST_CASE("forward config parsing") {
  const json j = json::parse(R"({
    "k": 2.0, "nu": {"r": [1, 2], "values": [0.1, 0.3]}, "eps": 1.5, "R0": 1, "R1": 1.5, "N": 12,
    "nonlinearity": {"type": "chebyshev", "a": [0.1, 0.2], "interval": [0, 2]},
    "intensity": "square", "boundary": {"type": "modulated_plane_wave", "envelope": [1.0, 0.5]},
    "rtol": 1e-9, "max_step": 0.01
  })");
  const auto cfg = forward_config_from_json(j);
  CHECK(cfg.k == 2.0);
  CHECK(cfg.nu(1.5) == doctest::Approx(0.2));
  CHECK(cfg.eps(1.2) == 1.5);
  CHECK(cfg.N == 12);
  CHECK(cfg.nonlinearity.kind() == Nonlinearity::Kind::chebyshev);
  CHECK(cfg.intensity == IntensityMode::square);
  CHECK(cfg.boundary.kind == BoundarySpec::Kind::modulated_plane_wave);
  CHECK(cfg.rtol == 1e-9);

  // Serialized config parses back to the same serialization.
  CHECK(to_json(forward_config_from_json(to_json(cfg))) == to_json(cfg));

  CHECK_THROWS_WITH_AS(forward_config_from_json(json{{"N", -1}}), doctest::Contains("forward.N"), InputError);
  CHECK_THROWS_WITH_AS(forward_config_from_json(json{{"k", "x"}}), doctest::Contains("forward.k"), InputError);
  CHECK_THROWS_WITH_AS(forward_config_from_json(json{{"bogus", 1}}), doctest::Contains("forward.bogus"), InputError);
  CHECK_THROWS_WITH_AS(forward_config_from_json(json{{"R1", 0.5}}), doctest::Contains("forward.R1"), InputError);
  CHECK_THROWS_WITH_AS(forward_config_from_json(json{{"nonlinearity", {{"type", "cubic"}}}}),
                       doctest::Contains("forward.nonlinearity.type"), InputError);
  CHECK_THROWS_AS(forward_config_from_json(json{{"intensity", "linear"}}), InputError);
}

TEST_CASE("inverse settings parsing") {
  auto s = inverse_settings_from_json(json::parse(R"({"K": 3, "interval": "auto", "rings": {"r_min": 1, "r_max": 1.02},
                                                      "reference": [0.5, 0, 0.5], "intensity": "square"})"));
  CHECK(s.auto_interval);
  CHECK(s.intensity_given);
  CHECK(s.config.rings.kind == RingSelection::Kind::radius_range);
  CHECK(s.config.rings.r_max == 1.02);
  s = inverse_settings_from_json(json::parse(R"({"rings": [1, 4, 7], "interval": [0, 2]})"));
  CHECK(s.config.rings.indices == std::vector<std::size_t>{1, 4, 7});
  CHECK(s.config.interval.beta == 2.0);
  CHECK(!s.intensity_given);
  CHECK_THROWS_AS(inverse_settings_from_json(json::parse(R"({"K": 2, "reference": [1, 2, 3]})")), InputError);
  CHECK_THROWS_AS(inverse_settings_from_json(json::parse(R"({"K": 0})")), InputError);
  CHECK_THROWS_AS(inverse_settings_from_json(json::parse(R"({"interval": [2, 1]})")), InputError);
  CHECK_THROWS_AS(inverse_settings_from_json(json::parse(R"({"rings": "some"})")), InputError);
}

TEST_CASE("roundtrip config parsing") {
  const auto cfg = roundtrip_config_from_json(json::parse(R"({"roundtrip": {"seed": 9, "K": 3}, "forward": {"N": 10}})"));
  CHECK(cfg.seed == 9);
  CHECK(cfg.K == 3);
  CHECK(cfg.forward.N == 10);
  CHECK_THROWS_AS(roundtrip_config_from_json(json::parse(R"({"roundtrip": {"sed": 9}})")), InputError);
}

TEST_CASE("malformed JSON is an input error") {
  const auto dir = scratch_dir("malformed");
  write_text(dir / "bad.json", "{\"forward\": {\"k\": 1,,}");
  CHECK_THROWS_WITH_AS(load_json_file(dir / "bad.json"), doctest::Contains("bad.json"), InputError);
  CHECK_THROWS_AS(load_json_file(dir / "missing.json"), InputError);
}

TEST_CASE("trajectory round trip") {
  const auto traj = solve_forward(small_config());
  const auto dir = scratch_dir("traj");
  write_trajectory(dir / "t.json", traj);
  const json j = load_json_file(dir / "t.json");
  for (const char* key : {"config", "r", "Z_re", "Z_im"}) CHECK(j.contains(key));
  const auto back = read_trajectory(dir / "t.json");
  CHECK(back.r == traj.r);
  CHECK(back.states == traj.states);
  CHECK(to_json(back.config) == to_json(traj.config));

  json broken = j;
  broken["Z_re"][1].erase(0);
  CHECK_THROWS_WITH_AS(trajectory_from_json(broken), doctest::Contains("row 1"), InputError);
  broken = j;
  broken["r"][2] = broken["r"][1];
  CHECK_THROWS_WITH_AS(trajectory_from_json(broken), doctest::Contains("increasing"), InputError);
  broken = j;
  broken.erase("Z_im");
  CHECK_THROWS_AS(trajectory_from_json(broken), InputError);
}

TEST_CASE("csv outputs") {
  CHECK(format_sci(0.0) == "0.0000e+00");
  CHECK(format_sci(-1234.5678) == "-1.2346e+03");
  CHECK(format_sci(1e-12) == "1.0000e-12");

  const auto cfg = small_config();
  const auto traj = solve_forward(cfg);
  const auto dir = scratch_dir("csv");
  const json embedded{{"forward", to_json(cfg)}};
  write_field_csv(dir / "a.csv", traj, embedded);
  write_field_csv(dir / "b.csv", solve_forward(cfg), embedded);
  const auto text = slurp(dir / "a.csv");
  CHECK(text == slurp(dir / "b.csv"));
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# config: ", 0) == 0);
  CHECK(json::parse(line.substr(10)) == embedded);
  std::getline(lines, line);
  CHECK(line == "t,re_U,im_U,abs_U");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 181);

  InverseConfig ic;
  ic.K = 3;
  ic.intensity = IntensityMode::square;
  const auto res = invert(traj, ic);
  write_inverse_csv(dir / "inv.csv", res, 3, embedded);
  std::istringstream inv(slurp(dir / "inv.csv"));
  std::getline(inv, line);
  std::getline(inv, line);
  CHECK(line == "r,a_0,a_1,a_2,residual,cond");
  std::getline(inv, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 5);
  CHECK(line.find("e") != std::string::npos);
}
