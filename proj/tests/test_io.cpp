#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "kgh/config.hpp"
#include "kgh/io.hpp"

using namespace kgh;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[grid]
n = 3
extent = 32.0
points = 64

[potential]
kind = "power_law"
gamma = 2.5

[integrator]
dt = 0.01
t_end = 20.0

[initial]
kind = "gaussian"
width = 1.0
amplitude = 0.2
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kgh_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
  Grid g(3, 7.5, 8);
  PhaseState s(testing::random_field(g, 3), testing::random_field(g, 4), 1.0 / 3.0);
  const std::string bytes = serialize_snapshot(s, SnapshotRole::asymptotic);
  CHECK(bytes.size() == kSnapshotHeaderBytes + 4 + 2 * 2 * 8 * g.size());
  CHECK(bytes.substr(0, 4) == "KGH1");

  const auto path = scratch("rt.kgh");
  write_snapshot(s, path, SnapshotRole::asymptotic);
  const Snapshot back = read_snapshot(path);
  CHECK(back.role == SnapshotRole::asymptotic);
  CHECK(back.state.time == s.time);
  CHECK(back.state.grid() == g);
  CHECK(max_abs_difference(back.state.u, s.u) == 0.0);
  CHECK(max_abs_difference(back.state.udot, s.udot) == 0.0);
  CHECK(serialize_snapshot(back.state, back.role) == bytes);

  // hand-decoded header fields
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version, low byte first
  CHECK(static_cast<unsigned char>(bytes[5]) == 0);
  CHECK(static_cast<unsigned char>(bytes[6]) == 3);
  CHECK(static_cast<unsigned char>(bytes[7]) == 8);
}

TEST_CASE("snapshot errors are distinct") {
  Grid g(2, 4.0, 8);
  const std::string bytes = serialize_snapshot(PhaseState(testing::random_field(g, 1), Field(g), 2.0));

  CHECK_THROWS_AS(deserialize_snapshot(bytes.substr(0, bytes.size() - 5)), SnapshotTruncatedError);
  try {
    deserialize_snapshot(bytes.substr(0, bytes.size() - 5));
  } catch (const SnapshotTruncatedError& e) {
    CHECK(std::string(e.what()).find("truncated payload") != std::string::npos);
  }
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_snapshot(bad), SnapshotFormatError);
  bad = bytes;
  bad[4] = 2;  // version 2
  CHECK_THROWS_AS(deserialize_snapshot(bad), SnapshotVersionError);
  bad = bytes;
  bad[20] ^= 0x01;  // time field
  CHECK_THROWS_AS(deserialize_snapshot(bad), SnapshotChecksumError);
  CHECK_THROWS_AS(deserialize_snapshot(bytes + "x"), SnapshotFormatError);
  CHECK_THROWS_AS(read_snapshot(scratch("missing.kgh")), SnapshotFormatError);
}

TEST_CASE("crc32 and number formatting") {
  CHECK(crc32_of("123456789") == 0xCBF43926u);  // standard check value
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  CHECK(format_double(INFINITY) == "inf");

  DiagnosticsSeries s;
  s.times = {0.0, 0.5};
  s.column("a") = {1.0, 2.0};
  s.column("b") = {3.0, 4.0};
  CHECK(to_csv(s) == "t,a,b\n0,1,3\n0.5,2,4\n");
  s.column("c") = {1.0};
  CHECK_THROWS_AS(to_csv(s), ContractViolation);
}

TEST_CASE("minimal config is accepted") {
  RunConfig c = parse_config(kMinimal);
  CHECK(c.grid.points == 64);
  CHECK(c.potential.kind == PotentialKind::power_law);
  CHECK(c.potential.gamma == 2.5);
  CHECK(c.initial.kind == DataKind::gaussian);
  CHECK(c.velocity.kind == DataKind::zero);
  CHECK(c.integrator.t_end == 20.0);
  CHECK(c.hash().size() == 8);
  CHECK(c.hash() == parse_config(kMinimal).hash());
  CHECK(config_to_json(c).find("\"gamma\":2.5") != std::string::npos);
}

TEST_CASE("config errors are collected and named") {
  const std::string e1 = config_error(replace(kMinimal, "gamma = 2.5", "gamma = 5.0"));
  CHECK(e1.find("upper bound gamma < min(4, n)") != std::string::npos);

  const std::string e2 = config_error(std::string(kMinimal) + "\n[output]\nformat = [\"csv\"]\n");
  CHECK(e2.find("unknown key 'output.format'") != std::string::npos);

  // three independent problems, all reported
  std::string bad = replace(kMinimal, "points = 64", "points = 63");
  bad = replace(bad, "dt = 0.01", "dt = -1.0\nfoo = 1");
  const std::string e3 = config_error(bad);
  CHECK(e3.find("3 configuration errors") != std::string::npos);
  CHECK(e3.find("integrator.foo") != std::string::npos);
  CHECK(e3.find("dt must be positive") != std::string::npos);
  CHECK(e3.find("grid:") != std::string::npos);

  CHECK(config_error("[grid\n").find("syntax") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "kind = \"gaussian\"", "kind = \"square\"")).find("initial.kind") !=
        std::string::npos);
}

TEST_CASE("box-size policy for causality runs") {
  std::string base = replace(kMinimal, "kind = \"gaussian\"\nwidth = 1.0", "kind = \"bump\"\nradius = 2.0");
  base = replace(base, "t_end = 20.0", "t_end = 10.0");
  // 4 (2 + 10) = 48 > 32
  const std::string e = config_error(base + "\n[diagnostics.causality]\n");
  CHECK(e.find("box-size policy") != std::string::npos);
  CHECK(e.find("48") != std::string::npos);
  CHECK_NOTHROW(parse_config(replace(base, "extent = 32.0", "extent = 48.0") + "\n[diagnostics.causality]\n"));
  // gaussian data are not compactly supported
  const std::string e2 = config_error(std::string(kMinimal) + "\n[diagnostics.causality]\n");
  CHECK(e2.find("compactly supported") != std::string::npos);
  // policy factor below 2 is refused
  CHECK(config_error(base + "\n[diagnostics]\nbox_policy_factor = 1.5\n").find("box_policy_factor") !=
        std::string::npos);
}

TEST_CASE("initial data builders") {
  RunConfig c = parse_config(replace(kMinimal, "points = 64", "points = 16"));
  c.velocity.kind = DataKind::bump;
  c.velocity.radius = 4.0;
  c.velocity.amplitude = 0.5;
  PhaseState s = build_initial_state(c);
  const Grid g = c.make_grid();
  CHECK(max_abs_difference(s.u, testing::gaussian(g, 1.0, 0.2)) < 1e-15);
  const auto& r2 = radius_squared(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q = 1.0 - r2[i] / 16.0;
    CHECK(s.udot[i].real() == doctest::Approx(q > 0 ? 0.5 * std::pow(q, 8) : 0.0));
  }
  // file data: u from one snapshot, udot from the same one
  const auto path = scratch("init.kgh");
  write_snapshot(s, path);
  c.initial = DataSpec{};
  c.initial.kind = DataKind::file;
  c.initial.path = path.string();
  c.velocity = c.initial;
  PhaseState f = build_initial_state(c);
  CHECK(max_abs_difference(f.u, s.u) == 0.0);
  CHECK(max_abs_difference(f.udot, s.udot) == 0.0);
}
