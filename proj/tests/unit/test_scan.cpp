#include "coulosc/scan.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coulosc;
using namespace coulosc::scan;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

SweepSpec small_sweep(unsigned workers) {
  SweepSpec s;
  s.base = PotentialSpec<double>::walled(1, 0.5, 1);
  s.first = Axis::linspace(Param::B, 0.5, 1.5, 3);
  s.second = Axis::linspace(Param::R, 1, 2, 2);
  s.labels = {parse_label("1s"), parse_label("2p")};
  s.workers = workers;
  return s;
}

}  // namespace

TEST_SUITE("scan") {
  TEST_CASE("hydrogen levels are reported as degenerate") {
    const auto table = ordering(1, 0, std::nullopt, labels_up_to(3));
    CHECK(table.sequence() == "1s(2s2p)(3s3p3d)");
    REQUIRE(table.entries.size() == 6);
    CHECK(table.entries.front().energy == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(table.groups.size() == 3);
  }

  TEST_CASE("ordering with an oscillator term") {
    const auto table = ordering(1, 0.5, 1.0, labels_up_to(3));
    CHECK(table.groups.size() == 6);
    CHECK(table.sequence(3) == "1s2p3d");
    for (std::size_t i = 1; i < table.entries.size(); ++i) CHECK(table.entries[i - 1].energy < table.entries[i].energy);
  }

  TEST_CASE("labels up to a principal number") {
    const auto labels = labels_up_to(3);
    REQUIRE(labels.size() == 6);
    CHECK(labels[0].name() == "1s");
    CHECK(labels[5].name() == "3d");
  }

  TEST_CASE("critical coupling of the ground state") {
    const auto bc = find_bc(1, kEffectivelyFreeRadius, {0, 0});
    CHECK(bc.b_c == doctest::Approx(0.32533).epsilon(3e-4));
    CHECK(std::abs(bc.energy_at_b_c) <= 1e-8);
    CHECK(bc.bracket.first <= bc.b_c);
    CHECK(bc.b_c <= bc.bracket.second);
    // The energy changes sign across the reported coupling.
    const double delta = 10 * (bc.bracket.second - bc.bracket.first) + 1e-9 * bc.b_c;
    const auto spec = [&](double b) { return PotentialSpec<double>::walled(1, b, kEffectivelyFreeRadius); };
    CHECK(level_energy(spec(bc.b_c - delta), {0, 0}, {}) < 0);
    CHECK(level_energy(spec(bc.b_c + delta), {0, 0}, {}) > 0);
  }

  TEST_CASE("critical coupling scales as a^4 in free space") {
    const auto one = find_bc(1, std::nullopt, {0, 0});
    const auto two = find_bc(2, std::nullopt, {0, 0});
    CHECK(two.b_c / one.b_c == doctest::Approx(16.0).epsilon(1e-6));
  }

  TEST_CASE("levels that never reach zero") {
    CHECK_THROWS_AS(find_bc(-1, 10.0, {0, 0}), NoSignChange);
    CHECK_THROWS_AS(find_bc(1, 0.5, {0, 0}), NoSignChange);
    CHECK_THROWS_AS(find_bc(1, 10.0, {0, 0}, std::pair{0.5, 1.0}), NoSignChange);
    CHECK_THROWS_AS(find_bc(1, 10.0, {0, 0}, std::pair{1.0, 0.5}), std::invalid_argument);
  }

  TEST_CASE("reference checks") {
    CHECK(unit_in_last_place("0.00015") == doctest::Approx(1e-5));
    CHECK(unit_in_last_place("0.32533") == doctest::Approx(1e-5));
    CHECK(unit_in_last_place("12") == doctest::Approx(1.0));
    const auto good = check_against({0, 0}, 0.325329, "0.32533");
    CHECK(good.agrees());
    const auto bad = check_against({1, 0}, 0.0049, "0.004831");
    CHECK(!bad.agrees());
    const auto report = discrepancy_report({good, bad});
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("2s") == 0);
    CHECK(discrepancy_report({good}).empty());
  }

  TEST_CASE("the ground state never crosses the first excited level") {
    const auto fixed = PotentialSpec<double>::walled(1, 0.1, kEffectivelyFreeRadius);
    CHECK_THROWS_AS(find_crossing({parse_label("1s"), parse_label("2p")}, Param::B, fixed, {1e-6, 0.5}),
                    NoSignChange);
  }

  TEST_CASE("ordering flips only at the crossing") {
    const auto fixed = PotentialSpec<double>::walled(1, 0.1, kEffectivelyFreeRadius);
    const auto s3 = parse_label("3s"), f4 = parse_label("4f");
    const auto event = find_crossing({s3, f4}, Param::B, fixed, {0.001, 0.5});
    CHECK(event.parameter == Param::B);
    CHECK(event.level_lo == s3);
    CHECK(event.crossing_value > 0.001);
    CHECK(event.crossing_value < 0.5);
    for (const double b : {0.0015, 0.003, 0.006, 0.012, 0.05, 0.2, 0.45}) {
      const auto t = ordering(1, b, kEffectivelyFreeRadius, {s3, f4});
      const bool s_first = t.entries.front().label == s3;
      CHECK(s_first == (b < event.crossing_value));
    }
  }

  TEST_CASE("axes") {
    const auto lin = Axis::linspace(Param::R, 1, 2, 5);
    REQUIRE(lin.values.size() == 5);
    CHECK(lin.values.front() == 1);
    CHECK(lin.values.back() == 2);
    CHECK(lin.values[2] == 1.5);
    const auto lg = Axis::logspace(Param::B, 1e-5, 1e-2, 4);
    CHECK(lg.values == std::vector<double>{1e-5, 1e-4, 1e-3, 1e-2});
    CHECK(Axis::linspace(Param::A, 3, 7, 1).values == std::vector<double>{3});
    CHECK_THROWS_AS(Axis::logspace(Param::B, 0, 1, 3), std::invalid_argument);
    CHECK_THROWS_AS(Axis::linspace(Param::B, 0, 1, 0), std::invalid_argument);
  }

  TEST_CASE("sweeps are deterministic across worker counts") {
    const auto serial = sweep(small_sweep(1));
    const auto parallel = sweep(small_sweep(4));
    REQUIRE(serial.size() == 12);
    CHECK(to_csv(serial) == to_csv(parallel));
    CHECK(to_json(serial) == to_json(parallel));
    // Grid order: first axis, then second axis, then labels.
    CHECK(serial[0].param1 == 0.5);
    CHECK(*serial[0].param2 == 1);
    CHECK(serial[1].label.name() == "2p");
    CHECK(*serial[2].param2 == 2);
    CHECK(serial[4].param1 == 1.0);
    for (const auto& row : serial) CHECK(row.converged);
  }

  TEST_CASE("failed points are flagged, not fatal") {
    SweepSpec s;
    s.base = PotentialSpec<double>::free(1, 0);
    s.first = Axis::linspace(Param::A, -1, 1, 2);
    s.labels = {parse_label("1s")};
    const auto rows = sweep(s);
    REQUIRE(rows.size() == 2);
    CHECK(!rows[0].converged);
    CHECK(!rows[0].energy);
    CHECK(rows[1].converged);
    const auto lines = split_lines(to_csv(rows));
    CHECK(lines[1] == "-1,,0,0,1s,,oracle,false");
  }

  TEST_CASE("CSV schema") {
    const auto rows = sweep(small_sweep(2));
    const auto lines = split_lines(to_csv(rows));
    REQUIRE(lines.size() == rows.size() + 1);
    CHECK(lines[0] == "param1,param2,label_n,label_l,label_name,energy,solver,converged");
    const auto first = split_fields(lines[1]);
    REQUIRE(first.size() == 8);
    CHECK(first[0] == "0.5");
    CHECK(first[1] == "1");
    CHECK(first[4] == "1s");
    CHECK(first[6] == "oracle");
    CHECK(first[7] == "true");
    // 18 significant digits in plain decimal.
    const std::string& energy = first[5];
    CHECK(energy.find('e') == std::string::npos);
    std::size_t digits = 0;
    bool leading = true;
    for (const char ch : energy) {
      if (ch < '0' || ch > '9') continue;
      if (leading && ch == '0') continue;
      leading = false;
      ++digits;
    }
    CHECK(digits == 18);
  }

  TEST_CASE("JSON mirrors the CSV fields") {
    const auto rows = sweep(small_sweep(2));
    const auto doc = nlohmann::json::parse(to_json(rows));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& o = doc[i];
      for (const char* key :
           {"param1", "param2", "label_n", "label_l", "label_name", "energy", "solver", "converged"}) {
        CHECK(o.contains(key));
      }
      CHECK(o["param1"].get<double>() == rows[i].param1);
      CHECK(o["label_name"].get<std::string>() == rows[i].label.name());
      CHECK(o["energy"].get<double>() == doctest::Approx(*rows[i].energy).epsilon(1e-15));
      CHECK(o["converged"].get<bool>());
    }
  }

  TEST_CASE("export writes the file and names bad paths") {
    const auto dir = std::filesystem::temp_directory_path() / "coulosc_scan_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "sweep.csv";
    const auto rows = sweep_export(small_sweep(2), Format::Csv, path);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == to_csv(rows));
    // Repeated runs are byte-identical.
    sweep_export(small_sweep(3), Format::Csv, dir / "again.csv");
    std::ifstream again(dir / "again.csv");
    std::stringstream buf2;
    buf2 << again.rdbuf();
    CHECK(buf2.str() == buf.str());

    const auto bad = dir / "missing" / "x.csv";
    try {
      sweep_export(small_sweep(1), Format::Json, bad);
      FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("number formatting") {
    CHECK(format_significant(2.5) == "2.50000000000000000");
    CHECK(format_significant(-0.125, 3) == "-0.125");
    CHECK(format_significant(123.0, 4) == "123.0");
    CHECK(format_shortest(100.0) == "100");
    CHECK(format_shortest(0.1) == "0.1");
    ScopedPrecision guard(PrecisionCtx{});
    CHECK(format_significant(Real(1) / 3, 20) == "0.33333333333333333333");
  }

  TEST_CASE("AIM energies through the scan layer") {
    EnergyOptions opts;
    opts.solver = Solver::Aim;
    opts.precision = PrecisionCtx{128, 1e-12};
    const double e = level_energy(PotentialSpec<double>::walled(1, 0.5, 1), {1, 0}, opts);
    CHECK(std::abs(e - 16.733064961893308967) <= 1e-11);
    ScopedPrecision guard(opts.precision);
    const auto r = aim_level(PotentialSpec<Real>::walled(Real(-1), Real(0.5), Real(1)), {0, 2}, opts.precision);
    CHECK(std::abs(to_double(r.energy) - 18.456796172766948526) <= 1e-11);
    CHECK(r.label == LevelLabel{0, 2});
  }
}
