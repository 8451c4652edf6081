// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "stokeslps/io.hpp"
#include "stokeslps/study.hpp"

using namespace stokeslps;

namespace {

StudyConfig quick_config(std::vector<int> levels) {
  StudyConfig config;
  config.levels = std::move(levels);
  config.tol = 1e-9;
  return config;
}

// Table with synthetic h/error columns for order arithmetic.
ConvergenceTable synthetic_table(const std::vector<double>& h,
                                 const std::vector<double>& err,
                                 const std::vector<double>& tilde_err) {
  ConvergenceTable table;
  for (std::size_t i = 0; i < h.size(); ++i) {
    StudyRow row;
    row.n = static_cast<int>(i) + 1;
    row.h = h[i];
    row.lambda = 1.0;
    if (i < err.size()) row.lambda_error = err[i];
    if (i < tilde_err.size()) {
      row.lambda_tilde = 1.0;
      row.lambda_tilde_error = tilde_err[i];
    }
    table.rows.push_back(row);
  }
  return table;
}

int count_occurrences(const std::string& haystack, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::filesystem::path fresh_temp_dir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("stokeslps-test-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Drops the final (wall-clock) column of every CSV line.
std::string strip_last_column(const std::string& csv) {
  std::string out;
  std::istringstream stream(csv);
  std::string line;
  while (std::getline(stream, line)) {
    const std::size_t comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("study: observed orders recover synthetic rates") {
  const std::vector<double> h = {0.4, 0.2, 0.1};
  ConvergenceTable table = synthetic_table(
      h, {h[0] * h[0], h[1] * h[1], h[2] * h[2]},
      {std::pow(h[0], 4), std::pow(h[1], 4), std::pow(h[2], 4)});
  const OrderEstimates orders = observed_orders(table);
  REQUIRE(orders.lambda_orders.size() == 2);
  REQUIRE(orders.lambda_tilde_orders.size() == 2);
  for (const auto& p : orders.lambda_orders) {
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(2.0).epsilon(1e-12));
  }
  for (const auto& p : orders.lambda_tilde_orders) {
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("study: orders are undefined below the noise floor") {
  ConvergenceTable table =
      synthetic_table({0.4, 0.2}, {1e-2, 1e-14}, {});
  const OrderEstimates orders = observed_orders(table);
  REQUIRE(orders.lambda_orders.size() == 1);
  CHECK(!orders.lambda_orders[0].has_value());
  CHECK(orders.lambda_tilde_orders.size() == 1);
  CHECK(!orders.lambda_tilde_orders[0].has_value());

  ConvergenceTable single = synthetic_table({0.4}, {1e-2}, {});
  CHECK_THROWS_AS((void)observed_orders(single), InvalidArgumentError);
}

TEST_CASE("study: config validation") {
  CHECK_THROWS_AS((void)run_study(quick_config({})), InvalidArgumentError);
  CHECK_THROWS_AS((void)run_study(quick_config({4, 4})), InvalidArgumentError);
  CHECK_THROWS_AS((void)run_study(quick_config({8, 4})), InvalidArgumentError);
  CHECK_THROWS_AS((void)run_study(quick_config({0, 4})), InvalidArgumentError);

  StudyConfig bad = quick_config({2});
  bad.alpha0 = 0.0;
  CHECK_THROWS_AS((void)run_study(bad), InvalidArgumentError);
  bad = quick_config({2});
  bad.eigen_count = 0;
  CHECK_THROWS_AS((void)run_study(bad), InvalidArgumentError);
  bad = quick_config({2});
  bad.tol = 0.0;
  CHECK_THROWS_AS((void)run_study(bad), InvalidArgumentError);
  bad = quick_config({2});
  bad.max_sweeps = 0;
  CHECK_THROWS_AS((void)run_study(bad), InvalidArgumentError);
  bad = quick_config({2});
  bad.twogrid_levels = -1;
  CHECK_THROWS_AS((void)run_study(bad), InvalidArgumentError);
}

TEST_CASE("study: element pair helpers") {
  CHECK(std::string(to_string(ElementPair::P1Zero)) == "p1-zero");
  CHECK(std::string(to_string(ElementPair::P2BubblePDisc1)) ==
        "p2bubble-pdisc1");
  CHECK(element_of(ElementPair::P1Zero) == ElementKind::P1);
  CHECK(element_of(ElementPair::P2BubblePDisc1) == ElementKind::P2Bubble);
  CHECK(projection_of(ElementPair::P1Zero).is_zero());
  CHECK(!projection_of(ElementPair::P2BubblePDisc1).is_zero());
}

TEST_CASE("study: default-reference errors shrink under refinement") {
  // n=2 is pre-asymptotic (its eigenvalue lands below the limit), so the
  // monotone-error window starts at n=4.
  const ConvergenceTable table = run_study(quick_config({4, 8, 16}));
  REQUIRE(table.rows.size() == 3);
  REQUIRE(table.reference.has_value());
  CHECK(*table.reference == doctest::Approx(52.3446911));
  for (const StudyRow& row : table.rows) {
    CHECK(row.velocity_dofs == 2 * (row.n - 1) * (row.n - 1));
    CHECK(row.pressure_dofs == (row.n + 1) * (row.n + 1));
    CHECK(row.h == doctest::Approx(std::sqrt(2.0) / row.n));
    REQUIRE(row.lambda_error.has_value());
    CHECK(row.residual <= 1e-9);
    CHECK(row.s_pp > 0.0);
    CHECK(!row.lambda_tilde.has_value());
  }
  CHECK(*table.rows[0].lambda_error > *table.rows[1].lambda_error);
  CHECK(*table.rows[1].lambda_error > *table.rows[2].lambda_error);
  REQUIRE(table.lambda_orders.size() == 2);
  CHECK(table.lambda_tilde_orders.size() == 2);
  CHECK(!table.lambda_tilde_orders[0].has_value());
  REQUIRE(table.finest_pair.has_value());
  CHECK(table.finest_pair->lambda == table.rows.back().lambda);
}

TEST_CASE("study: richardson and user references") {
  StudyConfig config = quick_config({2, 4});
  config.reference_mode = ReferenceMode::Richardson;
  const ConvergenceTable table = run_study(config);
  REQUIRE(table.reference.has_value());
  const double expected =
      (4.0 * table.rows[1].lambda - table.rows[0].lambda) / 3.0;
  CHECK(*table.reference == doctest::Approx(expected).epsilon(1e-15));
  CHECK(*table.rows[1].lambda_error ==
        doctest::Approx(std::abs(table.rows[1].lambda - expected))
            .epsilon(1e-12));

  StudyConfig one = quick_config({2});
  one.reference_mode = ReferenceMode::Richardson;
  const ConvergenceTable short_table = run_study(one);
  CHECK(!short_table.reference.has_value());
  CHECK(!short_table.rows[0].lambda_error.has_value());

  StudyConfig valued = quick_config({2});
  valued.reference_mode = ReferenceMode::Value;
  valued.reference_value = 60.0;
  const ConvergenceTable valued_table = run_study(valued);
  REQUIRE(valued_table.reference.has_value());
  CHECK(*valued_table.reference == 60.0);
  CHECK(*valued_table.rows[0].lambda_error ==
        doctest::Approx(std::abs(valued_table.rows[0].lambda - 60.0)));
}

TEST_CASE("study: failures carry the completed rows") {
  StudyConfig config = quick_config({2, 4});
  config.post = PostprocessChoice::TwoGrid;
  config.twogrid_levels = 0;  // automatic depth
  config.twogrid_max_levels = 1;  // enough for n=2, too small for n=4
  try {
    (void)run_study(config);
    FAIL("expected StudyError");
  } catch (const StudyError& error) {
    CHECK(error.category() == ErrorCategory::InvalidArgument);
    CHECK(error.failed_level() == 4);
    CHECK(std::string(error.what()).find("n=4") != std::string::npos);
    REQUIRE(error.partial_table().rows.size() == 1);
    const StudyRow& row = error.partial_table().rows[0];
    CHECK(row.n == 2);
    REQUIRE(row.lambda_tilde.has_value());
    CHECK(row.lambda_error.has_value());
  }
}

TEST_CASE("io: float formatting round-trips") {
  for (double value : {52.3446911, 1.0 / 3.0, 6.725e-8, -0.0, 1e300}) {
    CHECK(std::stod(format_float(value)) == value);
  }
}

TEST_CASE("io: csv layout and round-trip") {
  StudyConfig config = quick_config({2, 4});
  config.post = PostprocessChoice::TwoSpace;
  const ConvergenceTable table = run_study(config);
  const std::string csv = to_csv(table);
  const auto cells = parse_csv(csv);
  REQUIRE(cells.size() == 3);
  REQUIRE(cells[0].size() == 13);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "n,h,velocity_dofs,pressure_dofs,lambda,lambda_error,order_lambda,"
        "lambda_tilde,lambda_tilde_error,order_lambda_tilde,s_pp,residual,"
        "wall_seconds");
  // First data row has no order cells; second row has both.
  CHECK(cells[1][6].empty());
  CHECK(cells[1][9].empty());
  CHECK(!cells[2][6].empty());
  CHECK(!cells[2][9].empty());
  // Numeric cells round-trip bit-exactly.
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = cells[i + 1];
    CHECK(std::stoi(row[0]) == table.rows[i].n);
    CHECK(std::stod(row[1]) == table.rows[i].h);
    CHECK(std::stod(row[4]) == table.rows[i].lambda);
    CHECK(std::stod(row[5]) == *table.rows[i].lambda_error);
    CHECK(std::stod(row[7]) == *table.rows[i].lambda_tilde);
    CHECK(std::stod(row[10]) == table.rows[i].s_pp);
  }
  CHECK(std::stod(cells[2][6]) == *table.lambda_orders[0]);
}

TEST_CASE("io: svg plot carries one polyline per error series plus guides") {
  StudyConfig config = quick_config({2, 4});
  config.post = PostprocessChoice::TwoSpace;
  const ConvergenceTable both = run_study(config);
  const std::string svg_both = to_svg(both);
  CHECK(count_occurrences(svg_both, "<polyline") == 4);
  CHECK(svg_both.find("</svg>") != std::string::npos);
  CHECK(svg_both.find("eigenvalue error") != std::string::npos);
  CHECK(svg_both.find("postprocessed error") != std::string::npos);

  const ConvergenceTable lambda_only = run_study(quick_config({2, 4}));
  CHECK(count_occurrences(to_svg(lambda_only), "<polyline") == 2);

  StudyConfig no_ref = quick_config({2});
  no_ref.reference_mode = ReferenceMode::Richardson;
  const ConvergenceTable empty = run_study(no_ref);
  CHECK(to_svg(empty).find("no error data") != std::string::npos);
}

TEST_CASE("io: vtk export") {
  const MeshPtr mesh = Mesh::unit_square(2);
  const std::string bare = to_vtk(*mesh);
  CHECK(bare.find("# vtk DataFile Version 3.0") == 0);
  CHECK(bare.find("ASCII") != std::string::npos);
  CHECK(bare.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(bare.find("POINTS 9 double") != std::string::npos);
  CHECK(bare.find("CELLS 8 32") != std::string::npos);
  CHECK(bare.find("CELL_TYPES 8") != std::string::npos);
  CHECK(bare.find("POINT_DATA") == std::string::npos);

  const BlockSystem sys = assemble_blocks(mesh, ElementKind::P1,
                                          ElementKind::P1,
                                          ProjectionKind::zero(), 0.1);
  const EigenPair pair = solve_smallest(sys, 1, 1e-9).front();
  const std::string with_data = to_vtk(*mesh, pair.u, pair.p);
  CHECK(with_data.find("POINT_DATA 9") != std::string::npos);
  CHECK(with_data.find("VECTORS velocity double") != std::string::npos);
  CHECK(with_data.find("SCALARS pressure double") != std::string::npos);
  CHECK(with_data.find("LOOKUP_TABLE default") != std::string::npos);

  const MeshPtr other = Mesh::unit_square(3);
  CHECK_THROWS_AS((void)to_vtk(*other, pair.u, pair.p), InvalidArgumentError);
  CHECK_THROWS_AS((void)to_vtk(*mesh, pair.p, pair.p), InvalidArgumentError);
}

TEST_CASE("io: matrix market round-trip") {
  SparseMatrix m(3, 4);
  m.insert(0, 0) = 1.5;
  m.insert(2, 3) = -2.25;
  m.insert(1, 2) = 1.0 / 3.0;
  m.makeCompressed();
  const std::string text = to_matrix_market(m);
  CHECK(text.find("%%MatrixMarket matrix coordinate real general") == 0);
  std::istringstream stream(text);
  std::string line;
  std::getline(stream, line);  // banner
  int rows = 0, cols = 0, nnz = 0;
  stream >> rows >> cols >> nnz;
  CHECK(rows == 3);
  CHECK(cols == 4);
  CHECK(nnz == 3);
  double sum = 0.0;
  for (int k = 0; k < nnz; ++k) {
    int i = 0, j = 0;
    double value = 0.0;
    stream >> i >> j >> value;
    CHECK(i >= 1);
    CHECK(j >= 1);
    CHECK(std::abs(m.coeff(i - 1, j - 1) - value) == 0.0);
    sum += value;
  }
  CHECK(sum == doctest::Approx(1.5 - 2.25 + 1.0 / 3.0));
}

TEST_CASE("io: config text parsing") {
  const auto entries = parse_config_text(
      "# study setup\n"
      "pair = p1-zero\n"
      "\n"
      "levels = 4, 8\n"
      "alpha0=0.2  # inline comment\n"
      "alpha0 = 0.3\n");
  CHECK(entries.size() == 3);
  CHECK(entries.at("pair") == "p1-zero");
  CHECK(entries.at("levels") == "4, 8");
  CHECK(entries.at("alpha0") == "0.3");  // last assignment wins

  try {
    (void)parse_config_text("pair = p1-zero\nbroken line\n");
    FAIL("expected InvalidArgumentError");
  } catch (const InvalidArgumentError& error) {
    CHECK(std::string(error.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config_text("= value\n"), InvalidArgumentError);
}

TEST_CASE("io: study config vocabulary") {
  std::map<std::string, std::string> entries = {
      {"pair", "p2bubble-pdisc1"},
      {"alpha0", "0.25"},
      {"alpha-scaling", "constant"},
      {"levels", "2,4,8"},
      {"count", "2"},
      {"tol", "1e-8"},
      {"max-sweeps", "50"},
      {"postprocess", "two-grid"},
      {"twogrid-levels", "auto"},
      {"twogrid-max-levels", "5"},
      {"reference", "richardson"},
      {"output-dir", "results"},
      {"vtk", "true"},
  };
  const StudyConfig config = study_config_from_map(entries);
  CHECK(config.pair == ElementPair::P2BubblePDisc1);
  CHECK(config.alpha0 == 0.25);
  CHECK(config.scaling == AlphaScaling::Constant);
  CHECK(config.levels == std::vector<int>{2, 4, 8});
  CHECK(config.eigen_count == 2);
  CHECK(config.tol == 1e-8);
  CHECK(config.max_sweeps == 50);
  CHECK(config.post == PostprocessChoice::TwoGrid);
  CHECK(config.twogrid_levels == 0);
  CHECK(config.twogrid_max_levels == 5);
  CHECK(config.reference_mode == ReferenceMode::Richardson);
  CHECK(config.output_dir == "results");
  CHECK(config.write_vtk);

  entries["reference"] = "52.25";
  entries["twogrid-levels"] = "2";
  entries["vtk"] = "off";
  const StudyConfig tweaked = study_config_from_map(entries);
  CHECK(tweaked.reference_mode == ReferenceMode::Value);
  CHECK(tweaked.reference_value == 52.25);
  CHECK(tweaked.twogrid_levels == 2);
  CHECK(!tweaked.write_vtk);

  CHECK_THROWS_AS((void)study_config_from_map({{"mystery", "1"}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS((void)study_config_from_map({{"alpha0", "abc"}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS((void)study_config_from_map({{"levels", "4;8"}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS((void)study_config_from_map({{"pair", "taylor-hood"}}),
                  InvalidArgumentError);
  CHECK_THROWS_AS((void)study_config_from_map({{"vtk", "maybe"}}),
                  InvalidArgumentError);
}

TEST_CASE("io: missing config file raises an io error") {
  CHECK_THROWS_AS((void)read_config_file("/nonexistent/stokeslps.cfg"),
                  IoError);
}

TEST_CASE("io: export writes csv, svg, and vtk") {
  const auto dir = fresh_temp_dir("export");
  StudyConfig config = quick_config({2});
  config.output_dir = (dir / "nested" / "out").string();
  config.write_vtk = true;
  const ConvergenceTable table = run_study(config);
  const ExportPaths paths = export_outputs(table, config);
  REQUIRE(std::filesystem::exists(paths.csv));
  REQUIRE(std::filesystem::exists(paths.svg));
  REQUIRE(paths.vtk.has_value());
  REQUIRE(std::filesystem::exists(*paths.vtk));
  CHECK(read_text_file(paths.csv) == to_csv(table));
  CHECK(read_text_file(paths.svg) == to_svg(table));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: study runs are deterministic up to wall time") {
  const auto dir = fresh_temp_dir("cli");
  const std::string config_path = (dir / "study.cfg").string();
  write_text_file(config_path,
                  "pair = p1-zero\n"
                  "levels = 2,4\n"
                  "tol = 1e-9\n"
                  "postprocess = two-space\n");
  const std::string base = std::string(STOKESLPS_CLI_PATH) +
                           " study --config " + config_path +
                           " --output-dir ";
  const std::string out_a = (dir / "a").string();
  const std::string out_b = (dir / "b").string();
  REQUIRE(std::system((base + out_a + " > /dev/null 2>&1").c_str()) == 0);
  REQUIRE(std::system((base + out_b + " > /dev/null 2>&1").c_str()) == 0);
  const std::string csv_a = read_text_file(out_a + "/study.csv");
  const std::string csv_b = read_text_file(out_b + "/study.csv");
  CHECK(strip_last_column(csv_a) == strip_last_column(csv_b));

  // The CSV numbers equal an in-process run of the same configuration.
  StudyConfig config = study_config_from_map(read_config_file(config_path));
  const ConvergenceTable table = run_study(config);
  const auto cells = parse_csv(csv_a);
  REQUIRE(cells.size() == 3);
  CHECK(cells[2][4] == format_float(table.rows[1].lambda));
  CHECK(cells[2][7] == format_float(*table.rows[1].lambda_tilde));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: bad invocations fail with a diagnostic") {
  const std::string cli(STOKESLPS_CLI_PATH);
  CHECK(std::system(
            (cli + " study --config /nonexistent.cfg > /dev/null 2>&1")
                .c_str()) != 0);
  CHECK(std::system((cli + " eig --pair taylor-hood --n 2 > /dev/null 2>&1")
                        .c_str()) != 0);
}
