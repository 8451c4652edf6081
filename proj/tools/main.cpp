// SPDX-License-Identifier: Apache-2.0
//
// stokeslps-cli: equal-order LPS discretization of the Stokes eigenvalue
// problem on the unit square, with eigenvalue postprocessing.
//
// Subcommands:
//   study        convergence study over a sequence of meshes (CSV/SVG/VTK)
//   eig          eigenvalues on a single mesh
//   postprocess  one eigenpair plus its postprocessed improvement
//   infsup       discrete inf-sup constants over a sequence of meshes

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stokeslps/assembly.hpp"
#include "stokeslps/eigensolver.hpp"
#include "stokeslps/io.hpp"
#include "stokeslps/postprocess.hpp"
#include "stokeslps/study.hpp"

namespace {

using stokeslps::StudyConfig;

// Every tuning flag is applied as a config-map entry, so the CLI and the
// config file share one vocabulary and one parser; flags win over the file.
struct Override {
  std::string key;
  std::shared_ptr<std::string> value;
  CLI::Option* option = nullptr;
};

class OverrideSet {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& description) {
    Override entry;
    entry.key = key;
    entry.value = std::make_shared<std::string>();
    entry.option = app->add_option(flag, *entry.value, description);
    overrides_.push_back(std::move(entry));
  }

  void apply(std::map<std::string, std::string>& entries) const {
    for (const Override& entry : overrides_) {
      if (entry.option->count() > 0) entries[entry.key] = *entry.value;
    }
  }

 private:
  std::vector<Override> overrides_;
};

void add_discretization_flags(CLI::App* app, OverrideSet& overrides) {
  overrides.add(app, "--pair", "pair",
                "element pair: p1-zero | p2bubble-pdisc1");
  overrides.add(app, "--alpha0", "alpha0", "stabilization constant (> 0)");
  overrides.add(app, "--alpha-scaling", "alpha-scaling",
                "alpha_K scaling: h2 | constant");
}

void add_eigen_flags(CLI::App* app, OverrideSet& overrides) {
  overrides.add(app, "--count", "count", "number of eigenpairs");
  overrides.add(app, "--tol", "tol", "eigensolver residual tolerance");
  overrides.add(app, "--max-sweeps", "max-sweeps",
                "subspace iteration sweep limit");
}

std::string cell_or_dash(const std::optional<double>& value,
                         const char* format) {
  if (!value) return "-";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, *value);
  return buffer;
}

void print_table(const stokeslps::ConvergenceTable& table) {
  std::printf("%4s %12s %12s %14s %12s %7s %14s %12s %7s %10s\n", "n", "h",
              "dofs", "lambda", "error", "order", "lambda~", "error~",
              "order~", "S(p,p)");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const stokeslps::StudyRow& row = table.rows[i];
    std::optional<double> order_lambda;
    std::optional<double> order_tilde;
    if (i > 0 && i - 1 < table.lambda_orders.size()) {
      order_lambda = table.lambda_orders[i - 1];
    }
    if (i > 0 && i - 1 < table.lambda_tilde_orders.size()) {
      order_tilde = table.lambda_tilde_orders[i - 1];
    }
    std::printf("%4d %12.5e %12d %14.7f %12s %7s %14s %12s %7s %10.3e\n",
                row.n, row.h, row.velocity_dofs + row.pressure_dofs,
                row.lambda, cell_or_dash(row.lambda_error, "%.4e").c_str(),
                cell_or_dash(order_lambda, "%.2f").c_str(),
                cell_or_dash(row.lambda_tilde, "%.7f").c_str(),
                cell_or_dash(row.lambda_tilde_error, "%.4e").c_str(),
                cell_or_dash(order_tilde, "%.2f").c_str(), row.s_pp);
  }
  if (table.reference) {
    std::printf("reference eigenvalue: %.10f\n", *table.reference);
  } else {
    std::printf("reference eigenvalue: unresolved\n");
  }
}

StudyConfig config_from(const std::string& config_path,
                        const OverrideSet& overrides) {
  std::map<std::string, std::string> entries;
  if (!config_path.empty()) entries = stokeslps::read_config_file(config_path);
  overrides.apply(entries);
  return stokeslps::study_config_from_map(entries);
}

std::vector<int> parse_level_list(const std::string& text) {
  std::map<std::string, std::string> entries;
  entries["levels"] = text;
  return stokeslps::study_config_from_map(entries).levels;
}

int cmd_study(const std::string& config_path, const OverrideSet& overrides) {
  const StudyConfig config = config_from(config_path, overrides);
  stokeslps::ConvergenceTable table;
  try {
    table = stokeslps::run_study(config);
  } catch (const stokeslps::StudyError& error) {
    const stokeslps::ExportPaths paths =
        stokeslps::export_outputs(error.partial_table(), config);
    std::fprintf(stderr, "note: partial table flushed to %s\n",
                 paths.csv.c_str());
    throw;
  }
  print_table(table);
  const stokeslps::ExportPaths paths = stokeslps::export_outputs(table, config);
  std::printf("wrote %s\n", paths.csv.c_str());
  std::printf("wrote %s\n", paths.svg.c_str());
  if (paths.vtk) std::printf("wrote %s\n", paths.vtk->c_str());
  return 0;
}

int cmd_eig(int n, const std::string& config_path,
            const OverrideSet& overrides) {
  StudyConfig config = config_from(config_path, overrides);
  stokeslps::MeshPtr mesh = stokeslps::Mesh::unit_square(n);
  stokeslps::BlockSystem sys = stokeslps::assemble_blocks(
      mesh, stokeslps::element_of(config.pair),
      stokeslps::element_of(config.pair),
      stokeslps::projection_of(config.pair), config.alpha0, config.scaling);
  stokeslps::EigensolverOptions options;
  options.count = config.eigen_count;
  options.tol = config.tol;
  options.max_sweeps = config.max_sweeps;
  const std::vector<stokeslps::EigenPair> pairs =
      stokeslps::solve_smallest(sys, options);
  std::printf("n=%d pair=%s alpha0=%g scaling=%s\n", n,
              stokeslps::to_string(config.pair), config.alpha0,
              stokeslps::to_string(config.scaling));
  std::printf("velocity dofs %d, pressure dofs %d\n", sys.n_velocity_dofs(),
              sys.n_pressure_dofs());
  std::printf("%4s %20s %12s\n", "k", "lambda", "residual");
  for (const stokeslps::EigenPair& pair : pairs) {
    std::printf("%4d %20.12f %12.3e\n", pair.index + 1, pair.lambda,
                pair.residual);
  }
  const stokeslps::EigenPair& first = pairs.front();
  std::printf("S(p,p) of first pair: %.6e\n",
              stokeslps::form_eval(sys, stokeslps::Form::S, first.p, first.p));
  return 0;
}

int cmd_postprocess(int n, const std::string& mode_name,
                    const std::string& config_path,
                    const OverrideSet& overrides) {
  StudyConfig config = config_from(config_path, overrides);
  stokeslps::MeshPtr mesh = stokeslps::Mesh::unit_square(n);
  stokeslps::BlockSystem sys = stokeslps::assemble_blocks(
      mesh, stokeslps::element_of(config.pair),
      stokeslps::element_of(config.pair),
      stokeslps::projection_of(config.pair), config.alpha0, config.scaling);
  const std::vector<stokeslps::EigenPair> pairs =
      stokeslps::solve_smallest(sys, 1, config.tol, config.max_sweeps);
  const stokeslps::EigenPair& pair = pairs.front();

  stokeslps::PostprocessMode mode;
  if (mode_name == "two-space") {
    mode = stokeslps::TwoSpace{};
  } else if (mode_name == "two-grid") {
    stokeslps::TwoGrid two_grid;
    two_grid.extra_levels =
        config.twogrid_levels > 0
            ? config.twogrid_levels
            : stokeslps::twogrid_auto_levels(mesh->mesh_size(),
                                             config.twogrid_max_levels);
    mode = two_grid;
  } else {
    throw stokeslps::InvalidArgumentError("unknown postprocess mode '" +
                                          mode_name + "'");
  }
  const stokeslps::PostprocessedPair improved =
      stokeslps::postprocess_eigenpair(sys, pair, mode);

  const double reference = config.reference_mode == stokeslps::ReferenceMode::Value
                               ? config.reference_value
                               : stokeslps::kDefaultReferenceEigenvalue;
  std::printf("n=%d pair=%s mode=%s\n", n, stokeslps::to_string(config.pair),
              stokeslps::to_string(improved.mode).c_str());
  std::printf("lambda_h             = %.12f\n", pair.lambda);
  std::printf("S(p,p)               = %.6e\n",
              stokeslps::form_eval(sys, stokeslps::Form::S, pair.p, pair.p));
  std::printf("lambda~              = %.12f\n", improved.lambda_tilde);
  std::printf("reference            = %.10f\n", reference);
  std::printf("|lambda_h - ref|     = %.6e\n",
              std::abs(pair.lambda - reference));
  std::printf("|lambda~  - ref|     = %.6e\n",
              std::abs(improved.lambda_tilde - reference));
  std::printf("source-solve residual= %.3e\n", improved.source_residual);
  return 0;
}

int cmd_infsup(const std::string& levels_text, const std::string& config_path,
               const OverrideSet& overrides) {
  const StudyConfig config = config_from(config_path, overrides);
  const std::vector<int> levels = parse_level_list(levels_text);
  if (levels.empty()) {
    throw stokeslps::InvalidArgumentError("infsup needs at least one level");
  }
  std::printf("pair=%s alpha0=%g scaling=%s\n",
              stokeslps::to_string(config.pair), config.alpha0,
              stokeslps::to_string(config.scaling));
  std::printf("%4s %14s\n", "n", "beta_A");
  double beta_min = 0.0, beta_max = 0.0;
  bool first = true;
  for (int n : levels) {
    stokeslps::MeshPtr mesh = stokeslps::Mesh::unit_square(n);
    stokeslps::BlockSystem sys = stokeslps::assemble_blocks(
        mesh, stokeslps::element_of(config.pair),
        stokeslps::element_of(config.pair),
        stokeslps::projection_of(config.pair), config.alpha0, config.scaling);
    const double beta = stokeslps::infsup_global(sys);
    std::printf("%4d %14.8f\n", n, beta);
    if (first) {
      beta_min = beta_max = beta;
      first = false;
    } else {
      beta_min = std::min(beta_min, beta);
      beta_max = std::max(beta_max, beta);
    }
  }
  if (levels.size() > 1 && beta_max > 0.0) {
    std::printf("min/max ratio: %.6f\n", beta_min / beta_max);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Stokes eigenvalue problem on the unit square with equal-order "
      "local-projection-stabilized finite elements"};
  app.require_subcommand(1);

  // study
  CLI::App* study = app.add_subcommand(
      "study", "convergence study over a sequence of meshes");
  std::string study_config_path;
  study->add_option("--config", study_config_path, "key=value config file");
  OverrideSet study_overrides;
  add_discretization_flags(study, study_overrides);
  add_eigen_flags(study, study_overrides);
  study_overrides.add(study, "--levels", "levels",
                      "comma-separated mesh subdivisions, e.g. 8,16,32,64");
  study_overrides.add(study, "--postprocess", "postprocess",
                      "none | two-grid | two-space");
  study_overrides.add(study, "--twogrid-levels", "twogrid-levels",
                      "refinement depth for two-grid (auto | integer)");
  study_overrides.add(study, "--twogrid-max-levels", "twogrid-max-levels",
                      "cap on the automatic two-grid depth");
  study_overrides.add(study, "--reference", "reference",
                      "default | richardson | <number>");
  study_overrides.add(study, "--output-dir", "output-dir",
                      "directory for study.csv / errors.svg / solution.vtk");
  study_overrides.add(study, "--vtk", "vtk",
                      "write solution.vtk at the finest level (0|1)");

  // eig
  CLI::App* eig =
      app.add_subcommand("eig", "smallest eigenvalues on a single mesh");
  int eig_n = 16;
  eig->add_option("--n", eig_n, "mesh subdivisions per side");
  std::string eig_config_path;
  eig->add_option("--config", eig_config_path, "key=value config file");
  OverrideSet eig_overrides;
  add_discretization_flags(eig, eig_overrides);
  add_eigen_flags(eig, eig_overrides);

  // postprocess
  CLI::App* post = app.add_subcommand(
      "postprocess", "first eigenpair plus its postprocessed eigenvalue");
  int post_n = 16;
  post->add_option("--n", post_n, "mesh subdivisions per side");
  std::string post_mode = "two-grid";
  post->add_option("--mode", post_mode, "two-grid | two-space");
  std::string post_config_path;
  post->add_option("--config", post_config_path, "key=value config file");
  OverrideSet post_overrides;
  add_discretization_flags(post, post_overrides);
  add_eigen_flags(post, post_overrides);
  post_overrides.add(post, "--twogrid-levels", "twogrid-levels",
                     "refinement depth for two-grid (auto | integer)");
  post_overrides.add(post, "--twogrid-max-levels", "twogrid-max-levels",
                     "cap on the automatic two-grid depth");
  post_overrides.add(post, "--reference", "reference",
                     "default | <number> (for the error printout)");

  // infsup
  CLI::App* infsup = app.add_subcommand(
      "infsup", "discrete inf-sup constants over a sequence of meshes");
  std::string infsup_levels = "4,8,16";
  infsup->add_option("--levels", infsup_levels,
                     "comma-separated mesh subdivisions");
  std::string infsup_config_path;
  infsup->add_option("--config", infsup_config_path, "key=value config file");
  OverrideSet infsup_overrides;
  add_discretization_flags(infsup, infsup_overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    if (study->parsed()) return cmd_study(study_config_path, study_overrides);
    if (eig->parsed()) return cmd_eig(eig_n, eig_config_path, eig_overrides);
    if (post->parsed()) {
      return cmd_postprocess(post_n, post_mode, post_config_path,
                             post_overrides);
    }
    if (infsup->parsed()) {
      return cmd_infsup(infsup_levels, infsup_config_path, infsup_overrides);
    }
  } catch (const stokeslps::Error& error) {
    std::fprintf(stderr, "error: %s: %s\n", to_string(error.category()),
                 error.what());
    return 1;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: internal: %s\n", error.what());
    return 1;
  }
  return 0;
}
