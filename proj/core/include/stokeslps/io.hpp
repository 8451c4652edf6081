// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stokeslps/assembly.hpp"
#include "stokeslps/study.hpp"

namespace stokeslps {

/// Formats with 17 significant digits ("%.16e"): doubles round-trip exactly.
std::string format_float(double value);

/// CSV with header
/// n,h,velocity_dofs,pressure_dofs,lambda,lambda_error,order_lambda,
/// lambda_tilde,lambda_tilde_error,order_lambda_tilde,s_pp,residual,
/// wall_seconds. Missing values are empty cells; the order cell on row i
/// compares rows i-1 and i.
std::string to_csv(const ConvergenceTable& table);

/// Splits CSV text into rows of cells (no quoting; cells never contain
/// commas in files we write).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Log-log SVG error plot: one polyline per error column plus dashed
/// reference-slope guides.
std::string to_svg(const ConvergenceTable& table);

/// Legacy ASCII VTK unstructured grid of the mesh alone, or with vertex
/// velocity vectors and pressure values attached as point data.
std::string to_vtk(const Mesh& mesh);
std::string to_vtk(const Mesh& mesh, const FeFunction& velocity,
                   const FeFunction& pressure);

/// Matrix Market "coordinate real general" text (1-based indices).
std::string to_matrix_market(const SparseMatrix& matrix);

/// Parses "key = value" lines; '#' starts a comment, blank lines are
/// skipped. Malformed lines raise InvalidArgumentError with a line number.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Reads and parses a config file; filesystem problems raise IoError.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Builds a StudyConfig from string key/value pairs (the config-file and
/// CLI-override vocabulary). Unknown keys or unparsable values raise
/// InvalidArgumentError.
StudyConfig study_config_from_map(
    const std::map<std::string, std::string>& entries);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

struct ExportPaths {
  std::string csv;
  std::string svg;
  std::optional<std::string> vtk;
};

/// Writes study.csv, errors.svg, and optionally solution.vtk into
/// config.output_dir (created if needed). Returns the paths written.
ExportPaths export_outputs(const ConvergenceTable& table,
                           const StudyConfig& config);

}  // namespace stokeslps
