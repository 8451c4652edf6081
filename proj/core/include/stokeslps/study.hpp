// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stokeslps/errors.hpp"
#include "stokeslps/postprocess.hpp"

namespace stokeslps {

/// First Stokes eigenvalue of the unit square (reference value used when no
/// user-supplied or extrapolated reference is requested).
inline constexpr double kDefaultReferenceEigenvalue = 52.3446911;

/// The two supported equal-order discretizations.
enum class ElementPair { P1Zero, P2BubblePDisc1 };

const char* to_string(ElementPair pair);
ElementKind element_of(ElementPair pair);
ProjectionKind projection_of(ElementPair pair);

enum class PostprocessChoice { None, TwoGrid, TwoSpace };
const char* to_string(PostprocessChoice choice);

/// How eigenvalue errors are measured: against the built-in unit-square
/// reference, a user value, or a Richardson extrapolation (order 2) of the
/// two finest computed levels, lambda_ref = (4 lambda_L - lambda_{L-1}) / 3.
enum class ReferenceMode { Default, Value, Richardson };

struct StudyConfig {
  ElementPair pair = ElementPair::P1Zero;
  double alpha0 = 0.1;
  AlphaScaling scaling = AlphaScaling::HSquared;
  std::vector<int> levels;  ///< strictly increasing subdivision counts
  int eigen_count = 1;
  double tol = 1e-10;
  int max_sweeps = 200;
  PostprocessChoice post = PostprocessChoice::None;
  int twogrid_levels = 0;  ///< 0 = auto: smallest depth with h~ <= h^2
  int twogrid_max_levels = 4;
  ReferenceMode reference_mode = ReferenceMode::Default;
  double reference_value = kDefaultReferenceEigenvalue;
  std::string output_dir = "out";
  bool write_vtk = false;
};

struct StudyRow {
  int n = 0;
  double h = 0.0;
  int velocity_dofs = 0;
  int pressure_dofs = 0;
  double lambda = 0.0;
  std::optional<double> lambda_error;
  std::optional<double> lambda_tilde;
  std::optional<double> lambda_tilde_error;
  double s_pp = 0.0;       ///< stabilization energy S(p_h, p_h)
  double residual = 0.0;   ///< eigensolver residual of the first pair
  double wall_seconds = 0.0;
};

struct ConvergenceTable {
  StudyConfig config;
  std::optional<double> reference;  ///< resolved reference eigenvalue
  std::vector<StudyRow> rows;
  /// Observed orders between consecutive rows (size rows-1 when computed;
  /// an entry is empty when either error is missing or below 1e-13).
  std::vector<std::optional<double>> lambda_orders;
  std::vector<std::optional<double>> lambda_tilde_orders;
  /// First eigenpair at the finest completed level (for VTK export).
  std::optional<EigenPair> finest_pair;
};

struct OrderEstimates {
  std::vector<std::optional<double>> lambda_orders;
  std::vector<std::optional<double>> lambda_tilde_orders;
};

/// p_i = ln(e_i / e_{i+1}) / ln(h_i / h_{i+1}) per error column. Throws
/// InvalidArgumentError for tables with fewer than 2 rows.
OrderEstimates observed_orders(const ConvergenceTable& table);

/// Raised when a level fails mid-study; carries the completed rows so the
/// caller can flush a partial table. The category mirrors the causing error.
class StudyError : public Error {
 public:
  StudyError(ErrorCategory category, const std::string& what,
             ConvergenceTable partial, int failed_level);
  const ConvergenceTable& partial_table() const { return partial_; }
  int failed_level() const { return failed_level_; }

 private:
  ConvergenceTable partial_;
  int failed_level_;
};

/// Runs the full pipeline per level (assemble, eigensolve, optional
/// postprocess), resolves the reference, and fills errors and orders.
/// Deterministic: identical configs produce identical tables except for
/// wall_seconds.
ConvergenceTable run_study(const StudyConfig& config);

}  // namespace stokeslps
