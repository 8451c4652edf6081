// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/study.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "stokeslps/assembly.hpp"
#include "stokeslps/eigensolver.hpp"
#include "stokeslps/errors.hpp"

namespace stokeslps {

const char* to_string(ElementPair pair) {
  switch (pair) {
    case ElementPair::P1Zero:
      return "p1-zero";
    case ElementPair::P2BubblePDisc1:
      return "p2bubble-pdisc1";
  }
  return "?";
}

ElementKind element_of(ElementPair pair) {
  return pair == ElementPair::P1Zero ? ElementKind::P1
                                     : ElementKind::P2Bubble;
}

ProjectionKind projection_of(ElementPair pair) {
  return pair == ElementPair::P1Zero ? ProjectionKind::zero()
                                     : ProjectionKind::pdisc(1);
}

const char* to_string(PostprocessChoice choice) {
  switch (choice) {
    case PostprocessChoice::None:
      return "none";
    case PostprocessChoice::TwoGrid:
      return "two-grid";
    case PostprocessChoice::TwoSpace:
      return "two-space";
  }
  return "?";
}

StudyError::StudyError(ErrorCategory category, const std::string& what,
                       ConvergenceTable partial, int failed_level)
    : Error(category, what),
      partial_(std::move(partial)),
      failed_level_(failed_level) {}

namespace {

void validate_config(const StudyConfig& config) {
  if (config.levels.empty()) {
    throw InvalidArgumentError("study needs at least one mesh level");
  }
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    if (config.levels[i] < 1) {
      throw InvalidArgumentError("mesh levels must be positive");
    }
    if (i > 0 && config.levels[i] <= config.levels[i - 1]) {
      throw InvalidArgumentError("mesh levels must be strictly increasing");
    }
  }
  if (config.alpha0 <= 0.0) {
    throw InvalidArgumentError("alpha0 must be positive");
  }
  if (config.eigen_count < 1) {
    throw InvalidArgumentError("eigen_count must be at least 1");
  }
  if (config.tol <= 0.0) {
    throw InvalidArgumentError("tol must be positive");
  }
  if (config.max_sweeps < 1) {
    throw InvalidArgumentError("max_sweeps must be at least 1");
  }
  if (config.twogrid_levels < 0) {
    throw InvalidArgumentError("twogrid_levels must be nonnegative");
  }
  if (config.twogrid_max_levels < 1) {
    throw InvalidArgumentError("twogrid_max_levels must be at least 1");
  }
}

std::optional<double> resolve_reference(const StudyConfig& config,
                                        const std::vector<StudyRow>& rows) {
  switch (config.reference_mode) {
    case ReferenceMode::Default:
      return kDefaultReferenceEigenvalue;
    case ReferenceMode::Value:
      return config.reference_value;
    case ReferenceMode::Richardson: {
      if (rows.size() < 2) return std::nullopt;
      const double coarse = rows[rows.size() - 2].lambda;
      const double fine = rows[rows.size() - 1].lambda;
      return (4.0 * fine - coarse) / 3.0;
    }
  }
  return std::nullopt;
}

void finalize_table(ConvergenceTable& table) {
  table.reference = resolve_reference(table.config, table.rows);
  for (StudyRow& row : table.rows) {
    if (table.reference) {
      row.lambda_error = std::abs(row.lambda - *table.reference);
      if (row.lambda_tilde) {
        row.lambda_tilde_error = std::abs(*row.lambda_tilde - *table.reference);
      }
    } else {
      row.lambda_error.reset();
      row.lambda_tilde_error.reset();
    }
  }
  table.lambda_orders.clear();
  table.lambda_tilde_orders.clear();
  if (table.rows.size() >= 2) {
    OrderEstimates orders = observed_orders(table);
    table.lambda_orders = std::move(orders.lambda_orders);
    table.lambda_tilde_orders = std::move(orders.lambda_tilde_orders);
  }
}

}  // namespace

OrderEstimates observed_orders(const ConvergenceTable& table) {
  if (table.rows.size() < 2) {
    throw InvalidArgumentError(
        "order estimation needs at least two table rows");
  }
  constexpr double kFloor = 1e-13;
  auto order_between = [](std::optional<double> coarse,
                          std::optional<double> fine, double h_coarse,
                          double h_fine) -> std::optional<double> {
    if (!coarse || !fine) return std::nullopt;
    if (*coarse < kFloor || *fine < kFloor) return std::nullopt;
    return std::log(*coarse / *fine) / std::log(h_coarse / h_fine);
  };
  OrderEstimates estimates;
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    const StudyRow& a = table.rows[i];
    const StudyRow& b = table.rows[i + 1];
    estimates.lambda_orders.push_back(
        order_between(a.lambda_error, b.lambda_error, a.h, b.h));
    estimates.lambda_tilde_orders.push_back(order_between(
        a.lambda_tilde_error, b.lambda_tilde_error, a.h, b.h));
  }
  return estimates;
}

ConvergenceTable run_study(const StudyConfig& config) {
  validate_config(config);
  ConvergenceTable table;
  table.config = config;
  const ElementKind element = element_of(config.pair);
  const ProjectionKind projection = projection_of(config.pair);

  for (int n : config.levels) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      MeshPtr mesh = Mesh::unit_square(n);
      BlockSystem sys = assemble_blocks(mesh, element, element, projection,
                                        config.alpha0, config.scaling);
      EigensolverOptions options;
      options.count = config.eigen_count;
      options.tol = config.tol;
      options.max_sweeps = config.max_sweeps;
      std::vector<EigenPair> pairs = solve_smallest(sys, options);
      const EigenPair& first = pairs.front();

      StudyRow row;
      row.n = n;
      row.h = mesh->mesh_size();
      row.velocity_dofs = sys.n_velocity_dofs();
      row.pressure_dofs = sys.n_pressure_dofs();
      row.lambda = first.lambda;
      row.s_pp = form_eval(sys, Form::S, first.p, first.p);
      row.residual = first.residual;

      if (config.post != PostprocessChoice::None) {
        PostprocessMode mode;
        if (config.post == PostprocessChoice::TwoSpace) {
          mode = TwoSpace{};
        } else {
          TwoGrid two_grid;
          two_grid.extra_levels =
              config.twogrid_levels > 0
                  ? config.twogrid_levels
                  : twogrid_auto_levels(row.h, config.twogrid_max_levels);
          mode = two_grid;
        }
        PostprocessedPair improved = postprocess_eigenpair(sys, first, mode);
        row.lambda_tilde = improved.lambda_tilde;
      }

      const auto t1 = std::chrono::steady_clock::now();
      row.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
      table.rows.push_back(std::move(row));
      table.finest_pair = first;
    } catch (const Error& error) {
      finalize_table(table);
      throw StudyError(error.category(),
                       "level n=" + std::to_string(n) + ": " + error.what(),
                       std::move(table), n);
    }
  }
  finalize_table(table);
  return table;
}

}  // namespace stokeslps
