// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>

#include "stokeslps/eigensolver.hpp"

namespace stokeslps {

/// Enrichment choice for the postprocessing step: solve the auxiliary source
/// problem on a uniformly refined mesh with the same elements (two-grid) or
/// on the same mesh with the bubble-enriched pair (two-space).
struct TwoGrid {
  int extra_levels = 1;
};
struct TwoSpace {};

using PostprocessMode = std::variant<TwoGrid, TwoSpace>;

std::string to_string(const PostprocessMode& mode);

/// Smallest refinement depth l >= 1 such that h / 2^l <= h^2 (the enriched
/// mesh size tracks h^2). Throws InvalidArgumentError when the required
/// depth exceeds max_levels.
int twogrid_auto_levels(double h, int max_levels);

struct PostprocessedPair {
  double lambda_tilde = 0.0;
  FeFunction u_tilde;  ///< enriched-space velocity
  FeFunction p_tilde;  ///< enriched-space pressure, zero mean
  PostprocessMode mode;
  double source_residual = 0.0;  ///< relative residual of the source solve
  std::shared_ptr<const BlockSystem> enriched_system;
};

/// Solves the auxiliary Stokes source problem on the enriched system with
/// velocity right-hand side lambda_h * r(u_h, .) and zero-mean pressure.
/// The coarse pair's mesh must be the enriched mesh or one of its ancestors.
std::pair<FeFunction, FeFunction> solve_source_enriched(
    const BlockSystem& enriched_sys, const EigenPair& pair,
    double* source_residual = nullptr);

/// The postprocessing algorithm: build the enriched system from the coarse
/// one per `mode`, solve the source problem, and return the improved
/// eigenvalue lambda~ = a(u~,u~) / r(u~,u~). Two-space enrichment requires
/// the coarse pair P1 with the zero projection space (it enriches to
/// P2Bubble with discontinuous-P1 projection on the same mesh).
PostprocessedPair postprocess_eigenpair(const BlockSystem& coarse_sys,
                                        const EigenPair& pair,
                                        const PostprocessMode& mode);

/// Both sides of the discrete Rayleigh-quotient expansion around an
/// eigenpair (lambda, u, p), for a trial velocity w (zero on the boundary)
/// and trial pressure psi in the same space:
///   lhs = a(w,w)/r(w,w) - lambda
///   rhs = [ a(e,e) - lambda r(e,e) + 2 b(e, p - psi) - S(p-psi, p-psi)
///           - S(psi,psi) + 2 (b(w,psi) + S(psi,psi)) ] / r(w,w),  e = w - u.
/// The identity is exact algebra whenever (lambda, u, p) solves the discrete
/// problem; `defect` = lhs - rhs measures how well it holds.
struct ExpansionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect = 0.0;
  double lambda_hat = 0.0;  ///< a(w,w)/r(w,w)
};

ExpansionCheck expansion_check(const BlockSystem& sys, const EigenPair& pair,
                               const FeFunction& w, const FeFunction& psi);

}  // namespace stokeslps
