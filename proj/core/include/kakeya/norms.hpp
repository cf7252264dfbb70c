#pragma once

#include <cstdint>
#include <vector>

#include "kakeya/tube.hpp"

namespace kakeya {

// Cover of a box by delta-balls centered on the absolute grid of spacing
// h = 2*delta/sqrt(n). Each ball's quadrature domain is its Voronoi tile (the
// axis cube of side h inscribed in the ball), so the tiles partition the
// snapped box exactly: per-ball masses add up to the global integral with no
// overlap bookkeeping, which makes the norm inequalities hold at grid level
// instead of up to a covering constant. As balls, the cover overlaps with
// multiplicity 2^n at tile corners.
struct BallCover {
  int n = 0;
  double delta = 0;
  double h = 0;
  std::vector<Vec> centers;
  Box bounds;  // union of the tiles; contains the requested region

  Box tile(size_t i) const;
};

BallCover make_ball_cover(const Box& region, int n, double delta);

// Tight axis box around the family: tube end caps inflated by delta + margin.
Box family_bounding_box(const TubeFamily& f, double margin = 0.0);

struct BroadParams {
  int k = 2;       // broadness parameter; candidate subspaces are (k-1)-dim
  int A = 1;       // number of subspaces a single evaluation may discard
  double p = 2.0;  // Lebesgue exponent
  double beta = 0.25;  // cap diameter
  std::vector<Subspace> candidates;  // empty = spans of cap-center subsets
};

struct NormResult {
  double value = 0;
  double resolution = 0;
  std::size_t n_balls = 0;
  std::vector<double> per_ball_mu;  // parallel to the cover, when requested
};

// Midpoint-grid L^p norm of sum_T chi_T over the region, on the same absolute
// tile grid the ball cover uses. Resolution must be <= delta/4.
double lp_norm(const TubeFamily& f, double p, const Region& region, double resolution);

// The per-ball quantity: min over A-tuples of candidate subspaces of the max,
// over caps at angle > beta from every chosen subspace, of that cap's p-th
// power L^p mass on B. Caps are excluded using the cap-infimum angle
// max(0, angle(omega, V) - beta/2), and an excluded-everything tuple gives 0.
double mu(const TubeFamily& f, const CapDecomposition& caps, const Ball& B,
          const BroadParams& params, double resolution);

// Broad norm over U: ( sum_B weight_B * mu(B) )^{1/p} with weight_B the
// fraction of B's tile quadrature points lying in U. An explicit cap
// decomposition may be supplied so several families can be compared against a
// common decomposition (the triangle-inequality tests need this); by default
// the family's own greedy decomposition at params.beta is used.
NormResult broad_norm(const TubeFamily& f, const Region& U, const BroadParams& params,
                      double resolution, bool keep_per_ball = false,
                      const CapDecomposition* caps_override = nullptr);

// Right side of the broad-vs-multilinear comparison: over all beta^{k-1}/2
// transversal k-tuples of caps, the L^p mass of the geometric mean of the
// 2delta-inflated cap sums, p-th powers added over tuples.
double klinear_rhs(const TubeFamily& f, const CapDecomposition& caps, int k, double p,
                   double resolution);

// Candidate subspaces: spans of (k-1)-subsets of cap centers, optionally a
// seeded quasi-uniform net of the Grassmannian, plus caller extras.
std::vector<Subspace> candidate_subspaces(const CapDecomposition& caps, int k, int n,
                                          int net_size = 0, std::uint64_t seed = 1,
                                          const std::vector<Subspace>& extra = {});

}  // namespace kakeya
