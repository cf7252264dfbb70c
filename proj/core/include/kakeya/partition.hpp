#pragma once

#include <cstdint>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/polynomial.hpp"
#include "kakeya/tube.hpp"

namespace kakeya {

// Finitely supported mass distribution in the plane. The radius is carried
// for reporting; partitioning treats atoms as points at their centers.
struct MeasureAtom {
  Vec point;
  double mass = 1;
  double radius = 0;
};

struct Measure {
  std::vector<MeasureAtom> atoms;
  double total_mass() const;
  Box bounding_box(double margin) const;
};

// One polynomial whose zero set simultaneously bisects every listed measure:
// neither strict-sign side holds more than (1/2 + tol) of the mass (atoms on
// the zero set sit on the cut and count to neither side, so a polynomial
// vanishing on a measure's support bisects it degenerately). Found by
// annealed smoothed-sign descent over the unit sphere of coefficient vectors
// of total degree <= degree_budget, then audited by exact atom counts.
// Throws when the coefficient space cannot accommodate the measure count
// ((budget+1)(budget+2)/2 - 1 independent coefficients) or when no audited
// bisector appears within the restart allowance.
struct HamSandwichResult {
  BiPoly poly;
  int degree_budget = 0;
  double max_imbalance = 0;  // worst one-sided excess over 1/2 across measures
  int restarts_used = 0;
};

HamSandwichResult ham_sandwich_lifted(const std::vector<Measure>& measures, int degree_budget,
                                      std::uint64_t seed = 1, double tol = 0.02);

// Connected component of the complement of the zero set, delta-resolved.
struct CellInfo {
  int id = -1;
  double mass = 0;      // atom mass assigned to this component
  long pixel_count = 0; // grid points in the component
  Box bbox;
};

struct Partition {
  BiPoly poly;           // product of the per-round bisectors
  int degree = 0;        // its total degree
  int d = 0;             // requested partition parameter
  int rounds = 0;
  double delta = 0;
  Box domain;
  double grid_res = 0;
  std::vector<CellInfo> cells;
  std::vector<int> atom_cell;  // per atom: component id, or -1 when within delta of the zero set
  double near_zero_mass = 0;   // mass of the -1 atoms
  double assigned_mass = 0;    // mass inside components (near_zero + assigned = total)
};

// Repeated halving: ceil(2*log2 d) rounds; round r bisects every current
// cluster that still has two atoms at distinct points, using one polynomial
// of the minimal degree whose coefficient count covers 1.5x the cluster
// count (the slack conditions the numerical search; round degrees still sum
// to at most 4d). The returned polynomial is the exact product of the
// rounds; components are flood-filled at resolution delta/4 after removing
// grid points whose sign is not stable within distance delta.
Partition partition_measure(const Measure& f, int d, double delta, std::uint64_t seed = 1);

// How many components the tube's core line can meet: observed sign runs of a
// dense exact-rational sample, the count of distinct roots of the restriction
// to the line in the open parameter interval (Sturm), and the certificate
// observed <= distinct_roots + 1 <= degree_bound.
struct CrossingCertificate {
  long observed = 0;
  long distinct_roots = 0;
  long certified = 0;     // distinct_roots + 1, or 0 when the line lies in the zero set
  long degree_bound = 0;  // degree of the restriction + 1 (0 for a vanished restriction)
  bool line_in_zero_set = false;
};

CrossingCertificate cells_entered(const Tube& t, const BiPoly& poly, int samples = 512);

enum class DichotomyBranch { Cellular, Algebraic };

struct DichotomyResult {
  DichotomyBranch branch = DichotomyBranch::Algebraic;
  std::vector<int> retained_cells;  // cellular: the winning dyadic mass class of components
  double retained_mass = 0;  // mass in those cells (cellular) or near the zero set (algebraic)
  double class_low = 0;      // lower edge of the winning dyadic class [low, 2*low)
};

// Cellular when some dyadic class of component masses has at least
// max(2, d^2/4) members carrying at least half of the component-assigned
// mass (every member is automatically within [1/2, 2] of the class average);
// otherwise algebraic, with the near-zero-set mass as the witness.
DichotomyResult classify_dichotomy(const Measure& f, const Partition& part);

}  // namespace kakeya
