#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "kakeya/geometry.hpp"

namespace kakeya {

// Closed delta-tube: points center + t*dir + w with |t| <= 1/2, w orthogonal
// to dir, |w| <= radius. Unit height by convention; dir is unit length with
// antipodal directions identified throughout.
struct Tube {
  Vec center;
  Vec dir;            // unit, |1 - |dir|| <= 1e-12 enforced by constructors/readers
  double radius = 0;  // the delta of the family
};

struct TubeFamily {
  int n = 0;          // ambient dimension, 2 or 3
  double delta = 0;   // common tube radius
  std::vector<Tube> tubes;
};

// Exact volume of one tube: v_{n-1} * delta^{n-1} * height(=1).
double tube_volume(int n, double delta);

// Membership, optionally for the inflated tube (axial and radial margins both
// grown by `inflate`; the box-inflated neighborhood used by the k-linear
// functional).
bool tube_contains(const Tube& t, const Vec& x, double inflate = 0.0);

// Point on the core line at parameter t in [-1/2, 1/2].
Vec tube_axis_point(const Tube& t, double s);

// Validation used by constructors, readers, and generators: dimensions
// consistent, directions unit to 1e-12, radius equal to the family delta.
void validate_family(const TubeFamily& f);

// Pairwise angular separation >= delta between tube directions (lines, so
// antipodal identification applies). Singletons are trivially separated.
bool direction_separated(const TubeFamily& f);

// Spherical cap of directions: center plus the member tubes assigned to it.
struct Cap {
  Vec omega;                 // cap center, unit
  std::vector<int> members;  // indices into the family
};

struct CapDecomposition {
  double beta = 0;
  std::vector<Cap> caps;
};

// Greedy beta-net on the projective sphere: walk the tube directions, open a
// new cap when a direction is farther than beta from every existing center,
// then assign every tube to its nearest center. Every direction lies within
// beta of its cap center; centers are pairwise > beta apart.
CapDecomposition cap_decompose(const TubeFamily& f, double beta);

// The cap-straightening map L: identity on span(omega), dilation by 1/beta on
// the orthogonal complement, together with the covering family it produces.
struct CapRescaling {
  Vec omega;
  double beta = 0;
  TubeFamily family;                          // radius delta/beta tubes
  std::vector<std::pair<int, int>> spans;     // per input tube: [begin, end) in family.tubes
  Vec apply(const Vec& x) const;              // the linear map L
};

// Rescale the tubes of one cap: every image L(T) is covered by at most a
// dimensional constant count of delta/beta-tubes (returned via spans).
// Throws if some listed tube's direction lies outside the cap.
CapRescaling rescale_cap(const TubeFamily& f, const Cap& cap, double beta);

// Spatial hash over coarse cells: which tubes can touch a query point. Built
// once per family, shared by every quadrature loop.
class TubeIndex {
 public:
  TubeIndex(const TubeFamily& f, double margin);

  // Indices of tubes whose margin-inflated bodies may contain x.
  const std::vector<int>& candidates(const Vec& x) const;

  double cell_size() const { return h_; }

 private:
  int n_;
  double h_ = 0;
  Vec origin_;
  std::array<long, 3> dims_{};
  std::vector<std::vector<int>> cells_;
  std::vector<int> empty_;
  long cell_of(const Vec& x) const;  // -1 when outside the indexed range
};

}  // namespace kakeya
