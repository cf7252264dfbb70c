#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kakeya/tube.hpp"
#include "kakeya/variety.hpp"

namespace kakeya {

// Seeded constructors for the tube configurations the experiments need. Every
// build re-checks its own contract (separation, tangency, transversality) and
// throws rather than returning a family that silently violates it.
enum class FamilyKind {
  Bush,               // common point, maximal delta-separated directions
  RandomSeparated,    // delta-separated directions, random translations
  ParallelSlab,       // identical directions: the negative control
  TangentToVariety,   // every tube passes the tangency certificate
  TwoCapTransversal,  // two groups with orthogonal mean directions
};

std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

struct GeneratorSpec {
  FamilyKind kind = FamilyKind::Bush;
  int n = 2;
  double delta = 0.05;
  int count = 0;  // 0 = kind-dependent default / maximal
  std::uint64_t seed = 1;
  // TangentToVariety target: "line" or "circle" (n = 2), "plane" or "sphere"
  // (n = 3). Tangency is certified inside tangency_ball(spec).
  std::string variety;
  double ball_radius = 0;  // 0 = delta^{0.9}
};

// Maximal delta-separated direction set on the projective sphere: exact
// angular arithmetic in the plane, Fibonacci lattice plus greedy thinning in
// space. Seed only rotates/shuffles; separation is guaranteed.
std::vector<Vec> separated_directions(int n, double delta, std::uint64_t seed);

TubeFamily generate(const GeneratorSpec& spec);

// The catalog variety and certificate ball used by TangentToVariety, exposed
// so callers can re-run the same tangency and vanishing checks.
Variety tangent_target(const GeneratorSpec& spec);
Ball tangency_ball(const GeneratorSpec& spec);

}  // namespace kakeya
