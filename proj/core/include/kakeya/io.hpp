#pragma once

#include <string>
#include <vector>

#include "kakeya/partition.hpp"
#include "kakeya/tube.hpp"
#include "kakeya/variety.hpp"
#include "kakeya/wolff.hpp"

namespace kakeya {

// Tube family JSON: {"n": int, "delta": real, "tubes": [{"center": [...],
// "dir": [...]}]}. Doubles are printed shortest-round-trip, so write/read is
// bit exact. Readers run the family validator and reject non-unit directions.
std::string family_to_json(const TubeFamily& f);
TubeFamily family_from_json(const std::string& text);
void write_family(const std::string& path, const TubeFamily& f);
TubeFamily read_family(const std::string& path);

// Construction recipe for a variety; what the JSON format stores.
// kinds: "hyperplane" (normal, offset), "affine" (base, dirs),
// "sphere" (center, radius), "quadric" (n, coeffs).
struct VarietySpec {
  std::string kind;
  int n = 2;
  Vec normal, base, center;
  std::vector<Vec> dirs;
  double offset = 0, radius = 1;
  std::vector<double> coeffs;

  Variety build() const;
};

std::string variety_to_json(const VarietySpec& spec);
VarietySpec variety_from_json(const std::string& text);
void write_variety(const std::string& path, const VarietySpec& spec);
VarietySpec read_variety(const std::string& path);

// Measure JSON: {"atoms": [{"point": [...], "mass": m, "radius": r}]}.
std::string measure_to_json(const Measure& m);
Measure measure_from_json(const std::string& text);
void write_measure(const std::string& path, const Measure& m);
Measure read_measure(const std::string& path);

// Oriented boxes: [{"center": [...], "axes": [[...], ...], "half": [...]}].
std::string boxes_to_json(const std::vector<OrientedBox>& boxes);
std::vector<OrientedBox> boxes_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace kakeya
