#include "kakeya/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kakeya {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  if (!a.is_array() || (a.size() != 2 && a.size() != 3))
    throw std::invalid_argument("io: coordinate arrays must have 2 or 3 entries");
  Vec v(static_cast<int>(a.size()));
  for (int i = 0; i < v.dim(); ++i) v[i] = a[static_cast<size_t>(i)].get<double>();
  return v;
}

}  // namespace

std::string family_to_json(const TubeFamily& f) {
  json j;
  j["n"] = f.n;
  j["delta"] = f.delta;
  json tubes = json::array();
  for (const Tube& t : f.tubes) {
    json jt;
    jt["center"] = vec_to_json(t.center);
    jt["dir"] = vec_to_json(t.dir);
    tubes.push_back(std::move(jt));
  }
  j["tubes"] = std::move(tubes);
  return j.dump(2);
}

TubeFamily family_from_json(const std::string& text) {
  const json j = json::parse(text);
  TubeFamily f;
  f.n = j.at("n").get<int>();
  f.delta = j.at("delta").get<double>();
  for (const json& jt : j.at("tubes")) {
    Tube t;
    t.center = vec_from_json(jt.at("center"));
    t.dir = vec_from_json(jt.at("dir"));
    t.radius = f.delta;
    f.tubes.push_back(std::move(t));
  }
  validate_family(f);
  return f;
}

void write_family(const std::string& path, const TubeFamily& f) {
  write_text_file(path, family_to_json(f));
}

TubeFamily read_family(const std::string& path) { return family_from_json(read_text_file(path)); }

Variety VarietySpec::build() const {
  if (kind == "hyperplane") return Variety::hyperplane(normal, offset);
  if (kind == "affine") return Variety::affine_subspace(base, dirs);
  if (kind == "sphere") return Variety::sphere(center, radius);
  if (kind == "quadric") return Variety::quadric_graph(n, coeffs);
  throw std::invalid_argument("io: unknown variety kind '" + kind + "'");
}

std::string variety_to_json(const VarietySpec& spec) {
  json j;
  j["kind"] = spec.kind;
  if (spec.kind == "hyperplane") {
    j["normal"] = vec_to_json(spec.normal);
    j["offset"] = spec.offset;
  } else if (spec.kind == "affine") {
    j["base"] = vec_to_json(spec.base);
    json dirs = json::array();
    for (const Vec& d : spec.dirs) dirs.push_back(vec_to_json(d));
    j["dirs"] = std::move(dirs);
  } else if (spec.kind == "sphere") {
    j["center"] = vec_to_json(spec.center);
    j["radius"] = spec.radius;
  } else if (spec.kind == "quadric") {
    j["n"] = spec.n;
    j["coeffs"] = spec.coeffs;
  } else {
    throw std::invalid_argument("io: unknown variety kind '" + spec.kind + "'");
  }
  return j.dump(2);
}

VarietySpec variety_from_json(const std::string& text) {
  const json j = json::parse(text);
  VarietySpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "hyperplane") {
    spec.normal = vec_from_json(j.at("normal"));
    spec.offset = j.at("offset").get<double>();
    spec.n = spec.normal.dim();
  } else if (spec.kind == "affine") {
    spec.base = vec_from_json(j.at("base"));
    for (const json& d : j.at("dirs")) spec.dirs.push_back(vec_from_json(d));
    spec.n = spec.base.dim();
  } else if (spec.kind == "sphere") {
    spec.center = vec_from_json(j.at("center"));
    spec.radius = j.at("radius").get<double>();
    spec.n = spec.center.dim();
  } else if (spec.kind == "quadric") {
    spec.n = j.at("n").get<int>();
    spec.coeffs = j.at("coeffs").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("io: unknown variety kind '" + spec.kind + "'");
  }
  spec.build();  // surface construction errors at read time
  return spec;
}

void write_variety(const std::string& path, const VarietySpec& spec) {
  write_text_file(path, variety_to_json(spec));
}

VarietySpec read_variety(const std::string& path) {
  return variety_from_json(read_text_file(path));
}

std::string measure_to_json(const Measure& m) {
  json atoms = json::array();
  for (const MeasureAtom& a : m.atoms) {
    json ja;
    ja["point"] = vec_to_json(a.point);
    ja["mass"] = a.mass;
    ja["radius"] = a.radius;
    atoms.push_back(std::move(ja));
  }
  json j;
  j["atoms"] = std::move(atoms);
  return j.dump(2);
}

Measure measure_from_json(const std::string& text) {
  const json j = json::parse(text);
  Measure m;
  for (const json& ja : j.at("atoms")) {
    MeasureAtom a;
    a.point = vec_from_json(ja.at("point"));
    a.mass = ja.at("mass").get<double>();
    a.radius = ja.value("radius", 0.0);
    if (!(a.mass > 0)) throw std::invalid_argument("io: atom masses must be positive");
    m.atoms.push_back(std::move(a));
  }
  return m;
}

void write_measure(const std::string& path, const Measure& m) {
  write_text_file(path, measure_to_json(m));
}

Measure read_measure(const std::string& path) { return measure_from_json(read_text_file(path)); }

std::string boxes_to_json(const std::vector<OrientedBox>& boxes) {
  json arr = json::array();
  for (const OrientedBox& b : boxes) {
    json jb;
    jb["center"] = vec_to_json(b.center);
    json axes = json::array();
    for (const Vec& a : b.axes) axes.push_back(vec_to_json(a));
    jb["axes"] = std::move(axes);
    jb["half"] = b.half;
    arr.push_back(std::move(jb));
  }
  return arr.dump(2);
}

std::vector<OrientedBox> boxes_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<OrientedBox> boxes;
  for (const json& jb : j) {
    OrientedBox b;
    b.center = vec_from_json(jb.at("center"));
    for (const json& a : jb.at("axes")) b.axes.push_back(vec_from_json(a));
    b.half = jb.at("half").get<std::vector<double>>();
    if (b.axes.size() != b.half.size())
      throw std::invalid_argument("io: box axes and half extents must pair up");
    boxes.push_back(std::move(b));
  }
  return boxes;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("io: short write to '" + path + "'");
}

}  // namespace kakeya
