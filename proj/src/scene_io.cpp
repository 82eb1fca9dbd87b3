#include "night/scene_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace night {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw std::invalid_argument("expected [x, y, z], got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

json material_to_json(const Material& m) {
  return {{"albedo", m.albedo}, {"roughness", m.roughness}, {"specular", m.specular}};
}

Material material_from_json(const json& j) {
  Material m;
  m.albedo = j.value("albedo", m.albedo);
  m.roughness = j.value("roughness", m.roughness);
  m.specular = j.value("specular", m.specular);
  return m;
}

json wall_to_json(const Wall& w) {
  return {{"point", vec3_to_json(w.plane.point)},
          {"normal", vec3_to_json(w.plane.normal)},
          {"u_axis", vec3_to_json(w.u_axis)},
          {"width", w.width},
          {"height", w.height},
          {"material", material_to_json(w.material)}};
}

Wall wall_from_json(const json& j) {
  Wall w;
  w.plane = make_plane(vec3_from_json(j.at("point")), vec3_from_json(j.at("normal")));
  w.u_axis = vec3_from_json(j.at("u_axis"));
  w.width = j.at("width").get<double>();
  w.height = j.at("height").get<double>();
  if (j.contains("material")) w.material = material_from_json(j["material"]);
  return w;
}

json primitive_to_json(const Primitive& p) {
  return {{"kind", to_string(p.kind)},
          {"position", vec3_to_json(p.pose.position)},
          {"rotation_deg", vec3_to_json(p.pose.rotation_deg)},
          {"size", vec3_to_json(p.size)},
          {"material", material_to_json(p.material)}};
}

Primitive primitive_from_json(const json& j) {
  Primitive p;
  p.kind = primitive_kind_from_string(j.at("kind").get<std::string>());
  p.pose.position = vec3_from_json(j.at("position"));
  p.pose.rotation_deg = vec3_from_json(j.value("rotation_deg", json::array({0, 0, 0})));
  p.size = vec3_from_json(j.at("size"));
  if (j.contains("material")) p.material = material_from_json(j["material"]);
  return p;
}

}  // namespace

json scene_to_json(const SceneDescription& s) {
  json j;
  j["schema_version"] = SceneDescription::kSchemaVersion;
  j["front_wall"] = s.front_wall ? wall_to_json(*s.front_wall) : json(nullptr);
  j["middle_wall"] = wall_to_json(s.middle_wall);
  j["camera"] = {{"width", s.camera.intrinsics.width},
                 {"height", s.camera.intrinsics.height},
                 {"hfov_deg", s.camera.intrinsics.hfov_deg},
                 {"position", vec3_to_json(s.camera.position)},
                 {"rotation_deg", vec3_to_json(s.camera.rotation_deg)}};
  j["objects"] = json::array();
  for (const Primitive& p : s.objects) j["objects"].push_back(primitive_to_json(p));
  if (s.removed_front_wall) j["removed_front_wall"] = wall_to_json(*s.removed_front_wall);
  if (!s.virtual_walls.empty()) {
    j["virtual_walls"] = json::array();
    for (const Wall& w : s.virtual_walls) j["virtual_walls"].push_back(wall_to_json(w));
  }
  return j;
}

SceneDescription scene_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw std::invalid_argument("scene: missing schema_version");
    }
    const int version = j["schema_version"].get<int>();
    if (version != SceneDescription::kSchemaVersion) {
      throw std::invalid_argument("scene: unsupported schema_version " + std::to_string(version));
    }
    SceneDescription s = make_corner_scene();
    if (j.contains("front_wall")) {
      if (j["front_wall"].is_null()) {
        s.front_wall.reset();
      } else {
        s.front_wall = wall_from_json(j["front_wall"]);
      }
    }
    if (j.contains("middle_wall")) s.middle_wall = wall_from_json(j["middle_wall"]);
    if (j.contains("camera")) {
      const json& c = j["camera"];
      s.camera.intrinsics.width = c.value("width", s.camera.intrinsics.width);
      s.camera.intrinsics.height = c.value("height", s.camera.intrinsics.height);
      s.camera.intrinsics.hfov_deg = c.value("hfov_deg", s.camera.intrinsics.hfov_deg);
      if (c.contains("position")) s.camera.position = vec3_from_json(c["position"]);
      if (c.contains("rotation_deg")) s.camera.rotation_deg = vec3_from_json(c["rotation_deg"]);
    }
    for (const json& o : j.value("objects", json::array())) s.objects.push_back(primitive_from_json(o));
    if (j.contains("removed_front_wall")) s.removed_front_wall = wall_from_json(j["removed_front_wall"]);
    for (const json& w : j.value("virtual_walls", json::array())) s.virtual_walls.push_back(wall_from_json(w));
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scene: ") + e.what());
  }
}

void save_scene(const SceneDescription& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write scene '" + path.string() + "'");
  out << scene_to_json(scene).dump(2) << '\n';
}

SceneDescription load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("scene '" + path.string() + "': " + e.what());
  }
  return scene_from_json(j);
}

}  // namespace night
