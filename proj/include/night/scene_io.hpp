#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "night/scene.hpp"

namespace night {

nlohmann::json vec3_to_json(const Vec3& v);
// Throws std::invalid_argument unless j is an array of three numbers.
Vec3 vec3_from_json(const nlohmann::json& j);

// Scene documents carry "schema_version"; documents without it, or with an
// unknown version, are rejected with std::invalid_argument.
nlohmann::json scene_to_json(const SceneDescription& scene);
SceneDescription scene_from_json(const nlohmann::json& j);

void save_scene(const SceneDescription& scene, const std::filesystem::path& path);
SceneDescription load_scene(const std::filesystem::path& path);

}  // namespace night
