#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "json.hpp"

#include "rpca/forest.hpp"

namespace rpca {

inline constexpr int kForestFormatVersion = 1;

/// FNV-1a over the matrix shape and the raw bytes of its values.
std::uint64_t training_checksum(const Matrix& features);

/// Node-list document; thresholds and component matrices round-trip exactly.
nlohmann::json tree_to_json(const RPCATree& tree);
RPCATree tree_from_json(const nlohmann::json& doc);

/// Versioned forest document: params, the training matrix checksum and every
/// tree. The training matrix itself is not stored.
nlohmann::json forest_to_json(const RPCAForest& forest);

/// Rebuilds a forest against `training`; throws ValidationError when the
/// checksum or shape does not match the data the forest was fitted on.
RPCAForest forest_from_json(const nlohmann::json& doc, std::shared_ptr<const Matrix> training);

void save_forest(const std::filesystem::path& path, const RPCAForest& forest);
RPCAForest load_forest(const std::filesystem::path& path, std::shared_ptr<const Matrix> training);

}  // namespace rpca
