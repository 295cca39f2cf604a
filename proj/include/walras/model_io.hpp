#pragma once

#include "walras/instance_gen.hpp"
#include "walras/model.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace walras {

/// Instance JSON: keys n, m, C, B (row-major arrays of arrays), l, M, A, b,
/// domain ({"kind":"orthant"} or {"kind":"box","lower":[...],"upper":[...]})
/// and p0. Extra keys such as "gen" are ignored on read.
///
/// Throws InvalidInput naming the offending key; NotPositiveDefinite from
/// make_instance.
ModelInstance instance_from_json(const nlohmann::json& j, std::optional<double> eta = std::nullopt);

nlohmann::json instance_to_json(const ModelInstance& instance, const GenMetadata* meta = nullptr);

ModelInstance load_instance(const std::string& path, std::optional<double> eta = std::nullopt);

void save_instance(const std::string& path, const ModelInstance& instance, const GenMetadata* meta = nullptr);

}  // namespace walras
