#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lass/errors.hpp"
#include "lass/kmodes.hpp"

namespace lass::io {

inline constexpr const char* kModelSchema = "lass-model/1";

// Document that does not match the model schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// {"schema", "n", "k", "d", "sigma", "lambda_reg", "bandwidth", "knn",
//  "modes", "assignments", "data": {"inline": [...]} | {"path": "..."}}
nlohmann::json model_to_json(const ClusterModel<double>& model);

// Relative data paths are resolved against `base_dir`. The affinity graph is
// rebuilt from the data, bandwidth and knn.
ClusterModel<double> model_from_json(const nlohmann::json& doc,
                                     const std::filesystem::path& base_dir = {});

std::string dump_model(const ClusterModel<double>& model);
ClusterModel<double> load_model(const std::filesystem::path& path);

}  // namespace lass::io
