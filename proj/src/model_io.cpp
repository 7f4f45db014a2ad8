#include "lass/model_io.hpp"

#include "lass/csv.hpp"

namespace lass::io {

namespace {

using nlohmann::json;

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index n = 0; n < m.rows(); ++n) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(n, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& doc, const char* field, Index rows, Index cols) {
  if (!doc.is_array() || static_cast<Index>(doc.size()) != rows) {
    throw SchemaError(std::string("model field '") + field + "' must be an array of " +
                      std::to_string(rows) + " rows");
  }
  MatrixXd m(rows, cols);
  for (Index n = 0; n < rows; ++n) {
    const json& row = doc[static_cast<std::size_t>(n)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw SchemaError(std::string("model field '") + field + "' row " + std::to_string(n) +
                        " must have " + std::to_string(cols) + " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw SchemaError(std::string("model field '") + field + "' is not numeric");
      m(n, k) = v.get<double>();
    }
  }
  return m;
}

template <class T>
T required(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SchemaError(std::string("model is missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("model field '") + key + "' has the wrong type");
  }
}

}  // namespace

json model_to_json(const ClusterModel<double>& model) {
  json doc;
  doc["schema"] = kModelSchema;
  doc["n"] = model.size();
  doc["k"] = model.clusters();
  doc["d"] = model.dimension();
  doc["sigma"] = model.sigma;
  doc["lambda_reg"] = model.lambda_reg;
  doc["bandwidth"] = model.graph_config.bandwidth;
  doc["knn"] = model.graph_config.knn ? json(*model.graph_config.knn) : json(nullptr);
  doc["modes"] = matrix_to_json(model.modes);
  doc["assignments"] = matrix_to_json(model.Z);
  doc["data"] = json{{"inline", matrix_to_json(model.data)}};
  return doc;
}

ClusterModel<double> model_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SchemaError("model document must be a JSON object");
  const auto schema = required<std::string>(doc, "schema");
  if (schema != kModelSchema) {
    throw SchemaError("unsupported model schema '" + schema + "', expected '" + kModelSchema + "'");
  }
  const auto n = required<Index>(doc, "n");
  const auto k = required<Index>(doc, "k");
  const auto d = required<Index>(doc, "d");
  if (n < 2 || k < 1 || d < 1) throw SchemaError("model dimensions out of range");

  ClusterModel<double> model;
  model.sigma = required<double>(doc, "sigma");
  model.lambda_reg = required<double>(doc, "lambda_reg");
  model.graph_config.bandwidth = required<double>(doc, "bandwidth");
  if (doc.contains("knn") && !doc.at("knn").is_null()) {
    model.graph_config.knn = required<Index>(doc, "knn");
  }
  model.modes = matrix_from_json(doc.value("modes", json()), "modes", k, d);
  model.Z = matrix_from_json(doc.value("assignments", json()), "assignments", n, k);

  const json data = doc.value("data", json());
  if (data.is_object() && data.contains("inline")) {
    model.data = matrix_from_json(data.at("inline"), "data.inline", n, d);
  } else if (data.is_object() && data.contains("path") && data.at("path").is_string()) {
    std::filesystem::path path = data.at("path").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    try {
      model.data = read_csv(path);
    } catch (const Error& e) {
      throw SchemaError("model dataset '" + path.string() + "': " + e.what());
    }
    if (model.data.rows() != n || model.data.cols() != d) {
      throw SchemaError("dataset '" + path.string() + "' does not match the model dimensions");
    }
  } else {
    throw SchemaError("model field 'data' must hold 'inline' rows or a 'path'");
  }

  try {
    model.graph = gaussian_affinities(model.data, model.graph_config.bandwidth, model.graph_config.knn);
    model.validate();
  } catch (const Error& e) {
    throw SchemaError(std::string("inconsistent model: ") + e.what());
  }
  return model;
}

std::string dump_model(const ClusterModel<double>& model) {
  return model_to_json(model).dump(2) + "\n";
}

ClusterModel<double> load_model(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw SchemaError("model '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_from_json(doc, path.parent_path());
}

}  // namespace lass::io
