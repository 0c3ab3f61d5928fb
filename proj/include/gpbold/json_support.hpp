#pragma once

#include <nlohmann/json.hpp>

#include "gpbold/model.hpp"

namespace gpbold {

ModelSpec model_spec_from_json(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

Matrix matrix_from_json(const nlohmann::json& rows);
nlohmann::json matrix_to_json(const Matrix& m);
Vector vector_from_json(const nlohmann::json& arr);
nlohmann::json vector_to_json(const Vector& v);

}  // namespace gpbold
