#pragma once

// Command-line front end. Results go to `out`; failures go to `err` as a
// single JSON object, with exit code 2 for configuration errors and 3 for
// numeric failures.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chern/models.hpp"

namespace chern::cli {

inline constexpr std::string_view version = "0.1.0";

enum ExitCode { ok = 0, config_error = 2, numeric_error = 3 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// A model built from {"model", "params", "N", "variant"}, given either as a
// path to a JSON file or as inline JSON text.
struct ModelConfig {
    models::BlochModel model;
    models::Params params;
};

ModelConfig load_model_config(const std::string& path_or_json);

// JSON text with every floating-point number printed to 17 significant digits.
std::string dump(const nlohmann::json& value, int indent = 2);
std::string format_number(double value);

}  // namespace chern::cli
