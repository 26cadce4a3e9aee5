#pragma once

#include "qnnv/core/network.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

namespace qnnv {

inline constexpr int kModelFormatVersion = 1;

/// Parses and validates a model document.  Distinct Errc codes for
/// malformed syntax, shape mismatches and weights outside the declared width.
QuantizedNetwork load_model(std::istream& in);
QuantizedNetwork load_model(const std::filesystem::path& path);
QuantizedNetwork model_from_json(const nlohmann::json& doc);

nlohmann::json model_to_json(const QuantizedNetwork& net);
void save_model(const QuantizedNetwork& net, const std::filesystem::path& path);

/// JSON numbers are limited to 64 bits; larger integers travel as decimal
/// strings.  Both forms are accepted on input.
Integer integer_from_json(const nlohmann::json& value, const std::string& where);
nlohmann::json integer_to_json(const Integer& value);

} // namespace qnnv
