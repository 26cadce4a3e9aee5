#include "qnnv/core/model_io.hpp"
#include "qnnv/core/error.hpp"

#include <fstream>
#include <limits>

namespace qnnv {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(Errc::malformed_model, msg); }

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing \"" + key + "\"");
  return *it;
}

unsigned unsigned_from_json(const json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0 ||
      value.get<std::int64_t>() > std::numeric_limits<unsigned>::max())
    malformed(where + ": expected a non-negative integer");
  return static_cast<unsigned>(value.get<std::int64_t>());
}

IntVector integer_vector(const json& value, const std::string& where) {
  if (!value.is_array()) malformed(where + ": expected an array");
  IntVector out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    out.push_back(integer_from_json(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<unsigned> unsigned_vector(const json& value, const std::string& where) {
  if (!value.is_array()) malformed(where + ": expected an array");
  std::vector<unsigned> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    out.push_back(unsigned_from_json(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

FixedPointLayer layer_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) malformed(where + ": expected an object");
  FixedPointLayer layer;
  const json& weights = require(doc, "weights", where);
  if (!weights.is_array()) malformed(where + ".weights: expected an array of rows");
  for (std::size_t i = 0; i < weights.size(); ++i)
    layer.weights.push_back(integer_vector(weights[i], where + ".weights[" + std::to_string(i) + "]"));
  layer.bias = integer_vector(require(doc, "bias", where), where + ".bias");
  layer.bit_shift = unsigned_vector(require(doc, "bit_shift", where), where + ".bit_shift");
  layer.clamp_bits = unsigned_vector(require(doc, "clamp_bits", where), where + ".clamp_bits");
  if (auto it = doc.find("edge_shift"); it != doc.end()) {
    EdgeShift shift;
    if (!it->is_array()) malformed(where + ".edge_shift: expected an array of rows");
    for (std::size_t i = 0; i < it->size(); ++i)
      shift.amounts.push_back(unsigned_vector((*it)[i], where + ".edge_shift[" + std::to_string(i) + "]"));
    const std::string direction = doc.value("edge_shift_direction", std::string("right"));
    if (direction == "left")
      shift.direction = ShiftDirection::left;
    else if (direction != "right")
      malformed(where + ".edge_shift_direction: expected \"left\" or \"right\"");
    layer.edge_shift = std::move(shift);
  }
  return layer;
}

} // namespace

Integer integer_from_json(const json& value, const std::string& where) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Integer(value.get<std::uint64_t>());
    return Integer(value.get<std::int64_t>());
  }
  if (value.is_string()) {
    const auto& text = value.get_ref<const std::string&>();
    const std::size_t start = (!text.empty() && text[0] == '-') ? 1 : 0;
    if (text.size() == start || text.find_first_not_of("0123456789", start) != std::string::npos)
      malformed(where + ": \"" + text + "\" is not an integer");
    return Integer(text);
  }
  malformed(where + ": expected an integer");
}

json integer_to_json(const Integer& value) {
  if (value >= std::numeric_limits<std::int64_t>::min() && value <= std::numeric_limits<std::int64_t>::max())
    return json(static_cast<std::int64_t>(value));
  return json(value.str());
}

QuantizedNetwork model_from_json(const json& doc) {
  if (!doc.is_object()) malformed("model: expected a JSON object");
  const json& version = require(doc, "format_version", "model");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
    malformed("model: unsupported format_version (expected " + std::to_string(kModelFormatVersion) + ")");
  QuantizedNetwork net;
  net.input_bits = unsigned_from_json(require(doc, "input_bits", "model"), "model.input_bits");
  net.weight_bits = unsigned_from_json(require(doc, "weight_bits", "model"), "model.weight_bits");
  const json& layers = require(doc, "layers", "model");
  if (!layers.is_array()) malformed("model.layers: expected an array");
  for (std::size_t t = 0; t < layers.size(); ++t)
    net.layers.push_back(layer_from_json(layers[t], "model.layers[" + std::to_string(t) + "]"));
  if (auto it = doc.find("metadata"); it != doc.end()) {
    if (!it->is_object()) malformed("model.metadata: expected an object");
    for (const auto& [key, value] : it->items())
      net.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  validate(net);
  return net;
}

QuantizedNetwork load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    malformed(std::string("model: invalid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

QuantizedNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open model file " + path.string());
  return load_model(in);
}

json model_to_json(const QuantizedNetwork& net) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["input_bits"] = net.input_bits;
  doc["weight_bits"] = net.weight_bits;
  if (!net.metadata.empty()) doc["metadata"] = net.metadata;
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json l;
    json weights = json::array();
    for (const auto& row : layer.weights) {
      json r = json::array();
      for (const auto& w : row) r.push_back(integer_to_json(w));
      weights.push_back(std::move(r));
    }
    l["weights"] = std::move(weights);
    json bias = json::array();
    for (const auto& b : layer.bias) bias.push_back(integer_to_json(b));
    l["bias"] = std::move(bias);
    l["bit_shift"] = layer.bit_shift;
    l["clamp_bits"] = layer.clamp_bits;
    if (layer.edge_shift) {
      l["edge_shift"] = layer.edge_shift->amounts;
      l["edge_shift_direction"] = layer.edge_shift->direction == ShiftDirection::left ? "left" : "right";
    }
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

void save_model(const QuantizedNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write model file " + path.string());
  out << model_to_json(net).dump() << '\n';
}

} // namespace qnnv
