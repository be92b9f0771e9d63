#ifndef GAUSSNET_CONFIG_IO_HPP_
#define GAUSSNET_CONFIG_IO_HPP_

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gaussnet/errors.hpp"
#include "gaussnet/model.hpp"

namespace gaussnet {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& obj, std::string_view where,
                                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

} // namespace detail

inline json activation_to_json(const ActivationSpec& act) {
  if (act.kind == ActivationKind::custom) {
    throw ConfigError("custom activations carry callbacks and cannot be serialized");
  }
  json j{{"kind", std::string(to_string(act.kind))},
         {"a", act.envelope_a},
         {"b", act.envelope_b},
         {"gamma", act.envelope_gamma}};
  if (act.uses_sharpness()) j["m"] = act.m;
  return j;
}

/// Missing envelope keys fall back to the family's canonical envelope.
inline ActivationSpec activation_from_json(const json& j) {
  detail::reject_unknown_keys(j, "activation", {"kind", "a", "b", "gamma", "m"});
  if (!j.contains("kind")) throw ConfigError("activation.kind is required");
  const auto kind = parse_activation_kind(detail::get_or<std::string>(j, "kind", "", "activation"));
  if (kind == ActivationKind::custom) {
    throw ConfigError("activation.kind 'custom' is only available through the library API");
  }
  const double m = detail::get_or<double>(j, "m", 1.0, "activation");
  ActivationSpec act = ActivationSpec::canonical(kind, m);
  act.envelope_a = detail::get_or<double>(j, "a", act.envelope_a, "activation");
  act.envelope_b = detail::get_or<double>(j, "b", act.envelope_b, "activation");
  act.envelope_gamma = detail::get_or<double>(j, "gamma", act.envelope_gamma, "activation");
  validate_activation(act);
  return act;
}

inline json network_to_json(const NetworkConfig& cfg) {
  return json{{"d", cfg.input_dim},
              {"n", cfg.width},
              {"sigma_w", cfg.sigma_w},
              {"sigma_b", cfg.sigma_b},
              {"inputs", cfg.inputs}};
}

inline NetworkConfig network_from_json(const json& j) {
  detail::reject_unknown_keys(j, "network", {"d", "n", "sigma_w", "sigma_b", "inputs"});
  NetworkConfig cfg;
  const auto d = detail::get_or<std::int64_t>(j, "d", 1, "network");
  const auto n = detail::get_or<std::int64_t>(j, "n", 1, "network");
  if (d < 1) throw ConfigError("network.d must be >= 1");
  if (n < 1) throw ConfigError("width must be >= 1");
  cfg.input_dim = static_cast<std::size_t>(d);
  cfg.width = static_cast<std::size_t>(n);
  cfg.sigma_w = detail::get_or<double>(j, "sigma_w", 1.0, "network");
  cfg.sigma_b = detail::get_or<double>(j, "sigma_b", 0.0, "network");
  cfg.inputs = detail::get_or<std::vector<std::vector<double>>>(
      j, "inputs", std::vector<std::vector<double>>{std::vector<double>(cfg.input_dim, 1.0)},
      "network");
  return cfg;
}

/// A parsed configuration document. The optional experiment fragment is kept
/// as raw JSON; the harness interprets it.
struct ConfigDocument {
  ActivationSpec activation;
  NetworkConfig network;
  std::optional<json> experiment;
};

inline ConfigDocument parse_config(const json& j) {
  detail::reject_unknown_keys(j, "configuration", {"activation", "network", "experiment"});
  if (!j.contains("activation")) throw ConfigError("configuration needs an 'activation' object");
  ConfigDocument doc;
  doc.activation = activation_from_json(j.at("activation"));
  doc.network = j.contains("network") ? network_from_json(j.at("network")) : NetworkConfig{};
  validate_config(doc.network, doc.activation);
  if (j.contains("experiment")) doc.experiment = j.at("experiment");
  return doc;
}

inline ConfigDocument parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline json config_to_json(const ConfigDocument& doc) {
  json j{{"activation", activation_to_json(doc.activation)},
         {"network", network_to_json(doc.network)}};
  if (doc.experiment) j["experiment"] = *doc.experiment;
  return j;
}

/// Keys are emitted in sorted order, so equal configurations give equal text.
inline std::string canonical_json(const NetworkConfig& cfg, const ActivationSpec& act) {
  json j{{"network", network_to_json(cfg)}};
  j["activation"] = act.kind == ActivationKind::custom
                        ? json{{"kind", "custom"},
                               {"a", act.envelope_a},
                               {"b", act.envelope_b},
                               {"gamma", act.envelope_gamma}}
                        : activation_to_json(act);
  return j.dump();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t config_hash(const NetworkConfig& cfg, const ActivationSpec& act) {
  return fnv1a64(canonical_json(cfg, act));
}

} // namespace gaussnet

#endif // GAUSSNET_CONFIG_IO_HPP_
