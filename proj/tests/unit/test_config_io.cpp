#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gaussnet/config_io.hpp"

using namespace gaussnet;

TEST(ConfigIo, RoundTrip) {
  ConfigDocument doc;
  doc.activation = ActivationSpec::softplus(6.0);
  doc.network.input_dim = 2;
  doc.network.width = 12;
  doc.network.sigma_w = 0.75;
  doc.network.sigma_b = 0.125;
  doc.network.inputs = {{1.0, -2.0}, {0.1, 0.3}};
  doc.experiment = json{{"replications", 10}};
  const auto back = parse_config_text(config_to_json(doc).dump());
  EXPECT_EQ(back.activation.kind, doc.activation.kind);
  EXPECT_EQ(back.activation.m, 6.0);
  EXPECT_EQ(back.activation.envelope_a, doc.activation.envelope_a);
  EXPECT_EQ(back.activation.envelope_b, doc.activation.envelope_b);
  EXPECT_EQ(back.activation.envelope_gamma, doc.activation.envelope_gamma);
  EXPECT_EQ(back.network.inputs, doc.network.inputs);
  EXPECT_EQ(back.network.width, 12u);
  EXPECT_EQ(back.network.sigma_w, 0.75);
  EXPECT_EQ(back.network.sigma_b, 0.125);
  EXPECT_EQ(back.experiment, doc.experiment);
  EXPECT_EQ(config_hash(back.network, back.activation),
            config_hash(doc.network, doc.activation));
}

TEST(ConfigIo, CanonicalDefaults) {
  const auto doc = parse_config_text(R"({"activation": {"kind": "cubic"}})");
  EXPECT_EQ(doc.activation.envelope_a, 6.0);
  EXPECT_EQ(doc.activation.envelope_gamma, 3.0);
  EXPECT_EQ(doc.network.width, 1u);
  EXPECT_FALSE(doc.experiment.has_value());
}

TEST(ConfigIo, UnknownKeysRejected) {
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "tanh"}, "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "tanh", "c": 1}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "tanh"}, "network": {"width": 3}})"),
               ConfigError);
}

TEST(ConfigIo, InvalidDocuments) {
  EXPECT_THROW(parse_config_text("{"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"network": {}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "custom"}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "relu"}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "tanh", "a": -1}})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"activation": {"kind": "tanh"}, "network": {"n": 0}})"),
               ConfigError);
  EXPECT_THROW(
      parse_config_text(R"({"activation": {"kind": "tanh"}, "network": {"d": 2, "inputs": [[1]]}})"),
      ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(ConfigIo, CustomCannotBeSerialized) {
  CustomActivation f{[](double x) { return x; }, [](double) { return 1.0; },
                     [](double) { return 0.0; }};
  EXPECT_THROW(activation_to_json(ActivationSpec::custom(f, 1, 1, 1)), ConfigError);
}

TEST(ConfigIo, HashIsStable) {
  NetworkConfig c;
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  const auto h = config_hash(c, ActivationSpec::tanh());
  EXPECT_EQ(h, config_hash(c, ActivationSpec::tanh()));
  EXPECT_NE(h, config_hash(c.with_width(2), ActivationSpec::tanh()));
  EXPECT_NE(h, config_hash(c, ActivationSpec::cubic()));
}

TEST(ConfigIo, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "gaussnet_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"activation": {"kind": "sau-approx", "m": 4},
               "network": {"d": 1, "n": 8, "sigma_w": 2, "sigma_b": 0.5, "inputs": [[0.5]]}})";
  }
  const auto doc = load_config(path.string());
  EXPECT_EQ(doc.activation.kind, ActivationKind::sau_approx);
  EXPECT_EQ(doc.activation.m, 4.0);
  EXPECT_EQ(doc.network.width, 8u);
  std::filesystem::remove(path);
}
