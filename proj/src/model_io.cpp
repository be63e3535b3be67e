#include "fdia/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fdia {

using nlohmann::json;

namespace {

json spec_to_json(const nn::LayerSpec& s) {
  return {{"kind", nn::to_string(s.kind)},
          {"units", s.units},
          {"kernel", s.kernel},
          {"padding", nn::to_string(s.padding)},
          {"rate", s.rate},
          {"activation", nn::to_string(s.activation)},
          {"slope", s.slope},
          {"return_sequences", s.return_sequences},
          {"repeat_steps", s.repeat_steps},
          {"flatten", s.flatten}};
}

nn::LayerSpec spec_from_json(const json& j) {
  nn::LayerSpec s;
  s.kind = nn::parse_layer_kind(j.at("kind").get<std::string>());
  s.units = j.at("units").get<nn::Index>();
  s.kernel = j.at("kernel").get<nn::Index>();
  s.padding = nn::parse_padding(j.at("padding").get<std::string>());
  s.rate = j.at("rate").get<double>();
  s.activation = nn::parse_activation(j.at("activation").get<std::string>());
  s.slope = j.at("slope").get<double>();
  s.return_sequences = j.at("return_sequences").get<bool>();
  s.repeat_steps = j.at("repeat_steps").get<nn::Index>();
  s.flatten = j.at("flatten").get<bool>();
  return s;
}

json network_to_json(const nn::Network& net) {
  json layers = json::array();
  for (const auto& s : net.specs()) layers.push_back(spec_to_json(s));
  const auto& flat = net.params().flat();
  return {{"input_steps", net.input_shape().steps},
          {"input_features", net.input_shape().features},
          {"layers", layers},
          {"params", std::vector<double>(flat.data(), flat.data() + flat.size())}};
}

nn::Network network_from_json(const json& j, const std::string& name) {
  std::vector<nn::LayerSpec> specs;
  for (const auto& l : j.at("layers")) specs.push_back(spec_from_json(l));
  nn::Network net({j.at("input_steps").get<nn::Index>(), j.at("input_features").get<nn::Index>()},
                  std::move(specs));
  const auto values = j.at("params").get<std::vector<double>>();
  if (static_cast<nn::Index>(values.size()) != net.params().size())
    throw ModelFormatError(name + ": expected " + std::to_string(net.params().size()) +
                           " parameters, found " + std::to_string(values.size()));
  net.params().assign(Eigen::Map<const nn::Vector>(values.data(), static_cast<nn::Index>(values.size())));
  return net;
}

}  // namespace

std::string model_to_string(const AAEModel& m) {
  const auto& c = m.config;
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["config"] = {{"window_size", c.window_size},
                   {"latent_dim", c.latent_dim},
                   {"encoder_units", c.encoder_units},
                   {"decoder_units", c.decoder_units},
                   {"critic_filters", c.critic_filters},
                   {"critic_kernel", c.critic_kernel},
                   {"critic_slope", c.critic_slope},
                   {"dropout", c.dropout},
                   {"range_low", c.range_low},
                   {"range_high", c.range_high}};
  doc["seed"] = m.seed;
  doc["epochs_completed"] = m.epochs_completed;
  if (m.normalization) {
    const auto& n = *m.normalization;
    doc["normalization"] = {{"x_min", n.x_min}, {"x_max", n.x_max}, {"low", n.low}, {"high", n.high}};
  } else {
    doc["normalization"] = nullptr;
  }
  doc["encoder"] = network_to_json(m.encoder);
  doc["decoder"] = network_to_json(m.decoder);
  doc["critic_x"] = network_to_json(m.critic_x);
  doc["critic_z"] = network_to_json(m.critic_z);
  return doc.dump(1) + "\n";
}

AAEModel model_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw ModelFormatError("model file has no schema_version");
  const int version = doc["schema_version"].get<int>();
  if (version != kModelSchemaVersion)
    throw ModelFormatError("unsupported model schema_version " + std::to_string(version) +
                           " (expected " + std::to_string(kModelSchemaVersion) + ")");
  try {
    AAEModel m;
    const auto& c = doc.at("config");
    m.config.window_size = c.at("window_size").get<std::size_t>();
    m.config.latent_dim = c.at("latent_dim").get<std::size_t>();
    m.config.encoder_units = c.at("encoder_units").get<std::vector<nn::Index>>();
    m.config.decoder_units = c.at("decoder_units").get<std::vector<nn::Index>>();
    m.config.critic_filters = c.at("critic_filters").get<nn::Index>();
    m.config.critic_kernel = c.at("critic_kernel").get<nn::Index>();
    m.config.critic_slope = c.at("critic_slope").get<double>();
    m.config.dropout = c.at("dropout").get<double>();
    m.config.range_low = c.at("range_low").get<double>();
    m.config.range_high = c.at("range_high").get<double>();
    m.config.validate();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.epochs_completed = doc.at("epochs_completed").get<std::size_t>();
    if (const auto& n = doc.at("normalization"); !n.is_null()) {
      NormalizationParams p{n.at("x_min").get<double>(), n.at("x_max").get<double>(),
                            n.at("low").get<double>(), n.at("high").get<double>()};
      p.validate();
      m.normalization = p;
    }
    m.encoder = network_from_json(doc.at("encoder"), "encoder");
    m.decoder = network_from_json(doc.at("decoder"), "decoder");
    m.critic_x = network_from_json(doc.at("critic_x"), "critic_x");
    m.critic_z = network_from_json(doc.at("critic_z"), "critic_z");
    return m;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const AAEModel& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << model_to_string(model);
}

AAEModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_string(buf.str());
}

}  // namespace fdia
