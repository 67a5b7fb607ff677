#include "gcgail/errors.hpp"
#include "gcgail/nn.hpp"

namespace gcgail::nn {

using nlohmann::json;

namespace {

json spec_to_json(const MlpSpec& spec) {
  return json{{"input_dim", spec.input_dim},
              {"hidden_dims", spec.hidden_dims},
              {"head", head_name(spec.head.kind)},
              {"outputs", spec.head.outputs}};
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<std::size_t>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  spec.head.kind = parse_head(j.at("head").get<std::string>());
  spec.head.outputs = j.at("outputs").get<std::size_t>();
  spec.validate();
  return spec;
}

json layers_to_json(const std::vector<Layer>& layers) {
  json arr = json::array();
  for (const auto& l : layers) {
    arr.push_back(json{{"w", l.w}, {"rows", l.rows}, {"cols", l.cols}, {"b", l.b}});
  }
  return arr;
}

std::vector<Layer> layers_from_json(const json& arr, const std::vector<Layer>& shape) {
  if (!arr.is_array() || arr.size() != shape.size()) {
    throw ShapeError("checkpoint layer count does not match spec");
  }
  std::vector<Layer> out = shape;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const auto& jl = arr[k];
    auto& l = out[k];
    if (jl.contains("rows") && (jl.at("rows").get<std::size_t>() != l.rows ||
                                jl.at("cols").get<std::size_t>() != l.cols)) {
      throw ShapeError("checkpoint layer " + std::to_string(k) + " has wrong shape");
    }
    l.w = jl.at("w").get<std::vector<double>>();
    l.b = jl.at("b").get<std::vector<double>>();
    if (l.w.size() != l.rows * l.cols || l.b.size() != l.rows) {
      throw ShapeError("checkpoint layer " + std::to_string(k) + " has wrong element count");
    }
  }
  return out;
}

}  // namespace

json to_json(const Network& net, const AdamState* adam) {
  json j{{"spec", spec_to_json(net.spec)}, {"layers", layers_to_json(net.layers)}};
  if (adam != nullptr) {
    j["adam"] = json{{"m", layers_to_json(adam->first_moment)},
                     {"v", layers_to_json(adam->second_moment)},
                     {"t", adam->step_count},
                     {"lr", adam->config.learning_rate},
                     {"beta1", adam->config.beta1},
                     {"beta2", adam->config.beta2},
                     {"eps", adam->config.eps}};
  }
  return j;
}

Network network_from_json(const json& j) {
  const MlpSpec spec = spec_from_json(j.at("spec"));
  Network net = Network::zeros(spec);
  net.layers = layers_from_json(j.at("layers"), net.layers);
  if (!net.all_finite()) throw NumericError("checkpoint contains non-finite parameters");
  return net;
}

AdamState adam_from_json(const json& j, const Network& net) {
  const json& a = j.at("adam");
  AdamConfig cfg;
  cfg.learning_rate = a.value("lr", cfg.learning_rate);
  cfg.beta1 = a.value("beta1", cfg.beta1);
  cfg.beta2 = a.value("beta2", cfg.beta2);
  cfg.eps = a.value("eps", cfg.eps);
  AdamState st = AdamState::for_network(net, cfg);
  st.first_moment = layers_from_json(a.at("m"), st.first_moment);
  st.second_moment = layers_from_json(a.at("v"), st.second_moment);
  st.step_count = a.at("t").get<std::uint64_t>();
  return st;
}

}  // namespace gcgail::nn
