#include "monopoa/model_io.hpp"

#include "json_util.hpp"

namespace monopoa::neural {

using detail::json;

namespace {

json mlp_to_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json jl{{"weight", detail::matrix_to_json(l.weight)}};
    if (l.bias.size()) jl["bias"] = detail::vector_to_json(l.bias);
    layers.push_back(std::move(jl));
  }
  return {{"final_rectifier", net.final_rectifier()}, {"bias_free", net.bias_free()}, {"layers", layers}};
}

Mlp mlp_from_json(const json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& jl : j.at("layers")) {
    DenseLayer l;
    l.weight = detail::matrix_from_json(jl.at("weight"));
    if (jl.contains("bias")) l.bias = detail::vector_from_json(jl.at("bias"));
    layers.push_back(std::move(l));
  }
  Mlp net(std::move(layers), j.at("final_rectifier").get<bool>());
  if (net.bias_free() != j.at("bias_free").get<bool>()) throw std::runtime_error("model document: bias flag mismatch");
  return net;
}

json scaling_to_json(const InputScaling& s) {
  return {{"n", s.n},
          {"x_hi", s.x_hi},
          {"z_lo", s.z_lo},
          {"z_hi", s.z_hi},
          {"t_lo", s.t_lo},
          {"t_hi", s.t_hi},
          {"transform", s.transform == ValueTransform::Log ? "log" : "identity"}};
}

InputScaling scaling_from_json(const json& j) {
  InputScaling s;
  s.n = j.at("n").get<std::size_t>();
  s.x_hi = j.at("x_hi").get<std::vector<double>>();
  s.z_lo = j.at("z_lo").get<std::vector<double>>();
  s.z_hi = j.at("z_hi").get<std::vector<double>>();
  s.t_lo = j.at("t_lo").get<double>();
  s.t_hi = j.at("t_hi").get<double>();
  const auto t = j.at("transform").get<std::string>();
  if (t == "log") {
    s.transform = ValueTransform::Log;
  } else if (t == "identity") {
    s.transform = ValueTransform::Identity;
  } else {
    throw std::runtime_error("model document: unknown transform '" + t + "'");
  }
  return s;
}

json to_doc(const AnyModel& model) {
  json j{{"format", "monopoa-model"}, {"version", kModelFormatVersion}};
  std::visit(
      [&j](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        j["scaling"] = scaling_to_json(m.scaling());
        if constexpr (std::is_same_v<T, HmRiModel>) {
          j["kind"] = "radial_inverse";
          j["variant"] = to_string(m.variant());
          j["sigma"] = mlp_to_json(m.sigma());
          j["psi"] = mlp_to_json(m.psi());
        } else {
          j["kind"] = "constraint";
          j["monotone"] = m.monotone();
          j["net"] = mlp_to_json(m.net());
        }
      },
      model);
  return j;
}

}  // namespace

std::string model_to_json(const AnyModel& model) { return to_doc(model).dump(); }

AnyModel model_from_json(const std::string& text) {
  const json j = json::parse(text);
  detail::check_format(j, "monopoa-model", kModelFormatVersion);
  const auto kind = j.at("kind").get<std::string>();
  auto scaling = scaling_from_json(j.at("scaling"));
  if (kind == "radial_inverse") {
    return HmRiModel(variant_from_string(j.at("variant").get<std::string>()), std::move(scaling),
                     mlp_from_json(j.at("sigma")), mlp_from_json(j.at("psi")));
  }
  if (kind == "constraint") {
    return ConstraintNet(std::move(scaling), mlp_from_json(j.at("net")), j.at("monotone").get<bool>());
  }
  throw std::runtime_error("model document: unknown kind '" + kind + "'");
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  detail::write_file(path.string(), model_to_json(model) + "\n");
}

AnyModel load_model(const std::filesystem::path& path) { return model_from_json(detail::read_file(path.string())); }

}  // namespace monopoa::neural
