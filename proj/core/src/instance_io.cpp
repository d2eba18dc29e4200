#include "monopoa/instance_io.hpp"

#include <sstream>

#include "json_util.hpp"

namespace monopoa {

using detail::json;

namespace {

json params_to_json(const CapacityParams& p) {
  return {{"gamma", p.gamma}, {"d0", p.d0}, {"noise", p.noise}, {"quantum", p.quantum}};
}

CapacityParams params_from_json(const json& j) {
  CapacityParams p;
  p.gamma = j.at("gamma").get<double>();
  p.d0 = j.at("d0").get<double>();
  p.noise = j.at("noise").get<double>();
  p.quantum = j.at("quantum").get<double>();
  return p;
}

json positions_to_json(const std::vector<Position>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back({p[0], p[1]});
  return out;
}

std::vector<Position> positions_from_json(const json& j) {
  std::vector<Position> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

json to_json_doc(const Instance& instance) {
  json j{{"format", "monopoa-instance"},
         {"version", kInstanceFormatVersion},
         {"family", to_string(family_of(instance))}};
  std::visit(
      [&j](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        j["n"] = inst.n;
        j["m_g"] = inst.m_g;
        j["seed"] = inst.seed;
        if constexpr (std::is_same_v<T, PowerInstance>) {
          j["params"] = params_to_json(inst.params);
          j["towers"] = positions_to_json(inst.towers);
          j["users"] = positions_to_json(inst.users);
          j["targets"] = inst.targets;
          j["witness"] = inst.witness;
        } else {
          j["q0"] = detail::matrix_to_json(inst.q0);
          j["objective_scale"] = inst.objective_scale;
          json cons = json::array();
          for (const auto& g : inst.constraints) {
            if constexpr (std::is_same_v<T, QuadraticInstance>) {
              cons.push_back({{"q", detail::matrix_to_json(g.q)}, {"c", detail::vector_to_json(g.c)}});
            } else {
              json qs = json::array();
              for (const auto& q : g.q) qs.push_back(detail::matrix_to_json(q));
              cons.push_back({{"q", qs}, {"c", g.c}});
            }
          }
          if constexpr (std::is_same_v<T, MultiplicativeInstance>) j["k"] = inst.k;
          j["constraints"] = std::move(cons);
          j["thresholds"] = inst.thresholds;
          j["witnesses"] = inst.witnesses;
        }
      },
      instance);
  return j;
}

template <class T>
void read_common(const json& j, T& inst) {
  inst.n = j.at("n").get<std::size_t>();
  inst.m_g = j.at("m_g").get<std::size_t>();
  inst.seed = j.at("seed").get<std::uint64_t>();
}

Instance from_json_doc(const json& j) {
  detail::check_format(j, "monopoa-instance", kInstanceFormatVersion);
  const Family family = family_from_string(j.at("family").get<std::string>());
  switch (family) {
    case Family::Quadratic: {
      QuadraticInstance inst;
      read_common(j, inst);
      inst.q0 = detail::matrix_from_json(j.at("q0"));
      inst.objective_scale = j.at("objective_scale").get<double>();
      for (const auto& c : j.at("constraints")) {
        inst.constraints.push_back({detail::matrix_from_json(c.at("q")), detail::vector_from_json(c.at("c"))});
      }
      inst.thresholds = j.at("thresholds").get<std::vector<double>>();
      inst.witnesses = j.at("witnesses").get<std::vector<std::vector<double>>>();
      if (inst.constraints.size() != inst.m_g || inst.thresholds.size() != inst.m_g) {
        throw std::runtime_error("instance document: constraint count does not match m_g");
      }
      return inst;
    }
    case Family::Multiplicative: {
      MultiplicativeInstance inst;
      read_common(j, inst);
      inst.k = j.at("k").get<std::size_t>();
      inst.q0 = detail::matrix_from_json(j.at("q0"));
      inst.objective_scale = j.at("objective_scale").get<double>();
      for (const auto& c : j.at("constraints")) {
        MultiplicativeConstraint g;
        for (const auto& q : c.at("q")) g.q.push_back(detail::matrix_from_json(q));
        g.c = c.at("c").get<std::vector<double>>();
        inst.constraints.push_back(std::move(g));
      }
      inst.thresholds = j.at("thresholds").get<std::vector<double>>();
      inst.witnesses = j.at("witnesses").get<std::vector<std::vector<double>>>();
      if (inst.constraints.size() != inst.m_g || inst.thresholds.size() != inst.m_g) {
        throw std::runtime_error("instance document: constraint count does not match m_g");
      }
      return inst;
    }
    case Family::PowerG2:
    case Family::PowerG35: {
      PowerInstance inst;
      inst.family = family;
      read_common(j, inst);
      inst.params = params_from_json(j.at("params"));
      inst.towers = positions_from_json(j.at("towers"));
      inst.users = positions_from_json(j.at("users"));
      inst.targets = j.at("targets").get<std::vector<double>>();
      inst.witness = j.at("witness").get<std::vector<double>>();
      if (inst.users.size() != inst.m_g || inst.targets.size() != inst.m_g || inst.towers.size() != inst.n) {
        throw std::runtime_error("instance document: sizes do not match n and m_g");
      }
      return inst;
    }
  }
  throw std::runtime_error("instance document: unknown family");
}

}  // namespace

std::string instance_to_json(const Instance& instance) { return to_json_doc(instance).dump(); }

Instance instance_from_json(const std::string& text) { return from_json_doc(json::parse(text)); }

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  detail::write_file(path.string(), to_json_doc(instance).dump(2) + "\n");
}

Instance load_instance(const std::filesystem::path& path) {
  return instance_from_json(detail::read_file(path.string()));
}

void save_corpus(const std::vector<Instance>& corpus, const std::filesystem::path& path) {
  std::string text;
  for (const auto& inst : corpus) {
    text += instance_to_json(inst);
    text += '\n';
  }
  detail::write_file(path.string(), text);
}

std::vector<Instance> load_corpus(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path.string()));
  std::vector<Instance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(instance_from_json(line));
  }
  return out;
}

}  // namespace monopoa
