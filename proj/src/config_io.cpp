#include "srforge/config_io.hpp"

#include <fstream>
#include <set>

namespace srforge {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) throw ConfigError(what_ + ": expected a JSON object");
  }

  void check_schema() {
    seen_.insert("schema_version");
    if (!j_.contains("schema_version")) throw ConfigError(what_ + ".schema_version: missing");
    const json& v = j_.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kConfigSchemaVersion) {
      throw ConfigError(what_ + ".schema_version: expected " + std::to_string(kConfigSchemaVersion));
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(what_ + "." + key + ": unexpected value " + v.dump());
    }
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  [[noreturn]] void fail(const char* key, const std::string& msg) const {
    throw ConfigError(what_ + "." + key + ": " + msg);
  }

  void reject_unknown() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(what_ + "." + key + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string what_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ModelConfig& cfg) {
  return json{{"schema_version", kConfigSchemaVersion},
              {"kind", std::string(to_string(cfg.kind))},
              {"num_blocks", cfg.num_blocks},
              {"num_feats", cfg.num_feats},
              {"scales", cfg.scales},
              {"res_scale", cfg.res_scale},
              {"rgb_mean", cfg.rgb_mean},
              {"trunk_kernel", cfg.trunk_kernel},
              {"head_kernel_multi", cfg.head_kernel_multi}};
}

ModelConfig model_config_from_json(const json& j) {
  Reader r(j, "model");
  r.check_schema();
  ModelConfig cfg;
  if (const json* k = r.raw("kind")) {
    if (!k->is_string()) r.fail("kind", "expected a string");
    cfg.kind = model_kind_from_string(k->get<std::string>());
  }
  // Kind-dependent defaults before explicit overrides.
  if (cfg.kind == ModelKind::multi) cfg.scales = {2, 3, 4};
  r.get("num_blocks", cfg.num_blocks);
  r.get("num_feats", cfg.num_feats);
  cfg.res_scale = default_res_scale(cfg.num_feats);
  r.get("scales", cfg.scales);
  r.get("res_scale", cfg.res_scale);
  r.get("rgb_mean", cfg.rgb_mean);
  r.get("trunk_kernel", cfg.trunk_kernel);
  r.get("head_kernel_multi", cfg.head_kernel_multi);
  r.reject_unknown();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("model.") + e.what());
  }
  return cfg;
}

json to_json(const TrainConfig& cfg) {
  return json{{"schema_version", kConfigSchemaVersion},
              {"loss", cfg.loss == LossKind::l1 ? "l1" : "l2"},
              {"lr0", cfg.lr0},
              {"halve_every", cfg.halve_every},
              {"batch", cfg.batch},
              {"patch_lr", cfg.patch_lr},
              {"beta1", cfg.adam.beta1},
              {"beta2", cfg.adam.beta2},
              {"eps", cfg.adam.eps},
              {"max_updates", cfg.max_updates},
              {"seed", cfg.seed},
              {"scales", cfg.scales},
              {"checkpoint_every", cfg.checkpoint_every}};
}

TrainConfig train_config_from_json(const json& j) {
  Reader r(j, "train");
  r.check_schema();
  TrainConfig cfg;
  if (const json* l = r.raw("loss")) {
    const std::string s = l->is_string() ? l->get<std::string>() : "";
    if (s == "l1" || s == "L1") {
      cfg.loss = LossKind::l1;
    } else if (s == "l2" || s == "L2") {
      cfg.loss = LossKind::l2;
    } else {
      r.fail("loss", "expected \"l1\" or \"l2\"");
    }
  }
  r.get("lr0", cfg.lr0);
  r.get("halve_every", cfg.halve_every);
  r.get("batch", cfg.batch);
  r.get("patch_lr", cfg.patch_lr);
  r.get("beta1", cfg.adam.beta1);
  r.get("beta2", cfg.adam.beta2);
  r.get("eps", cfg.adam.eps);
  r.get("max_updates", cfg.max_updates);
  r.get("seed", cfg.seed);
  r.get("scales", cfg.scales);
  r.get("checkpoint_every", cfg.checkpoint_every);
  r.reject_unknown();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("train.") + e.what());
  }
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  return model_config_from_json(read_json_file(path));
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return train_config_from_json(read_json_file(path));
}

}  // namespace srforge
