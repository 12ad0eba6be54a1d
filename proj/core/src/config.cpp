#include "hetbandit/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "hetbandit/bandit.hpp"

namespace hetbandit {

using nlohmann::json;

int TrainConfig::total_rounds() const { return std::max(1, max_epochs / update_period); }

double TrainConfig::eta(int num_types) const {
  return step_size(p_min, context_budget, num_types, total_rounds());
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (weight_decay < 0.0) fail("weight_decay must be non-negative");
  if (max_epochs < 1) fail("max_epochs must be at least 1");
  if (patience < 1) fail("patience must be at least 1");
  if (lambda < 0.0) fail("lambda must be non-negative");
  if (p_min < 0.0 || p_min >= 1.0) fail("p_min must lie in [0, 1)");
  if (context_budget < 2) fail("N (per-type context budget) must be at least 2");
  if (update_period < 1) fail("update_period must be at least 1");
  if (hidden_dim < 1) fail("hidden_dim must be positive");
  if (num_layers < 1) fail("num_layers must be positive");
  if (num_heads < 1) fail("num_heads must be positive");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must lie in [0, 1)");
  if (pretrain_method != "none" && pretrain_method != "degree" &&
      pretrain_method != "feature_prop" && pretrain_method != "hybrid")
    fail("pretrain_method must be one of none, degree, feature_prop, hybrid");
  if (pretrain_epochs < 0) fail("pretrain_epochs must be non-negative");
  if (propagation_hops < 1) fail("propagation_hops must be positive");
  if (rho < 0.0 || rho > 1.0) fail("rho must lie in [0, 1]");
  if (sampling_mode != "adaptive" && sampling_mode != "uniform" &&
      sampling_mode != "proportional" && sampling_mode != "epsilon_greedy")
    fail("sampling_mode must be one of adaptive, uniform, proportional, epsilon_greedy");
  if (reward_mode != "norm") fail("reward_mode must be norm");
  if (mask_ratio < 0.0 || mask_ratio > 1.0) fail("mask_ratio must lie in [0, 1]");
  if (topology_only && backbone_only) fail("topology_only and backbone_only are exclusive");
}

namespace {

json config_json(const TrainConfig& c, bool with_seed) {
  json j;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["lambda"] = c.lambda;
  j["p_min"] = c.p_min;
  j["N"] = c.context_budget;
  j["update_period"] = c.update_period;
  j["hidden_dim"] = c.hidden_dim;
  j["num_layers"] = c.num_layers;
  j["num_heads"] = c.num_heads;
  j["dropout"] = c.dropout;
  j["pretrain_method"] = c.pretrain_method;
  j["pretrain_epochs"] = c.pretrain_epochs;
  j["propagation_hops"] = c.propagation_hops;
  j["rho"] = c.rho;
  j["sampling_mode"] = c.sampling_mode;
  j["reward_mode"] = c.reward_mode;
  j["policy_scaling"] = c.policy_scaling;
  j["sampling_context"] = c.sampling_context;
  j["completion"] = c.completion;
  j["mask_ratio"] = c.mask_ratio;
  j["topology_only"] = c.topology_only;
  j["backbone_only"] = c.backbone_only;
  j["deterministic"] = c.deterministic;
  if (with_seed) j["seed"] = c.seed;
  return j;
}

}  // namespace

TrainConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error(origin + ": config root must be a JSON object");

  TrainConfig cfg;
  auto bad = [&origin](const std::string& key, const std::string& why) {
    throw std::runtime_error(origin + ": key '" + key + "' " + why);
  };
  auto as_num = [&bad](const json& v, const std::string& key) {
    if (!v.is_number()) bad(key, "must be a number");
    return v.get<double>();
  };
  auto as_int = [&bad](const json& v, const std::string& key) {
    if (!v.is_number_integer()) bad(key, "must be an integer");
    return v.get<int>();
  };
  auto as_bool = [&bad](const json& v, const std::string& key) {
    if (!v.is_boolean()) bad(key, "must be a boolean");
    return v.get<bool>();
  };
  auto as_str = [&bad](const json& v, const std::string& key) {
    if (!v.is_string()) bad(key, "must be a string");
    return v.get<std::string>();
  };

  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") cfg.learning_rate = as_num(value, key);
    else if (key == "weight_decay") cfg.weight_decay = as_num(value, key);
    else if (key == "max_epochs") cfg.max_epochs = as_int(value, key);
    else if (key == "patience") cfg.patience = as_int(value, key);
    else if (key == "lambda") cfg.lambda = as_num(value, key);
    else if (key == "p_min") cfg.p_min = as_num(value, key);
    else if (key == "N") cfg.context_budget = as_int(value, key);
    else if (key == "update_period") cfg.update_period = as_int(value, key);
    else if (key == "hidden_dim") cfg.hidden_dim = as_int(value, key);
    else if (key == "num_layers") cfg.num_layers = as_int(value, key);
    else if (key == "num_heads") cfg.num_heads = as_int(value, key);
    else if (key == "dropout") cfg.dropout = as_num(value, key);
    else if (key == "pretrain_method") cfg.pretrain_method = as_str(value, key);
    else if (key == "pretrain_epochs") cfg.pretrain_epochs = as_int(value, key);
    else if (key == "propagation_hops") cfg.propagation_hops = as_int(value, key);
    else if (key == "rho") cfg.rho = as_num(value, key);
    else if (key == "sampling_mode") cfg.sampling_mode = as_str(value, key);
    else if (key == "reward_mode") cfg.reward_mode = as_str(value, key);
    else if (key == "policy_scaling") cfg.policy_scaling = as_bool(value, key);
    else if (key == "sampling_context") cfg.sampling_context = as_bool(value, key);
    else if (key == "completion") cfg.completion = as_bool(value, key);
    else if (key == "mask_ratio") cfg.mask_ratio = as_num(value, key);
    else if (key == "topology_only") cfg.topology_only = as_bool(value, key);
    else if (key == "backbone_only") cfg.backbone_only = as_bool(value, key);
    else if (key == "deterministic") cfg.deterministic = as_bool(value, key);
    else if (key == "seed") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
        bad(key, "must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "eta") {
      bad(key, "is derived from the round schedule and cannot be set");
    } else {
      throw std::runtime_error(origin + ": unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string config_to_json(const TrainConfig& cfg) { return config_json(cfg, true).dump(); }

std::string config_hash(const TrainConfig& cfg) {
  const std::string canon = config_json(cfg, false).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace hetbandit
