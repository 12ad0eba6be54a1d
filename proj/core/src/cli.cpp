#include "hetbandit/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hetbandit/dataset.hpp"
#include "hetbandit/metrics.hpp"
#include "hetbandit/trainer.hpp"

namespace hetbandit {

using nlohmann::json;

namespace {

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("seed spec: empty number");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("seed spec: invalid number '" + s + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

json stability_to_json(const StabilityReport& rep) {
  json j;
  j["num_runs"] = rep.num_runs;
  j["type_names"] = rep.type_names;
  j["mean_final_weights"] = rep.mean_final_weights;
  j["top_type"] = rep.top_type;
  j["top_type_name"] =
      rep.top_type >= 0 && rep.top_type < static_cast<int>(rep.type_names.size())
          ? rep.type_names[static_cast<std::size_t>(rep.top_type)]
          : "";
  j["min_mean_final_weight"] = rep.min_mean_final_weight;
  j["max_mean_final_weight"] = rep.max_mean_final_weight;
  j["mean_pairwise_kendall_tau"] = rep.mean_pairwise_kendall_tau;
  return j;
}

void log_record(std::ostream& log, const RunRecord& rec) {
  log << "seed " << rec.seed << " variant " << rec.variant << ": test macro-F1 "
      << std::fixed << std::setprecision(4) << rec.test_macro_f1 << ", micro-F1 "
      << rec.test_micro_f1 << ", best epoch " << rec.best_epoch << "/" << rec.realized_epochs
      << std::defaultfloat << "\n";
}

TrainConfig load_config(const CommandSpec& spec) {
  TrainConfig cfg;
  if (!spec.config_path.empty()) cfg = parse_config(spec.config_path);
  if (spec.deterministic) cfg.deterministic = true;
  return cfg;
}

Dataset load_data(const CommandSpec& spec) {
  if (spec.data_dir.empty()) throw std::invalid_argument("command needs --data <dir>");
  return load_dataset(spec.data_dir);
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

json aggregate_json(const std::vector<RunRecord>& records) {
  std::vector<double> macro, micro;
  macro.reserve(records.size());
  micro.reserve(records.size());
  for (const auto& r : records) {
    macro.push_back(r.test_macro_f1);
    micro.push_back(r.test_micro_f1);
  }
  json agg;
  agg["n"] = records.size();
  agg["test_macro_f1"] = {{"mean", mean_of(macro)}, {"std", sample_std(macro)}};
  agg["test_micro_f1"] = {{"mean", mean_of(micro)}, {"std", sample_std(micro)}};
  return agg;
}

json records_json(const std::vector<RunRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(json::parse(run_record_to_json(r)));
  return arr;
}

// Accepts a single record object, an array of records, or a document with a
// "records" array (the `train`/`ablate` output shape).
std::vector<RunRecord> read_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open record file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  const json* arr = nullptr;
  if (doc.is_object() && doc.contains("records") && doc["records"].is_array()) {
    arr = &doc["records"];
  } else if (doc.is_array()) {
    arr = &doc;
  }
  std::vector<RunRecord> out;
  if (arr != nullptr) {
    for (const auto& item : *arr) out.push_back(run_record_from_json(item.dump()));
  } else {
    out.push_back(run_record_from_json(doc.dump()));
  }
  if (out.empty()) throw std::runtime_error(path + ": contains no run records");
  return out;
}

void log_aggregate(std::ostream& log, const std::vector<RunRecord>& records) {
  std::vector<double> macro, micro;
  for (const auto& r : records) {
    macro.push_back(r.test_macro_f1);
    micro.push_back(r.test_micro_f1);
  }
  log << "aggregate over " << records.size() << " seed(s): test macro-F1 " << std::fixed
      << std::setprecision(4) << mean_of(macro) << " +/- " << sample_std(macro)
      << ", micro-F1 " << mean_of(micro) << " +/- " << sample_std(micro) << std::defaultfloat
      << "\n";
}

}  // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("seed spec: empty");
  const auto range = spec.find("..");
  if (range != std::string::npos) {
    const std::uint64_t lo = parse_u64(spec.substr(0, range));
    const std::uint64_t hi = parse_u64(spec.substr(range + 2));
    if (hi < lo) throw std::invalid_argument("seed spec: descending range '" + spec + "'");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string tok =
        spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(parse_u64(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run_command(const CommandSpec& spec, std::ostream& log) {
  if (spec.command == "synth") {
    if (spec.data_dir.empty()) throw std::invalid_argument("synth needs --data <dir>");
    SynthSpec ss;
    ss.seed = spec.synth_seed;
    ss.noise = spec.synth_noise;
    SynthResult res = generate_synthetic(ss);
    save_dataset(res.dataset, spec.data_dir);
    const auto& g = res.dataset.graph;
    log << "wrote synthetic dataset to " << spec.data_dir << " (" << g.num_nodes()
        << " nodes, " << g.num_types() << " types)\n";
    const std::vector<int> ref = synthetic_reference_predictions(res.dataset, res.prototypes);
    std::int64_t agree = 0, agree_clean = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (ref[i] == res.dataset.labels[i]) ++agree;
      if (ref[i] == res.clean_labels[i]) ++agree_clean;
    }
    log << "reference predictor agreement: " << std::fixed << std::setprecision(4)
        << static_cast<double>(agree) / static_cast<double>(ref.size()) << " (labels), "
        << static_cast<double>(agree_clean) / static_cast<double>(ref.size())
        << " (pre-corruption)" << std::defaultfloat << "\n";
    return 0;
  }

  if (spec.command == "validate") {
    Dataset ds = load_data(spec);
    const auto issues = validate_dataset(ds);
    if (issues.empty()) {
      log << "dataset ok: " << ds.graph.num_nodes() << " nodes, "
          << ds.graph.num_relations() << " relations\n";
      return 0;
    }
    for (const auto& msg : issues) log << "issue: " << msg << "\n";
    return 1;
  }

  if (spec.command == "train" || spec.command == "ablate") {
    Dataset ds = load_data(spec);
    TrainConfig cfg = load_config(spec);
    const std::string variant = spec.command == "train" ? "full" : spec.variant;
    const auto seeds = parse_seed_spec(spec.seeds);
    std::vector<RunRecord> records;
    for (std::uint64_t s : seeds) {
      cfg.seed = s;
      records.push_back(run_variant(ds, cfg, variant));
      log_record(log, records.back());
    }
    log_aggregate(log, records);
    if (!spec.out_path.empty()) {
      json out;
      out["variant"] = variant;
      out["aggregate"] = aggregate_json(records);
      out["records"] = records_json(records);
      write_text(spec.out_path, out.dump(2));
      log << "wrote " << spec.out_path << "\n";
    }
    return 0;
  }

  if (spec.command == "stability") {
    if (spec.inputs.empty())
      throw std::invalid_argument("stability needs at least one run-record file");
    std::vector<RunRecord> records;
    for (const auto& path : spec.inputs) {
      auto batch = read_record_file(path);
      records.insert(records.end(), std::make_move_iterator(batch.begin()),
                     std::make_move_iterator(batch.end()));
    }
    const std::vector<std::string>& type_names = records.front().type_names;
    std::vector<std::vector<double>> weights;
    for (const auto& rec : records) {
      if (rec.type_names != type_names)
        throw std::runtime_error("stability: run records disagree on node types");
      weights.push_back(rec.final_weights);
    }
    const StabilityReport rep = stability_report(weights, type_names);
    log << "stability over " << rep.num_runs << " runs: top type "
        << (rep.top_type >= 0 ? type_names[static_cast<std::size_t>(rep.top_type)] : "n/a")
        << ", mean weights min/max " << std::fixed << std::setprecision(4)
        << rep.min_mean_final_weight << "/" << rep.max_mean_final_weight
        << ", mean pairwise Kendall tau " << rep.mean_pairwise_kendall_tau << std::defaultfloat
        << "\n";
    if (!spec.out_path.empty()) {
      write_text(spec.out_path, stability_to_json(rep).dump(2));
      log << "wrote " << spec.out_path << "\n";
    }
    return 0;
  }

  throw std::invalid_argument("unknown command '" + spec.command + "'");
}

}  // namespace hetbandit
