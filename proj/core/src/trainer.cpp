#include "hetbandit/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "hetbandit/backbone.hpp"
#include "hetbandit/fusion.hpp"
#include "hetbandit/metrics.hpp"
#include "hetbandit/topo_init.hpp"

namespace hetbandit {

using nlohmann::json;

namespace {

// independent deterministic streams derived from the run seed
constexpr std::uint64_t kLoopSalt = 0x6c6f6f70ULL;  // main-loop sampling and dropout
constexpr std::uint64_t kTestSalt = 0x7e57ULL;      // test-time evaluation

// leased parameter leaves, one per distinct matrix
struct Leases {
  nk::Tape& tape;
  bool rg;
  std::unordered_map<nk::Matrix*, nk::Var> held;

  nk::Var operator()(nk::Matrix& m) {
    auto it = held.find(&m);
    if (it != held.end()) return it->second;
    nk::Var v = tape.leaf(m, rg);
    held.emplace(&m, v);
    return v;
  }
};

std::vector<double> row_norms(const nk::Matrix& block) {
  std::vector<double> out(static_cast<std::size_t>(block.rows()));
  for (Eigen::Index i = 0; i < block.rows(); ++i) out[static_cast<std::size_t>(i)] = block.row(i).norm();
  return out;
}

SampleMode within_mode_for(const TrainConfig& cfg) {
  if (cfg.sampling_mode == "uniform" || cfg.sampling_mode == "proportional")
    return SampleMode::uniform;
  return SampleMode::norm_proportional;
}

bool completion_configured(const TrainConfig& cfg) {
  return cfg.completion && cfg.lambda > 0.0 && !cfg.topology_only && !cfg.backbone_only;
}

std::vector<int> argmax_rows(const nk::Matrix& logits, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

}  // namespace

nk::Var total_loss(const nk::Var& pred_loss, const std::optional<nk::Var>& comp_loss,
                   double lambda) {
  if (!comp_loss.has_value() || lambda == 0.0) return pred_loss;
  return nk::add(pred_loss, nk::scale(*comp_loss, lambda));
}

std::vector<int> make_completion_mask(const std::vector<int>& pool, double ratio, Rng& rng) {
  if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("mask ratio must lie in [0, 1]");
  const auto m = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(pool.size())));
  std::vector<int> idx = pool;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t j = i + rng.uniform_int(static_cast<std::uint64_t>(idx.size() - i));
    std::swap(idx[i], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<ModelState::ParamRef> active_params(ModelState& model, const TrainConfig& cfg) {
  std::vector<ModelState::ParamRef> out;
  auto push = [&out](const std::string& name, nk::Matrix& mat, bool decay) {
    if (mat.size() == 0) return;
    out.push_back(ModelState::ParamRef{name, &mat, decay});
  };
  auto idx = [](const char* base, std::size_t i) {
    return std::string(base) + "." + std::to_string(i);
  };
  const bool comp = completion_configured(cfg);
  if (!cfg.topology_only) {
    for (std::size_t t = 0; t < model.W_proj.size(); ++t) {
      push(idx("W_proj", t), model.W_proj[t], true);
      push(idx("b_proj", t), model.b_proj[t], false);
    }
  }
  if (!cfg.topology_only && !cfg.backbone_only) {
    for (std::size_t t = 0; t < model.W_gate.size(); ++t) {
      push(idx("W_gate", t), model.W_gate[t], true);
      push(idx("b_gate", t), model.b_gate[t], false);
    }
  }
  if (cfg.sampling_context && !cfg.backbone_only) {
    for (std::size_t t = 0; t < model.W_ctx.size(); ++t) push(idx("W_ctx", t), model.W_ctx[t], true);
    for (std::size_t t = 0; t < model.beta.size(); ++t) push(idx("beta", t), model.beta[t], false);
  }
  if (!cfg.backbone_only)
    for (std::size_t t = 0; t < model.gamma.size(); ++t) push(idx("gamma", t), model.gamma[t], false);
  for (std::size_t l = 0; l < model.W_self.size(); ++l) {
    for (std::size_t t = 0; t < model.W_self[l].size(); ++t)
      push("W_self." + std::to_string(l) + "." + std::to_string(t), model.W_self[l][t], true);
    for (std::size_t r = 0; r < model.W_rel[l].size(); ++r)
      push("W_rel." + std::to_string(l) + "." + std::to_string(r), model.W_rel[l][r], true);
  }
  push("W_cls", model.W_cls, true);
  push("b_cls", model.b_cls, false);
  if (comp) {
    for (std::size_t t = 0; t < model.W_dec.size(); ++t) {
      push(idx("W_dec", t), model.W_dec[t], true);
      push(idx("b_dec", t), model.b_dec[t], false);
    }
  }
  return out;
}

ForwardOutput forward_pass(const Dataset& ds, const TrainConfig& cfg, ModelState& model,
                           const nk::Matrix& prior, const ForwardPlan& plan, bool want_grads) {
  const HeteroGraph& g = ds.graph;
  const int K = g.num_types();
  const int d = cfg.hidden_dim;
  if (static_cast<int>(plan.budgets.size()) != K)
    throw std::invalid_argument("forward_pass: budget vector size mismatch");
  if (static_cast<int>(plan.p.size()) != K)
    throw std::invalid_argument("forward_pass: policy vector size mismatch");
  const bool bb = cfg.backbone_only;
  const bool topo = cfg.topology_only;
  const bool comp = completion_configured(cfg) && !plan.completion_mask.empty();

  const bool needs_sampling_rng =
      !plan.fixed_samples.has_value() &&
      std::any_of(plan.budgets.begin(), plan.budgets.end(), [](int b) { return b > 0; });
  const bool needs_dropout_rng = plan.train_mode && cfg.dropout > 0.0;
  if ((needs_sampling_rng || needs_dropout_rng) && plan.rng == nullptr)
    throw std::invalid_argument("forward_pass: plan requires a generator");
  Rng fallback(0);  // never consumed: only reached when dropout is inactive
  Rng& rng = plan.rng ? *plan.rng : fallback;

  nk::Tape tape;
  Leases lease{tape, want_grads, {}};
  ForwardOutput out;

  // front end: per-type fused representations
  std::vector<nk::Var> h0_blocks(static_cast<std::size_t>(K));
  std::vector<nk::Var> xt_blocks(static_cast<std::size_t>(K));
  if (topo) {
    for (int t = 0; t < K; ++t)
      h0_blocks[static_cast<std::size_t>(t)] =
          tape.leaf(prior.middleRows(g.type_offset(t), g.type_count(t)));
  } else {
    std::vector<nk::Var> attributed;
    for (int t = 0; t < K; ++t) {
      if (!g.schema().types[static_cast<std::size_t>(t)].attributed) continue;
      nk::Var xt = project_block(tape, ds.features.at(t),
                                 lease(model.W_proj[static_cast<std::size_t>(t)]),
                                 lease(model.b_proj[static_cast<std::size_t>(t)]));
      xt_blocks[static_cast<std::size_t>(t)] = xt;
      attributed.push_back(xt);
    }
    nk::Var warm;
    if (!attributed.empty() && !bb) warm = warm_start_mean(attributed);
    for (int t = 0; t < K; ++t) {
      if (g.schema().types[static_cast<std::size_t>(t)].attributed) continue;
      const int cnt = g.type_count(t);
      if (bb || attributed.empty())
        xt_blocks[static_cast<std::size_t>(t)] = tape.leaf(nk::Matrix::Zero(cnt, d));
      else
        xt_blocks[static_cast<std::size_t>(t)] = nk::broadcast_rows(warm, cnt);
    }
    if (bb) {
      h0_blocks = xt_blocks;
    } else {
      for (int t = 0; t < K; ++t)
        h0_blocks[static_cast<std::size_t>(t)] = gated_fuse_block(
            xt_blocks[static_cast<std::size_t>(t)],
            tape.leaf(prior.middleRows(g.type_offset(t), g.type_count(t))),
            lease(model.W_gate[static_cast<std::size_t>(t)]),
            lease(model.b_gate[static_cast<std::size_t>(t)]));
    }
  }

  // sampled type contexts; a zero budget leaves the block bitwise untouched
  out.samples_used.resize(static_cast<std::size_t>(K));
  std::vector<nk::Var> fused(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const int budget = plan.budgets[ti];
    const int cnt = g.type_count(t);
    if (bb || budget <= 0 || cnt == 0) {
      fused[ti] = h0_blocks[ti];
      continue;
    }
    std::vector<int> sample;
    if (plan.fixed_samples.has_value()) {
      sample = (*plan.fixed_samples)[ti];
    } else {
      sample = sample_representatives(cnt, budget, plan.within_mode,
                                      row_norms(h0_blocks[ti].value()), rng);
    }
    out.samples_used[ti] = sample;
    if (sample.empty()) {
      fused[ti] = h0_blocks[ti];
      continue;
    }
    nk::Var ctx = type_context(h0_blocks[ti], sample);
    fused[ti] = fuse_context(h0_blocks[ti], ctx, lease(model.W_ctx[ti]), lease(model.beta[ti]));
  }

  std::vector<nk::Var> scaled(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    scaled[ti] = bb ? fused[ti]
                    : apply_policy_scaling(fused[ti], lease(model.gamma[ti]), plan.p[ti],
                                           cfg.policy_scaling);
  }
  nk::Var z = nk::concat_rows(scaled);
  z = nk::dropout(z, cfg.dropout, plan.train_mode, rng);

  nk::Var h = z;
  for (std::size_t l = 0; l < model.W_self.size(); ++l) {
    std::vector<nk::Var> ws, wr;
    ws.reserve(model.W_self[l].size());
    wr.reserve(model.W_rel[l].size());
    for (auto& m : model.W_self[l]) ws.push_back(lease(m));
    for (auto& m : model.W_rel[l]) wr.push_back(lease(m));
    h = rgcn_layer(g, h, ws, wr, Activation::relu);
  }
  nk::Var logits = classify(g, h, lease(model.W_cls), lease(model.b_cls));

  std::vector<int> train_labels;
  train_labels.reserve(ds.train_idx.size());
  for (int i : ds.train_idx) train_labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
  nk::Var loss_pred = nk::softmax_cross_entropy(nk::gather_rows(logits, ds.train_idx),
                                                train_labels);

  std::optional<nk::Var> loss_comp;
  if (comp) {
    // group the global mask per type; the weighted sum below equals one mean
    // over all masked rows
    std::vector<std::vector<int>> rows_per_type(static_cast<std::size_t>(K));
    for (int v : plan.completion_mask) {
      const int t = g.type_of(v);
      if (!g.schema().types[static_cast<std::size_t>(t)].attributed)
        throw std::invalid_argument("forward_pass: completion mask covers an attribute-free type");
      rows_per_type[static_cast<std::size_t>(t)].push_back(g.local_of(v));
    }
    const double total = static_cast<double>(plan.completion_mask.size());
    for (int t = 0; t < K; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      if (rows_per_type[ti].empty()) continue;
      nk::Var block = nk::slice_rows(h, g.type_offset(t), g.type_count(t));
      nk::Var dec = decode_block(block, lease(model.W_dec[ti]), lease(model.b_dec[ti]));
      const nk::Matrix target = xt_blocks[ti].value();  // detached reconstruction target
      nk::Var part = nk::scale(nk::masked_mse(dec, target, rows_per_type[ti]),
                               static_cast<double>(rows_per_type[ti].size()) / total);
      loss_comp = loss_comp.has_value() ? nk::add(*loss_comp, part) : part;
    }
  }
  nk::Var loss = total_loss(loss_pred, loss_comp, cfg.lambda);

  out.loss_pred = loss_pred.value()(0, 0);
  out.loss_comp = loss_comp.has_value() ? loss_comp->value()(0, 0) : 0.0;
  out.loss_total = loss.value()(0, 0);
  out.h0 = nk::concat_rows(h0_blocks).value();
  out.h_final = h.value();
  out.logits = logits.value();

  if (want_grads) {
    tape.backward(loss);
    auto active = active_params(model, cfg);
    out.grads.reserve(active.size());
    for (const auto& pr : active) {
      auto it = lease.held.find(pr.mat);
      if (it != lease.held.end())
        out.grads.push_back(tape.grad(it->second));
      else
        out.grads.push_back(nk::Matrix::Zero(pr.mat->rows(), pr.mat->cols()));
    }
  }
  out.tape_bytes = tape.bytes();
  return out;
}

TrainerSetup prepare(const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  {
    const auto issues = validate_dataset(ds);
    if (!issues.empty()) throw std::runtime_error("dataset: " + issues.front());
  }
  const HeteroGraph& g = ds.graph;
  const int K = g.num_types();
  if (cfg.p_min >= 1.0 / K)
    throw std::invalid_argument("config: p_min must be below 1/K for this schema");

  TrainerSetup setup;
  Rng rng(cfg.seed);
  setup.model = ModelState::init(g.schema(), cfg.hidden_dim, cfg.num_layers, rng);
  setup.eta = cfg.eta(K);

  const int n = g.num_nodes();
  std::vector<bool> observed(static_cast<std::size_t>(n), false);
  nk::Matrix x_init = nk::Matrix::Zero(n, cfg.hidden_dim);
  for (int t = 0; t < K; ++t) {
    if (!g.schema().types[static_cast<std::size_t>(t)].attributed) continue;
    const int off = g.type_offset(t), cnt = g.type_count(t);
    x_init.middleRows(off, cnt) =
        (ds.features.at(t) * setup.model.W_proj[static_cast<std::size_t>(t)]).rowwise() +
        setup.model.b_proj[static_cast<std::size_t>(t)].row(0);
    for (int i = 0; i < cnt; ++i) observed[static_cast<std::size_t>(off + i)] = true;
  }

  if (cfg.backbone_only) {
    setup.prior = nk::Matrix::Zero(n, cfg.hidden_dim);
  } else if (cfg.topology_only) {
    // untrained degree embedding, no feature regression
    TopoPrior prior = build_topo_prior(g, x_init, observed, setup.model.topo, "degree",
                                       cfg.propagation_hops, cfg.rho, 0, cfg.learning_rate);
    setup.prior = std::move(prior.t);
  } else {
    TopoPrior prior = build_topo_prior(g, x_init, observed, setup.model.topo,
                                       cfg.pretrain_method, cfg.propagation_hops, cfg.rho,
                                       cfg.pretrain_epochs, cfg.learning_rate);
    setup.prior = std::move(prior.t);
    setup.pretrain_losses = std::move(prior.pretrain_losses);
  }
  return setup;
}

std::vector<int> budgets_for_epoch(const TrainConfig& cfg, const std::vector<double>& p,
                                   const std::vector<int>& type_sizes,
                                   const std::vector<double>& last_reward, Rng& rng) {
  const int K = static_cast<int>(type_sizes.size());
  if (!cfg.sampling_context || cfg.backbone_only)
    return std::vector<int>(static_cast<std::size_t>(K), 0);
  if (cfg.sampling_mode == "proportional") {
    double total = 0.0;
    for (int s : type_sizes) total += s;
    std::vector<double> q(static_cast<std::size_t>(K), 0.0);
    if (total > 0.0)
      for (int t = 0; t < K; ++t)
        q[static_cast<std::size_t>(t)] = type_sizes[static_cast<std::size_t>(t)] / total;
    return allocate_budget(q, cfg.context_budget, type_sizes);
  }
  if (cfg.sampling_mode == "epsilon_greedy") {
    std::vector<double> q(static_cast<std::size_t>(K), 1.0 / K);
    if (!last_reward.empty()) {
      const double u = rng.uniform01();
      if (u >= 0.1) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < last_reward.size(); ++i)
          if (last_reward[i] > last_reward[best]) best = i;
        std::fill(q.begin(), q.end(), 0.0);
        q[best] = 1.0;
      }
    }
    return allocate_budget(q, cfg.context_budget, type_sizes);
  }
  // adaptive and uniform modes both allocate from the policy; uniform changes
  // only the within-type draw
  return allocate_budget(p, cfg.context_budget, type_sizes);
}

RunRecord train(const Dataset& ds, const TrainConfig& cfg) {
  const HeteroGraph& g = ds.graph;
  const int K = g.num_types();
  TrainerSetup setup = prepare(ds, cfg);
  ModelState& model = setup.model;

  std::vector<int> type_sizes(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) type_sizes[static_cast<std::size_t>(t)] = g.type_count(t);
  std::vector<int> attr_pool;
  for (int t = 0; t < K; ++t) {
    if (!g.schema().types[static_cast<std::size_t>(t)].attributed) continue;
    const int off = g.type_offset(t);
    for (int i = 0; i < g.type_count(t); ++i) attr_pool.push_back(off + i);
  }

  PolicyState policy = PolicyState::uniform(K);
  AdamW optimizer(cfg.learning_rate, cfg.weight_decay);
  auto active = active_params(model, cfg);
  const SampleMode within = within_mode_for(cfg);
  const bool comp_on = completion_configured(cfg);

  Rng loop_rng(splitmix64(cfg.seed ^ kLoopSalt));
  std::vector<double> last_reward;
  std::vector<EpochStats> stats;
  std::vector<double> times;
  std::size_t peak_tape = 0;
  int updates = 0;

  double best_val = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  ModelState best_model = model;
  std::vector<double> best_p;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const std::vector<double> p = policy_distribution(policy.w, cfg.p_min);
    const std::vector<int> budgets = budgets_for_epoch(cfg, p, type_sizes, last_reward, loop_rng);
    std::vector<int> mask;
    if (comp_on) {
      Rng mask_rng(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(epoch)));
      mask = make_completion_mask(attr_pool, cfg.mask_ratio, mask_rng);
    }

    const auto t0 = std::chrono::steady_clock::now();
    ForwardOutput tr;
    try {
      ForwardPlan plan{budgets, p, std::nullopt, within, mask, true, &loop_rng};
      tr = forward_pass(ds, cfg, model, setup.prior, plan, true);
      if (!std::isfinite(tr.loss_total))
        throw nk::NonFiniteError("total loss");
      optimizer.step(active, tr.grads);
    } catch (const nk::NonFiniteError& e) {
      throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
    peak_tape = std::max(peak_tape, tr.tape_bytes);

    ForwardOutput ev;
    try {
      ForwardPlan eplan{budgets, p, std::nullopt, within, {}, false, &loop_rng};
      ev = forward_pass(ds, cfg, model, setup.prior, eplan, false);
    } catch (const nk::NonFiniteError& e) {
      throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    peak_tape = std::max(peak_tape, ev.tape_bytes);
    std::vector<int> val_labels;
    val_labels.reserve(ds.val_idx.size());
    for (int i : ds.val_idx) val_labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
    const double val_macro =
        f1_scores(val_labels, argmax_rows(ev.logits, ds.val_idx), ds.num_classes()).macro;

    if (epoch % cfg.update_period == 0) {
      const std::vector<double> reward = normalize_rewards(reward_proxy(g, ev.h_final));
      policy.w = update_weights(policy.w, reward, p, setup.eta);
      last_reward = reward;
      ++updates;
    }

    stats.push_back(EpochStats{epoch, tr.loss_pred, tr.loss_comp, tr.loss_total, val_macro});
    if (val_macro > best_val) {
      best_val = val_macro;
      best_epoch = epoch;
      best_model = model;
      best_p = p;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  const int realized = static_cast<int>(stats.size());

  Rng test_rng(splitmix64(cfg.seed ^ kTestSalt));
  const std::vector<int> test_budgets =
      budgets_for_epoch(cfg, best_p, type_sizes, last_reward, test_rng);
  ForwardPlan tplan{test_budgets, best_p, std::nullopt, within, {}, false, &test_rng};
  ForwardOutput te = forward_pass(ds, cfg, best_model, setup.prior, tplan, false);
  peak_tape = std::max(peak_tape, te.tape_bytes);
  std::vector<int> test_labels;
  test_labels.reserve(ds.test_idx.size());
  for (int i : ds.test_idx) test_labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
  const F1Result test_f1 =
      f1_scores(test_labels, argmax_rows(te.logits, ds.test_idx), ds.num_classes());

  RunRecord rec;
  rec.seed = cfg.seed;
  rec.config = cfg;
  rec.config_hash = config_hash(cfg);
  for (const auto& t : g.schema().types) rec.type_names.push_back(t.name);
  rec.epochs = std::move(stats);
  rec.realized_epochs = realized;
  rec.best_epoch = best_epoch;
  rec.best_val_macro_f1 = best_val;
  rec.test_macro_f1 = test_f1.macro;
  rec.test_micro_f1 = test_f1.micro;
  rec.final_weights = policy.w;
  rec.final_distribution = policy_distribution(policy.w, cfg.p_min);
  rec.policy_updates = updates;
  rec.num_parameters = model.num_parameters();
  rec.peak_memory_bytes = static_cast<std::int64_t>(peak_tape) +
                          3 * 8 * rec.num_parameters;  // parameters plus both moment buffers
  if (!cfg.deterministic && !times.empty()) {
    const double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    double ss = 0.0;
    for (double x : times) ss += (x - mean) * (x - mean);
    rec.time_per_epoch_mean_s = mean;
    rec.time_per_epoch_std_s = times.size() > 1 ? std::sqrt(ss / (times.size() - 1)) : 0.0;
  }
  return rec;
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "full",           "wo_pretrain",       "uniform_sampling", "proportional_sampling",
      "wo_completion",  "topology_only",     "epsilon_greedy",   "wo_policy_scaling",
      "wo_sampling_context", "backbone_only"};
  return names;
}

TrainConfig apply_variant(TrainConfig cfg, const std::string& variant) {
  if (variant == "full") return cfg;
  if (variant == "wo_pretrain") {
    cfg.pretrain_method = "none";
    return cfg;
  }
  if (variant == "uniform_sampling") {
    cfg.sampling_mode = "uniform";
    return cfg;
  }
  if (variant == "proportional_sampling") {
    cfg.sampling_mode = "proportional";
    return cfg;
  }
  if (variant == "wo_completion") {
    cfg.completion = false;
    return cfg;
  }
  if (variant == "topology_only") {
    cfg.topology_only = true;
    return cfg;
  }
  if (variant == "epsilon_greedy") {
    cfg.sampling_mode = "epsilon_greedy";
    return cfg;
  }
  if (variant == "wo_policy_scaling") {
    cfg.policy_scaling = false;
    return cfg;
  }
  if (variant == "wo_sampling_context") {
    cfg.sampling_context = false;
    return cfg;
  }
  if (variant == "backbone_only") {
    cfg.backbone_only = true;
    return cfg;
  }
  std::string all;
  for (const auto& n : variant_names()) all += (all.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown variant '" + variant + "' (expected one of " + all + ")");
}

RunRecord run_variant(const Dataset& ds, const TrainConfig& cfg, const std::string& variant) {
  RunRecord rec = train(ds, apply_variant(cfg, variant));
  rec.variant = variant;
  return rec;
}

std::string run_record_to_json(const RunRecord& rec) {
  json j;
  j["schema_version"] = rec.schema_version;
  j["seed"] = rec.seed;
  j["variant"] = rec.variant;
  j["config"] = json::parse(config_to_json(rec.config));
  j["config_hash"] = rec.config_hash;
  j["type_names"] = rec.type_names;
  json epochs = json::array();
  for (const auto& e : rec.epochs) {
    epochs.push_back(json{{"epoch", e.epoch},
                          {"loss_pred", e.loss_pred},
                          {"loss_comp", e.loss_comp},
                          {"loss_total", e.loss_total},
                          {"val_macro_f1", e.val_macro_f1}});
  }
  j["epochs"] = std::move(epochs);
  j["realized_epochs"] = rec.realized_epochs;
  j["best_epoch"] = rec.best_epoch;
  j["best_val_macro_f1"] = rec.best_val_macro_f1;
  j["test_macro_f1"] = rec.test_macro_f1;
  j["test_micro_f1"] = rec.test_micro_f1;
  j["final_weights"] = rec.final_weights;
  j["final_distribution"] = rec.final_distribution;
  j["policy_updates"] = rec.policy_updates;
  j["time_per_epoch_mean_s"] = rec.time_per_epoch_mean_s;
  j["time_per_epoch_std_s"] = rec.time_per_epoch_std_s;
  j["peak_memory_bytes"] = rec.peak_memory_bytes;
  j["num_parameters"] = rec.num_parameters;
  return j.dump(2);
}

RunRecord run_record_from_json(const std::string& text) {
  json j = json::parse(text);
  RunRecord rec;
  rec.schema_version = j.at("schema_version").get<int>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.variant = j.at("variant").get<std::string>();
  rec.config = parse_config_text(j.at("config").dump(), "record.config");
  rec.config_hash = j.at("config_hash").get<std::string>();
  rec.type_names = j.at("type_names").get<std::vector<std::string>>();
  for (const auto& e : j.at("epochs")) {
    EpochStats s;
    s.epoch = e.at("epoch").get<int>();
    s.loss_pred = e.at("loss_pred").get<double>();
    s.loss_comp = e.at("loss_comp").get<double>();
    s.loss_total = e.at("loss_total").get<double>();
    s.val_macro_f1 = e.at("val_macro_f1").get<double>();
    rec.epochs.push_back(s);
  }
  rec.realized_epochs = j.at("realized_epochs").get<int>();
  rec.best_epoch = j.at("best_epoch").get<int>();
  rec.best_val_macro_f1 = j.at("best_val_macro_f1").get<double>();
  rec.test_macro_f1 = j.at("test_macro_f1").get<double>();
  rec.test_micro_f1 = j.at("test_micro_f1").get<double>();
  rec.final_weights = j.at("final_weights").get<std::vector<double>>();
  rec.final_distribution = j.at("final_distribution").get<std::vector<double>>();
  rec.policy_updates = j.at("policy_updates").get<int>();
  rec.time_per_epoch_mean_s = j.at("time_per_epoch_mean_s").get<double>();
  rec.time_per_epoch_std_s = j.at("time_per_epoch_std_s").get<double>();
  rec.peak_memory_bytes = j.at("peak_memory_bytes").get<std::int64_t>();
  rec.num_parameters = j.at("num_parameters").get<std::int64_t>();
  return rec;
}

}  // namespace hetbandit
