// Copyright 2026 The TRR-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trr/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rng.hpp"
#include "trr/checkpoint.hpp"
#include "trr/error.hpp"

namespace trr {

namespace {

using json = nlohmann::json;

InputMode resolve_mode(const TrrConfig& config, const Dataset& data) {
  const InputMode mode = config.mode.value_or(data.kind);
  check(mode == data.kind, ErrorKind::kContract,
        std::string("training mode '") + to_string(mode) +
            "' does not match the dataset kind '" + to_string(data.kind) + "'");
  return mode;
}

void check_compatible(const TrrConfig& config, const SnnModel& model,
                      const Dataset& data) {
  const auto& mc = model.config();
  check(mc.timesteps == config.timesteps, ErrorKind::kContract,
        "model runs T=" + std::to_string(mc.timesteps) + " but training uses T=" +
            std::to_string(config.timesteps));
  if (data.kind == InputMode::kTemporal) {
    check(data.timesteps == config.timesteps, ErrorKind::kContract,
          "dataset has T=" + std::to_string(data.timesteps) +
              " but training uses T=" + std::to_string(config.timesteps));
  }
  check(mc.in_channels == data.channels && mc.height == data.height &&
            mc.width == data.width,
        ErrorKind::kContract,
        "model input " + std::to_string(mc.in_channels) + "x" +
            std::to_string(mc.height) + "x" + std::to_string(mc.width) +
            " does not match dataset " + std::to_string(data.channels) + "x" +
            std::to_string(data.height) + "x" + std::to_string(data.width));
  check(mc.classes == data.classes, ErrorKind::kContract,
        "model has " + std::to_string(mc.classes) + " classes, dataset has " +
            std::to_string(data.classes));
}

std::string slug(const std::string& label) {
  if (label == "Baseline") return "baseline";
  if (label == "+TR") return "tr";
  if (label == "+FH") return "fh";
  return "trr";
}

json loss_json(const LossBreakdown& l) {
  return json{{"ce", l.ce},
              {"consistency", l.consistency},
              {"hybrid_ce", l.hybrid_ce},
              {"total", l.total},
              {"alpha", l.alpha},
              {"consistency_on", l.consistency_on},
              {"hybrid_on", l.hybrid_on}};
}

void write_line(std::ofstream& out, const json& j) {
  out << j.dump() << '\n';
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing training log");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void TrrConfig::validate() const {
  check(timesteps >= 1, ErrorKind::kContract, "timesteps must be >= 1");
  check(alpha >= 0.0f && alpha <= 1.0f, ErrorKind::kContract, "alpha must lie in [0,1]");
  check(t_tem > 0.0f, ErrorKind::kContract, "t_tem must be positive");
  check(reversal_location <= kNumStages, ErrorKind::kContract,
        "reversal_location must lie in [0,4]");
  check(lr > 0.0f && momentum >= 0.0f && weight_decay >= 0.0f, ErrorKind::kContract,
        "lr must be positive; momentum and weight_decay non-negative");
  check(batch_size >= 1, ErrorKind::kContract, "batch_size must be >= 1");
  check(lr_decay_every >= 1 && lr_decay_factor > 0.0f, ErrorKind::kContract,
        "lr_decay_every must be >= 1 and lr_decay_factor positive");
}

void sgd_momentum_step(std::span<float> param, std::span<const float> grad,
                       std::span<float> velocity, float lr, float momentum,
                       float weight_decay) {
  check(param.size() == grad.size() && param.size() == velocity.size(),
        ErrorKind::kDimension, "sgd step: parameter, gradient and velocity sizes differ");
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] + (grad[i] + weight_decay * param[i]);
    param[i] = param[i] - lr * velocity[i];
  }
}

SgdMomentum::SgdMomentum(std::vector<Tensor> params, float momentum,
                         float weight_decay)
    : params_(std::move(params)), momentum_(momentum), weight_decay_(weight_decay) {
  for (const auto& p : params_) velocity_.emplace_back(p.numel(), 0.0f);
}

void SgdMomentum::step(float lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    // A parameter that took no part in the loss has an all-zero gradient.
    const std::vector<float> zeros = p.has_grad() ? std::vector<float>{}
                                                  : std::vector<float>(p.numel(), 0.0f);
    const std::span<const float> g = p.has_grad() ? p.grad() : std::span<const float>(zeros);
    sgd_momentum_step(p.mutable_data(), g, velocity_[i], lr, momentum_, weight_decay_);
  }
}

float scheduled_lr(const TrrConfig& config, std::size_t epoch) {
  float lr = config.lr;
  for (std::size_t k = 0; k < epoch / config.lr_decay_every; ++k) lr *= config.lr_decay_factor;
  return lr;
}

std::vector<std::size_t> epoch_order(std::size_t count, std::uint64_t seed,
                                     std::size_t epoch) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  detail::SplitMix64 rng(detail::mix_seed(seed, 0x65706f6368ull + epoch));
  for (std::size_t i = count; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

std::uint64_t iteration_shuffle_seed(std::uint64_t seed, std::size_t iteration) {
  return detail::mix_seed(seed, 0x7368756666ull + iteration);
}

SnnModel make_calibrated_model(const ModelConfig& config, std::uint64_t seed,
                               const Dataset& train_set) {
  SnnModel model(config, seed);
  check(train_set.size() > 0, ErrorKind::kContract, "calibration needs training data");
  std::vector<std::size_t> idx(std::min<std::size_t>(128, train_set.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  model.calibrate(make_batch(train_set, idx).input, train_set.kind, 0.0f, 1.0f);
  return model;
}

std::vector<std::int32_t> argmax_rows(const Tensor& logits) {
  check(logits.rank() == 2, ErrorKind::kDimension, "argmax_rows expects [B,K]");
  const std::size_t rows = logits.dim(0), cols = logits.dim(1);
  const auto v = logits.data();
  std::vector<std::int32_t> out(rows);
  for (std::size_t b = 0; b < rows; ++b) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < cols; ++k) {
      if (v[b * cols + k] > v[b * cols + best]) best = k;
    }
    out[b] = static_cast<std::int32_t>(best);
  }
  return out;
}

EvalResult evaluate(const SnnModel& model, const Dataset& data, std::size_t batch_size) {
  check(data.size() > 0, ErrorKind::kContract, "evaluate: empty dataset");
  check(batch_size >= 1, ErrorKind::kContract, "evaluate: batch size must be >= 1");
  NoGradGuard no_grad;
  EvalResult r;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t b0 = 0; b0 < data.size(); b0 += batch_size) {
    idx.clear();
    for (std::size_t i = b0; i < std::min(data.size(), b0 + batch_size); ++i) idx.push_back(i);
    const Batch batch = make_batch(data, idx);
    ForwardTrace trace;
    const Tensor logits = forward_plain(model, batch.input, data.kind, &trace);
    const auto pred = argmax_rows(logits);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == batch.labels[i]) ++correct;
      r.predictions.push_back(pred[i]);
    }
    for (std::size_t s = 0; s < kNumStages; ++s) {
      for (float v : trace.stage_spikes[s].data()) r.spike_counts[s] += v != 0.0f;
      r.elements[s] += trace.stage_spikes[s].numel();
    }
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  for (std::size_t s = 0; s < kNumStages; ++s) {
    r.asfr[s] = static_cast<double>(r.spike_counts[s]) / static_cast<double>(r.elements[s]);
  }
  return r;
}

StepOutput training_step_loss(const TrrConfig& config, const SnnModel& model,
                              const Batch& batch, InputMode mode,
                              std::uint64_t shuffle_seed) {
  TrrLossWeights weights;
  weights.t_tem = config.t_tem;
  weights.consistency_stop_grad = config.consistency_stop_grad;
  if (config.is_vanilla()) {
    weights.alpha = 0.0f;
    weights.enable_consistency = false;
    Tensor z = forward_plain(model, batch.input, mode);
    return {trr_total_loss(LogitsPair{z, z, {}}, batch.labels, weights), z};
  }
  TrrForwardOptions opts;
  opts.mode = mode;
  opts.reversal_location = config.reversal_location;
  opts.perturbation = config.perturbation;
  opts.shuffle_seed = shuffle_seed;
  opts.hybridize = config.enable_hybridization;
  weights.alpha = config.enable_hybridization ? config.alpha : 0.0f;
  weights.enable_consistency = config.enable_consistency;
  LogitsPair logits = forward_trr(model, batch.input, opts);
  return {trr_total_loss(logits, batch.labels, weights), logits.original};
}

TrainReport train(const TrrConfig& config, SnnModel& model, const Dataset& train_set,
                  const Dataset* test_set, const TrainOptions& options) {
  using clock = std::chrono::steady_clock;
  config.validate();
  check(train_set.size() > 0, ErrorKind::kContract, "train: empty training set");
  const InputMode mode = resolve_mode(config, train_set);
  check_compatible(config, model, train_set);
  if (test_set) check_compatible(config, model, *test_set);

  std::ofstream log;
  const bool write = !options.output_dir.empty();
  if (write) {
    std::filesystem::create_directories(options.output_dir);
    log.open(options.output_dir / "log.jsonl");
    check(static_cast<bool>(log), ErrorKind::kIo,
          "cannot write " + (options.output_dir / "log.jsonl").string());
  }

  std::vector<Tensor> params;
  for (auto& p : model.parameters()) params.push_back(p.tensor);
  SgdMomentum optimizer(params, config.momentum, config.weight_decay);

  TrainReport report;
  const auto run_start = clock::now();
  std::size_t iteration = 0;
  std::vector<std::size_t> idx;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_start = clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = scheduled_lr(config, epoch);
    const auto order = epoch_order(train_set.size(), config.seed, epoch);
    std::size_t steps = 0, correct = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(b0),
                 order.begin() + static_cast<std::ptrdiff_t>(
                                     std::min(order.size(), b0 + config.batch_size)));
      const Batch batch = make_batch(train_set, idx);
      model.zero_grad();
      StepOutput out = training_step_loss(config, model, batch, mode,
                                          iteration_shuffle_seed(config.seed, iteration));
      const LossBreakdown& l = out.loss.parts;
      if (!std::isfinite(l.total)) {
        fail(ErrorKind::kNumeric,
             "non-finite loss at epoch " + std::to_string(epoch) + " iteration " +
                 std::to_string(iteration) + ": ce=" + fmt(l.ce) +
                 " consistency=" + fmt(l.consistency) + " hybrid_ce=" + fmt(l.hybrid_ce));
      }
      out.loss.total.backward();
      optimizer.step(rec.lr);

      const auto pred = argmax_rows(out.logits);
      for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == batch.labels[i];
      rec.train_ce += l.ce;
      rec.train_consistency += l.consistency;
      rec.train_hybrid_ce += l.hybrid_ce;
      rec.train_total += l.total;
      ++steps;

      IterationRecord it{epoch, iteration, rec.lr, l};
      report.iterations.push_back(it);
      if (options.on_iteration) options.on_iteration(it);
      if (write) {
        json j{{"type", "iteration"}, {"epoch", epoch}, {"iteration", iteration},
               {"lr", rec.lr}, {"loss", loss_json(l)}};
        write_line(log, j);
      }
      ++iteration;
    }
    const double n = static_cast<double>(steps);
    rec.train_ce /= n;
    rec.train_consistency /= n;
    rec.train_hybrid_ce /= n;
    rec.train_total /= n;
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    const bool last = epoch + 1 == config.epochs;
    const bool due = options.eval_interval > 0 && (epoch + 1) % options.eval_interval == 0;
    if (test_set && (last || due)) rec.test = evaluate(model, *test_set, options.eval_batch_size);
    rec.wall_seconds = std::chrono::duration<double>(clock::now() - epoch_start).count();

    if (write) {
      json j{{"type", "epoch"},
             {"epoch", epoch},
             {"lr", rec.lr},
             {"train_ce", rec.train_ce},
             {"train_consistency", rec.train_consistency},
             {"train_hybrid_ce", rec.train_hybrid_ce},
             {"train_total", rec.train_total},
             {"train_accuracy", rec.train_accuracy}};
      if (rec.test) {
        j["test_accuracy"] = rec.test->accuracy;
        j["test_asfr"] = rec.test->asfr;
      }
      write_line(log, j);
    }
    report.epochs.push_back(std::move(rec));
  }
  report.wall_seconds = std::chrono::duration<double>(clock::now() - run_start).count();

  if (write) {
    std::ofstream summary(options.output_dir / "summary.csv");
    summary << "epoch,lr,train_ce,train_consistency,train_hybrid_ce,train_total,"
               "train_accuracy,test_accuracy,asfr_stage1,asfr_stage2,asfr_stage3,"
               "asfr_stage4\n";
    for (const auto& e : report.epochs) {
      summary << e.epoch << ',' << fmt(e.lr) << ',' << fmt(e.train_ce) << ','
              << fmt(e.train_consistency) << ',' << fmt(e.train_hybrid_ce) << ','
              << fmt(e.train_total) << ',' << fmt(e.train_accuracy) << ',';
      if (e.test) {
        summary << fmt(e.test->accuracy);
        for (double a : e.test->asfr) summary << ',' << fmt(a);
      } else {
        summary << ",,,,";
      }
      summary << '\n';
    }
    check(static_cast<bool>(summary), ErrorKind::kIo, "failed writing summary.csv");

    // Wall-clock numbers live apart from the log so the log stays
    // reproducible bit for bit.
    std::ofstream timing(options.output_dir / "timing.csv");
    timing << "epoch,wall_seconds\n";
    for (const auto& e : report.epochs) timing << e.epoch << ',' << fmt(e.wall_seconds) << '\n';
    timing << "total," << fmt(report.wall_seconds) << '\n';

    report.checkpoint_path = options.output_dir / "model.ckpt";
    save_checkpoint(model, report.checkpoint_path);
  }
  return report;
}

std::vector<AblationVariant> ablation_variants() {
  return {{"Baseline", false, false},
          {"+TR", true, false},
          {"+FH", false, true},
          {"TRR", true, true}};
}

AblationTable run_ablation_suite(const TrrConfig& base, const ModelConfig& model_config,
                                 const DatasetSplit& data,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::filesystem::path& output_dir) {
  check(!seeds.empty(), ErrorKind::kContract, "ablation needs at least one seed");
  AblationTable table;
  table.seeds = seeds;
  for (const auto& v : ablation_variants()) table.rows.push_back({v, {}, 0.0, 0.0, {}});

  for (const auto seed : seeds) {
    for (auto& row : table.rows) {
      TrrConfig cfg = base;
      cfg.seed = seed;
      cfg.enable_consistency = row.variant.consistency;
      cfg.enable_hybridization = row.variant.hybridization;
      if (!row.variant.consistency && !row.variant.hybridization) {
        cfg.perturbation = Perturbation::kNone;
      } else if (base.perturbation != Perturbation::kShuffle) {
        cfg.perturbation = Perturbation::kReverse;
      }
      SnnModel model = make_calibrated_model(model_config, seed, data.train);
      TrainOptions opts;
      opts.eval_interval = 0;
      if (!output_dir.empty()) {
        opts.output_dir = output_dir / (slug(row.variant.label) + "_seed" + std::to_string(seed));
      }
      const auto report = train(cfg, model, data.train, &data.test, opts);
      const auto& result = *report.epochs.back().test;
      row.accuracy.push_back(result.accuracy);
      for (std::size_t s = 0; s < kNumStages; ++s) row.mean_asfr[s] += result.asfr[s];
    }
  }
  const double n = static_cast<double>(seeds.size());
  for (auto& row : table.rows) {
    double sum = 0.0;
    for (double a : row.accuracy) sum += a;
    row.mean_accuracy = sum / n;
    for (auto& a : row.mean_asfr) a /= n;
  }
  for (auto& row : table.rows) {
    row.delta_vs_baseline = 100.0 * (row.mean_accuracy - table.rows[0].mean_accuracy);
  }
  return table;
}

void write_ablation_csv(const AblationTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << "variant,temporal_reversal,feature_hybridization,mean_accuracy,delta_vs_baseline";
  for (auto s : table.seeds) out << ",accuracy_seed" << s;
  out << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& row : table.rows) {
    out << row.variant.label << ',' << (row.variant.consistency ? "yes" : "no") << ','
        << (row.variant.hybridization ? "yes" : "no") << ',' << 100.0 * row.mean_accuracy
        << ',' << row.delta_vs_baseline;
    for (double a : row.accuracy) out << ',' << 100.0 * a;
    out << '\n';
  }
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

void write_ablation_asfr_csv(const AblationTable& table,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  check(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << "variant,stage1,stage2,stage3,stage4\n";
  for (const auto& row : table.rows) {
    out << row.variant.label;
    for (double a : row.mean_asfr) out << ',' << fmt(a);
    out << '\n';
  }
  check(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace trr
