// Copyright 2026 The rgb2raw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rgb2raw/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rgb2raw/error.hpp"
#include "rgb2raw/resize.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;
using nlohmann::json;

// --- Config ----------------------------------------------------------------

void TrainConfig::validate() const {
    auto violation = [](const std::string& what) { fail(ErrorKind::Config, what); };
    if (batch_size < 1) violation("batch_size must be >= 1");
    if (epochs < 1 || restart_period_epochs < 1) violation("epochs and restart_period_epochs must be >= 1");
    if (epochs % restart_period_epochs != 0) {
        violation("epochs (" + std::to_string(epochs) + ") must be divisible by restart_period_epochs (" +
                  std::to_string(restart_period_epochs) + ")");
    }
    if (!(lr_floor > 0.0) || !(lr_floor < lr_start)) violation("learning rates must satisfy 0 < lr_floor < lr_start");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0) violation("validation_fraction must lie in [0, 1)");
    if (grad_clip_norm < 0.0) violation("grad_clip_norm must be >= 0");
    loss.validate();
    model.validate();
}

void to_json(json& j, const TrainConfig& c) {
    j = json{{"batch_size", c.batch_size},
             {"epochs", c.epochs},
             {"restart_period_epochs", c.restart_period_epochs},
             {"lr_start", c.lr_start},
             {"lr_floor", c.lr_floor},
             {"seed", c.seed},
             {"validation_fraction", c.validation_fraction},
             {"grad_clip_norm", c.grad_clip_norm},
             {"random_context_crop", c.random_context_crop},
             {"loss", to_string(c.loss.kind)},
             {"epsilon", c.loss.epsilon},
             {"model", c.model}};
}

void from_json(const json& j, TrainConfig& c) {
    const TrainConfig d;
    c.batch_size = j.value("batch_size", d.batch_size);
    c.epochs = j.value("epochs", d.epochs);
    c.restart_period_epochs = j.value("restart_period_epochs", d.restart_period_epochs);
    c.lr_start = j.value("lr_start", d.lr_start);
    c.lr_floor = j.value("lr_floor", d.lr_floor);
    c.seed = j.value("seed", d.seed);
    c.validation_fraction = j.value("validation_fraction", d.validation_fraction);
    c.grad_clip_norm = j.value("grad_clip_norm", d.grad_clip_norm);
    c.random_context_crop = j.value("random_context_crop", d.random_context_crop);
    c.loss.kind = parse_loss_kind(j.value("loss", to_string(d.loss.kind)));
    c.loss.epsilon = j.value("epsilon", d.loss.epsilon);
    c.model = j.contains("model") ? j.at("model").get<ReRawConfig>() : d.model;
}

TrainConfig load_train_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open config " + path.string());
    TrainConfig cfg;
    try {
        cfg = json::parse(in, nullptr, true, /*ignore_comments=*/true).get<TrainConfig>();
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, path.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

// --- Schedule / optimizer --------------------------------------------------

double lr_schedule(long long step, long long steps_per_epoch, const TrainConfig& cfg) {
    if (step < 0 || steps_per_epoch < 1) fail(ErrorKind::Parameter, "lr_schedule needs step >= 0 and steps_per_epoch >= 1");
    const long long window = steps_per_epoch * cfg.restart_period_epochs;
    const double t = static_cast<double>(step % window) / static_cast<double>(window);
    return cfg.lr_floor + 0.5 * (cfg.lr_start - cfg.lr_floor) * (1.0 + std::cos(std::numbers::pi * t));
}

void Adam::step(const nn::ParameterList& params, double lr) {
    std::size_t total = 0;
    for (const auto* p : params) total += p->value.size();
    if (state_.first_moment.size() != total) {
        state_.first_moment.assign(total, 0.0);
        state_.second_moment.assign(total, 0.0);
        state_.step = 0;
    }
    ++state_.step;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(state_.step));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(state_.step));
    std::size_t k = 0;
    for (auto* p : params) {
        double* w = p->value.data();
        const double* g = p->grad.data();
        for (Eigen::Index i = 0; i < p->value.size(); ++i, ++k) {
            double& m = state_.first_moment[k];
            double& v = state_.second_moment[k];
            m = beta1_ * m + (1.0 - beta1_) * g[i];
            v = beta2_ * v + (1.0 - beta2_) * g[i] * g[i];
            w[i] -= lr * (m / c1) / (std::sqrt(v / c2) + epsilon_);
        }
    }
}

// --- Batching --------------------------------------------------------------

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr int kNetworkOffset = (kRgbPatchSide - kNetworkInputSide) / 2;  // 1

}  // namespace

BatchInputs make_batch(const std::vector<const PatchPair*>& pairs, std::optional<std::uint64_t> crop_seed,
                       int context_side) {
    BatchInputs in;
    const int pixels = kRawPatchSide * kRawPatchSide;
    in.target.resize(static_cast<Eigen::Index>(pairs.size()) * pixels, kRawChannels);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const PatchPair& p = *pairs[i];
        if (p.rgb_patch.height() != kRgbPatchSide || p.raw_patch.height() != kRawPatchSide || !p.context) {
            fail(ErrorKind::Shape, "patch pair " + std::to_string(i) + " has unexpected geometry");
        }
        in.rgb.push_back(p.rgb_patch.crop(kNetworkOffset, kNetworkOffset, kNetworkInputSide, kNetworkInputSide));
        RgbImage ctx = crop_seed ? crop_context(*p.context, mix(*crop_seed, i)) : *p.context;
        // Smaller encoders see a further downscale of the 128x128 context.
        if (ctx.height() != context_side) ctx = resize_bilinear(ctx, context_side, context_side);
        in.context.push_back(std::move(ctx));
        const auto raw = p.raw_patch.data();
        std::copy(raw.begin(), raw.end(), in.target.data() + i * raw.size());
    }
    return in;
}

std::string BatchDiagnostics::describe() const {
    std::ostringstream os;
    os << "non-finite loss at step " << step << " (lr " << lr << "; batch rgb mean " << rgb_mean << ", raw mean "
       << raw_mean << ", raw max " << raw_max << ")";
    return os.str();
}

// --- Trainer ---------------------------------------------------------------

Trainer::Trainer(TrainConfig config, std::vector<PatchPair> dataset)
    : config_(std::move(config)), model_((config_.validate(), config_.model), config_.seed) {
    if (dataset.empty()) fail(ErrorKind::Dataset, "cannot train on an empty patch dataset");
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix(config_.seed, 0x5eed));
    std::shuffle(order.begin(), order.end(), rng);
    auto held_out = static_cast<std::size_t>(std::lround(config_.validation_fraction * dataset.size()));
    held_out = std::min(held_out, dataset.size() - 1);
    std::vector<bool> is_val(dataset.size(), false);
    for (std::size_t k = 0; k < held_out; ++k) is_val[order[k]] = true;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (is_val[i] ? validation_ : train_).push_back(std::move(dataset[i]));
    }
}

long long Trainer::steps_per_epoch() const noexcept {
    return (static_cast<long long>(train_.size()) + config_.batch_size - 1) / config_.batch_size;
}

double Trainer::evaluate_loss(const std::vector<PatchPair>& pairs) const {
    double weighted = 0.0;
    std::size_t count = 0;
    for (std::size_t start = 0; start < pairs.size(); start += config_.batch_size) {
        const std::size_t end = std::min(pairs.size(), start + static_cast<std::size_t>(config_.batch_size));
        std::vector<const PatchPair*> batch;
        for (std::size_t i = start; i < end; ++i) batch.push_back(&pairs[i]);
        const BatchInputs in = make_batch(batch, std::nullopt, config_.model.context_side);
        const ForwardResult r = model_.forward(in.rgb, in.context);
        const auto targets = make_gamma_targets(in.target, config_.model.gammas);
        weighted += composite_loss(config_.loss, r.final, in.target, r.candidates, targets).total * batch.size();
        count += batch.size();
    }
    return count ? weighted / count : 0.0;
}

double Trainer::validation_loss() const {
    if (!validation_.empty()) return evaluate_loss(validation_);
    // Nothing held out (tiny datasets): report on the first training batch.
    const std::size_t n = std::min(train_.size(), static_cast<std::size_t>(config_.batch_size));
    return evaluate_loss(std::vector<PatchPair>(train_.begin(), train_.begin() + static_cast<std::ptrdiff_t>(n)));
}

double Trainer::train_step(const std::vector<const PatchPair*>& batch, double lr, std::uint64_t crop_seed) {
    const BatchInputs in =
        make_batch(batch, config_.random_context_crop ? std::optional<std::uint64_t>(crop_seed) : std::nullopt,
                   config_.model.context_side);
    ForwardCache cache;
    const ForwardResult r = model_.forward(in.rgb, in.context, &cache);
    const auto targets = make_gamma_targets(in.target, config_.model.gammas);
    const CompositeLoss loss = composite_loss(config_.loss, r.final, in.target, r.candidates, targets, true);
    if (!std::isfinite(loss.total)) {
        BatchDiagnostics d;
        d.lr = lr;
        d.step = adam_.state().step;
        double rgb_sum = 0.0;
        std::size_t rgb_n = 0;
        for (const auto& img : in.rgb) {
            for (double v : img.data()) rgb_sum += v;
            rgb_n += img.size();
        }
        d.rgb_mean = rgb_sum / static_cast<double>(std::max<std::size_t>(rgb_n, 1));
        d.raw_mean = in.target.mean();
        d.raw_max = in.target.maxCoeff();
        fail(ErrorKind::Numerical, d.describe());
    }
    model_.zero_grad();
    model_.backward(cache, r, loss.d_final, loss.d_candidates);
    const auto params = model_.parameters();
    if (config_.grad_clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto* p : params) sq += p->grad.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > config_.grad_clip_norm) {
            for (auto* p : params) p->grad *= config_.grad_clip_norm / norm;
        }
    }
    adam_.step(params, lr);
    return loss.total;
}

void Trainer::save_checkpoint(const fs::path& path, int epoch) const {
    Checkpoint ckpt = make_checkpoint(model_);
    TrainingState state;
    state.epoch = epoch;
    state.step = static_cast<long long>(epoch) * steps_per_epoch();
    state.adam_step = adam_.state().step;
    state.first_moment = adam_.state().first_moment;
    state.second_moment = adam_.state().second_moment;
    if (state.first_moment.empty()) {
        state.first_moment.assign(ckpt.weights.size(), 0.0);
        state.second_moment.assign(ckpt.weights.size(), 0.0);
    }
    state.train_config = config_;
    ckpt.training = std::move(state);
    rgb2raw::save_checkpoint(path, ckpt);
}

void Trainer::restore(const Checkpoint& ckpt) {
    if (!(ckpt.config == config_.model)) {
        fail(ErrorKind::Checkpoint, "checkpoint architecture does not match the training config");
    }
    model_.load_weights(ckpt.weights);
    if (ckpt.training) {
        Adam::State s;
        s.step = ckpt.training->adam_step;
        s.first_moment = ckpt.training->first_moment;
        s.second_moment = ckpt.training->second_moment;
        adam_.set_state(std::move(s));
        start_epoch_ = ckpt.training->epoch;
    }
}

TrainResult Trainer::run(const TrainOptions& options) {
    if (options.resume_from) restore(load_checkpoint(*options.resume_from));

    TrainResult result;
    std::ofstream csv;
    if (!options.output_dir.empty()) {
        fs::create_directories(options.output_dir);
        const fs::path csv_path = options.output_dir / "metrics.csv";
        const bool fresh = !fs::exists(csv_path);
        csv.open(csv_path, std::ios::app);
        if (!csv) fail(ErrorKind::Io, "cannot open " + csv_path.string());
        if (fresh) csv << "step,epoch,lr,train_loss,val_loss\n";
        csv.precision(10);
    }

    const long long spe = steps_per_epoch();
    const int last_epoch = options.max_epochs >= 0 ? std::min(config_.epochs, start_epoch_ + options.max_epochs)
                                                   : config_.epochs;
    std::vector<std::size_t> order(train_.size());
    long long global_step = static_cast<long long>(start_epoch_) * spe;

    for (int epoch = start_epoch_; epoch < last_epoch; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(mix(config_.seed, 1000 + static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_sum = 0.0;
        long long epoch_steps = 0;
        bool stop = false;
        for (long long k = 0; k < spe; ++k) {
            if (options.max_steps >= 0 && result.total_steps >= options.max_steps) {
                stop = true;
                break;
            }
            std::vector<const PatchPair*> batch;
            const auto first = static_cast<std::size_t>(k * config_.batch_size);
            const std::size_t last = std::min(train_.size(), first + static_cast<std::size_t>(config_.batch_size));
            for (std::size_t i = first; i < last; ++i) batch.push_back(&train_[order[i]]);

            const double lr = lr_schedule(global_step, spe, config_);
            StepRecord rec;
            rec.step = global_step;
            rec.epoch = epoch;
            rec.lr = lr;
            rec.train_loss = train_step(batch, lr, mix(config_.seed, static_cast<std::uint64_t>(global_step)));
            epoch_sum += rec.train_loss;
            ++epoch_steps;
            ++global_step;
            ++result.total_steps;
            if (k + 1 == spe) rec.val_loss = validation_loss();
            if (csv.is_open()) {
                csv << rec.step << ',' << rec.epoch << ',' << rec.lr << ',' << rec.train_loss << ',';
                if (rec.val_loss) csv << *rec.val_loss;
                csv << '\n';
            }
            if (options.on_step) options.on_step(rec);
            result.steps.push_back(rec);
        }
        if (stop) break;

        EpochRecord er;
        er.epoch = epoch;
        er.train_loss = epoch_steps ? epoch_sum / static_cast<double>(epoch_steps) : 0.0;
        er.val_loss = result.steps.back().val_loss.value_or(0.0);
        result.epochs.push_back(er);

        const int completed = epoch + 1;
        if (!options.output_dir.empty() &&
            (completed % config_.restart_period_epochs == 0 || completed == config_.epochs)) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s-epoch%03d.ckpt", options.checkpoint_stem.c_str(), completed);
            save_checkpoint(options.output_dir / name, completed);
            result.checkpoints.push_back(options.output_dir / name);
        }
    }
    start_epoch_ = result.epochs.empty() ? start_epoch_ : result.epochs.back().epoch + 1;

    result.final_val_loss = validation_loss();
    if (!options.output_dir.empty()) {
        const fs::path final_path = options.output_dir / (options.checkpoint_stem + ".ckpt");
        save_checkpoint(final_path, start_epoch_);
        result.checkpoints.push_back(final_path);
    }
    return result;
}

}  // namespace rgb2raw
