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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgb2raw/checkpoint.hpp"
#include "rgb2raw/model.hpp"
#include "rgb2raw/objective.hpp"
#include "rgb2raw/sampling.hpp"

namespace rgb2raw {

struct TrainConfig {
    int batch_size = 32;
    int epochs = 128;
    int restart_period_epochs = 16;
    double lr_start = 1e-3;
    double lr_floor = 1e-5;
    std::uint64_t seed = 0;
    double validation_fraction = 0.05;
    double grad_clip_norm = 0.0;  // 0 disables clipping
    bool random_context_crop = true;
    LossConfig loss;
    ReRawConfig model;

    /// Throws ErrorKind::Config naming the violated invariant.
    void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
TrainConfig load_train_config(const std::filesystem::path& path);

/// Cosine annealing from lr_start to lr_floor over each restart window,
/// resetting to lr_start at every window boundary. The last step of a window
/// sits just above lr_floor.
double lr_schedule(long long step, long long steps_per_epoch, const TrainConfig& cfg);

/// Adaptive-moment optimizer (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
public:
    struct State {
        long long step = 0;
        std::vector<double> first_moment;
        std::vector<double> second_moment;
    };

    explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
        : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

    void step(const nn::ParameterList& params, double lr);

    const State& state() const noexcept { return state_; }
    void set_state(State s) { state_ = std::move(s); }

private:
    double beta1_;
    double beta2_;
    double epsilon_;
    State state_;
};

struct StepRecord {
    long long step = 0;
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    std::optional<double> val_loss;  // set on the last step of each epoch
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;  // mean over the epoch's steps
    double val_loss = 0.0;
};

struct TrainOptions {
    std::filesystem::path output_dir;   // empty: no checkpoints or CSV
    std::string checkpoint_stem = "model";
    std::optional<std::filesystem::path> resume_from;
    int max_epochs = -1;                // stop early after this many epochs (-1: cfg.epochs)
    long long max_steps = -1;           // stop early after this many optimizer steps
    std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
    std::vector<std::filesystem::path> checkpoints;
    double final_val_loss = 0.0;
    long long total_steps = 0;
};

/// Batch-level statistics attached to a NaN/Inf abort.
struct BatchDiagnostics {
    long long step = 0;
    double lr = 0.0;
    double rgb_mean = 0.0;
    double raw_mean = 0.0;
    double raw_max = 0.0;
    std::string describe() const;
};

/// Single-writer optimizer loop over a patch dataset.
class Trainer {
public:
    Trainer(TrainConfig config, std::vector<PatchPair> dataset);

    const TrainConfig& config() const noexcept { return config_; }
    ReRawModel& model() noexcept { return model_; }
    const ReRawModel& model() const noexcept { return model_; }

    std::size_t train_size() const noexcept { return train_.size(); }
    std::size_t validation_size() const noexcept { return validation_.size(); }
    long long steps_per_epoch() const noexcept;

    TrainResult run(const TrainOptions& options = {});

    /// Composite loss of the model on `pairs` in evaluation mode (no crop).
    double evaluate_loss(const std::vector<PatchPair>& pairs) const;
    double validation_loss() const;

    /// One optimizer step on an explicit batch; returns the batch loss.
    double train_step(const std::vector<const PatchPair*>& batch, double lr, std::uint64_t crop_seed);

    void save_checkpoint(const std::filesystem::path& path, int epoch) const;
    void restore(const Checkpoint& ckpt);

private:
    TrainConfig config_;
    std::vector<PatchPair> train_;
    std::vector<PatchPair> validation_;
    ReRawModel model_;
    Adam adam_;
    int start_epoch_ = 0;
};

/// Assembles network inputs: central 66x66 RGB crops and context images
/// (random training crop when `crop_seed` is set), resized to `context_side`.
struct BatchInputs {
    std::vector<Image> rgb;
    std::vector<Image> context;
    nn::Matrix target;  // (batch * 32 * 32) x 4
};
BatchInputs make_batch(const std::vector<const PatchPair*>& pairs, std::optional<std::uint64_t> crop_seed,
                       int context_side = kContextSide);

}  // namespace rgb2raw
