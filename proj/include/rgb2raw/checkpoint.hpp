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

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rgb2raw/model.hpp"

namespace rgb2raw {

/// Optimizer progress stored alongside the weights so training can resume.
struct TrainingState {
    int epoch = 0;              // epochs completed
    long long step = 0;         // optimizer steps completed
    long long adam_step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    nlohmann::json train_config;
};

/// Architecture + weights (fully determines inference), optionally followed by
/// training state. On disk: a magic line, a length-prefixed JSON header, then
/// little-endian float64 arrays.
struct Checkpoint {
    ReRawConfig config;
    std::vector<double> weights;
    std::optional<TrainingState> training;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const ReRawModel& model);
ReRawModel model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace rgb2raw
