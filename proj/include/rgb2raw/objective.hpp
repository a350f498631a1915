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

#include <span>
#include <string>
#include <vector>

#include "rgb2raw/image.hpp"
#include "rgb2raw/nn/layers.hpp"

namespace rgb2raw {

enum class LossKind { L1, L2, HardLog };

struct LossConfig {
    LossKind kind = LossKind::HardLog;
    double epsilon = 1e-6;

    void validate() const;
};

LossKind parse_loss_kind(const std::string& text);  // "l1" | "l2" | "hln"
std::string to_string(LossKind kind);

/// -(1/N) * sum ln(1 - min(|pred - target|, 1) + epsilon)
double hard_log_loss(std::span<const double> pred, std::span<const double> target, double epsilon = 1e-6);
double l1_loss(std::span<const double> pred, std::span<const double> target);
double l2_loss(std::span<const double> pred, std::span<const double> target);

/// Mean loss of the configured kind. When `grad` is non-empty it receives
/// d(loss)/d(pred) scaled by `grad_scale`, added to its current contents.
double loss(const LossConfig& cfg, std::span<const double> pred, std::span<const double> target,
            std::span<double> grad = {}, double grad_scale = 1.0);

/// target^gamma_i for every rung of the ladder.
std::vector<Image> make_gamma_targets(const Image& raw_target, std::span<const double> gammas);
std::vector<nn::Matrix> make_gamma_targets(const nn::Matrix& raw_target, std::span<const double> gammas);

struct CompositeLoss {
    double total = 0.0;
    double final_term = 0.0;
    std::vector<double> candidate_terms;
    nn::Matrix d_final;                   // filled when gradients are requested
    std::vector<nn::Matrix> d_candidates;
};

/// L(final, target) + sum_i L(candidate_i, target^gamma_i), unit weights.
CompositeLoss composite_loss(const LossConfig& cfg, const nn::Matrix& final_pred, const nn::Matrix& final_target,
                             const std::vector<nn::Matrix>& candidates, const std::vector<nn::Matrix>& gamma_targets,
                             bool with_gradients = false);

double composite_loss(const LossConfig& cfg, const Image& final_pred, const Image& final_target,
                      std::span<const Image> candidates, std::span<const Image> gamma_targets);

}  // namespace rgb2raw
