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

#include "rgb2raw/objective.hpp"

#include <algorithm>
#include <cmath>

#include "rgb2raw/error.hpp"
#include "rgb2raw/gamma.hpp"

namespace rgb2raw {

void LossConfig::validate() const {
    if (!(epsilon > 0.0)) fail(ErrorKind::Config, "loss epsilon must be > 0");
}

LossKind parse_loss_kind(const std::string& text) {
    if (text == "l1" || text == "L1") return LossKind::L1;
    if (text == "l2" || text == "L2") return LossKind::L2;
    if (text == "hln" || text == "HLN" || text == "hard_log") return LossKind::HardLog;
    fail(ErrorKind::Config, "unknown loss kind '" + text + "' (expected l1, l2 or hln)");
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::L1: return "l1";
        case LossKind::L2: return "l2";
        case LossKind::HardLog: return "hln";
    }
    return "hln";
}

namespace {

void check_same(std::size_t a, std::size_t b) {
    if (a != b) {
        fail(ErrorKind::Shape, "loss operands differ in size (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
    if (a == 0) fail(ErrorKind::Shape, "loss of empty tensors");
}

std::span<const double> view(const nn::Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> view(nn::Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

}  // namespace

double hard_log_loss(std::span<const double> pred, std::span<const double> target, double epsilon) {
    return loss({LossKind::HardLog, epsilon}, pred, target);
}

double l1_loss(std::span<const double> pred, std::span<const double> target) {
    return loss({LossKind::L1, 1e-6}, pred, target);
}

double l2_loss(std::span<const double> pred, std::span<const double> target) {
    return loss({LossKind::L2, 1e-6}, pred, target);
}

double loss(const LossConfig& cfg, std::span<const double> pred, std::span<const double> target,
            std::span<double> grad, double grad_scale) {
    cfg.validate();
    check_same(pred.size(), target.size());
    const bool with_grad = !grad.empty();
    if (with_grad) check_same(grad.size(), pred.size());
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    const double g_scale = grad_scale * inv_n;

    double sum = 0.0;
    switch (cfg.kind) {
        case LossKind::L1:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double d = pred[i] - target[i];
                sum += std::abs(d);
                if (with_grad) grad[i] += g_scale * static_cast<double>((d > 0.0) - (d < 0.0));
            }
            break;
        case LossKind::L2:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double d = pred[i] - target[i];
                sum += d * d;
                if (with_grad) grad[i] += g_scale * 2.0 * d;
            }
            break;
        case LossKind::HardLog:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double d = pred[i] - target[i];
                const double err = std::min(std::abs(d), 1.0);
                const double denom = 1.0 - err + cfg.epsilon;
                sum -= std::log(denom);
                if (with_grad && err < 1.0) {
                    grad[i] += g_scale * static_cast<double>((d > 0.0) - (d < 0.0)) / denom;
                }
            }
            break;
    }
    return sum * inv_n;
}

std::vector<Image> make_gamma_targets(const Image& raw_target, std::span<const double> gammas) {
    std::vector<Image> out;
    out.reserve(gammas.size());
    for (double g : gammas) out.push_back(gamma_correct(raw_target, g));
    return out;
}

std::vector<nn::Matrix> make_gamma_targets(const nn::Matrix& raw_target, std::span<const double> gammas) {
    std::vector<nn::Matrix> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        nn::Matrix t = raw_target;
        const auto corrected = gamma_correct(view(raw_target), g);
        std::copy(corrected.begin(), corrected.end(), t.data());
        out.push_back(std::move(t));
    }
    return out;
}

CompositeLoss composite_loss(const LossConfig& cfg, const nn::Matrix& final_pred, const nn::Matrix& final_target,
                             const std::vector<nn::Matrix>& candidates, const std::vector<nn::Matrix>& gamma_targets,
                             bool with_gradients) {
    if (candidates.size() != gamma_targets.size()) {
        fail(ErrorKind::Shape, "composite loss: " + std::to_string(candidates.size()) + " candidates but " +
                                   std::to_string(gamma_targets.size()) + " gamma targets");
    }
    CompositeLoss out;
    if (with_gradients) {
        out.d_final = nn::Matrix::Zero(final_pred.rows(), final_pred.cols());
        out.d_candidates.reserve(candidates.size());
    }
    out.final_term = loss(cfg, view(final_pred), view(final_target),
                          with_gradients ? view(out.d_final) : std::span<double>{});
    out.total = out.final_term;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        std::span<double> grad;
        if (with_gradients) {
            out.d_candidates.push_back(nn::Matrix::Zero(candidates[i].rows(), candidates[i].cols()));
            grad = view(out.d_candidates.back());
        }
        const double term = loss(cfg, view(candidates[i]), view(gamma_targets[i]), grad);
        out.candidate_terms.push_back(term);
        out.total += term;
    }
    return out;
}

double composite_loss(const LossConfig& cfg, const Image& final_pred, const Image& final_target,
                      std::span<const Image> candidates, std::span<const Image> gamma_targets) {
    if (candidates.size() != gamma_targets.size()) {
        fail(ErrorKind::Shape, "composite loss: candidate/target count mismatch");
    }
    double total = loss(cfg, final_pred.data(), final_target.data());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        total += loss(cfg, candidates[i].data(), gamma_targets[i].data());
    }
    return total;
}

}  // namespace rgb2raw
