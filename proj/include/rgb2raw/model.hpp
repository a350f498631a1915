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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgb2raw/image.hpp"
#include "rgb2raw/nn/layers.hpp"

namespace rgb2raw {

/// Architecture hyperparameters. Defaults are the full-size network; `desk()`
/// gives a reduced variant that trains in minutes on one CPU core.
struct ReRawConfig {
    int n_heads = 10;
    std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int trunk_width = 128;
    int stem_channels = 96;
    int n_residual_blocks = 8;
    int context_dim = 128;
    bool use_context_encoder = true;
    bool use_scaling_encoder = true;

    // Global image encoders (context and scaling).
    int encoder_width = 32;
    int encoder_blocks = 8;
    int context_side = 128;

    /// Throws ErrorKind::Config naming the violated invariant.
    void validate() const;

    /// Sets n_heads and the evenly spaced ladder (i + 1) / n.
    ReRawConfig& with_heads(int n);

    static ReRawConfig desk();

    friend bool operator==(const ReRawConfig&, const ReRawConfig&) = default;
};

void to_json(nlohmann::json& j, const ReRawConfig& c);
void from_json(const nlohmann::json& j, ReRawConfig& c);

/// Network input side for a given output side P: 2P + 2.
constexpr int input_side_for(int output_side) { return 2 * output_side + 2; }

/// Network outputs for a batch; rows are (sample, y, x) pixel-major.
struct ForwardResult {
    int batch = 0;
    int side = 0;                             // output side P
    nn::Matrix final;                         // rows x 4
    std::vector<nn::Matrix> candidates;       // n_heads x (rows x 4)
    nn::Matrix alpha;                         // batch x n_heads
    nn::Matrix context;                       // batch x trunk_width (ones when disabled)

    Image final_image(int sample) const;
    Image candidate_image(int head, int sample) const;
    std::vector<double> alpha_of(int sample) const;
};

/// Per-image outputs of the two global encoders, reusable across every tile
/// of one frame.
struct GlobalCodes {
    nn::Matrix context;  // 1 x trunk_width
    nn::Matrix alpha;    // 1 x n_heads
};

/// Intermediate activations kept for the backward pass.
struct ForwardCache {
    nn::Sequential::Cache trunk;
    nn::Sequential::Cache context_encoder;
    nn::Sequential::Cache scaling_encoder;
    std::vector<nn::Sequential::Cache> heads;
    nn::Matrix latent;      // trunk output, before context modulation
    nn::Matrix modulated;   // head input
    nn::Shape latent_shape;
};

/// Weighted sum of re-linearized candidates: sum_i degamma(candidate_i, gamma_i) * alpha_i.
/// Candidates must share one shape; alpha and gammas must match their count.
Image compose_raw(std::span<const Image> candidates, std::span<const double> alpha, std::span<const double> gammas);

/// Batched form of compose_raw used by the network; `alpha` is batch x n.
nn::Matrix compose_raw(const std::vector<nn::Matrix>& candidates, const nn::Matrix& alpha,
                       std::span<const double> gammas, int pixels_per_sample);

/// Lower clamp applied to candidates before differentiating x^(1/gamma).
inline constexpr double kDegammaFloor = 1e-6;

/// Color reconstruction trunk, multi-head gamma predictor, and the two global
/// encoders, composed into a patch-to-packed-RAW regressor.
class ReRawModel {
public:
    explicit ReRawModel(const ReRawConfig& config, std::uint64_t seed = 0);

    ReRawModel(const ReRawModel&) = delete;
    ReRawModel& operator=(const ReRawModel&) = delete;
    ReRawModel(ReRawModel&&) noexcept = default;
    ReRawModel& operator=(ReRawModel&&) noexcept = default;

    const ReRawConfig& config() const noexcept { return config_; }

    /// Runs the full network on a batch. All RGB patches share one side 2P+2
    /// and all context images are context_side x context_side.
    ForwardResult forward(std::span<const Image> rgb_patches, std::span<const Image> contexts,
                          ForwardCache* cache = nullptr) const;

    GlobalCodes encode_globals(const Image& context) const;

    /// Inference with precomputed global codes shared by every patch in the batch.
    ForwardResult forward(std::span<const Image> rgb_patches, const GlobalCodes& globals) const;

    /// Accumulates parameter gradients given loss gradients on the final
    /// output and on each candidate.
    void backward(const ForwardCache& cache, const ForwardResult& result, const nn::Matrix& d_final,
                  const std::vector<nn::Matrix>& d_candidates);

    // Individual sub-networks, mostly for inspection and tests.
    nn::Matrix color_reconstruct(std::span<const Image> rgb_patches, nn::Shape* latent_shape = nullptr) const;
    nn::Matrix encode_context(std::span<const Image> contexts) const;
    std::vector<nn::Matrix> predict_gamma_candidates(const nn::Matrix& modulated_latent, nn::Shape shape) const;
    nn::Matrix encode_scaling(std::span<const Image> contexts) const;

    nn::ParameterList parameters();
    std::size_t parameter_count() const;
    void zero_grad();

    /// Appends every parameter value in registration order.
    std::vector<double> flatten_weights() const;
    void load_weights(std::span<const double> flat);

private:
    nn::Matrix stack_images(std::span<const Image> images, int side, int channels, const char* what) const;

    ReRawConfig config_;
    nn::Sequential trunk_;
    nn::Sequential context_encoder_;
    nn::Sequential scaling_encoder_;
    std::vector<nn::Sequential> heads_;
};

}  // namespace rgb2raw
