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

#include "rgb2raw/model.hpp"

#include <algorithm>
#include <cmath>

#include "rgb2raw/error.hpp"
#include "rgb2raw/gamma.hpp"

namespace rgb2raw {

using nn::Matrix;
using nn::Shape;

// --- Config ----------------------------------------------------------------

void ReRawConfig::validate() const {
    auto violation = [](const std::string& what) { fail(ErrorKind::Config, what); };
    if (n_heads < 1) violation("n_heads must be >= 1");
    if (static_cast<int>(gammas.size()) != n_heads) {
        violation("len(gammas) = " + std::to_string(gammas.size()) + " must equal n_heads = " + std::to_string(n_heads));
    }
    for (double g : gammas) {
        if (!(g > 0.0 && g <= 1.0)) violation("every gamma must lie in (0, 1], got " + std::to_string(g));
    }
    if (trunk_width < 1 || n_residual_blocks < 0) violation("trunk_width must be positive and n_residual_blocks >= 0");
    if (stem_channels < 3 || stem_channels % 3 != 0) violation("stem_channels must be a positive multiple of 3");
    if (context_dim != trunk_width) violation("context_dim must equal trunk_width for multiplicative modulation");
    if (encoder_width < 1 || encoder_blocks < 0) violation("encoder_width must be positive and encoder_blocks >= 0");
    if (context_side < 4 || context_side % 4 != 0) violation("context_side must be a positive multiple of 4");
}

ReRawConfig& ReRawConfig::with_heads(int n) {
    n_heads = n;
    gammas = default_gamma_ladder(n);
    return *this;
}

ReRawConfig ReRawConfig::desk() {
    ReRawConfig c;
    c.trunk_width = 32;
    c.context_dim = 32;
    c.stem_channels = 24;
    c.n_residual_blocks = 2;
    c.encoder_width = 16;
    c.encoder_blocks = 4;
    return c;
}

void to_json(nlohmann::json& j, const ReRawConfig& c) {
    j = nlohmann::json{{"n_heads", c.n_heads},
                       {"gammas", c.gammas},
                       {"trunk_width", c.trunk_width},
                       {"stem_channels", c.stem_channels},
                       {"n_residual_blocks", c.n_residual_blocks},
                       {"context_dim", c.context_dim},
                       {"use_context_encoder", c.use_context_encoder},
                       {"use_scaling_encoder", c.use_scaling_encoder},
                       {"encoder_width", c.encoder_width},
                       {"encoder_blocks", c.encoder_blocks},
                       {"context_side", c.context_side}};
}

void from_json(const nlohmann::json& j, ReRawConfig& c) {
    ReRawConfig d;
    c.n_heads = j.value("n_heads", d.n_heads);
    c.gammas = j.contains("gammas") ? j.at("gammas").get<std::vector<double>>() : default_gamma_ladder(c.n_heads);
    c.trunk_width = j.value("trunk_width", d.trunk_width);
    c.stem_channels = j.value("stem_channels", d.stem_channels);
    c.n_residual_blocks = j.value("n_residual_blocks", d.n_residual_blocks);
    c.context_dim = j.value("context_dim", c.trunk_width);
    c.use_context_encoder = j.value("use_context_encoder", d.use_context_encoder);
    c.use_scaling_encoder = j.value("use_scaling_encoder", d.use_scaling_encoder);
    c.encoder_width = j.value("encoder_width", d.encoder_width);
    c.encoder_blocks = j.value("encoder_blocks", d.encoder_blocks);
    c.context_side = j.value("context_side", d.context_side);
}

// --- ForwardResult ---------------------------------------------------------

namespace {

Image rows_to_image(const Matrix& m, int sample, int side) {
    Image out(side, side, static_cast<int>(m.cols()));
    const Eigen::Index first = static_cast<Eigen::Index>(sample) * side * side;
    for (int p = 0; p < side * side; ++p) {
        for (int c = 0; c < m.cols(); ++c) {
            out.data()[static_cast<std::size_t>(p) * m.cols() + c] = m(first + p, c);
        }
    }
    return out;
}

double unit_power(double x, double exponent) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::pow(x, exponent);
}

nn::Sequential build_encoder(const std::string& name, const ReRawConfig& c, int out_dim, double out_bias,
                             nn::Rng& rng) {
    nn::Sequential net;
    const int w = c.encoder_width;
    net.add(std::make_unique<nn::BlockConv>(name + ".stem", 4, kRgbChannels, w, rng));
    net.add(std::make_unique<nn::SiLU>());
    int side = c.context_side / 4;
    for (int i = 0; i < c.encoder_blocks; ++i) {
        net.add(std::make_unique<nn::ResidualConv3x3>(name + ".res" + std::to_string(i), w, rng));
        if (i % 2 == 1 && i + 1 < c.encoder_blocks && side > 4 && side % 2 == 0) {
            net.add(std::make_unique<nn::BlockConv>(name + ".down" + std::to_string(i / 2), 2, w, w, rng));
            net.add(std::make_unique<nn::SiLU>());
            side /= 2;
        }
    }
    net.add(std::make_unique<nn::GlobalAveragePool>());
    net.add(std::make_unique<nn::Pointwise>(name + ".proj", w, out_dim, rng, 0.01, out_bias));
    return net;
}

}  // namespace

Image ForwardResult::final_image(int sample) const { return rows_to_image(final, sample, side); }

Image ForwardResult::candidate_image(int head, int sample) const {
    return rows_to_image(candidates.at(head), sample, side);
}

std::vector<double> ForwardResult::alpha_of(int sample) const {
    std::vector<double> a(alpha.cols());
    for (int i = 0; i < alpha.cols(); ++i) a[i] = alpha(sample, i);
    return a;
}

// --- Composition -----------------------------------------------------------

Image compose_raw(std::span<const Image> candidates, std::span<const double> alpha, std::span<const double> gammas) {
    if (candidates.empty() || candidates.size() != alpha.size() || candidates.size() != gammas.size()) {
        fail(ErrorKind::Shape, "compose_raw needs equal, non-zero counts of candidates (" +
                                   std::to_string(candidates.size()) + "), alpha (" + std::to_string(alpha.size()) +
                                   ") and gammas (" + std::to_string(gammas.size()) + ")");
    }
    Image out(candidates[0].height(), candidates[0].width(), candidates[0].channels());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].same_shape(out)) fail(ErrorKind::Shape, "compose_raw candidates differ in shape");
        if (!(gammas[i] > 0.0)) fail(ErrorKind::Parameter, "gamma must be positive");
        const double exponent = 1.0 / gammas[i];
        auto src = candidates[i].data();
        auto dst = out.data();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += unit_power(src[k], exponent) * alpha[i];
    }
    return out;
}

Matrix compose_raw(const std::vector<Matrix>& candidates, const Matrix& alpha, std::span<const double> gammas,
                   int pixels_per_sample) {
    if (candidates.empty() || static_cast<std::size_t>(alpha.cols()) != candidates.size() ||
        gammas.size() != candidates.size()) {
        fail(ErrorKind::Shape, "compose_raw count mismatch between candidates, alpha and gammas");
    }
    Matrix out = Matrix::Zero(candidates[0].rows(), candidates[0].cols());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double exponent = 1.0 / gammas[i];
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            const double a = alpha(r / pixels_per_sample, static_cast<Eigen::Index>(i));
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                out(r, c) += unit_power(candidates[i](r, c), exponent) * a;
            }
        }
    }
    return out;
}

// --- Model -----------------------------------------------------------------

ReRawModel::ReRawModel(const ReRawConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    nn::Rng rng(seed);
    const int width = config_.trunk_width;

    trunk_.add(std::make_unique<nn::GroupedConv3x3Valid>("trunk.stem", kRgbChannels, config_.stem_channels, rng));
    trunk_.add(std::make_unique<nn::SiLU>());
    trunk_.add(std::make_unique<nn::BlockConv>("trunk.down", 2, config_.stem_channels, width, rng));
    trunk_.add(std::make_unique<nn::SiLU>());
    for (int i = 0; i < config_.n_residual_blocks; ++i) {
        trunk_.add(std::make_unique<nn::ResidualPointwise>("trunk.res" + std::to_string(i), width, rng));
    }

    if (config_.use_context_encoder) {
        context_encoder_ = build_encoder("context", config_, config_.context_dim, 1.0, rng);
    }

    heads_.resize(config_.n_heads);
    for (int h = 0; h < config_.n_heads; ++h) {
        const std::string prefix = "head" + std::to_string(h);
        for (int i = 0; i < config_.n_residual_blocks; ++i) {
            heads_[h].add(std::make_unique<nn::ResidualPointwise>(prefix + ".res" + std::to_string(i), width, rng));
        }
        heads_[h].add(std::make_unique<nn::Pointwise>(prefix + ".out", width, kRawChannels, rng, 1.0));
        heads_[h].add(std::make_unique<nn::Sigmoid>());
    }

    if (config_.use_scaling_encoder) {
        scaling_encoder_ = build_encoder("scaling", config_, config_.n_heads, 0.0, rng);
    }
}

Matrix ReRawModel::stack_images(std::span<const Image> images, int side, int channels, const char* what) const {
    Matrix x(static_cast<Eigen::Index>(images.size()) * side * side, channels);
    for (std::size_t b = 0; b < images.size(); ++b) {
        const Image& img = images[b];
        if (img.height() != side || img.width() != side || img.channels() != channels) {
            fail(ErrorKind::Shape, std::string(what) + " " + std::to_string(b) + " is " + std::to_string(img.height()) +
                                       "x" + std::to_string(img.width()) + "x" + std::to_string(img.channels()) +
                                       ", expected " + std::to_string(side) + "x" + std::to_string(side) + "x" +
                                       std::to_string(channels));
        }
        const auto src = img.data();
        std::copy(src.begin(), src.end(), x.data() + b * src.size());
    }
    return x;
}

Matrix ReRawModel::color_reconstruct(std::span<const Image> rgb_patches, Shape* latent_shape) const {
    if (rgb_patches.empty()) fail(ErrorKind::Shape, "empty batch");
    const int side = rgb_patches[0].height();
    if (side < 4 || side % 2 != 0) {
        fail(ErrorKind::Shape, "RGB patch side " + std::to_string(side) + " is not of the form 2P+2 with P >= 1");
    }
    const Matrix x = stack_images(rgb_patches, side, kRgbChannels, "RGB patch");
    const Shape in{static_cast<int>(rgb_patches.size()), side, side};
    if (latent_shape) *latent_shape = trunk_.output_shape(in);
    return trunk_.forward(x, in, nullptr);
}

Matrix ReRawModel::encode_context(std::span<const Image> contexts) const {
    if (!config_.use_context_encoder) {
        return Matrix::Ones(static_cast<Eigen::Index>(contexts.size()), config_.context_dim);
    }
    const int s = config_.context_side;
    return context_encoder_.forward(stack_images(contexts, s, kRgbChannels, "context"),
                                    {static_cast<int>(contexts.size()), s, s}, nullptr);
}

std::vector<Matrix> ReRawModel::predict_gamma_candidates(const Matrix& modulated_latent, Shape shape) const {
    std::vector<Matrix> out;
    out.reserve(heads_.size());
    for (const auto& head : heads_) out.push_back(head.forward(modulated_latent, shape, nullptr));
    return out;
}

namespace {

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        out.row(r) = (logits.row(r).array() - m).exp().matrix();
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

}  // namespace

Matrix ReRawModel::encode_scaling(std::span<const Image> contexts) const {
    if (!config_.use_scaling_encoder) {
        return Matrix::Constant(static_cast<Eigen::Index>(contexts.size()), config_.n_heads, 1.0 / config_.n_heads);
    }
    const int s = config_.context_side;
    return softmax_rows(scaling_encoder_.forward(stack_images(contexts, s, kRgbChannels, "context"),
                                                 {static_cast<int>(contexts.size()), s, s}, nullptr));
}

ForwardResult ReRawModel::forward(std::span<const Image> rgb_patches, std::span<const Image> contexts,
                                  ForwardCache* cache) const {
    if (rgb_patches.empty()) fail(ErrorKind::Shape, "empty batch");
    const int batch = static_cast<int>(rgb_patches.size());
    const bool needs_context = config_.use_context_encoder || config_.use_scaling_encoder;
    if (needs_context && contexts.size() != rgb_patches.size()) {
        fail(ErrorKind::Shape, "one context image is required per RGB patch");
    }
    const int side = rgb_patches[0].height();
    if (side < 4 || side % 2 != 0) {
        fail(ErrorKind::Shape, "RGB patch side " + std::to_string(side) + " is not of the form 2P+2 with P >= 1");
    }
    const Shape in{batch, side, side};
    const Shape latent_shape = trunk_.output_shape(in);
    const int pixels = latent_shape.pixels();

    ForwardResult result;
    result.batch = batch;
    result.side = latent_shape.height;

    Matrix latent = trunk_.forward(stack_images(rgb_patches, side, kRgbChannels, "RGB patch"), in,
                                   cache ? &cache->trunk : nullptr);

    Matrix context_input;
    const Shape context_shape{batch, config_.context_side, config_.context_side};
    if (needs_context) {
        context_input = stack_images(contexts, config_.context_side, kRgbChannels, "context");
    }

    Matrix modulated;
    if (config_.use_context_encoder) {
        result.context =
            context_encoder_.forward(context_input, context_shape, cache ? &cache->context_encoder : nullptr);
        modulated = latent;
        for (int b = 0; b < batch; ++b) {
            modulated.middleRows(static_cast<Eigen::Index>(b) * pixels, pixels).array().rowwise() *=
                result.context.row(b).array();
        }
    } else {
        result.context = Matrix::Ones(batch, config_.trunk_width);
        modulated = latent;
    }

    if (cache) cache->heads.resize(heads_.size());
    result.candidates.reserve(heads_.size());
    for (std::size_t h = 0; h < heads_.size(); ++h) {
        result.candidates.push_back(heads_[h].forward(modulated, latent_shape, cache ? &cache->heads[h] : nullptr));
    }

    if (config_.use_scaling_encoder) {
        result.alpha = softmax_rows(
            scaling_encoder_.forward(context_input, context_shape, cache ? &cache->scaling_encoder : nullptr));
    } else {
        result.alpha = Matrix::Constant(batch, config_.n_heads, 1.0 / config_.n_heads);
    }

    result.final = compose_raw(result.candidates, result.alpha, config_.gammas, pixels);

    if (cache) {
        cache->latent = std::move(latent);
        cache->modulated = std::move(modulated);
        cache->latent_shape = latent_shape;
    }
    return result;
}

GlobalCodes ReRawModel::encode_globals(const Image& context) const {
    const std::span<const Image> one(&context, 1);
    return {encode_context(one), encode_scaling(one)};
}

ForwardResult ReRawModel::forward(std::span<const Image> rgb_patches, const GlobalCodes& globals) const {
    if (globals.context.rows() != 1 || globals.context.cols() != config_.trunk_width || globals.alpha.rows() != 1 ||
        globals.alpha.cols() != config_.n_heads) {
        fail(ErrorKind::Shape, "global codes do not match the model configuration");
    }
    Shape latent_shape;
    const Matrix latent = color_reconstruct(rgb_patches, &latent_shape);
    const int batch = latent_shape.batch;
    const int pixels = latent_shape.pixels();

    ForwardResult result;
    result.batch = batch;
    result.side = latent_shape.height;
    result.context = globals.context.replicate(batch, 1);
    result.alpha = globals.alpha.replicate(batch, 1);
    Matrix modulated = latent;
    if (config_.use_context_encoder) {
        modulated.array().rowwise() *= globals.context.row(0).array();
    }
    result.candidates = predict_gamma_candidates(modulated, latent_shape);
    result.final = compose_raw(result.candidates, result.alpha, config_.gammas, pixels);
    return result;
}

void ReRawModel::backward(const ForwardCache& cache, const ForwardResult& result, const Matrix& d_final,
                          const std::vector<Matrix>& d_candidates) {
    const int n = config_.n_heads;
    if (static_cast<int>(d_candidates.size()) != n || d_final.rows() != result.final.rows()) {
        fail(ErrorKind::Shape, "backward gradients do not match the forward result");
    }
    const int batch = result.batch;
    const int pixels = cache.latent_shape.pixels();

    // Through the weighted degamma sum.
    Matrix d_alpha = Matrix::Zero(batch, n);
    std::vector<Matrix> d_cand(n);
    for (int h = 0; h < n; ++h) {
        const double exponent = 1.0 / config_.gammas[h];
        const Matrix& cand = result.candidates[h];
        d_cand[h] = d_candidates[h];
        for (Eigen::Index r = 0; r < cand.rows(); ++r) {
            const int b = static_cast<int>(r / pixels);
            const double a = result.alpha(b, h);
            for (Eigen::Index c = 0; c < cand.cols(); ++c) {
                const double g = d_final(r, c);
                if (g == 0.0) continue;
                const double x = std::clamp(cand(r, c), kDegammaFloor, 1.0);
                const double lifted = std::pow(x, exponent);
                d_cand[h](r, c) += g * a * exponent * lifted / x;
                d_alpha(b, h) += g * (cand(r, c) <= 0.0 ? 0.0 : lifted);
            }
        }
    }

    if (config_.use_scaling_encoder) {
        Matrix d_logits(batch, n);
        for (int b = 0; b < batch; ++b) {
            const double dot = result.alpha.row(b).dot(d_alpha.row(b));
            d_logits.row(b) = result.alpha.row(b).array() * (d_alpha.row(b).array() - dot);
        }
        scaling_encoder_.backward(cache.scaling_encoder, d_logits, false);
    }

    Matrix d_modulated = Matrix::Zero(cache.modulated.rows(), cache.modulated.cols());
    for (int h = 0; h < n; ++h) {
        d_modulated += heads_[h].backward(cache.heads[h], d_cand[h], true);
    }

    Matrix d_latent = d_modulated;
    if (config_.use_context_encoder) {
        Matrix d_context(batch, config_.context_dim);
        for (int b = 0; b < batch; ++b) {
            const auto rows = static_cast<Eigen::Index>(b) * pixels;
            d_context.row(b) = (d_modulated.middleRows(rows, pixels).array() *
                                cache.latent.middleRows(rows, pixels).array())
                                   .colwise()
                                   .sum();
            d_latent.middleRows(rows, pixels).array().rowwise() *= result.context.row(b).array();
        }
        context_encoder_.backward(cache.context_encoder, d_context, false);
    }

    trunk_.backward(cache.trunk, d_latent, false);
}

nn::ParameterList ReRawModel::parameters() {
    nn::ParameterList out;
    trunk_.collect(out);
    if (config_.use_context_encoder) context_encoder_.collect(out);
    for (auto& head : heads_) head.collect(out);
    if (config_.use_scaling_encoder) scaling_encoder_.collect(out);
    return out;
}

std::size_t ReRawModel::parameter_count() const {
    std::size_t total = 0;
    for (const auto* p : const_cast<ReRawModel*>(this)->parameters()) total += p->value.size();
    return total;
}

void ReRawModel::zero_grad() {
    for (auto* p : parameters()) p->grad.setZero();
}

std::vector<double> ReRawModel::flatten_weights() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto* p : const_cast<ReRawModel*>(this)->parameters()) {
        flat.insert(flat.end(), p->value.data(), p->value.data() + p->value.size());
    }
    return flat;
}

void ReRawModel::load_weights(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        fail(ErrorKind::Checkpoint, "weight count " + std::to_string(flat.size()) + " does not match model (" +
                                        std::to_string(parameter_count()) + ")");
    }
    std::size_t offset = 0;
    for (auto* p : parameters()) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), p->value.size(), p->value.data());
        offset += p->value.size();
    }
}

}  // namespace rgb2raw
