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

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace rgb2raw::nn {

/// Activations are stored pixel-major: one row per (sample, y, x), one column per channel.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Rng = std::mt19937_64;

struct Shape {
    int batch = 0;
    int height = 0;
    int width = 0;

    int rows() const noexcept { return batch * height * width; }
    int pixels() const noexcept { return height * width; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    void init(std::string param_name, int rows, int cols);
};

using ParameterList = std::vector<Parameter*>;

/// One stage of a feed-forward network with hand-written backward pass.
///
/// `forward` may fill `aux` with whatever the backward pass needs beyond the
/// layer input; `backward` accumulates parameter gradients and returns the
/// gradient with respect to the input (empty when `need_input_grad` is false).
class Layer {
public:
    virtual ~Layer() = default;

    virtual Shape output_shape(Shape in) const = 0;
    virtual Matrix forward(const Matrix& x, Shape in, Matrix* aux) const = 0;
    virtual Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy,
                            bool need_input_grad) = 0;
    virtual void collect(ParameterList& out) { (void)out; }
};

class Sequential {
public:
    struct Cache {
        std::vector<Matrix> inputs;
        std::vector<Matrix> aux;
        std::vector<Shape> shapes;
    };

    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
    bool empty() const noexcept { return layers_.empty(); }
    std::size_t size() const noexcept { return layers_.size(); }

    Shape output_shape(Shape in) const;
    Matrix forward(const Matrix& x, Shape in, Cache* cache) const;
    Matrix backward(const Cache& cache, const Matrix& dy, bool need_input_grad);
    void collect(ParameterList& out);

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Initialization draws from N(0, gain / fan_in).
void init_normal(Matrix& m, double stddev, Rng& rng);

/// Per-pixel affine map (1x1 convolution): y = x W + b.
class Pointwise final : public Layer {
public:
    Pointwise(const std::string& name, int in, int out, Rng& rng, double gain = 1.0, double bias = 0.0);

    Shape output_shape(Shape in) const override { return in; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
    void collect(ParameterList& out) override;

    Parameter& weight() noexcept { return weight_; }
    Parameter& bias() noexcept { return bias_; }

private:
    Parameter weight_;
    Parameter bias_;
};

class SiLU final : public Layer {
public:
    Shape output_shape(Shape in) const override { return in; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
};

class Sigmoid final : public Layer {
public:
    Shape output_shape(Shape in) const override { return in; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
};

/// y = x + silu(x W + b)
class ResidualPointwise final : public Layer {
public:
    ResidualPointwise(const std::string& name, int width, Rng& rng);

    Shape output_shape(Shape in) const override { return in; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
    void collect(ParameterList& out) override { conv_.collect(out); }

private:
    Pointwise conv_;
};

/// Grouped 3x3 stride-1 convolution without padding; each input channel
/// feeds `out / groups` output channels (depthwise multiplier).
class GroupedConv3x3Valid final : public Layer {
public:
    GroupedConv3x3Valid(const std::string& name, int in, int out, Rng& rng);

    Shape output_shape(Shape in) const override { return {in.batch, in.height - 2, in.width - 2}; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
    void collect(ParameterList& out) override;

private:
    int in_;
    int out_;
    Parameter weight_;  // out x 9
    Parameter bias_;    // 1 x out
};

/// k x k convolution with stride k (non-overlapping blocks).
class BlockConv final : public Layer {
public:
    BlockConv(const std::string& name, int block, int in, int out, Rng& rng);

    Shape output_shape(Shape in) const override { return {in.batch, in.height / block_, in.width / block_}; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
    void collect(ParameterList& out) override { linear_.collect(out); }

private:
    Matrix gather(const Matrix& x, Shape in) const;

    int block_;
    int in_;
    Pointwise linear_;
};

/// y = x + silu(conv3x3(x)) with zero padding 1.
class ResidualConv3x3 final : public Layer {
public:
    ResidualConv3x3(const std::string& name, int width, Rng& rng);

    Shape output_shape(Shape in) const override { return in; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
    void collect(ParameterList& out) override { linear_.collect(out); }

private:
    int width_;
    Pointwise linear_;
};

/// Mean over all spatial positions of each sample; output shape (batch, 1, 1).
class GlobalAveragePool final : public Layer {
public:
    Shape output_shape(Shape in) const override { return {in.batch, 1, 1}; }
    Matrix forward(const Matrix& x, Shape in, Matrix* aux) const override;
    Matrix backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy, bool need_input_grad) override;
};

}  // namespace rgb2raw::nn
