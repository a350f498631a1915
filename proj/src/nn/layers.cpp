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

#include "rgb2raw/nn/layers.hpp"

#include <cmath>

#include "rgb2raw/error.hpp"

namespace rgb2raw::nn {

namespace {

Matrix logistic(const Matrix& z) {
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

Matrix silu(const Matrix& z) {
    return (z.array() * logistic(z).array()).matrix();
}

Matrix silu_backward(const Matrix& z, const Matrix& dy) {
    const Matrix s = logistic(z);
    return (dy.array() * s.array() * (1.0 + z.array() * (1.0 - s.array()))).matrix();
}

void check_rows(const Matrix& x, Shape in, const char* layer) {
    if (x.rows() != in.rows()) {
        fail(ErrorKind::Shape, std::string(layer) + ": activation rows do not match shape");
    }
}

// 3x3 neighbourhood with zero padding; column (ky * 3 + kx) * channels + c.
Matrix im2col_same3x3(const Matrix& x, Shape in) {
    const int channels = static_cast<int>(x.cols());
    Matrix cols = Matrix::Zero(in.rows(), 9 * channels);
    for (int b = 0; b < in.batch; ++b) {
        for (int y = 0; y < in.height; ++y) {
            for (int xx = 0; xx < in.width; ++xx) {
                const int row = (b * in.height + y) * in.width + xx;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= in.height) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= in.width) continue;
                        const int src = (b * in.height + sy) * in.width + sx;
                        cols.row(row).segment((ky * 3 + kx) * channels, channels) = x.row(src);
                    }
                }
            }
        }
    }
    return cols;
}

Matrix col2im_same3x3(const Matrix& cols, Shape in, int channels) {
    Matrix dx = Matrix::Zero(in.rows(), channels);
    for (int b = 0; b < in.batch; ++b) {
        for (int y = 0; y < in.height; ++y) {
            for (int xx = 0; xx < in.width; ++xx) {
                const int row = (b * in.height + y) * in.width + xx;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= in.height) continue;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = xx + kx - 1;
                        if (sx < 0 || sx >= in.width) continue;
                        const int src = (b * in.height + sy) * in.width + sx;
                        dx.row(src) += cols.row(row).segment((ky * 3 + kx) * channels, channels);
                    }
                }
            }
        }
    }
    return dx;
}

}  // namespace

void Parameter::init(std::string param_name, int rows, int cols) {
    name = std::move(param_name);
    value = Matrix::Zero(rows, cols);
    grad = Matrix::Zero(rows, cols);
}

void init_normal(Matrix& m, double stddev, Rng& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = dist(rng);
    }
}

// --- Sequential ------------------------------------------------------------

Shape Sequential::output_shape(Shape in) const {
    for (const auto& layer : layers_) in = layer->output_shape(in);
    return in;
}

Matrix Sequential::forward(const Matrix& x, Shape in, Cache* cache) const {
    if (cache) {
        cache->inputs.clear();
        cache->aux.clear();
        cache->shapes.clear();
    }
    Matrix current = x;
    for (const auto& layer : layers_) {
        Matrix aux;
        Matrix next = layer->forward(current, in, cache ? &aux : nullptr);
        if (cache) {
            cache->inputs.push_back(std::move(current));
            cache->aux.push_back(std::move(aux));
            cache->shapes.push_back(in);
        }
        current = std::move(next);
        in = layer->output_shape(in);
    }
    return current;
}

Matrix Sequential::backward(const Cache& cache, const Matrix& dy, bool need_input_grad) {
    if (cache.inputs.size() != layers_.size()) {
        fail(ErrorKind::Shape, "backward called without a matching forward cache");
    }
    Matrix grad = dy;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const bool need = need_input_grad || i > 0;
        grad = layers_[i]->backward(cache.inputs[i], cache.aux[i], cache.shapes[i], grad, need);
    }
    return grad;
}

void Sequential::collect(ParameterList& out) {
    for (auto& layer : layers_) layer->collect(out);
}

// --- Pointwise -------------------------------------------------------------

Pointwise::Pointwise(const std::string& name, int in, int out, Rng& rng, double gain, double bias) {
    weight_.init(name + ".weight", in, out);
    bias_.init(name + ".bias", 1, out);
    init_normal(weight_.value, std::sqrt(gain / in), rng);
    bias_.value.setConstant(bias);
}

Matrix Pointwise::forward(const Matrix& x, Shape in, Matrix*) const {
    check_rows(x, in, "pointwise");
    if (x.cols() != weight_.value.rows()) {
        fail(ErrorKind::Shape, weight_.name + ": expected " + std::to_string(weight_.value.rows()) +
                                   " input channels, got " + std::to_string(x.cols()));
    }
    Matrix y = x * weight_.value;
    y.rowwise() += bias_.value.row(0);
    return y;
}

Matrix Pointwise::backward(const Matrix& x, const Matrix&, Shape, const Matrix& dy, bool need_input_grad) {
    weight_.grad.noalias() += x.transpose() * dy;
    bias_.grad += dy.colwise().sum();
    if (!need_input_grad) return {};
    return dy * weight_.value.transpose();
}

void Pointwise::collect(ParameterList& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
}

// --- Activations -----------------------------------------------------------

Matrix SiLU::forward(const Matrix& x, Shape, Matrix*) const { return silu(x); }

Matrix SiLU::backward(const Matrix& x, const Matrix&, Shape, const Matrix& dy, bool need_input_grad) {
    if (!need_input_grad) return {};
    return silu_backward(x, dy);
}

Matrix Sigmoid::forward(const Matrix& x, Shape, Matrix* aux) const {
    Matrix y = logistic(x);
    if (aux) *aux = y;
    return y;
}

Matrix Sigmoid::backward(const Matrix&, const Matrix& aux, Shape, const Matrix& dy, bool need_input_grad) {
    if (!need_input_grad) return {};
    return (dy.array() * aux.array() * (1.0 - aux.array())).matrix();
}

// --- Residual pointwise ----------------------------------------------------

ResidualPointwise::ResidualPointwise(const std::string& name, int width, Rng& rng)
    : conv_(name, width, width, rng, 1.0) {}

Matrix ResidualPointwise::forward(const Matrix& x, Shape in, Matrix* aux) const {
    Matrix z = conv_.forward(x, in, nullptr);
    Matrix y = x + silu(z);
    if (aux) *aux = std::move(z);
    return y;
}

Matrix ResidualPointwise::backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy,
                                   bool need_input_grad) {
    const Matrix dz = silu_backward(aux, dy);
    Matrix dx = conv_.backward(x, Matrix(), in, dz, need_input_grad);
    if (!need_input_grad) return {};
    dx += dy;
    return dx;
}

// --- Grouped 3x3 valid -----------------------------------------------------

GroupedConv3x3Valid::GroupedConv3x3Valid(const std::string& name, int in, int out, Rng& rng) : in_(in), out_(out) {
    if (in <= 0 || out % in != 0) {
        fail(ErrorKind::Parameter, name + ": output channels must be a multiple of input channels (groups)");
    }
    weight_.init(name + ".weight", out, 9);
    bias_.init(name + ".bias", 1, out);
    init_normal(weight_.value, std::sqrt(2.0 / 9.0), rng);
}

Matrix GroupedConv3x3Valid::forward(const Matrix& x, Shape in, Matrix*) const {
    check_rows(x, in, "grouped conv");
    if (x.cols() != in_ || in.height < 3 || in.width < 3) {
        fail(ErrorKind::Shape, weight_.name + ": input must be at least 3x3 with " + std::to_string(in_) + " channels");
    }
    const Shape os = output_shape(in);
    const int multiplier = out_ / in_;
    Matrix y(os.rows(), out_);
    double patch[9];
    for (int b = 0; b < in.batch; ++b) {
        for (int oy = 0; oy < os.height; ++oy) {
            for (int ox = 0; ox < os.width; ++ox) {
                const int orow = (b * os.height + oy) * os.width + ox;
                for (int c = 0; c < in_; ++c) {
                    for (int ky = 0; ky < 3; ++ky) {
                        for (int kx = 0; kx < 3; ++kx) {
                            patch[ky * 3 + kx] = x((b * in.height + oy + ky) * in.width + ox + kx, c);
                        }
                    }
                    for (int m = 0; m < multiplier; ++m) {
                        const int o = c * multiplier + m;
                        double acc = bias_.value(0, o);
                        for (int k = 0; k < 9; ++k) acc += weight_.value(o, k) * patch[k];
                        y(orow, o) = acc;
                    }
                }
            }
        }
    }
    return y;
}

Matrix GroupedConv3x3Valid::backward(const Matrix& x, const Matrix&, Shape in, const Matrix& dy,
                                     bool need_input_grad) {
    const Shape os = output_shape(in);
    const int multiplier = out_ / in_;
    Matrix dx;
    if (need_input_grad) dx = Matrix::Zero(in.rows(), in_);
    bias_.grad += dy.colwise().sum();
    for (int b = 0; b < in.batch; ++b) {
        for (int oy = 0; oy < os.height; ++oy) {
            for (int ox = 0; ox < os.width; ++ox) {
                const int orow = (b * os.height + oy) * os.width + ox;
                for (int c = 0; c < in_; ++c) {
                    for (int m = 0; m < multiplier; ++m) {
                        const int o = c * multiplier + m;
                        const double g = dy(orow, o);
                        for (int ky = 0; ky < 3; ++ky) {
                            for (int kx = 0; kx < 3; ++kx) {
                                const int irow = (b * in.height + oy + ky) * in.width + ox + kx;
                                weight_.grad(o, ky * 3 + kx) += g * x(irow, c);
                                if (need_input_grad) dx(irow, c) += g * weight_.value(o, ky * 3 + kx);
                            }
                        }
                    }
                }
            }
        }
    }
    return dx;
}

void GroupedConv3x3Valid::collect(ParameterList& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
}

// --- Block convolution -----------------------------------------------------

BlockConv::BlockConv(const std::string& name, int block, int in, int out, Rng& rng)
    : block_(block), in_(in), linear_(name, block * block * in, out, rng, 2.0) {}

Matrix BlockConv::gather(const Matrix& x, Shape in) const {
    check_rows(x, in, "block conv");
    if (in.height % block_ != 0 || in.width % block_ != 0 || x.cols() != in_) {
        fail(ErrorKind::Shape, "block conv: " + std::to_string(in.height) + "x" + std::to_string(in.width) + "x" +
                                   std::to_string(x.cols()) + " input not tileable by " + std::to_string(block_));
    }
    const Shape os = output_shape(in);
    Matrix cols(os.rows(), block_ * block_ * in_);
    for (int b = 0; b < in.batch; ++b) {
        for (int oy = 0; oy < os.height; ++oy) {
            for (int ox = 0; ox < os.width; ++ox) {
                const int orow = (b * os.height + oy) * os.width + ox;
                for (int ky = 0; ky < block_; ++ky) {
                    for (int kx = 0; kx < block_; ++kx) {
                        const int irow = (b * in.height + oy * block_ + ky) * in.width + ox * block_ + kx;
                        cols.row(orow).segment((ky * block_ + kx) * in_, in_) = x.row(irow);
                    }
                }
            }
        }
    }
    return cols;
}

Matrix BlockConv::forward(const Matrix& x, Shape in, Matrix*) const {
    const Matrix cols = gather(x, in);
    return linear_.forward(cols, output_shape(in), nullptr);
}

Matrix BlockConv::backward(const Matrix& x, const Matrix&, Shape in, const Matrix& dy, bool need_input_grad) {
    const Shape os = output_shape(in);
    const Matrix cols = gather(x, in);
    const Matrix dcols = linear_.backward(cols, Matrix(), os, dy, need_input_grad);
    if (!need_input_grad) return {};
    Matrix dx(in.rows(), in_);
    for (int b = 0; b < in.batch; ++b) {
        for (int oy = 0; oy < os.height; ++oy) {
            for (int ox = 0; ox < os.width; ++ox) {
                const int orow = (b * os.height + oy) * os.width + ox;
                for (int ky = 0; ky < block_; ++ky) {
                    for (int kx = 0; kx < block_; ++kx) {
                        const int irow = (b * in.height + oy * block_ + ky) * in.width + ox * block_ + kx;
                        dx.row(irow) = dcols.row(orow).segment((ky * block_ + kx) * in_, in_);
                    }
                }
            }
        }
    }
    return dx;
}

// --- Residual 3x3 ----------------------------------------------------------

ResidualConv3x3::ResidualConv3x3(const std::string& name, int width, Rng& rng)
    : width_(width), linear_(name, 9 * width, width, rng, 1.0) {}

Matrix ResidualConv3x3::forward(const Matrix& x, Shape in, Matrix* aux) const {
    check_rows(x, in, "residual conv");
    const Matrix cols = im2col_same3x3(x, in);
    Matrix z = linear_.forward(cols, in, nullptr);
    Matrix y = x + silu(z);
    if (aux) *aux = std::move(z);
    return y;
}

Matrix ResidualConv3x3::backward(const Matrix& x, const Matrix& aux, Shape in, const Matrix& dy,
                                 bool need_input_grad) {
    const Matrix cols = im2col_same3x3(x, in);
    const Matrix dz = silu_backward(aux, dy);
    const Matrix dcols = linear_.backward(cols, Matrix(), in, dz, need_input_grad);
    if (!need_input_grad) return {};
    Matrix dx = col2im_same3x3(dcols, in, width_);
    dx += dy;
    return dx;
}

// --- Pooling ---------------------------------------------------------------

Matrix GlobalAveragePool::forward(const Matrix& x, Shape in, Matrix*) const {
    check_rows(x, in, "pool");
    Matrix y(in.batch, x.cols());
    for (int b = 0; b < in.batch; ++b) {
        y.row(b) = x.middleRows(static_cast<Eigen::Index>(b) * in.pixels(), in.pixels()).colwise().mean();
    }
    return y;
}

Matrix GlobalAveragePool::backward(const Matrix& x, const Matrix&, Shape in, const Matrix& dy, bool need_input_grad) {
    if (!need_input_grad) return {};
    Matrix dx(x.rows(), x.cols());
    const double scale = 1.0 / in.pixels();
    for (int b = 0; b < in.batch; ++b) {
        dx.middleRows(static_cast<Eigen::Index>(b) * in.pixels(), in.pixels()).rowwise() = dy.row(b) * scale;
    }
    return dx;
}

}  // namespace rgb2raw::nn
