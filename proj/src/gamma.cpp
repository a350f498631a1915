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

#include "rgb2raw/gamma.hpp"

#include <algorithm>
#include <cmath>

namespace rgb2raw {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        fail(ErrorKind::Parameter, "gamma must be positive, got " + std::to_string(gamma));
    }
}

double unit_power(double x, double exponent) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::pow(x, exponent);
}

}  // namespace

double gamma_correct(double x, double gamma) {
    check_gamma(gamma);
    return unit_power(x, gamma);
}

double degamma(double x, double gamma) {
    check_gamma(gamma);
    return unit_power(x, 1.0 / gamma);
}

std::vector<double> gamma_correct(std::span<const double> values, double gamma) {
    check_gamma(gamma);
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [gamma](double v) { return unit_power(v, gamma); });
    return out;
}

std::vector<double> degamma(std::span<const double> values, double gamma) {
    check_gamma(gamma);
    const double exponent = 1.0 / gamma;
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [exponent](double v) { return unit_power(v, exponent); });
    return out;
}

Image gamma_correct(const Image& image, double gamma) {
    check_gamma(gamma);
    Image out = image;
    for (double& v : out.data()) v = unit_power(v, gamma);
    return out;
}

Image degamma(const Image& image, double gamma) {
    check_gamma(gamma);
    Image out = image;
    const double exponent = 1.0 / gamma;
    for (double& v : out.data()) v = unit_power(v, exponent);
    return out;
}

std::vector<double> default_gamma_ladder(int count) {
    if (count <= 0) {
        fail(ErrorKind::Parameter, "gamma ladder needs at least one entry");
    }
    std::vector<double> ladder(count);
    for (int i = 0; i < count; ++i) {
        ladder[i] = static_cast<double>(i + 1) / count;
    }
    return ladder;
}

}  // namespace rgb2raw
