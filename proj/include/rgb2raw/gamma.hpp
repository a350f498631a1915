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
#include <vector>

#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// x^gamma on [0,1]; 0 maps to 0 for every gamma > 0.
double gamma_correct(double x, double gamma);

/// x^(1/gamma); the inverse of gamma_correct.
double degamma(double x, double gamma);

std::vector<double> gamma_correct(std::span<const double> values, double gamma);
std::vector<double> degamma(std::span<const double> values, double gamma);

Image gamma_correct(const Image& image, double gamma);
Image degamma(const Image& image, double gamma);

/// The default ladder {0.1, 0.2, ..., 1.0} truncated/spread to `count` entries:
/// gamma_i = (i + 1) / count.
std::vector<double> default_gamma_ladder(int count);

}  // namespace rgb2raw
