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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "rgb2raw/checkpoint.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/trainer.hpp"
#include "support.hpp"

using namespace rgb2raw;

namespace {

TrainConfig toy_train_config(int epochs = 2, int period = 1) {
    TrainConfig c;
    c.batch_size = 4;
    c.epochs = epochs;
    c.restart_period_epochs = period;
    c.seed = 17;
    c.model = testing::tiny_config(3);
    return c;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an rgb2raw::Error");
    return ErrorKind::Io;
}

int count_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("learning-rate schedule: start, midpoint, window end, restart") {
    TrainConfig c;
    c.restart_period_epochs = 16;
    const long long spe = 100, window = spe * 16;
    CHECK(lr_schedule(0, spe, c) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(lr_schedule(window / 2, spe, c) == doctest::Approx(5.05e-4).epsilon(1e-12));
    const double end = lr_schedule(window - 1, spe, c);
    CHECK(std::abs(end - 1e-5) <= 0.01 * 1e-5);
    CHECK(lr_schedule(window, spe, c) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(lr_schedule(3 * window + 7, spe, c) == lr_schedule(7, spe, c));
    double prev = 1.0;
    for (long long s = 0; s < window; ++s) {
        const double lr = lr_schedule(s, spe, c);
        CHECK(lr <= prev);
        CHECK(lr >= c.lr_floor);
        CHECK(lr <= c.lr_start);
        prev = lr;
    }
    CHECK(kind_of([&] { lr_schedule(-1, spe, c); }) == ErrorKind::Parameter);
}

TEST_CASE("Adam first step moves every weight by lr against the gradient sign") {
    nn::Parameter p;
    p.init("w", 2, 2);
    p.value << 1.0, 2.0, 3.0, 4.0;
    p.grad << 0.5, -2.0, 1e-3, 0.0;
    Adam adam;
    adam.step({&p}, 0.1);
    CHECK(p.value(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(p.value(0, 1) == doctest::Approx(2.1).epsilon(1e-6));
    CHECK(p.value(1, 0) == doctest::Approx(2.9).epsilon(1e-4));
    CHECK(p.value(1, 1) == 4.0);
    CHECK(adam.state().step == 1);
}

TEST_CASE("training config validation") {
    CHECK_NOTHROW(TrainConfig{}.validate());
    TrainConfig c;
    c.epochs = 100;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    c = {};
    c.lr_floor = 2e-3;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    c = {};
    c.batch_size = 0;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    c = {};
    c.model.n_heads = 4;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);

    const nlohmann::json j = toy_train_config();
    const TrainConfig back = j.get<TrainConfig>();
    CHECK(back.model == toy_train_config().model);
    CHECK(back.batch_size == 4);
    CHECK(back.loss.kind == LossKind::HardLog);
}

TEST_CASE("empty dataset and bad patches are rejected") {
    CHECK(kind_of([] { Trainer(toy_train_config(), {}); }) == ErrorKind::Dataset);
    auto data = testing::synthetic_patches(1, 2, 3);
    data[0].raw_patch = Image(16, 16, 4);
    Trainer t(toy_train_config(), data);
    CHECK(kind_of([&] { t.run(); }) == ErrorKind::Shape);
}

TEST_CASE("validation split holds out round(5%) of the patches") {
    const auto data = testing::synthetic_patches(4, 10, 5);
    REQUIRE(data.size() == 40);
    const Trainer t(toy_train_config(), data);
    CHECK(t.validation_size() == 2);
    CHECK(t.train_size() == 38);
    CHECK(t.steps_per_epoch() == 10);
    const Trainer one(toy_train_config(), testing::synthetic_patches(1, 1, 5));
    CHECK(one.validation_size() == 0);
}

TEST_CASE("batch assembly crops the network input and resizes the context") {
    const auto data = testing::synthetic_patches(1, 2, 9);
    const BatchInputs in = make_batch({&data[0], &data[1]}, std::nullopt, 16);
    REQUIRE(in.rgb.size() == 2);
    CHECK(in.rgb[0].height() == 66);
    CHECK(in.rgb[0].at(0, 0, 0) == data[0].rgb_patch.at(1, 1, 0));
    CHECK(in.context[0].height() == 16);
    CHECK(in.target.rows() == 2 * 32 * 32);
    CHECK(in.target(32 * 32 + 5, 2) == data[1].raw_patch.at(0, 5, 2));
    const BatchInputs full = make_batch({&data[0]}, std::nullopt);
    CHECK(full.context[0] == *data[0].context);
    CHECK_FALSE(make_batch({&data[0]}, 1).context[0] == *data[0].context);
}

TEST_CASE("two runs with the same seed are identical") {
    const auto data = testing::synthetic_patches(2, 6, 11);
    Trainer a(toy_train_config(), data), b(toy_train_config(), data);
    const TrainResult ra = a.run(), rb = b.run();
    REQUIRE(ra.steps.size() == rb.steps.size());
    for (std::size_t i = 0; i < ra.steps.size(); ++i) CHECK(ra.steps[i].train_loss == rb.steps[i].train_loss);
    CHECK(a.model().flatten_weights() == b.model().flatten_weights());
    CHECK(ra.final_val_loss == rb.final_val_loss);
}

TEST_CASE("training reduces the loss on a small dataset") {
    auto cfg = toy_train_config(12, 12);
    cfg.lr_start = 5e-3;
    cfg.lr_floor = 1e-4;
    cfg.validation_fraction = 0.0;
    const auto data = testing::synthetic_patches(2, 4, 13);
    Trainer t(cfg, data);
    const double before = t.evaluate_loss(data);
    const TrainResult r = t.run();
    const double after = t.evaluate_loss(data);
    MESSAGE("loss " << before << " -> " << after);
    CHECK(after < before);
    CHECK(r.epochs.back().train_loss < r.epochs.front().train_loss);
    for (const auto& s : r.steps) {
        CHECK(s.lr <= cfg.lr_start);
        CHECK(s.lr >= cfg.lr_floor);
    }
}

TEST_CASE("checkpoints at window boundaries, CSV log and resume reproduce the run") {
    testing::TempDir dir("trainer");
    const auto data = testing::synthetic_patches(2, 6, 21);
    auto cfg = toy_train_config(4, 2);

    Trainer whole(cfg, data);
    const TrainResult full = whole.run({.output_dir = dir / "whole"});
    REQUIRE(full.checkpoints.size() == 3);
    CHECK(full.checkpoints[0].filename() == "model-epoch002.ckpt");
    CHECK(full.checkpoints[1].filename() == "model-epoch004.ckpt");
    CHECK(full.checkpoints[2].filename() == "model.ckpt");
    CHECK(count_lines(dir / "whole" / "metrics.csv") == 1 + static_cast<int>(full.steps.size()));
    const Checkpoint mid = load_checkpoint(full.checkpoints[0]);
    REQUIRE(mid.training.has_value());
    CHECK(mid.training->epoch == 2);
    CHECK(mid.training->step == 2 * whole.steps_per_epoch());
    CHECK(mid.training->adam_step == mid.training->step);

    Trainer first(cfg, data);
    const TrainResult part = first.run({.output_dir = dir / "split", .max_epochs = 2});
    CHECK(part.epochs.size() == 2);
    Trainer second(cfg, data);
    const TrainResult rest =
        second.run({.output_dir = dir / "split", .resume_from = dir / "split" / "model-epoch002.ckpt"});
    REQUIRE(rest.epochs.size() == 2);
    CHECK(rest.steps.front().step == 2 * second.steps_per_epoch());
    CHECK(count_lines(dir / "split" / "metrics.csv") == 1 + static_cast<int>(full.steps.size()));

    const auto w1 = whole.model().flatten_weights();
    const auto w2 = second.model().flatten_weights();
    REQUIRE(w1.size() == w2.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i)
        worst = std::max(worst, std::abs(w1[i] - w2[i]) / std::max(std::abs(w1[i]), 1e-12));
    CHECK(worst <= 1e-4);
    CHECK(std::abs(rest.final_val_loss - full.final_val_loss) <= 1e-4 * std::abs(full.final_val_loss));

    auto other = cfg;
    other.model.trunk_width = 16;
    other.model.context_dim = 16;
    Trainer mismatch(other, data);
    CHECK(kind_of([&] { mismatch.run({.resume_from = full.checkpoints[0]}); }) == ErrorKind::Checkpoint);
}

TEST_CASE("a non-finite loss aborts with a numerical error and batch diagnostics") {
    auto data = testing::synthetic_patches(1, 4, 31);
    for (auto& p : data) p.rgb_patch.at(10, 10, 0) = std::numeric_limits<double>::quiet_NaN();
    auto cfg = toy_train_config();
    cfg.validation_fraction = 0.0;
    Trainer t(cfg, data);
    try {
        t.run();
        FAIL("expected a numerical error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Numerical);
        CHECK(std::string(e.what()).find("step 0") != std::string::npos);
        CHECK(std::string(e.what()).find("raw mean") != std::string::npos);
    }
}

TEST_CASE("max_steps stops early") {
    const auto data = testing::synthetic_patches(2, 6, 41);
    Trainer t(toy_train_config(), data);
    const TrainResult r = t.run({.max_steps = 2});
    CHECK(r.total_steps == 2);
    CHECK(r.steps.size() == 2);
}
