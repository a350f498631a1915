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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgb2raw/converter.hpp"
#include "rgb2raw/dataset.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/metrics.hpp"
#include "rgb2raw/population.hpp"
#include "rgb2raw/synth.hpp"
#include "rgb2raw/trainer.hpp"

namespace rgb2raw::cli {

namespace fs = std::filesystem;

int worker_count() {
    const char* env = std::getenv("RGB2RAW_WORKERS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) fail(ErrorKind::Config, std::string("RGB2RAW_WORKERS must be a positive integer, got '") + env + "'");
    return static_cast<int>(std::min(n, 256L));
}

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Input:
        case ErrorKind::Io:
        case ErrorKind::Dataset:
        case ErrorKind::Checkpoint:
            return kExitInput;
        case ErrorKind::Numerical:
            return kExitNumerical;
        default:
            return kExitInvariant;
    }
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    int count = 20;
    int height = 256;
    int width = 256;
    std::uint64_t seed = 0;
    double min_exposure = SynthConfig{}.min_exposure;
    double max_exposure = SynthConfig{}.max_exposure;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SynthConfig cfg;
    cfg.height = a.height;
    cfg.width = a.width;
    cfg.min_exposure = a.min_exposure;
    cfg.max_exposure = a.max_exposure;
    const DatasetManifest m = write_synthetic_dataset(a.out, a.count, cfg, a.seed);
    out << "wrote " << m.pairs.size() << " synthetic pairs to " << a.out << '\n';
    return kExitOk;
}

// --- prepare -----------------------------------------------------------------

struct PrepareArgs {
    std::string manifest;
    std::string out;
    std::string sampling = "stratified";
    int patches_per_image = kDefaultPatchesPerImage;
    int bins = kDefaultBins;
    std::uint64_t seed = 0;
    std::string split = "train";
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
    if (a.patches_per_image < 1) fail(ErrorKind::Parameter, "--patches-per-image must be >= 1");
    if (a.bins < 1) fail(ErrorKind::Parameter, "--bins must be >= 1");
    const DatasetManifest manifest = DatasetManifest::load(a.manifest);
    PatchDataset ds;
    ds.method = parse_sampling_method(a.sampling);
    ds.seed = a.seed;
    ds.bins = a.bins;
    ds.patches_per_image = a.patches_per_image;
    ds.sensor = manifest.sensor;

    std::vector<const ImagePairEntry*> entries;
    for (const auto& e : manifest.pairs) {
        if (a.split == "all" || e.split == a.split) entries.push_back(&e);
    }

    struct Outcome {
        std::vector<PatchPair> pairs;
        std::vector<std::string> notes;
        bool skipped = false;
    };
    auto sample_one = [&](const ImagePairEntry* e) {
        Outcome o;
        try {
            const LoadedPair lp = load_pair(manifest, *e);
            ImageSampling s = sample_image_pair(lp.rgb, lp.raw, e->id, ds.method, ds.patches_per_image, ds.bins, ds.seed);
            o.pairs = std::move(s.pairs);
            for (auto& w : s.warnings) o.notes.push_back(e->id + ": " + w);
            if (o.pairs.empty()) o.skipped = true;
        } catch (const Error& ex) {
            if (ex.kind() != ErrorKind::Input && ex.kind() != ErrorKind::Io && ex.kind() != ErrorKind::Range &&
                ex.kind() != ErrorKind::Dimension) {
                throw;
            }
            o.notes.push_back(e->id + ": " + ex.what());
            o.skipped = true;
        }
        return o;
    };

    // Each image has its own derived seed, so the parallel map gives the same
    // patches as the serial one; results are gathered in manifest order.
    const std::size_t workers = static_cast<std::size_t>(worker_count());
    std::vector<Outcome> outcomes(entries.size());
    for (std::size_t start = 0; start < entries.size(); start += workers) {
        const std::size_t end = std::min(entries.size(), start + workers);
        std::vector<std::future<Outcome>> jobs;
        for (std::size_t i = start; i < end; ++i) jobs.push_back(std::async(std::launch::async, sample_one, entries[i]));
        for (std::size_t i = start; i < end; ++i) outcomes[i] = jobs[i - start].get();
    }

    std::size_t skipped = 0;
    for (auto& o : outcomes) {
        for (const auto& n : o.notes) err << "warning: " << n << '\n';
        if (o.skipped) ++skipped;
        for (auto& p : o.pairs) ds.pairs.push_back(std::move(p));
    }
    if (ds.pairs.empty()) {
        fail(ErrorKind::Dataset, "no patches: all " + std::to_string(entries.size()) + " image pairs were skipped");
    }
    save_patch_dataset(a.out, ds);
    out << "sampled " << ds.pairs.size() << " patches (" << to_string(ds.method) << ") from "
        << entries.size() - skipped << " image pairs";
    if (skipped) out << ", skipped " << skipped;
    out << '\n';
    return kExitOk;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string config;
    std::string out;
    std::string preset = "full";
    std::string resume;
    std::optional<std::string> loss;
    std::optional<int> heads;
    bool no_context = false;
    bool no_scaling = false;
    std::optional<int> epochs;
    std::optional<int> restart_period;
    std::optional<int> batch_size;
    std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    TrainConfig cfg;
    if (!a.config.empty()) {
        cfg = load_train_config(a.config);
    } else if (a.preset == "desk") {
        cfg.model = ReRawConfig::desk();
    } else if (a.preset != "full") {
        fail(ErrorKind::Config, "unknown preset '" + a.preset + "' (expected full or desk)");
    }
    if (a.loss) cfg.loss.kind = parse_loss_kind(*a.loss);
    if (a.heads) cfg.model.with_heads(*a.heads);
    if (a.no_context) cfg.model.use_context_encoder = false;
    if (a.no_scaling) cfg.model.use_scaling_encoder = false;
    if (a.epochs) cfg.epochs = *a.epochs;
    if (a.restart_period) cfg.restart_period_epochs = *a.restart_period;
    if (a.batch_size) cfg.batch_size = *a.batch_size;
    if (a.seed) cfg.seed = *a.seed;
    cfg.validate();

    PatchDataset ds = load_patch_dataset(a.data);
    Trainer trainer(cfg, std::move(ds.pairs));
    TrainOptions opts;
    opts.output_dir = a.out;
    if (!a.resume.empty()) opts.resume_from = fs::path(a.resume);
    const TrainResult r = trainer.run(opts);
    out << "trained " << r.total_steps << " steps on " << trainer.train_size() << " patches ("
        << trainer.validation_size() << " held out)\n";
    out << "final validation loss: " << std::setprecision(8) << r.final_val_loss << '\n';
    out << "checkpoint: " << (fs::path(a.out) / "model.ckpt").string() << '\n';
    return kExitOk;
}

// --- convert -----------------------------------------------------------------

struct SensorArgs {
    std::string manifest;
    std::optional<int> black;
    std::optional<int> white;
    std::string name = "sensor";
};

SensorProfile sensor_from_args(const SensorArgs& a, const std::optional<SensorProfile>& fallback) {
    SensorProfile p;
    if (!a.manifest.empty()) {
        p = DatasetManifest::load(a.manifest).sensor;
    } else if (fallback) {
        p = *fallback;
    } else {
        p.name = a.name;
    }
    if (a.black) p.black_level = *a.black;
    if (a.white) p.white_level = *a.white;
    p.validate();
    return p;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(in)) {
                if (e.is_regular_file() && e.path().extension() == ".png") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(in);
        }
    }
    return files;
}

struct ConvertArgs {
    std::string checkpoint;
    std::vector<std::string> inputs;
    std::string out;
    SensorArgs sensor;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out, std::ostream& err) {
    const SensorProfile profile = sensor_from_args(a.sensor, std::nullopt);
    const auto files = expand_inputs(a.inputs);
    if (files.empty()) fail(ErrorKind::Input, "no input images");
    const ConversionReport r = convert_batch(a.checkpoint, files, a.out, profile);
    for (const auto& s : r.skipped) err << "warning: skipped " << s.source << ": " << s.reason << '\n';
    out << "converted " << r.converted.size() << " of " << files.size() << " images into " << a.out << '\n';
    if (r.converted.empty()) fail(ErrorKind::Input, "no image could be converted");
    return kExitOk;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string pred;
    std::string target;
    std::string out;
    std::optional<int> height;
    std::optional<int> width;
    SensorArgs sensor;
};

std::optional<SensorProfile> sensor_from_conversion_manifest(const fs::path& dir) {
    const fs::path p = dir / "conversion_manifest.json";
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream in(p);
    try {
        const auto j = nlohmann::json::parse(in).at("sensor");
        SensorProfile s;
        s.name = j.value("name", s.name);
        s.black_level = j.at("black_level").get<int>();
        s.white_level = j.at("white_level").get<int>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Input, p.string() + ": " + e.what());
    }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    EvaluateOptions opts;
    auto fallback = sensor_from_conversion_manifest(a.pred);
    if (const fs::path m = fs::path(a.target).parent_path() / "manifest.json"; !fallback && fs::exists(m)) {
        fallback = DatasetManifest::load(m).sensor;
    }
    opts.profile = sensor_from_args(a.sensor, fallback);
    opts.workers = worker_count();
    opts.sizes = frame_sizes_from_dir(a.pred);
    // A dataset keeps its manifest one level above raw/.
    std::vector<fs::path> target_dirs{a.target, fs::path(a.target).parent_path()};
    if (!a.sensor.manifest.empty()) target_dirs.push_back(fs::path(a.sensor.manifest).parent_path());
    for (const auto& d : target_dirs) {
        if (d.empty() || !fs::is_directory(d)) continue;
        for (const auto& [k, v] : frame_sizes_from_dir(d)) opts.target_sizes.emplace(k, v);
    }
    if (a.height.has_value() != a.width.has_value()) fail(ErrorKind::Parameter, "--height and --width go together");
    if (a.height) opts.default_size = std::pair{*a.height, *a.width};

    const EvaluationReport r = evaluate_dataset(a.pred, a.target, opts);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    if (r.images.empty()) fail(ErrorKind::Input, "no prediction/target pairs to evaluate");
    const fs::path dir(a.out);
    write_report_csv(dir / "metrics.csv", r);
    std::vector<double> dbs;
    for (const auto& s : r.images) dbs.push_back(display_psnr(s.psnr_db));
    const auto [lo_it, hi_it] = std::minmax_element(dbs.begin(), dbs.end());
    const double lo = std::floor(*lo_it), hi = std::max(lo + 1.0, std::ceil(*hi_it));
    write_histogram_svg(dir / "psnr_histogram.svg", "per-image PSNR (dB)", lo, hi,
                        {{"images", histogram(dbs, 20, lo, hi)}});
    out << "images: " << r.images.size() << '\n';
    out << "mean PSNR: " << std::fixed << std::setprecision(4) << r.mean_psnr_display << " dB\n";
    out << "mean SSIM: " << std::setprecision(6) << r.mean_ssim << '\n';
    return kExitOk;
}

// --- stats -------------------------------------------------------------------

struct StatsArgs {
    std::string manifest;
    std::string out;
    PopulationOptions population;
    std::vector<std::string> patch_dirs;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
    const DatasetManifest manifest = DatasetManifest::load(a.manifest);
    std::vector<PopulationSummary> pops = compare_populations(manifest, a.population);
    for (const auto& dir : a.patch_dirs) {
        const PatchDataset ds = load_patch_dataset(dir);
        std::vector<const RgbImage*> patches;
        for (const auto& p : ds.pairs) patches.push_back(&p.rgb_patch);
        pops.push_back(summarize_population(fs::path(dir).filename().string(), patches, a.population.bins,
                                            a.population.pixel_bins));
    }
    write_population_report(a.out, "histograms", pops);
    out << "population,patches,entropy_red,entropy_green,entropy_blue,entropy_mean\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& p : pops) {
        out << p.name << ',' << p.patches << ',' << p.brightness_entropy[0] << ',' << p.brightness_entropy[1] << ','
            << p.brightness_entropy[2] << ',' << p.mean_brightness_entropy << '\n';
    }
    return kExitOk;
}

void add_sensor_flags(CLI::App* cmd, SensorArgs& s) {
    cmd->add_option("--manifest", s.manifest, "Dataset manifest supplying the sensor profile");
    cmd->add_option("--black-level", s.black, "Sensor black level (ADU)");
    cmd->add_option("--white-level", s.white, "Sensor white level (ADU)");
    cmd->add_option("--sensor-name", s.name, "Sensor name recorded in outputs");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RGB to packed-RGGB RAW conversion toolkit", "rgb2raw"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Write a synthetic RGB/RAW dataset (test fixture)");
    c_synth->add_option("--out", synth.out, "Output directory")->required();
    c_synth->add_option("--count", synth.count, "Number of image pairs")->check(CLI::PositiveNumber);
    c_synth->add_option("--height", synth.height, "Image height")->check(CLI::PositiveNumber);
    c_synth->add_option("--width", synth.width, "Image width")->check(CLI::PositiveNumber);
    c_synth->add_option("--seed", synth.seed, "Random seed");
    c_synth->add_option("--min-exposure", synth.min_exposure, "Lowest scene exposure");
    c_synth->add_option("--max-exposure", synth.max_exposure, "Highest scene exposure");

    PrepareArgs prep;
    auto* c_prep = app.add_subcommand("prepare", "Sample RGB/RAW patch pairs into a patch dataset");
    c_prep->add_option("--manifest", prep.manifest, "Dataset manifest")->required();
    c_prep->add_option("--out", prep.out, "Output directory")->required();
    c_prep->add_option("--sampling", prep.sampling, "random or stratified")
        ->check(CLI::IsMember({"random", "stratified"}));
    c_prep->add_option("--patches-per-image", prep.patches_per_image, "Patches drawn per image");
    c_prep->add_option("--bins", prep.bins, "Brightness bins for stratified sampling");
    c_prep->add_option("--seed", prep.seed, "Global sampling seed");
    c_prep->add_option("--split", prep.split, "Manifest split to sample: train, test or all")
        ->check(CLI::IsMember({"train", "test", "all"}));

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Train a model on a patch dataset");
    c_train->add_option("--data", train.data, "Patch dataset directory")->required();
    c_train->add_option("--out", train.out, "Output directory for checkpoints and metrics.csv")->required();
    c_train->add_option("--config", train.config, "Training config (JSON)");
    c_train->add_option("--preset", train.preset, "Model size when no config is given: full or desk");
    c_train->add_option("--resume", train.resume, "Checkpoint to resume from");
    c_train->add_option("--loss", train.loss, "l1, l2 or hln")->check(CLI::IsMember({"l1", "l2", "hln"}));
    c_train->add_option("--heads", train.heads, "Number of gamma heads (evenly spaced ladder)");
    c_train->add_flag("--no-context", train.no_context, "Disable the context encoder");
    c_train->add_flag("--no-scaling", train.no_scaling, "Disable the scaling encoder (equal head weights)");
    c_train->add_option("--epochs", train.epochs, "Override epochs");
    c_train->add_option("--restart-period", train.restart_period, "Override the restart period in epochs");
    c_train->add_option("--batch-size", train.batch_size, "Override batch size");
    c_train->add_option("--seed", train.seed, "Override seed");

    ConvertArgs conv;
    auto* c_conv = app.add_subcommand("convert", "Convert RGB PNGs to 16-bit RAW mosaics");
    c_conv->add_option("--checkpoint", conv.checkpoint, "Model checkpoint")->required();
    c_conv->add_option("--input", conv.inputs, "PNG files or directories")->required();
    c_conv->add_option("--out", conv.out, "Output directory")->required();
    add_sensor_flags(c_conv, conv.sensor);

    EvaluateArgs eval;
    auto* c_eval = app.add_subcommand("evaluate", "PSNR/SSIM of predicted against reference RAW files");
    c_eval->add_option("--pred", eval.pred, "Directory of predicted .raw files")->required();
    c_eval->add_option("--target", eval.target, "Directory of reference .raw files")->required();
    c_eval->add_option("--out", eval.out, "Directory for metrics.csv and psnr_histogram.svg")->required();
    c_eval->add_option("--height", eval.height, "Mosaic height for files without a manifest entry");
    c_eval->add_option("--width", eval.width, "Mosaic width for files without a manifest entry");
    add_sensor_flags(c_eval, eval.sensor);

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "Per-channel histograms of full, random and stratified populations");
    c_stats->add_option("--manifest", stats.manifest, "Dataset manifest")->required();
    c_stats->add_option("--out", stats.out, "Output directory")->required();
    c_stats->add_option("--patches-per-image", stats.population.patches_per_image, "Patches drawn per image");
    c_stats->add_option("--bins", stats.population.bins, "Brightness bins");
    c_stats->add_option("--pixel-bins", stats.population.pixel_bins, "Pixel histogram bins");
    c_stats->add_option("--seed", stats.population.seed, "Sampling seed");
    c_stats->add_option("--patches", stats.patch_dirs, "Extra patch datasets to summarize");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (c_synth->parsed()) return cmd_synth(synth, out);
        if (c_prep->parsed()) return cmd_prepare(prep, out, err);
        if (c_train->parsed()) return cmd_train(train, out);
        if (c_conv->parsed()) return cmd_convert(conv, out, err);
        if (c_eval->parsed()) return cmd_evaluate(eval, out, err);
        if (c_stats->parsed()) return cmd_stats(stats, out);
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error [io]: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace rgb2raw::cli
