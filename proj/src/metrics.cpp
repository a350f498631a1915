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

#include "rgb2raw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/io.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b)) {
        fail(ErrorKind::Shape, std::string(what) + ": shapes differ (" + std::to_string(a.height()) + "x" +
                                   std::to_string(a.width()) + "x" + std::to_string(a.channels()) + " vs " +
                                   std::to_string(b.height()) + "x" + std::to_string(b.width()) + "x" +
                                   std::to_string(b.channels()) + ")");
    }
}

std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const int r = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - r;
        w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable weighted mean over every fully covered window; output is
// (h - k + 1) x (w - k + 1).
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w, const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int oh = h - k + 1, ow = w - k + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += taps[t] * plane[static_cast<std::size_t>(y) * w + x + t];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int t = 0; t < k; ++t) acc += taps[t] * rows[static_cast<std::size_t>(y + t) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

std::vector<double> channel_plane(const Image& img, int c) {
    std::vector<double> p(static_cast<std::size_t>(img.height()) * img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) p[static_cast<std::size_t>(y) * img.width() + x] = img.at(y, x, c);
    return p;
}

std::string format_number(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

}  // namespace

double psnr(const Image& pred, const Image& target) {
    require_same_shape(pred, target, "psnr");
    const auto a = pred.data();
    const auto b = target.data();
    if (a.empty()) fail(ErrorKind::Shape, "psnr: empty images");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrInfinite;
    return 10.0 * std::log10(static_cast<double>(a.size()) / sse);
}

double display_psnr(double db) { return std::min(db, kPsnrDisplayCap); }

SsimResult ssim_detailed(const Image& pred, const Image& target) {
    require_same_shape(pred, target, "ssim");
    if (pred.height() == 0 || pred.width() == 0 || pred.channels() == 0) fail(ErrorKind::Shape, "ssim: empty images");
    SsimResult result;
    const int h = pred.height(), w = pred.width();
    int k = kSsimWindow;
    if (std::min(h, w) < k) {
        k = std::min(h, w);
        if (k % 2 == 0) --k;
        result.warnings.push_back("ssim: image " + std::to_string(h) + "x" + std::to_string(w) + " is smaller than the " +
                                  std::to_string(kSsimWindow) + "-tap window, using " + std::to_string(k));
    }
    result.window = k;
    const std::vector<double> taps = gaussian_taps(k, kSsimSigma);
    const double c1 = kSsimK1 * kSsimK1;
    const double c2 = kSsimK2 * kSsimK2;

    double total = 0.0;
    for (int c = 0; c < pred.channels(); ++c) {
        const std::vector<double> x = channel_plane(pred, c);
        const std::vector<double> y = channel_plane(target, c);
        std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mx = filter_valid(x, h, w, taps);
        const auto my = filter_valid(y, h, w, taps);
        const auto mxx = filter_valid(xx, h, w, taps);
        const auto myy = filter_valid(yy, h, w, taps);
        const auto mxy = filter_valid(xy, h, w, taps);
        double sum = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double vx = mxx[i] - mx[i] * mx[i];
            const double vy = myy[i] - my[i] * my[i];
            const double cov = mxy[i] - mx[i] * my[i];
            const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
            const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
            sum += num / den;
        }
        total += sum / static_cast<double>(mx.size());
    }
    result.value = total / pred.channels();
    return result;
}

double ssim(const Image& pred, const Image& target) { return ssim_detailed(pred, target).value; }

EvaluationReport evaluate_images(const std::vector<std::pair<std::string, std::pair<Image, Image>>>& items,
                                 int workers) {
    EvaluationReport report;
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return items[a].first < items[b].first; });

    struct Scored {
        ImageScore score;
        std::vector<std::string> warnings;
    };
    auto score_one = [&](std::size_t i) {
        const auto& [id, imgs] = items[i];
        Scored s;
        s.score.image_id = id;
        s.score.psnr_db = psnr(imgs.first, imgs.second);
        SsimResult r = ssim_detailed(imgs.first, imgs.second);
        s.score.ssim = r.value;
        for (auto& w : r.warnings) s.warnings.push_back(id + ": " + w);
        return s;
    };

    std::vector<Scored> scored(order.size());
    const std::size_t n_workers = static_cast<std::size_t>(std::max(1, workers));
    if (n_workers == 1) {
        for (std::size_t k = 0; k < order.size(); ++k) scored[k] = score_one(order[k]);
    } else {
        for (std::size_t start = 0; start < order.size(); start += n_workers) {
            std::vector<std::future<Scored>> jobs;
            const std::size_t end = std::min(order.size(), start + n_workers);
            for (std::size_t k = start; k < end; ++k) jobs.push_back(std::async(std::launch::async, score_one, order[k]));
            for (std::size_t k = start; k < end; ++k) scored[k] = jobs[k - start].get();
        }
    }

    double sum_db = 0.0, sum_display = 0.0, sum_ssim = 0.0;
    for (auto& s : scored) {
        sum_db += s.score.psnr_db;
        sum_display += display_psnr(s.score.psnr_db);
        sum_ssim += s.score.ssim;
        report.images.push_back(s.score);
        for (auto& w : s.warnings) report.warnings.push_back(std::move(w));
    }
    if (!report.images.empty()) {
        const double n = static_cast<double>(report.images.size());
        report.mean_psnr = sum_db / n;
        report.mean_psnr_display = sum_display / n;
        report.mean_ssim = sum_ssim / n;
    }
    return report;
}

FrameSizes frame_sizes_from_dir(const fs::path& dir) {
    FrameSizes sizes;
    auto read = [](const fs::path& p) {
        std::ifstream in(p);
        try {
            return nlohmann::json::parse(in, nullptr, true, true);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Input, p.string() + ": " + e.what());
        }
    };
    if (fs::exists(dir / "conversion_manifest.json")) {
        const auto j = read(dir / "conversion_manifest.json");
        for (const auto& img : j.value("images", nlohmann::json::array())) {
            const fs::path out = img.at("output").get<std::string>();
            sizes[out.stem().string()] = {img.at("height").get<int>(), img.at("width").get<int>()};
        }
    }
    if (fs::exists(dir / "manifest.json")) {
        const auto j = read(dir / "manifest.json");
        for (const auto& p : j.value("pairs", nlohmann::json::array())) {
            const fs::path raw = p.at("raw").get<std::string>();
            sizes.emplace(raw.stem().string(), std::pair{p.at("height").get<int>(), p.at("width").get<int>()});
        }
    }
    return sizes;
}

EvaluationReport evaluate_dataset(const fs::path& pred_dir, const fs::path& target_dir, const EvaluateOptions& options) {
    options.profile.validate();
    auto list_raw = [](const fs::path& dir) {
        if (!fs::is_directory(dir)) fail(ErrorKind::Input, dir.string() + " is not a directory");
        std::map<std::string, fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".raw") files[e.path().stem().string()] = e.path();
        }
        return files;
    };
    const auto preds = list_raw(pred_dir);
    const auto targets = list_raw(target_dir);

    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::pair<Image, Image>>> items;
    for (const auto& [id, pred_path] : preds) {
        const auto t = targets.find(id);
        if (t == targets.end()) {
            warnings.push_back(id + ": no target with this name, excluded");
            continue;
        }
        auto lookup = [&id](const FrameSizes& m) -> std::optional<std::pair<int, int>> {
            const auto it = m.find(id);
            return it == m.end() ? std::nullopt : std::optional(it->second);
        };
        auto pred_size = lookup(options.sizes);
        if (!pred_size) pred_size = lookup(options.target_sizes);
        if (!pred_size) pred_size = options.default_size;
        if (!pred_size) {
            warnings.push_back(id + ": frame size unknown, excluded");
            continue;
        }
        const auto target_size = lookup(options.target_sizes).value_or(*pred_size);
        try {
            const Image p = pack_rggb(read_raw16(pred_path, pred_size->first, pred_size->second, options.profile)).data;
            Image g = pack_rggb(read_raw16(t->second, target_size.first, target_size.second, options.profile)).data;
            if (!g.same_shape(p)) {
                if (g.height() < p.height() || g.width() < p.width()) {
                    warnings.push_back(id + ": target is smaller than the prediction, excluded");
                    continue;
                }
                // Converter output covers the top-left whole tiles of the frame.
                g = g.crop(0, 0, p.height(), p.width());
            }
            items.push_back({id, {p, g}});
        } catch (const Error& e) {
            warnings.push_back(id + ": " + e.what());
        }
    }
    for (const auto& [id, path] : targets) {
        if (!preds.count(id)) warnings.push_back(id + ": no prediction with this name, excluded");
    }

    EvaluationReport report = evaluate_images(items, options.workers);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    return report;
}

void write_report_csv(const fs::path& path, const EvaluationReport& report) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "image_id,psnr_db,ssim\n";
    for (const auto& s : report.images) {
        out << s.image_id << ',' << format_number(display_psnr(s.psnr_db)) << ',' << format_number(s.ssim) << '\n';
    }
    out << "mean," << format_number(report.mean_psnr_display) << ',' << format_number(report.mean_ssim) << '\n';
}

std::vector<double> histogram(const std::vector<double>& values, int bins, double lo, double hi) {
    if (bins < 1 || !(hi > lo)) fail(ErrorKind::Parameter, "histogram needs bins >= 1 and hi > lo");
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        if (v < lo || v > hi || std::isnan(v)) continue;
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    return counts;
}

double entropy_bits(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) h -= (c / total) * std::log2(c / total);
    }
    return h;
}

void write_histogram_svg(const fs::path& path, const std::string& title, double lo, double hi,
                         const std::vector<HistogramSeries>& series) {
    constexpr double kW = 640, kH = 360, kLeft = 50, kRight = 20, kTop = 40, kBottom = 40;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    double peak = 0.0;
    for (const auto& s : series)
        for (double v : s.values) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;

    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"" << kH - 12 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_number(lo) << "</text>\n";
    out << "<text x=\"" << kLeft + pw << "\" y=\"" << kH - 12
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(hi) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& vals = series[s].values;
        if (vals.empty()) continue;
        const char* color = kColors[s % std::size(kColors)];
        const double bw = pw / static_cast<double>(vals.size());
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t b = 0; b < vals.size(); ++b) {
            const double y = kTop + ph - ph * vals[b] / peak;
            out << kLeft + bw * b << ',' << y << ' ' << kLeft + bw * (b + 1) << ',' << y << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << kLeft + pw - 4 << "\" y=\"" << kTop + 14 * (s + 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace rgb2raw
