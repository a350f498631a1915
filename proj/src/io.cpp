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

#include "rgb2raw/io.hpp"

#include <png.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "rgb2raw/error.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;

void write_raw16(const fs::path& path, const RawMosaic& mosaic) {
    if (mosaic.data.size() != static_cast<std::size_t>(mosaic.height) * mosaic.width) {
        fail(ErrorKind::Dimension, "mosaic buffer does not match its extent");
    }
    std::vector<unsigned char> bytes(mosaic.data.size() * 2);
    for (std::size_t i = 0; i < mosaic.data.size(); ++i) {
        bytes[2 * i] = static_cast<unsigned char>(mosaic.data[i] & 0xff);
        bytes[2 * i + 1] = static_cast<unsigned char>(mosaic.data[i] >> 8);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "short write to " + path.string());
}

RawMosaic read_raw16(const fs::path& path, int height, int width, const SensorProfile& profile) {
    profile.validate();
    if (height <= 0 || width <= 0) fail(ErrorKind::Dimension, "RAW extent must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Input, "cannot open " + path.string());
    const std::size_t count = static_cast<std::size_t>(height) * width;
    std::vector<unsigned char> bytes(count * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()) || in.peek() != EOF) {
        fail(ErrorKind::Input, path.string() + " does not hold exactly " + std::to_string(height) + "x" +
                                   std::to_string(width) + " 16-bit samples");
    }
    RawMosaic mosaic;
    mosaic.height = height;
    mosaic.width = width;
    mosaic.profile = profile;
    mosaic.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        mosaic.data[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
    return mosaic;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RgbImage read_png(const fs::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) fail(ErrorKind::Input, "cannot open " + path.string());
    unsigned char signature[8];
    if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
        fail(ErrorKind::Input, path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, "libpng initialisation failed");
    }
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Input, "corrupt PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // little-endian host order
    png_read_update_info(png, info);

    const int height = static_cast<int>(png_get_image_height(png, info));
    const int width = static_cast<int>(png_get_image_width(png, info));
    bit_depth = png_get_bit_depth(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer.resize(row_bytes * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = buffer.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage image(height, width, kRgbChannels);
    auto dst = image.data();
    if (bit_depth == 16) {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const unsigned v = buffer[2 * i] | (buffer[2 * i + 1] << 8);
            dst[i] = v / 65535.0;
        }
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = buffer[i] / 255.0;
    }
    return image;
}

void write_png(const fs::path& path, const RgbImage& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) fail(ErrorKind::Parameter, "PNG bit depth must be 8 or 16");
    if (image.channels() != kRgbChannels || image.empty()) fail(ErrorKind::Shape, "write_png needs an RGB image");
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "libpng initialisation failed");
    }
    const int bytes_per_sample = bit_depth / 8;
    const std::size_t row_bytes = static_cast<std::size_t>(image.width()) * kRgbChannels * bytes_per_sample;
    std::vector<unsigned char> buffer(row_bytes * image.height());
    const auto src = image.data();
    const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto code = static_cast<unsigned>(std::lround(std::clamp(src[i], 0.0, 1.0) * max_code));
        if (bit_depth == 16) {
            buffer[2 * i] = static_cast<unsigned char>(code >> 8);  // PNG is big-endian
            buffer[2 * i + 1] = static_cast<unsigned char>(code & 0xff);
        } else {
            buffer[i] = static_cast<unsigned char>(code);
        }
    }
    std::vector<png_bytep> rows(image.height());
    for (int y = 0; y < image.height(); ++y) rows[y] = buffer.data() + row_bytes * y;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "failed writing PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width(), image.height(), bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Input, "cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> chunk(1 << 16);
    while (in) {
        in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned i = 0; i < length; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xf];
    }
    return hex;
}

}  // namespace rgb2raw
