#include "rtwarp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace rtwarp::io {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

// Decodes to 8-bit gray or RGB rows (palette/16-bit/alpha inputs are
// normalized by libpng transforms).
std::vector<std::vector<png_byte>> decode_rows(const std::string& path,
                                               int& width, int& height,
                                               int& channels) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    channels = static_cast<int>(png_get_channels(png, info));
    const size_t rowbytes = png_get_rowbytes(png, info);
    rows.assign(height, std::vector<png_byte>(rowbytes));
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return rows;
}

void encode_rows(const std::string& path, const std::vector<png_byte>& pixels,
                 int width, int height, int channels) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y) {
        row_ptrs[y] = const_cast<png_bytep>(
            pixels.data() + static_cast<size_t>(y) * width * channels);
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Tensor read_png(const std::string& path) {
    int w = 0, h = 0, c = 0;
    const auto rows = decode_rows(path, w, h, c);
    if (c != 1 && c != 3) throw IoError(path + ": expected gray or RGB PNG");
    Tensor img(1, c, h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ic = 0; ic < c; ++ic) {
                img.at(0, ic, y, x) = static_cast<float>(rows[y][x * c + ic]);
            }
        }
    }
    return img;
}

void write_png(const std::string& path, const Tensor& img) {
    if (img.n != 1 || (img.c != 1 && img.c != 3)) {
        throw IoError("write_png: tensor must be (1, 1|3, H, W)");
    }
    std::vector<png_byte> pixels(static_cast<size_t>(img.h) * img.w * img.c);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            for (int ic = 0; ic < img.c; ++ic) {
                const float v = std::round(img.at(0, ic, y, x));
                pixels[(static_cast<size_t>(y) * img.w + x) * img.c + ic] =
                    static_cast<png_byte>(std::clamp(v, 0.0f, 255.0f));
            }
        }
    }
    encode_rows(path, pixels, img.w, img.h, img.c);
}

LabelMask read_mask_png(const std::string& path, int num_classes) {
    int w = 0, h = 0, c = 0;
    const auto rows = decode_rows(path, w, h, c);
    if (c != 1) throw IoError(path + ": mask must be single-channel");
    LabelMask mask(h, w, num_classes);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const png_byte v = rows[y][x];
            if (v >= num_classes) {
                throw IoError(path + ": label " + std::to_string(v) +
                              " >= class count " + std::to_string(num_classes));
            }
            mask.at(y, x) = v;
        }
    }
    return mask;
}

void write_mask_png(const std::string& path, const LabelMask& mask) {
    std::vector<png_byte> pixels(mask.labels.begin(), mask.labels.end());
    encode_rows(path, pixels, mask.width, mask.height, 1);
}

}  // namespace rtwarp::io
