#pragma once

#include <string>

#include "rtwarp/tensor.hpp"

// 8-bit PNG codecs. Images load as (1, C, H, W) float tensors with values
// in [0, 255]; label masks are single-channel PNGs whose pixel values are
// class indices (a palette, when wanted, is applied only to overlay
// output).

namespace rtwarp::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Decode an 8-bit RGB or grayscale PNG. C is 3 or 1.
Tensor read_png(const std::string& path);

/// Encode a (1, {1|3}, H, W) tensor; values are rounded and clamped
/// to [0, 255].
void write_png(const std::string& path, const Tensor& img);

/// Decode a single-channel 8-bit PNG as a label mask with the given
/// class count. Throws if any pixel value >= num_classes.
LabelMask read_mask_png(const std::string& path, int num_classes);

/// Encode class indices as a single-channel 8-bit PNG.
void write_mask_png(const std::string& path, const LabelMask& mask);

}  // namespace rtwarp::io
