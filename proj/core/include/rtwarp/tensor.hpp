#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rtwarp {

/// Rank-4 (batch, channel, height, width) float32 array, row-major.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_, float fill = 0.0f)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<size_t>(n_) * c_ * h_ * w_, fill) {
        if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0) {
            throw std::invalid_argument("Tensor: negative dimension");
        }
    }

    [[nodiscard]] size_t size() const { return data.size(); }
    [[nodiscard]] bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    float& at(int in, int ic, int iy, int ix) {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    float at(int in, int ic, int iy, int ix) const {
        return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
    }
};

/// 2-D array of class indices in [0, classes).
struct LabelMask {
    int height = 0;
    int width = 0;
    int classes = 0;
    std::vector<uint8_t> labels;

    LabelMask() = default;
    LabelMask(int h, int w, int num_classes, uint8_t fill = 0)
        : height(h), width(w), classes(num_classes),
          labels(static_cast<size_t>(h) * w, fill) {}

    uint8_t& at(int y, int x) { return labels[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }
};

}  // namespace rtwarp
