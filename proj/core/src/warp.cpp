#include "rtwarp/warp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rtwarp::warp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}
}  // namespace

SamplingGrid make_forward_grid(const geometry::BBox& bbox, int h, int w) {
    if (h < 2 || w < 2) {
        throw std::invalid_argument("make_forward_grid: H and W must be >= 2");
    }
    SamplingGrid g;
    g.height = h;
    g.width = w;
    g.border = BorderPolicy::Zero;
    g.coords.resize(2 * static_cast<size_t>(h) * w);
    const geometry::Ellipse e = geometry::fit_ellipse(bbox);
    for (int i = 0; i < h; ++i) {
        const double theta = row_theta(i, h);
        const double re = geometry::radius_at(e, theta);
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (int j = 0; j < w; ++j) {
            const double r = re * std::atanh(col_rho(j, w));
            g.coords[2 * (static_cast<size_t>(i) * w + j)] = e.cx + r * ct;
            g.coords[2 * (static_cast<size_t>(i) * w + j) + 1] = e.cy + r * st;
        }
    }
    return g;
}

SamplingGrid make_inverse_grid(const geometry::BBox& bbox, int out_h, int out_w,
                               int src_h, int src_w) {
    if (out_h < 2 || out_w < 2 || src_h < 2 || src_w < 2) {
        throw std::invalid_argument("make_inverse_grid: all dims must be >= 2");
    }
    SamplingGrid g;
    g.height = out_h;
    g.width = out_w;
    g.border = BorderPolicy::Replicate;
    g.wrap_rows = true;
    g.coords.resize(2 * static_cast<size_t>(out_h) * out_w);
    for (int m = 0; m < out_h; ++m) {
        for (int n = 0; n < out_w; ++n) {
            const geometry::PolarCoord pc =
                geometry::to_tanh_polar({n + 0.5, m + 0.5}, bbox);
            // Continuous raster coordinates: index k has center k + 0.5.
            const double row = (pc.theta + std::numbers::pi) / kTwoPi * src_h;
            const double col = std::clamp(pc.rho * src_w, 0.0, static_cast<double>(src_w));
            g.coords[2 * (static_cast<size_t>(m) * out_w + n)] = col;
            g.coords[2 * (static_cast<size_t>(m) * out_w + n) + 1] = row;
        }
    }
    return g;
}

Tensor bilinear_sample(const Tensor& img, const SamplingGrid& grid) {
    Tensor out(img.n, img.c, grid.height, grid.width);
    const int sh = img.h;
    const int sw = img.w;
    for (int i = 0; i < grid.height; ++i) {
        for (int j = 0; j < grid.width; ++j) {
            // Fractional indices; integer k sits at continuous coord k + 0.5.
            const double fx = grid.sx(i, j) - 0.5;
            const double fy = grid.sy(i, j) - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const int y0 = static_cast<int>(std::floor(fy));
            const double wx = fx - x0;
            const double wy = fy - y0;
            int xs[2] = {x0, x0 + 1};
            int ys[2] = {y0, y0 + 1};
            bool xin[2], yin[2];
            for (int k = 0; k < 2; ++k) {
                xin[k] = xs[k] >= 0 && xs[k] < sw;
                if (grid.wrap_rows) {
                    ys[k] = wrap_index(ys[k], sh);
                    yin[k] = true;
                } else {
                    yin[k] = ys[k] >= 0 && ys[k] < sh;
                }
                if (grid.border == BorderPolicy::Replicate) {
                    xs[k] = clamp_index(xs[k], sw);
                    if (!grid.wrap_rows) ys[k] = clamp_index(ys[k], sh);
                    xin[k] = yin[k] = true;
                }
            }
            const double wts[2][2] = {{(1.0 - wy) * (1.0 - wx), (1.0 - wy) * wx},
                                      {wy * (1.0 - wx), wy * wx}};
            for (int in = 0; in < img.n; ++in) {
                for (int ic = 0; ic < img.c; ++ic) {
                    double acc = 0.0;
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            if (xin[dx] && yin[dy] && wts[dy][dx] != 0.0) {
                                acc += wts[dy][dx] * img.at(in, ic, ys[dy], xs[dx]);
                            }
                        }
                    }
                    out.at(in, ic, i, j) = static_cast<float>(acc);
                }
            }
        }
    }
    return out;
}

Tensor warp_image(const Tensor& img, const geometry::BBox& bbox, int h, int w) {
    return bilinear_sample(img, make_forward_grid(bbox, h, w));
}

Tensor unwarp_scores(const Tensor& scores, const geometry::BBox& bbox,
                     int out_h, int out_w) {
    return bilinear_sample(scores, make_inverse_grid(bbox, out_h, out_w,
                                                     scores.h, scores.w));
}

LabelMask unwarp_labels(const Tensor& scores, const geometry::BBox& bbox,
                        int out_h, int out_w) {
    if (scores.c < 2) {
        throw std::invalid_argument("unwarp_labels: need at least 2 channels");
    }
    const Tensor cart = unwarp_scores(scores, bbox, out_h, out_w);
    LabelMask mask(out_h, out_w, scores.c);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            int best = 0;
            float best_v = cart.at(0, 0, y, x);
            for (int ic = 1; ic < cart.c; ++ic) {
                const float v = cart.at(0, ic, y, x);
                if (v > best_v) {  // strict: ties go to the lowest index
                    best_v = v;
                    best = ic;
                }
            }
            mask.at(y, x) = static_cast<uint8_t>(best);
        }
    }
    return mask;
}

geometry::BBox augment_bbox(const geometry::BBox& bbox, const AugmentParams& params,
                            uint64_t draw_index) {
    if (!params.valid()) {
        throw std::invalid_argument("augment_bbox: invalid AugmentParams");
    }
    // One independent stream per draw index.
    std::mt19937_64 rng(params.seed ^ (0x9E3779B97F4A7C15ULL * (draw_index + 1)));
    std::uniform_real_distribution<double> shift(-params.max_shift_frac,
                                                 params.max_shift_frac);
    std::uniform_real_distribution<double> scale(params.scale_lo, params.scale_hi);
    const double dx = shift(rng) * bbox.w;
    const double dy = shift(rng) * bbox.h;
    const double s = scale(rng);
    const double nw = bbox.w * s;
    const double nh = bbox.h * s;
    // x' = center_x + dx - nw/2, written so identity params are exact
    return {bbox.x + dx + (bbox.w - nw) / 2.0,
            bbox.y + dy + (bbox.h - nh) / 2.0, nw, nh};
}

Tensor tta_average(const std::vector<Tensor>& score_maps) {
    if (score_maps.empty()) {
        throw std::invalid_argument("tta_average: empty list");
    }
    Tensor out = score_maps.front();
    for (size_t k = 1; k < score_maps.size(); ++k) {
        if (!score_maps[k].same_shape(out)) {
            throw std::invalid_argument("tta_average: shape mismatch");
        }
    }
    const double inv = 1.0 / score_maps.size();
    for (size_t idx = 0; idx < out.size(); ++idx) {
        double acc = 0.0;
        for (const Tensor& t : score_maps) acc += t.data[idx];
        out.data[idx] = static_cast<float>(acc * inv);
    }
    return out;
}

}  // namespace rtwarp::warp
