#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "rtwarp/geometry.hpp"
#include "rtwarp/tensor.hpp"

// Sampling-grid construction and bilinear resampling for the RoI
// Tanh-polar transform.
//
// Raster conventions (binding for every operation in this header):
//  - Tanh-polar raster: rows index angle, theta_i = -pi + 2*pi*(i+0.5)/H;
//    columns index radius, rho_j = (j+0.5)/W. The half-pixel offset keeps
//    rho < 1 so every grid coordinate is finite.
//  - Source pixel (m, n) has continuous center (n+0.5, m+0.5). Grids store
//    continuous coordinates in that space.

namespace rtwarp::warp {

enum class BorderPolicy : uint8_t { Zero, Replicate };

/// Per-output-pixel source coordinates for one warp direction.
struct SamplingGrid {
    int height = 0;
    int width = 0;
    /// Interleaved (sx, sy) continuous source coordinates, row-major, H*W pairs.
    std::vector<double> coords;
    BorderPolicy border = BorderPolicy::Zero;
    /// Wrap the row (y) coordinate cyclically before interpolation; used
    /// when sampling from a Tanh-polar raster across the theta seam.
    bool wrap_rows = false;

    double sx(int i, int j) const { return coords[2 * (static_cast<size_t>(i) * width + j)]; }
    double sy(int i, int j) const { return coords[2 * (static_cast<size_t>(i) * width + j) + 1]; }
};

/// Bounding-box augmentation: uniform center shift (as a fraction of w, h)
/// followed by uniform scaling. Deterministic per (seed, draw_index).
struct AugmentParams {
    double max_shift_frac = 0.1;
    double scale_lo = 0.9;
    double scale_hi = 1.1;
    uint64_t seed = 0;

    [[nodiscard]] bool valid() const {
        return max_shift_frac >= 0.0 && max_shift_frac < 1.0 &&
               scale_lo > 0.0 && scale_lo <= scale_hi;
    }
};

/// Angular coordinate of Tanh-polar raster row i (row center).
inline double row_theta(int i, int h) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * (i + 0.5) / h;
}

/// Radial coordinate of Tanh-polar raster column j (column center).
inline double col_rho(int j, int w) { return (j + 0.5) / w; }

/// Grid for warping a Cartesian image onto the H x W Tanh-polar raster:
/// entry (i, j) = from_tanh_polar((theta_i, rho_j), bbox).
SamplingGrid make_forward_grid(const geometry::BBox& bbox, int h, int w);

/// Grid for mapping an srcH x srcW Tanh-polar raster back to Cartesian
/// pixels: each output pixel center is sent through to_tanh_polar and
/// converted to fractional raster coordinates (rows wrap across the
/// theta seam, columns clamp at the radial edges).
SamplingGrid make_inverse_grid(const geometry::BBox& bbox, int out_h, int out_w,
                               int src_h, int src_w);

/// Bilinear interpolation of img at each grid coordinate, per channel.
/// Out-of-bounds taps follow the grid's BorderPolicy (rows wrap first
/// when the grid says so).
Tensor bilinear_sample(const Tensor& img, const SamplingGrid& grid);

/// Forward RT-transform of an image (Zero border).
Tensor warp_image(const Tensor& img, const geometry::BBox& bbox, int h, int w);

/// Inverse RT-transform of score maps back to Cartesian resolution
/// (Replicate border for the radial clamp, rows wrapped).
Tensor unwarp_scores(const Tensor& scores, const geometry::BBox& bbox,
                     int out_h, int out_w);

/// unwarp_scores followed by per-pixel argmax; ties break toward the
/// lowest class index. Requires at least two channels.
LabelMask unwarp_labels(const Tensor& scores, const geometry::BBox& bbox,
                        int out_h, int out_w);

/// Random shift + scale of a bbox; identical (params.seed, draw_index)
/// always yields the same box.
geometry::BBox augment_bbox(const geometry::BBox& bbox, const AugmentParams& params,
                            uint64_t draw_index);

/// Element-wise mean of same-shaped score maps. Throws on an empty list
/// or a shape mismatch.
Tensor tta_average(const std::vector<Tensor>& score_maps);

}  // namespace rtwarp::warp
