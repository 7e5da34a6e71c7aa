#pragma once

#include <cstdint>

#include "rtwarp/tensor.hpp"
#include "rtwarp/warp.hpp"

// Minimal dense convolution machinery: enough to run a HybridBlock and an
// FCN head forward pass with mixed padding, no autodiff.
//
// Determinism: every operation uses a fixed accumulation order, so results
// are bitwise reproducible run to run.

namespace rtwarp::nn {

/// Mixed: rows wrap cyclically (angular axis), columns replicate (radial
/// axis). Zero: zeros outside.
enum class PadMode : uint8_t { Mixed, Zero };

struct ConvParams {
    Tensor weights;            ///< (out_ch, in_ch, kh, kw)
    std::vector<float> bias;   ///< (out_ch)
    int stride = 1;
    PadMode pad_mode = PadMode::Mixed;

    [[nodiscard]] int out_channels() const { return weights.n; }
    [[nodiscard]] int in_channels() const { return weights.c; }
};

/// Bottleneck residual block with parallel 3x3 branches in Tanh-polar and
/// Tanh-Cartesian space, concatenated back in Tanh-polar space.
struct HybridBlockParams {
    ConvParams reduce;     ///< 1x1, c -> c/4
    ConvParams tp_branch;  ///< 3x3, c/8 -> c/8
    ConvParams tc_branch;  ///< 3x3, c/8 -> c/8
    ConvParams restore;    ///< 1x1, c/4 -> c
    bool relu = false;     ///< elementwise ReLU after reduce and restore
};

/// Pad a tensor by `margin` on all spatial sides.
Tensor pad(const Tensor& t, int margin, PadMode mode);

/// Cross-correlation (no kernel flip) over the padded tensor. With
/// stride 1 and odd kernels the output spatial dims equal the input dims.
Tensor conv2d(const Tensor& t, const ConvParams& p);

/// Align-corners-false bilinear upsampling to (H*factor, W*factor).
Tensor bilinear_upsample(const Tensor& t, int factor);

/// Grid backing resample_tp_to_tc: one entry per Tanh-Cartesian raster
/// pixel, holding its Tanh-polar raster coordinates.
warp::SamplingGrid inter_grid_tp_to_tc(int h, int w);

/// Grid backing resample_tc_to_tp: one entry per Tanh-polar raster pixel,
/// holding its Tanh-Cartesian raster coordinates.
warp::SamplingGrid inter_grid_tc_to_tp(int h, int w);

/// Resample a Tanh-polar feature map onto a same-sized Tanh-Cartesian
/// raster (u in (-1,1)^2, half-pixel offsets) through the closed-form
/// inter-grid map. Angular wrap is honored on the TP side.
Tensor resample_tp_to_tc(const Tensor& feat);

/// Inverse of resample_tp_to_tc's raster mapping.
Tensor resample_tc_to_tp(const Tensor& feat);

/// y = x + restore(concat(tp_branch(split1),
///                        resample_tc_to_tp(tc_branch(resample_tp_to_tc(split2)))))
/// where (split1, split2) halve the reduce output along channels.
/// Input channels must be divisible by 8; output shape equals input shape.
Tensor hybrid_block_forward(const Tensor& x, const HybridBlockParams& p);

/// conv2d -> conv2d -> bilinear_upsample.
Tensor fcn_head_forward(const Tensor& feat, const ConvParams& conv1,
                        const ConvParams& conv2, int upsample_factor);

/// Analytic parameter count (weights + biases) of one HybridBlock with
/// input channels c and bottleneck reduction ratio 4.
uint64_t hybrid_block_param_count(int c);

/// Parameter count of the matched standard bottleneck block
/// (1x1 c->c/4, 3x3 c/4->c/4, 1x1 c/4->c).
uint64_t bottleneck_param_count(int c);

}  // namespace rtwarp::nn
