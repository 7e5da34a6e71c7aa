#include "rtwarp/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rtwarp/warp.hpp"

namespace rtwarp::nn {

namespace {

Tensor pad_yx(const Tensor& t, int my, int mx, PadMode mode) {
    if (my == 0 && mx == 0) return t;
    Tensor out(t.n, t.c, t.h + 2 * my, t.w + 2 * mx);
    for (int in = 0; in < t.n; ++in) {
        for (int ic = 0; ic < t.c; ++ic) {
            for (int oy = 0; oy < out.h; ++oy) {
                for (int ox = 0; ox < out.w; ++ox) {
                    const int sy = oy - my;
                    const int sx = ox - mx;
                    float v = 0.0f;
                    if (mode == PadMode::Zero) {
                        if (sy >= 0 && sy < t.h && sx >= 0 && sx < t.w) {
                            v = t.at(in, ic, sy, sx);
                        }
                    } else {  // Mixed: rows cyclic, columns clamped
                        int wy = sy % t.h;
                        if (wy < 0) wy += t.h;
                        const int cx = std::clamp(sx, 0, t.w - 1);
                        v = t.at(in, ic, wy, cx);
                    }
                    out.at(in, ic, oy, ox) = v;
                }
            }
        }
    }
    return out;
}

}  // namespace

warp::SamplingGrid inter_grid_tp_to_tc(int h, int w) {
    warp::SamplingGrid g;
    g.height = h;
    g.width = w;
    g.border = warp::BorderPolicy::Replicate;
    g.wrap_rows = true;
    g.coords.resize(2 * static_cast<size_t>(h) * w);
    for (int i = 0; i < h; ++i) {
        const double u2 = -1.0 + 2.0 * (i + 0.5) / h;
        for (int j = 0; j < w; ++j) {
            const double u1 = -1.0 + 2.0 * (j + 0.5) / w;
            const geometry::PolarCoord pc = geometry::tc_to_tp({u1, u2});
            g.coords[2 * (static_cast<size_t>(i) * w + j)] = pc.rho * w;
            g.coords[2 * (static_cast<size_t>(i) * w + j) + 1] =
                (pc.theta + std::numbers::pi) / (2.0 * std::numbers::pi) * h;
        }
    }
    return g;
}

warp::SamplingGrid inter_grid_tc_to_tp(int h, int w) {
    warp::SamplingGrid g;
    g.height = h;
    g.width = w;
    g.border = warp::BorderPolicy::Replicate;
    g.wrap_rows = false;
    g.coords.resize(2 * static_cast<size_t>(h) * w);
    for (int i = 0; i < h; ++i) {
        const double theta = warp::row_theta(i, h);
        for (int j = 0; j < w; ++j) {
            const geometry::TCCoord tc =
                geometry::tp_to_tc({theta, warp::col_rho(j, w)});
            g.coords[2 * (static_cast<size_t>(i) * w + j)] = (tc.u1 + 1.0) / 2.0 * w;
            g.coords[2 * (static_cast<size_t>(i) * w + j) + 1] = (tc.u2 + 1.0) / 2.0 * h;
        }
    }
    return g;
}

namespace {
void relu_inplace(Tensor& t) {
    for (float& v : t.data) v = v < 0.0f ? 0.0f : v;
}
}  // namespace

Tensor pad(const Tensor& t, int margin, PadMode mode) {
    if (margin < 0) throw std::invalid_argument("pad: negative margin");
    return pad_yx(t, margin, margin, mode);
}

Tensor conv2d(const Tensor& t, const ConvParams& p) {
    const int kh = p.weights.h;
    const int kw = p.weights.w;
    if (kh % 2 == 0 || kw % 2 == 0) {
        throw std::invalid_argument("conv2d: kernel dims must be odd");
    }
    if (p.stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (p.weights.c != t.c) {
        throw std::invalid_argument("conv2d: input channel mismatch");
    }
    if (static_cast<int>(p.bias.size()) != p.weights.n) {
        throw std::invalid_argument("conv2d: bias size mismatch");
    }
    const Tensor padded = pad_yx(t, (kh - 1) / 2, (kw - 1) / 2, p.pad_mode);
    if (padded.h < kh || padded.w < kw) {
        throw std::invalid_argument("conv2d: spatial dims smaller than kernel");
    }
    const int oh = (padded.h - kh) / p.stride + 1;
    const int ow = (padded.w - kw) / p.stride + 1;
    Tensor out(t.n, p.weights.n, oh, ow);
    for (int in = 0; in < t.n; ++in) {
        for (int oc = 0; oc < p.weights.n; ++oc) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = p.bias[oc];
                    for (int ic = 0; ic < t.c; ++ic) {
                        for (int ky = 0; ky < kh; ++ky) {
                            for (int kx = 0; kx < kw; ++kx) {
                                acc += static_cast<double>(
                                           padded.at(in, ic, oy * p.stride + ky,
                                                     ox * p.stride + kx)) *
                                       p.weights.at(oc, ic, ky, kx);
                            }
                        }
                    }
                    out.at(in, oc, oy, ox) = static_cast<float>(acc);
                }
            }
        }
    }
    return out;
}

Tensor bilinear_upsample(const Tensor& t, int factor) {
    if (factor < 1) throw std::invalid_argument("bilinear_upsample: factor must be >= 1");
    if (factor == 1) return t;
    const int oh = t.h * factor;
    const int ow = t.w * factor;
    Tensor out(t.n, t.c, oh, ow);
    for (int oy = 0; oy < oh; ++oy) {
        const double fy = std::clamp((oy + 0.5) / factor - 0.5, 0.0,
                                     static_cast<double>(t.h - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, t.h - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < ow; ++ox) {
            const double fx = std::clamp((ox + 0.5) / factor - 0.5, 0.0,
                                         static_cast<double>(t.w - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, t.w - 1);
            const double wx = fx - x0;
            for (int in = 0; in < t.n; ++in) {
                for (int ic = 0; ic < t.c; ++ic) {
                    const double v =
                        (1.0 - wy) * ((1.0 - wx) * t.at(in, ic, y0, x0) +
                                      wx * t.at(in, ic, y0, x1)) +
                        wy * ((1.0 - wx) * t.at(in, ic, y1, x0) +
                              wx * t.at(in, ic, y1, x1));
                    out.at(in, ic, oy, ox) = static_cast<float>(v);
                }
            }
        }
    }
    return out;
}

Tensor resample_tp_to_tc(const Tensor& feat) {
    return warp::bilinear_sample(feat, inter_grid_tp_to_tc(feat.h, feat.w));
}

Tensor resample_tc_to_tp(const Tensor& feat) {
    return warp::bilinear_sample(feat, inter_grid_tc_to_tp(feat.h, feat.w));
}

Tensor hybrid_block_forward(const Tensor& x, const HybridBlockParams& p) {
    if (x.c % 8 != 0) {
        throw std::invalid_argument("hybrid_block_forward: channels must be divisible by 8");
    }
    const int half = x.c / 8;
    Tensor reduced = conv2d(x, p.reduce);
    if (reduced.c != 2 * half) {
        throw std::invalid_argument("hybrid_block_forward: reduce must output c/4 channels");
    }
    if (p.relu) relu_inplace(reduced);

    // Channel split into the two branch inputs.
    Tensor split1(reduced.n, half, reduced.h, reduced.w);
    Tensor split2(reduced.n, half, reduced.h, reduced.w);
    const size_t plane = static_cast<size_t>(reduced.h) * reduced.w;
    for (int in = 0; in < reduced.n; ++in) {
        for (int ic = 0; ic < half; ++ic) {
            std::copy_n(&reduced.at(in, ic, 0, 0), plane, &split1.at(in, ic, 0, 0));
            std::copy_n(&reduced.at(in, half + ic, 0, 0), plane, &split2.at(in, ic, 0, 0));
        }
    }

    const Tensor tp_out = conv2d(split1, p.tp_branch);
    const Tensor tc_out =
        resample_tc_to_tp(conv2d(resample_tp_to_tc(split2), p.tc_branch));
    if (!tp_out.same_shape(tc_out)) {
        throw std::invalid_argument("hybrid_block_forward: branch shape mismatch");
    }

    Tensor merged(tp_out.n, tp_out.c + tc_out.c, tp_out.h, tp_out.w);
    for (int in = 0; in < merged.n; ++in) {
        for (int ic = 0; ic < tp_out.c; ++ic) {
            const size_t src = (static_cast<size_t>(in) * tp_out.c + ic) * plane;
            std::copy_n(tp_out.data.data() + src, plane, &merged.at(in, ic, 0, 0));
            std::copy_n(tc_out.data.data() + src, plane,
                        &merged.at(in, tp_out.c + ic, 0, 0));
        }
    }

    Tensor restored = conv2d(merged, p.restore);
    if (!restored.same_shape(x)) {
        throw std::invalid_argument("hybrid_block_forward: restore must match input shape");
    }
    if (p.relu) relu_inplace(restored);
    for (size_t idx = 0; idx < restored.size(); ++idx) {
        restored.data[idx] += x.data[idx];
    }
    return restored;
}

Tensor fcn_head_forward(const Tensor& feat, const ConvParams& conv1,
                        const ConvParams& conv2, int upsample_factor) {
    return bilinear_upsample(conv2d(conv2d(feat, conv1), conv2), upsample_factor);
}

uint64_t hybrid_block_param_count(int c) {
    const uint64_t q = c / 4;
    const uint64_t e = c / 8;
    const uint64_t reduce = static_cast<uint64_t>(c) * q + q;
    const uint64_t branch = 9 * e * e + e;  // each 3x3 on halved channels
    const uint64_t restore = q * static_cast<uint64_t>(c) + c;
    return reduce + 2 * branch + restore;
}

uint64_t bottleneck_param_count(int c) {
    const uint64_t q = c / 4;
    const uint64_t reduce = static_cast<uint64_t>(c) * q + q;
    const uint64_t mid = 9 * q * q + q;
    const uint64_t restore = q * static_cast<uint64_t>(c) + c;
    return reduce + mid + restore;
}

}  // namespace rtwarp::nn
