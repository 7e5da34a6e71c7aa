#include "rtwarp/checks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rtwarp/geometry.hpp"
#include "rtwarp/metrics.hpp"
#include "rtwarp/nn.hpp"
#include "rtwarp/warp.hpp"

namespace rtwarp::checks {

namespace {

using geometry::BBox;
using geometry::PolarCoord;
using geometry::Point;
using geometry::TCCoord;

constexpr double kPi = std::numbers::pi;

struct Suite {
    std::vector<CheckResult> results;

    void record(const std::string& name, bool ok, const std::string& detail = "") {
        results.push_back({name, ok, ok ? "" : detail});
    }

    void bounded(const std::string& name, double worst, double tol) {
        std::ostringstream os;
        os << "max error " << worst << " > " << tol;
        record(name, worst <= tol, os.str());
    }
};

BBox random_bbox(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-200.0, 200.0);
    std::uniform_real_distribution<double> dim(5.0, 400.0);
    return {pos(rng), pos(rng), dim(rng), dim(rng)};
}

Tensor random_tensor(std::mt19937_64& rng, int n, int c, int h, int w) {
    Tensor t(n, c, h, w);
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    for (float& v : t.data) v = d(rng);
    return t;
}

nn::ConvParams random_conv(std::mt19937_64& rng, int oc, int ic, int k,
                           nn::PadMode mode) {
    nn::ConvParams p;
    p.weights = random_tensor(rng, oc, ic, k, k);
    p.bias.resize(oc);
    std::uniform_real_distribution<float> d(-0.5f, 0.5f);
    for (float& b : p.bias) b = d(rng);
    p.pad_mode = mode;
    return p;
}

Tensor rotate_rows(const Tensor& t, int k) {
    Tensor out(t.n, t.c, t.h, t.w);
    for (int in = 0; in < t.n; ++in) {
        for (int ic = 0; ic < t.c; ++ic) {
            for (int y = 0; y < t.h; ++y) {
                const int sy = ((y - k) % t.h + t.h) % t.h;
                for (int x = 0; x < t.w; ++x) {
                    out.at(in, ic, y, x) = t.at(in, ic, sy, x);
                }
            }
        }
    }
    return out;
}

std::vector<CheckResult> geometry_suite() {
    Suite s;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> rho01(0.0, 0.999);

    {  // round trip from_tanh_polar(to_tanh_polar(p)); points stay within
        // 5.5 ellipse radii, past which tanh saturation makes the radius
        // unrecoverable in double precision
        std::uniform_real_distribution<double> ext(0.0, 5.5);
        double worst = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const BBox b = random_bbox(rng);
            const geometry::Ellipse e = geometry::fit_ellipse(b);
            const double phi = angle(rng);
            const double r = ext(rng) * geometry::radius_at(e, phi);
            const Point p{e.cx + r * std::cos(phi), e.cy + r * std::sin(phi)};
            const Point q = geometry::from_tanh_polar(geometry::to_tanh_polar(p, b), b);
            worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
        }
        s.bounded("geometry.roundtrip_tanh_polar", worst, 1e-9);
    }
    {  // round trip tc_to_tp(tp_to_tc(c))
        double worst = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const PolarCoord c{angle(rng), rho01(rng)};
            const PolarCoord r = geometry::tc_to_tp(geometry::tp_to_tc(c));
            const double dt = std::abs(geometry::normalize_angle(r.theta - c.theta));
            worst = std::max(worst, std::max(dt, std::abs(r.rho - c.rho)));
        }
        s.bounded("geometry.roundtrip_inter_grid", worst, 1e-9);
    }
    {  // boundary pinning: ellipse points map to rho = tanh(1)
        const double target = std::tanh(1.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const BBox b = random_bbox(rng);
            const geometry::Ellipse e = geometry::fit_ellipse(b);
            for (int k = 0; k < 90; ++k) {
                const double t = 2.0 * kPi * k / 90.0;
                const Point p{e.cx + e.a * std::cos(t), e.cy + e.b * std::sin(t)};
                worst = std::max(worst,
                                 std::abs(geometry::to_tanh_polar(p, b).rho - target));
            }
        }
        s.bounded("geometry.boundary_pinning", worst, 1e-12);
    }
    {  // radius_at symmetry
        bool ok = true;
        for (int i = 0; i < 500 && ok; ++i) {
            const geometry::Ellipse e = geometry::fit_ellipse(random_bbox(rng));
            const double t = angle(rng);
            ok = std::abs(geometry::radius_at(e, t) - geometry::radius_at(e, -t)) <= 1e-12 &&
                 std::abs(geometry::radius_at(e, t) - geometry::radius_at(e, t + kPi)) <= 1e-9;
        }
        s.record("geometry.radius_symmetry", ok, "r_e(theta) symmetry violated");
    }
    {  // scale invariance
        double worst = 0.0;
        for (int i = 0; i < 5000; ++i) {
            const BBox b = random_bbox(rng);
            std::uniform_real_distribution<double> off(-300.0, 300.0);
            const Point c = b.center();
            const Point p{c.x + off(rng), c.y + off(rng)};
            for (double k : {0.1, 0.5, 2.0, 10.0}) {
                const BBox bs{c.x - k * b.w / 2.0, c.y - k * b.h / 2.0, k * b.w, k * b.h};
                const Point ps{c.x + k * (p.x - c.x), c.y + k * (p.y - c.y)};
                const PolarCoord r0 = geometry::to_tanh_polar(p, b);
                const PolarCoord r1 = geometry::to_tanh_polar(ps, bs);
                const double dt = std::abs(geometry::normalize_angle(r1.theta - r0.theta));
                worst = std::max(worst, std::max(dt, std::abs(r1.rho - r0.rho)));
            }
        }
        s.bounded("geometry.scale_invariance", worst, 1e-12);
    }
    {  // rotation equivariance for circular boxes
        double worst = 0.0;
        for (int i = 0; i < 5000; ++i) {
            BBox b = random_bbox(rng);
            b.h = b.w;  // circular case
            const Point c = b.center();
            std::uniform_real_distribution<double> off(-300.0, 300.0);
            const Point p{c.x + off(rng), c.y + off(rng)};
            const double phi = angle(rng);
            const double dx = p.x - c.x, dy = p.y - c.y;
            const Point pr{c.x + dx * std::cos(phi) - dy * std::sin(phi),
                           c.y + dx * std::sin(phi) + dy * std::cos(phi)};
            const PolarCoord r0 = geometry::to_tanh_polar(p, b);
            const PolarCoord r1 = geometry::to_tanh_polar(pr, b);
            const double dt =
                std::abs(geometry::normalize_angle(r1.theta - r0.theta - phi));
            worst = std::max(worst, std::max(dt, std::abs(r1.rho - r0.rho)));
        }
        s.bounded("geometry.rotation_equivariance_circular", worst, 1e-9);
    }
    {  // tp_to_tc equals the bbox-mediated composition
        double worst = 0.0;
        for (int i = 0; i < 5000; ++i) {
            const BBox b = random_bbox(rng);
            const PolarCoord c{angle(rng), rho01(rng)};
            const TCCoord direct = geometry::tp_to_tc(c);
            const TCCoord via = geometry::to_tanh_cartesian(
                geometry::from_tanh_polar(c, b), b);
            worst = std::max(worst, std::max(std::abs(direct.u1 - via.u1),
                                             std::abs(direct.u2 - via.u2)));
        }
        s.bounded("geometry.inter_grid_bbox_independence", worst, 1e-9);
    }
    return s.results;
}

std::vector<CheckResult> warp_suite() {
    Suite s;
    std::mt19937_64 rng(11);
    const BBox bbox{30.0, 40.0, 100.0, 80.0};

    {  // face-fraction column count matches the closed form
        bool ok = true;
        const double t1 = std::tanh(1.0);
        for (int w : {2, 3, 16, 100, 512, 777}) {
            int count = 0;
            for (int j = 0; j < w; ++j) {
                if (warp::col_rho(j, w) < t1) ++count;
            }
            const int expect = static_cast<int>(std::ceil(t1 * w - 0.5));
            if (count != expect) ok = false;
        }
        s.record("warp.face_fraction_columns", ok, "column count formula mismatch");
    }
    {  // bilinear_sample linearity in the image
        const warp::SamplingGrid g = warp::make_forward_grid(bbox, 32, 32);
        const Tensor a = random_tensor(rng, 1, 2, 24, 24);
        const Tensor b = random_tensor(rng, 1, 2, 24, 24);
        Tensor mix(1, 2, 24, 24);
        for (size_t i = 0; i < mix.size(); ++i) {
            mix.data[i] = 0.7f * a.data[i] + 1.3f * b.data[i];
        }
        const Tensor sa = warp::bilinear_sample(a, g);
        const Tensor sb = warp::bilinear_sample(b, g);
        const Tensor sm = warp::bilinear_sample(mix, g);
        double worst = 0.0;
        for (size_t i = 0; i < sm.size(); ++i) {
            worst = std::max(worst, std::abs(static_cast<double>(sm.data[i]) -
                                             (0.7 * sa.data[i] + 1.3 * sb.data[i])));
        }
        s.bounded("warp.bilinear_linearity", worst, 1e-6);
    }
    {  // identity augmentation
        bool ok = true;
        warp::AugmentParams id{0.0, 1.0, 1.0, 99};
        for (int i = 0; i < 100 && ok; ++i) {
            const BBox b = random_bbox(rng);
            const BBox a = warp::augment_bbox(b, id, i);
            ok = a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
        }
        s.record("warp.augment_identity", ok, "identity params changed a bbox");
    }
    {  // coordinate-level rotation equivariance: integer row shift on w=h grids
        const BBox square{10.0, 20.0, 64.0, 64.0};
        const int h = 36, w = 16;
        const warp::SamplingGrid g = warp::make_forward_grid(square, h, w);
        double worst = 0.0;
        for (int k : {1, 5, 18}) {
            const double phi = 2.0 * kPi * k / h;
            const Point c = square.center();
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const int ir = (i + k) % h;
                    // rotate the grid entry of row i by phi about the center
                    const double dx = g.sx(i, j) - c.x;
                    const double dy = g.sy(i, j) - c.y;
                    const double rx = c.x + dx * std::cos(phi) - dy * std::sin(phi);
                    const double ry = c.y + dx * std::sin(phi) + dy * std::cos(phi);
                    worst = std::max(worst, std::max(std::abs(rx - g.sx(ir, j)),
                                                     std::abs(ry - g.sy(ir, j))));
                }
            }
        }
        s.bounded("warp.grid_rotation_row_shift", worst, 1e-9);
    }
    return s.results;
}

std::vector<CheckResult> nnkernel_suite() {
    Suite s;
    std::mt19937_64 rng(13);

    {  // cyclic shift equivariance of Mixed-pad conv stacks, bitwise
        bool ok = true;
        for (int trial = 0; trial < 3 && ok; ++trial) {
            const int h = 8 + 4 * trial;
            const Tensor x = random_tensor(rng, 1, 3, h, 10);
            const nn::ConvParams c1 = random_conv(rng, 4, 3, 3, nn::PadMode::Mixed);
            const nn::ConvParams c2 = random_conv(rng, 2, 4, 3, nn::PadMode::Mixed);
            for (int k = 0; k < h && ok; ++k) {
                const Tensor a = nn::conv2d(nn::conv2d(rotate_rows(x, k), c1), c2);
                const Tensor b = rotate_rows(nn::conv2d(nn::conv2d(x, c1), c2), k);
                ok = a.data == b.data;
            }
        }
        s.record("nnkernel.cyclic_shift_equivariance", ok,
                 "conv did not commute with row rotation bitwise");
    }
    {  // zero-parameter hybrid block is the identity, bitwise
        nn::HybridBlockParams p;
        p.reduce.weights = Tensor(2, 8, 1, 1);
        p.reduce.bias.assign(2, 0.0f);
        p.tp_branch.weights = Tensor(1, 1, 3, 3);
        p.tp_branch.bias.assign(1, 0.0f);
        p.tc_branch.weights = Tensor(1, 1, 3, 3);
        p.tc_branch.bias.assign(1, 0.0f);
        p.restore.weights = Tensor(8, 2, 1, 1);
        p.restore.bias.assign(8, 0.0f);
        const Tensor x = random_tensor(rng, 1, 8, 12, 12);
        const Tensor y = nn::hybrid_block_forward(x, p);
        s.record("nnkernel.zero_block_identity", y.data == x.data,
                 "zeroed block is not identity");
    }
    {  // pad interior equals the original, bitwise
        const Tensor x = random_tensor(rng, 2, 3, 6, 7);
        const Tensor padded = nn::pad(x, 2, nn::PadMode::Mixed);
        bool ok = true;
        for (int in = 0; in < x.n && ok; ++in) {
            for (int ic = 0; ic < x.c && ok; ++ic) {
                for (int y = 0; y < x.h && ok; ++y) {
                    for (int xx = 0; xx < x.w && ok; ++xx) {
                        ok = padded.at(in, ic, y + 2, xx + 2) == x.at(in, ic, y, xx);
                    }
                }
            }
        }
        s.record("nnkernel.pad_interior_identity", ok, "interior changed by pad");
    }
    {  // parameter economy vs the matched bottleneck
        bool ok = true;
        for (int c : {8, 64, 256, 2048}) {
            ok = ok && nn::hybrid_block_param_count(c) < nn::bottleneck_param_count(c);
        }
        s.record("nnkernel.param_economy", ok, "hybrid block not smaller");
    }
    return s.results;
}

std::vector<CheckResult> metrics_suite() {
    Suite s;
    std::mt19937_64 rng(17);

    {  // F1 = 2 IoU / (1 + IoU)
        double worst = 0.0;
        std::uniform_int_distribution<uint64_t> count(0, 1000);
        for (int trial = 0; trial < 200; ++trial) {
            metrics::ConfusionMatrix cm(4);
            for (int g = 0; g < 4; ++g) {
                for (int p = 0; p < 4; ++p) cm.at(g, p) = count(rng);
            }
            const metrics::EvalReport rep = metrics::iou_f1(cm);
            for (const metrics::ClassScore& cs : rep.per_class) {
                if (!cs.defined) continue;
                worst = std::max(worst,
                                 std::abs(cs.f1 - 2.0 * cs.iou / (1.0 + cs.iou)));
            }
        }
        s.bounded("metrics.f1_iou_identity", worst, 1e-12);
    }
    {  // confusion totals and pred/gt swap symmetry
        bool ok = true;
        std::uniform_int_distribution<int> lab(0, 2);
        for (int trial = 0; trial < 50 && ok; ++trial) {
            LabelMask pred(16, 16, 3), gt(16, 16, 3);
            for (size_t i = 0; i < pred.labels.size(); ++i) {
                pred.labels[i] = static_cast<uint8_t>(lab(rng));
                gt.labels[i] = static_cast<uint8_t>(lab(rng));
            }
            const metrics::ConfusionMatrix cm = metrics::confusion(pred, gt);
            ok = cm.total() == 16 * 16;
            const metrics::EvalReport a = metrics::iou_f1(cm, true);
            const metrics::EvalReport b =
                metrics::iou_f1(metrics::confusion(gt, pred), true);
            for (int k = 0; k < 3 && ok; ++k) {
                ok = std::abs(a.per_class[k].iou - b.per_class[k].iou) <= 1e-15 &&
                     std::abs(a.per_class[k].f1 - b.per_class[k].f1) <= 1e-15;
            }
        }
        s.record("metrics.confusion_total_and_symmetry", ok,
                 "total or swap symmetry violated");
    }
    {  // combined loss is affine in lambda
        Tensor probs(1, 3, 8, 8);
        LabelMask gt(8, 8, 3);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        std::uniform_int_distribution<int> lab(0, 2);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                double raw[3], sum = 0.0;
                for (double& r : raw) sum += (r = u(rng));
                for (int ic = 0; ic < 3; ++ic) {
                    probs.at(0, ic, y, x) = static_cast<float>(raw[ic] / sum);
                }
                gt.at(y, x) = static_cast<uint8_t>(lab(rng));
            }
        }
        const double ce = metrics::cross_entropy(probs, gt);
        const double dl = metrics::dice_loss(probs, gt);
        double worst = 0.0;
        for (double lam : {0.0, 0.25, 0.5, 1.0}) {
            const double got = metrics::combined_loss(probs, gt, {lam});
            worst = std::max(worst, std::abs(got - (lam * ce + (1.0 - lam) * dl)));
        }
        s.bounded("metrics.lambda_affinity", worst, 1e-12);
    }
    return s.results;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"geometry", "warp", "nnkernel", "metrics", "all"};
}

std::vector<CheckResult> run_suite(const std::string& suite) {
    if (suite == "geometry") return geometry_suite();
    if (suite == "warp") return warp_suite();
    if (suite == "nnkernel") return nnkernel_suite();
    if (suite == "metrics") return metrics_suite();
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (const std::string& name : {"geometry", "warp", "nnkernel", "metrics"}) {
            auto part = run_suite(name);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw UnknownSuiteError("unknown suite: " + suite);
}

}  // namespace rtwarp::checks
