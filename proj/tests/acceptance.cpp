// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rtwarp/geometry.hpp"
#include "rtwarp/image_io.hpp"
#include "rtwarp/metrics.hpp"
#include "rtwarp/nn.hpp"
#include "rtwarp/warp.hpp"

namespace fs = std::filesystem;
using namespace rtwarp;
using geometry::BBox;
using geometry::PolarCoord;
using geometry::Point;
using geometry::TCCoord;

namespace {

constexpr double kPi = std::numbers::pi;
const std::string kCli = RTWARP_CLI_PATH;

struct Criterion {
    int number;
    std::string name;
    std::function<bool(std::string&)> body;
};

BBox random_bbox(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-150.0, 150.0);
    std::uniform_real_distribution<double> dim(2.0, 400.0);
    return {pos(rng), pos(rng), dim(rng), dim(rng)};
}

double smooth_pattern(double x, double y) {
    return 0.5 + 0.22 * std::sin(2.0 * kPi * x / 140.0) +
           0.22 * std::cos(2.0 * kPi * y / 170.0);
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

nn::ConvParams random_conv(std::mt19937_64& rng, int oc, int ic, int k) {
    nn::ConvParams p;
    p.weights = Tensor(oc, ic, k, k);
    std::uniform_real_distribution<float> d(-0.5f, 0.5f);
    for (float& v : p.weights.data) v = d(rng);
    p.bias.resize(oc);
    for (float& b : p.bias) b = d(rng);
    p.pad_mode = nn::PadMode::Mixed;
    return p;
}

// --- criterion 1: face-ratio constant -----------------------------------

bool criterion_face_ratio(std::string& why) {
    std::mt19937_64 rng(101);
    const double target = std::tanh(1.0);
    double worst = 0.0;
    for (int b = 0; b < 1000; ++b) {
        const BBox box = random_bbox(rng);
        const geometry::Ellipse e = geometry::fit_ellipse(box);
        for (int k = 0; k < 360; ++k) {
            const double t = 2.0 * kPi * k / 360.0;
            const Point p{e.cx + e.a * std::cos(t), e.cy + e.b * std::sin(t)};
            worst = std::max(worst,
                             std::abs(geometry::to_tanh_polar(p, box).rho - target));
        }
    }
    if (worst > 1e-12) {
        why = "boundary rho deviates by " + std::to_string(worst);
        return false;
    }
    int columns = 0;
    for (int j = 0; j < 512; ++j) {
        if (warp::col_rho(j, 512) < target) ++columns;
    }
    if (columns != 390) {
        why = "face columns at W=512: " + std::to_string(columns);
        return false;
    }
    return true;
}

// --- criterion 2: invertibility ------------------------------------------

bool criterion_invertibility(std::string& why) {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::uniform_real_distribution<double> rad(0.0, 0.999);
    std::uniform_real_distribution<double> ext(0.0, 5.5);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const BBox b = random_bbox(rng);
        const geometry::Ellipse e = geometry::fit_ellipse(b);
        const double phi = ang(rng);
        const double dist = ext(rng) * geometry::radius_at(e, phi);
        const Point p{e.cx + dist * std::cos(phi), e.cy + dist * std::sin(phi)};
        const Point q = geometry::from_tanh_polar(geometry::to_tanh_polar(p, b), b);
        worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));

        const PolarCoord pc{ang(rng), rad(rng)};
        const PolarCoord r = geometry::tc_to_tp(geometry::tp_to_tc(pc));
        if (pc.rho > 0.0) {
            worst = std::max(worst,
                             std::abs(geometry::normalize_angle(r.theta - pc.theta)));
        }
        worst = std::max(worst, std::abs(r.rho - pc.rho));
    }
    if (worst > 1e-9) {
        why = "coordinate round-trip error " + std::to_string(worst);
        return false;
    }

    const BBox bbox{130, 140, 250, 230};
    Tensor img(1, 1, 512, 512);
    for (int m = 0; m < 512; ++m) {
        for (int n = 0; n < 512; ++n) {
            img.at(0, 0, m, n) = static_cast<float>(smooth_pattern(n + 0.5, m + 0.5));
        }
    }
    const Tensor back =
        warp::unwarp_scores(warp::warp_image(img, bbox, 512, 512), bbox, 512, 512);
    const geometry::Ellipse e = geometry::fit_ellipse(bbox);
    double se = 0.0;
    int count = 0;
    for (int m = 0; m < 512; ++m) {
        for (int n = 0; n < 512; ++n) {
            const double dx = n + 0.5 - e.cx, dy = m + 0.5 - e.cy;
            if (std::hypot(dx, dy) >= geometry::radius_at(e, std::atan2(dy, dx))) {
                continue;
            }
            const double d = back.at(0, 0, m, n) - img.at(0, 0, m, n);
            se += d * d;
            ++count;
        }
    }
    const double psnr = 10.0 * std::log10(1.0 / (se / count));
    if (psnr < 35.0) {
        why = "interior PSNR " + std::to_string(psnr) + " dB";
        return false;
    }
    return true;
}

// --- criterion 3: rotation equivariance ----------------------------------

bool criterion_rotation(std::string& why) {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> off(-250.0, 250.0);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        BBox b = random_bbox(rng);
        b.h = b.w;
        const Point c = b.center();
        const Point p{c.x + off(rng), c.y + off(rng)};
        const double phi = ang(rng);
        const double dx = p.x - c.x, dy = p.y - c.y;
        const Point pr{c.x + dx * std::cos(phi) - dy * std::sin(phi),
                       c.y + dx * std::sin(phi) + dy * std::cos(phi)};
        const PolarCoord r0 = geometry::to_tanh_polar(p, b);
        const PolarCoord r1 = geometry::to_tanh_polar(pr, b);
        worst = std::max(
            worst, std::abs(geometry::normalize_angle(r1.theta - r0.theta - phi)));
        worst = std::max(worst, std::abs(r1.rho - r0.rho));
    }
    if (worst > 1e-9) {
        why = "coordinate identity error " + std::to_string(worst);
        return false;
    }

    // discrete: Mixed-pad conv stacks commute with every row rotation, bitwise
    for (int h : {8, 16, 32, 64}) {
        Tensor x(1, 2, h, 8);
        std::uniform_real_distribution<float> d(-1.0f, 1.0f);
        for (float& v : x.data) v = d(rng);
        const nn::ConvParams c1 = random_conv(rng, 3, 2, 3);
        const nn::ConvParams c2 = random_conv(rng, 2, 3, 3);
        for (int k = 0; k < h; ++k) {
            const Tensor a = nn::conv2d(nn::conv2d(rotate_rows(x, k), c1), c2);
            const Tensor b = rotate_rows(nn::conv2d(nn::conv2d(x, c1), c2), k);
            if (a.data != b.data) {
                why = "conv stack not bitwise equivariant at H=" +
                      std::to_string(h) + ", shift " + std::to_string(k);
                return false;
            }
        }
    }
    return true;
}

// --- criterion 4: scale invariance ---------------------------------------

bool criterion_scale(std::string& why) {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> off(-300.0, 300.0);
    std::uniform_real_distribution<double> dim(2.0, 300.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double w = dim(rng), h = dim(rng);
        const BBox b{-w / 2, -h / 2, w, h};  // origin-centered: k*v stays exact
        const Point p{off(rng), off(rng)};
        for (double k : {0.1, 0.5, 2.0, 10.0}) {
            const BBox bs{-k * w / 2, -k * h / 2, k * w, k * h};
            const PolarCoord r0 = geometry::to_tanh_polar(p, b);
            const PolarCoord r1 = geometry::to_tanh_polar({k * p.x, k * p.y}, bs);
            worst = std::max(worst,
                             std::abs(geometry::normalize_angle(r1.theta - r0.theta)));
            worst = std::max(worst, std::abs(r1.rho - r0.rho));
        }
    }
    if (worst > 1e-12) {
        why = "coordinate identity error " + std::to_string(worst);
        return false;
    }

    // image-level: warp of an image and its 2x-rendered copy agree
    const BBox small{60, 70, 120, 110};
    const BBox big{120, 140, 240, 220};
    Tensor img1(1, 1, 256, 256);
    Tensor img2(1, 1, 512, 512);
    for (int m = 0; m < 256; ++m) {
        for (int n = 0; n < 256; ++n) {
            img1.at(0, 0, m, n) = static_cast<float>(smooth_pattern(n + 0.5, m + 0.5));
        }
    }
    for (int m = 0; m < 512; ++m) {
        for (int n = 0; n < 512; ++n) {
            img2.at(0, 0, m, n) =
                static_cast<float>(smooth_pattern((n + 0.5) / 2.0, (m + 0.5) / 2.0));
        }
    }
    const Tensor w1 = warp::warp_image(img1, small, 128, 128);
    const Tensor w2 = warp::warp_image(img2, big, 128, 128);
    double mad = 0.0;
    int count = 0;
    for (int i = 0; i < 128; ++i) {
        for (int j = 0; j < 128; ++j) {
            if (warp::col_rho(j, 128) > 0.95) continue;  // off-image samples
            mad += std::abs(w1.at(0, 0, i, j) - w2.at(0, 0, i, j));
            ++count;
        }
    }
    mad /= count;
    if (mad >= 3.0 / 255.0) {
        why = "image-level mean abs diff " + std::to_string(mad);
        return false;
    }
    return true;
}

// --- criterion 5: direct inter-grid map ----------------------------------

bool criterion_inter_grid(std::string& why) {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::uniform_real_distribution<double> rad(0.0, 0.999);
    double worst = 0.0;
    for (int b = 0; b < 10; ++b) {
        const BBox box = random_bbox(rng);
        for (int i = 0; i < 10000; ++i) {
            const PolarCoord c{ang(rng), rad(rng)};
            const TCCoord direct = geometry::tp_to_tc(c);
            const TCCoord via = geometry::to_tanh_cartesian(
                geometry::from_tanh_polar(c, box), box);
            worst = std::max(worst, std::max(std::abs(direct.u1 - via.u1),
                                             std::abs(direct.u2 - via.u2)));
        }
    }
    if (worst > 1e-9) {
        why = "composition mismatch " + std::to_string(worst);
        return false;
    }
    return true;
}

// --- criterion 6: HybridBlock contract -----------------------------------

bool criterion_hybrid_block(std::string& why) {
    std::mt19937_64 rng(106);
    auto zero_conv = [](int oc, int ic, int k) {
        nn::ConvParams p;
        p.weights = Tensor(oc, ic, k, k);
        p.bias.assign(oc, 0.0f);
        return p;
    };
    std::uniform_int_distribution<int> cd(1, 4), sd(4, 20);
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    for (int trial = 0; trial < 100; ++trial) {
        const int c = 8 * cd(rng);
        nn::HybridBlockParams p;
        p.reduce = zero_conv(c / 4, c, 1);
        p.tp_branch = zero_conv(c / 8, c / 8, 3);
        p.tc_branch = zero_conv(c / 8, c / 8, 3);
        p.restore = zero_conv(c, c / 4, 1);
        Tensor x(1, c, sd(rng), sd(rng));
        for (float& v : x.data) v = d(rng);
        const Tensor y = nn::hybrid_block_forward(x, p);
        if (!y.same_shape(x)) {
            why = "shape not preserved";
            return false;
        }
        if (y.data != x.data) {
            why = "zero-parameter block is not the bitwise identity";
            return false;
        }
    }
    for (int c : {8, 64, 256, 512, 2048}) {
        if (nn::hybrid_block_param_count(c) >= nn::bottleneck_param_count(c)) {
            why = "parameter count not smaller at c=" + std::to_string(c);
            return false;
        }
    }
    return true;
}

// --- criterion 7: metric identities --------------------------------------

bool criterion_metrics(std::string& why) {
    std::mt19937_64 rng(107);
    std::uniform_int_distribution<uint64_t> count(0, 2000);
    for (int trial = 0; trial < 1000; ++trial) {
        metrics::ConfusionMatrix cm(6);
        for (int g = 0; g < 6; ++g) {
            for (int p = 0; p < 6; ++p) cm.at(g, p) = count(rng);
        }
        const metrics::EvalReport rep = metrics::iou_f1(cm, true);
        for (const metrics::ClassScore& s : rep.per_class) {
            if (s.defined && std::abs(s.f1 - 2.0 * s.iou / (1.0 + s.iou)) > 1e-12) {
                why = "F1/IoU identity violated";
                return false;
            }
        }
    }

    for (int c : {2, 3, 11}) {
        Tensor probs(1, c, 16, 16);
        LabelMask gt(16, 16, c);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        std::uniform_int_distribution<int> lab(0, c - 1);
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                std::vector<double> raw(c);
                double sum = 0.0;
                for (double& r : raw) sum += (r = u(rng));
                for (int ic = 0; ic < c; ++ic) {
                    probs.at(0, ic, y, x) = static_cast<float>(raw[ic] / sum);
                }
                gt.at(y, x) = static_cast<uint8_t>(lab(rng));
            }
        }
        // brute-force oracles
        double ce = 0.0;
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                ce -= std::log(static_cast<double>(probs.at(0, gt.at(y, x), y, x)));
            }
        }
        ce /= 256.0;
        double dice_total = 0.0;
        for (int ic = 0; ic < c; ++ic) {
            double inter = 0.0, psq = 0.0, gsum = 0.0;
            for (int y = 0; y < 16; ++y) {
                for (int x = 0; x < 16; ++x) {
                    const double p = probs.at(0, ic, y, x);
                    psq += p * p;
                    if (gt.at(y, x) == ic) {
                        inter += p;
                        gsum += 1.0;
                    }
                }
            }
            dice_total += (2.0 * inter + 1.0) / (psq + gsum + 1.0);
        }
        const double dice = 1.0 - dice_total / c;
        if (std::abs(metrics::cross_entropy(probs, gt) - ce) > 1e-9 ||
            std::abs(metrics::dice_loss(probs, gt) - dice) > 1e-9) {
            why = "loss oracle mismatch at C=" + std::to_string(c);
            return false;
        }
        for (double lam : {0.0, 0.25, 0.5, 1.0}) {
            const double got = metrics::combined_loss(probs, gt, {lam});
            if (std::abs(got - (lam * ce + (1.0 - lam) * dice)) > 1e-9) {
                why = "lambda affinity violated";
                return false;
            }
        }
    }
    return true;
}

// --- criterion 8: end-to-end fixture -------------------------------------

bool criterion_end_to_end(std::string& why) {
    const int s = 512;
    const BBox bbox{79, 79, 354, 354};
    const geometry::Ellipse e = geometry::fit_ellipse(bbox);

    // synthetic 11-class face-like mask: central disk, 8 sectors, and a
    // hair-like annulus straddling the ellipse boundary
    LabelMask gt(s, s, 11);
    for (int m = 0; m < s; ++m) {
        for (int n = 0; n < s; ++n) {
            const double dx = n + 0.5 - e.cx;
            const double dy = m + 0.5 - e.cy;
            const double re = geometry::radius_at(e, std::atan2(dy, dx));
            const double r = std::hypot(dx, dy) / re;
            uint8_t cls = 0;
            if (r < 0.35) {
                cls = 1;
            } else if (r < 0.85) {
                const double t = std::atan2(dy, dx) + kPi;  // [0, 2pi)
                cls = static_cast<uint8_t>(2 + std::min(7, static_cast<int>(t / (kPi / 4))));
            } else if (r < 1.15) {
                cls = 10;
            }
            gt.at(m, n) = cls;
        }
    }

    Tensor one_hot(1, 11, s, s);
    for (int m = 0; m < s; ++m) {
        for (int n = 0; n < s; ++n) one_hot.at(0, gt.at(m, n), m, n) = 1.0f;
    }
    const Tensor polar = warp::warp_image(one_hot, bbox, 512, 512);
    const LabelMask pred = warp::unwarp_labels(polar, bbox, s, s);

    const fs::path dir = fs::temp_directory_path() / "rtwarp_acceptance";
    fs::create_directories(dir);
    const fs::path gt_path = dir / "gt.png";
    const fs::path pred_path = dir / "pred.png";
    const fs::path report_path = dir / "report.txt";
    io::write_mask_png(gt_path.string(), gt);
    io::write_mask_png(pred_path.string(), pred);

    const std::string cmd = kCli + " eval --pred " + pred_path.string() +
                            " --gt " + gt_path.string() +
                            " --classes 11 --report " + report_path.string();
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        why = "cmd_eval failed";
        return false;
    }

    std::ifstream is(report_path);
    std::string line;
    std::vector<double> ious(11, -1.0);
    while (std::getline(is, line)) {
        for (int k = 0; k < 11; ++k) {
            const std::string key = "class_" + std::to_string(k) + ".iou = ";
            if (line.rfind(key, 0) == 0) ious[k] = std::stod(line.substr(key.size()));
        }
    }
    for (int k = 1; k <= 9; ++k) {
        if (ious[k] < 0.95) {
            why = "class " + std::to_string(k) + " IoU " + std::to_string(ious[k]);
            return false;
        }
    }
    if (ious[10] < 0.90) {
        why = "annulus class IoU " + std::to_string(ious[10]);
        return false;
    }
    return true;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "face-ratio constant (boundary rho = tanh(1), 390 columns)",
         criterion_face_ratio},
        {2, "invertibility (coordinate round trips, interior PSNR >= 35 dB)",
         criterion_invertibility},
        {3, "rotation equivariance (coordinate + bitwise conv commutation)",
         criterion_rotation},
        {4, "scale invariance (coordinate 1e-12, image-level < 3/255)",
         criterion_scale},
        {5, "direct inter-grid map equals the bbox-mediated composition",
         criterion_inter_grid},
        {6, "HybridBlock contract (identity, shapes, parameter economy)",
         criterion_hybrid_block},
        {7, "metric identities (F1/IoU, loss oracles, lambda affinity)",
         criterion_metrics},
        {8, "end-to-end fixture (warp, unwarp, cmd_eval IoU thresholds)",
         criterion_end_to_end},
    };

    bool all_ok = true;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string why;
        bool ok = false;
        try {
            ok = c.body(why);
        } catch (const std::exception& ex) {
            why = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("%s criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL",
                    c.number, c.name.c_str(), secs, why.empty() ? "" : " -- ",
                    why.c_str());
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
