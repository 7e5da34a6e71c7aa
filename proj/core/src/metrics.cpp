#include "rtwarp/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rtwarp::metrics {

namespace {

void check_probs(const Tensor& probs, const LabelMask& gt) {
    if (probs.n != 1) {
        throw std::invalid_argument("loss: probs batch must be 1");
    }
    if (probs.h != gt.height || probs.w != gt.width || probs.c != gt.classes) {
        throw std::invalid_argument("loss: probs/gt shape mismatch");
    }
    for (int y = 0; y < probs.h; ++y) {
        for (int x = 0; x < probs.w; ++x) {
            double sum = 0.0;
            for (int ic = 0; ic < probs.c; ++ic) {
                const float v = probs.at(0, ic, y, x);
                if (v < 0.0f || v > 1.0f) {
                    throw std::invalid_argument("loss: probability outside [0, 1]");
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-5) {
                throw std::invalid_argument("loss: probabilities do not sum to 1");
            }
        }
    }
}

}  // namespace

uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), uint64_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) {
        throw std::invalid_argument("ConfusionMatrix: class count mismatch");
    }
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

double cross_entropy(const Tensor& probs, const LabelMask& gt, bool* clamped) {
    check_probs(probs, gt);
    if (clamped) *clamped = false;
    double sum = 0.0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            double p = probs.at(0, gt.at(y, x), y, x);
            if (p <= 0.0) {
                p = 1e-12;
                if (clamped) *clamped = true;
            }
            sum -= std::log(p);
        }
    }
    return sum / (static_cast<double>(gt.height) * gt.width);
}

double dice_loss(const Tensor& probs, const LabelMask& gt) {
    check_probs(probs, gt);
    constexpr double eps = 1.0;  // V-Net smooth term
    double dice_sum = 0.0;
    for (int ic = 0; ic < probs.c; ++ic) {
        double inter = 0.0, psq = 0.0, gsq = 0.0;
        for (int y = 0; y < gt.height; ++y) {
            for (int x = 0; x < gt.width; ++x) {
                const double p = probs.at(0, ic, y, x);
                const double g = gt.at(y, x) == ic ? 1.0 : 0.0;
                inter += p * g;
                psq += p * p;
                gsq += g;
            }
        }
        dice_sum += (2.0 * inter + eps) / (psq + gsq + eps);
    }
    return 1.0 - dice_sum / probs.c;
}

double combined_loss(const Tensor& probs, const LabelMask& gt,
                     const LossWeights& w) {
    if (w.lambda < 0.0 || w.lambda > 1.0) {
        throw std::invalid_argument("combined_loss: lambda must be in [0, 1]");
    }
    return w.lambda * cross_entropy(probs, gt) +
           (1.0 - w.lambda) * dice_loss(probs, gt);
}

ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& gt) {
    if (pred.height != gt.height || pred.width != gt.width ||
        pred.classes != gt.classes) {
        throw std::invalid_argument("confusion: pred/gt mismatch");
    }
    ConfusionMatrix cm(gt.classes);
    for (size_t i = 0; i < gt.labels.size(); ++i) {
        const int g = gt.labels[i];
        const int p = pred.labels[i];
        if (g >= gt.classes || p >= gt.classes) {
            throw std::invalid_argument("confusion: label out of range");
        }
        ++cm.at(g, p);
    }
    return cm;
}

EvalReport iou_f1(const ConfusionMatrix& cm, bool include_background) {
    const int c = cm.classes();
    EvalReport rep;
    rep.per_class.resize(c);
    double iou_sum = 0.0, f1_sum = 0.0;
    int counted = 0;
    for (int k = 0; k < c; ++k) {
        uint64_t tp = cm.at(k, k);
        uint64_t fp = 0, fn = 0;
        for (int o = 0; o < c; ++o) {
            if (o == k) continue;
            fp += cm.at(o, k);
            fn += cm.at(k, o);
        }
        const uint64_t denom = tp + fp + fn;
        ClassScore& s = rep.per_class[k];
        if (denom == 0) continue;  // class absent from both masks
        s.defined = true;
        s.iou = static_cast<double>(tp) / static_cast<double>(denom);
        s.f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
        if (k == 0 && !include_background) continue;
        iou_sum += s.iou;
        f1_sum += s.f1;
        ++counted;
    }
    if (counted > 0) {
        rep.mean_iou = iou_sum / counted;
        rep.mean_f1 = f1_sum / counted;
    }
    return rep;
}

LabelMask relabel_by_groups(const LabelMask& mask,
                            const std::vector<std::vector<int>>& groups) {
    // Group g maps its classes to label g+1; unlisted classes collapse to 0.
    std::vector<int> relabel(mask.classes, 0);
    std::vector<bool> seen(mask.classes, false);
    for (size_t g = 0; g < groups.size(); ++g) {
        for (int cls : groups[g]) {
            if (cls < 0 || cls >= mask.classes) {
                throw std::invalid_argument("relabel_by_groups: class index out of range");
            }
            if (seen[cls]) {
                throw std::invalid_argument("relabel_by_groups: overlapping groups");
            }
            seen[cls] = true;
            relabel[cls] = static_cast<int>(g) + 1;
        }
    }
    LabelMask out(mask.height, mask.width, static_cast<int>(groups.size()) + 1);
    for (size_t i = 0; i < mask.labels.size(); ++i) {
        out.labels[i] = static_cast<uint8_t>(relabel[mask.labels[i]]);
    }
    return out;
}

EvalReport merge_regions(const LabelMask& pred, const LabelMask& gt,
                         const std::vector<std::vector<int>>& groups,
                         bool include_background) {
    if (pred.classes != gt.classes) {
        throw std::invalid_argument("merge_regions: class count mismatch");
    }
    return iou_f1(confusion(relabel_by_groups(pred, groups),
                            relabel_by_groups(gt, groups)),
                  include_background);
}

std::string format_report(const EvalReport& report,
                          const std::vector<std::string>& class_names) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    for (size_t k = 0; k < report.per_class.size(); ++k) {
        std::string name = k < class_names.size()
                               ? class_names[k]
                               : "class_" + std::to_string(k);
        const ClassScore& s = report.per_class[k];
        if (s.defined) {
            os << name << ".iou = " << s.iou << "\n";
            os << name << ".f1 = " << s.f1 << "\n";
        } else {
            os << name << ".iou = undefined\n";
            os << name << ".f1 = undefined\n";
        }
    }
    os << "mean.iou = " << report.mean_iou << "\n";
    os << "mean.f1 = " << report.mean_f1 << "\n";
    return os.str();
}

}  // namespace rtwarp::metrics
