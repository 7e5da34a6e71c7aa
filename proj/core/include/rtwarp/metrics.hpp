#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtwarp/tensor.hpp"

// Segmentation losses (cross-entropy, soft Dice, combined) and evaluation
// metrics (confusion matrix, per-class IoU/F1, merged-region scores).

namespace rtwarp::metrics {

/// C x C counts; entry (gt, pred) = pixels with ground truth gt predicted
/// as pred.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int num_classes)
        : classes_(num_classes),
          counts_(static_cast<size_t>(num_classes) * num_classes, 0) {}

    [[nodiscard]] int classes() const { return classes_; }
    uint64_t& at(int gt, int pred) {
        return counts_[static_cast<size_t>(gt) * classes_ + pred];
    }
    [[nodiscard]] uint64_t at(int gt, int pred) const {
        return counts_[static_cast<size_t>(gt) * classes_ + pred];
    }
    [[nodiscard]] uint64_t total() const;

    /// Exact integer merge of shard counts; shapes must match.
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

private:
    int classes_;
    std::vector<uint64_t> counts_;
};

struct LossWeights {
    double lambda = 0.5;  ///< in [0, 1]; weight of the cross-entropy term
};

struct ClassScore {
    bool defined = false;  ///< false when TP + FP + FN = 0 (class absent)
    double iou = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::vector<ClassScore> per_class;
    double mean_iou = 0.0;  ///< mean over defined classes (see include_background)
    double mean_f1 = 0.0;
};

/// Mean over pixels of -log(probability of the true class), natural log.
/// probs: (1, C, H, W) with per-pixel channel values in (0, 1] summing to
/// 1 within 1e-5. A true-class probability of exactly 0 is clamped at
/// 1e-12; `clamped`, when given, reports whether that happened.
double cross_entropy(const Tensor& probs, const LabelMask& gt,
                     bool* clamped = nullptr);

/// 1 - mean over classes of (2*sum(p*g) + eps) / (sum(p^2) + sum(g^2) + eps)
/// with g the one-hot ground truth and eps = 1.
double dice_loss(const Tensor& probs, const LabelMask& gt);

/// lambda * cross_entropy + (1 - lambda) * dice_loss.
double combined_loss(const Tensor& probs, const LabelMask& gt,
                     const LossWeights& w);

/// Exact pixel counts. Throws on dimension or class-count mismatch.
ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& gt);

/// Per-class IoU = TP/(TP+FP+FN) and F1 = 2TP/(2TP+FP+FN); classes with
/// TP+FP+FN = 0 are reported undefined and excluded from the means.
/// Background (class 0) is excluded from the means unless
/// include_background is set.
EvalReport iou_f1(const ConfusionMatrix& cm, bool include_background = false);

/// Map each class to its group label (group g -> label g+1; classes not
/// listed in any group collapse to label 0). Groups must not overlap.
LabelMask relabel_by_groups(const LabelMask& mask,
                            const std::vector<std::vector<int>>& groups);

/// Relabel both masks by class group, then compute confusion and metrics
/// on the merged label space.
EvalReport merge_regions(const LabelMask& pred, const LabelMask& gt,
                         const std::vector<std::vector<int>>& groups,
                         bool include_background = false);

/// Flat key-value serialization of a report (one "key = value" per line).
std::string format_report(const EvalReport& report,
                          const std::vector<std::string>& class_names = {});

}  // namespace rtwarp::metrics
