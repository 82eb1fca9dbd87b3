#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "night/image.hpp"
#include "night/sample_io.hpp"
#include "night/tof.hpp"

namespace night::metrics {

struct LossConfig {
  double alpha = 1.0 / 7.0;       // object/background balance
  double depth_threshold = 0.01;  // meters; object iff depth > threshold
};

// 1 where depth > eps (strict), else 0.
SegMask hard_threshold(const DepthMap& depth, double eps);

// |a AND b| / |a OR b|; two empty masks score 1. Throws on size mismatch.
double iou_score(const SegMask& a, const SegMask& b);

struct MaeTerms {
  double object = 0.0;      // mean |pred - gt| over object pixels (0 if none)
  double background = 0.0;  // mean over background pixels (0 if none)
  double weight = 0.0;      // alpha * |B| / |O|, 0 when |O| = 0
  double total = 0.0;       // weight * object + background
};

MaeTerms balanced_mae_terms(const DepthMap& pred, const DepthMap& gt, const SegMask& gt_mask,
                            const LossConfig& cfg);
double balanced_mae(const DepthMap& pred, const DepthMap& gt, const SegMask& gt_mask,
                    const LossConfig& cfg);

struct LossBreakdown {
  double mae = 0.0;
  double iou = 0.0;  // 1 - IoU
  double total = 0.0;
};

// Depth from the predicted 20 MHz phasor, masks by thresholding, then
// (L_MAE + L_IoU) / 2.
LossBreakdown combined_loss(const tof::PhasorImage& pred, const SampleRecord& gt,
                            const LossConfig& cfg = {});

struct Stats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

Stats summarize(const std::vector<double>& values);

struct SampleScore {
  std::string id;
  double mae_cm = 0.0;             // all pixels
  double mae_object_cm = 0.0;      // gt object pixels
  double mae_background_cm = 0.0;  // gt background pixels
  double iou = 0.0;
};

struct EvalReport {
  std::vector<SampleScore> per_sample;
  Stats mae;
  Stats miou;
  Stats mae_object;
  Stats mae_background;
};

SampleScore score_sample(const std::string& id, const tof::PhasorImage& pred_phasor,
                         const SampleRecord& gt, const LossConfig& cfg = {});

class MissingPrediction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scores every sample listed in the manifest (optionally only one split)
// against `pred_dir/<sample file name>`, whose GT phasor planes carry the
// prediction.
EvalReport evaluate_dataset(const std::filesystem::path& pred_dir,
                            const std::filesystem::path& gt_manifest, const LossConfig& cfg = {},
                            const std::string& split = "");

nlohmann::json to_json(const EvalReport& report);

}  // namespace night::metrics
