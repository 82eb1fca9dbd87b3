#include "night/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "night/dataset.hpp"

namespace night::metrics {

SegMask hard_threshold(const DepthMap& depth, double eps) {
  SegMask mask(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) mask[i] = depth[i] > eps ? 1 : 0;
  return mask;
}

double iou_score(const SegMask& a, const SegMask& b) {
  require_same_shape(a, b, "iou_score");
  const std::uint8_t* pa = a.data().data();
  const std::uint8_t* pb = b.data().data();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const unsigned ia = pa[i] != 0;
    const unsigned ib = pb[i] != 0;
    inter += ia & ib;
    uni += ia | ib;
  }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

MaeTerms balanced_mae_terms(const DepthMap& pred, const DepthMap& gt, const SegMask& gt_mask,
                            const LossConfig& cfg) {
  require_same_shape(pred, gt, "balanced_mae");
  require_same_shape(pred, gt_mask, "balanced_mae");
  double sum_obj = 0.0;
  double sum_bgr = 0.0;
  std::size_t n_obj = 0;
  std::size_t n_bgr = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = std::abs(pred[i] - gt[i]);
    if (gt_mask[i]) {
      sum_obj += e;
      ++n_obj;
    } else {
      sum_bgr += e;
      ++n_bgr;
    }
  }
  MaeTerms t;
  t.object = n_obj ? sum_obj / double(n_obj) : 0.0;
  t.background = n_bgr ? sum_bgr / double(n_bgr) : 0.0;
  t.weight = n_obj ? cfg.alpha * double(n_bgr) / double(n_obj) : 0.0;
  t.total = t.weight * t.object + t.background;
  return t;
}

double balanced_mae(const DepthMap& pred, const DepthMap& gt, const SegMask& gt_mask,
                    const LossConfig& cfg) {
  return balanced_mae_terms(pred, gt, gt_mask, cfg).total;
}

LossBreakdown combined_loss(const tof::PhasorImage& pred, const SampleRecord& gt,
                            const LossConfig& cfg) {
  const DepthMap depth = tof::naive_depth(pred);
  const SegMask mask = hard_threshold(depth, cfg.depth_threshold);
  LossBreakdown out;
  out.mae = balanced_mae(depth, gt.gt_depth, gt.gt_mask, cfg);
  out.iou = 1.0 - iou_score(mask, gt.gt_mask);
  out.total = 0.5 * (out.mae + out.iou);
  return out;
}

Stats summarize(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / double(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / double(values.size()));
  return s;
}

SampleScore score_sample(const std::string& id, const tof::PhasorImage& pred_phasor,
                         const SampleRecord& gt, const LossConfig& cfg) {
  const DepthMap depth = tof::naive_depth(pred_phasor);
  require_same_shape(depth, gt.gt_depth, "score_sample");
  SampleScore s;
  s.id = id;
  double sum = 0.0;
  for (std::size_t i = 0; i < depth.size(); ++i) sum += std::abs(depth[i] - gt.gt_depth[i]);
  s.mae_cm = depth.size() ? 100.0 * sum / double(depth.size()) : 0.0;
  const MaeTerms terms = balanced_mae_terms(depth, gt.gt_depth, gt.gt_mask, cfg);
  s.mae_object_cm = 100.0 * terms.object;
  s.mae_background_cm = 100.0 * terms.background;
  s.iou = iou_score(hard_threshold(depth, cfg.depth_threshold), gt.gt_mask);
  return s;
}

EvalReport evaluate_dataset(const std::filesystem::path& pred_dir,
                            const std::filesystem::path& gt_manifest, const LossConfig& cfg,
                            const std::string& split) {
  const DatasetManifest manifest = load_manifest(gt_manifest);
  const std::filesystem::path root = gt_manifest.parent_path();
  EvalReport report;
  for (const ManifestEntry& e : manifest.samples) {
    if (!split.empty() && e.meta.split != split) continue;
    const std::filesystem::path pred_path = pred_dir / std::filesystem::path(e.file).filename();
    if (!std::filesystem::exists(pred_path)) {
      throw MissingPrediction("missing prediction for sample '" + e.id + "' (" +
                              pred_path.string() + ")");
    }
    const SampleRecord gt = parse_sample(root / e.file);
    const SampleRecord pred = parse_sample(pred_path);
    report.per_sample.push_back(score_sample(e.id, pred.gt_phasor, gt, cfg));
  }
  std::vector<double> mae, iou, obj, bgr;
  for (const SampleScore& s : report.per_sample) {
    mae.push_back(s.mae_cm);
    iou.push_back(s.iou);
    obj.push_back(s.mae_object_cm);
    bgr.push_back(s.mae_background_cm);
  }
  report.mae = summarize(mae);
  report.miou = summarize(iou);
  report.mae_object = summarize(obj);
  report.mae_background = summarize(bgr);
  return report;
}

namespace {

nlohmann::json stats_json(const Stats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const SampleScore& s : report.per_sample) {
    per.push_back({{"id", s.id},
                   {"mae_cm", s.mae_cm},
                   {"iou", s.iou},
                   {"mae_object_cm", s.mae_object_cm},
                   {"mae_background_cm", s.mae_background_cm}});
  }
  return {{"per_sample", per},
          {"mae", stats_json(report.mae)},
          {"miou", stats_json(report.miou)},
          {"mae_object", stats_json(report.mae_object)},
          {"mae_background", stats_json(report.mae_background)}};
}

}  // namespace night::metrics
