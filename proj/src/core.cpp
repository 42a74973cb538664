#include "tempo/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tempo
{

bool BBox::valid() const
{
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) && w > 0.0 && h > 0.0;
}

void validate_detection(const Detection& det)
{
  if (!det.box.valid()) {
    throw InvariantError("frame " + std::to_string(det.frame) + ": box must be finite with w > 0 and h > 0");
  }
  if (!(det.score >= 0.0 && det.score <= 1.0)) {
    throw InvariantError("frame " + std::to_string(det.frame) + ": score must lie in [0,1]");
  }
  if (det.frame < 0) {
    throw InvariantError("negative frame index " + std::to_string(det.frame));
  }
}

VideoSequence VideoSequence::empty(std::string video_id, int t_v)
{
  if (t_v < 0) {
    throw InvariantError("video duration must be non-negative");
  }
  VideoSequence seq;
  seq.video_id = std::move(video_id);
  seq.t_v = t_v;
  seq.frames.resize(static_cast<std::size_t>(t_v));
  for (int f = 0; f < t_v; ++f) {
    seq.frames[static_cast<std::size_t>(f)].frame = f;
  }
  return seq;
}

VideoSequence VideoSequence::from_detections(std::string video_id, int t_v, std::vector<Detection> detections)
{
  VideoSequence seq = empty(std::move(video_id), t_v);
  for (auto& det : detections) {
    validate_detection(det);
    if (det.frame >= t_v) {
      throw InvariantError("frame " + std::to_string(det.frame) + " outside video of duration " +
                           std::to_string(t_v));
    }
    seq.frames[static_cast<std::size_t>(det.frame)].detections.push_back(det);
  }
  return seq;
}

std::size_t VideoSequence::detection_count() const
{
  std::size_t n = 0;
  for (const auto& fr : frames) {
    n += fr.detections.size();
  }
  return n;
}

void VideoSequence::validate() const
{
  if (frames.size() != static_cast<std::size_t>(t_v)) {
    throw InvariantError(video_id + ": frame list length differs from t_v");
  }
  for (int f = 0; f < t_v; ++f) {
    const auto& fr = frames[static_cast<std::size_t>(f)];
    if (fr.frame != f) {
      throw InvariantError(video_id + ": frames must be indexed 0..t_v-1 in order");
    }
    for (const auto& det : fr.detections) {
      validate_detection(det);
      if (det.frame != f) {
        throw InvariantError(video_id + ": detection frame " + std::to_string(det.frame) +
                             " stored under frame " + std::to_string(f));
      }
    }
  }
}

double iou(const BBox& a, const BBox& b)
{
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<std::size_t> nms_indices(const std::vector<Detection>& candidates, double score_threshold,
                                     double nms_threshold)
{
  std::vector<std::size_t> order;
  order.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].score >= score_threshold) {
      order.push_back(i);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].score > candidates[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const Detection& cand = candidates[idx];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return candidates[k].class_id == cand.class_id && iou(candidates[k].box, cand.box) > nms_threshold;
    });
    if (!suppressed) {
      kept.push_back(idx);
    }
  }
  return kept;
}

std::vector<Detection> nms(const std::vector<Detection>& candidates, double score_threshold, double nms_threshold)
{
  std::vector<Detection> out;
  for (std::size_t idx : nms_indices(candidates, score_threshold, nms_threshold)) {
    out.push_back(candidates[idx]);
  }
  return out;
}

} // namespace tempo
