#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tempo
{

/// Raised when an input violates a documented invariant (bad box, score out of range, ...).
class InvariantError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Frames fed to a stateful component out of order.
class SequencingError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Inputs that disagree with each other (e.g. a tracklet extending past the video).
class ConsistencyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * @brief Axis-aligned box in center/size form.
 *
 * Coordinates are normalized by frame width/height. The box may extend past
 * the [0,1] frame edges; only positive, finite size is required.
 */
struct BBox
{
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  bool valid() const;

  bool operator==(const BBox&) const = default;
};

struct Detection
{
  int frame = 0;
  int class_id = 0;
  double score = 0.0;
  BBox box;

  bool operator==(const Detection&) const = default;
};

struct FrameDetections
{
  int frame = 0;
  std::vector<Detection> detections;
};

/// Per-video detection stream; frames[i].frame == i for every i < t_v.
struct VideoSequence
{
  std::string video_id;
  int t_v = 0;
  std::vector<FrameDetections> frames;

  /// Empty frames 0..t_v-1.
  static VideoSequence empty(std::string video_id, int t_v);

  /// Buckets loose detections by frame. Throws InvariantError on invalid records.
  static VideoSequence from_detections(std::string video_id, int t_v, std::vector<Detection> detections);

  std::size_t detection_count() const;

  /// Throws InvariantError when any box, score, or frame index is out of contract.
  void validate() const;
};

void validate_detection(const Detection& det);

/// Intersection over union. Symmetric; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

/**
 * @brief Greedy score-ordered NMS, run independently per class.
 *
 * Candidates with score < score_threshold are dropped first. A survivor is
 * suppressed when its IoU with an already kept, higher-ranked box of the same
 * class exceeds nms_threshold. Equal scores keep input order. The result is
 * sorted by descending score.
 */
std::vector<Detection> nms(const std::vector<Detection>& candidates, double score_threshold, double nms_threshold);

/// Index form of nms(): positions into `candidates`, in output order.
std::vector<std::size_t> nms_indices(const std::vector<Detection>& candidates, double score_threshold,
                                     double nms_threshold);

} // namespace tempo
