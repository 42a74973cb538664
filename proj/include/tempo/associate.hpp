#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tempo/core.hpp"

namespace tempo
{

/// One object stored in a tracklet's recent window: (s, cx, cy, w, h).
struct WindowEntry
{
  double score = 0.0;
  BBox box;
};

/**
 * @brief Identity-stamped chain of detections.
 *
 * `history` spans [first_frame, last_matched_frame]; an empty optional marks a
 * frame where the tracklet was not recalled. `window` holds the latest
 * matched objects, oldest first, capped at AssociatorConfig::max_objects.
 */
struct Tracklet
{
  int id = 0;
  int class_id = 0;
  std::vector<WindowEntry> window;
  int lost = 0;      ///< consecutive recall failures (S_lost)
  int duration = 0;  ///< frames since first match, gaps included (S_dur)
  int first_frame = 0;
  int last_matched_frame = 0;
  std::vector<std::optional<Detection>> history;
  int misses = 0;    ///< miss markers inside history (om)

  /// t_n: span from first to last matched frame, inclusive.
  int length() const { return last_matched_frame - first_frame + 1; }
  const Detection& last_detection() const { return *history.back(); }
};

struct AssociatorConfig
{
  double score_threshold = 0.5;
  double iou_threshold = 0.3;
  int max_lost = 10;
  int max_objects = 5;

  void validate() const;
};

struct TrackMatch
{
  int track_id = 0;
  Detection detection;
};

/// What happened to the tracker population on one frame.
struct FrameAssociation
{
  int frame = 0;
  std::vector<TrackMatch> matched;
  std::vector<int> spawned;  ///< ids created this frame (also present in matched)
  std::vector<int> lost;     ///< alive but unmatched this frame
  std::vector<int> died;     ///< removed this frame (lost > max_lost)
};

/**
 * Greedy global-max assignment on an IoU matrix (rows = tracks, cols = detections).
 * Pairs below `threshold` are never taken. Ties prefer the lower column, then the lower row.
 */
std::vector<std::pair<std::size_t, std::size_t>> greedy_match(const std::vector<std::vector<double>>& overlap,
                                                              double threshold);

/// Online IoU tracker. One instance per stream; frames must be consecutive.
class Associator
{
public:
  explicit Associator(AssociatorConfig cfg = {});

  FrameAssociation step(const FrameDetections& frame);

  const std::vector<Tracklet>& active() const { return active_; }
  const Tracklet* find_active(int id) const;
  const AssociatorConfig& config() const { return cfg_; }
  std::optional<int> last_frame() const { return last_frame_; }

  /// Ends the stream: returns every tracklet ever spawned, ordered by id.
  std::vector<Tracklet> finish();

private:
  AssociatorConfig cfg_;
  std::vector<Tracklet> active_;
  std::vector<Tracklet> finished_;
  std::optional<int> last_frame_;
  int next_id_ = 0;
};

/// Runs the associator over a whole sequence.
std::vector<Tracklet> associate(const VideoSequence& seq, const AssociatorConfig& cfg);

} // namespace tempo
