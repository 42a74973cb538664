#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempo/associate.hpp"
#include "tempo/synth.hpp"

namespace tempo::testing
{

inline Detection det(int frame, double cx, double cy, double w, double h, double score = 0.9, int class_id = 0)
{
  return {frame, class_id, score, {cx, cy, w, h}};
}

/// Tracklet over [first, first + boxes.size()) with nullopt entries as misses.
inline Tracklet make_tracklet(int id, int first, const std::vector<std::optional<BBox>>& boxes)
{
  Tracklet t;
  t.id = id;
  t.first_frame = first;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i]) {
      t.history.emplace_back(Detection{first + static_cast<int>(i), 0, 0.9, *boxes[i]});
    } else {
      t.history.emplace_back(std::nullopt);
      ++t.misses;
    }
  }
  t.last_matched_frame = first + static_cast<int>(boxes.size()) - 1;
  t.duration = t.length();
  return t;
}

/// Constant-box tracklet of a given length with misses at the listed offsets.
inline Tracklet constant_tracklet(int id, int first, int length, const std::vector<int>& miss_offsets = {})
{
  std::vector<std::optional<BBox>> boxes(static_cast<std::size_t>(length), BBox{0.5, 0.5, 0.1, 0.1});
  for (int m : miss_offsets) {
    boxes[static_cast<std::size_t>(m)] = std::nullopt;
  }
  return make_tracklet(id, first, boxes);
}

inline BBox random_box(Rng& rng)
{
  return {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.02, 0.4), rng.uniform(0.02, 0.4)};
}

/// One stationary object present on the listed frames of a t_v-frame video.
inline VideoSequence object_on_frames(int t_v, const std::vector<int>& frames, BBox box = {0.5, 0.5, 0.2, 0.2})
{
  std::vector<Detection> dets;
  for (int f : frames) {
    dets.push_back({f, 0, 0.9, box});
  }
  return VideoSequence::from_detections("v", t_v, dets);
}

inline std::vector<int> frame_range(int lo, int hi_inclusive)
{
  std::vector<int> out;
  for (int f = lo; f <= hi_inclusive; ++f) {
    out.push_back(f);
  }
  return out;
}

} // namespace tempo::testing
