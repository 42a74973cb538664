#include "tempo/associate.hpp"

#include <algorithm>
#include <tuple>

namespace tempo
{

void AssociatorConfig::validate() const
{
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0) || !(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw InvariantError("associator thresholds must lie in [0,1]");
  }
  if (max_lost < 1 || max_objects < 1) {
    throw InvariantError("associator max_lost and max_objects must be >= 1");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> greedy_match(const std::vector<std::vector<double>>& overlap,
                                                              double threshold)
{
  struct Pair
  {
    double value;
    std::size_t row;
    std::size_t col;
  };
  std::vector<Pair> pairs;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < overlap.size(); ++r) {
    cols = std::max(cols, overlap[r].size());
    for (std::size_t c = 0; c < overlap[r].size(); ++c) {
      if (overlap[r][c] >= threshold && overlap[r][c] > 0.0) {
        pairs.push_back({overlap[r][c], r, c});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(b.value, a.col, a.row) < std::tie(a.value, b.col, b.row);
  });

  std::vector<bool> row_used(overlap.size(), false);
  std::vector<bool> col_used(cols, false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : pairs) {
    if (row_used[p.row] || col_used[p.col]) {
      continue;
    }
    row_used[p.row] = true;
    col_used[p.col] = true;
    out.emplace_back(p.row, p.col);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Associator::Associator(AssociatorConfig cfg) : cfg_(cfg)
{
  cfg_.validate();
}

const Tracklet* Associator::find_active(int id) const
{
  for (const auto& t : active_) {
    if (t.id == id) {
      return &t;
    }
  }
  return nullptr;
}

namespace
{

// Canonical within-frame order so results do not depend on input order.
bool canonical_less(const Detection& a, const Detection& b)
{
  return std::tie(b.score, a.class_id, a.box.cx, a.box.cy, a.box.w, a.box.h) <
         std::tie(a.score, b.class_id, b.box.cx, b.box.cy, b.box.w, b.box.h);
}

void append_match(Tracklet& t, const Detection& det, int max_objects)
{
  for (int f = t.last_matched_frame + 1; f < det.frame; ++f) {
    t.history.emplace_back(std::nullopt);
    ++t.misses;
  }
  t.history.emplace_back(det);
  t.last_matched_frame = det.frame;
  t.lost = 0;
  t.window.push_back({det.score, det.box});
  while (static_cast<int>(t.window.size()) > max_objects) {
    t.window.erase(t.window.begin());
  }
}

} // namespace

FrameAssociation Associator::step(const FrameDetections& frame)
{
  if (last_frame_ && frame.frame != *last_frame_ + 1) {
    throw SequencingError("associator expected frame " + std::to_string(*last_frame_ + 1) + ", got " +
                          std::to_string(frame.frame));
  }
  last_frame_ = frame.frame;

  std::vector<Detection> dets;
  for (const auto& d : frame.detections) {
    if (d.frame != frame.frame) {
      throw SequencingError("detection frame " + std::to_string(d.frame) + " delivered with frame " +
                            std::to_string(frame.frame));
    }
    if (d.score >= cfg_.score_threshold) {
      dets.push_back(d);
    }
  }
  std::stable_sort(dets.begin(), dets.end(), canonical_less);

  std::vector<std::vector<double>> overlap(active_.size(), std::vector<double>(dets.size(), 0.0));
  for (std::size_t r = 0; r < active_.size(); ++r) {
    const BBox& last = active_[r].window.back().box;
    for (std::size_t c = 0; c < dets.size(); ++c) {
      if (dets[c].class_id == active_[r].class_id) {
        overlap[r][c] = iou(last, dets[c].box);
      }
    }
  }

  FrameAssociation rec;
  rec.frame = frame.frame;
  std::vector<bool> track_matched(active_.size(), false);
  std::vector<bool> det_matched(dets.size(), false);
  for (auto [r, c] : greedy_match(overlap, cfg_.iou_threshold)) {
    append_match(active_[r], dets[c], cfg_.max_objects);
    track_matched[r] = true;
    det_matched[c] = true;
    rec.matched.push_back({active_[r].id, dets[c]});
  }

  std::vector<Tracklet> survivors;
  survivors.reserve(active_.size() + dets.size());
  for (std::size_t r = 0; r < active_.size(); ++r) {
    Tracklet& t = active_[r];
    if (!track_matched[r]) {
      ++t.lost;
      if (t.lost > cfg_.max_lost) {
        rec.died.push_back(t.id);
        finished_.push_back(std::move(t));
        continue;
      }
      rec.lost.push_back(t.id);
    }
    survivors.push_back(std::move(t));
  }

  for (std::size_t c = 0; c < dets.size(); ++c) {
    if (det_matched[c]) {
      continue;
    }
    Tracklet t;
    t.id = next_id_++;
    t.class_id = dets[c].class_id;
    t.first_frame = dets[c].frame;
    t.last_matched_frame = dets[c].frame;
    t.history.emplace_back(dets[c]);
    t.window.push_back({dets[c].score, dets[c].box});
    rec.spawned.push_back(t.id);
    rec.matched.push_back({t.id, dets[c]});
    survivors.push_back(std::move(t));
  }

  for (auto& t : survivors) {
    t.duration = frame.frame - t.first_frame + 1;
  }
  active_ = std::move(survivors);
  return rec;
}

std::vector<Tracklet> Associator::finish()
{
  std::vector<Tracklet> all = std::move(finished_);
  for (auto& t : active_) {
    all.push_back(std::move(t));
  }
  active_.clear();
  finished_.clear();
  for (auto& t : all) {
    t.duration = t.length();
    t.lost = 0;
  }
  std::sort(all.begin(), all.end(), [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return all;
}

std::vector<Tracklet> associate(const VideoSequence& seq, const AssociatorConfig& cfg)
{
  Associator tracker(cfg);
  for (const auto& fr : seq.frames) {
    tracker.step(fr);
  }
  return tracker.finish();
}

} // namespace tempo
