#include "tempo/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tempo
{

void RefinerConfig::validate() const
{
  if (reliable_after < 1) {
    throw InvariantError("refiner reliable_after (S_SDE) must be >= 1");
  }
  if (!(omega >= 1.0) || !std::isfinite(omega)) {
    throw InvariantError("refiner omega must be a finite value >= 1");
  }
}

FusionWeights fusion_weights(double omega, int count)
{
  if (!(omega >= 1.0) || count < 1) {
    throw std::invalid_argument("fusion_weights: omega must be >= 1 and count >= 1");
  }
  FusionWeights fw;
  fw.omega = omega;
  fw.weights.resize(static_cast<std::size_t>(count));
  // Work relative to the largest exponent so large omega stays finite.
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    const double l = count == 1 ? 1.0 : 1.0 - 0.9 * static_cast<double>(i) / static_cast<double>(count - 1);
    const double v = std::pow(omega, l - 1.0);
    fw.weights[static_cast<std::size_t>(i)] = v;
    total += v;
  }
  for (auto& v : fw.weights) {
    v /= total;
  }
  return fw;
}

EmitDecision suppress_short(int duration, bool was_reliable, const RefinerConfig& cfg)
{
  if (duration <= cfg.reliable_after) {
    return EmitDecision::withhold;
  }
  return was_reliable ? EmitDecision::emit : EmitDecision::release;
}

BBox fill_fragment(std::span<const WindowEntry> window)
{
  if (window.empty()) {
    throw std::invalid_argument("fill_fragment: empty window");
  }
  const BBox& last = window.back().box;
  if (window.size() < 2) {
    return last;
  }
  const BBox& first = window.front().box;
  const double steps = static_cast<double>(window.size() - 1);
  BBox out;
  out.cx = last.cx + (last.cx - first.cx) / steps;
  out.cy = last.cy + (last.cy - first.cy) / steps;
  out.w = std::max(min_filled_size, last.w + (last.w - first.w) / steps);
  out.h = std::max(min_filled_size, last.h + (last.h - first.h) / steps);
  return out;
}

BBox fuse_location(std::span<const WindowEntry> window, const FusionWeights& weights)
{
  if (window.empty() || weights.weights.empty()) {
    throw std::invalid_argument("fuse_location: empty window or weights");
  }
  const std::size_t n = std::min(window.size(), weights.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += weights.weights[i];
  }
  BBox out{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const BBox& b = window[window.size() - 1 - i].box;
    const double wgt = weights.weights[i] / total;
    out.cx += wgt * b.cx;
    out.cy += wgt * b.cy;
    out.w += wgt * b.w;
    out.h += wgt * b.h;
  }
  return out;
}

VideoSequence RefinedStream::sequence() const
{
  VideoSequence seq = VideoSequence::empty(video_id, t_v);
  for (std::size_t f = 0; f < frames.size() && f < seq.frames.size(); ++f) {
    for (const auto& e : frames[f]) {
      seq.frames[f].detections.push_back(e.detection);
    }
  }
  return seq;
}

std::size_t RefinedStream::box_count() const
{
  std::size_t n = 0;
  for (const auto& f : frames) {
    n += f.size();
  }
  return n;
}

OnlineRefiner::OnlineRefiner(AssociatorConfig assoc_cfg, RefinerConfig cfg)
    : assoc_(assoc_cfg), cfg_(cfg), weights_(fusion_weights(cfg.omega, assoc_cfg.max_objects))
{
  cfg_.validate();
}

bool OnlineRefiner::is_reliable(int track_id) const
{
  auto it = tracks_.find(track_id);
  return it != tracks_.end() && it->second.reliable;
}

const std::vector<WindowEntry>* OnlineRefiner::window(int track_id) const
{
  auto it = tracks_.find(track_id);
  return it == tracks_.end() ? nullptr : &it->second.window;
}

OnlineRefiner::StepResult OnlineRefiner::step(const FrameDetections& frame)
{
  StepResult res;
  res.association = assoc_.step(frame);
  const auto& rec = res.association;
  const auto cap = static_cast<std::size_t>(assoc_.config().max_objects);

  for (int id : rec.died) {
    tracks_.erase(id);
  }
  std::map<int, const Detection*> current;
  for (const auto& m : rec.matched) {
    current[m.track_id] = &m.detection;
  }

  std::vector<const Tracklet*> alive;
  for (const auto& t : assoc_.active()) {
    alive.push_back(&t);
  }
  std::sort(alive.begin(), alive.end(), [](const Tracklet* a, const Tracklet* b) { return a->id < b->id; });

  for (const Tracklet* t : alive) {
    TrackState& st = tracks_[t->id];
    EmittedBox box;
    box.track_id = t->id;
    box.detection.frame = frame.frame;
    box.detection.class_id = t->class_id;

    if (auto it = current.find(t->id); it != current.end()) {
      st.window.push_back({it->second->score, it->second->box});
      st.last_score = it->second->score;
      while (st.window.size() > cap) {
        st.window.erase(st.window.begin());
      }
      box.detection.score = it->second->score;
      box.detection.box = fuse_location(st.window, weights_);
    } else {
      const BBox predicted = fill_fragment(st.window);
      st.window.push_back({st.last_score, predicted});
      while (st.window.size() > cap) {
        st.window.erase(st.window.begin());
      }
      box.detection.score = st.last_score;
      box.detection.box = predicted;
      box.interpolated = true;
    }

    // Promotion needs a real measurement, so a lost tracklet cannot become reliable on elapsed time alone.
    const EmitDecision decision =
        st.reliable || !box.interpolated ? suppress_short(t->duration, st.reliable, cfg_) : EmitDecision::withhold;
    switch (decision) {
      case EmitDecision::withhold:
        if (cfg_.emit_mode == EmitMode::offline_retroemit) {
          st.backlog.push_back(box);
        }
        break;
      case EmitDecision::release:
        st.reliable = true;
        for (auto& b : st.backlog) {
          res.released.push_back(std::move(b));
        }
        st.backlog.clear();
        res.emitted.push_back(box);
        break;
      case EmitDecision::emit:
        res.emitted.push_back(box);
        break;
    }
  }
  return res;
}

RefinedStream refine_stream(const VideoSequence& seq, const AssociatorConfig& assoc_cfg,
                            const RefinerConfig& refiner_cfg)
{
  OnlineRefiner refiner(assoc_cfg, refiner_cfg);
  RefinedStream out;
  out.video_id = seq.video_id;
  out.t_v = seq.t_v;
  out.frames.resize(static_cast<std::size_t>(seq.t_v));
  for (const auto& fr : seq.frames) {
    auto step = refiner.step(fr);
    for (auto& b : step.released) {
      out.frames[static_cast<std::size_t>(b.detection.frame)].push_back(std::move(b));
    }
    for (auto& b : step.emitted) {
      out.frames[static_cast<std::size_t>(fr.frame)].push_back(std::move(b));
    }
  }
  for (auto& f : out.frames) {
    std::stable_sort(f.begin(), f.end(),
                     [](const EmittedBox& a, const EmittedBox& b) { return a.track_id < b.track_id; });
  }
  return out;
}

} // namespace tempo
