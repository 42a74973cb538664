#include "tempo/sot.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "tempo/synth.hpp"

namespace tempo
{

void SotConfig::validate() const
{
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(sos_threshold) || !in_unit(nms_threshold) || !in_unit(score_threshold)) {
    throw InvariantError("SOT thresholds must lie in [0,1]");
  }
}

std::optional<std::size_t> sos_nms_index(std::span<const Detection> candidates, const BBox& prev_box,
                                         const SotConfig& cfg)
{
  // SOS: keep (index, carried IoU) for candidates overlapping the previous box enough.
  std::vector<std::pair<std::size_t, double>> survivors;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double o = iou(prev_box, candidates[i].box);
    if (!(o < cfg.sos_threshold)) {
      survivors.emplace_back(i, o);
    }
  }
  if (survivors.empty()) {
    return std::nullopt;
  }

  std::stable_sort(survivors.begin(), survivors.end(), [&](const auto& a, const auto& b) {
    return candidates[a.first].score > candidates[b.first].score;
  });

  std::vector<bool> removed(survivors.size(), false);
  std::optional<std::size_t> best;
  double best_overlap = -1.0;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (removed[i]) {
      continue;
    }
    const auto [idx, overlap] = survivors[i];
    // Keepers arrive in (score desc, index asc) order, so strict > resolves IoU ties by score then index.
    if (overlap > best_overlap) {
      best = idx;
      best_overlap = overlap;
    }
    for (std::size_t j = i + 1; j < survivors.size(); ++j) {
      if (!removed[j] && iou(candidates[idx].box, candidates[survivors[j].first].box) > cfg.nms_threshold) {
        removed[j] = true;
      }
    }
  }
  return best;
}

std::optional<Detection> sos_nms(std::span<const Detection> candidates, const BBox& prev_box, const SotConfig& cfg)
{
  if (auto idx = sos_nms_index(candidates, prev_box, cfg)) {
    return candidates[*idx];
  }
  return std::nullopt;
}

const char* mode_name(TrackMode m)
{
  return m == TrackMode::mot ? "MOT" : "SOT";
}

const char* event_name(SwitchEvent e)
{
  switch (e) {
    case SwitchEvent::none: return "none";
    case SwitchEvent::mot_to_sot: return "MOT->SOT";
    case SwitchEvent::sot_to_mot: return "SOT->MOT";
  }
  return "?";
}

namespace
{

TrackFrameOutput mot_step(TrackerState& state, const FrameDetections& frame, const SotConfig& sot_cfg,
                          const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg)
{
  if (!state.mot) {
    state.mot.emplace(assoc_cfg, refiner_cfg);
  }
  TrackFrameOutput out;
  out.frame = frame.frame;
  out.mode = TrackMode::mot;

  FrameDetections filtered{frame.frame, nms(frame.detections, sot_cfg.score_threshold, sot_cfg.nms_threshold)};
  auto step = state.mot->step(filtered);
  out.boxes = std::move(step.emitted);

  // Highest current score among reliable tracklets; lost ones rank by their last observed score.
  const Tracklet* pick = nullptr;
  double pick_score = -1.0;
  for (const auto& t : state.mot->associator().active()) {
    if (!state.mot->is_reliable(t.id)) {
      continue;
    }
    const double s = state.mot->window(t.id)->back().score;
    if (s > pick_score || (s == pick_score && t.id < pick->id)) {
      pick = &t;
      pick_score = s;
    }
  }
  if (!pick) {
    return out;
  }

  SotTarget target;
  target.track_id = pick->id;
  target.class_id = pick->class_id;
  target.window = *state.mot->window(pick->id);
  target.first_frame = pick->first_frame;
  target.duration = pick->duration;
  target.last_score = pick_score;
  const auto emitted = std::find_if(out.boxes.begin(), out.boxes.end(),
                                    [&](const EmittedBox& b) { return b.track_id == pick->id; });
  target.prev_box = emitted != out.boxes.end() ? emitted->detection.box : target.window.back().box;
  out.tracked = EmittedBox{pick->id, {frame.frame, pick->class_id, pick_score, target.prev_box},
                           emitted != out.boxes.end() && emitted->interpolated};

  out.event = SwitchEvent::mot_to_sot;
  state.mode = TrackMode::sot;
  state.tracked = std::move(target);
  state.mot.reset();
  return out;
}

TrackFrameOutput sot_step(TrackerState& state, const FrameDetections& frame, const SotConfig& sot_cfg,
                          const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg)
{
  TrackFrameOutput out;
  out.frame = frame.frame;
  out.mode = TrackMode::sot;
  SotTarget& target = *state.tracked;

  std::vector<Detection> candidates;
  for (const auto& d : frame.detections) {
    if (d.score >= sot_cfg.score_threshold && d.class_id == target.class_id) {
      candidates.push_back(d);
    }
  }
  const auto chosen = sos_nms(candidates, target.prev_box, sot_cfg);
  if (!chosen) {
    out.event = SwitchEvent::sot_to_mot;
    state.mode = TrackMode::mot;
    state.tracked.reset();
    state.mot.emplace(assoc_cfg, refiner_cfg);
    return out;
  }

  target.window.push_back({chosen->score, chosen->box});
  while (static_cast<int>(target.window.size()) > assoc_cfg.max_objects) {
    target.window.erase(target.window.begin());
  }
  target.duration = frame.frame - target.first_frame + 1;
  target.last_score = chosen->score;
  const BBox fused = fuse_location(target.window, fusion_weights(refiner_cfg.omega, assoc_cfg.max_objects));
  target.prev_box = fused;
  out.tracked = EmittedBox{target.track_id, {frame.frame, target.class_id, chosen->score, fused}, false};
  return out;
}

} // namespace

TrackFrameOutput track_step(TrackerState& state, const FrameDetections& frame, const SotConfig& sot_cfg,
                            const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg)
{
  if (state.mode == TrackMode::sot) {
    return sot_step(state, frame, sot_cfg, assoc_cfg, refiner_cfg);
  }
  return mot_step(state, frame, sot_cfg, assoc_cfg, refiner_cfg);
}

std::vector<TrackFrameOutput> track_sequence(const VideoSequence& seq, const SotConfig& sot_cfg,
                                             const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg)
{
  sot_cfg.validate();
  assoc_cfg.validate();
  refiner_cfg.validate();
  TrackerState state;
  std::vector<TrackFrameOutput> out;
  out.reserve(seq.frames.size());
  for (const auto& fr : seq.frames) {
    out.push_back(track_step(state, fr, sot_cfg, assoc_cfg, refiner_cfg));
  }
  return out;
}

std::optional<OverlapProfile> parse_profile(const std::string& name)
{
  if (name == "clustered") {
    return OverlapProfile::clustered;
  }
  if (name == "uniform") {
    return OverlapProfile::uniform;
  }
  if (name == "far" || name == "uniform-far") {
    return OverlapProfile::far;
  }
  return std::nullopt;
}

const char* profile_name(OverlapProfile p)
{
  switch (p) {
    case OverlapProfile::clustered: return "clustered";
    case OverlapProfile::uniform: return "uniform";
    case OverlapProfile::far: return "far";
  }
  return "?";
}

namespace
{

// Keeps timed results observable so the optimizer cannot drop the work.
volatile std::size_t bench_sink = 0;

double median(std::vector<double> v)
{
  if (v.empty()) {
    return 0.0;
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) {
    return *mid;
  }
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

} // namespace

BenchRecord bench_candidate_selection(int candidate_count, OverlapProfile profile, const SotConfig& cfg,
                                      std::uint64_t seed, int repetitions)
{
  using clock = std::chrono::steady_clock;
  const CandidateSet set = make_candidate_set(candidate_count, profile, seed);
  BenchRecord rec;
  rec.candidate_count = candidate_count;
  rec.repetitions = repetitions;

  std::vector<double> nms_ms;
  std::vector<double> sos_ms;
  nms_ms.reserve(static_cast<std::size_t>(repetitions));
  sos_ms.reserve(static_cast<std::size_t>(repetitions));
  std::size_t sink = 0;
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    const auto kept = nms_indices(set.candidates, cfg.score_threshold, cfg.nms_threshold);
    const auto t1 = clock::now();
    // Same pre-filter as the NMS path so both see identical inputs.
    std::vector<Detection> passed;
    passed.reserve(set.candidates.size());
    for (const auto& d : set.candidates) {
      if (d.score >= cfg.score_threshold) {
        passed.push_back(d);
      }
    }
    const auto pick = sos_nms_index(passed, set.prev_box, cfg);
    const auto t2 = clock::now();
    sink += kept.size() + (pick ? *pick : 0);
    nms_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    sos_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
    if (r == 0) {
      rec.nms_kept = static_cast<int>(kept.size());
    }
  }
  bench_sink = sink;

  for (const auto& d : set.candidates) {
    if (d.score >= cfg.score_threshold && !(iou(set.prev_box, d.box) < cfg.sos_threshold)) {
      ++rec.survivors_after_sos;
    }
  }
  rec.nms_ms_per_frame = median(std::move(nms_ms));
  rec.sos_nms_ms_per_frame = median(std::move(sos_ms));
  rec.ratio = rec.nms_ms_per_frame > 0.0 ? rec.sos_nms_ms_per_frame / rec.nms_ms_per_frame : 0.0;
  return rec;
}

} // namespace tempo
