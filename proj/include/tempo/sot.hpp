#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempo/refine.hpp"

namespace tempo
{

struct SotConfig
{
  double sos_threshold = 0.3;   ///< U_sos
  double nms_threshold = 0.5;   ///< U_nms
  double score_threshold = 0.5;

  void validate() const;
};

/**
 * @brief Small-overlap suppression followed by NMS and IoU-argmax selection.
 *
 * Candidates are expected to be score-filtered already. Steps:
 *  1. drop candidates whose IoU with prev_box is below sos_threshold;
 *  2. no survivors -> tracking failure (nullopt);
 *  3. greedy score-ordered NMS over survivors, carrying each survivor's IoU with prev_box;
 *  4. pick the kept candidate with the largest carried IoU (ties: higher score, then lower index).
 * Suppression is class-agnostic; scores are never modified.
 *
 * Returns the index of the selected candidate.
 */
std::optional<std::size_t> sos_nms_index(std::span<const Detection> candidates, const BBox& prev_box,
                                         const SotConfig& cfg);

std::optional<Detection> sos_nms(std::span<const Detection> candidates, const BBox& prev_box, const SotConfig& cfg);

enum class TrackMode
{
  mot,
  sot
};

enum class SwitchEvent
{
  none,
  mot_to_sot,
  sot_to_mot
};

const char* mode_name(TrackMode m);
const char* event_name(SwitchEvent e);

/// The single tracklet followed in SOT mode.
struct SotTarget
{
  int track_id = 0;
  int class_id = 0;
  std::vector<WindowEntry> window;
  BBox prev_box;  ///< last emitted (fused) box, b^{f-1}
  int first_frame = 0;
  int duration = 0;
  double last_score = 0.0;
};

struct TrackerState
{
  TrackMode mode = TrackMode::mot;
  std::optional<OnlineRefiner> mot;  ///< authoritative in MOT mode
  std::optional<SotTarget> tracked;  ///< authoritative in SOT mode
};

struct TrackFrameOutput
{
  int frame = 0;
  TrackMode mode = TrackMode::mot;  ///< branch that processed this frame
  SwitchEvent event = SwitchEvent::none;
  std::vector<EmittedBox> boxes;       ///< MOT branch emissions
  std::optional<EmittedBox> tracked;   ///< SOT output, or the seeded box on a MOT->SOT switch
};

/**
 * One frame of SOT-by-detection.
 *
 * MOT mode runs NMS, association and refinement; the first frame with a
 * reliable tracklet switches to SOT on the highest-scoring one. SOT mode runs
 * SOS-NMS against the previous tracked box over same-class candidates; a
 * failure switches back to MOT with a fresh associator.
 */
TrackFrameOutput track_step(TrackerState& state, const FrameDetections& frame, const SotConfig& sot_cfg,
                            const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg);

std::vector<TrackFrameOutput> track_sequence(const VideoSequence& seq, const SotConfig& sot_cfg,
                                             const AssociatorConfig& assoc_cfg, const RefinerConfig& refiner_cfg);

enum class OverlapProfile
{
  clustered,  ///< several dense clusters, one of them on the previous box
  uniform,    ///< boxes spread over the whole frame
  far         ///< every box disjoint from the previous box
};

std::optional<OverlapProfile> parse_profile(const std::string& name);
const char* profile_name(OverlapProfile p);

struct BenchRecord
{
  int candidate_count = 0;
  int repetitions = 0;
  double nms_ms_per_frame = 0.0;      ///< median
  double sos_nms_ms_per_frame = 0.0;  ///< median
  double ratio = 0.0;                 ///< sos_nms / nms
  int survivors_after_sos = 0;
  int nms_kept = 0;
};

/// Times plain NMS against SOS-NMS on one reproducible candidate set (single-threaded, medians).
BenchRecord bench_candidate_selection(int candidate_count, OverlapProfile profile, const SotConfig& cfg,
                                      std::uint64_t seed, int repetitions = 1000);

} // namespace tempo
