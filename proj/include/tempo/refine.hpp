#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tempo/associate.hpp"

namespace tempo
{

/// Normalized geometric-progression weights; weights[0] applies to the newest box.
struct FusionWeights
{
  double omega = 10.0;
  std::vector<double> weights;
};

enum class EmitMode
{
  online_drop,       ///< boxes withheld before a tracklet is reliable are never emitted
  offline_retroemit  ///< withheld boxes are released once the tracklet becomes reliable
};

struct RefinerConfig
{
  int reliable_after = 10;  ///< a tracklet is reliable once S_dur > reliable_after (S_SDE)
  double omega = 10.0;
  EmitMode emit_mode = EmitMode::online_drop;

  void validate() const;
};

/**
 * Weights proportional to omega^l for l stepping linearly from 1 down to 0.1
 * over `count` points, normalized to sum to one. count == 1 yields {1}.
 */
FusionWeights fusion_weights(double omega, int count);

enum class EmitDecision
{
  withhold,
  emit,
  release  ///< first reliable frame: emit, and flush any backlog in retro mode
};

/// Short-tracklet gate for one frame of one tracklet.
EmitDecision suppress_short(int duration, bool was_reliable, const RefinerConfig& cfg);

inline constexpr double min_filled_size = 1e-4;

/**
 * @brief Constant-velocity prediction for the frame after the window.
 *
 * Velocity per channel is the mean consecutive difference over the window
 * (oldest first). A single-entry window repeats its box. Predicted w and h
 * are clamped to at least min_filled_size.
 */
BBox fill_fragment(std::span<const WindowEntry> window);

/**
 * Weighted average of the newest min(|window|, |weights|) boxes, weights
 * renormalized over the boxes actually present.
 */
BBox fuse_location(std::span<const WindowEntry> window, const FusionWeights& weights);

struct EmittedBox
{
  int track_id = 0;
  Detection detection;
  bool interpolated = false;
};

struct RefinedStream
{
  std::string video_id;
  int t_v = 0;
  std::vector<std::vector<EmittedBox>> frames;

  /// Plain detection stream (flags and identities dropped).
  VideoSequence sequence() const;
  std::size_t box_count() const;
};

/**
 * @brief Online tracklet refinement on top of an Associator.
 *
 * Each step associates the frame, then for every alive tracklet either
 * fuses its newest measurement with its recent window or, on a missed
 * frame, predicts a box from that window. Boxes of tracklets that are not
 * yet reliable are withheld. A tracklet is promoted to reliable only on a
 * frame where it is matched.
 */
class OnlineRefiner
{
public:
  OnlineRefiner(AssociatorConfig assoc_cfg, RefinerConfig cfg);

  struct StepResult
  {
    FrameAssociation association;
    std::vector<EmittedBox> emitted;   ///< boxes for the current frame
    std::vector<EmittedBox> released;  ///< retro mode only: earlier boxes released this frame
  };

  StepResult step(const FrameDetections& frame);

  const Associator& associator() const { return assoc_; }
  const RefinerConfig& config() const { return cfg_; }
  const FusionWeights& weights() const { return weights_; }

  bool is_reliable(int track_id) const;
  /// Refiner window for an alive tracklet (raw measurements plus predicted fills).
  const std::vector<WindowEntry>* window(int track_id) const;

private:
  struct TrackState
  {
    std::vector<WindowEntry> window;
    double last_score = 0.0;
    bool reliable = false;
    std::vector<EmittedBox> backlog;
  };

  Associator assoc_;
  RefinerConfig cfg_;
  FusionWeights weights_;
  std::map<int, TrackState> tracks_;
};

RefinedStream refine_stream(const VideoSequence& seq, const AssociatorConfig& assoc_cfg,
                            const RefinerConfig& refiner_cfg);

} // namespace tempo
