#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tempo/metrics.hpp"
#include "tempo/sot.hpp"

namespace tempo
{

/**
 * @brief Platform-stable random source.
 *
 * std::mt19937_64 is fully specified by the standard; the distributions on
 * top of it are implemented here (53-bit uniform, Box-Muller normal) because
 * the standard library distributions are implementation-defined.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                    ///< [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);     ///< inclusive
  double normal();
  /// Normal(0, sigma) resampled until within +-4 sigma.
  double truncated_normal(double sigma);

private:
  std::mt19937_64 engine_;
};

struct Motion
{
  enum class Kind
  {
    stationary,
    constant_velocity,
    sinusoidal
  };

  Kind kind = Kind::stationary;
  BBox velocity{0.0, 0.0, 0.0, 0.0};  ///< per-frame change of cx, cy, w, h
  double amplitude = 0.0;             ///< sinusoidal: cx offset amplitude
  double period = 0.0;                ///< sinusoidal: frames per cycle

  static Motion stationary() { return {}; }
  static Motion constant_velocity(BBox v) { return {Kind::constant_velocity, v, 0.0, 0.0}; }
  static Motion sinusoidal(double amplitude, double period)
  {
    return {Kind::sinusoidal, {0.0, 0.0, 0.0, 0.0}, amplitude, period};
  }
};

struct TrackSpec
{
  Motion motion;
  int first_frame = 0;
  int last_frame = 0;
  BBox base_box;
  int class_id = 0;
  double base_score = 0.9;

  /// Noise-free box at frame f.
  BBox truth_at(int frame) const;
};

struct BurstGap
{
  int start = 0;
  int length = 0;
  int track = -1;  ///< index into the track list; -1 applies to every track
};

struct GhostSpec
{
  int count = 0;
  int length = 2;
};

struct PerturbationSpec
{
  double jitter_sigma_center = 0.0;
  double jitter_sigma_size = 0.0;
  double dropout_rate = 0.0;
  std::vector<BurstGap> burst_dropout;
  GhostSpec ghosts;
  std::uint64_t seed = 0;
};

struct TrackTruth
{
  int first_frame = 0;
  int last_frame = 0;
  std::vector<BBox> truth;    ///< noise-free boxes over [first_frame, last_frame]
  std::vector<bool> present;  ///< whether a detection was emitted
  int interior_misses = 0;    ///< missing frames strictly between first and last emitted frame
  int longest_interior_gap = 0;
};

struct GhostTruth
{
  int first_frame = 0;
  int last_frame = 0;
  BBox box;
  int class_id = 0;
};

/// Defects injected by generate().
struct DefectLedger
{
  std::vector<TrackTruth> tracks;
  std::vector<GhostTruth> ghosts;
  int interior_misses = 0;
  int longest_interior_gap = 0;
  double jitter_sigma_center = 0.0;
  double jitter_sigma_size = 0.0;
  std::size_t detection_count = 0;
};

struct GeneratedSequence
{
  VideoSequence sequence;
  DefectLedger ledger;
};

/// Frames kept free around every ghost so ghosts never chain into other tracks.
inline constexpr int ghost_time_margin = 16;

/**
 * Deterministic synthetic stream. Throws InvariantError for invalid specs
 * (spans outside the video, period < 2, boxes that could turn degenerate
 * under 4-sigma size jitter, rates outside [0,1], unplaceable ghosts).
 */
GeneratedSequence generate(std::span<const TrackSpec> specs, const PerturbationSpec& perturb, int t_v,
                           std::string video_id = "synth");

/// Direct O(t^2) DFT amplitudes; reference for dft_amplitudes().
std::vector<SpectrumPoint> oracle_dft(std::span<const double> series);

/// Literal list-manipulation SOS-NMS; reference for sos_nms_index().
std::optional<std::size_t> oracle_sos_nms(std::span<const Detection> candidates, const BBox& prev_box,
                                          const SotConfig& cfg);

struct CandidateSet
{
  std::vector<Detection> candidates;
  BBox prev_box;
};

/// Single-frame candidate cloud for benchmarking and equivalence testing. Scores lie in [0.5, 1).
CandidateSet make_candidate_set(int count, OverlapProfile profile, std::uint64_t seed);

} // namespace tempo
