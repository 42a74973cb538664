#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tempo/associate.hpp"

namespace tempo
{

/// One bin of an amplitude spectrum: frequency in cycles/frame and |DFT| at that bin.
struct SpectrumPoint
{
  double q = 0.0;
  double amplitude = 0.0;
};

enum class Channel
{
  cx,
  cy,
  w,
  h
};

inline constexpr std::array<Channel, 4> all_channels{Channel::cx, Channel::cy, Channel::w, Channel::h};

const char* channel_name(Channel c);
double channel_value(const BBox& box, Channel c);

struct ContinuityValues
{
  double esde = 0.0;
  double sde = 0.0;
  double tfe = 0.0;
  double ftr = 0.0;

  double sum() const { return esde + sde + tfe + ftr; }
};

struct TrackletBreakdown
{
  int id = 0;
  int class_id = 0;
  int first_frame = 0;
  int last_frame = 0;
  int length = 0;
  int misses = 0;
  double center_jitter = 0.0;  ///< sum of q*A over cx, cy (unscaled)
  double size_jitter = 0.0;    ///< sum of q*A over w, h (unscaled)
};

struct SequenceReport
{
  std::string video_id;
  int t_v = 0;
  int tracklet_count = 0;
  ContinuityValues raw;
  ContinuityValues logged;
  double rce = 0.0;  ///< sum of the logged continuity values
  double cje = 0.0;
  double sje = 0.0;
  double lje = 0.0;
  std::vector<TrackletBreakdown> tracklets;
};

struct MetricThresholds
{
  int extremely_short = 3;  ///< S_ESDE
  int short_duration = 10;  ///< S_SDE
};

/// log_100(1 + 99*alpha). Throws std::domain_error outside [0,1].
double log_contrast(double alpha);

/// (1/t_v) * sum of t_n over tracklets with t_n < threshold.
double short_duration_error(std::span<const Tracklet> tracklets, int t_v, int threshold);

struct FragmentErrors
{
  double tfe = 0.0;
  double ftr = 0.0;
};

FragmentErrors fragment_errors(std::span<const Tracklet> tracklets);

/**
 * @brief Amplitude spectrum of a real series, DC excluded.
 *
 * Returns (k/t, |sum_j p_j exp(-2*pi*i*k*j/t)|) for k = 1..floor(t/2). The
 * transform is unnormalized. Computed with an FFT (Bluestein for lengths
 * that are not a power of two).
 */
std::vector<SpectrumPoint> dft_amplitudes(std::span<const double> series);

/// Sum of q*A over a spectrum.
double frequency_weighted_amplitude(std::span<const SpectrumPoint> spectrum);

/**
 * Per-frame channel values over [first_frame, last_matched_frame]. Missed
 * frames are filled by linear interpolation between the matched boxes on
 * either side.
 */
std::array<std::vector<double>, 4> channel_series(const Tracklet& tracklet);

struct JitterErrors
{
  double cje = 0.0;
  double sje = 0.0;
};

JitterErrors jitter_errors(std::span<const Tracklet> tracklets);

/// Full report for one video. Throws ConsistencyError if a tracklet extends past t_v.
SequenceReport evaluate(std::span<const Tracklet> tracklets, int t_v, std::string video_id = {},
                        const MetricThresholds& thresholds = {});

/// Duration-weighted mean of raw values across videos, log transform applied afterwards.
SequenceReport aggregate(std::span<const SequenceReport> reports);

} // namespace tempo
