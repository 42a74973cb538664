#include "tempo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fft.hpp"

namespace tempo
{

const char* channel_name(Channel c)
{
  switch (c) {
    case Channel::cx: return "cx";
    case Channel::cy: return "cy";
    case Channel::w: return "w";
    case Channel::h: return "h";
  }
  return "?";
}

double channel_value(const BBox& box, Channel c)
{
  switch (c) {
    case Channel::cx: return box.cx;
    case Channel::cy: return box.cy;
    case Channel::w: return box.w;
    case Channel::h: return box.h;
  }
  return 0.0;
}

double log_contrast(double alpha)
{
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("log_contrast: alpha must lie in [0,1]");
  }
  if (alpha == 1.0) {
    return 1.0;
  }
  return std::log1p(99.0 * alpha) / std::log(100.0);
}

double short_duration_error(std::span<const Tracklet> tracklets, int t_v, int threshold)
{
  if (t_v < 1) {
    throw std::domain_error("short_duration_error: t_v must be >= 1");
  }
  long long total = 0;
  for (const auto& t : tracklets) {
    if (t.length() < threshold) {
      total += t.length();
    }
  }
  return static_cast<double>(total) / static_cast<double>(t_v);
}

FragmentErrors fragment_errors(std::span<const Tracklet> tracklets)
{
  if (tracklets.empty()) {
    return {};
  }
  long long misses = 0;
  long long frames = 0;
  std::size_t fragmented = 0;
  for (const auto& t : tracklets) {
    misses += t.misses;
    frames += t.length();
    if (t.misses > 0) {
      ++fragmented;
    }
  }
  FragmentErrors out;
  out.tfe = frames > 0 ? static_cast<double>(misses) / static_cast<double>(frames) : 0.0;
  out.ftr = static_cast<double>(fragmented) / static_cast<double>(tracklets.size());
  return out;
}

std::vector<SpectrumPoint> dft_amplitudes(std::span<const double> series)
{
  const std::size_t t = series.size();
  std::vector<SpectrumPoint> out;
  if (t < 2) {
    return out;
  }
  std::vector<std::complex<double>> buf(series.begin(), series.end());
  const auto spectrum = detail::forward_dft(buf);
  out.reserve(t / 2);
  for (std::size_t k = 1; k <= t / 2; ++k) {
    out.push_back({static_cast<double>(k) / static_cast<double>(t), std::abs(spectrum[k])});
  }
  return out;
}

double frequency_weighted_amplitude(std::span<const SpectrumPoint> spectrum)
{
  double acc = 0.0;
  for (const auto& p : spectrum) {
    acc += p.q * p.amplitude;
  }
  return acc;
}

std::array<std::vector<double>, 4> channel_series(const Tracklet& tracklet)
{
  std::array<std::vector<double>, 4> out;
  const std::size_t n = tracklet.history.size();
  for (auto& ch : out) {
    ch.assign(n, 0.0);
  }
  std::size_t prev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!tracklet.history[i]) {
      continue;
    }
    const BBox& cur = tracklet.history[i]->box;
    if (i > prev + 1) {
      const BBox& before = tracklet.history[prev]->box;
      const double span = static_cast<double>(i - prev);
      for (std::size_t j = prev + 1; j < i; ++j) {
        const double u = static_cast<double>(j - prev) / span;
        for (std::size_t c = 0; c < 4; ++c) {
          const double a = channel_value(before, all_channels[c]);
          const double b = channel_value(cur, all_channels[c]);
          out[c][j] = a + (b - a) * u;
        }
      }
    }
    for (std::size_t c = 0; c < 4; ++c) {
      out[c][i] = channel_value(cur, all_channels[c]);
    }
    prev = i;
  }
  return out;
}

namespace
{

struct TrackJitter
{
  double center = 0.0;
  double size = 0.0;
};

TrackJitter tracklet_jitter(const Tracklet& t)
{
  const auto series = channel_series(t);
  TrackJitter j;
  for (std::size_t c = 0; c < 4; ++c) {
    const double s = frequency_weighted_amplitude(dft_amplitudes(series[c]));
    (c < 2 ? j.center : j.size) += s;
  }
  return j;
}

ContinuityValues log_all(const ContinuityValues& raw)
{
  return {log_contrast(std::min(raw.esde, 1.0)), log_contrast(std::min(raw.sde, 1.0)), log_contrast(raw.tfe),
          log_contrast(raw.ftr)};
}

} // namespace

JitterErrors jitter_errors(std::span<const Tracklet> tracklets)
{
  if (tracklets.empty()) {
    return {};
  }
  double center = 0.0;
  double size = 0.0;
  long long frames = 0;
  for (const auto& t : tracklets) {
    const auto j = tracklet_jitter(t);
    center += j.center;
    size += j.size;
    frames += t.length();
  }
  return {1e3 * center / static_cast<double>(frames), 1e3 * size / static_cast<double>(frames)};
}

SequenceReport evaluate(std::span<const Tracklet> tracklets, int t_v, std::string video_id,
                        const MetricThresholds& thresholds)
{
  if (t_v < 1) {
    if (!tracklets.empty()) {
      throw ConsistencyError("evaluate: tracklets present in a video of zero duration");
    }
    SequenceReport empty;
    empty.video_id = std::move(video_id);
    return empty;
  }
  for (const auto& t : tracklets) {
    if (t.first_frame < 0 || t.last_matched_frame >= t_v) {
      throw ConsistencyError("evaluate: tracklet " + std::to_string(t.id) + " spans frames [" +
                             std::to_string(t.first_frame) + ", " + std::to_string(t.last_matched_frame) +
                             "] outside video duration " + std::to_string(t_v));
    }
  }

  SequenceReport rep;
  rep.video_id = std::move(video_id);
  rep.t_v = t_v;
  rep.tracklet_count = static_cast<int>(tracklets.size());
  rep.raw.esde = short_duration_error(tracklets, t_v, thresholds.extremely_short);
  rep.raw.sde = short_duration_error(tracklets, t_v, thresholds.short_duration);
  const auto frag = fragment_errors(tracklets);
  rep.raw.tfe = frag.tfe;
  rep.raw.ftr = frag.ftr;
  rep.logged = log_all(rep.raw);
  rep.rce = rep.logged.sum();

  double center = 0.0;
  double size = 0.0;
  long long frames = 0;
  for (const auto& t : tracklets) {
    const auto j = tracklet_jitter(t);
    center += j.center;
    size += j.size;
    frames += t.length();
    rep.tracklets.push_back({t.id, t.class_id, t.first_frame, t.last_matched_frame, t.length(), t.misses,
                             j.center, j.size});
  }
  if (frames > 0) {
    rep.cje = 1e3 * center / static_cast<double>(frames);
    rep.sje = 1e3 * size / static_cast<double>(frames);
  }
  rep.lje = rep.cje + rep.sje;
  return rep;
}

SequenceReport aggregate(std::span<const SequenceReport> reports)
{
  SequenceReport out;
  out.video_id = "*";
  double weight = 0.0;
  for (const auto& r : reports) {
    const double wv = static_cast<double>(r.t_v);
    weight += wv;
    out.t_v += r.t_v;
    out.tracklet_count += r.tracklet_count;
    out.raw.esde += wv * r.raw.esde;
    out.raw.sde += wv * r.raw.sde;
    out.raw.tfe += wv * r.raw.tfe;
    out.raw.ftr += wv * r.raw.ftr;
    out.cje += wv * r.cje;
    out.sje += wv * r.sje;
  }
  if (weight > 0.0) {
    out.raw.esde /= weight;
    out.raw.sde /= weight;
    out.raw.tfe /= weight;
    out.raw.ftr /= weight;
    out.cje /= weight;
    out.sje /= weight;
  }
  out.logged = log_all(out.raw);
  out.rce = out.logged.sum();
  out.lje = out.cje + out.sje;
  return out;
}

} // namespace tempo
