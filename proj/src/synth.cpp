#include "tempo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace tempo
{

double Rng::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
  return lo + (hi - lo) * uniform();
}

int Rng::uniform_int(int lo, int hi)
{
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal()
{
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::truncated_normal(double sigma)
{
  if (sigma <= 0.0) {
    return 0.0;
  }
  for (;;) {
    const double z = normal();
    if (std::abs(z) <= 4.0) {
      return sigma * z;
    }
  }
}

BBox TrackSpec::truth_at(int frame) const
{
  const double dt = static_cast<double>(frame - first_frame);
  BBox b = base_box;
  switch (motion.kind) {
    case Motion::Kind::stationary:
      break;
    case Motion::Kind::constant_velocity:
      b.cx += motion.velocity.cx * dt;
      b.cy += motion.velocity.cy * dt;
      b.w += motion.velocity.w * dt;
      b.h += motion.velocity.h * dt;
      break;
    case Motion::Kind::sinusoidal:
      b.cx += motion.amplitude * std::sin(2.0 * std::numbers::pi * dt / motion.period);
      break;
  }
  return b;
}

namespace
{

void validate_inputs(std::span<const TrackSpec> specs, const PerturbationSpec& p, int t_v)
{
  if (t_v < 1) {
    throw InvariantError("synth: t_v must be >= 1");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p.dropout_rate)) {
    throw InvariantError("synth: dropout_rate must lie in [0,1]");
  }
  if (!(p.jitter_sigma_center >= 0.0) || !(p.jitter_sigma_size >= 0.0)) {
    throw InvariantError("synth: jitter sigmas must be non-negative");
  }
  if (p.ghosts.count < 0 || (p.ghosts.count > 0 && (p.ghosts.length < 1 || p.ghosts.length > t_v))) {
    throw InvariantError("synth: ghost count must be >= 0 and ghost length in [1, t_v]");
  }
  for (const auto& g : p.burst_dropout) {
    if (g.length < 0 || g.track < -1 || g.track >= static_cast<int>(specs.size())) {
      throw InvariantError("synth: burst gap has negative length or unknown track");
    }
  }
  const double size_margin = 4.0 * p.jitter_sigma_size;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string where = "synth: track " + std::to_string(i) + ": ";
    if (s.first_frame < 0 || s.last_frame >= t_v || s.first_frame > s.last_frame) {
      throw InvariantError(where + "span must satisfy 0 <= first <= last < t_v");
    }
    if (s.motion.kind == Motion::Kind::sinusoidal && !(s.motion.period >= 2.0)) {
      throw InvariantError(where + "sinusoidal period must be >= 2 frames");
    }
    if (!in_unit(s.base_score)) {
      throw InvariantError(where + "base score must lie in [0,1]");
    }
    for (int f = s.first_frame; f <= s.last_frame; ++f) {
      const BBox b = s.truth_at(f);
      if (!b.valid() || b.w <= size_margin || b.h <= size_margin) {
        throw InvariantError(where + "box degenerates at frame " + std::to_string(f));
      }
    }
  }
}

BBox grown(const BBox& b, double factor)
{
  return {b.cx, b.cy, b.w * factor, b.h * factor};
}

} // namespace

GeneratedSequence generate(std::span<const TrackSpec> specs, const PerturbationSpec& perturb, int t_v,
                           std::string video_id)
{
  validate_inputs(specs, perturb, t_v);
  Rng rng(perturb.seed);
  GeneratedSequence out;
  out.sequence = VideoSequence::empty(std::move(video_id), t_v);
  DefectLedger& ledger = out.ledger;
  ledger.jitter_sigma_center = perturb.jitter_sigma_center;
  ledger.jitter_sigma_size = perturb.jitter_sigma_size;

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const TrackSpec& s = specs[i];
    TrackTruth truth;
    truth.first_frame = s.first_frame;
    truth.last_frame = s.last_frame;
    for (int f = s.first_frame; f <= s.last_frame; ++f) {
      const BBox clean = s.truth_at(f);
      // Draw every variate unconditionally so the stream layout does not depend on earlier outcomes.
      const bool dropped = rng.uniform() < perturb.dropout_rate;
      BBox noisy = clean;
      noisy.cx += rng.truncated_normal(perturb.jitter_sigma_center);
      noisy.cy += rng.truncated_normal(perturb.jitter_sigma_center);
      noisy.w += rng.truncated_normal(perturb.jitter_sigma_size);
      noisy.h += rng.truncated_normal(perturb.jitter_sigma_size);
      const bool burst = std::any_of(perturb.burst_dropout.begin(), perturb.burst_dropout.end(),
                                     [&](const BurstGap& g) {
                                       return (g.track == -1 || g.track == static_cast<int>(i)) && f >= g.start &&
                                              f < g.start + g.length;
                                     });
      const bool present = !dropped && !burst;
      truth.truth.push_back(clean);
      truth.present.push_back(present);
      if (present) {
        out.sequence.frames[static_cast<std::size_t>(f)].detections.push_back({f, s.class_id, s.base_score, noisy});
        ++ledger.detection_count;
      }
    }
    const auto first_seen = std::find(truth.present.begin(), truth.present.end(), true);
    const auto last_seen = std::find(truth.present.rbegin(), truth.present.rend(), true);
    if (first_seen != truth.present.end()) {
      int gap = 0;
      for (auto it = first_seen; it != last_seen.base(); ++it) {
        if (!*it) {
          ++truth.interior_misses;
          truth.longest_interior_gap = std::max(truth.longest_interior_gap, ++gap);
        } else {
          gap = 0;
        }
      }
    }
    ledger.interior_misses += truth.interior_misses;
    ledger.longest_interior_gap = std::max(ledger.longest_interior_gap, truth.longest_interior_gap);
    ledger.tracks.push_back(std::move(truth));
  }

  const int ghost_class = specs.empty() ? 0 : specs.front().class_id;
  const double jitter_reach = 4.0 * (perturb.jitter_sigma_center + perturb.jitter_sigma_size);
  for (int g = 0; g < perturb.ghosts.count; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      GhostTruth ghost;
      ghost.first_frame = rng.uniform_int(0, t_v - perturb.ghosts.length);
      ghost.last_frame = ghost.first_frame + perturb.ghosts.length - 1;
      ghost.box = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.03, 0.08),
                   rng.uniform(0.03, 0.08)};
      ghost.class_id = ghost_class;
      const BBox guard{ghost.box.cx, ghost.box.cy, 2.0 * ghost.box.w + 2.0 * jitter_reach,
                       2.0 * ghost.box.h + 2.0 * jitter_reach};
      const int lo = ghost.first_frame - ghost_time_margin;
      const int hi = ghost.last_frame + ghost_time_margin;
      bool clear = true;
      for (std::size_t i = 0; i < specs.size() && clear; ++i) {
        for (int f = std::max(lo, specs[i].first_frame); f <= std::min(hi, specs[i].last_frame); ++f) {
          if (iou(guard, grown(specs[i].truth_at(f), 1.0 + 1e-9)) > 0.0) {
            clear = false;
            break;
          }
        }
      }
      for (const auto& other : ledger.ghosts) {
        if (!clear) {
          break;
        }
        if (other.last_frame >= lo && other.first_frame <= hi && iou(guard, grown(other.box, 2.0)) > 0.0) {
          clear = false;
        }
      }
      if (clear) {
        const double score = rng.uniform(0.6, 0.95);
        for (int f = ghost.first_frame; f <= ghost.last_frame; ++f) {
          out.sequence.frames[static_cast<std::size_t>(f)].detections.push_back({f, ghost.class_id, score, ghost.box});
          ++ledger.detection_count;
        }
        ledger.ghosts.push_back(ghost);
        placed = true;
      }
    }
    if (!placed) {
      throw InvariantError("synth: could not place ghost track " + std::to_string(g) + " without overlap");
    }
  }
  return out;
}

std::vector<SpectrumPoint> oracle_dft(std::span<const double> series)
{
  const std::size_t t = series.size();
  std::vector<SpectrumPoint> out;
  for (std::size_t k = 1; k <= t / 2; ++k) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < t; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * j) % t) / static_cast<double>(t);
      re += series[j] * std::cos(ang);
      im += series[j] * std::sin(ang);
    }
    out.push_back({static_cast<double>(k) / static_cast<double>(t), std::hypot(re, im)});
  }
  return out;
}

std::optional<std::size_t> oracle_sos_nms(std::span<const Detection> candidates, const BBox& prev_box,
                                          const SotConfig& cfg)
{
  struct Item
  {
    std::size_t index;
    BBox box;
    double score;
    double overlap;
  };
  std::vector<Item> sos;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    sos.push_back({i, candidates[i].box, candidates[i].score, iou(prev_box, candidates[i].box)});
  }
  sos.erase(std::remove_if(sos.begin(), sos.end(), [&](const Item& it) { return it.overlap < cfg.sos_threshold; }),
            sos.end());
  if (sos.empty()) {
    return std::nullopt;
  }

  std::vector<Item> kept;
  while (!sos.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < sos.size(); ++i) {
      if (sos[i].score > sos[best].score) {
        best = i;
      }
    }
    const Item top = sos[best];
    kept.push_back(top);
    sos.erase(sos.begin() + static_cast<std::ptrdiff_t>(best));
    std::vector<Item> rest;
    for (const auto& it : sos) {
      if (!(iou(top.box, it.box) > cfg.nms_threshold)) {
        rest.push_back(it);
      }
    }
    sos = std::move(rest);
  }

  const Item* pick = &kept.front();
  for (const auto& it : kept) {
    const bool better = it.overlap > pick->overlap ||
                        (it.overlap == pick->overlap &&
                         (it.score > pick->score || (it.score == pick->score && it.index < pick->index)));
    if (better) {
      pick = &it;
    }
  }
  return pick->index;
}

CandidateSet make_candidate_set(int count, OverlapProfile profile, std::uint64_t seed)
{
  Rng rng(seed);
  CandidateSet set;
  set.prev_box = {0.5, 0.5, 0.2, 0.2};
  auto score = [&] { return rng.uniform(0.5, 1.0); };

  switch (profile) {
    case OverlapProfile::clustered: {
      constexpr int clusters = 10;
      std::vector<BBox> centers{{0.51, 0.49, 0.2, 0.2}};
      while (static_cast<int>(centers.size()) < clusters) {
        const BBox c{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.08, 0.2), rng.uniform(0.08, 0.2)};
        if (iou(grown(c, 1.5), grown(set.prev_box, 1.5)) == 0.0) {
          centers.push_back(c);
        }
      }
      for (int i = 0; i < count; ++i) {
        const BBox& c = centers[static_cast<std::size_t>(rng.uniform_int(0, clusters - 1))];
        BBox b{c.cx + 0.1 * c.w * rng.normal(), c.cy + 0.1 * c.h * rng.normal(),
               c.w * (1.0 + 0.1 * rng.truncated_normal(1.0) / 4.0), c.h * (1.0 + 0.1 * rng.truncated_normal(1.0) / 4.0)};
        set.candidates.push_back({0, 0, score(), b});
      }
      break;
    }
    case OverlapProfile::uniform:
      for (int i = 0; i < count; ++i) {
        const BBox b{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3)};
        set.candidates.push_back({0, 0, score(), b});
      }
      break;
    case OverlapProfile::far:
      while (static_cast<int>(set.candidates.size()) < count) {
        const BBox b{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2)};
        if (iou(b, set.prev_box) == 0.0) {
          set.candidates.push_back({0, 0, score(), b});
        }
      }
      break;
  }
  return set;
}

} // namespace tempo
