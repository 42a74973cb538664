#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tempo/metrics.hpp"
#include "tempo/refine.hpp"
#include "test_support.hpp"

using namespace tempo;
using tempo::testing::det;
using tempo::testing::frame_range;
using tempo::testing::object_on_frames;

namespace
{

std::vector<WindowEntry> window_of(std::initializer_list<BBox> boxes)
{
  std::vector<WindowEntry> w;
  for (const auto& b : boxes) {
    w.push_back({0.9, b});
  }
  return w;
}

std::vector<int> without(std::vector<int> frames, std::initializer_list<int> drop)
{
  std::erase_if(frames, [&](int f) { return std::find(drop.begin(), drop.end(), f) != drop.end(); });
  return frames;
}

} // namespace

TEST(FusionWeights, DefaultValues)
{
  // omega^l with l = linspace(1, 0.1, 5), normalized; computed with numpy.
  const double expected[] = {0.43712, 0.26037, 0.15509, 0.09238, 0.05503};
  const auto fw = fusion_weights(10.0, 5);
  ASSERT_EQ(fw.weights.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(fw.weights[i], expected[i], 5e-6);
  }
}

TEST(FusionWeights, UnitOmegaIsUniform)
{
  const auto fw = fusion_weights(1.0, 4);
  for (double w : fw.weights) {
    EXPECT_DOUBLE_EQ(w, 0.25);
  }
}

TEST(FusionWeights, SingleEntry)
{
  const auto fw = fusion_weights(10.0, 1);
  ASSERT_EQ(fw.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(fw.weights[0], 1.0);
}

TEST(FusionWeights, NormalizedAndDecreasing)
{
  for (double omega : {1.5, 2.0, 10.0, 100.0, 1e6}) {
    for (int n = 1; n <= 12; ++n) {
      const auto fw = fusion_weights(omega, n);
      EXPECT_NEAR(std::accumulate(fw.weights.begin(), fw.weights.end(), 0.0), 1.0, 1e-12);
      for (int i = 1; i < n; ++i) {
        EXPECT_LT(fw.weights[static_cast<std::size_t>(i)], fw.weights[static_cast<std::size_t>(i - 1)]);
      }
    }
  }
}

TEST(FusionWeights, RejectsInvalidArguments)
{
  EXPECT_THROW(fusion_weights(0.5, 5), std::invalid_argument);
  EXPECT_THROW(fusion_weights(10.0, 0), std::invalid_argument);
}

TEST(SuppressShort, GateAtReliableAfter)
{
  RefinerConfig cfg;
  EXPECT_EQ(suppress_short(1, false, cfg), EmitDecision::withhold);
  EXPECT_EQ(suppress_short(10, false, cfg), EmitDecision::withhold);
  EXPECT_EQ(suppress_short(11, false, cfg), EmitDecision::release);
  EXPECT_EQ(suppress_short(12, true, cfg), EmitDecision::emit);
}

TEST(FillFragment, ConstantVelocityExtrapolation)
{
  const auto w = window_of({{0.10, 0.5, 0.2, 0.2}, {0.11, 0.5, 0.2, 0.2}, {0.13, 0.5, 0.2, 0.2},
                            {0.16, 0.5, 0.2, 0.2}, {0.20, 0.5, 0.2, 0.2}});
  const BBox b = fill_fragment(w);
  EXPECT_NEAR(b.cx, 0.225, 1e-15);
  EXPECT_NEAR(b.cy, 0.5, 1e-15);
  EXPECT_NEAR(b.w, 0.2, 1e-15);
}

TEST(FillFragment, SingleEntryRepeatsBox)
{
  const auto w = window_of({{0.3, 0.4, 0.1, 0.2}});
  EXPECT_EQ(fill_fragment(w), (BBox{0.3, 0.4, 0.1, 0.2}));
}

TEST(FillFragment, ShrinkingSizeIsClamped)
{
  const auto w = window_of({{0.5, 0.5, 0.3, 0.3}, {0.5, 0.5, 0.01, 0.01}});
  const BBox b = fill_fragment(w);
  EXPECT_EQ(b.w, min_filled_size);
  EXPECT_EQ(b.h, min_filled_size);
}

TEST(FillFragment, EmptyWindowThrows)
{
  EXPECT_THROW(fill_fragment({}), std::invalid_argument);
}

TEST(FuseLocation, IsConvexCombinationOfWindow)
{
  Rng rng(9);
  const auto fw = fusion_weights(10.0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WindowEntry> w;
    for (int i = 0; i < rng.uniform_int(1, 5); ++i) {
      w.push_back({0.9, tempo::testing::random_box(rng)});
    }
    const BBox f = fuse_location(w, fw);
    double lo = 1e9;
    double hi = -1e9;
    for (const auto& e : w) {
      lo = std::min(lo, e.box.cx);
      hi = std::max(hi, e.box.cx);
    }
    EXPECT_GE(f.cx, lo - 1e-12);
    EXPECT_LE(f.cx, hi + 1e-12);
  }
}

TEST(FuseLocation, WeightsNewestMost)
{
  const auto w = window_of({{0.0, 0.5, 0.2, 0.2}, {1.0, 0.5, 0.2, 0.2}});
  const auto fw = fusion_weights(10.0, 5);
  const double expected = fw.weights[0] / (fw.weights[0] + fw.weights[1]);
  EXPECT_NEAR(fuse_location(w, fw).cx, expected, 1e-15);
}

TEST(FuseLocation, LargeOmegaConvergesToNewest)
{
  const auto w = window_of({{0.1, 0.5, 0.2, 0.2}, {0.2, 0.5, 0.2, 0.2}, {0.7, 0.5, 0.2, 0.2}});
  // The second-newest weight is omega^-0.225 relative to the newest.
  EXPECT_NEAR(fuse_location(w, fusion_weights(1e40, 5)).cx, 0.7, 1e-6);
}

TEST(FuseLocation, ConstantWindowIsFixedPoint)
{
  const BBox b{0.3, 0.6, 0.12, 0.08};
  const auto w = window_of({b, b, b, b, b});
  const BBox f = fuse_location(w, fusion_weights(10.0, 5));
  EXPECT_NEAR(f.cx, b.cx, 1e-15);
  EXPECT_NEAR(f.h, b.h, 1e-15);
}

TEST(RefineStream, OnlyShortTrackletsYieldsEmptyStream)
{
  const auto out = refine_stream(object_on_frames(30, frame_range(0, 9)), {}, {});
  EXPECT_EQ(out.box_count(), 0u);
}

TEST(RefineStream, LostTrackletIsNotPromotedByElapsedTime)
{
  // S_dur passes the threshold during the gap, but no measurement arrives to promote it.
  const auto out = refine_stream(object_on_frames(30, frame_range(0, 4)), {}, {});
  EXPECT_EQ(out.box_count(), 0u);
}

TEST(RefineStream, EmissionStartsAtFirstReliableFrame)
{
  const auto out = refine_stream(object_on_frames(30, frame_range(0, 29)), {}, {});
  for (int f = 0; f < 10; ++f) {
    EXPECT_TRUE(out.frames[static_cast<std::size_t>(f)].empty());
  }
  for (int f = 10; f < 30; ++f) {
    ASSERT_EQ(out.frames[static_cast<std::size_t>(f)].size(), 1u);
    EXPECT_EQ(out.frames[static_cast<std::size_t>(f)][0].detection.frame, f);
  }
}

TEST(RefineStream, RetroModeReleasesWithheldBoxes)
{
  RefinerConfig cfg;
  cfg.emit_mode = EmitMode::offline_retroemit;
  const auto out = refine_stream(object_on_frames(30, frame_range(0, 29)), {}, cfg);
  EXPECT_EQ(out.box_count(), 30u);
  for (int f = 0; f < 30; ++f) {
    ASSERT_EQ(out.frames[static_cast<std::size_t>(f)].size(), 1u);
  }
}

TEST(RefineStream, GapIsFilledOnTheLine)
{
  // cx moves 0.005/frame; frames 14 and 15 are missing.
  std::vector<Detection> dets;
  for (int f : without(frame_range(0, 29), {14, 15})) {
    dets.push_back(det(f, 0.2 + 0.005 * f, 0.5, 0.2, 0.2, 0.8, 3));
  }
  const auto seq = VideoSequence::from_detections("v", 30, dets);
  const auto out = refine_stream(seq, {}, {});
  for (int f : {14, 15}) {
    const auto& fr = out.frames[static_cast<std::size_t>(f)];
    ASSERT_EQ(fr.size(), 1u);
    EXPECT_TRUE(fr[0].interpolated);
    EXPECT_NEAR(fr[0].detection.box.cx, 0.2 + 0.005 * f, 1e-12);
    EXPECT_EQ(fr[0].detection.class_id, 3);
    EXPECT_EQ(fr[0].detection.score, 0.8);
    EXPECT_EQ(fr[0].detection.frame, f);
  }
  // Matched boxes on a line fuse back onto the line.
  EXPECT_NEAR(out.frames[20][0].detection.box.cx, 0.2 + 0.005 * 20 - 0.005 * (0.26037 + 2 * 0.15509 + 3 * 0.09238 + 4 * 0.05503), 1e-4);
}

TEST(RefineStream, RefinedStreamHasNoFragments)
{
  auto frames = without(frame_range(0, 59), {20, 21, 22, 40});
  const auto out = refine_stream(object_on_frames(60, frames), {}, {});
  const auto ts = associate(out.sequence(), {});
  ASSERT_EQ(ts.size(), 1u);
  const auto f = fragment_errors(ts);
  EXPECT_EQ(f.tfe, 0.0);
  EXPECT_EQ(f.ftr, 0.0);
}

TEST(RefineStream, DeadTrackletStopsEmitting)
{
  const auto out = refine_stream(object_on_frames(60, frame_range(0, 19)), {}, {});
  // Fills run for frames 20..29 while S_lost <= 10; the tracklet dies at frame 30.
  for (int f = 20; f < 30; ++f) {
    ASSERT_EQ(out.frames[static_cast<std::size_t>(f)].size(), 1u);
    EXPECT_TRUE(out.frames[static_cast<std::size_t>(f)][0].interpolated);
  }
  for (int f = 30; f < 60; ++f) {
    EXPECT_TRUE(out.frames[static_cast<std::size_t>(f)].empty());
  }
}

TEST(OnlineRefiner, WindowHoldsRawMeasurements)
{
  OnlineRefiner r({}, {});
  for (int f = 0; f < 7; ++f) {
    r.step({f, {det(f, 0.1 + 0.01 * f, 0.5, 0.2, 0.2)}});
  }
  const auto* w = r.window(0);
  ASSERT_NE(w, nullptr);
  ASSERT_EQ(w->size(), 5u);
  EXPECT_NEAR(w->back().box.cx, 0.16, 1e-15);
  EXPECT_NEAR(w->front().box.cx, 0.12, 1e-15);
}

TEST(RefinerConfig, RejectsInvalidValues)
{
  RefinerConfig c;
  c.omega = 0.5;
  EXPECT_THROW(c.validate(), InvariantError);
  c = {};
  c.reliable_after = 0;
  EXPECT_THROW(OnlineRefiner({}, c), InvariantError);
}
