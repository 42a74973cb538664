#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "tempo/associate.hpp"
#include "test_support.hpp"

using namespace tempo;
using tempo::testing::det;
using tempo::testing::frame_range;
using tempo::testing::object_on_frames;

namespace
{

// Exhaustive reference: repeatedly take the best remaining pair, ties by lower column then row.
std::vector<std::pair<std::size_t, std::size_t>> brute_force_greedy(std::vector<std::vector<double>> m,
                                                                    double threshold)
{
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (;;) {
    double best = -1.0;
    std::size_t br = 0;
    std::size_t bc = 0;
    for (std::size_t c = 0; c < (m.empty() ? 0 : m[0].size()); ++c) {
      for (std::size_t r = 0; r < m.size(); ++r) {
        if (m[r][c] > best) {
          best = m[r][c];
          br = r;
          bc = c;
        }
      }
    }
    if (best < threshold || best <= 0.0) {
      break;
    }
    out.emplace_back(br, bc);
    for (auto& v : m[br]) {
      v = -1.0;
    }
    for (auto& row : m) {
      row[bc] = -1.0;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST(GreedyMatch, TakesGlobalMaximumFirst)
{
  const auto pairs = greedy_match({{0.9, 0.4}, {0.4, 0.8}}, 0.3);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(pairs[1], std::make_pair(std::size_t{1}, std::size_t{1}));
}

TEST(GreedyMatch, GreedyIsNotOptimal)
{
  // Hungarian would pick (0,1),(1,0) for total 1.4; greedy takes 0.9 first.
  const auto pairs = greedy_match({{0.9, 0.7}, {0.7, 0.0}}, 0.3);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], std::make_pair(std::size_t{0}, std::size_t{0}));
}

TEST(GreedyMatch, RespectsThreshold)
{
  EXPECT_TRUE(greedy_match({{0.29}}, 0.3).empty());
  EXPECT_EQ(greedy_match({{0.3}}, 0.3).size(), 1u);
  EXPECT_TRUE(greedy_match({{0.0}}, 0.0).empty());
  EXPECT_TRUE(greedy_match({}, 0.3).empty());
}

TEST(GreedyMatch, AgreesWithBruteForce)
{
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = rng.uniform_int(0, 6);
    const int cols = rng.uniform_int(0, 6);
    std::vector<std::vector<double>> m(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(cols)));
    for (auto& row : m) {
      for (auto& v : row) {
        // Coarse values force plenty of ties.
        v = rng.uniform_int(0, 5) / 5.0;
      }
    }
    EXPECT_EQ(greedy_match(m, 0.3), brute_force_greedy(m, 0.3));
  }
}

TEST(Associator, StartsTracksAndMatchesOverlaps)
{
  Associator a;
  auto r0 = a.step({0, {det(0, 0.3, 0.3, 0.2, 0.2), det(0, 0.7, 0.7, 0.2, 0.2)}});
  EXPECT_EQ(r0.spawned.size(), 2u);
  auto r1 = a.step({1, {det(1, 0.31, 0.3, 0.2, 0.2), det(1, 0.71, 0.7, 0.2, 0.2)}});
  EXPECT_TRUE(r1.spawned.empty());
  EXPECT_EQ(r1.matched.size(), 2u);
  for (const auto& t : a.active()) {
    EXPECT_EQ(t.duration, 2);
    EXPECT_EQ(t.length(), 2);
  }
}

TEST(Associator, ScoreBelowThresholdIsIgnored)
{
  Associator a;
  auto r = a.step({0, {det(0, 0.5, 0.5, 0.2, 0.2, 0.49)}});
  EXPECT_TRUE(r.spawned.empty());
  EXPECT_TRUE(a.active().empty());
}

TEST(Associator, DifferentClassesNeverMatch)
{
  Associator a;
  a.step({0, {det(0, 0.5, 0.5, 0.2, 0.2, 0.9, 1)}});
  auto r = a.step({1, {det(1, 0.5, 0.5, 0.2, 0.2, 0.9, 2)}});
  EXPECT_EQ(r.spawned.size(), 1u);
  EXPECT_EQ(r.lost.size(), 1u);
}

TEST(Associator, RejectsNonConsecutiveFrames)
{
  Associator a;
  a.step({0, {}});
  EXPECT_THROW(a.step({2, {}}), SequencingError);
}

TEST(Associator, LostCounterAndDurationGrowDuringGap)
{
  Associator a;
  a.step({0, {det(0, 0.5, 0.5, 0.2, 0.2)}});
  a.step({1, {}});
  a.step({2, {}});
  ASSERT_EQ(a.active().size(), 1u);
  EXPECT_EQ(a.active()[0].lost, 2);
  EXPECT_EQ(a.active()[0].duration, 3);
  EXPECT_EQ(a.active()[0].length(), 1);
}

TEST(Associate, ShortGapYieldsOneTrackletWithMisses)
{
  auto frames = frame_range(0, 4);
  for (int f : frame_range(7, 9)) {
    frames.push_back(f);
  }
  const auto ts = associate(object_on_frames(10, frames), {});
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].length(), 10);
  EXPECT_EQ(ts[0].misses, 2);
  EXPECT_FALSE(ts[0].history[5].has_value());
  EXPECT_FALSE(ts[0].history[6].has_value());
}

TEST(Associate, ContinuousTrackHasNoMisses)
{
  const auto ts = associate(object_on_frames(30, frame_range(0, 29)), {});
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].misses, 0);
  EXPECT_EQ(ts[0].length(), 30);
}

TEST(Associate, GapEqualToMaxLostKeepsIdentity)
{
  auto frames = frame_range(0, 4);
  for (int f : frame_range(15, 19)) {
    frames.push_back(f);
  }
  const auto ts = associate(object_on_frames(20, frames), {});
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].misses, 10);
}

TEST(Associate, GapBeyondMaxLostSplitsIdentity)
{
  auto frames = frame_range(0, 4);
  for (int f : frame_range(16, 20)) {
    frames.push_back(f);
  }
  const auto ts = associate(object_on_frames(21, frames), {});
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].length(), 5);
  EXPECT_EQ(ts[1].first_frame, 16);
  EXPECT_EQ(ts[0].misses + ts[1].misses, 0);
}

TEST(Associate, TrailingLossIsNotCountedAsMiss)
{
  const auto ts = associate(object_on_frames(20, frame_range(0, 4)), {});
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].length(), 5);
  EXPECT_EQ(ts[0].misses, 0);
}

TEST(Associate, InvariantsOnRandomStreams)
{
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    std::vector<Detection> dets;
    const int t_v = 40;
    for (int f = 0; f < t_v; ++f) {
      const int n = rng.uniform_int(0, 6);
      for (int i = 0; i < n; ++i) {
        dets.push_back({f, rng.uniform_int(0, 1), rng.uniform(0.3, 1.0),
                        {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.1, 0.3), rng.uniform(0.1, 0.3)}});
      }
    }
    const auto seq = VideoSequence::from_detections("v", t_v, dets);
    const auto ts = associate(seq, {});

    std::size_t matched = 0;
    for (const auto& t : ts) {
      ASSERT_EQ(static_cast<int>(t.history.size()), t.length());
      ASSERT_TRUE(t.history.front().has_value());
      ASSERT_TRUE(t.history.back().has_value());
      int om = 0;
      for (std::size_t i = 0; i < t.history.size(); ++i) {
        if (!t.history[i]) {
          ++om;
          continue;
        }
        ++matched;
        EXPECT_EQ(t.history[i]->frame, t.first_frame + static_cast<int>(i));
        EXPECT_EQ(t.history[i]->class_id, t.class_id);
      }
      EXPECT_EQ(om, t.misses);
      EXPECT_LE(t.length(), t_v);
    }
    std::size_t eligible = 0;
    for (const auto& d : dets) {
      eligible += d.score >= 0.5;
    }
    // Every detection above threshold lands in exactly one tracklet.
    EXPECT_EQ(matched, eligible);

    // Shuffling detections within frames does not change the result.
    auto shuffled = seq;
    for (auto& fr : shuffled.frames) {
      std::reverse(fr.detections.begin(), fr.detections.end());
    }
    const auto ts2 = associate(shuffled, {});
    ASSERT_EQ(ts2.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      EXPECT_EQ(ts2[i].first_frame, ts[i].first_frame);
      EXPECT_EQ(ts2[i].length(), ts[i].length());
      EXPECT_EQ(ts2[i].misses, ts[i].misses);
      for (std::size_t k = 0; k < ts[i].history.size(); ++k) {
        EXPECT_EQ(ts2[i].history[k].has_value(), ts[i].history[k].has_value());
        if (ts[i].history[k]) {
          EXPECT_EQ(ts2[i].history[k]->box, ts[i].history[k]->box);
        }
      }
    }
  }
}

TEST(AssociatorConfig, RejectsInvalidValues)
{
  AssociatorConfig c;
  c.max_lost = 0;
  EXPECT_THROW(c.validate(), InvariantError);
  c = {};
  c.iou_threshold = 1.5;
  EXPECT_THROW(Associator{c}, InvariantError);
}
