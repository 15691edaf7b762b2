#include <gtest/gtest.h>

#include <random>

#include "qrsdwt/errors.hpp"
#include "qrsdwt/evaluation.hpp"
#include "support/oracles.hpp"
#include "support/synthetic_record.hpp"

namespace qrsdwt {
namespace {

using Beats = std::vector<std::int64_t>;

TEST(MatchBeats, Identity) {
  const Beats r{100, 460, 820};
  const auto m = match_beats(r, r, 360.0);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fn, 0u);
  EXPECT_EQ(m.fp, 0u);
}

TEST(MatchBeats, ToleranceEdge) {
  // 150 ms at 360 Hz is 54 samples.
  const Beats ref{1000};
  EXPECT_EQ(match_beats(Beats{1054}, ref, 360.0).tp, 1u);
  EXPECT_EQ(match_beats(Beats{1055}, ref, 360.0).tp, 0u);
  EXPECT_EQ(match_beats(Beats{946}, ref, 360.0).tp, 1u);
}

TEST(MatchBeats, NearestWins) {
  const auto m = match_beats(Beats{980, 1010}, Beats{1000}, 360.0);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].first, 1010);
  EXPECT_EQ(m.fp, 1u);
}

TEST(MatchBeats, EmptyInputs) {
  const auto none = match_beats(Beats{}, Beats{1, 2}, 360.0);
  EXPECT_EQ(none.fn, 2u);
  const auto extra = match_beats(Beats{1, 2}, Beats{}, 360.0);
  EXPECT_EQ(extra.fp, 2u);
}

TEST(MatchBeats, Unsorted) {
  EXPECT_THROW(match_beats(Beats{5, 1}, Beats{1}, 360.0), OrderingError);
  EXPECT_THROW(match_beats(Beats{1}, Beats{5, 1}, 360.0), OrderingError);
}

Beats random_beats(std::mt19937_64& rng, std::size_t n, std::int64_t min_gap) {
  std::uniform_int_distribution<std::int64_t> extra(0, 300);
  Beats out;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += min_gap + extra(rng);
    out.push_back(t);
  }
  return out;
}

Beats perturb(std::mt19937_64& rng, const Beats& ref, std::int64_t jitter, double drop, double spurious) {
  std::uniform_int_distribution<std::int64_t> j(-jitter, jitter);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Beats out;
  for (auto r : ref) {
    if (u(rng) >= drop) out.push_back(std::max<std::int64_t>(0, r + j(rng)));
    if (u(rng) < spurious) out.push_back(std::max<std::int64_t>(0, r + j(rng) * 2));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TEST(MatchBeats, CountIdentitiesAndTolerance) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ref = random_beats(rng, 1 + trial % 50, 72);
    const auto det = perturb(rng, ref, 70, 0.1, 0.2);
    const auto m = match_beats(det, ref, 360.0);
    EXPECT_EQ(m.tp + m.fn, ref.size());
    EXPECT_EQ(m.tp + m.fp, det.size());
    EXPECT_EQ(m.pairs.size(), m.tp);
    for (auto [d, r] : m.pairs) EXPECT_LE(std::llabs(d - r), 54);
  }
}

// With references at least 2*tol + 1 apart (the refractory period keeps real
// beats far apart), every detection can reach at most one reference and the
// greedy pass is optimal.
TEST(MatchBeats, OptimalWhenWindowsDisjoint) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ref = random_beats(rng, 1 + trial % 50, 109);
    const auto det = perturb(rng, ref, 80, 0.15, 0.3);
    const auto m = match_beats(det, ref, 360.0);
    EXPECT_EQ(m.tp, testing::max_bipartite_matching(det, ref, 54));
  }
}

// Greedy is not within 1 of optimal in general: each pair below costs one
// match (the first reference grabs the only detection the second can reach).
TEST(MatchBeats, GreedyCanLoseMoreThanOne) {
  const Beats ref{100, 160, 1100, 1160};
  const Beats det{50, 130, 1050, 1130};
  EXPECT_EQ(match_beats(det, ref, 360.0).tp, 2u);
  EXPECT_EQ(testing::max_bipartite_matching(det, ref, 54), 4u);
}

// References at least 250 ms apart with detections jittered by up to 2x the
// tolerance: measured worst gap is 1.
TEST(MatchBeats, WithinOneOfOptimalForSeparatedBeats) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto ref = random_beats(rng, 1 + trial % 50, 90);
    const auto det = perturb(rng, ref, 60 + 30 * (trial % 3), 0.1, 0.3);
    const auto tp = match_beats(det, ref, 360.0).tp;
    const auto opt = testing::max_bipartite_matching(det, ref, 54);
    ASSERT_LE(tp, opt);
    EXPECT_LE(opt - tp, 1u) << "trial " << trial;
  }
}

TEST(Sensitivity, Values) {
  EXPECT_EQ(format_percent(sensitivity(1535, 0)), "100.00");
  EXPECT_NEAR(sensitivity(1967, 60), 97.03, 0.01);
  EXPECT_EQ(format_percent(sensitivity(10936, 243)), "97.83");
  EXPECT_THROW(sensitivity(0, 0), UndefinedSensitivityError);
}

TEST(Sensitivity, MonotoneInTruePositives) {
  for (std::size_t fn = 0; fn < 20; ++fn)
    for (std::size_t tp = 0; tp < 50; ++tp) EXPECT_LT(sensitivity(tp, fn + 1), sensitivity(tp + 1, fn + 1));
}

TEST(FormatPercent, HalfUp) {
  EXPECT_EQ(format_percent(97.035), "97.04");
  EXPECT_EQ(format_percent(97.034), "97.03");
  EXPECT_EQ(format_percent(100.0), "100.00");
}

TEST(EvalReport, AggregateSumsCounts) {
  EvalReport rep;
  rep.rows.push_back({"a", 100, 90, 10, 5, 90.0, std::nullopt});
  rep.rows.push_back({"b", 50, 50, 0, 0, 100.0, std::nullopt});
  rep.rows.push_back({"c", 0, 0, 0, 0, 0.0, std::string("missing")});
  const auto agg = rep.aggregate();
  EXPECT_EQ(agg.tb, 150u);
  EXPECT_EQ(agg.tp, 140u);
  EXPECT_EQ(agg.fn, 10u);
  EXPECT_EQ(agg.fp, 5u);
  EXPECT_NEAR(agg.se, 100.0 * 140 / 150, 1e-12);
  EXPECT_NE(rep.to_table().find("missing"), std::string::npos);
}

TEST(SynthEcg, TenBeatsAtSixtyBpm) {
  SynthOptions o;
  o.heart_rate_bpm = 60;
  o.duration_s = 10;
  const auto ecg = synth_ecg(o);
  EXPECT_EQ(ecg.signal.size(), 3600u);
  ASSERT_EQ(ecg.beats.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(ecg.beats[k], 180 + 360 * static_cast<std::int64_t>(k));
  EXPECT_NEAR(ecg.signal.samples[180], 1.0, 1e-12);
}

TEST(SynthEcg, SeededDeterminism) {
  SynthOptions o;
  o.jitter_s = 0.1;
  o.noise_std_mv = 0.05;
  const auto a = synth_ecg(o);
  EXPECT_EQ(synth_ecg(o).signal.samples, a.signal.samples);
  o.seed = 2;
  EXPECT_NE(synth_ecg(o).beats, a.beats);
}

TEST(SynthEcg, DomainErrors) {
  auto with = [](auto mutate) {
    SynthOptions o;
    mutate(o);
    return o;
  };
  EXPECT_THROW(synth_ecg(with([](auto& o) { o.fs = 0; })), DomainError);
  EXPECT_THROW(synth_ecg(with([](auto& o) { o.qrs_width_s = 2.0; })), DomainError);
  EXPECT_THROW(synth_ecg(with([](auto& o) { o.jitter_s = 0.5; })), DomainError);
  EXPECT_THROW(synth_ecg(with([](auto& o) { o.noise_std_mv = -1; })), DomainError);
}

TEST(EvaluateRecord, SyntheticRecordOnDisk) {
  const auto dir = testing::fresh_temp_dir("eval");
  SynthOptions o;
  o.baseline_amplitude_mv = 1.0;
  o.noise_std_mv = 0.02;
  const auto ecg = testing::write_synthetic_record(dir, "syn", o);
  const auto row = evaluate_record(dir / "syn");
  EXPECT_FALSE(row.error.has_value());
  EXPECT_EQ(row.tb, ecg.beats.size());
  EXPECT_EQ(row.tp, ecg.beats.size());
  EXPECT_EQ(row.fp, 0u);
  EXPECT_DOUBLE_EQ(row.se, 100.0);

  const std::vector<std::filesystem::path> recs{dir / "syn", dir / "absent"};
  const auto rep = evaluate_records(recs);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_FALSE(rep.rows[0].error.has_value());
  ASSERT_TRUE(rep.rows[1].error.has_value());
  EXPECT_NE(rep.rows[1].error->find("absent"), std::string::npos);
  EXPECT_EQ(rep.aggregate().tb, ecg.beats.size());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace qrsdwt
