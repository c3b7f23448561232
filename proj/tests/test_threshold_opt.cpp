#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "oracles.hpp"
#include "testutil.hpp"
#include "threshold_opt.hpp"

using namespace doclab;
using testutil::Rng;

namespace {

Detection det(std::int64_t img, int cls, BoundingBox box, double score) {
  Detection d;
  d.image_id = img;
  d.category = category_from_id(cls);
  d.box = box;
  d.score = score;
  return d;
}

GroundTruthInstance gt(std::int64_t img, int cls, BoundingBox box, bool ignored = false) {
  GroundTruthInstance g;
  g.image_id = img;
  g.category = category_from_id(cls);
  g.box = box;
  g.ignored = ignored;
  return g;
}

DatasetSplit one_image_split(std::vector<GroundTruthInstance> gts) {
  DatasetSplit split;
  ImageRecord img;
  img.id = 1;
  img.width = 100;
  img.height = 100;
  split.images.push_back(img);
  split.annotations = std::move(gts);
  split.label = SplitLabel::validation;
  return split;
}

}  // namespace

TEST_CASE("sweep_class on a hand-worked example") {
  // hits at 0.9 and 0.4, a miss at 0.6, two GT boxes
  const std::vector<GroundTruthInstance> gts{
      gt(1, 0, {0, 0, 10, 10}),
      gt(1, 0, {50, 50, 10, 10}),
  };
  const std::vector<Detection> dets{
      det(1, 0, {0, 0, 10, 10}, 0.9),
      det(1, 0, {80, 80, 10, 10}, 0.6),
      det(1, 0, {50, 50, 10, 10}, 0.4),
  };
  const auto r = sweep_class(dets, gts, LayoutCategory::paragraph_title, 0.5);
  // candidates: 0, 0.4, 0.6, 0.9, 1
  REQUIRE(r.trace.size() == 5);
  CHECK(r.trace[0].threshold == 0.0);
  CHECK(r.trace[1].threshold == 0.4);
  CHECK(r.trace[2].threshold == 0.6);
  CHECK(r.trace[3].threshold == 0.9);
  CHECK(r.trace[4].threshold == 1.0);
  // F1 per candidate: keep-all 2TP 1FP -> 0.8; above 0.4 -> 1TP 1FP 1FN -> 0.5;
  // above 0.6 -> 1TP 0FP 1FN -> 2/3; above 0.9 -> nothing -> 0
  CHECK(r.trace[0].f1_score == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.trace[1].f1_score == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.trace[2].f1_score == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.trace[3].f1_score == 0.0);
  CHECK(r.trace[4].f1_score == 0.0);
  CHECK(r.best_threshold == 0.0);
  CHECK(r.best_f1 == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("sweep_class keeps a single perfect detection at cutoff zero") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10})};
  const std::vector<Detection> dets{det(1, 0, {0, 0, 10, 10}, 0.9)};
  const auto r = sweep_class(dets, gts, LayoutCategory::paragraph_title, 0.5);
  CHECK(r.best_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.best_threshold == 0.0);
}

TEST_CASE("sweep_class resolves an all-tie sweep to the largest candidate") {
  // one false positive only: every cutoff scores F1 = 0, so prefer 1.0
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10})};
  const std::vector<Detection> dets{det(1, 0, {80, 80, 10, 10}, 0.5)};
  const auto r = sweep_class(dets, gts, LayoutCategory::paragraph_title, 0.5);
  CHECK(r.best_f1 == 0.0);
  CHECK(r.best_threshold == 1.0);
}

TEST_CASE("sweep_class refuses a class with no real ground truth") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10}, true)};
  const std::vector<Detection> dets{det(1, 0, {0, 0, 10, 10}, 0.9)};
  try {
    sweep_class(dets, gts, LayoutCategory::paragraph_title, 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_ground_truth);
  }
}

TEST_CASE("sweep optimum matches a dense-grid search exactly") {
  Rng rng(9001);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    auto inst = testutil::random_instance(rng, 8, 5, 3);
    for (int cls = 0; cls < kCategoryCount; ++cls) {
      const bool has_real = std::any_of(
          inst.split.annotations.begin(), inst.split.annotations.end(),
          [&](const GroundTruthInstance& g) {
            return category_id(g.category) == cls && !g.ignored;
          });
      if (!has_real) continue;
      const auto r = sweep_class(inst.dets, inst.split.annotations,
                                 category_from_id(cls), 0.5);
      const double grid_best =
          oracle::grid_max_f1(inst.dets, inst.split.annotations, category_from_id(cls), 0.5);
      CHECK(r.best_f1 == grid_best);  // exact: scores are 1/1000 multiples
      ++checked;
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("sweep trace ascends and the chosen threshold is the largest argmax") {
  Rng rng(555);
  for (int round = 0; round < 50; ++round) {
    auto inst = testutil::random_instance(rng, 8, 5, 3);
    for (int cls = 0; cls < kCategoryCount; ++cls) {
      const bool has_real = std::any_of(
          inst.split.annotations.begin(), inst.split.annotations.end(),
          [&](const GroundTruthInstance& g) {
            return category_id(g.category) == cls && !g.ignored;
          });
      if (!has_real) continue;
      const auto r = sweep_class(inst.dets, inst.split.annotations,
                                 category_from_id(cls), 0.5);
      REQUIRE(!r.trace.empty());
      double largest_argmax = r.trace.front().threshold;
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        if (i > 0) CHECK(r.trace[i].threshold > r.trace[i - 1].threshold);
        CHECK(r.trace[i].f1_score <= r.best_f1);
        if (r.trace[i].f1_score == r.best_f1) largest_argmax = r.trace[i].threshold;
      }
      CHECK(r.best_threshold == largest_argmax);
    }
  }
}

TEST_CASE("optimize_all fills untestable classes with the fallback and says so") {
  auto split = one_image_split({gt(1, 2, {0, 0, 10, 10})});
  const std::vector<Detection> dets{det(1, 2, {0, 0, 10, 10}, 0.7)};
  const auto table = optimize_all(dets, split, 0.5, 0.25);
  CHECK(table.values[2] == 0.0);  // perfect detection, keep everything
  for (int cls = 0; cls < kCategoryCount; ++cls) {
    if (cls == 2) continue;
    CHECK(table.values[cls] == 0.25);
  }
  CHECK(table.provenance.find("fallback") != std::string::npos);
  CHECK(table.provenance.find("image") != std::string::npos);
  CHECK(table.provenance.find(",text,") == std::string::npos);  // class 2 was optimized
}

TEST_CASE("optimize_all without any gaps reports plain provenance") {
  DatasetSplit split;
  ImageRecord img;
  img.id = 1;
  img.width = 100;
  img.height = 100;
  split.images.push_back(img);
  std::vector<Detection> dets;
  for (int cls = 0; cls < kCategoryCount; ++cls) {
    BoundingBox b{double(cls % 5) * 20.0, double(cls / 5) * 20.0, 10, 10};
    split.annotations.push_back(gt(1, cls, b));
    dets.push_back(det(1, cls, b, 0.9));
  }
  split.label = SplitLabel::validation;
  const auto table = optimize_all(dets, split, 0.5, 0.5);
  CHECK(table.provenance == "optimized");
  for (int cls = 0; cls < kCategoryCount; ++cls) CHECK(table.values[cls] == 0.0);
}

TEST_CASE("optimize_all rejects an empty split") {
  DatasetSplit empty;
  empty.label = SplitLabel::validation;
  try {
    optimize_all({}, empty, 0.5, 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_dataset);
  }
}

TEST_CASE("optimize_all is independent of the worker count") {
  Rng rng(777);
  for (int round = 0; round < 10; ++round) {
    auto inst = testutil::random_instance(rng, 20, 12, 8, 3);
    const auto a = optimize_all(inst.dets, inst.split, 0.5, 0.5, 1);
    const auto b = optimize_all(inst.dets, inst.split, 0.5, 0.5, 4);
    CHECK(a == b);
    CHECK(a.provenance == b.provenance);
  }
}

TEST_CASE("sweep_trace_csv emits a header and one row per candidate") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10})};
  const std::vector<Detection> dets{det(1, 0, {0, 0, 10, 10}, 0.5)};
  const auto r = sweep_class(dets, gts, LayoutCategory::paragraph_title, 0.5);
  const auto csv = sweep_trace_csv(r);
  CHECK(csv.rfind("threshold,precision,recall,f1\n", 0) == 0);
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(static_cast<std::size_t>(rows) == r.trace.size() + 1);
  CHECK(csv.back() == '\n');
}
