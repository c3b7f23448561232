#include "doctest.h"

#include "errors.hpp"
#include "matching.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace doclab;

namespace {

Detection det(ImageId image, int cat, BoundingBox box, double score) {
  Detection d;
  d.image_id = image;
  d.category = category_from_id(cat);
  d.box = box;
  d.score = score;
  return d;
}

GroundTruthInstance gt(ImageId image, int cat, BoundingBox box, bool ignored = false) {
  GroundTruthInstance g;
  g.image_id = image;
  g.category = category_from_id(cat);
  g.box = box;
  g.ignored = ignored;
  return g;
}

}  // namespace

TEST_CASE("iou basics") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {10, 0, 10, 10}) == 0.0);  // touching edges
  CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);  // zero-area union
}

TEST_CASE("iou agrees with the re-derivation on random boxes") {
  testutil::Rng rng(101);
  for (int i = 0; i < 300; ++i) {
    const BoundingBox a = rng.box(), b = rng.box();
    const double v = iou(a, b);
    CHECK(v == oracle::iou(a, b));
    CHECK(v == iou(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("greedy matching: single pairs") {
  const std::vector<GroundTruthInstance> gts{gt(1, 2, {0, 0, 10, 10})};

  auto hit = greedy_match(std::vector<Detection>{det(1, 2, {1, 1, 10, 10}, 0.9)}, gts, 0.5);
  CHECK(hit.tp == 1);
  CHECK(hit.fp == 0);
  CHECK(hit.fn == 0);
  CHECK(hit.detection_flags[0] == DetectionFlag::true_positive);
  CHECK(hit.gt_flags[0] == GtFlag::matched);

  auto miss = greedy_match(std::vector<Detection>{det(1, 2, {50, 50, 10, 10}, 0.9)}, gts, 0.5);
  CHECK(miss.tp == 0);
  CHECK(miss.fp == 1);
  CHECK(miss.fn == 1);

  auto wrong_class = greedy_match(std::vector<Detection>{det(1, 3, {0, 0, 10, 10}, 0.9)}, gts, 0.5);
  CHECK(wrong_class.fp == 1);
  CHECK(wrong_class.fn == 1);
}

TEST_CASE("greedy matching: score priority and one-to-one consumption") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10})};
  const std::vector<Detection> dets{
      det(1, 0, {1, 0, 10, 10}, 0.3),
      det(1, 0, {2, 0, 10, 10}, 0.8),  // higher score claims the box first
  };
  const auto m = greedy_match(dets, gts, 0.3);
  CHECK(m.detection_flags[1] == DetectionFlag::true_positive);
  CHECK(m.detection_flags[0] == DetectionFlag::false_positive);
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);
}

TEST_CASE("greedy matching: ignore regions absorb but are never consumed") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10}, true)};
  const std::vector<Detection> dets{
      det(1, 0, {0, 0, 10, 10}, 0.9),
      det(1, 0, {1, 0, 10, 10}, 0.8),
  };
  const auto m = greedy_match(dets, gts, 0.5);
  CHECK(m.detection_flags[0] == DetectionFlag::ignored);
  CHECK(m.detection_flags[1] == DetectionFlag::ignored);
  CHECK(m.tp == 0);
  CHECK(m.fp == 0);
  CHECK(m.fn == 0);
  CHECK(m.ignored_detections == 2);
}

TEST_CASE("greedy matching: equal overlap prefers the real box over an ignore region") {
  // the ignored twin sits at the same spot as the real one, so both have IoU 1
  const std::vector<Detection> d1{det(1, 0, {0, 0, 10, 10}, 0.9)};
  const std::vector<GroundTruthInstance> twins{
      gt(1, 0, {0, 0, 10, 10}, true),
      gt(1, 0, {0, 0, 10, 10}, false),
  };
  const auto m = greedy_match(d1, twins, 0.5);
  CHECK(m.detection_flags[0] == DetectionFlag::true_positive);
  CHECK(m.gt_flags[1] == GtFlag::matched);
  CHECK(m.gt_flags[0] == GtFlag::ignored);
}

TEST_CASE("greedy matching rejects mixed images") {
  const std::vector<GroundTruthInstance> gts{gt(1, 0, {0, 0, 10, 10})};
  const std::vector<Detection> dets{det(2, 0, {0, 0, 10, 10}, 0.5)};
  CHECK_THROWS_AS(greedy_match(dets, gts, 0.5), Error);
  try {
    greedy_match(dets, gts, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::mixed_image);
  }
}

TEST_CASE("greedy matching agrees with the oracle on random single-image instances") {
  testutil::Rng rng(555);
  for (int iter = 0; iter < 300; ++iter) {
    auto inst = testutil::random_instance(rng, 8, 6, 3, 1);
    for (int cat = 0; cat < 3; ++cat) {
      const auto cls = category_from_id(cat);
      std::vector<Detection> class_dets;
      for (const auto& d : inst.dets)
        if (d.category == cls) class_dets.push_back(d);
      std::vector<GroundTruthInstance> class_gts;
      for (const auto& g : inst.gts)
        if (g.category == cls) class_gts.push_back(g);
      if (class_dets.empty() && class_gts.empty()) continue;
      const auto m = greedy_match(class_dets, class_gts, 0.5);
      const auto o = oracle::match_class(class_dets, class_gts, cls, 0.5);
      long tp = 0, fp = 0, ign = 0;
      for (size_t k = 0; k < o.order.size(); ++k) {
        const auto flag = m.detection_flags[o.order[k]];
        switch (o.flags[k]) {
          case oracle::Flag::tp: CHECK(flag == DetectionFlag::true_positive); ++tp; break;
          case oracle::Flag::fp: CHECK(flag == DetectionFlag::false_positive); ++fp; break;
          case oracle::Flag::ignored: CHECK(flag == DetectionFlag::ignored); ++ign; break;
        }
      }
      CHECK(m.tp == tp);
      CHECK(m.fp == fp);
      CHECK(m.ignored_detections == ign);
      CHECK(m.fn == o.npos - tp);
      // greedy can never beat the best possible assignment
      CHECK(m.tp <= oracle::max_bipartite(class_dets, class_gts, cls, 0.5));
    }
  }
}

TEST_CASE("classwise nms") {
  const std::vector<Detection> dets{
      det(1, 0, {0, 0, 10, 10}, 0.9),
      det(1, 0, {1, 1, 10, 10}, 0.8),   // overlaps the first, same class: suppressed
      det(1, 1, {1, 1, 10, 10}, 0.7),   // other class: kept
      det(2, 0, {1, 1, 10, 10}, 0.6),   // other image: kept
      det(1, 0, {50, 50, 10, 10}, 0.5), // far away: kept
  };
  const auto kept = classwise_nms(dets, 0.5);
  REQUIRE(kept.size() == 4);
  CHECK(kept[0] == dets[0]);
  CHECK(kept[1] == dets[2]);
  CHECK(kept[2] == dets[3]);
  CHECK(kept[3] == dets[4]);

  // running it again changes nothing
  CHECK(classwise_nms(kept, 0.5) == kept);
}

TEST_CASE("nms keeps pairwise overlaps below the threshold") {
  testutil::Rng rng(808);
  for (int iter = 0; iter < 100; ++iter) {
    const auto inst = testutil::random_instance(rng, 12, 4, 2, 2);
    const auto kept = classwise_nms(inst.dets, 0.5);
    CHECK(kept.size() <= inst.dets.size());
    for (size_t i = 0; i < kept.size(); ++i)
      for (size_t j = i + 1; j < kept.size(); ++j) {
        if (kept[i].image_id != kept[j].image_id) continue;
        if (kept[i].category != kept[j].category) continue;
        CHECK(iou(kept[i].box, kept[j].box) < 0.5);
      }
    CHECK(classwise_nms(kept, 0.5) == kept);
  }
}

TEST_CASE("score_order is stable for tied scores") {
  const std::vector<Detection> dets{
      det(1, 0, {0, 0, 1, 1}, 0.5),
      det(1, 0, {1, 0, 1, 1}, 0.9),
      det(1, 0, {2, 0, 1, 1}, 0.5),
  };
  const auto order = score_order(dets);
  REQUIRE(order.size() == 3);
  CHECK(order[0] == 1);
  CHECK(order[1] == 0);
  CHECK(order[2] == 2);
}
