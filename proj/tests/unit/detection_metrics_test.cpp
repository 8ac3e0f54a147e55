/* Copyright 2026 The fhop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "doctest.h"
#include "fhop/detection_metrics.hpp"
#include "fhop/error.hpp"
#include "fhop/skip_trace.hpp"
#include "reference.hpp"
#include "test_util.hpp"

using namespace fhop;
using testing::code_of;
using testing::det;

TEST_CASE("iou") {
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {2, 2, 3, 3}) == 0.0);
  CHECK(iou({0, 0, 2, 2}, {1, 0, 3, 2}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(iou({0, 0, 1, 1}, {1, 0, 2, 1}) == 0.0);  // touching edges
}

TEST_CASE("iou is symmetric, bounded and 1 only for identical boxes") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::random_set(rng, 1);
    const auto b = testing::random_set(rng, 1);
    if (a.empty() || b.empty()) continue;
    const double ab = iou(a[0].bbox, b[0].bbox);
    CHECK(ab == iou(b[0].bbox, a[0].bbox));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK((ab == 1.0) == (a[0].bbox == b[0].bbox));
  }
}

TEST_CASE("matching") {
  const DetectionSet one{det(0, 0, 2, 2)};
  CHECK(match_detections(one, one).hits == 1);
  CHECK(match_detections(one, {det(0, 0, 2, 2, "person")}).hits == 0);

  SUBCASE("greedy takes the highest iou first") {
    const DetectionSet r{det(0, 0, 10, 10), det(20, 0, 30, 10)};
    const DetectionSet o{det(0, 0, 10, 9),              // iou with r0: 0.9
                         det(16, 0, 26, 10)};           // with r1: 6/14
    const MatchResult m = match_detections(r, o, 0.4);
    REQUIRE(m.hits == 2);
    CHECK(m.pairs[0].ref == 0);
    CHECK(m.pairs[0].other == 0);
    CHECK(m.pairs[0].iou == doctest::Approx(0.9));
    CHECK(m.pairs[1].ref == 1);
    CHECK(m.pairs[1].other == 1);
  }
  SUBCASE("threshold is inclusive and validated") {
    CHECK(match_detections({det(0, 0, 2, 2)}, {det(1, 0, 3, 2)}, 1.0 / 3).hits == 1);
    CHECK(code_of([] { match_detections({}, {}, 0.0); }) == ErrorCode::kValidation);
    CHECK(code_of([] { match_detections({}, {}, 1.5); }) == ErrorCode::kValidation);
  }
}

TEST_CASE("greedy example with overlaps 0.9, 0.6 and 0.7") {
  // Boxes on a line: A = [0,10], first = [0,9] (0.9), second = [x,x+w] chosen
  // so A-second = 0.6 and B-second = 0.7.
  const Detection a = det(0, 0, 10, 1);
  const Detection first = det(0, 0, 9, 1);
  const Detection second = det(2.5, 0, 10, 1);  // inter 7.5, union 10 -> 0.75
  const Detection b = det(2.5, 0, 9.5, 1);      // with second: inter 7, union 7.5
  const DetectionSet ref{a, b};
  const DetectionSet other{first, second};
  const MatchResult m = match_detections(ref, other);
  CHECK(m.hits == 2);
  CHECK(m.hits == reference::max_hits(ref, other, 0.5));
  for (const MatchPair& p : m.pairs) CHECK(p.iou >= 0.5);
}

TEST_CASE("f1 conventions") {
  const DetectionSet two{det(0, 0, 1, 1), det(5, 5, 6, 6)};
  const DetectionSet half{det(0, 0, 1, 1), det(8, 8, 9, 9)};
  CHECK(f1_score(two, two) == 1.0);
  CHECK(f1_score(two, half) == 0.5);
  CHECK(f1_score({}, {}) == 1.0);
  CHECK(f1_score(two, {}) == 0.0);
  CHECK(f1_score({}, two) == 0.0);
  CHECK(f1_score({det(0, 0, 1, 1)}, {det(3, 3, 4, 4)}) == 0.0);
}

TEST_CASE("frame distance and skip error") {
  const DetectionSet a{det(0, 0, 1, 1), det(5, 5, 6, 6)};
  const DetectionSet b{det(0, 0, 1, 1), det(8, 8, 9, 9)};
  const DetectionSet c{det(20, 20, 21, 21, "z")};
  const DetectionLog log({a, a, b, c, a, a});
  CHECK(frame_distance(log, 2, 2) == 0.0);
  CHECK(frame_distance(log, 0, 3) == 1.0);
  CHECK(frame_distance(log, 0, 2) == 0.5);
  CHECK(skip_error(log, 0, 0) == 0.0);
  CHECK(skip_error(log, 0, 3) == 1.5);
  CHECK(code_of([&] { skip_error(log, 3, 3); }) == ErrorCode::kRange);
  CHECK(code_of([&] { frame_distance(log, 0, 6); }) == ErrorCode::kRange);

  const DetectionLog still(std::vector<DetectionSet>(10, a));
  CHECK(skip_error(still, 0, 5) == 0.0);
}

TEST_CASE("count accuracy") {
  const DetectionSet two{det(0, 0, 1, 1), det(2, 2, 3, 3)};
  const DetectionSet four{det(0, 0, 1, 1), det(2, 2, 3, 3), det(4, 4, 5, 5), det(6, 6, 7, 7)};
  const DetectionLog log({two, four});
  CHECK(count_accuracy(log, SkipTrace({{0, 1}}, 2)) == 0.75);
  CHECK(count_accuracy(log, SkipTrace({{0, 0}, {1, 0}}, 2)) == 1.0);
  const DetectionLog constant({two, two, two});
  CHECK(count_accuracy(constant, SkipTrace({{0, 2}}, 3)) == 1.0);
  CHECK(code_of([&] { count_accuracy(log, SkipTrace({{0, 2}}, 3)); }) == ErrorCode::kRange);
  const DetectionLog empty_then_one({{}, {det(0, 0, 1, 1)}});
  CHECK(count_accuracy(empty_then_one, SkipTrace({{0, 1}}, 2)) == 0.5);
}

TEST_CASE("properties over random detection sets") {
  Rng rng(99);
  for (int it = 0; it < 500; ++it) {
    const DetectionSet a = testing::random_set(rng, 5);
    const DetectionSet b = testing::random_set(rng, 5);
    const double thr = 0.3 + 0.4 * rng.uniform();
    CHECK(f1_score(a, b, thr) == doctest::Approx(f1_score(b, a, thr)).epsilon(1e-12));
    const MatchResult m = match_detections(a, b, thr);
    CHECK(m.hits == m.pairs.size());
    std::vector<int> used_a(a.size()), used_b(b.size());
    for (const MatchPair& p : m.pairs) {
      CHECK(++used_a[p.ref] == 1);
      CHECK(++used_b[p.other] == 1);
      CHECK(p.iou >= thr);
      CHECK(a[p.ref].class_label == b[p.other].class_label);
    }
    CHECK(m.hits <= reference::max_hits(a, b, thr));
    CHECK(m.hits == reference::greedy_hits(a, b, thr));
  }
}

TEST_CASE("skip error is non-decreasing in k and matches term-by-term sums") {
  Rng rng(3);
  for (int it = 0; it < 100; ++it) {
    const DetectionLog log = testing::random_log(rng, 15);
    const std::size_t i = rng.index(10);
    double prev = 0.0;
    for (std::size_t k = 0; i + k < log.size(); ++k) {
      const double e = skip_error(log, i, k);
      CHECK(e >= prev);
      CHECK(e == doctest::Approx(reference::skip_error(log, i, k, 0.5)).epsilon(1e-12));
      prev = e;
    }
    for (std::size_t t = 0; t < log.size(); ++t) CHECK(frame_distance(log, t, t) == 0.0);
  }
}
