#include <doctest.h>

#include <cbtrack/box.hpp>

#include "oracles.hpp"

using cbtrack::Box;
using cbtrack::BufferScale;

TEST_CASE("iou on the canonical cases") {
  CHECK(cbtrack::iou(Box{0, 0, 10, 10}, Box{0, 0, 10, 10}) == 1.0);
  CHECK(cbtrack::iou(Box{0, 0, 10, 10}, Box{20, 20, 5, 5}) == 0.0);
  CHECK(cbtrack::iou(Box{0, 0, 10, 10}, Box{5, 0, 10, 10}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("buffered expansion keeps the center and scales the extent") {
  CHECK(cbtrack::buffered(Box{0, 0, 10, 10}, BufferScale(0.0)) == Box{0, 0, 10, 10});
  CHECK(cbtrack::buffered(Box{0, 0, 10, 10}, BufferScale(0.5)) == Box{-5, -5, 20, 20});
  CHECK(cbtrack::buffered(Box{10, 20, 4, 8}, BufferScale(1.0)) == Box{6, 12, 12, 24});

  const Box b{3.7, -2.1, 13.4, 9.2};
  const Box e = cbtrack::buffered(b, BufferScale(0.7));
  CHECK(e.center_x() == doctest::Approx(b.center_x()).epsilon(1e-12));
  CHECK(e.center_y() == doctest::Approx(b.center_y()).epsilon(1e-12));
}

TEST_CASE("biou bridges gaps and reduces to iou at zero scale") {
  CHECK(cbtrack::biou(Box{0, 0, 10, 10}, Box{15, 0, 10, 10}, BufferScale(0.0)) == 0.0);
  CHECK(cbtrack::biou(Box{0, 0, 10, 10}, Box{15, 0, 10, 10}, BufferScale(0.5)) ==
        doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(cbtrack::biou(Box{3, 4, 7, 9}, Box{3, 4, 7, 9}, BufferScale(2.5)) == 1.0);
}

TEST_CASE("giou matches the enclosing-hull formula") {
  CHECK(cbtrack::giou(Box{0, 0, 10, 10}, Box{0, 0, 10, 10}) == 1.0);
  CHECK(cbtrack::giou(Box{0, 0, 10, 10}, Box{20, 0, 10, 10}) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  // hull equals union, so giou collapses to iou
  CHECK(cbtrack::giou(Box{0, 0, 10, 10}, Box{5, 0, 10, 10}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("diou matches the center-distance formula") {
  CHECK(cbtrack::diou(Box{0, 0, 10, 10}, Box{0, 0, 10, 10}) == 1.0);
  CHECK(cbtrack::diou(Box{0, 0, 10, 10}, Box{20, 0, 10, 10}) ==
        doctest::Approx(-0.4).epsilon(1e-12));
  // nested boxes: iou 1/4, centers sqrt(50) apart, hull diagonal^2 = 800
  const Box a{0, 0, 10, 10}, b{0, 0, 20, 20};
  CHECK(cbtrack::diou(a, b) == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(cbtrack::diou(a, b) == doctest::Approx(oracle::diou(a, b)).epsilon(1e-12));
}

TEST_CASE("invalid boxes and buffer scales are rejected") {
  CHECK_THROWS_AS(cbtrack::iou(Box{0, 0, 0, 10}, Box{0, 0, 10, 10}), std::invalid_argument);
  CHECK_THROWS_AS(cbtrack::iou(Box{0, 0, 10, -1}, Box{0, 0, 10, 10}), std::invalid_argument);
  CHECK_THROWS_AS(cbtrack::giou(Box{0, 0, 10, 10}, Box{1.0 / 0.0, 0, 10, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BufferScale(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(BufferScale(0.0 / 0.0), std::invalid_argument);
}

TEST_CASE("randomized pairs agree with the independent oracle") {
  cbtrack::SplitMix64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    const Box a = oracle::random_box(rng);
    const Box b = oracle::random_box(rng);
    const double scale = rng.next_in(0.0, 2.0);
    CHECK(cbtrack::iou(a, b) == doctest::Approx(oracle::iou(a, b)).epsilon(1e-9));
    CHECK(cbtrack::giou(a, b) == doctest::Approx(oracle::giou(a, b)).epsilon(1e-9));
    CHECK(cbtrack::diou(a, b) == doctest::Approx(oracle::diou(a, b)).epsilon(1e-9));
    CHECK(cbtrack::biou(a, b, BufferScale(scale)) ==
          doctest::Approx(oracle::biou(a, b, scale)).epsilon(1e-9));
  }
}

TEST_CASE("grid sampling anchors the analytic scores") {
  cbtrack::SplitMix64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Box a = oracle::random_box(rng, 50.0);
    Box b = a;
    b.left += rng.next_in(-40.0, 40.0);
    b.top += rng.next_in(-40.0, 40.0);
    CHECK(cbtrack::iou(a, b) == doctest::Approx(oracle::sampled_iou(a, b)).epsilon(0.05));
  }
}

TEST_CASE("score properties hold on random pairs") {
  cbtrack::SplitMix64 rng(1234);
  for (int i = 0; i < 2000; ++i) {
    const Box a = oracle::random_box(rng);
    const Box b = oracle::random_box(rng);
    const BufferScale s(rng.next_in(0.0, 1.5));

    // symmetry
    CHECK(cbtrack::iou(a, b) == cbtrack::iou(b, a));
    CHECK(cbtrack::giou(a, b) == doctest::Approx(cbtrack::giou(b, a)).epsilon(1e-12));
    CHECK(cbtrack::diou(a, b) == doctest::Approx(cbtrack::diou(b, a)).epsilon(1e-12));
    CHECK(cbtrack::biou(a, b, s) == cbtrack::biou(b, a, s));

    // ranges and orderings
    const double i_ab = cbtrack::iou(a, b);
    CHECK(i_ab >= 0.0);
    CHECK(i_ab <= 1.0);
    CHECK(cbtrack::giou(a, b) > -1.0);
    CHECK(cbtrack::giou(a, b) <= i_ab + 1e-12);
    CHECK(cbtrack::diou(a, b) > -1.0);
    CHECK(cbtrack::diou(a, b) <= i_ab + 1e-12);

    // exact zero-buffer identity
    CHECK(cbtrack::biou(a, b, BufferScale(0.0)) == i_ab);

    // translation invariance
    const double dx = rng.next_in(-500.0, 500.0);
    const double dy = rng.next_in(-500.0, 500.0);
    const Box at{a.left + dx, a.top + dy, a.width, a.height};
    const Box bt{b.left + dx, b.top + dy, b.width, b.height};
    CHECK(cbtrack::iou(at, bt) == doctest::Approx(i_ab).epsilon(1e-9));
    CHECK(cbtrack::giou(at, bt) == doctest::Approx(cbtrack::giou(a, b)).epsilon(1e-9));
    CHECK(cbtrack::diou(at, bt) == doctest::Approx(cbtrack::diou(a, b)).epsilon(1e-9));
    CHECK(cbtrack::biou(at, bt, s) == doctest::Approx(cbtrack::biou(a, b, s)).epsilon(1e-9));
  }
}

TEST_CASE("biou grows with the buffer on disjoint pairs") {
  cbtrack::SplitMix64 rng(99);
  int checked = 0;
  while (checked < 500) {
    const Box a = oracle::random_box(rng, 200.0);
    const Box b = oracle::random_box(rng, 200.0);
    if (cbtrack::iou(a, b) > 0.0) continue;
    double s1 = rng.next_in(0.0, 1.5);
    double s2 = rng.next_in(0.0, 1.5);
    if (s1 > s2) std::swap(s1, s2);
    CHECK(cbtrack::biou(a, b, BufferScale(s2)) >=
          cbtrack::biou(a, b, BufferScale(s1)) - 1e-12);
    ++checked;
  }
}
