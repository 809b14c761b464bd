#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "uiou/geometry.hpp"

using uiou::Box;

TEST_CASE("corner accessors and corner-form construction round-trip") {
  const Box b{3.0, -2.0, 10.0, 4.0};
  CHECK(b.left() == doctest::Approx(-2.0));
  CHECK(b.right() == doctest::Approx(8.0));
  CHECK(b.top() == doctest::Approx(-4.0));
  CHECK(b.bottom() == doctest::Approx(0.0));

  const Box r = Box::from_corners(b.left(), b.top(), b.right(), b.bottom());
  CHECK(r.cx == doctest::Approx(b.cx));
  CHECK(r.cy == doctest::Approx(b.cy));
  CHECK(r.w == doctest::Approx(b.w));
  CHECK(r.h == doctest::Approx(b.h));
}

TEST_CASE("box validation") {
  CHECK(uiou::box_is_valid(Box{0, 0, 0, 0}));  // degenerate but legal
  CHECK_FALSE(uiou::box_is_valid(Box{0, 0, -1, 5}));
  CHECK_FALSE(uiou::box_is_valid(Box{0, 0, 1, std::nan("")}));
  CHECK_THROWS_AS(uiou::validate_box(Box{0, 0, 1, -2}, "pred"), std::invalid_argument);
  CHECK_NOTHROW(uiou::validate_box(Box{1, 2, 3, 4}, "pred"));
}

TEST_CASE("areas of the offset-(5,5) 10x10 pair") {
  const Box a{0, 0, 10, 10};
  const Box b{5, 5, 10, 10};
  CHECK(uiou::area(a) == doctest::Approx(100.0));
  CHECK(uiou::intersection_area(a, b) == doctest::Approx(25.0));
  CHECK(uiou::union_area(a, b) == doctest::Approx(175.0));
  CHECK(uiou::iou(a, b) == doctest::Approx(25.0 / 175.0).epsilon(1e-12));
}

TEST_CASE("iou special cases") {
  const Box a{0, 0, 10, 10};
  CHECK(uiou::iou(a, a) == doctest::Approx(1.0));
  CHECK(uiou::iou(a, Box{20, 0, 10, 10}) == 0.0);   // disjoint in x
  CHECK(uiou::iou(a, Box{10, 0, 10, 10}) == 0.0);   // edge contact only
  CHECK(uiou::iou(Box{0, 0, 0, 0}, Box{0, 0, 0, 0}) == 0.0);  // union 0
  CHECK(uiou::iou(a, Box{0, 0, 5, 5}) == doctest::Approx(0.25));  // containment
}

TEST_CASE("iou is symmetric and bounded on random pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::uniform_real_distribution<double> dim(0.5, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const Box a{pos(rng), pos(rng), dim(rng), dim(rng)};
    const Box b{pos(rng), pos(rng), dim(rng), dim(rng)};
    const double ab = uiou::iou(a, b);
    CHECK(ab == uiou::iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("enclosing box spans both inputs") {
  const Box c = uiou::enclosing_box(Box{0, 0, 10, 10}, Box{5, 5, 10, 10});
  CHECK(c.left() == doctest::Approx(-5.0));
  CHECK(c.top() == doctest::Approx(-5.0));
  CHECK(c.right() == doctest::Approx(10.0));
  CHECK(c.bottom() == doctest::Approx(10.0));
  CHECK(uiou::area(c) == doctest::Approx(225.0));
}

TEST_CASE("scale_box keeps the center and scales dimensions") {
  const Box s = uiou::scale_box(Box{3, 4, 10, 6}, 0.5);
  CHECK(s.cx == 3.0);
  CHECK(s.cy == 4.0);
  CHECK(s.w == doctest::Approx(5.0));
  CHECK(s.h == doctest::Approx(3.0));
  CHECK_THROWS_AS(uiou::scale_box(Box{0, 0, 1, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(uiou::scale_box(Box{0, 0, 1, 1}, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(uiou::scale_box(Box{0, 0, 1, 1}, std::nan("")),
                  std::invalid_argument);
}

TEST_CASE("scaling both boxes by the ratio moves IoU the documented way") {
  const Box a{0, 0, 10, 10};
  const Box b{5, 5, 10, 10};
  // Joint enlargement raises IoU, joint shrinking lowers it; at ratio 0.5 the
  // offset-(5,5) squares just touch, so the IoU is exactly 0.
  CHECK(uiou::iou(uiou::scale_box(a, 2.0), uiou::scale_box(b, 2.0)) ==
        doctest::Approx(225.0 / 575.0).epsilon(1e-12));
  CHECK(uiou::iou(uiou::scale_box(a, 0.5), uiou::scale_box(b, 0.5)) == 0.0);
}

TEST_CASE("edge distances inside the box, rejection outside") {
  const Box b{0, 0, 10, 10};
  const uiou::EdgeDistances d = uiou::edge_distances(1.0, 2.0, b);
  CHECK(d.xl == doctest::Approx(6.0));
  CHECK(d.xr == doctest::Approx(4.0));
  CHECK(d.xt == doctest::Approx(7.0));
  CHECK(d.xb == doctest::Approx(3.0));
  // Sum of opposite distances equals the corresponding dimension.
  CHECK(d.xl + d.xr == doctest::Approx(b.w));
  CHECK(d.xt + d.xb == doctest::Approx(b.h));
  CHECK_THROWS_AS(uiou::edge_distances(6.0, 0.0, b), std::domain_error);
  CHECK_THROWS_AS(uiou::edge_distances(0.0, -5.1, b), std::domain_error);
}

TEST_CASE("iou translation and joint-scaling invariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> dim(0.5, 15.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Box a{pos(rng), pos(rng), dim(rng), dim(rng)};
    const Box b{pos(rng), pos(rng), dim(rng), dim(rng)};
    const double base = uiou::iou(a, b);
    const double dx = shift(rng), dy = shift(rng);
    const Box at{a.cx + dx, a.cy + dy, a.w, a.h};
    const Box bt{b.cx + dx, b.cy + dy, b.w, b.h};
    CHECK(uiou::iou(at, bt) == doctest::Approx(base).epsilon(1e-9));
    const double s = scale(rng);
    const Box as{a.cx * s, a.cy * s, a.w * s, a.h * s};
    const Box bs{b.cx * s, b.cy * s, b.w * s, b.h * s};
    CHECK(uiou::iou(as, bs) == doctest::Approx(base).epsilon(1e-9));
  }
}
