#include <doctest.h>

#include "mamt/geometry.hpp"

using namespace mamt;

TEST_CASE("point arithmetic") {
    const Point2 a{1.0, 2.0};
    const Point2 b{4.0, 6.0};
    CHECK((b - a) == Point2{3.0, 4.0});
    CHECK((a + b) == Point2{5.0, 8.0});
    CHECK((2.0 * a) == Point2{2.0, 4.0});
    CHECK((a * 2.0) == Point2{2.0, 4.0});
    CHECK((b / 2.0) == Point2{2.0, 3.0});
}

TEST_CASE("norm and distance") {
    CHECK(Point2{3.0, 4.0}.norm() == doctest::Approx(5.0));
    CHECK(distance({1.0, 1.0}, {4.0, 5.0}) == doctest::Approx(5.0));
    CHECK(Point2{3.0, 4.0}.squared_norm() == doctest::Approx(25.0));
    CHECK(Point2{1.0, 2.0}.dot({3.0, 4.0}) == doctest::Approx(11.0));
}

TEST_CASE("finite detects bad coordinates") {
    CHECK(Point2{0.0, 0.0}.finite());
    CHECK_FALSE(Point2{std::numeric_limits<double>::quiet_NaN(), 0.0}.finite());
    CHECK_FALSE(Point2{0.0, std::numeric_limits<double>::infinity()}.finite());
}
