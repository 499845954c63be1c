#include <gtest/gtest.h>

#include <string>

#include "rieszcap/shape_io.hpp"

using namespace rieszcap;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_shape_json(text);
  } catch (const ShapeParseError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST(ShapeIo, ParsesEveryPrimitive) {
  const Shape s = parse_shape_json(R"({
    "dimension": 3,
    "primitives": [
      {"type": "ball", "center": [0, 0, 0], "radius": 1},
      {"type": "box", "min": [2, 2, 2], "max": [3, 3, 3]},
      {"type": "cylinder", "start": [0, 0, 5], "end": [0, 0, 6], "radius": 0.5},
      {"type": "union", "primitives": [{"type": "ball", "center": [9, 0, 0], "radius": 1}]}
    ]})");
  EXPECT_EQ(s.dim(), 3);
  EXPECT_EQ(s.distance(Vec{0.0, 0.0, 0.0}), 0.0);
  EXPECT_EQ(s.distance(Vec{2.5, 2.5, 2.5}), 0.0);
  EXPECT_EQ(s.distance(Vec{0.0, 0.0, 5.5}), 0.0);
  EXPECT_EQ(s.distance(Vec{9.0, 0.0, 0.0}), 0.0);
  EXPECT_NEAR(s.distance(Vec{0.0, 0.0, 3.0}), 2.0, 1e-15);
}

TEST(ShapeIo, RoundTripPreservesDistances) {
  const Shape original = shapes::hollow_square(0.5, 0.01);
  const Shape copy = parse_shape_json(shape_to_json(original).dump());
  for (double x : {-0.7, -0.495, 0.0, 0.3, 0.499, 0.8}) {
    for (double y : {-0.6, 0.0, 0.495}) EXPECT_EQ(copy.distance(Vec{x, y}), original.distance(Vec{x, y}));
  }
}

TEST(ShapeIo, ReportsSyntaxErrorLocation) {
  const std::string e = error_of("{\n  \"dimension\": 3,\n  \"primitives\": [ }\n");
  EXPECT_TRUE(contains(e, "line 3")) << e;
}

TEST(ShapeIo, ReportsMissingFieldPath) {
  const std::string e = error_of(R"({"dimension": 2, "primitives": [{"type": "ball", "center": [0, 0]}]})");
  EXPECT_TRUE(contains(e, "primitives[0]")) << e;
  EXPECT_TRUE(contains(e, "radius")) << e;
}

TEST(ShapeIo, ReportsWrongCoordinateCount) {
  const std::string e = error_of(R"({"dimension": 3, "primitives": [{"type": "box", "min": [0, 0], "max": [1, 1, 1]}]})");
  EXPECT_TRUE(contains(e, "primitives[0].min")) << e;
}

TEST(ShapeIo, ReportsUnknownTypeAndBadValues) {
  EXPECT_TRUE(contains(error_of(R"({"dimension": 2, "primitives": [{"type": "torus"}]})"), "torus"));
  EXPECT_TRUE(contains(error_of(R"({"dimension": 2, "primitives": [{"type": "ball", "center": [0, 0], "radius": -1}]})"),
                       "primitives[0]"));
  EXPECT_TRUE(contains(error_of(R"({"primitives": []})"), "dimension"));
  EXPECT_TRUE(contains(error_of(R"({"dimension": 2, "primitives": []})"), "non-empty"));
  EXPECT_TRUE(contains(error_of(R"([1, 2])"), "object"));
}

TEST(ShapeIo, MissingFileIsAnError) {
  EXPECT_THROW(load_shape_file("/nonexistent/shape.json"), ShapeParseError);
}
