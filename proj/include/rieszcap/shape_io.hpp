#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rieszcap/geometry.hpp"

// Shape description files.
//
//   {
//     "dimension": 3,
//     "primitives": [
//       {"type": "ball",     "center": [0, 0, 0], "radius": 1},
//       {"type": "box",      "min": [-1, -1, -1], "max": [1, 1, 1]},
//       {"type": "cylinder", "start": [0, 0, -1], "end": [0, 0, 1], "radius": 0.5},
//       {"type": "union",    "primitives": [ ... ]}
//     ]
//   }
//
// Several top-level primitives form a union. Unions nest.

namespace rieszcap {

class ShapeParseError : public std::runtime_error {
 public:
  explicit ShapeParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ShapeParseError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline double read_number(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require_field(obj, key, where);
  if (!v.is_number()) throw ShapeParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline Vec read_point(const nlohmann::json& obj, const char* key, int dim, const std::string& where) {
  const auto& v = require_field(obj, key, where);
  if (!v.is_array()) throw ShapeParseError(where + "." + key + ": expected an array of numbers");
  if (static_cast<int>(v.size()) != dim) {
    throw ShapeParseError(where + "." + key + ": expected " + std::to_string(dim) + " coordinates, got " +
                          std::to_string(v.size()));
  }
  Vec p(dim);
  for (int i = 0; i < dim; ++i) {
    if (!v[i].is_number()) throw ShapeParseError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
    p[i] = v[i].get<double>();
  }
  return p;
}

inline Shape parse_primitive_list(const nlohmann::json& list, int dim, const std::string& where);

inline Shape parse_primitive(const nlohmann::json& obj, int dim, const std::string& where) {
  if (!obj.is_object()) throw ShapeParseError(where + ": expected an object");
  const auto& type_field = require_field(obj, "type", where);
  if (!type_field.is_string()) throw ShapeParseError(where + ".type: expected a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "ball") {
      return Shape::ball(read_point(obj, "center", dim, where), read_number(obj, "radius", where));
    }
    if (type == "box") {
      return Shape::box(read_point(obj, "min", dim, where), read_point(obj, "max", dim, where));
    }
    if (type == "cylinder") {
      return Shape::cylinder(read_point(obj, "start", dim, where), read_point(obj, "end", dim, where),
                             read_number(obj, "radius", where));
    }
    if (type == "union") {
      return parse_primitive_list(require_field(obj, "primitives", where), dim, where + ".primitives");
    }
  } catch (const std::invalid_argument& e) {
    throw ShapeParseError(where + ": " + e.what());
  }
  throw ShapeParseError(where + ".type: unknown primitive type '" + type + "'");
}

inline Shape parse_primitive_list(const nlohmann::json& list, int dim, const std::string& where) {
  if (!list.is_array() || list.empty()) throw ShapeParseError(where + ": expected a non-empty array");
  std::vector<Shape> children;
  for (std::size_t i = 0; i < list.size(); ++i) {
    children.push_back(parse_primitive(list[i], dim, where + "[" + std::to_string(i) + "]"));
  }
  if (children.size() == 1) return std::move(children.front());
  return Shape::make_union(std::move(children));
}

inline nlohmann::json point_json(const Vec& p) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

inline nlohmann::json primitive_json(const Shape& s) {
  nlohmann::json out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BallPrimitive>) {
          out = {{"type", "ball"}, {"center", point_json(n.center)}, {"radius", n.radius}};
        } else if constexpr (std::is_same_v<T, BoxPrimitive>) {
          out = {{"type", "box"}, {"min", point_json(n.lower)}, {"max", point_json(n.upper)}};
        } else if constexpr (std::is_same_v<T, CylinderPrimitive>) {
          out = {{"type", "cylinder"}, {"start", point_json(n.start)}, {"end", point_json(n.end)}, {"radius", n.radius}};
        } else {
          nlohmann::json children = nlohmann::json::array();
          for (const auto& c : n.children) children.push_back(primitive_json(c));
          out = {{"type", "union"}, {"primitives", children}};
        }
      },
      s.node());
  return out;
}

}  // namespace detail

inline Shape parse_shape_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ShapeParseError("shape file is not valid JSON at " + detail::line_col(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ShapeParseError("shape file: top level must be an object");
  const auto& dim_field = detail::require_field(doc, "dimension", "shape");
  if (!dim_field.is_number_integer()) throw ShapeParseError("shape.dimension: expected an integer");
  const int dim = dim_field.get<int>();
  if (dim < 1 || dim > kMaxDim) {
    throw ShapeParseError("shape.dimension: must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  return detail::parse_primitive_list(detail::require_field(doc, "primitives", "shape"), dim, "primitives");
}

inline Shape load_shape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapeParseError("cannot open shape file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_shape_json(buf.str());
  } catch (const ShapeParseError& e) {
    throw ShapeParseError(path + ": " + e.what());
  }
}

inline nlohmann::json shape_to_json(const Shape& shape) {
  nlohmann::json prims = nlohmann::json::array();
  prims.push_back(detail::primitive_json(shape));
  return {{"dimension", shape.dim()}, {"primitives", prims}};
}

}  // namespace rieszcap
