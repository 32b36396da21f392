#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "induct/errors.hpp"

namespace induct {

enum class Shape : std::uint8_t { triangle, rectangle, circle };
enum class Color : std::uint8_t { green, yellow, blue };

inline constexpr std::array<Shape, 3> kAllShapes{Shape::triangle, Shape::rectangle, Shape::circle};
inline constexpr std::array<Color, 3> kAllColors{Color::green, Color::yellow, Color::blue};
inline constexpr std::array<int, 3> kAllSizes{1, 2, 3};

inline std::string_view to_string(Shape s) {
    switch (s) {
        case Shape::triangle: return "triangle";
        case Shape::rectangle: return "rectangle";
        case Shape::circle: return "circle";
    }
    return "?";
}

inline std::string_view to_string(Color c) {
    switch (c) {
        case Color::green: return "green";
        case Color::yellow: return "yellow";
        case Color::blue: return "blue";
    }
    return "?";
}

/// small / medium / large for sizes 1 / 2 / 3.
inline std::string_view size_word(int size) {
    switch (size) {
        case 1: return "small";
        case 2: return "medium";
        case 3: return "large";
        default: return "?";
    }
}

inline std::optional<Shape> shape_from_string(std::string_view s) {
    for (Shape v : kAllShapes)
        if (to_string(v) == s) return v;
    return std::nullopt;
}

inline std::optional<Color> color_from_string(std::string_view s) {
    for (Color v : kAllColors)
        if (to_string(v) == s) return v;
    return std::nullopt;
}

struct ShapeObject {
    Shape shape = Shape::triangle;
    Color color = Color::green;
    int size = 1;

    auto operator<=>(const ShapeObject&) const = default;

    static ShapeObject make(Shape shape, Color color, int size) {
        if (size < 1 || size > 3) throw FormatError("shape object size must be 1, 2 or 3, got " + std::to_string(size));
        return ShapeObject{shape, color, size};
    }

    /// "(large green triangle)"
    std::string describe() const {
        std::string out = "(";
        out += size_word(size);
        out += ' ';
        out += to_string(color);
        out += ' ';
        out += to_string(shape);
        out += ')';
        return out;
    }
};

/// The 27 distinct shape objects, ordered shape-major then color then size.
inline std::vector<ShapeObject> shape_universe() {
    std::vector<ShapeObject> out;
    out.reserve(27);
    for (Shape s : kAllShapes)
        for (Color c : kAllColors)
            for (int z : kAllSizes) out.push_back(ShapeObject{s, c, z});
    return out;
}

}  // namespace induct
