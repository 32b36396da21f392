#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "induct/dsl/number_dsl.hpp"
#include "induct/dsl/shape_dsl.hpp"

namespace induct {

enum class ConceptDomain { number, shape };

inline std::string_view to_string(ConceptDomain d) { return d == ConceptDomain::number ? "number" : "shape"; }

/// A parsed concept in one of the two languages.
struct ConceptProgram {
    std::variant<dsl::NumberExpr, dsl::ShapeExpr> expr;

    ConceptDomain domain() const {
        return std::holds_alternative<dsl::NumberExpr>(expr) ? ConceptDomain::number : ConceptDomain::shape;
    }
    const dsl::NumberExpr* number() const { return std::get_if<dsl::NumberExpr>(&expr); }
    const dsl::ShapeExpr* shape() const { return std::get_if<dsl::ShapeExpr>(&expr); }

    bool operator==(const ConceptProgram&) const = default;
};

inline ConceptProgram parse_concept(ConceptDomain domain, std::string_view src) {
    if (domain == ConceptDomain::number) return ConceptProgram{dsl::parse_number_concept(src)};
    return ConceptProgram{dsl::parse_shape_concept(src)};
}

inline std::string format_concept(const ConceptProgram& p) {
    if (const auto* n = p.number()) return dsl::format_number(*n);
    return dsl::format_shape(*p.shape());
}

}  // namespace induct
