#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace webcas::rdf {

/// An absolute IRI. Equality is exact codepoint equality; no normalization
/// happens beyond what resolve_iri does at parse time.
class Iri {
public:
    /// Throws ParseError unless `value` is an absolute IRI (scheme ":" ...)
    /// free of whitespace and the characters Turtle forbids inside <...>.
    explicit Iri(std::string value);

    const std::string& str() const noexcept { return value_; }
    std::string_view scheme() const noexcept;

    bool has_fragment() const noexcept;
    /// The IRI with any "#..." suffix removed (the document address).
    Iri without_fragment() const;

    /// Appends a raw suffix and re-validates, e.g. base.append("/profile/x").
    Iri append(std::string_view suffix) const { return Iri(value_ + std::string(suffix)); }

    bool starts_with(std::string_view prefix) const noexcept { return value_.starts_with(prefix); }

    friend auto operator<=>(const Iri&, const Iri&) = default;
    friend bool operator==(const Iri&, const Iri&) = default;

private:
    std::string value_;
};

bool is_absolute_iri(std::string_view text) noexcept;

/// Reference resolution against an absolute base (generic URI algorithm:
/// merge paths, remove dot segments, carry query and fragment).
Iri resolve_iri(const Iri& base, std::string_view reference);

}  // namespace webcas::rdf

template <>
struct std::hash<webcas::rdf::Iri> {
    std::size_t operator()(const webcas::rdf::Iri& iri) const noexcept {
        return std::hash<std::string>{}(iri.str());
    }
};
