#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>

#include "webcas/rdf/iri.hpp"

namespace webcas::rdf {

struct BlankNode {
    std::string label;

    friend auto operator<=>(const BlankNode&, const BlankNode&) = default;
    friend bool operator==(const BlankNode&, const BlankNode&) = default;
};

class Literal {
public:
    /// Plain string literal (xsd:string).
    explicit Literal(std::string lexical);
    Literal(std::string lexical, Iri datatype);
    /// Language-tagged literal; datatype becomes rdf:langString.
    static Literal with_language(std::string lexical, std::string language);
    static Literal integer(long long value);

    const std::string& lexical() const noexcept { return lexical_; }
    const Iri& datatype() const noexcept { return datatype_; }
    const std::optional<std::string>& language() const noexcept { return language_; }

    friend auto operator<=>(const Literal&, const Literal&) = default;
    friend bool operator==(const Literal&, const Literal&) = default;

private:
    std::string lexical_;
    Iri datatype_;
    std::optional<std::string> language_;
};

/// One of Iri | BlankNode | Literal.
class Term {
public:
    Term(Iri iri) : value_(std::move(iri)) {}
    Term(BlankNode node) : value_(std::move(node)) {}
    Term(Literal literal) : value_(std::move(literal)) {}

    bool is_iri() const noexcept { return std::holds_alternative<Iri>(value_); }
    bool is_blank() const noexcept { return std::holds_alternative<BlankNode>(value_); }
    bool is_literal() const noexcept { return std::holds_alternative<Literal>(value_); }

    const Iri& iri() const { return std::get<Iri>(value_); }
    const BlankNode& blank() const { return std::get<BlankNode>(value_); }
    const Literal& literal() const { return std::get<Literal>(value_); }

    const Iri* if_iri() const noexcept { return std::get_if<Iri>(&value_); }
    const Literal* if_literal() const noexcept { return std::get_if<Literal>(&value_); }

    const std::variant<Iri, BlankNode, Literal>& variant() const noexcept { return value_; }

    friend auto operator<=>(const Term&, const Term&) = default;
    friend bool operator==(const Term&, const Term&) = default;

private:
    std::variant<Iri, BlankNode, Literal> value_;
};

/// N-Triples form of a term: <iri>, _:label or "lexical"(@lang|^^<dt>).
std::string to_ntriples(const Term& term);
std::string escape_string(std::string_view text);

}  // namespace webcas::rdf
