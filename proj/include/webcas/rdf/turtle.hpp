#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "webcas/rdf/graph.hpp"

namespace webcas::rdf {

/// Prefix label (without the colon) to namespace IRI. Re-declaring a label
/// replaces the earlier namespace.
using PrefixMap = std::map<std::string, Iri>;

struct TurtleDocument {
    Graph graph;
    PrefixMap prefixes;
};

/// Parses the Turtle subset used throughout the service: @base/@prefix (and
/// the SPARQL-style BASE/PREFIX spellings), IRIs, prefixed names, `a`,
/// predicate and object lists, short string literals with language tag or
/// datatype, integers, blank-node labels and comments.
///
/// Collections, [...] property lists, long strings, decimals, doubles and
/// booleans are rejected with a ParseError carrying line and column.
TurtleDocument parse_turtle(std::string_view text, const std::optional<Iri>& base = std::nullopt);

/// Deterministic serialization: prefix declarations sorted by label, then
/// one block per subject in N-Triples sort order, predicates joined with
/// ";" and objects with ",".
std::string serialize_turtle(const Graph& graph, const PrefixMap& prefixes = {});

/// Prefixes used by the service's own documents (rdf, xsd, foaf, cert, s, cas).
const PrefixMap& standard_prefixes();

}  // namespace webcas::rdf
