#pragma once

#include <cstddef>
#include <initializer_list>
#include <set>
#include <vector>

#include "webcas/rdf/term.hpp"

namespace webcas::rdf {

struct Triple {
    /// Throws ValidationError when the subject is a literal.
    Triple(Term subject, Iri predicate, Term object);

    Term subject;
    Iri predicate;
    Term object;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Orders triples structurally; also compares a triple against a bare
/// subject term so subject lookups can use equal_range.
struct TripleOrder {
    using is_transparent = void;
    bool operator()(const Triple& a, const Triple& b) const { return a < b; }
    bool operator()(const Triple& a, const Term& subject) const { return a.subject < subject; }
    bool operator()(const Term& subject, const Triple& b) const { return subject < b.subject; }
};

/// A set of triples.
class Graph {
public:
    using const_iterator = std::set<Triple, TripleOrder>::const_iterator;

    Graph() = default;
    Graph(std::initializer_list<Triple> triples);

    /// Returns true if the triple was not already present.
    bool insert(const Triple& triple);
    bool erase(const Triple& triple);
    bool contains(const Triple& triple) const;

    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }
    const_iterator begin() const noexcept { return triples_.begin(); }
    const_iterator end() const noexcept { return triples_.end(); }

    /// Triples whose subject equals `subject`, in set order.
    std::vector<Triple> with_subject(const Term& subject) const;
    /// All objects of (subject, predicate, *).
    std::vector<Term> objects(const Term& subject, const Iri& predicate) const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::set<Triple, TripleOrder> triples_;
};

/// Sort key used wherever a deterministic order is promised: the N-Triples
/// forms of subject, predicate and object compared lexicographically.
std::vector<Triple> sorted_triples(const Graph& graph);

}  // namespace webcas::rdf
