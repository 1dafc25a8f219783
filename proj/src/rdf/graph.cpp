#include "webcas/rdf/graph.hpp"

#include <algorithm>
#include <tuple>

namespace webcas::rdf {

Graph::Graph(std::initializer_list<Triple> triples) : triples_(triples) {}

bool Graph::insert(const Triple& triple) { return triples_.insert(triple).second; }

bool Graph::erase(const Triple& triple) { return triples_.erase(triple) > 0; }

bool Graph::contains(const Triple& triple) const { return triples_.contains(triple); }

std::vector<Triple> Graph::with_subject(const Term& subject) const {
    const auto [first, last] = triples_.equal_range(subject);
    return {first, last};
}

std::vector<Term> Graph::objects(const Term& subject, const Iri& predicate) const {
    std::vector<Term> out;
    const auto [first, last] = triples_.equal_range(subject);
    for (auto it = first; it != last; ++it)
        if (it->predicate == predicate) out.push_back(it->object);
    return out;
}

std::vector<Triple> sorted_triples(const Graph& graph) {
    struct Keyed {
        std::string s, p, o;
        const Triple* triple;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(graph.size());
    for (const Triple& t : graph)
        keyed.push_back({to_ntriples(t.subject), "<" + t.predicate.str() + ">", to_ntriples(t.object), &t});
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.s, a.p, a.o) < std::tie(b.s, b.p, b.o);
    });
    std::vector<Triple> out;
    out.reserve(keyed.size());
    for (const Keyed& k : keyed) out.push_back(*k.triple);
    return out;
}

}  // namespace webcas::rdf
