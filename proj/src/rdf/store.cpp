#include "webcas/rdf/store.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>

#include "webcas/error.hpp"

namespace webcas::rdf {

Quad::Quad(Iri g, Term s, Iri p, Term o)
    : graph(std::move(g)), subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (subject.is_literal()) throw ValidationError("literal in subject position");
}

Quad::Quad(Iri g, const Triple& t) : Quad(std::move(g), t.subject, t.predicate, t.object) {}

bool QuadPattern::matches(const Quad& q) const {
    return (!graph || *graph == q.graph) && (!subject || *subject == q.subject) &&
           (!predicate || *predicate == q.predicate) && (!object || *object == q.object);
}

namespace {

void match_graph(const Iri& name, const Graph& g, const QuadPattern& pattern, std::vector<Quad>& out) {
    const auto take = [&](const Triple& t) {
        if ((!pattern.predicate || *pattern.predicate == t.predicate) && (!pattern.object || *pattern.object == t.object))
            out.emplace_back(name, t);
    };
    if (pattern.subject) {
        for (const Triple& t : g.with_subject(*pattern.subject)) take(t);
    } else {
        for (const Triple& t : g) take(t);
    }
}

void sort_quads(std::vector<Quad>& quads) {
    struct Keyed {
        std::string g, s, p, o;
        std::size_t index;
    };
    std::vector<Keyed> keys;
    keys.reserve(quads.size());
    for (std::size_t i = 0; i < quads.size(); ++i) {
        const Quad& q = quads[i];
        keys.push_back({q.graph.str(), to_ntriples(q.subject), q.predicate.str(), to_ntriples(q.object), i});
    }
    std::sort(keys.begin(), keys.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.g, a.s, a.p, a.o) < std::tie(b.g, b.s, b.p, b.o);
    });
    std::vector<Quad> sorted;
    sorted.reserve(quads.size());
    for (const Keyed& k : keys) sorted.push_back(std::move(quads[k.index]));
    quads = std::move(sorted);
}

}  // namespace

std::vector<Quad> match_in(const std::map<Iri, Graph>& graphs, const QuadPattern& pattern) {
    std::vector<Quad> out;
    if (pattern.graph) {
        if (const auto it = graphs.find(*pattern.graph); it != graphs.end())
            match_graph(it->first, it->second, pattern, out);
    } else {
        for (const auto& [name, g] : graphs) match_graph(name, g, pattern, out);
    }
    sort_quads(out);
    return out;
}

std::vector<Quad> Transaction::match(const QuadPattern& pattern) const { return match_in(graphs_, pattern); }

const Graph* Transaction::graph(const Iri& name) const {
    const auto it = graphs_.find(name);
    return it == graphs_.end() ? nullptr : &it->second;
}

bool Transaction::contains(const Quad& quad) const {
    const Graph* g = graph(quad.graph);
    return g != nullptr && g->contains(quad.triple());
}

QuadStore::QuadStore(QuadStore&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    graphs_ = std::move(other.graphs_);
    version_ = other.version_;
}

QuadStore& QuadStore::operator=(QuadStore&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        graphs_ = std::move(other.graphs_);
        version_ = std::max(version_ + 1, other.version_);
    }
    return *this;
}

ChangeCount QuadStore::apply_locked(std::span<const Quad> erases, std::span<const Quad> inserts) {
    ChangeCount count;
    for (const Quad& q : erases) {
        const auto it = graphs_.find(q.graph);
        if (it == graphs_.end()) continue;
        if (it->second.erase(q.triple())) {
            ++count.removed;
            if (it->second.empty()) graphs_.erase(it);
        }
    }
    for (const Quad& q : inserts)
        if (graphs_[q.graph].insert(q.triple())) ++count.added;
    if (count.added + count.removed > 0) ++version_;
    return count;
}

std::size_t QuadStore::insert(std::span<const Quad> quads) {
    std::unique_lock lock(mutex_);
    return apply_locked({}, quads).added;
}

std::size_t QuadStore::erase(std::span<const Quad> quads) {
    std::unique_lock lock(mutex_);
    return apply_locked(quads, {}).removed;
}

ChangeCount QuadStore::update(const std::function<void(Transaction&)>& body) {
    std::unique_lock lock(mutex_);
    Transaction tx(graphs_);
    body(tx);
    return apply_locked(tx.erases_, tx.inserts_);
}

std::vector<Quad> QuadStore::match(const QuadPattern& pattern) const {
    std::shared_lock lock(mutex_);
    return match_in(graphs_, pattern);
}

bool QuadStore::contains(const Quad& quad) const {
    std::shared_lock lock(mutex_);
    const auto it = graphs_.find(quad.graph);
    return it != graphs_.end() && it->second.contains(quad.triple());
}

std::optional<Graph> QuadStore::graph(const Iri& name) const {
    std::shared_lock lock(mutex_);
    const auto it = graphs_.find(name);
    if (it == graphs_.end()) return std::nullopt;
    return it->second;
}

std::vector<Iri> QuadStore::graph_names() const {
    std::shared_lock lock(mutex_);
    std::vector<Iri> names;
    for (const auto& [name, g] : graphs_) names.push_back(name);
    return names;
}

std::map<Iri, Graph> QuadStore::snapshot() const {
    std::shared_lock lock(mutex_);
    return graphs_;
}

std::uint64_t QuadStore::version() const {
    std::shared_lock lock(mutex_);
    return version_;
}

std::size_t QuadStore::quad_count() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& [name, g] : graphs_) n += g.size();
    return n;
}

}  // namespace webcas::rdf
