#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "webcas/rdf/graph.hpp"

namespace webcas::rdf {

struct Quad {
    Iri graph;
    Term subject;
    Iri predicate;
    Term object;

    Quad(Iri graph, Term subject, Iri predicate, Term object);
    Quad(Iri graph, const Triple& triple);

    Triple triple() const { return Triple(subject, predicate, object); }

    friend auto operator<=>(const Quad&, const Quad&) = default;
    friend bool operator==(const Quad&, const Quad&) = default;
};

/// Each position is either concrete or a wildcard (nullopt).
struct QuadPattern {
    std::optional<Iri> graph;
    std::optional<Term> subject;
    std::optional<Iri> predicate;
    std::optional<Term> object;

    bool matches(const Quad& quad) const;
};

struct ChangeCount {
    std::size_t added = 0;
    std::size_t removed = 0;
};

/// Staged edits that commit atomically. Reads see the committed state
/// (the transaction's own staged edits are not visible to them).
class Transaction {
public:
    std::vector<Quad> match(const QuadPattern& pattern) const;
    const Graph* graph(const Iri& name) const;
    bool contains(const Quad& quad) const;

    void insert(Quad quad) { inserts_.push_back(std::move(quad)); }
    void erase(Quad quad) { erases_.push_back(std::move(quad)); }

private:
    friend class QuadStore;
    explicit Transaction(const std::map<Iri, Graph>& graphs) : graphs_(graphs) {}

    const std::map<Iri, Graph>& graphs_;
    std::vector<Quad> erases_;
    std::vector<Quad> inserts_;
};

/// Named graphs with set semantics. Many concurrent readers or one writer;
/// every mutation is atomic with respect to readers. `version` increases
/// exactly once per call that changes anything.
class QuadStore {
public:
    QuadStore() = default;
    QuadStore(QuadStore&& other) noexcept;
    QuadStore& operator=(QuadStore&& other) noexcept;
    QuadStore(const QuadStore&) = delete;
    QuadStore& operator=(const QuadStore&) = delete;

    std::size_t insert(std::span<const Quad> quads);
    std::size_t erase(std::span<const Quad> quads);

    /// Runs `body` under the write lock, then commits its staged erases and
    /// inserts (erases first). If `body` throws nothing is applied.
    ChangeCount update(const std::function<void(Transaction&)>& body);

    /// Matches in deterministic order: graph, subject, predicate, object by
    /// their N-Triples forms.
    std::vector<Quad> match(const QuadPattern& pattern) const;
    bool contains(const Quad& quad) const;

    std::optional<Graph> graph(const Iri& name) const;
    std::vector<Iri> graph_names() const;
    /// Consistent copy of every graph.
    std::map<Iri, Graph> snapshot() const;

    std::uint64_t version() const;
    std::size_t quad_count() const;

private:
    ChangeCount apply_locked(std::span<const Quad> erases, std::span<const Quad> inserts);

    mutable std::shared_mutex mutex_;
    std::map<Iri, Graph> graphs_;
    std::uint64_t version_ = 0;
};

std::vector<Quad> match_in(const std::map<Iri, Graph>& graphs, const QuadPattern& pattern);

/// Free-function spellings of the store primitives.
inline std::size_t insert_quads(QuadStore& store, std::span<const Quad> quads) { return store.insert(quads); }
inline std::size_t delete_quads(QuadStore& store, std::span<const Quad> quads) { return store.erase(quads); }
inline std::vector<Quad> match_quads(const QuadStore& store, const QuadPattern& pattern) {
    return store.match(pattern);
}

}  // namespace webcas::rdf
