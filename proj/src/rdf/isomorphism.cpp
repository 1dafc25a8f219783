#include "webcas/rdf/isomorphism.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

namespace webcas::rdf {
namespace {

using Color = std::uint64_t;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    // splitmix-style combiner; only needs to be deterministic within a process.
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    return h ^ (h >> 29);
}

std::uint64_t hash_text(const std::string& s) { return std::hash<std::string>{}(s); }

/// Blank-node view of one graph: labels, non-ground triples and, per node,
/// the triples it occurs in.
struct BlankView {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<const Triple*> triples;
    std::vector<std::vector<std::size_t>> occurs;
    std::set<Triple> ground;

    explicit BlankView(const Graph& g) {
        for (const Triple& t : g) {
            if (!t.subject.is_blank() && !t.object.is_blank()) {
                ground.insert(t);
                continue;
            }
            const std::size_t ti = triples.size();
            triples.push_back(&t);
            for (const Term* term : {&t.subject, &t.object}) {
                if (!term->is_blank()) continue;
                const auto [it, fresh] = index.try_emplace(term->blank().label, labels.size());
                if (fresh) {
                    labels.push_back(term->blank().label);
                    occurs.emplace_back();
                }
                auto& list = occurs[it->second];
                if (list.empty() || list.back() != ti) list.push_back(ti);
            }
        }
    }

    std::size_t node(const Term& t) const { return index.at(t.blank().label); }
};

std::uint64_t position_hash(const BlankView& v, const Term& term, std::size_t self, const std::vector<Color>& colors) {
    if (!term.is_blank()) return mix(1, hash_text(to_ntriples(term)));
    const std::size_t n = v.node(term);
    if (n == self) return 2;
    return mix(3, colors[n]);
}

std::vector<Color> refine_once(const BlankView& v, const std::vector<Color>& colors) {
    std::vector<Color> next(colors.size());
    for (std::size_t n = 0; n < colors.size(); ++n) {
        std::vector<std::uint64_t> sigs;
        sigs.reserve(v.occurs[n].size());
        for (const std::size_t ti : v.occurs[n]) {
            const Triple& t = *v.triples[ti];
            std::uint64_t h = mix(position_hash(v, t.subject, n, colors), hash_text(t.predicate.str()));
            sigs.push_back(mix(h, position_hash(v, t.object, n, colors)));
        }
        std::sort(sigs.begin(), sigs.end());
        std::uint64_t h = mix(colors[n], 0x51);
        for (const auto s : sigs) h = mix(h, s);
        next[n] = h;
    }
    return next;
}

std::size_t distinct(const std::vector<Color>& colors) { return std::set<Color>(colors.begin(), colors.end()).size(); }

std::map<Color, std::size_t> histogram(const std::vector<Color>& colors) {
    std::map<Color, std::size_t> h;
    for (const auto c : colors) ++h[c];
    return h;
}

class Matcher {
public:
    Matcher(const BlankView& a, const BlankView& b) : a_(a), b_(b) {}

    bool search(std::vector<Color> ca, std::vector<Color> cb) {
        // Refine both colourings in lockstep until the partition is stable.
        for (;;) {
            const std::size_t before = distinct(ca);
            ca = refine_once(a_, ca);
            cb = refine_once(b_, cb);
            if (histogram(ca) != histogram(cb)) return false;
            if (distinct(ca) == before) break;
        }
        const auto hist = histogram(ca);
        Color tied = 0;
        std::size_t tied_size = 0;
        for (const auto& [color, count] : hist) {
            if (count > 1 && (tied_size == 0 || count < tied_size)) {
                tied = color;
                tied_size = count;
            }
        }
        if (tied_size == 0) return verify(ca, cb);

        const auto x = static_cast<std::size_t>(std::find(ca.begin(), ca.end(), tied) - ca.begin());
        const Color pinned = mix(tied, ++salt_);
        for (std::size_t y = 0; y < cb.size(); ++y) {
            if (cb[y] != tied) continue;
            auto na = ca;
            auto nb = cb;
            na[x] = pinned;
            nb[y] = pinned;
            if (search(std::move(na), std::move(nb))) return true;
        }
        return false;
    }

private:
    bool verify(const std::vector<Color>& ca, const std::vector<Color>& cb) const {
        std::unordered_map<Color, std::size_t> by_color;
        for (std::size_t i = 0; i < cb.size(); ++i) by_color[cb[i]] = i;
        std::vector<std::string> target(ca.size());
        for (std::size_t i = 0; i < ca.size(); ++i) target[i] = b_.labels[by_color.at(ca[i])];

        std::set<Triple> mapped_b;
        for (const Triple* t : b_.triples) mapped_b.insert(*t);
        const auto map_term = [&](const Term& term) -> Term {
            if (!term.is_blank()) return term;
            return BlankNode{target[a_.node(term)]};
        };
        for (const Triple* t : a_.triples)
            if (!mapped_b.contains(Triple(map_term(t->subject), t->predicate, map_term(t->object)))) return false;
        return true;
    }

    const BlankView& a_;
    const BlankView& b_;
    std::uint64_t salt_ = 0;
};

}  // namespace

bool graph_isomorphic(const Graph& a, const Graph& b) {
    if (a.size() != b.size()) return false;
    const BlankView va(a);
    const BlankView vb(b);
    if (va.ground != vb.ground) return false;
    if (va.labels.size() != vb.labels.size() || va.triples.size() != vb.triples.size()) return false;
    if (va.labels.empty()) return true;
    Matcher matcher(va, vb);
    return matcher.search(std::vector<Color>(va.labels.size(), 0), std::vector<Color>(vb.labels.size(), 0));
}

Graph relabel_blank_nodes(const Graph& graph, const std::string& prefix) {
    std::map<std::string, std::string> renamed;
    for (const Triple& t : graph)
        for (const Term* term : {&t.subject, &t.object})
            if (term->is_blank()) renamed.emplace(term->blank().label, "");
    std::size_t counter = 0;
    for (auto& [from, to] : renamed) to = prefix + std::to_string(counter++);
    const auto map_term = [&](const Term& term) -> Term {
        if (!term.is_blank()) return term;
        return BlankNode{renamed.at(term.blank().label)};
    };
    Graph out;
    for (const Triple& t : graph) out.insert(Triple(map_term(t.subject), t.predicate, map_term(t.object)));
    return out;
}

}  // namespace webcas::rdf
