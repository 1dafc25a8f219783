#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "webcas/cas/documents.hpp"
#include "webcas/crypto.hpp"
#include "webcas/exchange/package.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::testing {

/// Adds the minimal actor node so an actor exists without key generation.
inline void add_bare_actor(rdf::QuadStore& store, const cas::ActorId& actor, const rdf::Iri& webid) {
    std::vector<rdf::Quad> q{{actor.graph_iri(), rdf::Term(actor.node()), rdf::vocab::webid(), rdf::Term(webid)}};
    store.insert(q);
}

struct GeneratedDossier {
    rdf::Iri iri;
    /// Everything reachable from the dossier except document metadata and
    /// permission triples; what an export must carry for the dossier node.
    rdf::Graph statements;
    std::vector<cas::DocumentRecord> documents;
    std::vector<std::string> contents;
};

/// Random dossier in `actor`'s graph: 0-5 documents of up to 64 KiB, payload
/// statements on the dossier, its fragment nodes and blank nodes, decoy
/// permission triples, and unrelated statements that must not be exported.
class DossierGenerator {
public:
    explicit DossierGenerator(std::uint64_t seed) : graphs_(seed), rng_(seed ^ 0x9e3779b97f4a7c15ull) {}

    GeneratedDossier make(rdf::QuadStore& store, const cas::DocumentStore& files, const rdf::Iri& base,
                          const cas::ActorId& actor) {
        namespace vocab = rdf::vocab;
        using rdf::Term;
        GeneratedDossier out{rdf::Iri(cas::normalized_base(base).str() + "/dossiers/" + random_uuid()), {}, {}, {}};
        const Term d(out.iri);
        const rdf::Iri g = actor.graph_iri();
        std::vector<rdf::Quad> quads;
        auto add = [&](const Term& s, const rdf::Iri& p, const Term& o, bool exported = true) {
            quads.emplace_back(g, s, p, o);
            if (exported) out.statements.insert(rdf::Triple(s, p, o));
        };
        static const rdf::Iri kinds[] = {exchange::bachelor_dossier_kind(), exchange::application_dossier_kind(),
                                         exchange::decision_kind()};
        add(d, vocab::rdf_type(), Term(vocab::cas("Package")));
        add(d, vocab::cas("packageKind"), Term(kinds[pick(3)]));

        std::vector<Term> nodes{d};
        for (std::size_t i = 0, n = pick(3); i < n; ++i) {
            nodes.push_back(Term(rdf::Iri(out.iri.str() + "#f" + std::to_string(i))));
            add(d, vocab::cas("part"), nodes.back());
        }
        for (std::size_t i = 0, n = pick(3); i < n; ++i) {
            nodes.push_back(Term(rdf::BlankNode{"n" + std::to_string(serial_) + "x" + std::to_string(i)}));
            add(nodes[pick(nodes.size() - 1)], vocab::cas("part"), nodes.back());
        }
        for (std::size_t i = 0, n = pick(12); i < n; ++i) {
            const Term& s = nodes[pick(nodes.size())];
            switch (pick(3)) {
                case 0: add(s, graphs_.iri(), Term(graphs_.literal())); break;
                case 1: add(s, graphs_.iri(), Term(graphs_.iri())); break;
                default: add(s, graphs_.iri(), nodes[pick(nodes.size())]); break;
            }
        }
        // Not exported: grants, and statements about unrelated subjects.
        add(d, vocab::permission(), Term(rdf::Iri("https://master.example/profile/m#id")), false);
        add(Term(rdf::Iri("https://elsewhere.example/x")), graphs_.iri(), Term(graphs_.literal()), false);
        store.insert(quads);
        ++serial_;

        for (std::size_t i = 0, n = pick(6); i < n; ++i) {
            std::string bytes(1 + pick(64 * 1024), '\0');
            const bool text = pick(2) == 0;
            for (auto& c : bytes) c = text ? static_cast<char>('a' + pick(26)) : static_cast<char>(rng_());
            auto rec = cas::store_document(store, files, base, actor, bytes, "doc" + std::to_string(i) + ".bin",
                                           text ? "text/plain" : "application/pdf");
            std::vector<rdf::Quad> link{{g, d, vocab::cas("includesDocument"), Term(rec.iri)},
                                        {g, Term(rec.iri), vocab::permission(), Term(rdf::Iri("https://m.example/#i"))}};
            store.insert(link);
            out.statements.insert(rdf::Triple(d, vocab::cas("includesDocument"), Term(rec.iri)));
            out.documents.push_back(std::move(rec));
            out.contents.push_back(std::move(bytes));
        }
        return out;
    }

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

private:
    GraphGenerator graphs_;
    std::mt19937_64 rng_;
    std::size_t serial_ = 0;
};

}  // namespace webcas::testing
