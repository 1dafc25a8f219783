#include "webcas/cas/documents.hpp"

#include <charconv>

#include "webcas/crypto.hpp"
#include "webcas/error.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::cas {

namespace fs = std::filesystem;
namespace vocab = rdf::vocab;

std::vector<rdf::Triple> DocumentRecord::metadata() const {
    const rdf::Term s(iri);
    return {
        {s, vocab::rdf_type(), rdf::Term(vocab::cas("Document"))},
        {s, vocab::cas("filename"), rdf::Term(rdf::Literal(filename))},
        {s, vocab::cas("mediaType"), rdf::Term(rdf::Literal(media_type))},
        {s, vocab::cas("sha256"), rdf::Term(rdf::Literal(sha256))},
        {s, vocab::cas("size"), rdf::Term(rdf::Literal::integer(static_cast<long long>(size)))},
    };
}

DocumentStore::DocumentStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create " + root_.string() + ": " + ec.message());
}

fs::path DocumentStore::path_of(const std::string& id) const {
    if (!is_uuid(id)) throw ValidationError("invalid document id '" + id + "'");
    return root_ / id;
}

void DocumentStore::write(const std::string& id, std::string_view bytes) const {
    rdf::write_file_atomic(path_of(id), bytes);
}

std::string DocumentStore::read(const std::string& id) const {
    auto p = path_of(id);
    if (!fs::exists(p)) throw NotFoundError("document file missing: " + p.string());
    return rdf::read_file(p);
}

bool DocumentStore::exists(const std::string& id) const { return is_uuid(id) && fs::exists(root_ / id); }

void DocumentStore::remove(const std::string& id) const noexcept {
    if (!is_uuid(id)) return;
    std::error_code ec;
    fs::remove(root_ / id, ec);
}

std::vector<std::string> DocumentStore::ids() const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file() && is_uuid(name)) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

rdf::Iri document_iri(const rdf::Iri& base, const std::string& id) {
    return normalized_base(base).append("/documents/" + id);
}

DocumentRecord store_document(rdf::QuadStore& store, const DocumentStore& files, const rdf::Iri& base,
                              const ActorId& actor, std::string_view bytes, const std::string& filename,
                              const std::string& media_type) {
    if (bytes.empty()) throw ValidationError("document is empty");
    if (filename.empty()) throw ValidationError("document filename is empty");
    if (!actor_exists(store, actor)) throw NotFoundError("no actor '" + actor.slug() + "'");

    const auto id = random_uuid();
    DocumentRecord rec{.id = id,
                       .iri = document_iri(base, id),
                       .filename = filename,
                       .media_type = media_type.empty() ? "application/octet-stream" : media_type,
                       .sha256 = sha256_hex(bytes),
                       .size = bytes.size(),
                       .owner_graph = actor.graph_iri()};

    files.write(rec.id, bytes);
    try {
        store.update([&](rdf::Transaction& tx) {
            if (tx.match({actor.graph_iri(), rdf::Term(actor.node()), vocab::webid(), std::nullopt}).empty())
                throw NotFoundError("no actor '" + actor.slug() + "'");
            for (const auto& t : rec.metadata()) tx.insert(rdf::Quad(actor.graph_iri(), t));
        });
    } catch (...) {
        files.remove(rec.id);
        throw;
    }
    return rec;
}

void remove_document(rdf::QuadStore& store, const DocumentStore& files, const ActorId& owner, const rdf::Iri& iri) {
    std::string id;
    store.update([&](rdf::Transaction& tx) {
        const auto& g = owner.graph_iri();
        if (tx.match({g, rdf::Term(iri), vocab::rdf_type(), rdf::Term(vocab::cas("Document"))}).empty())
            throw PermissionError("document " + iri.str() + " is not held by actor '" + owner.slug() + "'");
        if (!tx.match({g, std::nullopt, vocab::cas("includesDocument"), rdf::Term(iri)}).empty())
            throw ConflictError("document " + iri.str() + " is part of a package");
        for (auto& q : tx.match({g, rdf::Term(iri), std::nullopt, std::nullopt})) tx.erase(std::move(q));
        id = trailing_uuid(iri).value_or("");
    });
    files.remove(id);
}

namespace {

std::optional<std::string> single_literal(const rdf::Graph& g, const rdf::Iri& s, const rdf::Iri& p) {
    auto objs = g.objects(rdf::Term(s), p);
    if (objs.size() != 1 || !objs[0].is_literal()) return std::nullopt;
    return objs[0].literal().lexical();
}

std::optional<DocumentRecord> record_from(const rdf::Graph& g, const rdf::Iri& graph_name, const rdf::Iri& iri) {
    if (!g.contains(rdf::Triple(rdf::Term(iri), vocab::rdf_type(), rdf::Term(vocab::cas("Document")))))
        return std::nullopt;
    auto id = trailing_uuid(iri);
    auto filename = single_literal(g, iri, vocab::cas("filename"));
    auto media = single_literal(g, iri, vocab::cas("mediaType"));
    auto sha = single_literal(g, iri, vocab::cas("sha256"));
    auto size = single_literal(g, iri, vocab::cas("size"));
    if (!id || !filename || !media || !sha || !size) return std::nullopt;
    DocumentRecord rec{.id = *id, .iri = iri, .filename = *filename, .media_type = *media, .sha256 = *sha,
                       .size = 0, .owner_graph = graph_name};
    auto [p, ec] = std::from_chars(size->data(), size->data() + size->size(), rec.size);
    if (ec != std::errc() || p != size->data() + size->size()) return std::nullopt;
    return rec;
}

}  // namespace

std::optional<DocumentRecord> find_document(const rdf::QuadStore& store, const rdf::Iri& iri) {
    auto typed = store.match({std::nullopt, rdf::Term(iri), vocab::rdf_type(), rdf::Term(vocab::cas("Document"))});
    if (typed.size() != 1) return std::nullopt;
    auto g = store.graph(typed[0].graph);
    if (!g) return std::nullopt;
    return record_from(*g, typed[0].graph, iri);
}

std::vector<DocumentRecord> documents_of(const rdf::QuadStore& store, const ActorId& actor) {
    std::vector<DocumentRecord> out;
    auto g = store.graph(actor.graph_iri());
    if (!g) return out;
    for (const auto& t : *g) {
        if (t.predicate != vocab::rdf_type() || t.object != rdf::Term(vocab::cas("Document"))) continue;
        if (auto iri = t.subject.if_iri())
            if (auto rec = record_from(*g, actor.graph_iri(), *iri)) out.push_back(std::move(*rec));
    }
    return out;
}

std::optional<std::string> trailing_uuid(const rdf::Iri& iri) {
    const auto& s = iri.str();
    auto slash = s.rfind('/');
    if (slash == std::string::npos) return std::nullopt;
    auto tail = s.substr(slash + 1);
    if (!is_uuid(tail)) return std::nullopt;
    return tail;
}

}  // namespace webcas::cas
