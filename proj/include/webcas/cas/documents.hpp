#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "webcas/cas/actor.hpp"
#include "webcas/rdf/store.hpp"

namespace webcas::cas {

struct DocumentRecord {
    std::string id;
    rdf::Iri iri;
    std::string filename;
    std::string media_type;
    std::string sha256;
    std::uint64_t size = 0;
    rdf::Iri owner_graph;

    /// The metadata triples (a cas:Document, filename, mediaType, sha256, size).
    std::vector<rdf::Triple> metadata() const;
};

/// Raw bytes under `<root>/<uuid>`; names are validated so nothing is ever
/// written outside the root.
class DocumentStore {
public:
    explicit DocumentStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path path_of(const std::string& id) const;

    void write(const std::string& id, std::string_view bytes) const;
    std::string read(const std::string& id) const;
    bool exists(const std::string& id) const;
    void remove(const std::string& id) const noexcept;
    std::vector<std::string> ids() const;

private:
    std::filesystem::path root_;
};

rdf::Iri document_iri(const rdf::Iri& base, const std::string& id);

/// Writes the file, then inserts metadata into the owner's graph. If the
/// metadata commit fails the file is removed again.
DocumentRecord store_document(rdf::QuadStore& store, const DocumentStore& files, const rdf::Iri& base,
                              const ActorId& actor, std::string_view bytes, const std::string& filename,
                              const std::string& media_type);

/// Deletes a document's statements and file. Throws PermissionError unless
/// `owner` holds it and ConflictError while a package still includes it.
void remove_document(rdf::QuadStore& store, const DocumentStore& files, const ActorId& owner, const rdf::Iri& iri);

/// Reads a record back from its metadata; nullopt if no graph types `iri`
/// as cas:Document.
std::optional<DocumentRecord> find_document(const rdf::QuadStore& store, const rdf::Iri& iri);
std::vector<DocumentRecord> documents_of(const rdf::QuadStore& store, const ActorId& actor);

/// Trailing uuid of a /documents/<uuid> or /dossiers/<uuid> IRI.
std::optional<std::string> trailing_uuid(const rdf::Iri& iri);

}  // namespace webcas::cas
