#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "webcas/cas/service.hpp"
#include "webcas/error.hpp"
#include "webcas/rdf/graph.hpp"

namespace webcas::exchange {

/// Package kinds (cas:packageKind values).
const rdf::Iri& bachelor_dossier_kind();
const rdf::Iri& application_dossier_kind();
const rdf::Iri& decision_kind();
bool is_package_kind(const rdf::Iri& kind);

struct Issue {
    std::string rule;
    /// Offending IRI or archive path; empty when the issue is archive-wide.
    std::string subject;
    std::string message;

    std::string to_string() const;
};

/// Raised by import_package when validation fails; carries every issue.
class PackageError : public ValidationError {
public:
    explicit PackageError(std::vector<Issue> issues);
    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    std::vector<Issue> issues_;
};

struct Package {
    rdf::Graph manifest;
    /// archive path -> bytes
    std::map<std::string, std::string> documents;
};

struct ImportReport {
    std::size_t triples_added = 0;
    std::size_t documents_added = 0;
    rdf::Iri package_kind{"urn:x-webcas:none"};
    /// The package node as exported and its re-homed local IRI.
    rdf::Iri source{"urn:x-webcas:none"};
    rdf::Iri local{"urn:x-webcas:none"};
    std::vector<std::string> warnings;
};

/// Statements describing `dossier` inside its owner's graph: the dossier's
/// own triples plus, transitively, those of blank nodes and of `<dossier#...>`
/// nodes it points to. s:permission triples are left out.
rdf::Graph dossier_statements(const rdf::Graph& owner_graph, const rdf::Iri& dossier);

/// Documents linked by cas:includesDocument, in IRI order.
std::vector<rdf::Iri> included_documents(const rdf::Graph& graph, const rdf::Iri& dossier);

/// The manifest of `dossier` without document bytes (see export_package).
Package build_package(const rdf::QuadStore& store, const cas::DocumentStore& files, const rdf::Iri& dossier);

/// ZIP with manifest.ttl first, then documents/<uuid> per included document.
/// Throws NotFoundError for an unknown dossier or a missing document file.
std::string export_package(const rdf::QuadStore& store, const cas::DocumentStore& files, const rdf::Iri& dossier);
std::string export_package(const cas::Service& service, const rdf::Iri& dossier);

std::vector<Issue> validate_package(std::string_view bytes);

/// Validates, stages document files, then commits all triples in one store
/// update. On any failure the store and the files directory are unchanged.
ImportReport import_package(rdf::QuadStore& store, const cas::DocumentStore& files, const rdf::Iri& base,
                            const cas::ActorId& actor, std::string_view bytes);
ImportReport import_package(cas::Service& service, const cas::ActorId& actor, std::string_view bytes);

/// Parsed manifest and entries of an archive that passed validation.
Package read_package(std::string_view bytes);

}  // namespace webcas::exchange
