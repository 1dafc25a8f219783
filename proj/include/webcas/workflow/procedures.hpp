#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "webcas/cas/service.hpp"
#include "webcas/exchange/package.hpp"

namespace webcas::workflow {

struct UploadedDocument {
    std::string filename;
    std::string media_type;
    std::string bytes;
};

using Statements = std::vector<std::pair<rdf::Iri, rdf::Term>>;

struct BachelorDossierInput {
    /// Literal attributes of the graduate, stored on <dossier#student>.
    webid::Attributes student;
    /// Statements on <dossier#degree>; at least one is required.
    Statements degree;
    std::vector<UploadedDocument> documents;
};

/// Splits a Turtle description (parsed against the new dossier IRI) into
/// the <#student> and <#degree> parts. Other subjects are rejected.
BachelorDossierInput bachelor_input_from_turtle(const rdf::Graph& description, const rdf::Iri& dossier);

/// Stores the documents and a cas:BachelorDossier package in the issuer's
/// graph. Throws ValidationError when no degree statement is given.
rdf::Iri issue_bachelor_dossier(cas::Service& bachelor, const cas::ActorId& issuer, const BachelorDossierInput& input,
                                const std::optional<rdf::Iri>& dossier = std::nullopt);

struct Selection {
    std::set<rdf::Iri> document_iris;
    /// Predicates whose statements are copied from the student's graph.
    std::set<rdf::Iri> statement_filter;
};

/// Reads `_:x cas:includesDocument <doc> ; cas:includesPredicate <p>` (any
/// subject, any number of each).
Selection selection_from_graph(const rdf::Graph& graph);
rdf::Graph selection_to_graph(const Selection& selection);

/// New cas:ApplicationDossier in the student's graph linking exactly the
/// selected documents. Each selected statement (s, p, o) is copied onto a
/// dossier-local node <dossier#sN> carrying cas:copyOf s. Never copied:
/// s:permission, blank-node objects, statements about or pointing at other
/// applications, decisions or unselected documents.
/// Throws PermissionError when a document is not the student's.
rdf::Iri compose_application(cas::Service& student_cas, const cas::ActorId& student, const Selection& selection);

enum class Outcome { Accepted, Rejected };
std::string_view to_string(Outcome o) noexcept;
Outcome outcome_from_string(std::string_view text);
rdf::Iri outcome_iri(Outcome o);

struct Decision {
    rdf::Iri iri;
    Outcome outcome;
    rdf::Literal comment;
    /// The application as the student published it (its cas:importedFrom).
    rdf::Iri application_ref;
};

/// Stores a cas:Decision package answering `application` (an application
/// dossier in the master's graph) in the master's graph.
Decision record_decision(cas::Service& master, const cas::ActorId& actor, const rdf::Iri& application, Outcome outcome,
                         const std::string& comment);

/// Reads a decision package (local or imported) back.
std::optional<Decision> read_decision(const rdf::Graph& graph, const rdf::Iri& decision);

/// Package nodes of one kind in an actor's graph, in IRI order.
std::vector<rdf::Iri> packages_of_kind(const rdf::Graph& graph, const rdf::Iri& kind);

}  // namespace webcas::workflow
