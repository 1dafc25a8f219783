#pragma once

#include <optional>
#include <string>
#include <utility>

#include "webcas/cas/config.hpp"
#include "webcas/rdf/store.hpp"
#include "webcas/webid/identity.hpp"

namespace webcas::cas {

/// An actor hosted by one CAS; slug and graph IRI determine each other
/// under a fixed base IRI.
class ActorId {
public:
    /// Throws ValidationError unless `slug` matches [a-z0-9-]+.
    ActorId(const rdf::Iri& base, std::string slug);
    static std::optional<ActorId> from_graph(const rdf::Iri& base, const rdf::Iri& graph);

    const std::string& slug() const noexcept { return slug_; }
    const rdf::Iri& graph_iri() const noexcept { return graph_; }
    /// The actor's own node inside its graph: <graph#>.
    rdf::Iri node() const { return rdf::Iri(graph_.str() + "#"); }
    rdf::Iri webid() const { return rdf::Iri(profile_document().str() + "#id"); }
    /// Named graph holding the published FOAF profile; also the profile URL.
    rdf::Iri profile_document() const;

    friend bool operator==(const ActorId&, const ActorId&) = default;

private:
    rdf::Iri base_;
    std::string slug_;
    rdf::Iri graph_;
};

bool valid_slug(std::string_view slug) noexcept;

/// Base IRI with any trailing '/' removed.
rdf::Iri normalized_base(const rdf::Iri& base);

/// Creates the actor graph (actor node typed `actor_type`, its s:webid and
/// one triple per attribute) and the profile graph, after generating the
/// actor's identity. Throws ConflictError for a used slug; the store is then
/// unchanged.
std::pair<ActorId, webid::IdentityBundle> create_actor(rdf::QuadStore& store, const ServiceConfig& config,
                                                       const std::string& slug, const webid::Attributes& attributes,
                                                       const rdf::Iri& actor_type);

bool actor_exists(const rdf::QuadStore& store, const ActorId& actor);

}  // namespace webcas::cas
