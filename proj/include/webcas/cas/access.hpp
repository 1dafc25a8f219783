#pragma once

#include <optional>
#include <string_view>

#include "webcas/cas/actor.hpp"
#include "webcas/rdf/store.hpp"

namespace webcas::cas {

enum class AccessDecision {
    AllowOwner,
    AllowGranted,
    DenyNoPermission,
    DenyNoSuchResource,
    DenyUnauthenticated,
};

constexpr bool allowed(AccessDecision d) noexcept {
    return d == AccessDecision::AllowOwner || d == AccessDecision::AllowGranted;
}

std::string_view to_string(AccessDecision d) noexcept;

/// Graph in which `resource` is typed (rdf:type), if exactly one such graph exists.
std::optional<rdf::Iri> owner_graph(const rdf::QuadStore& store, const rdf::Iri& resource);

/// Default-deny check. Owner: the requester is the s:webid of the graph's
/// actor node <graph#>. Granted: (resource, s:permission, requester)
/// lies in that same graph.
AccessDecision check_access(const rdf::QuadStore& store, const rdf::Iri& resource,
                            const std::optional<rdf::Iri>& requester);

/// Adds/removes (resource, s:permission, grantee) in the owner's graph.
/// Both are idempotent. Throws PermissionError when `resource` is not typed
/// in `owner`'s graph.
void grant_permission(rdf::QuadStore& store, const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee);
void revoke_permission(rdf::QuadStore& store, const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee);

/// WebIDs currently holding a grant on `resource`.
std::vector<rdf::Iri> grantees(const rdf::QuadStore& store, const rdf::Iri& resource);

}  // namespace webcas::cas
