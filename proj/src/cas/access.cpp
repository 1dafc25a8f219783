#include "webcas/cas/access.hpp"

#include "webcas/error.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::cas {

namespace vocab = rdf::vocab;

std::string_view to_string(AccessDecision d) noexcept {
    switch (d) {
        case AccessDecision::AllowOwner: return "Allow(Owner)";
        case AccessDecision::AllowGranted: return "Allow(Granted)";
        case AccessDecision::DenyNoPermission: return "Deny(NoPermission)";
        case AccessDecision::DenyNoSuchResource: return "Deny(NoSuchResource)";
        case AccessDecision::DenyUnauthenticated: return "Deny(Unauthenticated)";
    }
    return "?";
}

std::optional<rdf::Iri> owner_graph(const rdf::QuadStore& store, const rdf::Iri& resource) {
    auto typed = store.match({std::nullopt, rdf::Term(resource), vocab::rdf_type(), std::nullopt});
    std::optional<rdf::Iri> found;
    for (const auto& q : typed) {
        if (found && *found != q.graph) return std::nullopt;
        found = q.graph;
    }
    return found;
}

AccessDecision check_access(const rdf::QuadStore& store, const rdf::Iri& resource,
                            const std::optional<rdf::Iri>& requester) {
    if (!requester) return AccessDecision::DenyUnauthenticated;
    auto snapshot = store.snapshot();
    // Resolve ownership from one consistent view.
    std::optional<rdf::Iri> graph_name;
    for (const auto& [name, g] : snapshot) {
        if (g.objects(rdf::Term(resource), vocab::rdf_type()).empty()) continue;
        if (graph_name) return AccessDecision::DenyNoSuchResource;
        graph_name = name;
    }
    if (!graph_name) return AccessDecision::DenyNoSuchResource;
    const auto& g = snapshot.at(*graph_name);
    const rdf::Term actor_node(rdf::Iri(graph_name->str() + "#"));
    if (g.contains(rdf::Triple(actor_node, vocab::webid(), rdf::Term(*requester)))) return AccessDecision::AllowOwner;
    if (g.contains(rdf::Triple(rdf::Term(resource), vocab::permission(), rdf::Term(*requester))))
        return AccessDecision::AllowGranted;
    return AccessDecision::DenyNoPermission;
}

namespace {

void edit_permission(rdf::QuadStore& store, const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee,
                     bool add) {
    rdf::Quad quad(owner.graph_iri(), rdf::Term(resource), vocab::permission(), rdf::Term(grantee));
    store.update([&](rdf::Transaction& tx) {
        if (tx.match({owner.graph_iri(), rdf::Term(resource), vocab::rdf_type(), std::nullopt}).empty())
            throw PermissionError("resource " + resource.str() + " is not owned by actor '" + owner.slug() + "'");
        if (add)
            tx.insert(quad);
        else
            tx.erase(quad);
    });
}

}  // namespace

void grant_permission(rdf::QuadStore& store, const ActorId& owner, const rdf::Iri& resource, const rdf::Iri& grantee) {
    edit_permission(store, owner, resource, grantee, true);
}

void revoke_permission(rdf::QuadStore& store, const ActorId& owner, const rdf::Iri& resource,
                       const rdf::Iri& grantee) {
    edit_permission(store, owner, resource, grantee, false);
}

std::vector<rdf::Iri> grantees(const rdf::QuadStore& store, const rdf::Iri& resource) {
    std::vector<rdf::Iri> out;
    auto graph = owner_graph(store, resource);
    if (!graph) return out;
    for (const auto& q : store.match({*graph, rdf::Term(resource), vocab::permission(), std::nullopt}))
        if (auto iri = q.object.if_iri()) out.push_back(*iri);
    return out;
}

}  // namespace webcas::cas
