#include "webcas/cas/actor.hpp"

#include "webcas/error.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::cas {

namespace vocab = rdf::vocab;

bool valid_slug(std::string_view slug) noexcept {
    if (slug.empty() || slug.size() > 64) return false;
    for (char c : slug)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
    return true;
}

rdf::Iri normalized_base(const rdf::Iri& base) {
    std::string s = base.str();
    while (s.size() > 1 && s.back() == '/') s.pop_back();
    return rdf::Iri(s);
}

ActorId::ActorId(const rdf::Iri& base, std::string slug)
    : base_(normalized_base(base)), slug_(std::move(slug)), graph_(base_) {
    if (!valid_slug(slug_)) throw ValidationError("invalid actor slug '" + slug_ + "' (allowed: a-z, 0-9, -)");
    graph_ = base_.append("/graphs/" + slug_);
}

std::optional<ActorId> ActorId::from_graph(const rdf::Iri& base, const rdf::Iri& graph) {
    auto prefix = normalized_base(base).str() + "/graphs/";
    if (!graph.starts_with(prefix)) return std::nullopt;
    auto slug = graph.str().substr(prefix.size());
    if (!valid_slug(slug)) return std::nullopt;
    return ActorId(base, slug);
}

rdf::Iri ActorId::profile_document() const { return base_.append("/profile/" + slug_); }

bool actor_exists(const rdf::QuadStore& store, const ActorId& actor) {
    return !store.match({actor.graph_iri(), rdf::Term(actor.node()), vocab::webid(), std::nullopt}).empty();
}

std::pair<ActorId, webid::IdentityBundle> create_actor(rdf::QuadStore& store, const ServiceConfig& config,
                                                       const std::string& slug, const webid::Attributes& attributes,
                                                       const rdf::Iri& actor_type) {
    ActorId actor(config.base_iri, slug);
    auto taken = [&](const auto& lookup) {
        return lookup.graph(actor.graph_iri()) || lookup.graph(actor.profile_document());
    };
    if (taken(store)) throw ConflictError("actor '" + slug + "' already exists");

    std::string common_name = slug;
    for (const auto& [pred, lit] : attributes)
        if (pred == vocab::foaf("name")) common_name = lit.lexical();
    webid::Attributes profile_attrs{{vocab::foaf("name"), rdf::Literal(common_name)}};
    // Key generation happens outside the store lock.
    auto bundle = webid::generate_identity(common_name, actor.webid(), 365, profile_attrs);

    std::vector<rdf::Quad> quads;
    const rdf::Term node(actor.node());
    quads.emplace_back(actor.graph_iri(), node, vocab::rdf_type(), rdf::Term(actor_type));
    quads.emplace_back(actor.graph_iri(), node, vocab::webid(), rdf::Term(actor.webid()));
    for (const auto& [pred, lit] : attributes) quads.emplace_back(actor.graph_iri(), node, pred, rdf::Term(lit));
    for (const auto& t : bundle.profile) quads.emplace_back(actor.profile_document(), t);

    store.update([&](rdf::Transaction& tx) {
        if (tx.graph(actor.graph_iri()) || tx.graph(actor.profile_document()))
            throw ConflictError("actor '" + slug + "' already exists");
        for (auto& q : quads) tx.insert(q);
    });
    return {actor, std::move(bundle)};
}

}  // namespace webcas::cas
