#include "webcas/exchange/package.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "webcas/crypto.hpp"
#include "webcas/exchange/zip.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::exchange {

namespace vocab = rdf::vocab;
using rdf::Iri;
using rdf::Term;
using rdf::Triple;

namespace {

const Iri& type_() { return vocab::rdf_type(); }
Iri cas_(const char* local) { return vocab::cas(local); }

const std::string kManifest = "manifest.ttl";
const std::string kDocumentsDir = "documents/";

bool safe_document_path(std::string_view name) {
    if (!name.starts_with(kDocumentsDir)) return false;
    auto rest = name.substr(kDocumentsDir.size());
    if (rest.empty() || rest == ".") return false;
    for (unsigned char c : rest)
        if (c == '/' || c == '\\' || c < 0x20 || c == 0x7f) return false;
    return true;
}

std::optional<std::string> single_literal(const rdf::Graph& g, const Term& s, const Iri& p) {
    auto objs = g.objects(s, p);
    if (objs.size() != 1 || !objs[0].is_literal()) return std::nullopt;
    return objs[0].literal().lexical();
}

std::vector<Term> package_nodes(const rdf::Graph& manifest) {
    std::vector<Term> out;
    for (const Triple& t : manifest)
        if (t.predicate == type_() && t.object == Term(cas_("Package"))) out.push_back(t.subject);
    return out;
}

}  // namespace

const Iri& bachelor_dossier_kind() {
    static const Iri iri = cas_("BachelorDossier");
    return iri;
}
const Iri& application_dossier_kind() {
    static const Iri iri = cas_("ApplicationDossier");
    return iri;
}
const Iri& decision_kind() {
    static const Iri iri = cas_("Decision");
    return iri;
}
bool is_package_kind(const Iri& kind) {
    return kind == bachelor_dossier_kind() || kind == application_dossier_kind() || kind == decision_kind();
}

std::string Issue::to_string() const {
    std::string out = rule;
    if (!subject.empty()) out += " [" + subject + "]";
    return out + ": " + message;
}

namespace {
std::string join_issues(const std::vector<Issue>& issues) {
    std::string out = "invalid package";
    for (const auto& i : issues) out += "\n  " + i.to_string();
    return out;
}
}  // namespace

PackageError::PackageError(std::vector<Issue> issues) : ValidationError(join_issues(issues)), issues_(std::move(issues)) {}

rdf::Graph dossier_statements(const rdf::Graph& owner_graph, const Iri& dossier) {
    rdf::Graph out;
    const std::string fragment_prefix = dossier.str() + "#";
    std::set<Term> seen{Term(dossier)};
    std::deque<Term> queue{Term(dossier)};
    while (!queue.empty()) {
        Term node = queue.front();
        queue.pop_front();
        for (const Triple& t : owner_graph.with_subject(node)) {
            if (t.predicate == vocab::permission()) continue;
            out.insert(t);
            const Iri* iri = t.object.if_iri();
            const bool follow = t.object.is_blank() || (iri && iri->starts_with(fragment_prefix));
            if (follow && seen.insert(t.object).second) queue.push_back(t.object);
        }
    }
    return out;
}

std::vector<Iri> included_documents(const rdf::Graph& graph, const Iri& dossier) {
    std::vector<Iri> out;
    for (const Term& o : graph.objects(Term(dossier), cas_("includesDocument")))
        if (auto iri = o.if_iri()) out.push_back(*iri);
    std::sort(out.begin(), out.end());
    return out;
}

Package build_package(const rdf::QuadStore& store, const cas::DocumentStore& files, const Iri& dossier) {
    auto owner = cas::owner_graph(store, dossier);
    std::optional<rdf::Graph> graph = owner ? store.graph(*owner) : std::nullopt;
    if (!graph || !graph->contains(Triple(Term(dossier), type_(), Term(cas_("Package")))))
        throw NotFoundError("unknown dossier " + dossier.str());

    Package pkg;
    pkg.manifest = dossier_statements(*graph, dossier);
    for (const Iri& doc : included_documents(*graph, dossier)) {
        auto rec = cas::find_document(store, doc);
        if (!rec || rec->owner_graph != *owner) throw NotFoundError("dossier includes unknown document " + doc.str());
        for (const Triple& t : graph->with_subject(Term(doc)))
            if (t.predicate != vocab::permission()) pkg.manifest.insert(t);
        const std::string path = kDocumentsDir + rec->id;
        pkg.manifest.insert(Triple(Term(doc), cas_("archivePath"), Term(rdf::Literal(path))));
        std::string bytes = files.read(rec->id);
        if (sha256_hex(bytes) != rec->sha256) throw IoError("document file for " + doc.str() + " is corrupt");
        pkg.documents.emplace(path, std::move(bytes));
    }
    return pkg;
}

std::string export_package(const rdf::QuadStore& store, const cas::DocumentStore& files, const Iri& dossier) {
    Package pkg = build_package(store, files, dossier);
    std::vector<ZipEntry> entries;
    entries.push_back({kManifest, rdf::serialize_turtle(pkg.manifest, rdf::standard_prefixes())});
    for (auto& [path, bytes] : pkg.documents) entries.push_back({path, std::move(bytes)});
    return write_zip(entries);
}

std::string export_package(const cas::Service& service, const Iri& dossier) {
    return export_package(service.store(), service.files(), dossier);
}

namespace {

struct Checked {
    std::vector<Issue> issues;
    Package package;
};

Checked check(std::string_view bytes) {
    Checked out;
    auto& issues = out.issues;
    std::vector<ZipEntry> entries;
    try {
        entries = read_zip(bytes);
    } catch (const ZipError& e) {
        issues.push_back({"malformed-zip", "", e.what()});
        return out;
    }

    std::optional<std::string> manifest_text;
    std::map<std::string, std::string> documents;
    std::set<std::string> names;
    for (auto& e : entries) {
        if (!names.insert(e.name).second) {
            issues.push_back({"duplicate-entry", e.name, "archive entry appears more than once"});
            continue;
        }
        if (e.name == kManifest) {
            manifest_text = std::move(e.data);
        } else if (e.name.find("..") != std::string::npos || !safe_document_path(e.name)) {
            issues.push_back({"path-traversal", e.name, "entry lies outside documents/ or escapes it"});
        } else {
            documents.emplace(e.name, std::move(e.data));
        }
    }
    if (!manifest_text) {
        issues.push_back({"missing-manifest", kManifest, "archive has no manifest.ttl"});
        return out;
    }
    rdf::Graph manifest;
    try {
        manifest = rdf::parse_turtle(*manifest_text).graph;
    } catch (const ParseError& e) {
        issues.push_back({"unparseable-manifest", kManifest, e.what()});
        return out;
    }

    auto packages = package_nodes(manifest);
    std::optional<Term> package;
    if (packages.empty()) {
        issues.push_back({"package-node", "", "manifest declares no cas:Package node"});
    } else if (packages.size() > 1) {
        for (const auto& p : packages)
            issues.push_back({"package-node", rdf::to_ntriples(p), "manifest declares more than one cas:Package node"});
    } else if (!packages[0].is_iri()) {
        issues.push_back({"package-node", rdf::to_ntriples(packages[0]), "package node must be an IRI"});
    } else {
        package = packages[0];
        auto kinds = manifest.objects(*package, cas_("packageKind"));
        if (kinds.size() != 1 || !kinds[0].is_iri() || !is_package_kind(kinds[0].iri()))
            issues.push_back({"package-kind", package->iri().str(),
                              "cas:packageKind must be exactly one of BachelorDossier, ApplicationDossier, Decision"});
    }

    std::set<Term> linked;
    if (package)
        for (const Term& d : manifest.objects(*package, cas_("includesDocument"))) linked.insert(d);

    std::map<std::string, std::vector<Term>> path_owners;
    std::map<Term, std::vector<std::string>> node_paths;
    for (const Triple& t : manifest) {
        if (t.predicate != cas_("archivePath")) continue;
        const std::string node = rdf::to_ntriples(t.subject);
        if (!t.object.is_literal()) {
            issues.push_back({"archive-path", node, "cas:archivePath must be a literal"});
            continue;
        }
        path_owners[t.object.literal().lexical()].push_back(t.subject);
        node_paths[t.subject].push_back(t.object.literal().lexical());
    }
    for (const auto& [node, paths] : node_paths)
        if (paths.size() > 1)
            issues.push_back({"archive-path", rdf::to_ntriples(node), "document has more than one cas:archivePath"});
    for (const auto& [path, owners] : path_owners) {
        if (owners.size() > 1)
            issues.push_back({"duplicate-path", path, "archive path claimed by more than one document"});
        auto entry = documents.find(path);
        if (entry == documents.end()) {
            if (!names.contains(path)) issues.push_back({"missing-entry", path, "manifest names an absent entry"});
            continue;
        }
        for (const Term& node : owners) {
            if (!linked.contains(node))
                issues.push_back({"unlinked-document", rdf::to_ntriples(node),
                                  "document is not linked from the package by cas:includesDocument"});
            auto sha = single_literal(manifest, node, cas_("sha256"));
            if (!sha)
                issues.push_back({"sha256-missing", path, "document lacks a single cas:sha256"});
            else if (*sha != sha256_hex(entry->second))
                issues.push_back({"sha256-mismatch", path, "entry bytes do not match cas:sha256"});
        }
    }
    for (const Term& d : linked)
        if (!node_paths.contains(d))
            issues.push_back({"missing-entry", rdf::to_ntriples(d), "included document has no cas:archivePath"});
    for (const auto& [path, bytes] : documents)
        if (!path_owners.contains(path))
            issues.push_back({"orphan-entry", path, "archive entry not referenced by the manifest"});

    out.package.manifest = std::move(manifest);
    out.package.documents = std::move(documents);
    return out;
}

}  // namespace

std::vector<Issue> validate_package(std::string_view bytes) { return check(bytes).issues; }

Package read_package(std::string_view bytes) {
    auto checked = check(bytes);
    if (!checked.issues.empty()) throw PackageError(std::move(checked.issues));
    return std::move(checked.package);
}

namespace {

using DocKey = std::set<std::pair<std::string, std::string>>;

DocKey incoming_key(const rdf::Graph& manifest, const Term& package) {
    DocKey key;
    for (const Term& d : manifest.objects(package, cas_("includesDocument")))
        key.emplace(single_literal(manifest, d, cas_("sha256")).value_or(""), rdf::to_ntriples(d));
    return key;
}

/// A local package already imported from the same source with the same documents.
std::optional<Iri> find_duplicate(const rdf::Graph& graph, const Iri& source, const DocKey& key) {
    for (const Triple& t : graph) {
        if (t.predicate != cas_("importedFrom") || t.object != Term(source) || !t.subject.is_iri()) continue;
        if (!graph.contains(Triple(t.subject, type_(), Term(cas_("Package"))))) continue;
        DocKey local;
        for (const Term& d : graph.objects(t.subject, cas_("includesDocument"))) {
            auto from = graph.objects(d, cas_("importedFrom"));
            local.emplace(single_literal(graph, d, cas_("sha256")).value_or(""),
                          from.size() == 1 ? rdf::to_ntriples(from[0]) : std::string());
        }
        if (local == key) return t.subject.iri();
    }
    return std::nullopt;
}

bool regenerated_metadata(const Triple& t) {
    static const std::set<Iri> preds{cas_("filename"), cas_("mediaType"), cas_("sha256"), cas_("size"),
                                     cas_("archivePath")};
    return preds.contains(t.predicate) || (t.predicate == type_() && t.object == Term(cas_("Document")));
}

}  // namespace

ImportReport import_package(rdf::QuadStore& store, const cas::DocumentStore& files, const Iri& base,
                            const cas::ActorId& actor, std::string_view bytes) {
    Package pkg = read_package(bytes);
    const Term package = package_nodes(pkg.manifest).front();
    const Iri source = package.iri();

    ImportReport report;
    report.package_kind = pkg.manifest.objects(package, cas_("packageKind")).front().iri();
    report.source = source;

    if (!cas::actor_exists(store, actor)) throw NotFoundError("no actor '" + actor.slug() + "'");
    const auto key = incoming_key(pkg.manifest, package);
    const auto existing = store.graph(actor.graph_iri());
    if (auto dup = find_duplicate(*existing, source, key)) {
        report.local = *dup;
        report.warnings.push_back("duplicate: package " + source.str() + " was already imported as " + dup->str());
        return report;
    }

    const Iri local_base = cas::normalized_base(base);
    const Iri new_package = local_base.append("/dossiers/" + random_uuid());
    report.local = new_package;
    const std::string fragment_prefix = source.str() + "#";
    const std::string blank_prefix = "i" + random_uuid().substr(0, 8) + "_";

    struct StagedDoc {
        Term source;
        cas::DocumentRecord record;
        const std::string* bytes;
    };
    std::vector<StagedDoc> docs;
    std::map<Term, Term> rehomed;
    for (const Term& d : pkg.manifest.objects(package, cas_("includesDocument"))) {
        const auto path = *single_literal(pkg.manifest, d, cas_("archivePath"));
        const std::string& data = pkg.documents.at(path);
        const auto id = random_uuid();
        cas::DocumentRecord rec{
            .id = id,
            .iri = cas::document_iri(local_base, id),
            .filename = single_literal(pkg.manifest, d, cas_("filename")).value_or(path.substr(kDocumentsDir.size())),
            .media_type = single_literal(pkg.manifest, d, cas_("mediaType")).value_or("application/octet-stream"),
            .sha256 = sha256_hex(data),
            .size = data.size(),
            .owner_graph = actor.graph_iri()};
        rehomed.emplace(d, Term(rec.iri));
        docs.push_back({d, std::move(rec), &data});
    }

    auto map_term = [&](const Term& t) -> std::optional<Term> {
        if (t.is_blank()) return Term(rdf::BlankNode{blank_prefix + t.blank().label});
        if (auto it = rehomed.find(t); it != rehomed.end()) return it->second;
        const Iri* iri = t.if_iri();
        if (!iri) return t;
        if (*iri == source) return Term(new_package);
        if (iri->starts_with(fragment_prefix))
            return Term(Iri(new_package.str() + "#" + iri->str().substr(fragment_prefix.size())));
        return t;
    };
    // Subjects inside our own IRI space that were not re-homed would let a
    // package rewrite local state (actor nodes, other dossiers).
    const std::string own_space = local_base.str() + "/";
    auto foreign_local = [&](const Term& original, const Term& mapped) {
        return mapped == original && mapped.is_iri() && mapped.iri().starts_with(own_space);
    };

    std::vector<rdf::Quad> quads;
    std::size_t dropped_permissions = 0, dropped_local = 0;
    for (const Triple& t : pkg.manifest) {
        if (t.predicate == vocab::permission()) {
            ++dropped_permissions;
            continue;
        }
        const bool is_doc = rehomed.contains(t.subject);
        if (is_doc && regenerated_metadata(t)) continue;
        if (t.predicate == cas_("archivePath")) continue;
        auto s = *map_term(t.subject);
        if (foreign_local(t.subject, s)) {
            ++dropped_local;
            continue;
        }
        quads.emplace_back(actor.graph_iri(), s, t.predicate, *map_term(t.object));
    }
    quads.emplace_back(actor.graph_iri(), Term(new_package), cas_("importedFrom"), Term(source));
    for (const auto& d : docs) {
        for (const Triple& t : d.record.metadata()) quads.emplace_back(actor.graph_iri(), t);
        quads.emplace_back(actor.graph_iri(), Term(d.record.iri), cas_("importedFrom"), d.source);
    }
    if (dropped_permissions)
        report.warnings.push_back("dropped " + std::to_string(dropped_permissions) + " s:permission statement(s)");
    if (dropped_local)
        report.warnings.push_back("dropped " + std::to_string(dropped_local) +
                                  " statement(s) about existing local resources");

    std::vector<std::string> staged;
    try {
        for (const auto& d : docs) {
            files.write(d.record.id, *d.bytes);
            staged.push_back(d.record.id);
        }
        auto change = store.update([&](rdf::Transaction& tx) {
            if (tx.match({actor.graph_iri(), Term(actor.node()), vocab::webid(), std::nullopt}).empty())
                throw NotFoundError("no actor '" + actor.slug() + "'");
            for (auto& q : quads) tx.insert(q);
        });
        report.triples_added = change.added;
    } catch (...) {
        for (const auto& id : staged) files.remove(id);
        throw;
    }
    report.documents_added = docs.size();
    return report;
}

ImportReport import_package(cas::Service& service, const cas::ActorId& actor, std::string_view bytes) {
    auto report = import_package(service.store(), service.files(), service.base(), actor, bytes);
    service.persist();
    return report;
}

}  // namespace webcas::exchange
