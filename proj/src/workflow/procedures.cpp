#include "webcas/workflow/procedures.hpp"

#include <algorithm>
#include <map>

#include "webcas/crypto.hpp"
#include "webcas/rdf/vocab.hpp"

namespace webcas::workflow {

namespace vocab = rdf::vocab;
using rdf::Iri;
using rdf::Quad;
using rdf::Term;
using rdf::Triple;

namespace {

Iri fragment(const Iri& base, const std::string& name) { return Iri(base.str() + "#" + name); }

void require_package_iri(const cas::Service& service, const Iri& dossier) {
    const std::string prefix = service.base().str() + "/dossiers/";
    if (!dossier.starts_with(prefix) || !is_uuid(dossier.str().substr(prefix.size())))
        throw ValidationError("package IRI must be " + prefix + "<uuid>: " + dossier.str());
}

/// Writes staged document files, commits `quads` plus their metadata in one
/// update, and removes the files again if the commit fails.
void commit_with_documents(cas::Service& service, const cas::ActorId& actor, std::vector<Quad> quads,
                           const std::vector<std::pair<cas::DocumentRecord, const std::string*>>& docs,
                           const Iri& fresh_subject) {
    for (const auto& [rec, bytes] : docs)
        for (const auto& t : rec.metadata()) quads.emplace_back(actor.graph_iri(), t);
    std::vector<std::string> written;
    try {
        for (const auto& [rec, bytes] : docs) {
            service.files().write(rec.id, *bytes);
            written.push_back(rec.id);
        }
        service.store().update([&](rdf::Transaction& tx) {
            if (tx.match({actor.graph_iri(), Term(actor.node()), vocab::webid(), std::nullopt}).empty())
                throw NotFoundError("no actor '" + actor.slug() + "'");
            if (!tx.match({std::nullopt, Term(fresh_subject), std::nullopt, std::nullopt}).empty())
                throw ConflictError(fresh_subject.str() + " already exists");
            for (auto& q : quads) tx.insert(q);
        });
    } catch (...) {
        for (const auto& id : written) service.files().remove(id);
        throw;
    }
    service.persist();
}

}  // namespace

BachelorDossierInput bachelor_input_from_turtle(const rdf::Graph& description, const Iri& dossier) {
    BachelorDossierInput input;
    const Term student(fragment(dossier, "student"));
    const Term degree(fragment(dossier, "degree"));
    for (const Triple& t : description) {
        if (t.subject == student) {
            if (!t.object.is_literal())
                throw ValidationError("student attribute " + t.predicate.str() + " must be a literal");
            input.student.emplace_back(t.predicate, t.object.literal());
        } else if (t.subject == degree) {
            if (t.object.is_blank()) throw ValidationError("degree statements may not use blank nodes");
            if (t.predicate == vocab::rdf_type()) continue;
            input.degree.emplace_back(t.predicate, t.object);
        } else {
            throw ValidationError("unexpected subject " + rdf::to_ntriples(t.subject) +
                                  " (only <#student> and <#degree> are allowed)");
        }
    }
    return input;
}

Iri issue_bachelor_dossier(cas::Service& bachelor, const cas::ActorId& issuer, const BachelorDossierInput& input,
                           const std::optional<Iri>& requested) {
    if (input.degree.empty()) throw ValidationError("a bachelor dossier must assert at least one degree statement");
    for (const auto& [p, o] : input.degree)
        if (o.is_blank()) throw ValidationError("degree statements may not use blank nodes");
    for (const auto& doc : input.documents) {
        if (doc.bytes.empty()) throw ValidationError("document " + doc.filename + " is empty");
        if (doc.filename.empty()) throw ValidationError("document without filename");
    }
    const Iri dossier = requested ? *requested : bachelor.mint_package_iri();
    require_package_iri(bachelor, dossier);

    const Iri g = issuer.graph_iri();
    const Term d(dossier);
    const Term degree(fragment(dossier, "degree"));
    const Term student(fragment(dossier, "student"));
    std::vector<Quad> quads{
        {g, d, vocab::rdf_type(), Term(vocab::cas("Package"))},
        {g, d, vocab::cas("packageKind"), Term(exchange::bachelor_dossier_kind())},
        {g, d, vocab::cas("issuedBy"), Term(issuer.webid())},
        {g, d, vocab::cas("degree"), degree},
        {g, degree, vocab::rdf_type(), Term(vocab::cas("Degree"))},
    };
    for (const auto& [p, o] : input.degree) quads.emplace_back(g, degree, p, o);
    if (!input.student.empty()) {
        quads.emplace_back(g, d, vocab::cas("student"), student);
        for (const auto& [p, lit] : input.student) quads.emplace_back(g, student, p, Term(lit));
    }
    std::vector<std::pair<cas::DocumentRecord, const std::string*>> docs;
    for (const auto& doc : input.documents) {
        const auto id = random_uuid();
        cas::DocumentRecord rec{.id = id,
                                .iri = cas::document_iri(bachelor.base(), id),
                                .filename = doc.filename,
                                .media_type = doc.media_type.empty() ? "application/octet-stream" : doc.media_type,
                                .sha256 = sha256_hex(doc.bytes),
                                .size = doc.bytes.size(),
                                .owner_graph = g};
        quads.emplace_back(g, d, vocab::cas("includesDocument"), Term(rec.iri));
        docs.emplace_back(std::move(rec), &doc.bytes);
    }
    commit_with_documents(bachelor, issuer, std::move(quads), docs, dossier);
    return dossier;
}

Selection selection_from_graph(const rdf::Graph& graph) {
    Selection s;
    for (const Triple& t : graph) {
        const Iri* o = t.object.if_iri();
        if (t.predicate == vocab::cas("includesDocument") && o)
            s.document_iris.insert(*o);
        else if (t.predicate == vocab::cas("includesPredicate") && o)
            s.statement_filter.insert(*o);
        else
            throw ValidationError("selection may only use cas:includesDocument and cas:includesPredicate with IRIs");
    }
    return s;
}

rdf::Graph selection_to_graph(const Selection& selection) {
    rdf::Graph g;
    const Term sel(rdf::BlankNode{"selection"});
    for (const auto& d : selection.document_iris) g.insert(Triple(sel, vocab::cas("includesDocument"), Term(d)));
    for (const auto& p : selection.statement_filter) g.insert(Triple(sel, vocab::cas("includesPredicate"), Term(p)));
    return g;
}

std::vector<Iri> packages_of_kind(const rdf::Graph& graph, const Iri& kind) {
    std::vector<Iri> out;
    for (const Triple& t : graph)
        if (t.predicate == vocab::cas("packageKind") && t.object == Term(kind) && t.subject.is_iri() &&
            graph.contains(Triple(t.subject, vocab::rdf_type(), Term(vocab::cas("Package")))))
            out.push_back(t.subject.iri());
    std::sort(out.begin(), out.end());
    return out;
}

Iri compose_application(cas::Service& student_cas, const cas::ActorId& student, const Selection& selection) {
    auto graph = student_cas.store().graph(student.graph_iri());
    if (!graph || !cas::actor_exists(student_cas.store(), student))
        throw NotFoundError("no actor '" + student.slug() + "'");
    for (const Iri& doc : selection.document_iris) {
        auto rec = cas::find_document(student_cas.store(), doc);
        if (!rec || rec->owner_graph != student.graph_iri())
            throw PermissionError("document " + doc.str() + " is not owned by actor '" + student.slug() + "'");
    }

    // Other applications and decisions never feed a new application, neither
    // as subjects nor as referenced objects; nor do unselected documents.
    std::vector<std::string> excluded;
    for (const auto* kind : {&exchange::application_dossier_kind(), &exchange::decision_kind()})
        for (const Iri& p : packages_of_kind(*graph, *kind)) excluded.push_back(p.str());
    std::set<Iri> unselected;
    for (const auto& rec : cas::documents_of(student_cas.store(), student))
        if (!selection.document_iris.contains(rec.iri)) unselected.insert(rec.iri);
    auto is_excluded = [&](const Term& s) {
        const Iri* iri = s.if_iri();
        if (!iri) return false;
        if (unselected.contains(*iri)) return true;
        for (const auto& e : excluded)
            if (iri->str() == e || iri->starts_with(e + "#")) return true;
        return false;
    };

    std::map<Term, std::vector<Triple>> copied;
    for (const Triple& t : *graph) {
        if (!selection.statement_filter.contains(t.predicate) || t.predicate == vocab::permission()) continue;
        if (t.object.is_blank() || is_excluded(t.subject) || is_excluded(t.object)) continue;
        copied[t.subject].push_back(t);
    }
    std::vector<Term> subjects;
    for (const auto& [s, ts] : copied) subjects.push_back(s);
    std::sort(subjects.begin(), subjects.end(),
              [](const Term& a, const Term& b) { return rdf::to_ntriples(a) < rdf::to_ntriples(b); });

    const Iri dossier = student_cas.mint_package_iri();
    const Iri g = student.graph_iri();
    const Term d(dossier);
    std::vector<Quad> quads{
        {g, d, vocab::rdf_type(), Term(vocab::cas("Package"))},
        {g, d, vocab::cas("packageKind"), Term(exchange::application_dossier_kind())},
        {g, d, vocab::cas("applicant"), Term(student.webid())},
    };
    for (const Iri& doc : selection.document_iris) quads.emplace_back(g, d, vocab::cas("includesDocument"), Term(doc));
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const Term node(fragment(dossier, "s" + std::to_string(i)));
        quads.emplace_back(g, d, vocab::cas("statement"), node);
        if (subjects[i].is_iri()) quads.emplace_back(g, node, vocab::cas("copyOf"), subjects[i]);
        for (const Triple& t : copied[subjects[i]]) quads.emplace_back(g, node, t.predicate, t.object);
    }
    commit_with_documents(student_cas, student, std::move(quads), {}, dossier);
    return dossier;
}

std::string_view to_string(Outcome o) noexcept { return o == Outcome::Accepted ? "Accepted" : "Rejected"; }

Outcome outcome_from_string(std::string_view text) {
    if (text == "Accepted" || text == "accepted") return Outcome::Accepted;
    if (text == "Rejected" || text == "rejected") return Outcome::Rejected;
    throw ValidationError("outcome must be Accepted or Rejected, got '" + std::string(text) + "'");
}

Iri outcome_iri(Outcome o) { return vocab::cas(o == Outcome::Accepted ? "Accepted" : "Rejected"); }

Decision record_decision(cas::Service& master, const cas::ActorId& actor, const Iri& application, Outcome outcome,
                         const std::string& comment) {
    auto graph = master.store().graph(actor.graph_iri());
    if (!graph || !graph->contains(Triple(Term(application), vocab::cas("packageKind"),
                                          Term(exchange::application_dossier_kind()))))
        throw NotFoundError("no application dossier " + application.str() + " in actor '" + actor.slug() + "'");
    auto from = graph->objects(Term(application), vocab::cas("importedFrom"));
    const Iri ref = from.size() == 1 && from[0].is_iri() ? from[0].iri() : application;

    Decision decision{master.mint_package_iri(), outcome, rdf::Literal(comment), ref};
    const Iri g = actor.graph_iri();
    const Term d(decision.iri);
    std::vector<Quad> quads{
        {g, d, vocab::rdf_type(), Term(vocab::cas("Package"))},
        {g, d, vocab::cas("packageKind"), Term(exchange::decision_kind())},
        {g, d, vocab::cas("outcome"), Term(outcome_iri(outcome))},
        {g, d, vocab::cas("comment"), Term(decision.comment)},
        {g, d, vocab::cas("answers"), Term(ref)},
        {g, d, vocab::cas("decidedBy"), Term(actor.webid())},
    };
    commit_with_documents(master, actor, std::move(quads), {}, decision.iri);
    return decision;
}

std::optional<Decision> read_decision(const rdf::Graph& graph, const Iri& decision) {
    const Term d(decision);
    if (!graph.contains(Triple(d, vocab::cas("packageKind"), Term(exchange::decision_kind())))) return std::nullopt;
    auto outcome = graph.objects(d, vocab::cas("outcome"));
    auto comment = graph.objects(d, vocab::cas("comment"));
    auto answers = graph.objects(d, vocab::cas("answers"));
    if (outcome.size() != 1 || answers.size() != 1 || !answers[0].is_iri()) return std::nullopt;
    Outcome o;
    if (outcome[0] == Term(outcome_iri(Outcome::Accepted)))
        o = Outcome::Accepted;
    else if (outcome[0] == Term(outcome_iri(Outcome::Rejected)))
        o = Outcome::Rejected;
    else
        return std::nullopt;
    rdf::Literal text(comment.size() == 1 && comment[0].is_literal() ? comment[0].literal() : rdf::Literal(""));
    return Decision{decision, o, text, answers[0].iri()};
}

}  // namespace webcas::workflow
