#include "webcas/workflow/scenario.hpp"

#include <json.hpp>

#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/server/client.hpp"
#include "webcas/server/server.hpp"

namespace webcas::workflow {

namespace fs = std::filesystem;
namespace vocab = rdf::vocab;
using json = nlohmann::json;
using rdf::Iri;
using rdf::Literal;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
    }
    return out;
}

}  // namespace

ScenarioFixtures ScenarioFixtures::defaults() {
    ScenarioFixtures f;
    f.bachelor.slug = "bfh";
    f.bachelor.attributes = {{vocab::foaf("name"), Literal("Bachelor University")}};
    f.bachelor.documents = {"diploma.pdf", "transcript.pdf"};
    f.student.slug = "stu";
    f.student.attributes = {{vocab::student("name"), Literal("Dent")},
                            {vocab::student("vorname"), Literal("Stu")},
                            {vocab::student("email"), Literal("stu.dent@example.org")},
                            {vocab::student("matrikelnummer"), Literal("1-234-56")}};
    f.student.documents = {"cv.pdf"};
    f.master.slug = "hmsc";
    f.master.attributes = {{vocab::foaf("name"), Literal("Master School")}};
    f.degree_title = "Bachelor of Science in Computer Science";
    f.selection_documents = {"diploma.pdf", "cv.pdf"};
    f.selection_predicates = {vocab::student("name"), vocab::student("vorname"), vocab::student("matrikelnummer"),
                              vocab::cas("title")};
    f.outcome = Outcome::Accepted;
    f.comment = "Admitted to the master programme";
    return f;
}

ScenarioFixtures ScenarioFixtures::from(const KeyValueConfig& kv, const fs::path& relative_to) {
    kv.reject_unknown({"data_dir", "documents_dir", "bachelor.listen", "student.listen", "master.listen",
                       "bachelor.slug", "student.slug", "master.slug", "bachelor.name", "master.name",
                       "student.name", "student.vorname", "student.email", "student.matrikelnummer", "degree.title",
                       "bachelor.documents", "student.documents", "selection.documents", "selection.predicates",
                       "master.webid", "student.webid", "outcome", "comment"});
    auto f = defaults();
    auto path = [&](const std::string& key) {
        fs::path p = kv.require(key);
        return p.is_relative() && !relative_to.empty() ? relative_to / p : p;
    };
    if (kv.has("data_dir")) f.data_dir = path("data_dir");
    if (kv.has("documents_dir")) f.documents_dir = path("documents_dir");
    for (auto [name, role] : {std::pair{"bachelor", &f.bachelor}, {"student", &f.student}, {"master", &f.master}}) {
        const std::string n(name);
        role->listen = kv.get_or(n + ".listen", role->listen);
        split_host_port(role->listen);
        role->slug = kv.get_or(n + ".slug", role->slug);
        if (kv.has(n + ".documents")) role->documents = split_list(kv.require(n + ".documents"));
        if (kv.has(n + ".webid")) role->webid_override = Iri(kv.require(n + ".webid"));
    }
    for (auto [key, role] : {std::pair{"bachelor.name", &f.bachelor}, {"master.name", &f.master}})
        if (kv.has(key)) role->attributes = {{vocab::foaf("name"), Literal(kv.require(key))}};
    for (auto& [p, value] : f.student.attributes) {
        const std::string local = p.str().substr(std::string(vocab::kStudentNs).size());
        if (kv.has("student." + local)) value = Literal(kv.require("student." + local));
    }
    f.degree_title = kv.get_or("degree.title", f.degree_title);
    if (kv.has("selection.documents")) f.selection_documents = split_list(kv.require("selection.documents"));
    if (kv.has("selection.predicates")) {
        f.selection_predicates.clear();
        for (const auto& p : split_list(kv.require("selection.predicates"))) f.selection_predicates.insert(vocab::expand(p));
    }
    if (kv.has("outcome")) f.outcome = outcome_from_string(kv.require("outcome"));
    f.comment = kv.get_or("comment", f.comment);
    return f;
}

ScenarioFixtures ScenarioFixtures::load(const fs::path& path) {
    return from(KeyValueConfig::load(path), path.parent_path());
}

std::string TranscriptEntry::line() const { return timestamp + "\t" + actor + "\t" + event + "\t" + result; }

namespace {

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

std::string one_line(std::string text) {
    for (char& c : text)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    while (!text.empty() && text.back() == ' ') text.pop_back();
    return text;
}

std::string nt(const Iri& iri) { return "<" + iri.str() + ">"; }

std::string last_segment(const std::string& iri) { return iri.substr(iri.rfind('/') + 1); }

struct Instance {
    std::unique_ptr<cas::Service> service;
    std::unique_ptr<server::CasServer> server;
    cas::ActorId actor{Iri("https://invalid"), "x"};
    std::optional<webid::IdentityBundle> identity;
};

class Run {
public:
    Run(const ScenarioFixtures& f, const std::function<void(const TranscriptEntry&)>& on_entry)
        : f_(f), on_entry_(on_entry) {}

    Transcript execute() {
        prepare();
        step1_issue();
        step2_import();
        step3_compose();
        step4_denied_fetch();
        step5_grant_dossier();
        step6_fetch();
        step7_decide();
        step8_denied_retrieve();
        step9_grant_decision();
        step10_retrieve();
        return transcript_;
    }

    ~Run() {
        for (auto* i : {&master_, &student_, &bachelor_})
            if (i->server) i->server->stop();
        if (temporary_) {
            std::error_code ec;
            fs::remove_all(root_, ec);
        }
    }

private:
    const ScenarioFixtures& f_;
    const std::function<void(const TranscriptEntry&)>& on_entry_;
    Transcript transcript_;
    fs::path root_;
    bool temporary_ = false;
    fs::path ca_bundle_;
    Instance bachelor_, student_, master_;

    Iri bachelor_dossier_{"urn:x-webcas:none"};
    Iri student_bachelor_copy_{"urn:x-webcas:none"};
    Iri application_{"urn:x-webcas:none"};
    Iri master_application_{"urn:x-webcas:none"};
    Iri decision_{"urn:x-webcas:none"};

    void record(const Instance& who, EnrollmentEvent event, const std::string& result) {
        TranscriptEntry e{now_utc(), who.actor.slug(), std::string(to_string(event)), one_line(result)};
        transcript_.entries.push_back(e);
        if (on_entry_) on_entry_(e);
    }

    void advance_with(const Instance& who, EnrollmentEvent event, const std::string& detail) {
        transcript_.state = advance(transcript_.state, event);
        record(who, event, std::string(to_string(transcript_.state)) + " " + detail);
    }

    [[noreturn]] void fail(const Instance& who, EnrollmentEvent event, const server::Response& res,
                           const std::string& what) {
        const bool denied = res.status == 401 || res.status == 404;
        record(who, event, std::string(denied ? "Denied " : "Failed ") + std::to_string(res.status) + " " + what);
        throw ScenarioAborted(transcript_, what + ": HTTP " + std::to_string(res.status) + " " + one_line(res.body), denied);
    }

    server::ClientOptions options() const { return {.ca_file = ca_bundle_.string()}; }

    server::CasClient client(const Instance& at, const Instance& as) const {
        return server::CasClient(at.server->origin(), as.identity, options());
    }

    Iri webid_of(const ScenarioFixtures::Role& role, const Instance& i) const {
        return role.webid_override.value_or(i.identity->webid);
    }

    std::string document_bytes(const std::string& name, const std::string& owner) const {
        if (!f_.documents_dir.empty() && fs::is_regular_file(f_.documents_dir / name))
            return rdf::read_file(f_.documents_dir / name);
        return "%PDF-1.4\n% " + name + " of " + owner + "\n%%EOF\n";
    }

    static std::string media_type(const std::string& name) {
        if (name.ends_with(".pdf")) return "application/pdf";
        if (name.ends_with(".txt")) return "text/plain";
        return "application/octet-stream";
    }

    void prepare() {
        if (f_.data_dir.empty()) {
            std::random_device rd;
            root_ = fs::temp_directory_path() / ("webcas-scenario-" + std::to_string(rd()) + std::to_string(rd()));
            temporary_ = true;
        } else {
            root_ = f_.data_dir;
            if (fs::exists(root_) && !fs::is_empty(root_))
                throw ValidationError("scenario data directory " + root_.string() + " is not empty");
        }
        fs::create_directories(root_);

        std::vector<cas::ServiceConfig> configs;
        std::set<int> ports;
        std::string bundle;
        for (const auto& [name, role] : {std::pair{"bachelor", &f_.bachelor}, {"student", &f_.student}, {"master", &f_.master}}) {
            auto [host, port] = split_host_port(role->listen);
            cas::ServiceConfig c;
            c.data_dir = root_ / name;
            c.listen_host = host;
            c.listen_port = port;
            while (c.listen_port == 0 || !ports.insert(c.listen_port).second) {
                if (port != 0) throw ValidationError("two instances configured on port " + std::to_string(port));
                c.listen_port = server::pick_free_port(host);
            }
            const bool v6 = host.find(':') != std::string::npos;
            c.base_iri = Iri("https://" + (v6 ? "[" + host + "]" : host) + ":" + std::to_string(c.listen_port));
            bundle += server::server_tls_material(c).certificate.to_pem();
            configs.push_back(std::move(c));
        }
        ca_bundle_ = root_ / "ca-bundle.pem";
        rdf::write_file_atomic(ca_bundle_, bundle);

        Instance* instances[] = {&bachelor_, &student_, &master_};
        const ScenarioFixtures::Role* roles[] = {&f_.bachelor, &f_.student, &f_.master};
        const Iri types[] = {vocab::cas("University"), vocab::student("Student"), vocab::cas("University")};
        for (int i = 0; i < 3; ++i) {
            configs[i].trust_ca_file = ca_bundle_;
            instances[i]->service = std::make_unique<cas::Service>(configs[i]);
            auto [actor, identity] = instances[i]->service->create_actor(roles[i]->slug, roles[i]->attributes, types[i]);
            instances[i]->actor = actor;
            instances[i]->identity = std::move(identity);
            instances[i]->server = std::make_unique<server::CasServer>(*instances[i]->service);
            instances[i]->server->start();
        }
    }

    void step1_issue() {
        const auto ev = EnrollmentEvent::IssueBachelorDossier;
        std::string description;
        for (const auto& [p, v] : f_.student.attributes)
            description += "<#student> " + nt(p) + " " + rdf::to_ntriples(rdf::Term(v)) + " .\n";
        description += "<#degree> " + nt(vocab::cas("title")) + " " + rdf::to_ntriples(rdf::Term(Literal(f_.degree_title))) + " .\n";
        std::vector<server::FormPart> parts{{"dossier", description, "dossier.ttl", "text/turtle"}};
        for (const auto& name : f_.bachelor.documents)
            parts.push_back({"document", document_bytes(name, f_.bachelor.slug), name, media_type(name)});

        auto registrar = client(bachelor_, bachelor_);
        auto res = registrar.post_form("/actors/" + bachelor_.actor.slug() + "/bachelor-dossiers", parts);
        if (res.status != 201) fail(bachelor_, ev, res, "issuing the bachelor dossier");
        bachelor_dossier_ = Iri(res.location);
        // The dossier is handed to its graduate as a single file.
        const Iri graduate = webid_of(f_.student, student_);
        auto grant = registrar.post("/actors/" + bachelor_.actor.slug() + "/grants",
                                    nt(bachelor_dossier_) + " " + nt(vocab::permission()) + " " + nt(graduate) + " .",
                                    "text/turtle");
        if (grant.status != 200) fail(bachelor_, ev, grant, "handing the bachelor dossier to the graduate");
        advance_with(bachelor_, ev, "dossier " + bachelor_dossier_.str() + " with " +
                                        std::to_string(f_.bachelor.documents.size()) + " documents for " + graduate.str());
    }

    void step2_import() {
        const auto ev = EnrollmentEvent::ImportBachelorData;
        auto zip = server::CasClient::fetch(bachelor_.server->origin() + "/package/" + last_segment(bachelor_dossier_.str()),
                                            student_.identity, options());
        if (zip.status != 200) fail(student_, ev, zip, "downloading the bachelor dossier");
        auto res = client(student_, student_).post("/actors/" + student_.actor.slug() + "/import", zip.body, "application/zip");
        if (res.status != 200) fail(student_, ev, res, "importing the bachelor dossier");
        const auto report = json::parse(res.body);
        student_bachelor_copy_ = Iri(report.at("local").get<std::string>());
        advance_with(student_, ev, "imported as " + student_bachelor_copy_.str() + " (" +
                                       std::to_string(report.at("triples_added").get<std::size_t>()) + " statements, " +
                                       std::to_string(report.at("documents_added").get<std::size_t>()) + " documents)");
    }

    void step3_compose() {
        const auto ev = EnrollmentEvent::ComposeApplication;
        auto stu = client(student_, student_);
        const std::string base = "/actors/" + student_.actor.slug();
        for (const auto& name : f_.student.documents) {
            auto up = stu.post_form(base + "/documents",
                                    {{"file", document_bytes(name, student_.actor.slug()), name, media_type(name)}});
            if (up.status != 201) fail(student_, ev, up, "uploading " + name);
        }
        auto listing = stu.get(base + "/documents");
        if (listing.status != 200) fail(student_, ev, listing, "listing documents");
        Selection selection;
        selection.statement_filter = f_.selection_predicates;
        for (const auto& wanted : f_.selection_documents) {
            bool found = false;
            for (const auto& doc : json::parse(listing.body))
                if (doc.at("filename") == wanted) {
                    selection.document_iris.insert(Iri(doc.at("iri").get<std::string>()));
                    found = true;
                }
            if (!found) {
                record(student_, ev, "Failed selection names unknown document " + wanted);
                throw ScenarioAborted(transcript_, "selection names unknown document " + wanted, false);
            }
        }
        auto res = stu.post(base + "/dossiers", rdf::serialize_turtle(selection_to_graph(selection), rdf::standard_prefixes()),
                            "text/turtle");
        if (res.status != 201) fail(student_, ev, res, "composing the application");
        application_ = Iri(res.location);
        advance_with(student_, ev, "application " + application_.str() + " with " +
                                       std::to_string(selection.document_iris.size()) + " documents");
    }

    server::Response master_fetch() const {
        return server::CasClient::fetch(student_.server->origin() + "/package/" + last_segment(application_.str()),
                                        master_.identity, options());
    }

    server::Response student_retrieve() const {
        return server::CasClient::fetch(master_.server->origin() + "/package/" + last_segment(decision_.str()),
                                        student_.identity, options());
    }

    void step4_denied_fetch() {
        auto res = master_fetch();
        if (res.status == 200) {
            record(master_, EnrollmentEvent::FetchDossier, "Failed fetch before grant was allowed");
            throw ScenarioAborted(transcript_, "the master fetched the application before any grant", false);
        }
        record(master_, EnrollmentEvent::FetchDossier, "Denied " + std::to_string(res.status) + " before grant, as expected");
    }

    void step5_grant_dossier() {
        const auto ev = EnrollmentEvent::GrantDossierAccess;
        const Iri grantee = webid_of(f_.master, master_);
        auto res = client(student_, student_).post("/actors/" + student_.actor.slug() + "/grants",
                                                   nt(application_) + " " + nt(vocab::permission()) + " " + nt(grantee) + " .",
                                                   "text/turtle");
        if (res.status != 200) fail(student_, ev, res, "granting the application");
        advance_with(student_, ev, "granted " + application_.str() + " to " + grantee.str());
    }

    void step6_fetch() {
        const auto ev = EnrollmentEvent::FetchDossier;
        auto zip = master_fetch();
        if (zip.status != 200) fail(master_, ev, zip, "fetching the application");
        auto res = client(master_, master_).post("/actors/" + master_.actor.slug() + "/import", zip.body, "application/zip");
        if (res.status != 200) fail(master_, ev, res, "importing the application");
        const auto report = json::parse(res.body);
        master_application_ = Iri(report.at("local").get<std::string>());
        advance_with(master_, ev, "imported as " + master_application_.str() + " (" +
                                      std::to_string(report.at("documents_added").get<std::size_t>()) + " documents)");
    }

    void step7_decide() {
        const auto ev = EnrollmentEvent::RecordDecision;
        const std::string body = "_:d " + nt(vocab::cas("answers")) + " " + nt(master_application_) + " ;\n  " +
                                 nt(vocab::cas("outcome")) + " " + nt(outcome_iri(f_.outcome)) + " ;\n  " +
                                 nt(vocab::cas("comment")) + " " + rdf::to_ntriples(rdf::Term(Literal(f_.comment))) + " .\n";
        auto res = client(master_, master_).post("/actors/" + master_.actor.slug() + "/decisions", body, "text/turtle");
        if (res.status != 201) fail(master_, ev, res, "recording the decision");
        decision_ = Iri(res.location);
        advance_with(master_, ev, "decision " + decision_.str() + " " + std::string(to_string(f_.outcome)));
    }

    void step8_denied_retrieve() {
        auto res = student_retrieve();
        if (res.status == 200) {
            record(student_, EnrollmentEvent::RetrieveDecision, "Failed retrieval before grant was allowed");
            throw ScenarioAborted(transcript_, "the student retrieved the decision before any grant", false);
        }
        record(student_, EnrollmentEvent::RetrieveDecision,
               "Denied " + std::to_string(res.status) + " before grant, as expected");
    }

    void step9_grant_decision() {
        const auto ev = EnrollmentEvent::GrantDecisionAccess;
        const Iri grantee = webid_of(f_.student, student_);
        auto res = client(master_, master_).post("/actors/" + master_.actor.slug() + "/grants",
                                                 nt(decision_) + " " + nt(vocab::permission()) + " " + nt(grantee) + " .",
                                                 "text/turtle");
        if (res.status != 200) fail(master_, ev, res, "granting the decision");
        advance_with(master_, ev, "granted " + decision_.str() + " to " + grantee.str());
    }

    void step10_retrieve() {
        const auto ev = EnrollmentEvent::RetrieveDecision;
        // The student checks what the master shares with them.
        auto shared = client(master_, student_).get("/shared");
        if (shared.status != 200) fail(student_, ev, shared, "checking for a decision");
        std::optional<std::string> found;
        for (const auto& e : json::parse(shared.body))
            if (e.at("kind") == decision_kind().str() && e.at("answers") == application_.str())
                found = e.at("iri").get<std::string>();
        if (!found) {
            record(student_, ev, "Denied no decision answering the application is shared");
            throw ScenarioAborted(transcript_, "no decision is shared with the student", true);
        }
        auto zip = server::CasClient::fetch(master_.server->origin() + "/package/" + last_segment(*found),
                                            student_.identity, options());
        if (zip.status != 200) fail(student_, ev, zip, "retrieving the decision");
        auto stu = client(student_, student_);
        auto res = stu.post("/actors/" + student_.actor.slug() + "/import", zip.body, "application/zip");
        if (res.status != 200) fail(student_, ev, res, "importing the decision");
        const Iri local(json::parse(res.body).at("local").get<std::string>());
        auto graph = stu.get("/graphs/" + student_.actor.slug());
        if (graph.status != 200) fail(student_, ev, graph, "reading the student graph");
        auto decision = read_decision(rdf::parse_turtle(graph.body, student_.service->base()).graph, local);
        if (!decision || decision->application_ref != application_) {
            record(student_, ev, "Failed imported decision does not answer " + application_.str());
            throw ScenarioAborted(transcript_, "imported decision does not answer the application", false);
        }
        advance_with(student_, ev, std::string(to_string(decision->outcome)) + " \"" + decision->comment.lexical() +
                                       "\" stored as " + local.str());
    }

    static const Iri& decision_kind() { return exchange::decision_kind(); }
};

}  // namespace

Transcript run_scenario(const ScenarioFixtures& fixtures, const std::function<void(const TranscriptEntry&)>& on_entry) {
    Run run(fixtures, on_entry);
    return run.execute();
}

}  // namespace webcas::workflow
