#include "webcas/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <iostream>
#include <optional>
#include <pthread.h>

#include "webcas/exchange/package.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/server/client.hpp"
#include "webcas/server/server.hpp"
#include "webcas/workflow/procedures.hpp"
#include "webcas/workflow/scenario.hpp"

namespace webcas::cli {

namespace fs = std::filesystem;
namespace vocab = rdf::vocab;
using json = nlohmann::json;
using rdf::Iri;

namespace {

/// A refusal by a remote CAS (401 or the masked 404).
class Denied : public Error {
public:
    using Error::Error;
};

struct Io {
    std::ostream& out;
    std::ostream& err;
    std::istream& in;
};

std::string read_input(const std::string& path, std::istream& in) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(in), {});
    return rdf::read_file(path);
}

std::string guess_media_type(const std::string& name) {
    static const std::pair<const char*, const char*> table[] = {
        {".pdf", "application/pdf"}, {".txt", "text/plain"},  {".ttl", "text/turtle"}, {".json", "application/json"},
        {".png", "image/png"},       {".jpg", "image/jpeg"},  {".zip", "application/zip"}, {".csv", "text/csv"},
    };
    for (const auto& [ext, type] : table)
        if (name.ends_with(ext)) return type;
    return "application/octet-stream";
}

Iri actor_type(const std::string& text) {
    if (text == "student") return vocab::student("Student");
    if (text == "university") return vocab::cas("University");
    return vocab::expand(text);
}

json report_json(const exchange::ImportReport& r) {
    return {{"triples_added", r.triples_added}, {"documents_added", r.documents_added},
            {"package_kind", r.package_kind.str()}, {"source", r.source.str()},
            {"local", r.local.str()},             {"warnings", r.warnings}};
}

void print_report(const exchange::ImportReport& r, bool as_json, Io& io) {
    if (as_json) {
        io.out << report_json(r).dump() << "\n";
        return;
    }
    io.out << r.local.str() << "\n";
    io.err << "imported " << r.package_kind.str() << " from " << r.source.str() << ": " << r.triples_added
           << " statements, " << r.documents_added << " documents\n";
    for (const auto& w : r.warnings) io.err << "warning: " << w << "\n";
}

std::string package_target(const std::string& url) { return server::parse_http_url(url).target; }

server::Response fetch_or_deny(const std::string& url, const webid::IdentityBundle& identity,
                               const server::ClientOptions& options) {
    auto res = server::CasClient::fetch(url, identity, options);
    if (res.status == 401 || res.status == 404)
        throw Denied("GET " + url + " refused with " + std::to_string(res.status) + ": " + res.body);
    if (res.status != 200) throw IoError("GET " + url + " returned " + std::to_string(res.status) + ": " + res.body);
    return res;
}

void print_report(const json& r, bool as_json, Io& io) {
    if (as_json) {
        io.out << r.dump() << "\n";
        return;
    }
    io.out << r.at("local").get<std::string>() << "\n";
    io.err << "imported " << r.at("package_kind").get<std::string>() << " from " << r.at("source").get<std::string>()
           << ": " << r.at("triples_added") << " statements, " << r.at("documents_added") << " documents\n";
    for (const auto& w : r.at("warnings")) io.err << "warning: " << w.get<std::string>() << "\n";
}

/// The actor's own CAS, reached over HTTPS with the actor's certificate.
/// Remote CAS instances verify that certificate against the profile this
/// CAS serves, so it has to be running; it also owns the data directory.
struct OwnCas {
    cas::ServiceConfig config;
    std::string slug;
    webid::IdentityBundle identity;
    server::ClientOptions remote;
    std::unique_ptr<server::CasClient> client;

    OwnCas(const fs::path& config_path, std::string actor_slug, const std::string& ca_file)
        : config(cas::ServiceConfig::load(config_path)),
          slug(std::move(actor_slug)),
          identity(load_identity(config, slug)) {
        remote.ca_file = !ca_file.empty() ? ca_file : config.trust_ca_file.string();
        remote.verify_server_certificate = config.verify_remote_tls;
        std::string host = config.listen_host;
        if (host == "0.0.0.0") host = "127.0.0.1";
        if (host == "::") host = "::1";
        server::ClientOptions own;
        own.ca_file = config.tls_cert.empty() ? (config.data_dir / "tls" / "server.pem").string()
                                              : config.trust_ca_file.string();
        const bool v6 = host.find(':') != std::string::npos;
        origin = std::string(config.plain_transport ? "http" : "https") + "://" + (v6 ? "[" + host + "]" : host) + ":" +
                 std::to_string(config.listen_port);
        client = std::make_unique<server::CasClient>(origin, identity, own);
    }

    static webid::IdentityBundle load_identity(const cas::ServiceConfig& c, const std::string& slug) {
        if (!cas::valid_slug(slug)) throw ValidationError("invalid actor slug '" + slug + "'");
        const auto dir = c.data_dir / "identities" / slug;
        if (!fs::exists(dir / "identity.pem")) throw NotFoundError("no identity for actor '" + slug + "'");
        return webid::IdentityBundle::load(dir);
    }

    server::Response call(const std::function<server::Response(server::CasClient&)>& request) {
        try {
            return request(*client);
        } catch (const IoError& e) {
            throw IoError(std::string(e.what()) + " (is the CAS of '" + slug + "' running at " + origin + "?)");
        }
    }

    json import(const std::string& zip) {
        auto res = call([&](auto& c) { return c.post("/actors/" + slug + "/import", zip, "application/zip"); });
        if (res.status == 200) return json::parse(res.body);
        if (res.status == 401 || res.status == 404)
            throw Denied("own CAS refused the import with " + std::to_string(res.status) + ": " + res.body);
        if (res.status == 422) {
            auto body = json::parse(res.body, nullptr, false);
            std::vector<exchange::Issue> issues;
            if (body.is_object() && body.contains("issues"))
                for (const auto& i : body["issues"]) issues.push_back({i["rule"], i["subject"], i["message"]});
            if (!issues.empty()) throw exchange::PackageError(issues);
            throw ValidationError(res.body);
        }
        throw IoError("import returned " + std::to_string(res.status) + ": " + res.body);
    }

    rdf::Graph graph() {
        auto res = call([&](auto& c) { return c.get("/graphs/" + slug); });
        if (res.status != 200) throw IoError("GET /graphs/" + slug + " returned " + std::to_string(res.status));
        return rdf::parse_turtle(res.body, config.base_iri).graph;
    }

    std::string origin;
};

int serve(const fs::path& config_path, Io& io) {
    auto config = cas::ServiceConfig::load(config_path);
    // Block the stop signals before any thread exists so only sigwait sees them.
    sigset_t stop;
    sigemptyset(&stop);
    sigaddset(&stop, SIGINT);
    sigaddset(&stop, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop, nullptr);
    cas::Service service(config);
    server::CasServer server(service);
    server.start();
    io.out << server.origin() << std::endl;
    io.err << "serving " << service.base().str() << " on " << server.origin() << " (Ctrl-C stops)" << std::endl;
    int sig = 0;
    sigwait(&stop, &sig);
    server.stop();
    service.persist();
    pthread_sigmask(SIG_UNBLOCK, &stop, nullptr);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    Io io{out, err, in};
    CLI::App app{"webcas: linked-data content access service with WebID client-certificate authentication", "webcas"};
    app.require_subcommand(1);
    std::function<int()> action;

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run a CAS in the foreground");
    std::string serve_config;
    serve_cmd->add_option("--config", serve_config, "Service configuration file")->required();
    serve_cmd->callback([&] { action = [&] { return serve(serve_config, io); }; });

    // identity new
    auto* identity_cmd = app.add_subcommand("identity", "WebID identities")->require_subcommand(1);
    auto* identity_new = identity_cmd->add_subcommand("new", "Write identity.pem and profile.ttl for a WebID");
    std::string id_name, id_webid, id_out;
    int id_days = 365;
    identity_new->add_option("--name", id_name, "Certificate common name")->required();
    identity_new->add_option("--webid", id_webid, "WebID IRI with fragment")->required();
    identity_new->add_option("--out", id_out, "Output directory")->required();
    identity_new->add_option("--days", id_days, "Validity in days")->check(CLI::Range(1, 3650));
    identity_new->callback([&] {
        action = [&] {
            auto bundle = webid::generate_identity(id_name, Iri(id_webid), id_days);
            bundle.save(id_out);
            io.out << bundle.webid.str() << "\n";
            return kOk;
        };
    });

    // actor ...
    auto* actor_cmd = app.add_subcommand("actor", "Actor operations on a local data directory")->require_subcommand(1);
    std::string config_path, slug;
    std::optional<cas::Service> service;
    auto open = [&]() -> cas::Service& {
        service.emplace(cas::ServiceConfig::load(config_path));
        return *service;
    };
    auto add_common = [&](CLI::App* cmd, bool with_slug = true) {
        cmd->add_option("--config", config_path, "Service configuration file")->required();
        if (with_slug) cmd->add_option("--slug", slug, "Actor slug")->required();
    };
    bool as_json = false;

    auto* create = actor_cmd->add_subcommand("create", "Create an actor with a generated identity");
    add_common(create);
    std::string type = "student";
    std::vector<std::string> attrs;
    create->add_option("--type", type, "student, university, or a type IRI / prefixed name");
    create->add_option("--attr", attrs, "Attribute as name=value, e.g. s:name=Dent");
    create->callback([&] {
        action = [&] {
            webid::Attributes attributes;
            for (const auto& a : attrs) {
                const auto eq = a.find('=');
                if (eq == std::string::npos) throw ValidationError("attribute '" + a + "' is not name=value");
                attributes.emplace_back(vocab::expand(a.substr(0, eq)), rdf::Literal(a.substr(eq + 1)));
            }
            auto [actor, identity] = open().create_actor(slug, attributes, actor_type(type));
            io.out << identity.webid.str() << "\n";
            return kOk;
        };
    });

    auto* upload = actor_cmd->add_subcommand("upload", "Store a document in the actor's space");
    add_common(upload);
    std::string up_file, up_type, up_name;
    upload->add_option("--file", up_file, "Document path, or - for stdin")->required();
    upload->add_option("--media-type", up_type, "Media type (guessed from the name otherwise)");
    upload->add_option("--filename", up_name, "Stored file name (defaults to the path's)");
    upload->callback([&] {
        action = [&] {
            const std::string name = up_name.empty() ? fs::path(up_file).filename().string() : up_name;
            const std::string bytes = read_input(up_file, io.in);
            auto& s = open();
            auto rec = s.store_document(s.require_actor(slug), bytes, name, up_type.empty() ? guess_media_type(name) : up_type);
            io.out << rec.iri.str() << "\n";
            return kOk;
        };
    });

    auto* issue = actor_cmd->add_subcommand("issue", "Issue a bachelor dossier");
    add_common(issue);
    std::string description;
    std::vector<std::string> issue_docs;
    issue->add_option("--description", description, "Turtle with <#student> and <#degree> statements")->required();
    issue->add_option("--document", issue_docs, "Document to include (repeatable)");
    issue->callback([&] {
        action = [&] {
            auto& s = open();
            const auto actor = s.require_actor(slug);
            const Iri dossier = s.mint_package_iri();
            auto input = workflow::bachelor_input_from_turtle(
                rdf::parse_turtle(read_input(description, io.in), dossier).graph, dossier);
            for (const auto& path : issue_docs) {
                const std::string name = fs::path(path).filename().string();
                input.documents.push_back({name, guess_media_type(name), rdf::read_file(path)});
            }
            io.out << workflow::issue_bachelor_dossier(s, actor, input, dossier).str() << "\n";
            return kOk;
        };
    });

    std::string resource, grantee;
    for (const bool add : {true, false}) {
        auto* cmd = actor_cmd->add_subcommand(add ? "grant" : "revoke",
                                              add ? "Permit a WebID to read a resource" : "Withdraw a permission");
        add_common(cmd);
        cmd->add_option("--resource", resource, "Document, dossier or decision IRI")->required();
        cmd->add_option("--grantee", grantee, "WebID")->required();
        cmd->callback([&, add] {
            action = [&, add] {
                auto& s = open();
                const auto actor = s.require_actor(slug);
                if (add)
                    s.grant(actor, Iri(resource), Iri(grantee));
                else
                    s.revoke(actor, Iri(resource), Iri(grantee));
                return kOk;
            };
        });
    }

    auto* compose = actor_cmd->add_subcommand("compose", "Compose an application dossier");
    add_common(compose);
    std::vector<std::string> sel_docs, sel_preds;
    compose->add_option("--document", sel_docs, "Document IRI to include (repeatable)");
    compose->add_option("--predicate", sel_preds, "Predicate whose statements are copied (repeatable)");
    compose->callback([&] {
        action = [&] {
            workflow::Selection selection;
            for (const auto& d : sel_docs) selection.document_iris.insert(Iri(d));
            for (const auto& p : sel_preds) selection.statement_filter.insert(vocab::expand(p));
            auto& s = open();
            io.out << workflow::compose_application(s, s.require_actor(slug), selection).str() << "\n";
            return kOk;
        };
    });

    auto* exp = actor_cmd->add_subcommand("export", "Write a dossier package (ZIP) to stdout or a file");
    add_common(exp, false);
    std::string dossier, exp_out;
    exp->add_option("--dossier", dossier, "Package IRI")->required();
    exp->add_option("--out", exp_out, "Output file instead of stdout");
    exp->callback([&] {
        action = [&] {
            const auto bytes = exchange::export_package(open(), Iri(dossier));
            if (exp_out.empty())
                io.out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())).flush();
            else
                rdf::write_file_atomic(exp_out, bytes);
            return kOk;
        };
    });

    auto* imp = actor_cmd->add_subcommand("import", "Import a package into the actor's space");
    add_common(imp);
    std::string imp_file;
    imp->add_option("--file", imp_file, "Package path, or - for stdin")->required();
    imp->add_flag("--json", as_json, "Line-delimited JSON output");
    imp->callback([&] {
        action = [&] {
            const auto bytes = read_input(imp_file, io.in);
            auto& s = open();
            print_report(exchange::import_package(s, s.require_actor(slug), bytes), as_json, io);
            return kOk;
        };
    });

    std::string url, ca_file, from, application;

    auto* fetch = actor_cmd->add_subcommand("fetch", "Download a package from another CAS with this actor's certificate and import it through the actor's running CAS");
    add_common(fetch);
    fetch->add_option("--url", url, "Package URL, e.g. https://host/package/<uuid>")->required();
    fetch->add_option("--ca-file", ca_file, "Trusted server certificates (PEM)");
    fetch->add_flag("--json", as_json, "Line-delimited JSON output");
    fetch->callback([&] {
        action = [&] {
            OwnCas own(config_path, slug, ca_file);
            auto res = fetch_or_deny(url, own.identity, own.remote);
            print_report(own.import(res.body), as_json, io);
            return kOk;
        };
    });

    auto* decide = actor_cmd->add_subcommand("decide", "Record a decision on an imported application");
    add_common(decide);
    std::string outcome, comment;
    decide->add_option("--application", application, "Imported application dossier IRI")->required();
    decide->add_option("--outcome", outcome, "Accepted or Rejected")->required();
    decide->add_option("--comment", comment, "Free text");
    decide->callback([&] {
        action = [&] {
            const auto o = workflow::outcome_from_string(outcome);
            auto& s = open();
            io.out << workflow::record_decision(s, s.require_actor(slug), Iri(application), o, comment).iri.str() << "\n";
            return kOk;
        };
    });

    auto* get_decision = actor_cmd->add_subcommand(
        "get-decision", "Fetch a decision and import it through the actor's running CAS; --from/--application looks it up");
    add_common(get_decision);
    get_decision->add_option("--url", url, "Decision package URL");
    get_decision->add_option("--from", from, "Origin of the deciding CAS");
    get_decision->add_option("--application", application, "The application the decision answers");
    get_decision->add_option("--ca-file", ca_file, "Trusted server certificates (PEM)");
    get_decision->add_flag("--json", as_json, "Line-delimited JSON output");
    get_decision->callback([&] {
        action = [&] {
            if (url.empty() == (from.empty() || application.empty()))
                throw CLI::ValidationError("get-decision", "give either --url or both --from and --application");
            OwnCas own(config_path, slug, ca_file);
            std::string package_url = url;
            if (package_url.empty()) {
                auto shared = server::CasClient(from, own.identity, own.remote).get("/shared");
                if (shared.status == 401) throw Denied("not authenticated at " + from + ": " + shared.body);
                if (shared.status != 200) throw IoError("GET /shared returned " + std::to_string(shared.status));
                for (const auto& e : json::parse(shared.body))
                    if (e.at("kind") == exchange::decision_kind().str() && e.at("answers") == application) {
                        const std::string iri = e.at("iri");
                        package_url = server::parse_http_url(from).origin() + "/package/" + iri.substr(iri.rfind('/') + 1);
                    }
                if (package_url.empty()) throw Denied("no decision answering " + application + " is shared with you yet");
            }
            auto res = fetch_or_deny(package_url, own.identity, own.remote);
            const auto report = own.import(res.body);
            auto decision = workflow::read_decision(own.graph(), Iri(report.at("local").get<std::string>()));
            if (!decision) throw ValidationError(package_target(package_url) + " is not a decision package");
            if (as_json) {
                io.out << json{{"decision", decision->iri.str()},
                               {"outcome", std::string(workflow::to_string(decision->outcome))},
                               {"comment", decision->comment.lexical()},
                               {"answers", decision->application_ref.str()}}
                              .dump()
                       << "\n";
            } else {
                io.out << workflow::to_string(decision->outcome) << "\t" << decision->comment.lexical() << "\t"
                       << decision->iri.str() << "\n";
            }
            return kOk;
        };
    });

    auto* list = actor_cmd->add_subcommand("list", "Documents and packages of the actor");
    add_common(list);
    list->add_flag("--json", as_json, "Line-delimited JSON output");
    list->callback([&] {
        action = [&] {
            auto& s = open();
            const auto actor = s.require_actor(slug);
            for (const auto& r : cas::documents_of(s.store(), actor)) {
                if (as_json)
                    io.out << json{{"type", "document"}, {"iri", r.iri.str()}, {"filename", r.filename},
                                   {"media_type", r.media_type}, {"sha256", r.sha256}, {"size", r.size}}
                                  .dump()
                           << "\n";
                else
                    io.out << "document\t" << r.iri.str() << "\t" << r.filename << "\t" << r.size << "\n";
            }
            auto graph = s.store().graph(actor.graph_iri()).value_or(rdf::Graph{});
            for (const auto* kind : {&exchange::bachelor_dossier_kind(), &exchange::application_dossier_kind(),
                                     &exchange::decision_kind()})
                for (const Iri& p : workflow::packages_of_kind(graph, *kind)) {
                    if (as_json)
                        io.out << json{{"type", "package"}, {"iri", p.str()}, {"kind", kind->str()}}.dump() << "\n";
                    else
                        io.out << "package\t" << p.str() << "\t" << kind->str() << "\n";
                }
            return kOk;
        };
    });

    auto* graph_cmd = actor_cmd->add_subcommand("graph", "Print the actor's graph as Turtle");
    add_common(graph_cmd);
    graph_cmd->callback([&] {
        action = [&] {
            auto& s = open();
            const auto actor = s.require_actor(slug);
            io.out << rdf::serialize_turtle(s.store().graph(actor.graph_iri()).value_or(rdf::Graph{}),
                                            rdf::standard_prefixes());
            return kOk;
        };
    });

    // scenario run
    auto* scenario_cmd = app.add_subcommand("scenario", "Three-party enrollment demo")->require_subcommand(1);
    auto* scenario_run = scenario_cmd->add_subcommand("run", "Run the workflow on three local instances and print the transcript");
    std::string fixtures;
    scenario_run->add_option("--fixtures", fixtures, "Fixture file (key = value); defaults apply otherwise");
    scenario_run->add_flag("--json", as_json, "Line-delimited JSON output");
    scenario_run->callback([&] {
        action = [&] {
            auto f = fixtures.empty() ? workflow::ScenarioFixtures::defaults() : workflow::ScenarioFixtures::load(fixtures);
            auto emit = [&](const workflow::TranscriptEntry& e) {
                if (as_json)
                    io.out << json{{"timestamp", e.timestamp}, {"actor", e.actor}, {"event", e.event}, {"result", e.result}}.dump()
                           << std::endl;
                else
                    io.out << e.line() << std::endl;
            };
            try {
                workflow::run_scenario(f, emit);
            } catch (const workflow::ScenarioAborted& e) {
                io.err << "scenario aborted: " << e.what() << "\n";
                return e.denied() ? kDenied : kInvalid;
            }
            return kOk;
        };
    });

    std::vector<const char*> argv{"webcas"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return kUsage;
    }

    try {
        return action ? action() : kUsage;
    } catch (const CLI::ValidationError& e) {
        io.err << e.what() << "\n";
        return kUsage;
    } catch (const Denied& e) {
        io.err << "denied: " << e.what() << "\n";
        return kDenied;
    } catch (const PermissionError& e) {
        io.err << "denied: " << e.what() << "\n";
        return kDenied;
    } catch (const exchange::PackageError& e) {
        io.err << "invalid package:\n";
        for (const auto& issue : e.issues()) io.err << "  " << issue.to_string() << "\n";
        return kInvalid;
    } catch (const IoError& e) {
        io.err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const CryptoError& e) {
        io.err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << "\n";
        return kIo;
    }
}

}  // namespace webcas::cli
