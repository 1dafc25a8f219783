#include "webcas/server/server.hpp"

#include <httplib.h>
#include <json.hpp>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <set>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "webcas/crypto.hpp"
#include "webcas/exchange/package.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/server/client.hpp"
#include "webcas/webid/http_fetcher.hpp"
#include "webcas/workflow/procedures.hpp"

namespace webcas::server {

namespace fs = std::filesystem;
namespace vocab = rdf::vocab;
using json = nlohmann::json;
using rdf::Iri;
using rdf::Term;

TlsMaterial server_tls_material(const cas::ServiceConfig& config) {
    if (!config.tls_cert.empty()) {
        return {webid::WebIdCertificate::from_pem(rdf::read_file(config.tls_cert)),
                webid::PrivateKey::from_pem(rdf::read_file(config.tls_key))};
    }
    const fs::path dir = config.data_dir / "tls";
    if (fs::exists(dir / "server.pem") && fs::exists(dir / "server.key"))
        return {webid::WebIdCertificate::from_pem(rdf::read_file(dir / "server.pem")),
                webid::PrivateKey::from_pem(rdf::read_file(dir / "server.key"))};

    // Subjects must differ between instances: trust stores pick anchors by
    // subject name, so a bundle of look-alike self-signed certificates fails.
    const auto url = parse_http_url(config.base_iri.str());
    const auto& host = url.host;
    webid::CertificateRequest request{.common_name = "webcas " + url.origin().substr(8) + " " + random_uuid().substr(0, 8),
                                      .san = {}, .validity_days = 825, .server = true};
    request.san.push_back({webid::SanEntry::Kind::Dns, "localhost"});
    request.san.push_back({webid::SanEntry::Kind::Ip, "127.0.0.1"});
    if (host != "localhost" && host != "127.0.0.1") {
        const bool numeric = host.find_first_not_of("0123456789.") == std::string::npos;
        request.san.push_back({numeric ? webid::SanEntry::Kind::Ip : webid::SanEntry::Kind::Dns, std::string(host)});
    }
    auto key = webid::PrivateKey::generate_rsa();
    auto cert = webid::issue_self_signed(key, request);
    fs::create_directories(dir);
    rdf::write_file_atomic(dir / "server.key", key.to_pem());
    fs::permissions(dir / "server.key", fs::perms::owner_read | fs::perms::owner_write);
    rdf::write_file_atomic(dir / "server.pem", cert.to_pem());
    return {std::move(cert), std::move(key)};
}

int pick_free_port(const std::string& host) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_NUMERICHOST | AI_PASSIVE;
    addrinfo* found = nullptr;
    if (getaddrinfo(host.c_str(), "0", &hints, &found) != 0 || !found) throw IoError("bad listen host " + host);
    std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> guard(found, freeaddrinfo);
    const int fd = ::socket(found->ai_family, SOCK_STREAM, 0);
    if (fd < 0) throw IoError("socket() failed");
    int port = -1;
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::bind(fd, found->ai_addr, found->ai_addrlen) == 0 &&
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
        port = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                                : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    ::close(fd);
    if (port <= 0) throw IoError("no free port on " + host);
    return port;
}

std::optional<Iri> VerificationCache::lookup(const std::string& fingerprint, std::uint64_t generation) {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(fingerprint);
    if (it == entries_.end()) return std::nullopt;
    if (it->second.generation != generation || std::chrono::steady_clock::now() >= it->second.expires) {
        entries_.erase(it);
        return std::nullopt;
    }
    return it->second.webid;
}

void VerificationCache::store(const std::string& fingerprint, const Iri& webid, std::uint64_t generation) {
    if (ttl_.count() == 0) return;
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(fingerprint, Entry{webid, std::chrono::steady_clock::now() + ttl_, generation});
}

void VerificationCache::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
}

std::size_t VerificationCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

webid::FetchResult LocalFirstFetcher::get(const Iri& document) const {
    const std::string prefix = service_.base().str() + "/profile/";
    if (document.starts_with(prefix)) {
        auto profile = service_.profile(document.str().substr(prefix.size()));
        if (!profile) return webid::FetchResult::failure("no local profile " + document.str(), 404);
        return webid::FetchResult::success("text/turtle", rdf::serialize_turtle(*profile, rdf::standard_prefixes()));
    }
    if (!remote_) return webid::FetchResult::failure("remote profiles disabled");
    return remote_->get(document);
}

namespace {

constexpr const char* kNotFound = "not found\n";

void not_found(httplib::Response& res) {
    res.status = 404;
    res.set_content(kNotFound, "text/plain");
}

void unauthenticated(httplib::Response& res, const std::string& why) {
    res.status = 401;
    res.set_content("authentication required" + (why.empty() ? std::string() : ": " + why) + "\n", "text/plain");
}

void text(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "text/plain; charset=utf-8");
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
}

void created(httplib::Response& res, const Iri& iri) {
    res.status = 201;
    res.set_header("Location", iri.str());
    res.set_content(iri.str() + "\n", "text/plain; charset=utf-8");
}

/// Maps library exceptions onto the status scheme; denials stay 404.
template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const exchange::PackageError& e) {
        json issues = json::array();
        for (const auto& i : e.issues()) issues.push_back({{"rule", i.rule}, {"subject", i.subject}, {"message", i.message}});
        send_json(res, 422, {{"error", "invalid package"}, {"issues", issues}});
    } catch (const NotFoundError&) {
        not_found(res);
    } catch (const PermissionError&) {
        not_found(res);
    } catch (const ConflictError& e) {
        text(res, 409, std::string(e.what()) + "\n");
    } catch (const ParseError& e) {
        text(res, 422, std::string(e.what()) + "\n");
    } catch (const ValidationError& e) {
        text(res, 422, std::string(e.what()) + "\n");
    } catch (const std::exception& e) {
        text(res, 500, "internal error\n");
    }
}

std::string content_type_base(const std::string& value) {
    auto semi = value.find(';');
    std::string out = value.substr(0, semi);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

json record_json(const cas::DocumentRecord& r) {
    return {{"iri", r.iri.str()},           {"id", r.id},       {"filename", r.filename},
            {"media_type", r.media_type}, {"sha256", r.sha256}, {"size", r.size}};
}

json report_json(const exchange::ImportReport& r) {
    return {{"triples_added", r.triples_added}, {"documents_added", r.documents_added},
            {"package_kind", r.package_kind.str()}, {"source", r.source.str()},
            {"local", r.local.str()},             {"warnings", r.warnings}};
}

rdf::Graph parse_body(const httplib::Request& req, const Iri& base) {
    const auto type = content_type_base(req.get_header_value("Content-Type"));
    if (!type.empty() && type != "text/turtle" && type != "application/x-turtle")
        throw ValidationError("expected a text/turtle body, got " + type);
    return rdf::parse_turtle(req.body, base).graph;
}

}  // namespace

CasServer::CasServer(cas::Service& service, std::shared_ptr<const webid::ProfileFetcher> remote)
    : service_(service), cache_(std::chrono::seconds(service.config().verification_cache_seconds)) {
    const auto& config = service.config();
    if (!remote) {
        webid::HttpFetcherOptions options;
        options.ca_file = config.trust_ca_file.string();
        options.verify_server_certificate = config.verify_remote_tls;
        remote = std::make_shared<webid::HttpProfileFetcher>(options);
    }
    fetcher_ = std::make_shared<LocalFirstFetcher>(service, std::move(remote));

    if (config.plain_transport) {
        http_ = std::make_unique<httplib::Server>();
    } else {
        tls_ = server_tls_material(config);
        const TlsMaterial& tls = *tls_;
        auto server = std::make_unique<httplib::SSLServer>([&tls](SSL_CTX& ctx) {
            SSL_CTX_set_min_proto_version(&ctx, TLS1_2_VERSION);
            SSL_CTX_set_options(&ctx, SSL_OP_NO_COMPRESSION | SSL_OP_NO_SESSION_RESUMPTION_ON_RENEGOTIATION);
            const auto& der = tls.certificate.der_bytes();
            const unsigned char* p = reinterpret_cast<const unsigned char*>(der.data());
            X509* cert = d2i_X509(nullptr, &p, static_cast<long>(der.size()));
            if (!cert) return false;
            const bool ok = SSL_CTX_use_certificate(&ctx, cert) == 1 &&
                            SSL_CTX_use_PrivateKey(&ctx, tls.key.native()) == 1 &&
                            SSL_CTX_check_private_key(&ctx) == 1;
            X509_free(cert);
            // Ask for a client certificate but accept any (or none): trust
            // comes from the WebID profile, checked per request.
            SSL_CTX_set_verify(&ctx, SSL_VERIFY_PEER, [](int, X509_STORE_CTX*) { return 1; });
            return ok;
        });
        if (!server->is_valid()) throw CryptoError("TLS configuration failed");
        http_ = std::move(server);
    }
    // httplib's default adds SO_REUSEPORT, which would let a second instance
    // share a port silently.
    http_->set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    http_->set_payload_max_length(std::size_t{256} << 20);
    http_->set_read_timeout(30, 0);
    install_routes();
}

CasServer::~CasServer() { stop(); }

void CasServer::start() {
    const auto& config = service_.config();
    if (config.listen_port == 0) {
        port_ = http_->bind_to_any_port(config.listen_host);
        if (port_ <= 0) throw IoError("cannot bind " + config.listen_host + ":0");
    } else {
        if (!http_->bind_to_port(config.listen_host, config.listen_port))
            throw IoError("cannot bind " + config.listen_host + ":" + std::to_string(config.listen_port));
        port_ = config.listen_port;
    }
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void CasServer::wait() {
    if (thread_.joinable()) thread_.join();
}

void CasServer::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string CasServer::origin() const {
    const auto& host = service_.config().listen_host;
    const bool v6 = host.find(':') != std::string::npos;
    return std::string(service_.config().plain_transport ? "http" : "https") + "://" + (v6 ? "[" + host + "]" : host) +
           ":" + std::to_string(port_);
}

std::optional<Iri> CasServer::authenticate(const httplib::Request& req, std::string* why) {
    auto deny = [why](std::string reason) -> std::optional<Iri> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    if (!req.ssl) return deny("no client certificate");
    X509* peer = SSL_get1_peer_certificate(req.ssl);
    if (!peer) return deny("no client certificate");
    std::unique_ptr<X509, decltype(&X509_free)> guard(peer, X509_free);
    std::optional<webid::WebIdCertificate> cert;
    try {
        cert = webid::WebIdCertificate::from_native(peer);
    } catch (const Error& e) {
        return deny(std::string("unreadable client certificate: ") + e.what());
    }
    if (service_.config().enforce_cert_expiry && cert->expired_at(std::chrono::system_clock::now()))
        return deny("client certificate outside its validity period");
    const auto fingerprint = cert->fingerprint();
    const auto generation = service_.profile_generation();
    if (auto hit = cache_.lookup(fingerprint, generation)) return hit;
    auto result = webid::verify_webid(*cert, *fetcher_);
    if (!result.ok()) {
        std::string reason = "WebID not verified (" + std::string(webid::to_string(result.reason)) + ")";
        return deny(result.detail.empty() ? reason : reason + ": " + result.detail);
    }
    cache_.store(fingerprint, *result.webid, generation);
    return result.webid;
}

void CasServer::install_routes() {
    auto& svr = *http_;
    auto& service = service_;

    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 404)
            not_found(res);
        else
            res.set_content(std::string(httplib::status_message(res.status)) + "\n", "text/plain");
    });

    // Owner-only endpoints resolve identity first; no store access happens
    // for an unauthenticated request.
    auto owner = [this, &service](const httplib::Request& req, httplib::Response& res,
                                  const std::string& slug) -> std::optional<cas::ActorId> {
        std::string why;
        auto who = authenticate(req, &why);
        if (!who) {
            unauthenticated(res, why);
            return std::nullopt;
        }
        auto actor = service.find_actor(slug);
        if (!actor || !service.store().contains(rdf::Quad(actor->graph_iri(), Term(actor->node()), vocab::webid(),
                                                          Term(*who)))) {
            not_found(res);
            return std::nullopt;
        }
        return actor;
    };

    svr.Get(R"(/profile/([a-z0-9-]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto profile = service.profile(req.matches[1]);
            if (!profile) return not_found(res);
            res.set_content(rdf::serialize_turtle(*profile, rdf::standard_prefixes()), "text/turtle; charset=utf-8");
        });
    });

    svr.Get("/session", [this, &service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string why;
            auto who = authenticate(req, &why);
            if (!who) return unauthenticated(res, why);
            json body{{"webid", who->str()}, {"actor", nullptr}, {"role", nullptr}};
            if (auto actor = service.actor_by_webid(*who)) {
                body["actor"] = actor->slug();
                auto types = service.store().match(
                    {actor->graph_iri(), Term(actor->node()), vocab::rdf_type(), std::nullopt});
                if (!types.empty() && types[0].object.is_iri()) body["role"] = types[0].object.iri().str();
            }
            send_json(res, 200, body);
        });
    });

    // What others granted to the caller on this CAS; polled, never pushed.
    svr.Get("/shared", [this, &service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string why;
            auto who = authenticate(req, &why);
            if (!who) return unauthenticated(res, why);
            json out = json::array();
            std::set<Iri> seen;
            for (const auto& q : service.store().match({std::nullopt, std::nullopt, vocab::permission(), Term(*who)})) {
                if (!q.subject.is_iri() || !seen.insert(q.subject.iri()).second) continue;
                const Iri& r = q.subject.iri();
                if (service.check_access(r, who) != cas::AccessDecision::AllowGranted) continue;
                auto graph = service.store().graph(q.graph).value_or(rdf::Graph{});
                json entry{{"iri", r.str()}, {"kind", nullptr}, {"answers", nullptr}};
                auto kind = graph.objects(q.subject, vocab::cas("packageKind"));
                if (kind.size() == 1 && kind[0].is_iri()) entry["kind"] = kind[0].iri().str();
                auto answers = graph.objects(q.subject, vocab::cas("answers"));
                if (answers.size() == 1 && answers[0].is_iri()) entry["answers"] = answers[0].iri().str();
                out.push_back(entry);
            }
            send_json(res, 200, out);
        });
    });

    svr.Get(R"(/actors/([a-z0-9-]+)/documents)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            json out = json::array();
            for (const auto& r : cas::documents_of(service.store(), *actor)) out.push_back(record_json(r));
            send_json(res, 200, out);
        });
    });

    svr.Post(R"(/actors/([a-z0-9-]+)/documents)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            std::string filename, media_type, bytes;
            if (req.is_multipart_form_data()) {
                if (!req.has_file("file")) throw ValidationError("multipart upload needs a 'file' part");
                auto part = req.get_file_value("file");
                filename = part.filename;
                media_type = part.content_type;
                bytes = std::move(part.content);
            } else {
                filename = req.get_param_value("filename");
                media_type = content_type_base(req.get_header_value("Content-Type"));
                bytes = req.body;
            }
            created(res, service.store_document(*actor, bytes, filename, media_type).iri);
        });
    });

    svr.Get(R"(/documents/([0-9a-f-]{36}))", [this, &service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string why;
            auto who = authenticate(req, &why);
            if (!who) return unauthenticated(res, why);
            const Iri iri = cas::document_iri(service.base(), req.matches[1]);
            if (!cas::allowed(service.check_access(iri, who))) return not_found(res);
            auto rec = cas::find_document(service.store(), iri);
            if (!rec) return not_found(res);
            res.set_header("Content-Disposition", "attachment; filename=\"" + rec->filename + "\"");
            res.set_content(service.read_document(*rec), rec->media_type);
        });
    });

    svr.Delete(R"(/documents/([0-9a-f-]{36}))", [this, &service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string why;
            auto who = authenticate(req, &why);
            if (!who) return unauthenticated(res, why);
            const Iri iri = cas::document_iri(service.base(), req.matches[1]);
            if (service.check_access(iri, who) != cas::AccessDecision::AllowOwner) return not_found(res);
            auto graph = cas::owner_graph(service.store(), iri);
            auto actor = graph ? cas::ActorId::from_graph(service.base(), *graph) : std::nullopt;
            if (!actor) return not_found(res);
            service.remove_document(*actor, iri);
            text(res, 200, "deleted\n");
        });
    });

    auto grant_route = [&service, owner](bool add) {
        return [&service, owner, add](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto actor = owner(req, res, req.matches[1]);
                if (!actor) return;
                auto body = parse_body(req, service.base());
                if (body.size() != 1) throw ValidationError("expected exactly one s:permission statement");
                const auto& t = *body.begin();
                if (t.predicate != vocab::permission() || !t.subject.is_iri() || !t.object.is_iri())
                    throw ValidationError("expected <resource> s:permission <webid> .");
                if (add)
                    service.grant(*actor, t.subject.iri(), t.object.iri());
                else
                    service.revoke(*actor, t.subject.iri(), t.object.iri());
                text(res, 200, add ? "granted\n" : "revoked\n");
            });
        };
    };
    svr.Post(R"(/actors/([a-z0-9-]+)/grants)", grant_route(true));
    svr.Delete(R"(/actors/([a-z0-9-]+)/grants)", grant_route(false));

    svr.Get(R"(/actors/([a-z0-9-]+)/grants)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            json out = json::array();
            for (const auto& q : service.store().match({actor->graph_iri(), std::nullopt, vocab::permission(), std::nullopt}))
                out.push_back({{"resource", rdf::to_ntriples(q.subject)}, {"grantee", rdf::to_ntriples(q.object)}});
            send_json(res, 200, out);
        });
    });

    svr.Get(R"(/actors/([a-z0-9-]+)/packages)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            auto graph = service.store().graph(actor->graph_iri()).value_or(rdf::Graph{});
            json out = json::array();
            for (const auto* kind : {&exchange::bachelor_dossier_kind(), &exchange::application_dossier_kind(),
                                     &exchange::decision_kind()}) {
                for (const Iri& p : workflow::packages_of_kind(graph, *kind)) {
                    json entry{{"iri", p.str()}, {"kind", kind->str()}, {"imported_from", nullptr}, {"documents", json::array()}};
                    auto from = graph.objects(Term(p), vocab::cas("importedFrom"));
                    if (from.size() == 1 && from[0].is_iri()) entry["imported_from"] = from[0].iri().str();
                    for (const Iri& d : exchange::included_documents(graph, p)) entry["documents"].push_back(d.str());
                    out.push_back(entry);
                }
            }
            send_json(res, 200, out);
        });
    });

    svr.Get(R"(/graphs/([a-z0-9-]+))", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            auto graph = service.store().graph(actor->graph_iri()).value_or(rdf::Graph{});
            res.set_content(rdf::serialize_turtle(graph, rdf::standard_prefixes()), "text/turtle; charset=utf-8");
        });
    });

    svr.Get(R"(/package/([0-9a-f-]{36}))", [this, &service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string why;
            auto who = authenticate(req, &why);
            if (!who) return unauthenticated(res, why);
            const Iri iri = service.base().append("/dossiers/" + req.matches[1].str());
            if (!cas::allowed(service.check_access(iri, who))) return not_found(res);
            auto zip = exchange::export_package(service, iri);
            res.set_header("Content-Disposition", "attachment; filename=\"" + req.matches[1].str() + ".zip\"");
            res.set_content(std::move(zip), "application/zip");
        });
    });

    svr.Post(R"(/actors/([a-z0-9-]+)/import)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            const std::string bytes = req.is_multipart_form_data() && req.has_file("file")
                                          ? req.get_file_value("file").content
                                          : req.body;
            auto report = exchange::import_package(service, *actor, bytes);
            send_json(res, 200, report_json(report));
        });
    });

    svr.Post(R"(/actors/([a-z0-9-]+)/dossiers)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            auto selection = workflow::selection_from_graph(parse_body(req, service.base()));
            created(res, workflow::compose_application(service, *actor, selection));
        });
    });

    svr.Post(R"(/actors/([a-z0-9-]+)/bachelor-dossiers)",
             [&service, owner](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                     auto actor = owner(req, res, req.matches[1]);
                     if (!actor) return;
                     if (!req.is_multipart_form_data() || !req.has_file("dossier"))
                         throw ValidationError("expected multipart form with a 'dossier' Turtle part");
                     const Iri dossier = service.mint_package_iri();
                     auto description = rdf::parse_turtle(req.get_file_value("dossier").content, dossier).graph;
                     auto input = workflow::bachelor_input_from_turtle(description, dossier);
                     for (auto& part : req.get_file_values("document"))
                         input.documents.push_back({part.filename, part.content_type, std::move(part.content)});
                     created(res, workflow::issue_bachelor_dossier(service, *actor, input, dossier));
                 });
             });

    svr.Post(R"(/actors/([a-z0-9-]+)/decisions)", [&service, owner](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto actor = owner(req, res, req.matches[1]);
            if (!actor) return;
            auto body = parse_body(req, service.base());
            std::optional<Iri> application;
            std::optional<workflow::Outcome> outcome;
            std::string comment;
            for (const auto& t : body) {
                if (t.predicate == vocab::cas("answers") && t.object.is_iri())
                    application = t.object.iri();
                else if (t.predicate == vocab::cas("outcome") && t.object == Term(workflow::outcome_iri(workflow::Outcome::Accepted)))
                    outcome = workflow::Outcome::Accepted;
                else if (t.predicate == vocab::cas("outcome") && t.object == Term(workflow::outcome_iri(workflow::Outcome::Rejected)))
                    outcome = workflow::Outcome::Rejected;
                else if (t.predicate == vocab::cas("comment") && t.object.is_literal())
                    comment = t.object.literal().lexical();
                else
                    throw ValidationError("unexpected statement in decision: " + t.predicate.str());
            }
            if (!application || !outcome) throw ValidationError("decision needs cas:answers and cas:outcome");
            created(res, workflow::record_decision(service, *actor, *application, *outcome, comment).iri);
        });
    });

    if (!service.config().static_dir.empty() && !svr.set_mount_point("/static", service.config().static_dir.string()))
        throw IoError("static directory " + service.config().static_dir.string() + " does not exist");
}

}  // namespace webcas::server
