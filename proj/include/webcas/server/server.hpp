#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "webcas/cas/service.hpp"
#include "webcas/webid/certificate.hpp"
#include "webcas/webid/verify.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace webcas::server {

struct TlsMaterial {
    webid::WebIdCertificate certificate;
    webid::PrivateKey key;
};

/// The configured server certificate and key, or a self-signed pair kept in
/// <data_dir>/tls/ (created on first use) naming localhost, 127.0.0.1 and the
/// base IRI's host.
TlsMaterial server_tls_material(const cas::ServiceConfig& config);

/// A port that was free on `host` a moment ago, for configuring a base IRI
/// before the server binds.
int pick_free_port(const std::string& host = "127.0.0.1");

/// Positive verification results keyed by certificate fingerprint.
class VerificationCache {
public:
    explicit VerificationCache(std::chrono::seconds ttl) : ttl_(ttl) {}

    std::optional<rdf::Iri> lookup(const std::string& fingerprint, std::uint64_t generation);
    void store(const std::string& fingerprint, const rdf::Iri& webid, std::uint64_t generation);
    void clear();
    std::size_t size() const;

private:
    struct Entry {
        rdf::Iri webid;
        std::chrono::steady_clock::time_point expires;
        std::uint64_t generation;
    };
    std::chrono::seconds ttl_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
};

/// Serves this CAS's own /profile/<slug> documents from the store and
/// delegates every other IRI to `remote`.
class LocalFirstFetcher final : public webid::ProfileFetcher {
public:
    LocalFirstFetcher(const cas::Service& service, std::shared_ptr<const webid::ProfileFetcher> remote)
        : service_(service), remote_(std::move(remote)) {}
    webid::FetchResult get(const rdf::Iri& document) const override;

private:
    const cas::Service& service_;
    std::shared_ptr<const webid::ProfileFetcher> remote_;
};

/// The HTTPS front of one CAS. Client certificates are requested, never
/// required; endpoints needing identity verify the presented certificate.
class CasServer {
public:
    /// `remote` fetches foreign profiles; defaults to HTTP(S) with the
    /// configured trust settings.
    explicit CasServer(cas::Service& service, std::shared_ptr<const webid::ProfileFetcher> remote = nullptr);
    ~CasServer();
    CasServer(const CasServer&) = delete;
    CasServer& operator=(const CasServer&) = delete;

    /// Binds and serves on a background thread. Throws IoError on bind failure.
    void start();
    /// Blocks until stop() (from another thread or a signal handler).
    void wait();
    void stop();

    int port() const noexcept { return port_; }
    /// scheme://host:port actually bound.
    std::string origin() const;

    /// The verified WebID of the peer certificate; `why` receives the reason
    /// when there is none.
    std::optional<rdf::Iri> authenticate(const httplib::Request& req, std::string* why = nullptr);
    VerificationCache& cache() noexcept { return cache_; }

private:
    void install_routes();

    cas::Service& service_;
    std::shared_ptr<const webid::ProfileFetcher> fetcher_;
    VerificationCache cache_;
    std::unique_ptr<httplib::Server> http_;
    std::optional<TlsMaterial> tls_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace webcas::server
