#pragma once

#include <filesystem>
#include <string>

#include "webcas/config.hpp"
#include "webcas/rdf/iri.hpp"

namespace webcas::cas {

struct ServiceConfig {
    /// Public base of every minted IRI, without trailing slash.
    rdf::Iri base_iri{"https://127.0.0.1:8443"};
    std::filesystem::path data_dir;
    std::string listen_host = "127.0.0.1";
    int listen_port = 8443;
    /// Server certificate and key (PEM). Generated into data_dir/tls when empty.
    std::filesystem::path tls_cert;
    std::filesystem::path tls_key;
    /// Plain HTTP test mode; refuses non-loopback listen addresses.
    bool plain_transport = false;
    bool enforce_cert_expiry = false;
    std::filesystem::path static_dir;
    /// Trust anchors for outgoing profile fetches.
    std::filesystem::path trust_ca_file;
    bool verify_remote_tls = true;
    int verification_cache_seconds = 60;

    /// Keys: base_iri, data_dir, listen, tls_cert, tls_key, transport
    /// (tls|plain), enforce_cert_expiry, static_dir, trust_ca_file,
    /// verify_remote_tls, verification_cache_seconds.
    static ServiceConfig from(const KeyValueConfig& kv);
    static ServiceConfig load(const std::filesystem::path& path);

    /// Throws ValidationError for inconsistent settings.
    void validate() const;
};

}  // namespace webcas::cas
