#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "webcas/rdf/iri.hpp"
#include "webcas/webid/identity.hpp"

namespace webcas::server {

struct HttpUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    /// Path plus query, at least "/".
    std::string target;

    std::string origin() const;
};

/// Splits an absolute http(s) URL. Throws ValidationError otherwise.
HttpUrl parse_http_url(std::string_view url);

struct ClientOptions {
    /// Trusted server certificates (PEM). Empty: system defaults.
    std::string ca_file;
    bool verify_server_certificate = true;
    int timeout_seconds = 10;
};

struct Response {
    int status = 0;
    std::string body;
    std::string content_type;
    std::string location;

    bool ok() const noexcept { return status >= 200 && status < 300; }
};

struct FormPart {
    std::string name;
    std::string content;
    std::string filename;
    std::string content_type;
};

/// HTTP(S) client for one origin, optionally presenting a WebID client
/// certificate. Transport failures throw IoError.
class CasClient {
public:
    CasClient(std::string origin, std::optional<webid::IdentityBundle> identity = std::nullopt,
              ClientOptions options = {});
    ~CasClient();
    CasClient(CasClient&&) noexcept;
    CasClient& operator=(CasClient&&) noexcept;

    Response get(const std::string& target);
    Response post(const std::string& target, const std::string& body, const std::string& content_type);
    Response post_form(const std::string& target, const std::vector<FormPart>& parts);
    Response del(const std::string& target, const std::string& body, const std::string& content_type);

    /// GET of an absolute URL on any origin with the same identity and options.
    static Response fetch(const std::string& url, const std::optional<webid::IdentityBundle>& identity,
                          const ClientOptions& options);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace webcas::server
