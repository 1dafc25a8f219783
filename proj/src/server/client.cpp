#include "webcas/server/client.hpp"

#include <httplib.h>
#include <openssl/x509.h>

#include "webcas/error.hpp"

namespace webcas::server {

std::string HttpUrl::origin() const {
    const bool v6 = host.find(':') != std::string::npos;
    return scheme + "://" + (v6 ? "[" + host + "]" : host) + ":" + std::to_string(port);
}

HttpUrl parse_http_url(std::string_view url) {
    HttpUrl out;
    const auto sep = url.find("://");
    if (sep == std::string_view::npos) throw ValidationError("not an absolute URL: " + std::string(url));
    out.scheme = std::string(url.substr(0, sep));
    for (auto& c : out.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (out.scheme != "http" && out.scheme != "https")
        throw ValidationError("unsupported scheme in " + std::string(url));
    std::string_view rest = url.substr(sep + 3);
    const auto path_at = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, path_at);
    std::string_view target = path_at == std::string_view::npos ? std::string_view("/") : rest.substr(path_at);
    if (const auto hash = target.find('#'); hash != std::string_view::npos) target = target.substr(0, hash);
    out.target = target.empty() || target[0] != '/' ? "/" + std::string(target) : std::string(target);
    if (authority.find('@') != std::string_view::npos) throw ValidationError("credentials in URL are not supported");

    std::string_view port;
    if (!authority.empty() && authority[0] == '[') {
        const auto close = authority.find(']');
        if (close == std::string_view::npos) throw ValidationError("bad IPv6 literal in " + std::string(url));
        out.host = std::string(authority.substr(1, close - 1));
        if (close + 1 < authority.size()) {
            if (authority[close + 1] != ':') throw ValidationError("bad authority in " + std::string(url));
            port = authority.substr(close + 2);
        }
    } else {
        const auto colon = authority.rfind(':');
        out.host = std::string(authority.substr(0, colon));
        if (colon != std::string_view::npos) port = authority.substr(colon + 1);
    }
    if (out.host.empty()) throw ValidationError("missing host in " + std::string(url));
    if (port.empty()) {
        out.port = out.scheme == "https" ? 443 : 80;
    } else {
        if (port.size() > 5 || port.find_first_not_of("0123456789") != std::string_view::npos)
            throw ValidationError("bad port in " + std::string(url));
        out.port = std::stoi(std::string(port));
        if (out.port < 1 || out.port > 65535) throw ValidationError("bad port in " + std::string(url));
    }
    return out;
}

struct CasClient::Impl {
    std::unique_ptr<httplib::ClientImpl> client;
    std::string origin;
};

namespace {

std::unique_ptr<httplib::ClientImpl> make_client(const HttpUrl& url, const std::optional<webid::IdentityBundle>& identity,
                                                 const ClientOptions& options) {
    std::unique_ptr<httplib::ClientImpl> client;
    if (url.scheme == "https") {
        std::unique_ptr<httplib::SSLClient> ssl;
        if (identity) {
            const auto& der = identity->certificate.der_bytes();
            const unsigned char* p = reinterpret_cast<const unsigned char*>(der.data());
            X509* cert = d2i_X509(nullptr, &p, static_cast<long>(der.size()));
            if (!cert) throw CryptoError("cannot decode client certificate");
            ssl = std::make_unique<httplib::SSLClient>(url.host, url.port, cert, identity->private_key.native());
            X509_free(cert);
        } else {
            ssl = std::make_unique<httplib::SSLClient>(url.host, url.port);
        }
        if (!ssl->is_valid()) throw CryptoError("cannot set up TLS client for " + url.origin());
        ssl->enable_server_certificate_verification(options.verify_server_certificate);
        if (!options.ca_file.empty()) ssl->set_ca_cert_path(options.ca_file.c_str());
        client = std::move(ssl);
    } else {
        client = std::make_unique<httplib::ClientImpl>(url.host, url.port);
    }
    client->set_connection_timeout(options.timeout_seconds, 0);
    client->set_read_timeout(options.timeout_seconds, 0);
    client->set_write_timeout(options.timeout_seconds, 0);
    return client;
}

Response convert(const httplib::Result& result, const std::string& origin) {
    if (!result) throw IoError("request to " + origin + " failed: " + httplib::to_string(result.error()));
    return {result->status, result->body, result->get_header_value("Content-Type"), result->get_header_value("Location")};
}

}  // namespace

CasClient::CasClient(std::string origin, std::optional<webid::IdentityBundle> identity, ClientOptions options)
    : impl_(std::make_unique<Impl>()) {
    const auto url = parse_http_url(origin);
    impl_->origin = url.origin();
    impl_->client = make_client(url, identity, options);
}

CasClient::~CasClient() = default;
CasClient::CasClient(CasClient&&) noexcept = default;
CasClient& CasClient::operator=(CasClient&&) noexcept = default;

Response CasClient::get(const std::string& target) { return convert(impl_->client->Get(target), impl_->origin); }

Response CasClient::post(const std::string& target, const std::string& body, const std::string& content_type) {
    return convert(impl_->client->Post(target, body, content_type), impl_->origin);
}

Response CasClient::post_form(const std::string& target, const std::vector<FormPart>& parts) {
    httplib::MultipartFormDataItems items;
    for (const auto& p : parts) items.push_back({p.name, p.content, p.filename, p.content_type});
    return convert(impl_->client->Post(target, items), impl_->origin);
}

Response CasClient::del(const std::string& target, const std::string& body, const std::string& content_type) {
    return convert(impl_->client->Delete(target, body, content_type), impl_->origin);
}

Response CasClient::fetch(const std::string& url, const std::optional<webid::IdentityBundle>& identity,
                          const ClientOptions& options) {
    const auto parsed = parse_http_url(url);
    CasClient client(parsed.origin(), identity, options);
    return client.get(parsed.target);
}

}  // namespace webcas::server
