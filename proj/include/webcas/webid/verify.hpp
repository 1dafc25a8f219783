#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "webcas/error.hpp"
#include "webcas/rdf/graph.hpp"
#include "webcas/webid/certificate.hpp"

namespace webcas::webid {

struct FetchResult {
    bool ok = false;
    int status = 0;
    std::string media_type;
    std::string body;
    std::string error;

    static FetchResult success(std::string media_type, std::string body, int status = 200) {
        return {true, status, std::move(media_type), std::move(body), {}};
    }
    static FetchResult failure(std::string message, int status = 0) {
        return {false, status, {}, {}, std::move(message)};
    }
};

/// Dereferences profile documents. Implementations must be safe for
/// concurrent use. Callers only pass fragment-free http(s) IRIs.
class ProfileFetcher {
public:
    virtual ~ProfileFetcher() = default;
    virtual FetchResult get(const rdf::Iri& document) const = 0;
};

class FetchError : public Error {
public:
    using Error::Error;
};

/// GETs the WebID's document (fragment stripped) and parses it as Turtle
/// with the document IRI as base. Throws ValidationError for non-http(s)
/// schemes (no request is issued), FetchError when unreachable or not
/// Turtle, ParseError for an unparseable body.
rdf::Graph fetch_profile(const ProfileFetcher& fetcher, const rdf::Iri& webid);

enum class DenialReason { NoSan, ProfileUnreachable, ProfileUnparseable, KeyMismatch, NoKeyInProfile };

std::string_view to_string(DenialReason reason) noexcept;

struct AuthResult {
    std::optional<rdf::Iri> webid;
    DenialReason reason = DenialReason::NoSan;
    std::string detail;

    static AuthResult authenticated(rdf::Iri webid) { return {std::move(webid), DenialReason::NoSan, {}}; }
    static AuthResult denied(DenialReason reason, std::string detail = {}) { return {std::nullopt, reason, std::move(detail)}; }

    bool ok() const noexcept { return webid.has_value(); }
    friend bool operator==(const AuthResult& a, const AuthResult& b) {
        return a.webid == b.webid && (a.ok() || a.reason == b.reason);
    }
};

/// For each SAN URI in order: fetch its profile and compare the profile's
/// keys against the certificate's public key. The first matching URI wins;
/// otherwise the reason of the last failure is reported. Certificate
/// validity dates are not examined.
AuthResult verify_webid(const WebIdCertificate& cert, const ProfileFetcher& fetcher);

}  // namespace webcas::webid
