#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "webcas/rdf/iri.hpp"
#include "webcas/webid/key.hpp"

namespace webcas::webid {

struct SanEntry {
    enum class Kind { Uri, Dns, Ip, Email };
    Kind kind;
    std::string value;
};

struct CertificateRequest {
    std::string common_name;
    std::vector<SanEntry> san;
    int validity_days = 365;
    /// Adds serverAuth to the extended key usage (TLS server certificates).
    bool server = false;
};

/// Parsed X.509 v3 certificate as used for WebID authentication.
class WebIdCertificate {
public:
    using TimePoint = std::chrono::system_clock::time_point;

    static WebIdCertificate from_der(std::string der);
    /// First CERTIFICATE block of a PEM document.
    static WebIdCertificate from_pem(std::string_view pem);
    static WebIdCertificate from_native(const X509* cert);

    const std::string& subject_common_name() const noexcept { return common_name_; }
    /// URI-type Subject Alternative Names in certificate order.
    const std::vector<rdf::Iri>& san_uris() const noexcept { return san_uris_; }
    /// Absent for non-RSA keys.
    const std::optional<RsaPublicKey>& public_key() const noexcept { return public_key_; }
    TimePoint not_before() const noexcept { return not_before_; }
    TimePoint not_after() const noexcept { return not_after_; }
    const std::string& der_bytes() const noexcept { return der_; }

    std::string to_pem() const;
    /// SHA-256 of the DER encoding, lowercase hex.
    std::string fingerprint() const;

    bool expired_at(TimePoint now) const noexcept { return now < not_before_ || now > not_after_; }

private:
    WebIdCertificate() = default;

    std::string common_name_;
    std::vector<rdf::Iri> san_uris_;
    std::optional<RsaPublicKey> public_key_;
    TimePoint not_before_{};
    TimePoint not_after_{};
    std::string der_;
};

/// Self-signed certificate (SHA-256 signature) for `key`.
WebIdCertificate issue_self_signed(const PrivateKey& key, const CertificateRequest& request);

inline std::vector<rdf::Iri> extract_san_uris(const WebIdCertificate& cert) { return cert.san_uris(); }

}  // namespace webcas::webid
