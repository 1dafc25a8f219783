#pragma once

#include <filesystem>

#include "webcas/rdf/graph.hpp"
#include "webcas/webid/certificate.hpp"
#include "webcas/webid/profile.hpp"

namespace webcas::webid {

struct IdentityBundle {
    rdf::Iri webid;
    WebIdCertificate certificate;
    PrivateKey private_key;
    rdf::Graph profile;

    /// identity.pem (private key, then certificate) and profile.ttl.
    void save(const std::filesystem::path& directory) const;
    /// Reads identity.pem; the WebID is the certificate's first SAN URI.
    /// profile.ttl is loaded when present.
    static IdentityBundle load(const std::filesystem::path& directory);
};

/// Fresh 2048-bit RSA key, a self-signed certificate whose SAN holds exactly
/// `webid`, and the matching profile. `webid` must be an absolute http(s)
/// IRI with a non-empty fragment.
IdentityBundle generate_identity(const std::string& common_name, const rdf::Iri& webid, int validity_days,
                                 const Attributes& attributes = {});

}  // namespace webcas::webid
