#include "webcas/webid/identity.hpp"

#include "webcas/error.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"

namespace webcas::webid {

namespace fs = std::filesystem;

IdentityBundle generate_identity(const std::string& common_name, const rdf::Iri& webid, int validity_days,
                                 const Attributes& attributes) {
    if (webid.scheme() != "http" && webid.scheme() != "https")
        throw ValidationError("WebID <" + webid.str() + "> must use http or https");
    const auto hash = webid.str().find('#');
    if (hash == std::string::npos || hash + 1 == webid.str().size())
        throw ValidationError("WebID <" + webid.str() + "> needs a non-empty fragment");
    if (validity_days <= 0) throw ValidationError("validity must be at least one day");

    PrivateKey key = PrivateKey::generate_rsa(2048);
    CertificateRequest request;
    request.common_name = common_name;
    request.san = {{SanEntry::Kind::Uri, webid.str()}};
    request.validity_days = validity_days;
    WebIdCertificate cert = issue_self_signed(key, request);
    rdf::Graph profile = build_profile(webid, key.public_key(), attributes);
    return IdentityBundle{webid, std::move(cert), std::move(key), std::move(profile)};
}

void IdentityBundle::save(const fs::path& directory) const {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
    rdf::write_file_atomic(directory / "identity.pem", private_key.to_pem() + certificate.to_pem());
    fs::permissions(directory / "identity.pem", fs::perms::owner_read | fs::perms::owner_write,
                    fs::perm_options::replace, ec);
    rdf::write_file_atomic(directory / "profile.ttl", rdf::serialize_turtle(profile, rdf::standard_prefixes()));
}

IdentityBundle IdentityBundle::load(const fs::path& directory) {
    const std::string pem = rdf::read_file(directory / "identity.pem");
    PrivateKey key = PrivateKey::from_pem(pem);
    WebIdCertificate cert = WebIdCertificate::from_pem(pem);
    if (cert.san_uris().empty()) throw ValidationError("identity certificate carries no SAN URI");
    if (cert.public_key() != key.public_key()) throw ValidationError("identity.pem key and certificate disagree");
    rdf::Iri webid = cert.san_uris().front();
    rdf::Graph profile;
    if (fs::exists(directory / "profile.ttl"))
        profile = rdf::parse_turtle(rdf::read_file(directory / "profile.ttl"), webid.without_fragment()).graph;
    return IdentityBundle{std::move(webid), std::move(cert), std::move(key), std::move(profile)};
}

}  // namespace webcas::webid
