#include "webcas/webid/verify.hpp"

#include "webcas/rdf/turtle.hpp"
#include "webcas/webid/profile.hpp"

namespace webcas::webid {

std::string_view to_string(DenialReason reason) noexcept {
    switch (reason) {
        case DenialReason::NoSan: return "NoSan";
        case DenialReason::ProfileUnreachable: return "ProfileUnreachable";
        case DenialReason::ProfileUnparseable: return "ProfileUnparseable";
        case DenialReason::KeyMismatch: return "KeyMismatch";
        case DenialReason::NoKeyInProfile: return "NoKeyInProfile";
    }
    return "Unknown";
}

namespace {

bool is_turtle(std::string media_type) {
    if (const auto semi = media_type.find(';'); semi != std::string::npos) media_type.resize(semi);
    while (!media_type.empty() && media_type.back() == ' ') media_type.pop_back();
    for (char& c : media_type) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return media_type.empty() || media_type == "text/turtle" || media_type == "application/x-turtle";
}

}  // namespace

rdf::Graph fetch_profile(const ProfileFetcher& fetcher, const rdf::Iri& webid) {
    if (webid.scheme() != "http" && webid.scheme() != "https")
        throw ValidationError("refusing to dereference <" + webid.str() + ">: only http and https are allowed");
    const rdf::Iri document = webid.without_fragment();
    FetchResult result = fetcher.get(document);
    if (!result.ok) throw FetchError("cannot fetch <" + document.str() + ">: " + result.error);
    if (!is_turtle(result.media_type))
        throw ParseError("profile <" + document.str() + "> is served as '" + result.media_type + "', not Turtle");
    return rdf::parse_turtle(result.body, document).graph;
}

AuthResult verify_webid(const WebIdCertificate& cert, const ProfileFetcher& fetcher) {
    if (cert.san_uris().empty()) return AuthResult::denied(DenialReason::NoSan, "certificate has no SAN URI");
    AuthResult last = AuthResult::denied(DenialReason::NoSan);
    for (const rdf::Iri& uri : cert.san_uris()) {
        rdf::Graph profile;
        try {
            profile = fetch_profile(fetcher, uri);
        } catch (const ValidationError& e) {
            last = AuthResult::denied(DenialReason::ProfileUnreachable, e.what());
            continue;
        } catch (const FetchError& e) {
            last = AuthResult::denied(DenialReason::ProfileUnreachable, e.what());
            continue;
        } catch (const ParseError& e) {
            last = AuthResult::denied(DenialReason::ProfileUnparseable, e.what());
            continue;
        }
        const ProfileKeys found = keys_in_profile(profile, uri);
        if (found.keys.empty()) {
            last = AuthResult::denied(DenialReason::NoKeyInProfile, "no usable cert:key for <" + uri.str() + ">");
            continue;
        }
        if (cert.public_key()) {
            for (const RsaPublicKey& key : found.keys)
                if (key == *cert.public_key()) return AuthResult::authenticated(uri);
        }
        last = AuthResult::denied(DenialReason::KeyMismatch, "no profile key of <" + uri.str() + "> matches");
    }
    return last;
}

}  // namespace webcas::webid
