#include <doctest.h>

#include <filesystem>
#include <random>

#include "fake_fetcher.hpp"
#include "student_sample.hpp"
#include "webcas/crypto.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/webid/identity.hpp"
#include "webcas/webid/verify.hpp"

using namespace webcas;
using namespace webcas::rdf;
using namespace webcas::webid;
namespace fs = std::filesystem;

namespace {

const Iri kStudentWebId("http://example.org/StudentWebID#me");

const IdentityBundle& student() {
    static const IdentityBundle bundle =
        generate_identity("Stu Dent", kStudentWebId, 365, {{vocab::foaf("name"), Literal("Stu Dent")}});
    return bundle;
}

std::string turtle_of(const Graph& g) { return serialize_turtle(g, standard_prefixes()); }

std::string flip_hex_digit(std::string hex, std::size_t i) {
    hex[i] = hex[i] == '0' ? '1' : '0';
    return hex;
}

Graph with_modulus(const Graph& profile, const std::string& modulus) {
    Graph out;
    for (const Triple& t : profile) {
        if (t.predicate == vocab::cert("modulus"))
            out.insert(Triple(t.subject, t.predicate, Literal(modulus, vocab::xsd("hexBinary"))));
        else
            out.insert(t);
    }
    return out;
}

}  // namespace

TEST_CASE("crypto helpers") {
    // FIPS 180-2 test vector, cross-checked with Python hashlib.
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::string id = random_uuid();
    CHECK(is_uuid(id));
    CHECK(id[14] == '4');
    CHECK(random_uuid() != id);
    CHECK_FALSE(is_uuid("not-a-uuid"));
}

TEST_CASE("canonical_hex") {
    // Expected values from an independent normalization (Python bytes.fromhex + lstrip).
    CHECK(canonical_hex("00 AB cd") == "abcd");
    CHECK(canonical_hex("0000ff") == "ff");
    CHECK(canonical_hex("F") == "0f");
    CHECK(canonical_hex("  0a\n0B ") == "0a0b");
    CHECK(canonical_hex("000000") == "00");
    CHECK_THROWS_AS(canonical_hex("xyz"), ValidationError);
    CHECK_THROWS_AS(canonical_hex("  "), ValidationError);
}

TEST_CASE("modulus canonicalization on a fixed key") {
    // The DER INTEGER of this modulus starts with a 0x00 octet; the expected
    // hex was produced by Python's int -> hex conversion.
    const std::string pem = read_file(WEBCAS_TEST_DATA "/fixed_rsa_key.pem");
    std::string expected = read_file(WEBCAS_TEST_DATA "/fixed_rsa_key.modulus.txt");
    while (!expected.empty() && expected.back() == '\n') expected.pop_back();
    const RsaPublicKey key = PrivateKey::from_pem(pem).public_key();
    CHECK(key.modulus_hex() == expected);
    CHECK(key.exponent() == 65537);
    CHECK(key.modulus_bits() == 2048);
    const Graph profile = build_profile(kStudentWebId, key);
    const auto moduli = profile.objects(BlankNode{"key"}, vocab::cert("modulus"));
    REQUIRE(moduli.size() == 1);
    CHECK(moduli[0].literal().lexical() == expected);
    CHECK(moduli[0].literal().datatype() == vocab::xsd("hexBinary"));
}

TEST_CASE("generate_identity") {
    const IdentityBundle& b = student();
    CHECK(b.webid == kStudentWebId);
    CHECK(extract_san_uris(b.certificate) == std::vector<Iri>{kStudentWebId});
    CHECK(b.certificate.subject_common_name() == "Stu Dent");
    REQUIRE(b.certificate.public_key());
    CHECK(*b.certificate.public_key() == b.private_key.public_key());
    CHECK(b.certificate.public_key()->modulus_bits() == 2048);
    CHECK(b.certificate.public_key()->exponent() == 65537);
    CHECK(WebIdCertificate::from_der(b.certificate.der_bytes()).public_key() == b.certificate.public_key());
    CHECK(b.certificate.not_after() > b.certificate.not_before());

    const IdentityBundle other = generate_identity("Stu Dent", kStudentWebId, 365);
    CHECK(other.certificate.public_key()->modulus_hex() != b.certificate.public_key()->modulus_hex());

    CHECK_THROWS_AS(generate_identity("x", Iri("http://example.org/noFragment"), 365), ValidationError);
    CHECK_THROWS_AS(generate_identity("x", Iri("ftp://example.org/a#me"), 365), ValidationError);
    CHECK_THROWS_AS(generate_identity("x", Iri("http://example.org/a#"), 365), ValidationError);
}

TEST_CASE("build_profile and keys_in_profile") {
    const RsaPublicKey key = student().private_key.public_key();
    const Graph bare = build_profile(kStudentWebId, key);
    CHECK(bare.size() == 5);
    CHECK(bare.contains(Triple(kStudentWebId, vocab::rdf_type(), vocab::foaf("Person"))));
    CHECK(bare.contains(Triple(BlankNode{"key"}, vocab::cert("exponent"), Literal("65537", vocab::xsd_integer()))));
    CHECK(student().profile.size() == 6);
    CHECK_THROWS_AS(build_profile(Iri("http://example.org/x"), key), ValidationError);

    SUBCASE("inverse of construction") {
        const auto found = keys_in_profile(bare, kStudentWebId);
        CHECK(found.keys == std::vector<RsaPublicKey>{key});
        CHECK(found.diagnostics.empty());
        CHECK(keys_in_profile(bare, Iri("http://example.org/other#me")).keys.empty());
    }
    SUBCASE("two key blocks") {
        const RsaPublicKey second("c0ffee", 3);
        Graph g = bare;
        for (const Triple& t : build_profile(kStudentWebId, second)) {
            const auto rename = [](const Term& term) -> Term {
                return term.is_blank() ? Term(BlankNode{"key2"}) : term;
            };
            g.insert(Triple(rename(t.subject), t.predicate, rename(t.object)));
        }
        const auto found = keys_in_profile(g, kStudentWebId);
        REQUIRE(found.keys.size() == 2);
        CHECK(std::find(found.keys.begin(), found.keys.end(), key) != found.keys.end());
        CHECK(std::find(found.keys.begin(), found.keys.end(), second) != found.keys.end());
    }
    SUBCASE("uppercase hex with whitespace parses to canonical form") {
        // Canonical form computed by the independent normalization used above.
        const Graph g = parse_turtle(R"(
            @prefix cert: <http://www.w3.org/ns/auth/cert#> .
            <http://example.org/StudentWebID#me> cert:key _:k .
            _:k cert:modulus "00 C0 FF\n EE" ; cert:exponent "65537" .)").graph;
        const auto found = keys_in_profile(g, kStudentWebId);
        REQUIRE(found.keys.size() == 1);
        CHECK(found.keys[0].modulus_hex() == "c0ffee");
        CHECK(found.keys[0] == RsaPublicKey("c0ffee", 65537));
    }
    SUBCASE("malformed blocks are skipped with diagnostics") {
        const Graph g = parse_turtle(R"(
            @prefix cert: <http://www.w3.org/ns/auth/cert#> .
            <http://example.org/StudentWebID#me> cert:key _:a, _:b, _:c, "lit" .
            _:a cert:modulus "zz" ; cert:exponent 3 .
            _:b cert:modulus "ab" ; cert:exponent "three" .
            _:c cert:modulus "cd" ; cert:exponent 65537 .)").graph;
        const auto found = keys_in_profile(g, kStudentWebId);
        CHECK(found.keys == std::vector<RsaPublicKey>{RsaPublicKey("cd", 65537)});
        CHECK(found.diagnostics.size() == 3);
    }
}

TEST_CASE("certificates with mixed SAN entries") {
    const PrivateKey key = PrivateKey::generate_rsa();
    SUBCASE("no SAN") {
        const auto cert = issue_self_signed(key, {"nobody", {}, 30, false});
        CHECK(extract_san_uris(cert).empty());
    }
    SUBCASE("DNS and URI") {
        const auto cert = issue_self_signed(
            key, {"mixed", {{SanEntry::Kind::Dns, "example.org"}, {SanEntry::Kind::Uri, "http://example.org/a#me"}}, 30, false});
        CHECK(extract_san_uris(cert) == std::vector<Iri>{Iri("http://example.org/a#me")});
    }
    SUBCASE("order preserved") {
        const auto cert = issue_self_signed(key, {"two",
                                                  {{SanEntry::Kind::Uri, "http://b.example/#id"},
                                                   {SanEntry::Kind::Email, "x@example.org"},
                                                   {SanEntry::Kind::Uri, "http://a.example/#id"}},
                                                  30,
                                                  false});
        CHECK(extract_san_uris(cert) == std::vector<Iri>{Iri("http://b.example/#id"), Iri("http://a.example/#id")});
        CHECK(WebIdCertificate::from_pem(cert.to_pem()).der_bytes() == cert.der_bytes());
    }
}

TEST_CASE("fetch_profile") {
    testing::FakeFetcher fetcher;
    fetcher.serve(Iri("http://example.org/StudentWebID"), kStudentSample);
    SUBCASE("strips the fragment and parses with the document as base") {
        const Graph g = fetch_profile(fetcher, kStudentWebId);
        CHECK(g.size() == 7);
        CHECK(fetcher.requests() == std::vector<std::string>{"http://example.org/StudentWebID"});
    }
    SUBCASE("non-http schemes are refused without a request") {
        CHECK_THROWS_AS(fetch_profile(fetcher, Iri("file:///etc/passwd")), ValidationError);
        CHECK(fetcher.requests().empty());
    }
    SUBCASE("unreachable and non-Turtle") {
        CHECK_THROWS_AS(fetch_profile(fetcher, Iri("http://down.example/#me")), FetchError);
        fetcher.serve(Iri("http://html.example/"), "<html/>", "text/html");
        CHECK_THROWS_AS(fetch_profile(fetcher, Iri("http://html.example/#me")), ParseError);
    }
}

TEST_CASE("verify_webid") {
    const IdentityBundle& b = student();
    const Iri document = kStudentWebId.without_fragment();

    SUBCASE("matching profile authenticates") {
        testing::FakeFetcher fetcher;
        fetcher.serve(document, turtle_of(b.profile));
        const AuthResult r = verify_webid(b.certificate, fetcher);
        REQUIRE(r.ok());
        CHECK(*r.webid == kStudentWebId);
    }
    SUBCASE("different modulus is a key mismatch") {
        testing::FakeFetcher fetcher;
        const IdentityBundle other = generate_identity("x", kStudentWebId, 1);
        fetcher.serve(document, turtle_of(other.profile));
        const AuthResult r = verify_webid(b.certificate, fetcher);
        CHECK_FALSE(r.ok());
        CHECK(r.reason == DenialReason::KeyMismatch);
    }
    SUBCASE("network failure") {
        testing::FakeFetcher fetcher;
        fetcher.fail(document, "timeout");
        CHECK(verify_webid(b.certificate, fetcher).reason == DenialReason::ProfileUnreachable);
    }
    SUBCASE("profile without keys") {
        testing::FakeFetcher fetcher;
        fetcher.serve(document, "<#me> a <http://xmlns.com/foaf/0.1/Person> .");
        CHECK(verify_webid(b.certificate, fetcher).reason == DenialReason::NoKeyInProfile);
    }
    SUBCASE("first verifying SAN wins, otherwise last failure reported") {
        const auto cert = issue_self_signed(b.private_key, {"multi",
                                                            {{SanEntry::Kind::Uri, "file:///etc/passwd"},
                                                             {SanEntry::Kind::Uri, "http://broken.example/#me"},
                                                             {SanEntry::Kind::Uri, kStudentWebId.str()},
                                                             {SanEntry::Kind::Uri, "http://later.example/#me"}},
                                                            30,
                                                            false});
        testing::FakeFetcher fetcher;
        fetcher.serve(Iri("http://broken.example/"), "this is not turtle");
        fetcher.serve(document, turtle_of(b.profile));
        const AuthResult r = verify_webid(cert, fetcher);
        REQUIRE(r.ok());
        CHECK(*r.webid == kStudentWebId);
        // file: never requested; the URI after the winner never requested.
        CHECK(fetcher.requests() == std::vector<std::string>{"http://broken.example/", document.str()});

        testing::FakeFetcher failing;
        failing.serve(Iri("http://later.example/"), "garbage (");
        CHECK(verify_webid(cert, failing).reason == DenialReason::ProfileUnparseable);
    }
    SUBCASE("fragmentless SAN accepted as-is") {
        const Iri plain("http://example.org/StudentWebID");
        const auto cert = issue_self_signed(b.private_key, {"plain", {{SanEntry::Kind::Uri, plain.str()}}, 30, false});
        Graph profile;
        for (const Triple& t : b.profile)
            profile.insert(Triple(t.subject == Term(kStudentWebId) ? Term(plain) : t.subject, t.predicate, t.object));
        testing::FakeFetcher fetcher;
        fetcher.serve(plain, turtle_of(profile));
        const AuthResult r = verify_webid(cert, fetcher);
        REQUIRE(r.ok());
        CHECK(*r.webid == plain);
    }
    SUBCASE("expired certificate still verifies") {
        const auto cert = issue_self_signed(b.private_key, {"old", {{SanEntry::Kind::Uri, kStudentWebId.str()}}, 1, false});
        CHECK_FALSE(cert.expired_at(std::chrono::system_clock::now()));
        CHECK(cert.expired_at(std::chrono::system_clock::now() + std::chrono::hours(49)));
        testing::FakeFetcher fetcher;
        fetcher.serve(document, turtle_of(b.profile));
        CHECK(verify_webid(cert, fetcher).ok());
    }
}

TEST_CASE("property: every single hex-digit tamper is a key mismatch") {
    const IdentityBundle& b = student();
    const std::string modulus = b.certificate.public_key()->modulus_hex();
    const Iri document = kStudentWebId.without_fragment();
    for (std::size_t i = 0; i < modulus.size(); ++i) {
        testing::FakeFetcher fetcher;
        fetcher.serve(document, turtle_of(with_modulus(b.profile, flip_hex_digit(modulus, i))));
        const AuthResult r = verify_webid(b.certificate, fetcher);
        CAPTURE(i);
        CHECK(r.reason == DenialReason::KeyMismatch);
        CHECK_FALSE(r.ok());
    }
}

TEST_CASE("property: generated bundles round-trip") {
    for (int i = 0; i < 4; ++i) {
        const Iri webid("https://cas" + std::to_string(i) + ".example/profile/actor#id");
        const IdentityBundle b = generate_identity("actor " + std::to_string(i), webid, 30);
        CHECK(extract_san_uris(b.certificate) == std::vector<Iri>{webid});
        CHECK(keys_in_profile(b.profile, webid).keys == std::vector<RsaPublicKey>{*b.certificate.public_key()});
        testing::FakeFetcher fetcher;
        fetcher.serve(webid.without_fragment(), turtle_of(b.profile));
        CHECK(verify_webid(b.certificate, fetcher) == AuthResult::authenticated(webid));
    }
}

TEST_CASE("identity bundle persistence") {
    const fs::path dir = fs::temp_directory_path() / ("webcas-id-" + random_uuid());
    student().save(dir);
    CHECK(fs::exists(dir / "identity.pem"));
    CHECK(fs::exists(dir / "profile.ttl"));
    const IdentityBundle loaded = IdentityBundle::load(dir);
    CHECK(loaded.webid == kStudentWebId);
    CHECK(loaded.certificate.der_bytes() == student().certificate.der_bytes());
    CHECK(loaded.private_key.public_key() == student().private_key.public_key());
    CHECK(loaded.profile.size() == student().profile.size());
    fs::remove_all(dir);
}
