#include <doctest.h>

#include "temp_dir.hpp"
#include "webcas/exchange/package.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/rdf/vocab.hpp"
#include "webcas/server/client.hpp"
#include "webcas/server/server.hpp"
#include "webcas/webid/profile.hpp"

using namespace webcas;
using namespace webcas::server;
using webcas::testing::TempDir;
namespace vocab = rdf::vocab;
using rdf::Iri;
using rdf::Literal;

namespace {

struct Running {
    TempDir dir{"webcas-server"};
    std::unique_ptr<cas::Service> service;
    std::unique_ptr<CasServer> server;
    webid::IdentityBundle alice;
    webid::IdentityBundle bob;

    static cas::ServiceConfig config_for(const std::filesystem::path& data) {
        cas::ServiceConfig c;
        c.data_dir = data;
        c.listen_port = pick_free_port();
        c.base_iri = Iri("https://127.0.0.1:" + std::to_string(c.listen_port));
        return c;
    }

    Running()
        : service(std::make_unique<cas::Service>(config_for(dir / "cas"))),
          alice(service->create_actor("alice", {{vocab::foaf("name"), Literal("Alice")}}, vocab::student("Student")).second),
          bob(service->create_actor("bob", {{vocab::foaf("name"), Literal("Bob")}}, vocab::cas("University")).second) {
        server = std::make_unique<CasServer>(*service);
        server->start();
    }

    ClientOptions options() const { return {.ca_file = (service->config().data_dir / "tls" / "server.pem").string()}; }
    CasClient as(const std::optional<webid::IdentityBundle>& who) const { return CasClient(server->origin(), who, options()); }
};

Running& running() {
    static Running r;
    return r;
}

}  // namespace

TEST_CASE("url parsing") {
    auto u = parse_http_url("https://Host.example:8443/a/b?x=1#frag");
    CHECK(u.scheme == "https");
    CHECK(u.host == "Host.example");
    CHECK(u.port == 8443);
    CHECK(u.target == "/a/b?x=1");
    CHECK(parse_http_url("http://h").port == 80);
    CHECK(parse_http_url("https://h").target == "/");
    CHECK(parse_http_url("https://[::1]:9/p").host == "::1");
    CHECK(parse_http_url("https://[::1]:9/p").origin() == "https://[::1]:9");
    CHECK_THROWS_AS(parse_http_url("ftp://h/"), ValidationError);
    CHECK_THROWS_AS(parse_http_url("https://h:99999/"), ValidationError);
    CHECK_THROWS_AS(parse_http_url("https://u@h/"), ValidationError);
    CHECK_THROWS_AS(parse_http_url("no-scheme"), ValidationError);
}

TEST_CASE("verification cache") {
    VerificationCache cache(std::chrono::seconds(60));
    const Iri w("https://a.example/p#id");
    CHECK_FALSE(cache.lookup("fp", 0));
    cache.store("fp", w, 0);
    CHECK(cache.lookup("fp", 0) == w);
    CHECK_FALSE(cache.lookup("fp", 1));
    CHECK(cache.size() == 0);
    VerificationCache off(std::chrono::seconds(0));
    off.store("fp", w, 0);
    CHECK(off.size() == 0);
}

TEST_CASE("profiles are public Turtle") {
    auto& r = running();
    auto res = r.as(std::nullopt).get("/profile/alice");
    REQUIRE(res.status == 200);
    CHECK(res.content_type.starts_with("text/turtle"));
    auto graph = rdf::parse_turtle(res.body, Iri(r.service->base().str() + "/profile/alice")).graph;
    auto keys = webid::keys_in_profile(graph, r.alice.webid).keys;
    REQUIRE(keys.size() == 1);
    CHECK(keys[0] == r.alice.private_key.public_key());
    CHECK(r.as(std::nullopt).get("/profile/nobody").status == 404);
}

TEST_CASE("client certificate authentication") {
    auto& r = running();
    auto res = r.as(r.alice).get("/session");
    REQUIRE(res.status == 200);
    CHECK(res.body.find(r.alice.webid.str()) != std::string::npos);
    CHECK(res.body.find("\"alice\"") != std::string::npos);
    CHECK(r.server->cache().size() >= 1);

    CHECK(r.as(std::nullopt).get("/session").status == 401);

    // Same WebID, different key.
    auto impostor = webid::generate_identity("Mallory", r.alice.webid, 30);
    CHECK(r.as(impostor).get("/session").status == 401);
    // WebID whose profile cannot be fetched.
    auto stranger = webid::generate_identity("Stranger", Iri("https://127.0.0.1:1/profile/x#id"), 30);
    CHECK(r.as(stranger).get("/session").status == 401);

    // Server certificate is checked by the client.
    ClientOptions untrusting;
    untrusting.ca_file = (r.dir / "missing.pem").string();
    CHECK_THROWS_AS(CasClient(r.server->origin(), r.alice, untrusting).get("/session"), IoError);
}

TEST_CASE("unauthenticated writes are refused without mutation") {
    auto& r = running();
    const auto before = r.service->store().version();
    auto anon = r.as(std::nullopt);
    CHECK(anon.post("/actors/alice/documents?filename=x.txt", "data", "text/plain").status == 401);
    CHECK(anon.post("/actors/alice/grants", "<a:b> <" + vocab::permission().str() + "> <a:c> .", "text/turtle").status == 401);
    CHECK(anon.post("/actors/alice/import", "PK", "application/zip").status == 401);
    CHECK(anon.post_form("/actors/alice/documents", {{"file", "x", "x.txt", "text/plain"}}).status == 401);
    CHECK(r.service->store().version() == before);
    // Another actor's space answers like an absent one.
    auto bob = r.as(r.bob);
    auto foreign = bob.post("/actors/alice/documents?filename=x.txt", "data", "text/plain");
    auto absent = bob.post("/actors/zed/documents?filename=x.txt", "data", "text/plain");
    CHECK(foreign.status == 404);
    CHECK(foreign.body == absent.body);
    CHECK(r.service->store().version() == before);
}

TEST_CASE("document access over HTTPS: deny, grant, allow, revoke") {
    auto& r = running();
    auto alice = r.as(r.alice);
    auto bob = r.as(r.bob);

    const std::string bytes = std::string("%PDF-1.4 transcript\0\x01\x02", 23);
    auto up = alice.post_form("/actors/alice/documents", {{"file", bytes, "transcript.pdf", "application/pdf"}});
    REQUIRE(up.status == 201);
    const Iri doc(up.location);
    const std::string target = doc.str().substr(r.service->base().str().size());

    auto mine = alice.get(target);
    CHECK(mine.status == 200);
    CHECK(mine.body == bytes);
    CHECK(mine.content_type == "application/pdf");

    auto denied = bob.get(target);
    auto absent = bob.get("/documents/00000000-0000-4000-8000-000000000000");
    CHECK(denied.status == 404);
    CHECK(absent.status == 404);
    CHECK(denied.body == absent.body);
    CHECK(denied.content_type == absent.content_type);
    CHECK(r.as(std::nullopt).get(target).status == 401);

    const std::string grant = "<" + doc.str() + "> <" + vocab::permission().str() + "> <" + r.bob.webid.str() + "> .";
    CHECK(bob.post("/actors/alice/grants", grant, "text/turtle").status == 404);
    CHECK(alice.post("/actors/alice/grants", grant, "text/turtle").status == 200);
    auto allowed = bob.get(target);
    CHECK(allowed.status == 200);
    CHECK(allowed.body == bytes);
    auto listing = alice.get("/actors/alice/grants");
    CHECK(listing.body.find(r.bob.webid.str()) != std::string::npos);

    CHECK(alice.del("/actors/alice/grants", grant, "text/turtle").status == 200);
    auto again = bob.get(target);
    CHECK(again.status == 404);
    CHECK(again.body == absent.body);

    CHECK(alice.post("/actors/alice/grants", "not turtle <", "text/turtle").status == 422);
    CHECK(alice.post("/actors/alice/grants", grant, "application/json").status == 422);

    CHECK(bob.del(target, "", "text/plain").status == 404);
    CHECK(alice.del(target, "", "text/plain").status == 200);
    CHECK(alice.get(target).status == 404);
}

TEST_CASE("dossiers travel between spaces over HTTPS") {
    auto& r = running();
    auto alice = r.as(r.alice);
    auto bob = r.as(r.bob);

    auto issued = bob.post_form(
        "/actors/bob/bachelor-dossiers",
        {{"dossier", "<#student> <" + vocab::student("name").str() + "> \"Alice\" .\n<#degree> <" +
                         vocab::cas("title").str() + "> \"BSc Computer Science\" .\n",
          "dossier.ttl", "text/turtle"},
         {"document", "diploma bytes", "diploma.pdf", "application/pdf"}});
    REQUIRE(issued.status == 201);
    const Iri dossier(issued.location);
    const std::string package_target = "/package/" + dossier.str().substr(dossier.str().rfind('/') + 1);

    CHECK(alice.get(package_target).status == 404);
    CHECK(bob.post("/actors/bob/grants",
                   "<" + dossier.str() + "> <" + vocab::permission().str() + "> <" + r.alice.webid.str() + "> .",
                   "text/turtle")
              .status == 200);
    auto shared = alice.get("/shared");
    REQUIRE(shared.status == 200);
    CHECK(shared.body.find(dossier.str()) != std::string::npos);
    CHECK(shared.body.find(exchange::bachelor_dossier_kind().str()) != std::string::npos);
    CHECK(bob.get("/shared").body == "[]\n");
    auto zip = alice.get(package_target);
    REQUIRE(zip.status == 200);
    CHECK(zip.content_type == "application/zip");
    CHECK(exchange::validate_package(zip.body).empty());

    auto imported = alice.post("/actors/alice/import", zip.body, "application/zip");
    REQUIRE(imported.status == 200);
    CHECK(imported.body.find("\"documents_added\":1") != std::string::npos);
    auto dup = alice.post("/actors/alice/import", zip.body, "application/zip");
    CHECK(dup.body.find("duplicate") != std::string::npos);

    std::string broken = zip.body;
    broken[broken.size() / 2] ^= 0x55;
    auto rejected = alice.post("/actors/alice/import", broken, "application/zip");
    CHECK(rejected.status == 422);
    CHECK(rejected.content_type == "application/json");

    auto packages = alice.get("/actors/alice/packages");
    REQUIRE(packages.status == 200);
    CHECK(packages.body.find(dossier.str()) != std::string::npos);
    CHECK(alice.get("/graphs/alice").status == 200);
    CHECK(bob.get("/graphs/alice").status == 404);
}
