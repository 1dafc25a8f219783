// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "dossier_generator.hpp"
#include "fake_fetcher.hpp"
#include "generators.hpp"
#include "student_sample.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"
#include "webcas/cas/service.hpp"
#include "webcas/cli/cli.hpp"
#include "webcas/exchange/zip.hpp"
#include "webcas/rdf/isomorphism.hpp"
#include "webcas/rdf/turtle.hpp"
#include "webcas/server/client.hpp"
#include "webcas/server/server.hpp"
#include "webcas/webid/identity.hpp"
#include "webcas/webid/verify.hpp"
#include "webcas/workflow/state_machine.hpp"

using namespace webcas;
using namespace webcas::rdf;
using cas::AccessDecision;
using webcas::testing::TempDir;

namespace {

// Collects the first few failures of a criterion.
struct Check {
    std::vector<std::string> failures;

    void operator()(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
    bool ok() const { return failures.empty(); }
};

using Clock = std::chrono::steady_clock;

bool run(int number, const std::string& name, double limit_seconds, const std::function<void(Check&)>& body) {
    Check check;
    const auto start = Clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_seconds > 0)
        check(seconds < limit_seconds, "runtime " + std::to_string(seconds) + " s over " + std::to_string(limit_seconds) + " s");
    std::ostringstream line;
    line.precision(3);
    line << std::fixed << (check.ok() ? "PASS" : "FAIL") << ' ' << number << ' ' << name << " (" << seconds << " s)";
    std::cout << line.str() << '\n';
    for (const auto& f : check.failures) std::cout << "    " << f << '\n';
    std::cout.flush();
    return check.ok();
}

void student_sample(Check& check) {
    const Iri node("http://example.org/Student#");
    const auto s = [](const char* local) { return vocab::student(local); };
    const Graph g = parse_turtle(kStudentSample).graph;
    check(g.size() == 7, "expected 7 triples, got " + std::to_string(g.size()));
    const Triple expected[] = {
        {node, vocab::rdf_type(), s("Student")},
        {node, s("webid"), Iri("http://example.org/StudentWebID")},
        {node, s("name"), Literal("Dent")},
        {node, s("vorname"), Literal("Stu")},
        {node, s("email"), Literal("stu.dent@example.org")},
        {node, s("matrikelnummer"), Literal("1-234-56")},
        {node, s("permission"), Iri("http://hmsc.example.org/webid#id")},
    };
    for (const auto& t : expected) check(g.contains(t), "missing " + to_ntriples(t.object));
    const Graph again = parse_turtle(serialize_turtle(g, standard_prefixes())).graph;
    check(graph_isomorphic(g, again), "serialize/parse not isomorphic");
}

void turtle_round_trip(Check& check) {
    testing::GraphGenerator gen(20240611);
    std::size_t failures = 0;
    for (int i = 0; i < 250; ++i) {
        const Graph g = gen.graph(40);
        const Graph back = parse_turtle(serialize_turtle(g, standard_prefixes())).graph;
        if (!graph_isomorphic(g, back)) ++failures;
    }
    check(failures == 0, std::to_string(failures) + " of 250 graphs did not round-trip");
}

void webid_matrix(Check& check) {
    using webid::DenialReason;
    const Iri who("https://student.example/profile/stu#id");
    const Iri document = who.without_fragment();
    const auto bundle = webid::generate_identity("Stu", who, 30);
    const auto turtle = [](const Graph& g) { return serialize_turtle(g, standard_prefixes()); };
    const auto expect = [&](const char* name, const webid::AuthResult& r, std::optional<DenialReason> reason) {
        if (!reason)
            check(r.ok() && *r.webid == who, std::string(name) + ": expected Authenticated");
        else
            check(!r.ok() && r.reason == *reason,
                  std::string(name) + ": expected " + std::string(webid::to_string(*reason)) + ", got " +
                      (r.ok() ? std::string("Authenticated") : std::string(webid::to_string(r.reason))));
    };

    {
        testing::FakeFetcher f;
        f.serve(document, turtle(bundle.profile));
        expect("matching key", webid::verify_webid(bundle.certificate, f), std::nullopt);
    }
    {
        // Last hex digit of the published modulus flipped.
        std::string hex = bundle.private_key.public_key().modulus_hex();
        hex.back() = hex.back() == '0' ? '1' : '0';
        Graph tampered;
        for (const Triple& t : bundle.profile)
            tampered.insert(t.predicate == vocab::cert("modulus")
                                ? Triple(t.subject, t.predicate, Literal(hex, vocab::xsd("hexBinary")))
                                : t);
        testing::FakeFetcher f;
        f.serve(document, turtle(tampered));
        expect("modulus tampered", webid::verify_webid(bundle.certificate, f), DenialReason::KeyMismatch);
    }
    {
        const auto bare = webid::issue_self_signed(bundle.private_key, {"no san", {}, 30, false});
        testing::FakeFetcher f;
        f.serve(document, turtle(bundle.profile));
        expect("no SAN", webid::verify_webid(bare, f), DenialReason::NoSan);
        check(f.requests().empty(), "no SAN: a profile was fetched");
    }
    {
        testing::FakeFetcher f;
        f.fail(document, "connection refused");
        expect("unreachable", webid::verify_webid(bundle.certificate, f), DenialReason::ProfileUnreachable);
    }
    {
        testing::FakeFetcher f;
        f.serve(document, "<#id> a <http://xmlns.com/foaf/0.1/Person> ; <http://www.w3.org/ns/auth/cert#key> [");
        expect("unparseable", webid::verify_webid(bundle.certificate, f), DenialReason::ProfileUnparseable);
    }
    {
        const auto decoy = webid::generate_identity("Decoy", who, 30).private_key.public_key();
        const auto real = bundle.private_key.public_key();
        const std::string text =
            "@prefix cert: <http://www.w3.org/ns/auth/cert#> .\n"
            "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n"
            "<#id> a <http://xmlns.com/foaf/0.1/Person> ; cert:key _:k1, _:k2 .\n"
            "_:k1 a cert:RSAPublicKey ; cert:modulus \"" + decoy.modulus_hex() + "\"^^xsd:hexBinary ; "
            "cert:exponent " + std::to_string(decoy.exponent()) + " .\n"
            "_:k2 a cert:RSAPublicKey ; cert:modulus \"" + real.modulus_hex() + "\"^^xsd:hexBinary ; "
            "cert:exponent " + std::to_string(real.exponent()) + " .\n";
        testing::FakeFetcher f;
        f.serve(document, text);
        expect("second key matches", webid::verify_webid(bundle.certificate, f), std::nullopt);
    }
}

void access_control(Check& check) {
    const Iri base("https://cas.example.org");
    std::mt19937_64 rng(1000);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    std::size_t probes = 0, allows = 0, mismatches = 0;
    while (probes < 1000) {
        QuadStore store;
        std::vector<cas::ActorId> actors;
        std::vector<Iri> webids;
        for (int i = 0; i < 3; ++i) {
            actors.emplace_back(base, "a" + std::to_string(i));
            webids.push_back(Iri("https://id" + std::to_string(i) + ".example/p#me"));
        }
        webids.push_back(Iri("https://stranger.example/p#me"));
        std::vector<Iri> resources;
        for (int i = 0; i < 6; ++i) resources.push_back(Iri(base.str() + "/documents/r" + std::to_string(i)));

        std::vector<Quad> quads;
        for (std::size_t i = 0; i < actors.size(); ++i)
            if (pick(4) != 0) quads.emplace_back(actors[i].graph_iri(), Term(actors[i].node()), vocab::webid(), Term(webids[i]));
        for (const auto& r : resources)
            for (std::size_t c = 0, n = pick(5) == 0 ? 2 : pick(6) == 0 ? 0 : 1; c < n; ++c)
                quads.emplace_back(actors[pick(actors.size())].graph_iri(), Term(r), vocab::rdf_type(), Term(vocab::cas("Document")));
        for (int k = 0; k < 10; ++k) {
            const auto& g = actors[pick(actors.size())].graph_iri();
            const auto& r = resources[pick(resources.size())];
            const auto& w = webids[pick(webids.size())];
            switch (pick(3)) {
                case 0: quads.emplace_back(g, Term(r), vocab::permission(), Term(w)); break;
                case 1: quads.emplace_back(g, Term(r), vocab::webid(), Term(w)); break;
                default: quads.emplace_back(g, Term(w), vocab::permission(), Term(r)); break;
            }
        }
        store.insert(quads);
        const auto all = store.match({});
        for (const auto& r : resources) {
            std::vector<std::optional<Iri>> requesters{std::nullopt};
            for (const auto& w : webids) requesters.emplace_back(w);
            for (const auto& w : requesters) {
                const auto got = cas::check_access(store, r, w);
                if (got != testing::access_oracle(all, r, w)) ++mismatches;
                if (cas::allowed(got)) ++allows;
                ++probes;
            }
        }
    }
    check(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(probes) + " probes disagree with the scan");
    check(allows > 50 && allows < probes - 50, "probes do not exercise both allow and deny");

    {
        QuadStore store;
        const cas::ActorId owner(base, "owner");
        const Iri resource(base.str() + "/documents/x");
        const Iri grantee("https://master.example/profile/m#id");
        store.insert(std::vector{Quad(owner.graph_iri(), Term(owner.node()), vocab::webid(), Term(owner.webid())),
                                 Quad(owner.graph_iri(), Term(resource), vocab::rdf_type(), Term(vocab::cas("Document")))});
        const Graph before = *store.graph(owner.graph_iri());
        std::vector<AccessDecision> seq{cas::check_access(store, resource, grantee)};
        cas::grant_permission(store, owner, resource, grantee);
        seq.push_back(cas::check_access(store, resource, grantee));
        cas::revoke_permission(store, owner, resource, grantee);
        seq.push_back(cas::check_access(store, resource, grantee));
        check(seq == std::vector{AccessDecision::DenyNoPermission, AccessDecision::AllowGranted,
                                 AccessDecision::DenyNoPermission},
              "grant/revoke sequence differs");
        check(*store.graph(owner.graph_iri()) == before, "revoke did not restore the owner graph");
    }

    {
        TempDir dir("webcas-acceptance");
        cas::ServiceConfig config;
        config.data_dir = dir / "cas";
        config.listen_port = server::pick_free_port();
        config.base_iri = Iri("https://127.0.0.1:" + std::to_string(config.listen_port));
        cas::Service service(config);
        auto [alice, alice_id] = service.create_actor("alice", {{vocab::foaf("name"), Literal("Alice")}}, vocab::student("Student"));
        auto bob_id = service.create_actor("bob", {{vocab::foaf("name"), Literal("Bob")}}, vocab::cas("University")).second;
        const auto doc = service.store_document(alice, "private bytes", "cv.pdf", "application/pdf").iri;
        server::CasServer http(service);
        http.start();
        server::CasClient bob(http.origin(), bob_id,
                              {.ca_file = (config.data_dir / "tls" / "server.pem").string()});
        const auto ungranted = bob.get(doc.str().substr(config.base_iri.str().size()));
        const auto absent = bob.get("/documents/00000000-0000-4000-8000-000000000000");
        check(ungranted.status == 404 && absent.status == 404, "denials are not 404");
        check(ungranted.body == absent.body && ungranted.content_type == absent.content_type,
              "absent and ungranted responses differ");
        http.stop();
    }
}

void package_round_trip(Check& check) {
    const Iri source_base("https://bachelor.example");
    const Iri target_base("https://student.example");
    TempDir dir("webcas-acceptance");
    const cas::ActorId source(source_base, "uni");
    QuadStore source_store;
    testing::add_bare_actor(source_store, source, source.webid());
    const cas::DocumentStore source_files(dir / "source");
    testing::DossierGenerator gen(50);

    for (int round = 0; round < 50; ++round) {
        const std::string tag = "dossier " + std::to_string(round) + ": ";
        const auto dossier = gen.make(source_store, source_files, source_base, source);
        const std::string zip = exchange::export_package(source_store, source_files, dossier.iri);
        check(exchange::validate_package(zip).empty(), tag + "validation issues");

        Graph manifest;
        for (const auto& e : exchange::read_zip(zip))
            if (e.name == "manifest.ttl") manifest = parse_turtle(e.data).graph;
        std::size_t permissions = 0;
        for (const auto& t : manifest) permissions += t.predicate == vocab::permission();
        check(permissions == 0, tag + "permission triples in manifest");

        const cas::ActorId target(target_base, "stu");
        QuadStore store;
        testing::add_bare_actor(store, target, target.webid());
        const cas::DocumentStore files(dir / ("target" + std::to_string(round)));
        const Graph before = *store.graph(target.graph_iri());
        const auto report = exchange::import_package(store, files, target_base, target, zip);
        const Graph added = testing::minus(*store.graph(target.graph_iri()), before);

        Graph expected = dossier.statements;
        for (const auto& rec : dossier.documents)
            for (const auto& t : rec.metadata()) expected.insert(t);
        check(graph_isomorphic(testing::unhome(added, report.local, dossier.iri), expected),
              tag + "imported statements differ modulo re-homing");

        std::multiset<std::string> want, got;
        for (const auto& bytes : dossier.contents) want.insert(sha256_hex(bytes));
        for (const auto& rec : cas::documents_of(store, target)) got.insert(sha256_hex(files.read(rec.id)));
        check(want == got, tag + "document digests differ");
    }

    const auto any = gen.make(source_store, source_files, source_base, source);
    auto entries = exchange::read_zip(exchange::export_package(source_store, source_files, any.iri));
    entries.push_back({"documents/../../escape", "x"});
    const std::string evil = exchange::write_zip(entries);
    bool flagged = false;
    for (const auto& issue : exchange::validate_package(evil)) flagged |= issue.rule == "path-traversal";
    check(flagged, "path traversal not reported");

    const cas::ActorId target(target_base, "stu");
    QuadStore store;
    testing::add_bare_actor(store, target, target.webid());
    const cas::DocumentStore files(dir / "evil");
    const auto version = store.version();
    bool rejected = false;
    try {
        exchange::import_package(store, files, target_base, target, evil);
    } catch (const exchange::PackageError&) {
        rejected = true;
    }
    check(rejected && store.version() == version, "path traversal archive imported");
    check(!std::filesystem::exists(dir / "escape"), "file written outside the document store");
}

void scenario(Check& check) {
    std::ostringstream out, err;
    std::istringstream in;
    const int code = cli::run({"scenario", "run", "--fixtures", WEBCAS_SOURCE_DIR "/demo.conf"}, out, err, in);
    check(code == 0, "exit code " + std::to_string(code) + ": " + err.str());
    std::vector<std::string> results;
    std::istringstream lines(out.str());
    for (std::string line; std::getline(lines, line);) results.push_back(line.substr(line.rfind('\t') + 1));
    check(results.size() == 10, "transcript has " + std::to_string(results.size()) + " lines");
    if (results.size() != 10) return;
    check(results[9].starts_with("DecisionRetrieved"), "last line: " + results[9]);
    std::size_t denials = 0;
    for (const auto& r : results) denials += r.starts_with("Denied");
    check(denials == 2 && results[3].starts_with("Denied") && results[7].starts_with("Denied"),
          "pre-grant denials missing");
}

void state_machine(Check& check) {
    using namespace workflow;
    std::size_t legal = 0;
    for (const auto s : kAllStates)
        for (const auto e : kAllEvents) {
            try {
                advance(s, e);
                ++legal;
            } catch (const IllegalTransition&) {
            }
        }
    check(legal == 8, std::to_string(legal) + " legal transitions");
}

}  // namespace

int main() {
    bool ok = true;
    ok &= run(1, "student-sample-fidelity", 1, student_sample);
    ok &= run(2, "turtle-round-trip", 10, turtle_round_trip);
    ok &= run(3, "webid-verification-matrix", 0, webid_matrix);
    ok &= run(4, "access-control", 0, access_control);
    ok &= run(5, "package-round-trip", 30, package_round_trip);
    ok &= run(6, "end-to-end-scenario", 10, scenario);
    ok &= run(7, "state-machine-exhaustion", 0, state_machine);
    return ok ? 0 : 1;
}
