#include <doctest.h>

#include "dossier_generator.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"
#include "webcas/exchange/zip.hpp"
#include "webcas/rdf/isomorphism.hpp"
#include "webcas/rdf/persistence.hpp"
#include "webcas/rdf/turtle.hpp"

using namespace webcas;
using namespace webcas::exchange;
using namespace webcas::rdf;
using webcas::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const Iri kBachelorBase("https://bachelor.example");
const Iri kStudentBase("https://student.example");

struct Side {
    explicit Side(const Iri& base_, const char* slug) : base(base_), actor(base_, slug) {
        testing::add_bare_actor(store, actor, actor.webid());
    }
    TempDir dir;
    Iri base;
    cas::ActorId actor;
    QuadStore store;
    cas::DocumentStore files{dir / "files"};
};

std::vector<std::string> entry_names(const std::string& zip) {
    std::vector<std::string> out;
    for (const auto& e : read_zip(zip)) out.push_back(e.name);
    return out;
}

Graph manifest_of(const std::string& zip) {
    for (const auto& e : read_zip(zip))
        if (e.name == "manifest.ttl") return parse_turtle(e.data).graph;
    FAIL("no manifest");
    return {};
}

std::string rezip(const std::string& zip, const std::function<void(std::vector<ZipEntry>&)>& edit) {
    auto entries = read_zip(zip);
    edit(entries);
    return write_zip(entries);
}

bool has_rule(const std::vector<Issue>& issues, const std::string& rule, const std::string& subject = {}) {
    for (const auto& i : issues)
        if (i.rule == rule && (subject.empty() || i.subject == subject)) return true;
    return false;
}

std::size_t file_count(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_CASE("zip codec") {
    SUBCASE("round trip, stored and deflated, deterministic") {
        std::mt19937_64 rng(1);
        std::vector<ZipEntry> entries{{"manifest.ttl", std::string(5000, 'a')}, {"documents/x", ""}};
        std::string noise(70000, '\0');
        for (auto& c : noise) c = static_cast<char>(rng());
        entries.push_back({"documents/noise", noise});
        const auto zip = write_zip(entries);
        CHECK(zip == write_zip(entries));
        auto back = read_zip(zip);
        REQUIRE(back.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(back[i].name == entries[i].name);
            CHECK(back[i].data == entries[i].data);
        }
        CHECK(zip.size() < 5000 + 70000);
    }
    SUBCASE("archive written by Python's zipfile") {
        auto entries = read_zip(read_file(fs::path(WEBCAS_TEST_DATA) / "python_made.zip"));
        REQUIRE(entries.size() == 3);
        CHECK(entries[0].name == "a.txt");
        CHECK(entries[0].data == "hello");
        CHECK(entries[1].name == "dir/b.bin");
        CHECK(entries[1].data == std::string(1000, 'x'));
        CHECK(entries[2].data.empty());
    }
    SUBCASE("damage is detected") {
        const auto zip = write_zip({{"documents/a", std::string(300, 'q')}});
        CHECK_THROWS_AS(read_zip(""), ZipError);
        CHECK_THROWS_AS(read_zip("PK not really a zip at all, just text padding"), ZipError);
        CHECK_THROWS_AS(read_zip(zip.substr(0, zip.size() - 3)), ZipError);
        auto flipped = zip;
        flipped[45] ^= 0x20;
        CHECK_THROWS_AS(read_zip(flipped), ZipError);
        CHECK_THROWS_AS(read_zip(zip, ZipLimits{.max_entries = 4096, .max_total_bytes = 100}), ZipError);
    }
}

TEST_CASE("dossier_statements follows blank and fragment nodes only") {
    const Iri d("https://x.example/dossiers/1");
    const Term frag(Iri("https://x.example/dossiers/1#a"));
    const Term other(Iri("https://x.example/dossiers/2"));
    const Iri p("http://e/p");
    Graph g{
        {Term(d), p, frag},
        {frag, p, Term(BlankNode{"b"})},
        {Term(BlankNode{"b"}), p, Term(Literal("deep"))},
        {Term(d), p, other},
        {other, p, Term(Literal("not followed"))},
        {Term(d), vocab::permission(), Term(Iri("https://m/#id"))},
    };
    auto s = dossier_statements(g, d);
    CHECK(s.size() == 4);
    CHECK_FALSE(s.contains(Triple(other, p, Term(Literal("not followed")))));
    CHECK_FALSE(s.contains(Triple(Term(d), vocab::permission(), Term(Iri("https://m/#id")))));
}

TEST_CASE("export_package") {
    Side bachelor(kBachelorBase, "uni");
    testing::DossierGenerator gen(42);
    SUBCASE("entry counts follow the included documents") {
        for (int i = 0; i < 20; ++i) {
            auto dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
            const auto zip = export_package(bachelor.store, bachelor.files, dossier.iri);
            CHECK(entry_names(zip).size() == dossier.documents.size() + 1);
            CHECK(entry_names(zip).front() == "manifest.ttl");
            const auto manifest = manifest_of(zip);
            std::size_t paths = 0;
            for (const auto& t : manifest) {
                CHECK(t.predicate != vocab::permission());
                paths += t.predicate == vocab::cas("archivePath");
            }
            CHECK(paths == dossier.documents.size());
            CHECK(validate_package(zip).empty());
            CHECK(zip == export_package(bachelor.store, bachelor.files, dossier.iri));
        }
    }
    SUBCASE("bachelor kind survives") {
        const Iri d("https://bachelor.example/dossiers/b1");
        std::vector<Quad> q{{bachelor.actor.graph_iri(), Term(d), vocab::rdf_type(), Term(vocab::cas("Package"))},
                            {bachelor.actor.graph_iri(), Term(d), vocab::cas("packageKind"),
                             Term(bachelor_dossier_kind())}};
        bachelor.store.insert(q);
        const auto zip = export_package(bachelor.store, bachelor.files, d);
        CHECK(entry_names(zip) == std::vector<std::string>{"manifest.ttl"});
        CHECK(manifest_of(zip).objects(Term(d), vocab::cas("packageKind")) ==
              std::vector<Term>{Term(bachelor_dossier_kind())});
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(export_package(bachelor.store, bachelor.files, Iri("https://bachelor.example/dossiers/none")),
                        NotFoundError);
        testing::DossierGenerator g2(5);
        testing::GeneratedDossier dossier = g2.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
        while (dossier.documents.empty()) dossier = g2.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
        fs::remove(bachelor.files.path_of(dossier.documents[0].id));
        CHECK_THROWS_AS(export_package(bachelor.store, bachelor.files, dossier.iri), NotFoundError);
    }
}

TEST_CASE("validate_package reports each violated rule") {
    Side bachelor(kBachelorBase, "uni");
    testing::DossierGenerator gen(7);
    auto dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
    while (dossier.documents.size() < 2) dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
    const auto zip = export_package(bachelor.store, bachelor.files, dossier.iri);
    REQUIRE(validate_package(zip).empty());
    const std::string first = "documents/" + dossier.documents[0].id;

    CHECK(has_rule(validate_package("garbage"), "malformed-zip"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.push_back({"documents/../evil", "x"}); })),
                   "path-traversal", "documents/../evil"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.push_back({"/etc/passwd", "x"}); })),
                   "path-traversal"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.push_back({"documents\\x", "x"}); })),
                   "path-traversal"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.push_back({"documents/a/b", "x"}); })),
                   "path-traversal"));
    CHECK(has_rule(validate_package(rezip(zip, [&](auto& e) {
                       for (auto& x : e)
                           if (x.name == first) x.data[0] ^= 1;
                   })),
                   "sha256-mismatch", first));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.push_back({"documents/extra", "x"}); })),
                   "orphan-entry", "documents/extra"));
    CHECK(has_rule(validate_package(rezip(zip, [&](auto& e) {
                       std::erase_if(e, [&](const ZipEntry& x) { return x.name == first; });
                   })),
                   "missing-entry", first));
    CHECK(has_rule(validate_package(rezip(zip, [&](auto& e) { e.push_back(e.back()); })), "duplicate-entry"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e.erase(e.begin()); })), "missing-manifest"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) { e[0].data += "\n<oops"; })), "unparseable-manifest"));
    CHECK(has_rule(validate_package(rezip(zip, [](auto& e) {
                       e[0].data += "\n<https://b/other> a <http://persemid.bfh.ch/vocab/cas#Package> .\n";
                   })),
                   "package-node"));
    CHECK(has_rule(validate_package(write_zip({{"manifest.ttl", ""}})), "package-node"));
    CHECK(has_rule(validate_package(write_zip({{"manifest.ttl",
                                                "<https://b/p> a <http://persemid.bfh.ch/vocab/cas#Package> ;"
                                                " <http://persemid.bfh.ch/vocab/cas#packageKind> <https://b/Odd> ."}})),
                   "package-kind", "https://b/p"));
}

using testing::minus;
using testing::unhome;
using testing::without;

TEST_CASE("import round trip over randomized dossiers") {
    Side bachelor(kBachelorBase, "uni");
    testing::DossierGenerator gen(2024);
    for (int round = 0; round < 50; ++round) {
        Side student(kStudentBase, "student");
        auto dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
        const auto zip = export_package(bachelor.store, bachelor.files, dossier.iri);
        REQUIRE(validate_package(zip).empty());
        const auto manifest = manifest_of(zip);

        // The manifest is exactly the dossier statements plus document metadata.
        Graph expected = dossier.statements;
        for (const auto& rec : dossier.documents)
            for (const auto& t : rec.metadata()) expected.insert(t);
        CHECK(without(manifest, vocab::cas("archivePath")) == expected);

        const Graph before = *student.store.graph(student.actor.graph_iri());
        auto report = import_package(student.store, student.files, student.base, student.actor, zip);
        CHECK(report.documents_added == dossier.documents.size());
        CHECK(report.source == dossier.iri);
        CHECK(report.local.starts_with("https://student.example/dossiers/"));
        const Graph after = *student.store.graph(student.actor.graph_iri());
        const Graph added = minus(after, before);
        CHECK(report.triples_added == added.size());
        CHECK(graph_isomorphic(unhome(added, report.local, dossier.iri), expected));

        auto docs = cas::documents_of(student.store, student.actor);
        REQUIRE(docs.size() == dossier.documents.size());
        std::multiset<std::string> want, got;
        for (const auto& rec : dossier.documents) want.insert(rec.sha256);
        for (const auto& rec : docs) {
            const auto bytes = student.files.read(rec.id);
            CHECK(sha256_hex(bytes) == rec.sha256);
            got.insert(sha256_hex(bytes));
            CHECK(rec.iri.starts_with("https://student.example/documents/"));
        }
        CHECK(got == want);
        for (const auto& q : student.store.match({}))
            CHECK_FALSE((q.predicate == vocab::permission()));
    }
}

TEST_CASE("import_package behaviour") {
    Side bachelor(kBachelorBase, "uni");
    Side student(kStudentBase, "student");
    testing::DossierGenerator gen(3);
    auto dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
    while (dossier.documents.size() != 2) dossier = gen.make(bachelor.store, bachelor.files, bachelor.base, bachelor.actor);
    const auto zip = export_package(bachelor.store, bachelor.files, dossier.iri);

    SUBCASE("re-import is skipped with a warning") {
        auto first = import_package(student.store, student.files, student.base, student.actor, zip);
        CHECK(first.documents_added == 2);
        CHECK(first.warnings.empty());
        const auto version = student.store.version();
        auto second = import_package(student.store, student.files, student.base, student.actor, zip);
        CHECK(second.documents_added == 0);
        CHECK(second.triples_added == 0);
        REQUIRE(second.warnings.size() == 1);
        CHECK(second.warnings[0].find("duplicate") != std::string::npos);
        CHECK(second.local == first.local);
        CHECK(student.store.version() == version);
        CHECK(file_count(student.dir / "files") == 2);
    }
    SUBCASE("invalid packages change nothing") {
        const auto version = student.store.version();
        auto evil = rezip(zip, [](auto& e) { e.push_back({"documents/../../escape", "x"}); });
        try {
            import_package(student.store, student.files, student.base, student.actor, evil);
            FAIL("expected PackageError");
        } catch (const PackageError& e) {
            CHECK(has_rule(e.issues(), "path-traversal"));
        }
        CHECK(student.store.version() == version);
        CHECK(file_count(student.dir / "files") == 0);
        CHECK_FALSE(fs::exists(student.dir.path().parent_path() / "escape"));
    }
    SUBCASE("a failed file write rolls back") {
        const auto version = student.store.version();
        fs::remove_all(student.dir / "files");
        CHECK_THROWS_AS(import_package(student.store, student.files, student.base, student.actor, zip), IoError);
        CHECK(student.store.version() == version);
    }
    SUBCASE("statements about local resources and grants are dropped") {
        const std::string actor_node = student.actor.node().str();
        auto hostile = rezip(zip, [&](auto& e) {
            e[0].data += "\n<" + actor_node + "> <http://persemid.bfh.ch/vocab/student#webid> <https://evil/#me> .\n";
            e[0].data += "<" + dossier.iri.str() + "> <http://persemid.bfh.ch/vocab/student#permission> <https://evil/#me> .\n";
        });
        REQUIRE(validate_package(hostile).empty());
        auto report = import_package(student.store, student.files, student.base, student.actor, hostile);
        CHECK(report.warnings.size() == 2);
        CHECK(cas::check_access(student.store, report.local, Iri("https://evil/#me")) ==
              cas::AccessDecision::DenyNoPermission);
        CHECK(cas::check_access(student.store, report.local, student.actor.webid()) ==
              cas::AccessDecision::AllowOwner);
    }
    SUBCASE("unknown actor") {
        CHECK_THROWS_AS(import_package(student.store, student.files, student.base,
                                       cas::ActorId(kStudentBase, "ghost"), zip),
                        NotFoundError);
        CHECK(file_count(student.dir / "files") == 0);
    }
}
