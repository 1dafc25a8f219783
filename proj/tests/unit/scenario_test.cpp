#include <doctest.h>

#include <regex>

#include "webcas/rdf/vocab.hpp"
#include "webcas/workflow/scenario.hpp"

using namespace webcas;
using namespace webcas::workflow;

namespace {

std::vector<std::string> normalized(const Transcript& t) {
    static const std::regex uuid("[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}");
    static const std::regex port("127\\.0\\.0\\.1:[0-9]+");
    std::vector<std::string> out;
    for (const auto& e : t.entries) {
        std::string line = e.actor + "\t" + e.event + "\t" + e.result;
        line = std::regex_replace(line, uuid, "UUID");
        out.push_back(std::regex_replace(line, port, "HOST"));
    }
    return out;
}

}  // namespace

TEST_CASE("fixture parsing") {
    auto f = ScenarioFixtures::from(KeyValueConfig::parse(
        "student.name = Muster\noutcome = Rejected\nselection.predicates = s:name, <urn:x:p>, cas:title\n"
        "bachelor.documents = a.pdf,  b.txt\nmaster.listen = 127.0.0.1:0\n"));
    CHECK(f.outcome == Outcome::Rejected);
    CHECK(f.selection_predicates.size() == 3);
    CHECK(f.selection_predicates.contains(rdf::Iri("urn:x:p")));
    CHECK(f.bachelor.documents == std::vector<std::string>{"a.pdf", "b.txt"});
    CHECK(f.student.attributes[0].second.lexical() == "Muster");
    CHECK(f.student.attributes[3].second.lexical() == "1-234-56");
    CHECK_THROWS_AS(ScenarioFixtures::from(KeyValueConfig::parse("colour = red\n")), ParseError);
    CHECK_THROWS_AS(ScenarioFixtures::from(KeyValueConfig::parse("selection.predicates = x:y\n")), ParseError);
    CHECK_THROWS_AS(ScenarioFixtures::from(KeyValueConfig::parse("outcome = perhaps\n")), ValidationError);
    CHECK_THROWS_AS(ScenarioFixtures::from(KeyValueConfig::parse("student.listen = nowhere\n")), ValidationError);
}

TEST_CASE("default scenario") {
    std::vector<std::string> streamed;
    auto t = run_scenario(ScenarioFixtures::defaults(), [&](const TranscriptEntry& e) { streamed.push_back(e.line()); });
    REQUIRE(t.entries.size() == 10);
    CHECK(streamed.size() == 10);
    CHECK(t.state == EnrollmentState::DecisionRetrieved);
    CHECK(t.entries[3].event == "FetchDossier");
    CHECK(t.entries[3].result.starts_with("Denied 404"));
    CHECK(t.entries[7].event == "RetrieveDecision");
    CHECK(t.entries[7].result.starts_with("Denied 404"));
    CHECK(t.entries[2].result.find("with 2 documents") != std::string::npos);
    CHECK(t.entries[9].result.starts_with("DecisionRetrieved Accepted"));
    for (const auto& e : t.entries) {
        const std::string line = e.line();
        CHECK(line.find('\n') == std::string::npos);
        CHECK(std::count(line.begin(), line.end(), '\t') == 3);
    }

    SUBCASE("reproducible modulo identifiers") {
        auto again = run_scenario(ScenarioFixtures::defaults());
        CHECK(normalized(again) == normalized(t));
    }
}

TEST_CASE("scenario variants") {
    SUBCASE("rejection") {
        auto f = ScenarioFixtures::defaults();
        f.outcome = Outcome::Rejected;
        auto t = run_scenario(f);
        REQUIRE(t.entries.size() == 10);
        CHECK(t.entries.back().result.starts_with("DecisionRetrieved Rejected"));
    }
    SUBCASE("mistyped master WebID stops at the fetch") {
        auto f = ScenarioFixtures::defaults();
        f.master.webid_override = rdf::Iri("https://127.0.0.1:9/profile/hmcs#id");
        try {
            run_scenario(f);
            FAIL("scenario completed");
        } catch (const ScenarioAborted& e) {
            CHECK(e.denied());
            const auto& entries = e.transcript().entries;
            REQUIRE(entries.size() == 6);
            CHECK(entries.back().event == "FetchDossier");
            CHECK(entries.back().result.starts_with("Denied 404"));
            CHECK(e.transcript().state == EnrollmentState::AccessGranted);
        }
    }
    SUBCASE("unknown selected document") {
        auto f = ScenarioFixtures::defaults();
        f.selection_documents = {"missing.pdf"};
        CHECK_THROWS_AS(run_scenario(f), ScenarioAborted);
    }
}
