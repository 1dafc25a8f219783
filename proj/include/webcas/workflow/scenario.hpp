#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "webcas/config.hpp"
#include "webcas/workflow/procedures.hpp"
#include "webcas/workflow/state_machine.hpp"

namespace webcas::workflow {

/// Inputs of one enrollment run across three CAS instances on this host.
/// Fixture file keys (all optional):
///   data_dir                      where the three instances live; a fresh
///                                 temporary directory (removed afterwards) if unset
///   bachelor.listen / student.listen / master.listen    host:port, port 0 = any
///   bachelor.slug / student.slug / master.slug
///   bachelor.name / master.name   foaf:name of the university actors
///   student.name / student.vorname / student.email / student.matrikelnummer
///   degree.title
///   bachelor.documents / student.documents    comma-separated file names
///   documents_dir                 read named documents from here if present
///   selection.documents           file names to include in the application
///   selection.predicates          s:, cas:, foaf: names or <iri>, comma-separated
///   master.webid / student.webid  grantee WebIDs (default: the real actors')
///   outcome                       Accepted | Rejected
///   comment
struct ScenarioFixtures {
    struct Role {
        std::string slug;
        std::string listen = "127.0.0.1:0";
        webid::Attributes attributes;
        std::vector<std::string> documents;
        std::optional<rdf::Iri> webid_override;
    };

    std::filesystem::path data_dir;
    std::filesystem::path documents_dir;
    Role bachelor;
    Role student;
    Role master;
    std::string degree_title;
    std::vector<std::string> selection_documents;
    std::set<rdf::Iri> selection_predicates;
    Outcome outcome = Outcome::Accepted;
    std::string comment;

    /// Stu Dent, matriculation 1-234-56, two bachelor documents, one own
    /// document, two of the three selected.
    static ScenarioFixtures defaults();
    /// Defaults overridden by the given keys. Unknown keys are rejected.
    static ScenarioFixtures from(const KeyValueConfig& kv, const std::filesystem::path& relative_to = {});
    static ScenarioFixtures load(const std::filesystem::path& path);
};

struct TranscriptEntry {
    std::string timestamp;
    std::string actor;
    std::string event;
    std::string result;

    /// Tab-separated, no trailing newline.
    std::string line() const;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
    EnrollmentState state = EnrollmentState::Start;
};

/// A step failed; `transcript` ends with the failing step.
class ScenarioAborted : public Error {
public:
    ScenarioAborted(Transcript transcript, std::string message, bool denied)
        : Error(std::move(message)), transcript_(std::move(transcript)), denied_(denied) {}
    const Transcript& transcript() const noexcept { return transcript_; }
    /// True when the failure was an access denial.
    bool denied() const noexcept { return denied_; }

private:
    Transcript transcript_;
    bool denied_;
};

/// Starts the three instances, drives the eight workflow steps over HTTPS
/// with client certificates, and asserts that the master's fetch before the
/// student's grant and the student's retrieval before the master's grant
/// are both denied. `on_entry` sees each line as it is appended.
Transcript run_scenario(const ScenarioFixtures& fixtures,
                        const std::function<void(const TranscriptEntry&)>& on_entry = {});

}  // namespace webcas::workflow
