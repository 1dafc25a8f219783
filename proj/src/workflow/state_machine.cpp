#include "webcas/workflow/state_machine.hpp"

#include <string>

namespace webcas::workflow {

std::string_view to_string(EnrollmentState s) noexcept {
    switch (s) {
        case EnrollmentState::Start: return "Start";
        case EnrollmentState::BachelorDossierIssued: return "BachelorDossierIssued";
        case EnrollmentState::BachelorDataImported: return "BachelorDataImported";
        case EnrollmentState::ApplicationComposed: return "ApplicationComposed";
        case EnrollmentState::AccessGranted: return "AccessGranted";
        case EnrollmentState::DossierFetched: return "DossierFetched";
        case EnrollmentState::DecisionRecorded: return "DecisionRecorded";
        case EnrollmentState::DecisionAccessGranted: return "DecisionAccessGranted";
        case EnrollmentState::DecisionRetrieved: return "DecisionRetrieved";
    }
    return "?";
}

std::string_view to_string(EnrollmentEvent e) noexcept {
    switch (e) {
        case EnrollmentEvent::IssueBachelorDossier: return "IssueBachelorDossier";
        case EnrollmentEvent::ImportBachelorData: return "ImportBachelorData";
        case EnrollmentEvent::ComposeApplication: return "ComposeApplication";
        case EnrollmentEvent::GrantDossierAccess: return "GrantDossierAccess";
        case EnrollmentEvent::FetchDossier: return "FetchDossier";
        case EnrollmentEvent::RecordDecision: return "RecordDecision";
        case EnrollmentEvent::GrantDecisionAccess: return "GrantDecisionAccess";
        case EnrollmentEvent::RetrieveDecision: return "RetrieveDecision";
    }
    return "?";
}

IllegalTransition::IllegalTransition(EnrollmentState state, EnrollmentEvent event)
    : Error("illegal transition: " + std::string(to_string(event)) + " in state " + std::string(to_string(state))),
      state_(state),
      event_(event) {}

bool is_terminal(EnrollmentState s) noexcept { return s == EnrollmentState::DecisionRetrieved; }

EnrollmentState advance(EnrollmentState state, EnrollmentEvent event) {
    // State i accepts exactly event i and moves to state i + 1.
    const auto i = static_cast<std::size_t>(state);
    if (i < kAllEvents.size() && kAllEvents[i] == event) return kAllStates[i + 1];
    throw IllegalTransition(state, event);
}

}  // namespace webcas::workflow
