#pragma once

#include <array>
#include <string_view>

#include "webcas/error.hpp"

namespace webcas::workflow {

enum class EnrollmentState {
    Start,
    BachelorDossierIssued,
    BachelorDataImported,
    ApplicationComposed,
    AccessGranted,
    DossierFetched,
    DecisionRecorded,
    DecisionAccessGranted,
    DecisionRetrieved,
};

enum class EnrollmentEvent {
    IssueBachelorDossier,
    ImportBachelorData,
    ComposeApplication,
    GrantDossierAccess,
    FetchDossier,
    RecordDecision,
    GrantDecisionAccess,
    RetrieveDecision,
};

inline constexpr std::array kAllStates{
    EnrollmentState::Start,          EnrollmentState::BachelorDossierIssued, EnrollmentState::BachelorDataImported,
    EnrollmentState::ApplicationComposed, EnrollmentState::AccessGranted, EnrollmentState::DossierFetched,
    EnrollmentState::DecisionRecorded, EnrollmentState::DecisionAccessGranted, EnrollmentState::DecisionRetrieved,
};

inline constexpr std::array kAllEvents{
    EnrollmentEvent::IssueBachelorDossier, EnrollmentEvent::ImportBachelorData, EnrollmentEvent::ComposeApplication,
    EnrollmentEvent::GrantDossierAccess,   EnrollmentEvent::FetchDossier,       EnrollmentEvent::RecordDecision,
    EnrollmentEvent::GrantDecisionAccess,  EnrollmentEvent::RetrieveDecision,
};

std::string_view to_string(EnrollmentState s) noexcept;
std::string_view to_string(EnrollmentEvent e) noexcept;

class IllegalTransition : public Error {
public:
    IllegalTransition(EnrollmentState state, EnrollmentEvent event);
    EnrollmentState state() const noexcept { return state_; }
    EnrollmentEvent event() const noexcept { return event_; }

private:
    EnrollmentState state_;
    EnrollmentEvent event_;
};

/// The one event accepted in each non-terminal state moves to the next state.
EnrollmentState advance(EnrollmentState state, EnrollmentEvent event);

bool is_terminal(EnrollmentState s) noexcept;

}  // namespace webcas::workflow
