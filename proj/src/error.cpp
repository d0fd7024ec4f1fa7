#include "recdev/error.hpp"

namespace recdev {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NotNormalized: return "NotNormalized";
        case Errc::NotCritical: return "NotCritical";
        case Errc::DegenerateP0: return "DegenerateP0";
        case Errc::ZeroQ: return "ZeroQ";
        case Errc::BadStableParams: return "BadStableParams";
        case Errc::SupportTooLarge: return "SupportTooLarge";
        case Errc::DomainError: return "DomainError";
        case Errc::SingularDerivative: return "SingularDerivative";
        case Errc::UnknownName: return "UnknownName";
        case Errc::BadLawFile: return "BadLawFile";
        case Errc::BadConstantTerm: return "BadConstantTerm";
        case Errc::NoClosedForm: return "NoClosedForm";
        case Errc::FitFailed: return "FitFailed";
        case Errc::HorizonTooLarge: return "HorizonTooLarge";
        case Errc::BracketFailed: return "BracketFailed";
    }
    return "Unknown";
}

bool Error::is_validation() const noexcept {
    switch (code_) {
        case Errc::NotNormalized:
        case Errc::NotCritical:
        case Errc::DegenerateP0:
        case Errc::ZeroQ:
        case Errc::BadStableParams:
        case Errc::SupportTooLarge:
        case Errc::UnknownName:
        case Errc::BadLawFile:
            return true;
        default:
            return false;
    }
}

}  // namespace recdev
