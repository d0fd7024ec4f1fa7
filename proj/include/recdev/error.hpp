#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recdev {

enum class Errc {
    NotNormalized,
    NotCritical,
    DegenerateP0,
    ZeroQ,
    BadStableParams,
    SupportTooLarge,
    DomainError,
    SingularDerivative,
    UnknownName,
    BadLawFile,
    BadConstantTerm,
    NoClosedForm,
    FitFailed,
    HorizonTooLarge,
    BracketFailed,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception; `code()` identifies the failed contract.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

    /// True for errors caused by a malformed or invalid step law.
    [[nodiscard]] bool is_validation() const noexcept;

private:
    Errc code_;
};

}  // namespace recdev
