#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace induct {

/// Base class for every error the library raises. `code()` is a stable
/// machine-readable tag used by the CLI's structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define INDUCT_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& message) : Error(#Name, message) {}   \
    }

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t position)
        : Error("SyntaxError", message + " at position " + std::to_string(position)),
          position_(position), detail_(message) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

INDUCT_DEFINE_ERROR(DomainMismatch);
INDUCT_DEFINE_ERROR(MissingFeature);
INDUCT_DEFINE_ERROR(MissingLogQ);
INDUCT_DEFINE_ERROR(DegenerateError);
INDUCT_DEFINE_ERROR(NonFinite);
INDUCT_DEFINE_ERROR(InvalidK);
INDUCT_DEFINE_ERROR(DegenerateTargets);
INDUCT_DEFINE_ERROR(TemplateMismatch);
INDUCT_DEFINE_ERROR(BackendUnavailable);
INDUCT_DEFINE_ERROR(ReplayMiss);
INDUCT_DEFINE_ERROR(MissingLogprobSupport);
INDUCT_DEFINE_ERROR(AllSamplesDiscarded);
INDUCT_DEFINE_ERROR(EmptyPool);
INDUCT_DEFINE_ERROR(FormatError);
INDUCT_DEFINE_ERROR(ConfigError);
INDUCT_DEFINE_ERROR(IoError);

#undef INDUCT_DEFINE_ERROR

}  // namespace induct
