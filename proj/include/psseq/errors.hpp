#ifndef PSSEQ_ERRORS_HPP
#define PSSEQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace psseq {

// Base of every error raised by the library. `kind()` is a stable token used
// by the CLI when reporting structured errors.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string &what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string &kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PSSEQ_DEFINE_ERROR(Name)                                               \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string &what) : Error(#Name, what) {}         \
    }

// Working precision hit PrecisionPolicy::max_bits before the requested
// resolution was reached.
PSSEQ_DEFINE_ERROR(PrecisionExhausted);
PSSEQ_DEFINE_ERROR(DomainError);
PSSEQ_DEFINE_ERROR(AmbiguousRounding);
PSSEQ_DEFINE_ERROR(NotSolvableInN);
PSSEQ_DEFINE_ERROR(InsufficientData);
PSSEQ_DEFINE_ERROR(TooFewMembers);
PSSEQ_DEFINE_ERROR(EmptyInput);
PSSEQ_DEFINE_ERROR(ParseError);
PSSEQ_DEFINE_ERROR(Overflow);

#undef PSSEQ_DEFINE_ERROR

} // namespace psseq

#endif
