#ifndef PSSEQ_CONTINUED_FRACTION_HPP
#define PSSEQ_CONTINUED_FRACTION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <psseq/certified.hpp>

namespace psseq {

enum class CFStop {
    Complete, // all requested quotients produced
    ExactRational, // the target is rational and its expansion ended
    Overflow, // the next convergent does not fit in 64 bits
};

const char *to_string(CFStop s) noexcept;

struct Convergent {
    std::int64_t p;
    std::int64_t q;
};

struct ContinuedFraction {
    std::vector<std::int64_t> quotients;
    std::vector<Convergent> convergents;
    CFStop stop = CFStop::Complete;
    long bits = 0; // precision at which the quotients were certified
};

// Produces an enclosure of the target at the requested precision.
using Enclosure = std::function<CertifiedValue(mpfr_prec_t)>;

// First k partial quotients of a positive real given by enclosures. A quotient
// is emitted only when every point of the enclosure shares it; otherwise the
// precision escalates.
ContinuedFraction cf_expand(const Enclosure &x, int k, const PrecisionPolicy &policy = {});

// Exact expansion of a positive rational (Euclid).
ContinuedFraction cf_expand(const Rational &x, int k);

} // namespace psseq

#endif
