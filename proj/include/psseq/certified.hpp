#ifndef PSSEQ_CERTIFIED_HPP
#define PSSEQ_CERTIFIED_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include <psseq/bigfloat.hpp>
#include <psseq/errors.hpp>
#include <psseq/rational.hpp>

namespace psseq {

// Three-valued truth used by every certified comparison. `Unknown` means the
// enclosures overlap at the current precision and the caller should retry
// with more bits.
enum class Tri { False, True, Unknown };

inline Tri tri_from(bool b) noexcept { return b ? Tri::True : Tri::False; }
Tri tri_and(Tri a, Tri b) noexcept;
Tri tri_not(Tri a) noexcept;
const char *to_string(Tri t) noexcept;

struct PrecisionPolicy {
    long start_bits = 128;
    long max_bits = 4096;
    Rational growth{2};

    void validate() const;
    // Next precision in the escalation ladder, capped at max_bits.
    long next(long bits) const;
};

// Runs `attempt(bits)` along the policy's precision ladder until it returns
// a value. Throws PrecisionExhausted once max_bits has been tried.
template <class F>
auto escalate(const PrecisionPolicy &policy, F &&attempt, std::string_view what = "certified evaluation")
    -> typename std::invoke_result_t<F &, long>::value_type
{
    for (long bits = policy.start_bits;; bits = policy.next(bits)) {
        if (auto r = attempt(bits)) {
            return *std::move(r);
        }
        if (bits >= policy.max_bits) {
            throw PrecisionExhausted(std::string(what) + ": unresolved at " + std::to_string(bits) + " bits");
        }
    }
}

// A real number known to lie in [lo, hi]. `exact` means lo == hi is the value
// itself rather than an enclosure.
class CertifiedValue {
public:
    CertifiedValue(BigFloat lo, BigFloat hi, bool exact = false);

    static CertifiedValue exact_int(std::int64_t v, mpfr_prec_t prec);
    // Tight enclosure of q; exact when q is representable at prec.
    static CertifiedValue from_rational(const Rational &q, mpfr_prec_t prec);

    const BigFloat &lo() const noexcept { return lo_; }
    const BigFloat &hi() const noexcept { return hi_; }
    bool is_exact() const noexcept { return exact_; }
    mpfr_prec_t precision() const noexcept { return lo_.precision(); }

    double mid() const;
    // Upper bound on hi - lo, as a double rounded up.
    double width() const;

    bool contains(const Rational &q) const;
    bool contains_integer_strictly_inside() const;

    // floor/ceil when they are the same at both ends of the enclosure.
    std::optional<std::int64_t> certain_floor() const;
    std::optional<std::int64_t> certain_ceil() const;

    std::string str(int digits = 20) const;

private:
    BigFloat lo_;
    BigFloat hi_;
    bool exact_;
};

// Interval arithmetic with outward rounding. Results carry `exact` only when
// both operands are exact and the operation was exact at the given precision.
CertifiedValue add(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec);
CertifiedValue sub(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec);
CertifiedValue mul(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec);
CertifiedValue div(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec);
CertifiedValue neg(const CertifiedValue &a);
CertifiedValue mul_int(const CertifiedValue &a, std::int64_t k, mpfr_prec_t prec);
CertifiedValue sub_int(const CertifiedValue &a, std::int64_t k, mpfr_prec_t prec);
CertifiedValue log(const CertifiedValue &a, mpfr_prec_t prec);
CertifiedValue exp(const CertifiedValue &a, mpfr_prec_t prec);
// base^e for base > 0.
CertifiedValue pow(const CertifiedValue &base, const CertifiedValue &e, mpfr_prec_t prec);
CertifiedValue abs(const CertifiedValue &a);

Tri less(const CertifiedValue &a, const CertifiedValue &b);
Tri less_equal(const CertifiedValue &a, const CertifiedValue &b);
Tri less(const CertifiedValue &a, const Rational &q);
Tri less_equal(const CertifiedValue &a, const Rational &q);
Tri greater_equal(const CertifiedValue &a, const Rational &q);

// The exponent alpha > 1, non-integral. Rational exponents are kept exactly;
// named constants are enclosed on demand at any precision.
class Exponent {
public:
    enum class Kind { Rational, Named };

    static Exponent rational(std::int64_t p, std::int64_t q);
    static Exponent rational(const Rational &r) { return rational(r.num(), r.den()); }
    static Exponent named(std::string_view id);
    // "p/q" or a constant token; decimals and integers are rejected.
    static Exponent parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    bool is_rational() const noexcept { return kind_ == Kind::Rational; }
    const Rational &ratio() const;
    const std::string &name() const noexcept { return name_; }

    CertifiedValue enclose(mpfr_prec_t prec) const;
    double approx() const;
    std::string str() const;

    friend bool operator==(const Exponent &a, const Exponent &b)
    {
        return a.kind_ == b.kind_ && a.ratio_ == b.ratio_ && a.name_ == b.name_;
    }

private:
    Exponent() = default;

    Kind kind_ = Kind::Rational;
    Rational ratio_;
    std::string name_;
};

// Constant tokens accepted by Exponent::named.
const char *const *named_exponent_tokens() noexcept;

// Enclosure of n^alpha at the given precision (n >= 1). Exact when n^alpha is
// an integer representable at prec.
CertifiedValue pow_enclose(std::int64_t n, const Exponent &alpha, mpfr_prec_t prec);
// Enclosure of m^(1/alpha) (m >= 1).
CertifiedValue root_enclose(std::int64_t m, const Exponent &alpha, mpfr_prec_t prec);
// Enclosure of a^(1/alpha) for a positive rational a.
CertifiedValue root_enclose(const Rational &a, const Exponent &alpha, mpfr_prec_t prec);
// a^(1/alpha) when it is rational (rational alpha only).
std::optional<Rational> root_exact(const Rational &a, const Exponent &alpha);

// n^alpha at the policy's starting precision. Callers needing a particular
// resolution re-invoke with a larger start.
CertifiedValue pow_certified(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy = {});
std::int64_t floor_pow(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy = {});
// Certified fractional part {n^alpha}.
CertifiedValue frac_pow(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy = {});
// ceil(m^(1/alpha)).
std::int64_t root_ceil(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy = {});

// ||x||, the distance to the nearest integer. Throws AmbiguousRounding when
// the enclosure is at least 1/2 wide.
CertifiedValue dist_nearest_int(const CertifiedValue &x);

// phi_a(theta) = 1 / log_a(theta) for theta between a and 1 (theta = a allowed).
CertifiedValue phi(const Rational &a, const Rational &theta, mpfr_prec_t prec = 128);
// Same map on an enclosure, without the rational domain check.
CertifiedValue phi(const CertifiedValue &log_a, const CertifiedValue &theta, mpfr_prec_t prec);

} // namespace psseq

#endif
