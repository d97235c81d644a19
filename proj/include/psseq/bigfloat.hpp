#ifndef PSSEQ_BIGFLOAT_HPP
#define PSSEQ_BIGFLOAT_HPP

#include <cstdint>
#include <string>
#include <utility>

#include <mpfr.h>

namespace psseq {

class Rational;

// Owning handle for an mpfr_t. Every arithmetic call on it goes through the
// raw MPFR API with an explicit rounding direction; this class only manages
// lifetime and a few conversions.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec = 128) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat &o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat &&o) noexcept
    {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    BigFloat &operator=(const BigFloat &o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat &operator=(BigFloat &&o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat from_int(std::int64_t v, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN)
    {
        BigFloat r(prec);
        mpfr_set_sj(r.v_, v, rnd);
        return r;
    }
    static BigFloat from_double(double v, mpfr_prec_t prec)
    {
        BigFloat r(prec);
        mpfr_set_d(r.v_, v, MPFR_RNDN);
        return r;
    }
    static BigFloat from_rational(const Rational &q, mpfr_prec_t prec, mpfr_rnd_t rnd);

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
    bool is_integer() const { return mpfr_integer_p(v_) != 0; }

    // Decimal rendering with `digits` significant digits (round-to-nearest).
    std::string to_string(int digits = 20) const;

    friend bool operator==(const BigFloat &a, const BigFloat &b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator<(const BigFloat &a, const BigFloat &b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const BigFloat &a, const BigFloat &b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigFloat &a, const BigFloat &b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const BigFloat &a, const BigFloat &b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

private:
    mpfr_t v_;
};

// Signed comparison of an MPFR value against an exact rational.
int compare(const BigFloat &x, const Rational &q);

} // namespace psseq

#endif
