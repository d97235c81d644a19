#include <psseq/bigfloat.hpp>

#include <gmp.h>

#include <psseq/rational.hpp>

namespace psseq {

namespace {

struct MpqHolder {
    explicit MpqHolder(const Rational &q)
    {
        mpq_init(v);
        mpz_set_si(mpq_numref(v), q.num());
        mpz_set_si(mpq_denref(v), q.den());
    }
    ~MpqHolder() { mpq_clear(v); }
    MpqHolder(const MpqHolder &) = delete;
    MpqHolder &operator=(const MpqHolder &) = delete;

    mpq_t v;
};

} // namespace

BigFloat BigFloat::from_rational(const Rational &q, mpfr_prec_t prec, mpfr_rnd_t rnd)
{
    BigFloat r(prec);
    MpqHolder h(q);
    mpfr_set_q(r.v_, h.v, rnd);
    return r;
}

std::string BigFloat::to_string(int digits) const
{
    if (mpfr_zero_p(v_)) {
        return "0";
    }
    char *buf = nullptr;
    const int len = mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string out = len >= 0 ? std::string(buf, static_cast<std::size_t>(len)) : std::string("nan");
    if (buf != nullptr) {
        mpfr_free_str(buf);
    }
    return out;
}

int compare(const BigFloat &x, const Rational &q)
{
    MpqHolder h(q);
    return mpfr_cmp_q(x.get(), h.v);
}

} // namespace psseq
