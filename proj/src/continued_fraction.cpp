#include <psseq/continued_fraction.hpp>

#include <gmp.h>
#include <mpfr.h>

namespace psseq {

namespace {

struct Mpq {
    mpq_t v;
    Mpq() { mpq_init(v); }
    ~Mpq() { mpq_clear(v); }
    Mpq(const Mpq &) = delete;
    Mpq &operator=(const Mpq &) = delete;
};

struct Mpz {
    mpz_t v;
    Mpz() { mpz_init(v); }
    ~Mpz() { mpz_clear(v); }
    Mpz(const Mpz &) = delete;
    Mpz &operator=(const Mpz &) = delete;
};

// Exact rational value of a binary float.
void to_mpq(mpq_t out, const BigFloat &f)
{
    Mpz m;
    const mpfr_exp_t e = mpfr_get_z_2exp(m.v, f.get());
    mpq_set_z(out, m.v);
    if (e > 0) {
        mpq_mul_2exp(out, out, static_cast<mp_bitcnt_t>(e));
    } else if (e < 0) {
        mpq_div_2exp(out, out, static_cast<mp_bitcnt_t>(-e));
    }
}

struct Expansion {
    std::vector<std::int64_t> q;
    bool terminated = false; // the list is the whole expansion
    bool too_big = false; // a quotient did not fit in 64 bits
};

// Up to `limit` quotients of a non-negative rational.
Expansion expand(const mpq_t x, std::size_t limit)
{
    Expansion out;
    Mpz num;
    Mpz den;
    Mpz a;
    Mpz r;
    mpz_set(num.v, mpq_numref(x));
    mpz_set(den.v, mpq_denref(x));
    while (out.q.size() < limit) {
        mpz_fdiv_qr(a.v, r.v, num.v, den.v);
        if (!mpz_fits_slong_p(a.v)) {
            out.too_big = true;
            return out;
        }
        out.q.push_back(mpz_get_si(a.v));
        if (mpz_sgn(r.v) == 0) {
            out.terminated = true;
            return out;
        }
        mpz_swap(num.v, den.v);
        mpz_swap(den.v, r.v);
    }
    return out;
}

// Appends convergents for `quotients`, stopping at the first one that
// overflows. Returns false on overflow.
bool build_convergents(ContinuedFraction &cf)
{
    __int128 p_prev = 0;
    __int128 q_prev = 1;
    __int128 p = 1;
    __int128 q = 0;
    std::size_t i = 0;
    for (; i < cf.quotients.size(); ++i) {
        const __int128 a = cf.quotients[i];
        const __int128 pn = a * p + p_prev;
        const __int128 qn = a * q + q_prev;
        constexpr __int128 max = INT64_MAX;
        if (pn > max || qn > max) {
            cf.quotients.resize(i);
            return false;
        }
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
    }
    return true;
}

// Whether some next convergent (quotient >= 1) can still fit in 64 bits.
bool next_fits(const ContinuedFraction &cf)
{
    const auto &c = cf.convergents;
    const __int128 p = c.empty() ? 1 : c.back().p;
    const __int128 q = c.empty() ? 0 : c.back().q;
    const __int128 p_prev = c.size() < 2 ? (c.empty() ? 0 : 1) : c[c.size() - 2].p;
    const __int128 q_prev = c.size() < 2 ? (c.empty() ? 1 : 0) : c[c.size() - 2].q;
    constexpr __int128 max = INT64_MAX;
    return p + p_prev <= max && q + q_prev <= max;
}

} // namespace

const char *to_string(CFStop s) noexcept
{
    switch (s) {
    case CFStop::Complete:
        return "complete";
    case CFStop::ExactRational:
        return "exact-rational";
    case CFStop::Overflow:
        return "overflow";
    }
    return "?";
}

ContinuedFraction cf_expand(const Enclosure &x, int k, const PrecisionPolicy &policy)
{
    if (k < 1) {
        throw DomainError("cf_expand needs k >= 1");
    }
    policy.validate();
    const auto limit = static_cast<std::size_t>(k);
    return escalate(
        policy,
        [&](long bits) -> std::optional<ContinuedFraction> {
            const auto v = x(bits);
            if (mpfr_sgn(v.lo().get()) <= 0) {
                if (mpfr_sgn(v.hi().get()) <= 0) {
                    throw DomainError("cf_expand needs x > 0");
                }
                return std::nullopt;
            }
            Mpq lo;
            Mpq hi;
            to_mpq(lo.v, v.lo());
            to_mpq(hi.v, v.hi());
            const auto el = expand(lo.v, limit + 1);
            const auto eh = expand(hi.v, limit + 1);

            ContinuedFraction cf;
            cf.bits = bits;
            if (v.is_exact()) {
                cf.quotients = el.q;
                if (cf.quotients.size() > limit) {
                    cf.quotients.resize(limit);
                }
                if (el.terminated && el.q.size() <= limit) {
                    cf.stop = CFStop::ExactRational;
                }
                if (el.too_big && el.q.size() < limit) {
                    cf.stop = CFStop::Overflow;
                }
            } else {
                // Quotient i is shared by the whole interval when both ends
                // agree on it and neither expansion ends there.
                std::size_t i = 0;
                while (i < limit && i + 1 < el.q.size() && i + 1 < eh.q.size() && el.q[i] == eh.q[i]) {
                    ++i;
                }
                if (i < limit) {
                    ContinuedFraction probe;
                    probe.quotients.assign(el.q.begin(), el.q.begin() + static_cast<std::ptrdiff_t>(i));
                    const bool both_huge = el.too_big && eh.too_big && el.q.size() == i && eh.q.size() == i;
                    if (!build_convergents(probe) || !next_fits(probe) || both_huge) {
                        cf.stop = CFStop::Overflow;
                    } else {
                        return std::nullopt;
                    }
                }
                cf.quotients.assign(el.q.begin(), el.q.begin() + static_cast<std::ptrdiff_t>(i));
            }
            if (!build_convergents(cf)) {
                cf.stop = CFStop::Overflow;
            }
            return cf;
        },
        "continued fraction");
}

ContinuedFraction cf_expand(const Rational &x, int k)
{
    if (k < 1) {
        throw DomainError("cf_expand needs k >= 1");
    }
    if (x.sign() <= 0) {
        throw DomainError("cf_expand needs x > 0");
    }
    ContinuedFraction cf;
    std::int64_t num = x.num();
    std::int64_t den = x.den();
    while (cf.quotients.size() < static_cast<std::size_t>(k)) {
        const std::int64_t a = floor_div(num, den);
        cf.quotients.push_back(a);
        const std::int64_t r = num - a * den;
        if (r == 0) {
            cf.stop = CFStop::ExactRational;
            break;
        }
        num = den;
        den = r;
    }
    if (!build_convergents(cf)) {
        cf.stop = CFStop::Overflow;
    }
    return cf;
}

} // namespace psseq
