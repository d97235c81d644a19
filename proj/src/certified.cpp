#include <psseq/certified.hpp>

#include <array>
#include <cmath>
#include <gmp.h>

namespace psseq {

Tri tri_and(Tri a, Tri b) noexcept
{
    if (a == Tri::False || b == Tri::False) {
        return Tri::False;
    }
    if (a == Tri::True && b == Tri::True) {
        return Tri::True;
    }
    return Tri::Unknown;
}

Tri tri_not(Tri a) noexcept
{
    switch (a) {
    case Tri::False:
        return Tri::True;
    case Tri::True:
        return Tri::False;
    default:
        return Tri::Unknown;
    }
}

const char *to_string(Tri t) noexcept
{
    switch (t) {
    case Tri::False:
        return "false";
    case Tri::True:
        return "true";
    default:
        return "unknown";
    }
}

void PrecisionPolicy::validate() const
{
    if (start_bits < 64) {
        throw DomainError("precision policy: start_bits must be >= 64");
    }
    if (max_bits < start_bits) {
        throw DomainError("precision policy: max_bits must be >= start_bits");
    }
    if (growth <= Rational(1)) {
        throw DomainError("precision policy: growth factor must exceed 1");
    }
}

long PrecisionPolicy::next(long bits) const
{
    const Rational grown = Rational(bits) * growth;
    long n = static_cast<long>(grown.ceil());
    if (n <= bits) {
        n = bits + 1;
    }
    return n > max_bits ? max_bits : n;
}

namespace {

struct Mpz {
    Mpz() { mpz_init(v); }
    ~Mpz() { mpz_clear(v); }
    Mpz(const Mpz &) = delete;
    Mpz &operator=(const Mpz &) = delete;
    mpz_t v;
};

using RoundedOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

CertifiedValue apply_monotone_pair(const CertifiedValue &a, const CertifiedValue &b, RoundedOp op, bool second_reversed,
                                   mpfr_prec_t prec)
{
    BigFloat lo(prec);
    BigFloat hi(prec);
    const BigFloat &b_for_lo = second_reversed ? b.hi() : b.lo();
    const BigFloat &b_for_hi = second_reversed ? b.lo() : b.hi();
    const int t1 = op(lo.get(), a.lo().get(), b_for_lo.get(), MPFR_RNDD);
    const int t2 = op(hi.get(), a.hi().get(), b_for_hi.get(), MPFR_RNDU);
    const bool exact = a.is_exact() && b.is_exact() && t1 == 0 && t2 == 0;
    return CertifiedValue(std::move(lo), std::move(hi), exact);
}

CertifiedValue four_corner(const CertifiedValue &a, const CertifiedValue &b, RoundedOp op, mpfr_prec_t prec)
{
    const std::array<const BigFloat *, 2> xs{&a.lo(), &a.hi()};
    const std::array<const BigFloat *, 2> ys{&b.lo(), &b.hi()};
    BigFloat lo(prec);
    BigFloat hi(prec);
    BigFloat t(prec);
    bool first = true;
    bool inexact = false;
    for (const auto *x : xs) {
        for (const auto *y : ys) {
            inexact |= op(t.get(), x->get(), y->get(), MPFR_RNDD) != 0;
            if (first || t < lo) {
                mpfr_set(lo.get(), t.get(), MPFR_RNDD);
            }
            inexact |= op(t.get(), x->get(), y->get(), MPFR_RNDU) != 0;
            if (first || t > hi) {
                mpfr_set(hi.get(), t.get(), MPFR_RNDU);
            }
            first = false;
        }
    }
    const bool exact = a.is_exact() && b.is_exact() && !inexact;
    return CertifiedValue(std::move(lo), std::move(hi), exact);
}

} // namespace

CertifiedValue::CertifiedValue(BigFloat lo, BigFloat hi, bool exact)
    : lo_(std::move(lo)), hi_(std::move(hi)), exact_(exact)
{
    if (hi_ < lo_) {
        throw DomainError("certified value with lo > hi");
    }
    if (exact_ && !(lo_ == hi_)) {
        exact_ = false;
    }
}

CertifiedValue CertifiedValue::exact_int(std::int64_t v, mpfr_prec_t prec)
{
    if (prec < 64) {
        prec = 64;
    }
    return {BigFloat::from_int(v, prec), BigFloat::from_int(v, prec), true};
}

CertifiedValue CertifiedValue::from_rational(const Rational &q, mpfr_prec_t prec)
{
    BigFloat lo = BigFloat::from_rational(q, prec, MPFR_RNDD);
    BigFloat hi = BigFloat::from_rational(q, prec, MPFR_RNDU);
    const bool exact = lo == hi;
    return {std::move(lo), std::move(hi), exact};
}

double CertifiedValue::mid() const
{
    BigFloat m(precision() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m.to_double();
}

double CertifiedValue::width() const
{
    BigFloat w(64);
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return w.to_double(MPFR_RNDU);
}

bool CertifiedValue::contains(const Rational &q) const
{
    return compare(lo_, q) <= 0 && compare(hi_, q) >= 0;
}

bool CertifiedValue::contains_integer_strictly_inside() const
{
    BigFloat f(precision());
    mpfr_floor(f.get(), hi_.get());
    if (f == hi_) {
        mpfr_sub_ui(f.get(), f.get(), 1, MPFR_RNDN);
    }
    return lo_ < f;
}

std::optional<std::int64_t> CertifiedValue::certain_floor() const
{
    if (!mpfr_fits_intmax_p(lo_.get(), MPFR_RNDD) || !mpfr_fits_intmax_p(hi_.get(), MPFR_RNDD)) {
        return std::nullopt;
    }
    const auto a = mpfr_get_sj(lo_.get(), MPFR_RNDD);
    const auto b = mpfr_get_sj(hi_.get(), MPFR_RNDD);
    if (a != b) {
        return std::nullopt;
    }
    return static_cast<std::int64_t>(a);
}

std::optional<std::int64_t> CertifiedValue::certain_ceil() const
{
    if (!mpfr_fits_intmax_p(lo_.get(), MPFR_RNDU) || !mpfr_fits_intmax_p(hi_.get(), MPFR_RNDU)) {
        return std::nullopt;
    }
    const auto a = mpfr_get_sj(lo_.get(), MPFR_RNDU);
    const auto b = mpfr_get_sj(hi_.get(), MPFR_RNDU);
    if (a != b) {
        return std::nullopt;
    }
    return static_cast<std::int64_t>(a);
}

std::string CertifiedValue::str(int digits) const
{
    if (exact_) {
        return lo_.to_string(digits);
    }
    return "[" + lo_.to_string(digits) + ", " + hi_.to_string(digits) + "]";
}

CertifiedValue add(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec)
{
    return apply_monotone_pair(a, b, &mpfr_add, false, prec);
}

CertifiedValue sub(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec)
{
    return apply_monotone_pair(a, b, &mpfr_sub, true, prec);
}

CertifiedValue mul(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec)
{
    return four_corner(a, b, &mpfr_mul, prec);
}

CertifiedValue div(const CertifiedValue &a, const CertifiedValue &b, mpfr_prec_t prec)
{
    if (mpfr_sgn(b.lo().get()) <= 0 && mpfr_sgn(b.hi().get()) >= 0) {
        throw DomainError("interval division by an enclosure containing zero");
    }
    return four_corner(a, b, &mpfr_div, prec);
}

CertifiedValue neg(const CertifiedValue &a)
{
    BigFloat lo(a.precision());
    BigFloat hi(a.precision());
    mpfr_neg(lo.get(), a.hi().get(), MPFR_RNDD);
    mpfr_neg(hi.get(), a.lo().get(), MPFR_RNDU);
    return {std::move(lo), std::move(hi), a.is_exact()};
}

CertifiedValue abs(const CertifiedValue &a)
{
    if (mpfr_sgn(a.lo().get()) >= 0) {
        return a;
    }
    if (mpfr_sgn(a.hi().get()) <= 0) {
        return neg(a);
    }
    BigFloat hi(a.precision());
    mpfr_neg(hi.get(), a.lo().get(), MPFR_RNDU);
    if (hi < a.hi()) {
        mpfr_set(hi.get(), a.hi().get(), MPFR_RNDU);
    }
    return {BigFloat(a.precision()), std::move(hi), false};
}

CertifiedValue mul_int(const CertifiedValue &a, std::int64_t k, mpfr_prec_t prec)
{
    BigFloat lo(prec);
    BigFloat hi(prec);
    const bool flip = k < 0;
    const int t1 = mpfr_mul_si(lo.get(), (flip ? a.hi() : a.lo()).get(), k, MPFR_RNDD);
    const int t2 = mpfr_mul_si(hi.get(), (flip ? a.lo() : a.hi()).get(), k, MPFR_RNDU);
    return {std::move(lo), std::move(hi), a.is_exact() && t1 == 0 && t2 == 0};
}

CertifiedValue sub_int(const CertifiedValue &a, std::int64_t k, mpfr_prec_t prec)
{
    BigFloat lo(prec);
    BigFloat hi(prec);
    const int t1 = mpfr_sub_si(lo.get(), a.lo().get(), k, MPFR_RNDD);
    const int t2 = mpfr_sub_si(hi.get(), a.hi().get(), k, MPFR_RNDU);
    return {std::move(lo), std::move(hi), a.is_exact() && t1 == 0 && t2 == 0};
}

CertifiedValue log(const CertifiedValue &a, mpfr_prec_t prec)
{
    if (mpfr_sgn(a.lo().get()) <= 0) {
        throw DomainError("logarithm of an enclosure not bounded away from zero");
    }
    BigFloat lo(prec);
    BigFloat hi(prec);
    const int t1 = mpfr_log(lo.get(), a.lo().get(), MPFR_RNDD);
    const int t2 = mpfr_log(hi.get(), a.hi().get(), MPFR_RNDU);
    return {std::move(lo), std::move(hi), a.is_exact() && t1 == 0 && t2 == 0};
}

CertifiedValue exp(const CertifiedValue &a, mpfr_prec_t prec)
{
    BigFloat lo(prec);
    BigFloat hi(prec);
    const int t1 = mpfr_exp(lo.get(), a.lo().get(), MPFR_RNDD);
    const int t2 = mpfr_exp(hi.get(), a.hi().get(), MPFR_RNDU);
    return {std::move(lo), std::move(hi), a.is_exact() && t1 == 0 && t2 == 0};
}

CertifiedValue pow(const CertifiedValue &base, const CertifiedValue &e, mpfr_prec_t prec)
{
    if (mpfr_sgn(base.lo().get()) <= 0) {
        throw DomainError("pow of an enclosure not bounded away from zero");
    }
    if (base.is_exact() && e.is_exact()) {
        BigFloat lo(prec);
        BigFloat hi(prec);
        const int t1 = mpfr_pow(lo.get(), base.lo().get(), e.lo().get(), MPFR_RNDD);
        const int t2 = mpfr_pow(hi.get(), base.lo().get(), e.lo().get(), MPFR_RNDU);
        return {std::move(lo), std::move(hi), t1 == 0 && t2 == 0};
    }
    const mpfr_prec_t guard = prec + 32;
    return exp(mul(e, log(base, guard), guard), prec);
}

Tri less(const CertifiedValue &a, const CertifiedValue &b)
{
    if (a.hi() < b.lo()) {
        return Tri::True;
    }
    if (a.lo() >= b.hi()) {
        return Tri::False;
    }
    return Tri::Unknown;
}

Tri less_equal(const CertifiedValue &a, const CertifiedValue &b)
{
    if (a.hi() <= b.lo()) {
        return Tri::True;
    }
    if (a.lo() > b.hi()) {
        return Tri::False;
    }
    return Tri::Unknown;
}

Tri less(const CertifiedValue &a, const Rational &q)
{
    if (compare(a.hi(), q) < 0) {
        return Tri::True;
    }
    if (compare(a.lo(), q) >= 0) {
        return Tri::False;
    }
    return Tri::Unknown;
}

Tri less_equal(const CertifiedValue &a, const Rational &q)
{
    if (compare(a.hi(), q) <= 0) {
        return Tri::True;
    }
    if (compare(a.lo(), q) > 0) {
        return Tri::False;
    }
    return Tri::Unknown;
}

Tri greater_equal(const CertifiedValue &a, const Rational &q) { return tri_not(less(a, q)); }

// ---------------------------------------------------------------------------
// Exponent

namespace {

constexpr std::array<const char *, 7> kNamedTokens{"e", "pi", "sqrt2", "sqrt3", "sqrt5", "golden", nullptr};

void enclose_named(const std::string &id, BigFloat &lo, BigFloat &hi)
{
    if (id == "e") {
        BigFloat one = BigFloat::from_int(1, 64);
        mpfr_exp(lo.get(), one.get(), MPFR_RNDD);
        mpfr_exp(hi.get(), one.get(), MPFR_RNDU);
    } else if (id == "pi") {
        mpfr_const_pi(lo.get(), MPFR_RNDD);
        mpfr_const_pi(hi.get(), MPFR_RNDU);
    } else if (id == "sqrt2" || id == "sqrt3" || id == "sqrt5") {
        const unsigned long k = static_cast<unsigned long>(id.back() - '0');
        mpfr_sqrt_ui(lo.get(), k, MPFR_RNDD);
        mpfr_sqrt_ui(hi.get(), k, MPFR_RNDU);
    } else if (id == "golden") {
        mpfr_sqrt_ui(lo.get(), 5, MPFR_RNDD);
        mpfr_sqrt_ui(hi.get(), 5, MPFR_RNDU);
        mpfr_add_ui(lo.get(), lo.get(), 1, MPFR_RNDD);
        mpfr_add_ui(hi.get(), hi.get(), 1, MPFR_RNDU);
        mpfr_div_2ui(lo.get(), lo.get(), 1, MPFR_RNDD);
        mpfr_div_2ui(hi.get(), hi.get(), 1, MPFR_RNDU);
    } else {
        throw DomainError("unknown exponent constant '" + id + "'");
    }
}

constexpr std::int64_t kMaxExponentTerm = 1 << 12;

} // namespace

const char *const *named_exponent_tokens() noexcept { return kNamedTokens.data(); }

Exponent Exponent::rational(std::int64_t p, std::int64_t q)
{
    const Rational r(p, q);
    if (r.is_integer()) {
        throw DomainError("exponent must be non-integral, got " + r.str());
    }
    if (r <= Rational(1)) {
        throw DomainError("exponent must exceed 1, got " + r.str());
    }
    if (r.num() > kMaxExponentTerm || r.den() > kMaxExponentTerm) {
        throw DomainError("exponent numerator/denominator too large: " + r.str());
    }
    Exponent e;
    e.kind_ = Kind::Rational;
    e.ratio_ = r;
    return e;
}

Exponent Exponent::named(std::string_view id)
{
    for (const auto *tok : kNamedTokens) {
        if (tok != nullptr && id == tok) {
            Exponent e;
            e.kind_ = Kind::Named;
            e.name_ = std::string(id);
            return e;
        }
    }
    throw DomainError("unknown exponent constant '" + std::string(id) + "'");
}

Exponent Exponent::parse(std::string_view text)
{
    if (text.empty()) {
        throw DomainError("empty exponent");
    }
    if (text.find('.') != std::string_view::npos) {
        throw DomainError("decimal exponents are rejected; give p/q or a named constant");
    }
    const char c = text.front();
    if ((c >= '0' && c <= '9') || c == '-' || c == '+') {
        return rational(Rational::parse(text));
    }
    return named(text);
}

const Rational &Exponent::ratio() const
{
    if (kind_ != Kind::Rational) {
        throw DomainError("exponent '" + name_ + "' is not rational");
    }
    return ratio_;
}

CertifiedValue Exponent::enclose(mpfr_prec_t prec) const
{
    if (kind_ == Kind::Rational) {
        return CertifiedValue::from_rational(ratio_, prec);
    }
    BigFloat lo(prec);
    BigFloat hi(prec);
    enclose_named(name_, lo, hi);
    return {std::move(lo), std::move(hi), false};
}

double Exponent::approx() const
{
    if (kind_ == Kind::Rational) {
        return ratio_.to_double();
    }
    return enclose(64).mid();
}

std::string Exponent::str() const { return kind_ == Kind::Rational ? ratio_.str() : name_; }

// ---------------------------------------------------------------------------
// Powers and roots

namespace {

void require_positive(std::int64_t n, const char *what)
{
    if (n < 1) {
        throw DomainError(std::string(what) + " must be a positive integer, got " + std::to_string(n));
    }
}

// lo/hi of (base^e)^(1/k) for integers base >= 1, via exact integer power
// followed by correctly rounded k-th roots.
CertifiedValue integer_power_root(std::int64_t base, std::int64_t e, std::int64_t k, mpfr_prec_t prec)
{
    Mpz z;
    mpz_ui_pow_ui(z.v, static_cast<unsigned long>(base), static_cast<unsigned long>(e));
    BigFloat lo(prec);
    BigFloat hi(prec);
    mpfr_set_z(lo.get(), z.v, MPFR_RNDD);
    mpfr_set_z(hi.get(), z.v, MPFR_RNDU);
    mpfr_rootn_ui(lo.get(), lo.get(), static_cast<unsigned long>(k), MPFR_RNDD);
    mpfr_rootn_ui(hi.get(), hi.get(), static_cast<unsigned long>(k), MPFR_RNDU);
    const bool exact = lo == hi;
    return {std::move(lo), std::move(hi), exact};
}

// If base is a perfect k-th power r^k, returns r^e exactly (when it fits).
std::optional<std::int64_t> exact_rational_power(std::int64_t base, std::int64_t e, std::int64_t k)
{
    Mpz z;
    mpz_set_si(z.v, base);
    if (mpz_root(z.v, z.v, static_cast<unsigned long>(k)) == 0) {
        return std::nullopt;
    }
    mpz_pow_ui(z.v, z.v, static_cast<unsigned long>(e));
    if (!mpz_fits_slong_p(z.v)) {
        throw Overflow("exact power exceeds 64-bit range");
    }
    return static_cast<std::int64_t>(mpz_get_si(z.v));
}

} // namespace

CertifiedValue pow_enclose(std::int64_t n, const Exponent &alpha, mpfr_prec_t prec)
{
    require_positive(n, "n");
    if (n == 1) {
        return CertifiedValue::exact_int(1, prec);
    }
    if (alpha.is_rational()) {
        const auto &r = alpha.ratio();
        return integer_power_root(n, r.num(), r.den(), prec);
    }
    const auto a = alpha.enclose(prec + 16);
    const BigFloat base = BigFloat::from_int(n, 64);
    BigFloat lo(prec);
    BigFloat hi(prec);
    mpfr_pow(lo.get(), base.get(), a.lo().get(), MPFR_RNDD);
    mpfr_pow(hi.get(), base.get(), a.hi().get(), MPFR_RNDU);
    return {std::move(lo), std::move(hi), false};
}

CertifiedValue root_enclose(std::int64_t m, const Exponent &alpha, mpfr_prec_t prec)
{
    require_positive(m, "m");
    if (m == 1) {
        return CertifiedValue::exact_int(1, prec);
    }
    if (alpha.is_rational()) {
        const auto &r = alpha.ratio();
        return integer_power_root(m, r.den(), r.num(), prec);
    }
    const auto a = alpha.enclose(prec + 16);
    BigFloat inv_lo(prec + 16);
    BigFloat inv_hi(prec + 16);
    mpfr_ui_div(inv_lo.get(), 1, a.hi().get(), MPFR_RNDD);
    mpfr_ui_div(inv_hi.get(), 1, a.lo().get(), MPFR_RNDU);
    const BigFloat base = BigFloat::from_int(m, 64);
    BigFloat lo(prec);
    BigFloat hi(prec);
    mpfr_pow(lo.get(), base.get(), inv_lo.get(), MPFR_RNDD);
    mpfr_pow(hi.get(), base.get(), inv_hi.get(), MPFR_RNDU);
    return {std::move(lo), std::move(hi), false};
}

CertifiedValue root_enclose(const Rational &a, const Exponent &alpha, mpfr_prec_t prec)
{
    if (a.sign() <= 0) {
        throw DomainError("root of a non-positive rational: " + a.str());
    }
    if (a.is_integer()) {
        return root_enclose(a.num(), alpha, prec);
    }
    const auto num = root_enclose(a.num(), alpha, prec + 8);
    const auto den = root_enclose(a.den(), alpha, prec + 8);
    BigFloat lo(prec);
    BigFloat hi(prec);
    mpfr_div(lo.get(), num.lo().get(), den.hi().get(), MPFR_RNDD);
    mpfr_div(hi.get(), num.hi().get(), den.lo().get(), MPFR_RNDU);
    const bool exact = lo == hi;
    return {std::move(lo), std::move(hi), exact};
}

std::optional<Rational> root_exact(const Rational &a, const Exponent &alpha)
{
    if (!alpha.is_rational() || a.sign() <= 0) {
        return std::nullopt;
    }
    const auto &r = alpha.ratio();
    try {
        const auto num = exact_rational_power(a.num(), r.den(), r.num());
        const auto den = exact_rational_power(a.den(), r.den(), r.num());
        if (num && den) {
            return Rational(*num, *den);
        }
    } catch (const Overflow &) {
    }
    return std::nullopt;
}

CertifiedValue pow_certified(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy)
{
    policy.validate();
    auto v = pow_enclose(n, alpha, policy.start_bits);
    if (!v.is_exact() && alpha.is_rational()) {
        const auto &r = alpha.ratio();
        if (auto e = exact_rational_power(n, r.num(), r.den())) {
            return CertifiedValue::exact_int(*e, policy.start_bits);
        }
    }
    return v;
}

std::int64_t floor_pow(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy)
{
    require_positive(n, "n");
    bool checked_exact = false;
    return escalate(
        policy,
        [&](long bits) -> std::optional<std::int64_t> {
            const auto v = pow_enclose(n, alpha, bits);
            if (auto f = v.certain_floor()) {
                return f;
            }
            if (!mpfr_fits_intmax_p(v.lo().get(), MPFR_RNDD)) {
                throw Overflow("floor_pow: n^alpha exceeds 64-bit range for n=" + std::to_string(n));
            }
            if (alpha.is_rational() && !checked_exact) {
                checked_exact = true;
                const auto &r = alpha.ratio();
                if (auto e = exact_rational_power(n, r.num(), r.den())) {
                    return e;
                }
            }
            return std::nullopt;
        },
        "floor_pow");
}

CertifiedValue frac_pow(std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy)
{
    require_positive(n, "n");
    if (alpha.is_rational()) {
        const auto &r = alpha.ratio();
        if (exact_rational_power(n, r.num(), r.den())) {
            return CertifiedValue::exact_int(0, policy.start_bits);
        }
    }
    return escalate(
        policy,
        [&](long bits) -> std::optional<CertifiedValue> {
            const auto v = pow_enclose(n, alpha, bits);
            if (auto f = v.certain_floor()) {
                return sub_int(v, *f, bits);
            }
            return std::nullopt;
        },
        "frac_pow");
}

std::int64_t root_ceil(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy)
{
    require_positive(m, "m");
    bool checked_exact = false;
    return escalate(
        policy,
        [&](long bits) -> std::optional<std::int64_t> {
            const auto v = root_enclose(m, alpha, bits);
            if (auto c = v.certain_ceil()) {
                return c;
            }
            if (alpha.is_rational() && !checked_exact) {
                checked_exact = true;
                const auto &r = alpha.ratio();
                // m^(q/p) is an integer iff m is a perfect p-th power.
                if (auto e = exact_rational_power(m, r.den(), r.num())) {
                    return e;
                }
            }
            return std::nullopt;
        },
        "root_ceil");
}

CertifiedValue dist_nearest_int(const CertifiedValue &x)
{
    const mpfr_prec_t prec = x.precision();
    {
        BigFloat w(prec);
        mpfr_sub(w.get(), x.hi().get(), x.lo().get(), MPFR_RNDU);
        if (mpfr_cmp_d(w.get(), 0.5) >= 0) {
            throw AmbiguousRounding("enclosure too wide to bound the distance to the nearest integer");
        }
    }
    BigFloat k(prec);
    mpfr_floor(k.get(), x.lo().get());
    BigFloat f_lo(prec);
    BigFloat f_hi(prec);
    bool exact = x.is_exact();
    exact &= mpfr_sub(f_lo.get(), x.lo().get(), k.get(), MPFR_RNDD) == 0;
    exact &= mpfr_sub(f_hi.get(), x.hi().get(), k.get(), MPFR_RNDU) == 0;

    // f in [f_lo, f_hi] with 0 <= f_lo < 1 and f_hi < 3/2.
    const bool has_integer = mpfr_zero_p(f_lo.get()) || mpfr_cmp_ui(f_hi.get(), 1) >= 0;
    const bool has_half = mpfr_cmp_d(f_lo.get(), 0.5) <= 0 && mpfr_cmp_d(f_hi.get(), 0.5) >= 0;

    auto dist = [&](const BigFloat &t, mpfr_rnd_t rnd) {
        BigFloat d(prec);
        if (mpfr_cmp_d(t.get(), 0.5) <= 0) {
            mpfr_set(d.get(), t.get(), rnd);
        } else if (mpfr_cmp_ui(t.get(), 1) <= 0) {
            exact &= mpfr_ui_sub(d.get(), 1, t.get(), rnd) == 0;
        } else {
            exact &= mpfr_sub_ui(d.get(), t.get(), 1, rnd) == 0;
        }
        return d;
    };

    BigFloat lo(prec);
    BigFloat hi(prec);
    if (has_integer) {
        mpfr_set_zero(lo.get(), 1);
    } else {
        const BigFloat a = dist(f_lo, MPFR_RNDD);
        const BigFloat b = dist(f_hi, MPFR_RNDD);
        mpfr_min(lo.get(), a.get(), b.get(), MPFR_RNDD);
    }
    if (has_half) {
        mpfr_set_d(hi.get(), 0.5, MPFR_RNDU);
    } else {
        const BigFloat a = dist(f_lo, MPFR_RNDU);
        const BigFloat b = dist(f_hi, MPFR_RNDU);
        mpfr_max(hi.get(), a.get(), b.get(), MPFR_RNDU);
    }
    const bool is_exact = exact && lo == hi;
    return {std::move(lo), std::move(hi), is_exact};
}

CertifiedValue phi(const CertifiedValue &log_a, const CertifiedValue &theta, mpfr_prec_t prec)
{
    const mpfr_prec_t guard = prec + 16;
    return div(log_a, log(theta, guard), prec);
}

CertifiedValue phi(const Rational &a, const Rational &theta, mpfr_prec_t prec)
{
    const Rational one(1);
    if (a.sign() <= 0 || a == one) {
        throw DomainError("phi: base a must be positive and different from 1");
    }
    const bool below = a < one;
    const bool in_domain = below ? (theta >= a && theta < one) : (theta > one && theta <= a);
    if (!in_domain) {
        throw DomainError("phi: theta=" + theta.str() + " outside the domain between a=" + a.str() + " and 1");
    }
    if (theta == a) {
        return CertifiedValue::exact_int(1, prec);
    }
    try {
        if (theta * theta == a) {
            return CertifiedValue::exact_int(2, prec);
        }
    } catch (const Overflow &) {
        // theta^2 not representable; cannot equal a.
    }
    const mpfr_prec_t guard = prec + 16;
    const auto la = log(CertifiedValue::from_rational(a, guard), guard);
    return phi(la, CertifiedValue::from_rational(theta, guard), prec);
}

} // namespace psseq
