#include <doctest.h>

#include <cmath>

#include <psseq/certified.hpp>

#include "oracles.hpp"

using namespace psseq;

namespace {

const Exponent k32 = Exponent::rational(3, 2);

const std::vector<Exponent> &rational_grid()
{
    static const std::vector<Exponent> grid{Exponent::rational(6, 5), Exponent::rational(3, 2),
                                            Exponent::rational(5, 3), Exponent::rational(5, 2),
                                            Exponent::rational(14, 5)};
    return grid;
}

} // namespace

TEST_CASE("rational parsing and arithmetic")
{
    CHECK(Rational::parse("3/2") == Rational(3, 2));
    CHECK(Rational::parse("-0.35") == Rational(-7, 20));
    CHECK(Rational::parse("0.3") == Rational(3, 10));
    CHECK(Rational::parse("6/4") == Rational(3, 2));
    CHECK(Rational::parse("12") == Rational(12));
    CHECK_THROWS_AS(Rational::parse("1/0"), DomainError);
    CHECK_THROWS_AS(Rational::parse("abc"), ParseError);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(mod_floor(-3, 5) == 2);
    CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(2), Overflow);
}

TEST_CASE("exponent validation")
{
    CHECK_THROWS_AS(Exponent::rational(2, 1), DomainError);
    CHECK_THROWS_AS(Exponent::rational(4, 2), DomainError);
    CHECK_THROWS_AS(Exponent::rational(1, 2), DomainError);
    CHECK(Exponent::rational(6, 4).ratio() == Rational(3, 2));
    CHECK(Exponent::parse("3/2") == k32);
    CHECK_THROWS_AS(Exponent::parse("1.5"), DomainError);
    CHECK_THROWS_AS(Exponent::parse("2"), DomainError);
    CHECK(Exponent::parse("e").kind() == Exponent::Kind::Named);
    CHECK_THROWS_AS(Exponent::parse("tau"), DomainError);
    const auto pi = Exponent::named("pi").enclose(200);
    CHECK(pi.lo() < pi.hi());
    CHECK(std::abs(pi.mid() - M_PI) < 1e-15);
}

TEST_CASE("pow_certified examples")
{
    for (const auto &a : rational_grid()) {
        const auto one = pow_certified(1, a);
        CHECK(one.is_exact());
        CHECK(one.certain_floor() == 1);
    }
    const auto eight = pow_certified(4, k32);
    CHECK(eight.is_exact());
    CHECK(eight.contains(Rational(8)));

    const auto v = pow_certified(10, k32);
    CHECK_FALSE(v.is_exact());
    // 10*sqrt(10) = 31.62277660168379331998...
    CHECK(less(v, Rational(3162277660168380, 100000000000000)) == Tri::True);
    CHECK(greater_equal(v, Rational(3162277660168379, 100000000000000)) == Tri::True);
    CHECK(std::abs(v.mid() - 31.622776601683793) < 1e-14);
    CHECK(v.width() < 1e-30);

    // Width shrinks as the starting precision grows.
    PrecisionPolicy wide{64, 4096, Rational(2)};
    PrecisionPolicy tight{256, 4096, Rational(2)};
    CHECK(pow_certified(10, k32, tight).width() < pow_certified(10, k32, wide).width());
}

TEST_CASE("floor_pow examples")
{
    CHECK(floor_pow(5, k32) == 11);
    CHECK(floor_pow(4, k32) == 8);
    CHECK(floor_pow(1, Exponent::rational(5, 2)) == 1);
    CHECK_THROWS_AS(floor_pow(0, k32), DomainError);
    CHECK(floor_pow(2, Exponent::named("e")) == 6);
    CHECK(floor_pow(1000, Exponent::named("e")) == 142838567);
    CHECK(floor_pow(1000, Exponent::named("pi")) == 2659365073);
    CHECK(floor_pow(1000, Exponent::named("sqrt2")) == 17483);
}

TEST_CASE("floor_pow matches the exact integer-root oracle for n <= 1e5")
{
    for (const auto &a : rational_grid()) {
        const auto p = a.ratio().num();
        const auto q = a.ratio().den();
        std::int64_t mismatches = 0;
        for (std::int64_t n = 1; n <= 100000; ++n) {
            mismatches += floor_pow(n, a) != oracle::floor_pow_exact(n, p, q);
        }
        CHECK_MESSAGE(mismatches == 0, "alpha=" << a.str());
    }
}

TEST_CASE("floor_pow for named constants matches a 16384-bit oracle")
{
    struct Case {
        const char *id;
        void (*set)(mpfr_t);
    };
    const Case cases[] = {
        {"e", [](mpfr_t a) { mpfr_set_ui(a, 1, MPFR_RNDN); mpfr_exp(a, a, MPFR_RNDN); }},
        {"pi", [](mpfr_t a) { mpfr_const_pi(a, MPFR_RNDN); }},
        {"sqrt2", [](mpfr_t a) { mpfr_sqrt_ui(a, 2, MPFR_RNDN); }},
        {"golden", [](mpfr_t a) { mpfr_sqrt_ui(a, 5, MPFR_RNDN); mpfr_add_ui(a, a, 1, MPFR_RNDN); mpfr_div_2ui(a, a, 1, MPFR_RNDN); }},
    };
    for (const auto &c : cases) {
        const auto alpha = Exponent::named(c.id);
        for (std::int64_t n = 1; n <= 600; n += 7) {
            CHECK_MESSAGE(floor_pow(n, alpha) == oracle::floor_pow_mpfr(n, c.set, 16384), c.id << " n=" << n);
        }
    }
}

TEST_CASE("floor_pow brackets n^alpha and is strictly increasing")
{
    for (const auto &a : rational_grid()) {
        std::int64_t prev = floor_pow(1, a);
        for (std::int64_t n = 2; n <= 3000; ++n) {
            const auto f = floor_pow(n, a);
            CHECK(f > prev);
            prev = f;
            const auto v = pow_certified(n, a);
            CHECK(less(v, Rational(f)) == Tri::False);
            CHECK(less(v, Rational(f + 1)) == Tri::True);
        }
    }
}

TEST_CASE("frac_pow examples")
{
    const auto z = frac_pow(4, k32);
    CHECK(z.is_exact());
    CHECK(z.contains(Rational(0)));
    CHECK(std::abs(frac_pow(2, k32).mid() - 0.82842712474619009760) < 1e-15);
    CHECK(std::abs(frac_pow(10, k32).mid() - 0.62277660168379331999) < 1e-15);
    const auto f = frac_pow(123, Exponent::named("e"));
    CHECK(greater_equal(f, Rational(0)) == Tri::True);
    CHECK(less(f, Rational(1)) == Tri::True);
}

TEST_CASE("dist_nearest_int")
{
    const auto seven = dist_nearest_int(CertifiedValue::exact_int(7, 128));
    CHECK(seven.is_exact());
    CHECK(seven.contains(Rational(0)));

    const auto d = dist_nearest_int(CertifiedValue::from_rational(Rational(16, 5), 128));
    CHECK(d.contains(Rational(1, 5)));
    CHECK(d.width() < 1e-35);

    const auto h = dist_nearest_int(CertifiedValue::from_rational(Rational(1, 2), 128));
    CHECK(h.is_exact());
    CHECK(h.contains(Rational(1, 2)));

    const auto neg = dist_nearest_int(CertifiedValue::from_rational(Rational(-13, 4), 128));
    CHECK(neg.contains(Rational(1, 4)));

    // Enclosure straddling 1/2 still yields a bound: [0.4, 0.55] -> [0.4, 0.5].
    const CertifiedValue straddle(BigFloat::from_rational(Rational(2, 5), 128, MPFR_RNDD),
                                  BigFloat::from_rational(Rational(11, 20), 128, MPFR_RNDU));
    const auto s = dist_nearest_int(straddle);
    CHECK(s.contains(Rational(2, 5)));
    CHECK(s.contains(Rational(1, 2)));
    CHECK(compare(s.hi(), Rational(1, 2)) == 0);

    const CertifiedValue wide(BigFloat::from_int(1, 128), BigFloat::from_int(2, 128));
    CHECK_THROWS_AS(dist_nearest_int(wide), AmbiguousRounding);
}

TEST_CASE("phi examples and monotonicity")
{
    CHECK(phi(Rational(1, 4), Rational(1, 4)).contains(Rational(1)));
    const auto two = phi(Rational(1, 4), Rational(1, 2));
    CHECK(two.is_exact());
    CHECK(two.contains(Rational(2)));
    CHECK(std::abs(phi(Rational(1, 2), Rational(3, 4)).mid() - 2.4094208396532090046) < 1e-15);
    CHECK(std::abs(phi(Rational(1, 4), Rational(3, 10)).mid() - 1.1514332849868900096) < 1e-15);
    CHECK_THROWS_AS(phi(Rational(1, 4), Rational(1)), DomainError);
    CHECK_THROWS_AS(phi(Rational(1, 4), Rational(1, 5)), DomainError);
    CHECK_THROWS_AS(phi(Rational(1), Rational(1, 2)), DomainError);
    CHECK_THROWS_AS(phi(Rational(4), Rational(1, 2)), DomainError);

    // Increasing on (a, 1) for a < 1, decreasing on (1, a) for a > 1.
    for (int k = 26; k < 99; k += 3) {
        const auto lo = phi(Rational(1, 4), Rational(k, 100));
        const auto hi = phi(Rational(1, 4), Rational(k + 1, 100));
        CHECK(less(lo, hi) == Tri::True);
        CHECK(greater_equal(lo, Rational(1)) == Tri::True);
    }
    for (int k = 101; k < 399; k += 7) {
        const auto lo = phi(Rational(4), Rational(k, 100));
        const auto hi = phi(Rational(4), Rational(k + 1, 100));
        CHECK(less(hi, lo) == Tri::True);
    }
}

TEST_CASE("root_ceil")
{
    CHECK(root_ceil(8, k32) == 4);
    CHECK(root_ceil(2, k32) == 2);
    CHECK(root_ceil(1, Exponent::named("pi")) == 1);
    CHECK(root_ceil(9, Exponent::rational(5, 2)) == 3); // 9^(0.4) = 2.408
    for (const auto &a : rational_grid()) {
        for (std::int64_t n = 1; n <= 2000; ++n) {
            const auto m = floor_pow(n, a);
            const auto r = root_ceil(m, a);
            CHECK(r <= n);
            CHECK(floor_pow(r, a) == m); // the smallest witness is n itself
            CHECK(r == n);
        }
    }
}

TEST_CASE("interval arithmetic and three-valued comparisons")
{
    const auto a = CertifiedValue::from_rational(Rational(1, 3), 128);
    const auto b = CertifiedValue::from_rational(Rational(2, 3), 128);
    CHECK(add(a, b, 128).contains(Rational(1)));
    CHECK(sub(b, a, 128).contains(Rational(1, 3)));
    CHECK(mul(a, neg(b), 128).contains(Rational(-2, 9)));
    CHECK(div(a, b, 128).contains(Rational(1, 2)));
    CHECK(less(a, b) == Tri::True);
    CHECK(less(b, a) == Tri::False);
    CHECK(less(a, a) == Tri::Unknown);
    const auto x = CertifiedValue::exact_int(3, 128);
    CHECK(less(x, x) == Tri::False);
    CHECK(less_equal(x, x) == Tri::True);
    CHECK(less(x, Rational(3)) == Tri::False);
    CHECK(less_equal(x, Rational(3)) == Tri::True);
    CHECK_THROWS_AS(div(a, sub(a, a, 128), 128), DomainError);
    const auto e = exp(log(b, 200), 200);
    CHECK(e.contains(Rational(2, 3)));
}

TEST_CASE("escalation ladder")
{
    PrecisionPolicy p{64, 300, Rational(2)};
    std::vector<long> seen;
    const long got = escalate(p, [&](long bits) -> std::optional<long> {
        seen.push_back(bits);
        return bits >= 256 ? std::optional<long>(bits) : std::nullopt;
    });
    CHECK(got == 256);
    CHECK(seen == std::vector<long>{64, 128, 256});
    CHECK_THROWS_AS(escalate(p, [](long) -> std::optional<int> { return std::nullopt; }), PrecisionExhausted);
    CHECK_THROWS_AS((PrecisionPolicy{32, 64, Rational(2)}.validate()), DomainError);
    CHECK_THROWS_AS((PrecisionPolicy{128, 64, Rational(2)}.validate()), DomainError);
    CHECK_THROWS_AS((PrecisionPolicy{128, 256, Rational(1)}.validate()), DomainError);
}
