#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <psseq/continued_fraction.hpp>
#include <psseq/dioph_system.hpp>

#include "oracles.hpp"

using namespace psseq;

namespace {

std::vector<std::int64_t> ns_of(const DiophResult &r)
{
    std::vector<std::int64_t> out;
    for (const auto &s : r.solutions) {
        out.push_back(s.n);
    }
    return out;
}

// Checks the determinant identity and the approximation bound for every
// convergent, against a 4096-bit round-to-nearest value of the target.
void check_convergents(const ContinuedFraction &cf, const mpfr_t x)
{
    const auto &c = cf.convergents;
    REQUIRE(c.size() == cf.quotients.size());
    for (std::size_t k = 1; k < c.size(); ++k) {
        const __int128 det = static_cast<__int128>(c[k].p) * c[k - 1].q - static_cast<__int128>(c[k - 1].p) * c[k].q;
        CHECK(det == ((k % 2 == 1) ? 1 : -1));
        // q_1 = q_0 when a_1 = 1; strict growth from there on.
        CHECK(c[k].q >= c[k - 1].q);
        if (k >= 2) {
            CHECK(c[k].q > c[k - 1].q);
        }
    }
    mpfr_t d, b;
    mpfr_init2(d, 4096);
    mpfr_init2(b, 4096);
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        mpfr_set_si(d, c[k].p, MPFR_RNDN);
        mpfr_div_si(d, d, c[k].q, MPFR_RNDN);
        mpfr_sub(d, x, d, MPFR_RNDN);
        mpfr_abs(d, d, MPFR_RNDN);
        mpfr_set_si(b, 1, MPFR_RNDN);
        mpfr_div_si(b, b, c[k].q, MPFR_RNDN);
        mpfr_div_si(b, b, c[k + 1].q, MPFR_RNDN);
        CHECK(mpfr_less_p(d, b));
    }
    mpfr_clear(d);
    mpfr_clear(b);
}

} // namespace

TEST_CASE("cf_expand examples")
{
    const auto golden = cf_expand(
        [](mpfr_prec_t bits) { return Exponent::named("golden").enclose(bits); }, 40);
    CHECK(golden.quotients == std::vector<std::int64_t>(40, 1));
    CHECK(golden.stop == CFStop::Complete);

    const auto r = root_cf(2, Exponent::rational(3, 2), 15);
    CHECK(r.quotients == std::vector<std::int64_t>{1, 1, 1, 2, 2, 1, 3, 2, 3, 1, 3, 1, 30, 1, 4});

    const auto h = cf_expand(Rational(3, 2), 10);
    CHECK(h.quotients == std::vector<std::int64_t>{1, 2});
    CHECK(h.stop == CFStop::ExactRational);
    const auto h2 = cf_expand([](mpfr_prec_t bits) { return CertifiedValue::from_rational(Rational(3, 2), bits); }, 10);
    CHECK(h2.quotients == std::vector<std::int64_t>{1, 2});
    CHECK(h2.stop == CFStop::ExactRational);

    CHECK_THROWS_AS(cf_expand(Rational(-1, 2), 3), DomainError);
    CHECK_THROWS_AS(cf_expand(Rational(1, 2), 0), DomainError);
}

TEST_CASE("cf_expand stops when convergents leave 64 bits")
{
    const auto cf = cf_expand([](mpfr_prec_t bits) { return Exponent::named("pi").enclose(bits); }, 200);
    CHECK(cf.stop == CFStop::Overflow);
    CHECK(cf.quotients.size() < 200);
    CHECK(cf.quotients.front() == 3);
    CHECK(cf.quotients[4] == 292);
}

TEST_CASE("convergents of roots satisfy the determinant identity and the approximation bound")
{
    const std::vector<std::pair<Rational, Exponent>> targets{
        {2, Exponent::rational(3, 2)}, {3, Exponent::rational(5, 3)},     {Rational(1, 4), Exponent::rational(6, 5)},
        {5, Exponent::named("e")},    {Rational(7, 2), Exponent::named("sqrt2")},
    };
    for (const auto &[a, alpha] : targets) {
        const auto cf = root_cf(a, alpha, 30);
        mpfr_t x, e;
        mpfr_init2(x, 4096);
        mpfr_init2(e, 4096);
        mpfr_set_si(x, a.num(), MPFR_RNDN);
        mpfr_div_si(x, x, a.den(), MPFR_RNDN);
        if (alpha.is_rational()) {
            mpfr_set_si(e, alpha.ratio().den(), MPFR_RNDN);
            mpfr_div_si(e, e, alpha.ratio().num(), MPFR_RNDN);
        } else if (alpha.name() == "e") {
            mpfr_set_si(e, -1, MPFR_RNDN);
            mpfr_exp(e, e, MPFR_RNDN);
        } else {
            mpfr_set_si(e, 2, MPFR_RNDN);
            mpfr_rec_sqrt(e, e, MPFR_RNDN);
        }
        mpfr_pow(x, x, e, MPFR_RNDN);
        check_convergents(cf, x);
        mpfr_clear(x);
        mpfr_clear(e);
    }
}

TEST_CASE("DiophSystem validation and I0")
{
    CHECK_THROWS_AS(DiophSystem::make(1, 1, 1), DomainError);
    CHECK_THROWS_AS(DiophSystem::make(2, 0, 1), DomainError);
    CHECK_THROWS_AS(DiophSystem::make(2, 1, 0), DomainError);
    CHECK_THROWS_AS(DiophSystem::make(2, 1, 1, Rational(1, 2), Rational(1, 2)), DomainError);
    const auto s = DiophSystem::make(2, 1, 1, 0, Rational(1, 2)).middle_third();
    CHECK(s.i_lo == Rational(1, 6));
    CHECK(s.i_hi == Rational(1, 3));
}

TEST_CASE("solve_system_one examples")
{
    const auto sys = DiophSystem::make(2, 1, 1);
    const auto r = solve_system_one(sys, Exponent::rational(3, 2), 10000);
    CHECK_FALSE(r.solutions.empty());
    CHECK(r.scanned_up_to == 10000);
    CHECK(r.skipped.empty());
    // Convergent denominators of 2^(2/3): 1, 2, 3, 8, 19, 27, ...
    for (const std::int64_t q : {1, 2, 3, 8, 19}) {
        CHECK(std::ranges::any_of(r.solutions, [&](const auto &s) { return s.n == q; }));
    }

    const auto u = solve_system_one(sys, Exponent::rational(5, 2), 10000);
    MESSAGE("alpha=5/2 solutions <= 1e4: " << u.solutions.size());
    for (const auto &s : u.solutions) {
        CHECK(verify_solution(sys, Exponent::rational(5, 2), s.n).holds());
    }

    std::ostringstream os;
    write_dioph_csv(os, r);
    CHECK(os.str().starts_with("n,norm_bound,frac_bound,source\n1,"));
}

TEST_CASE("solve_system_one agrees with a plain high-precision scan")
{
    SUBCASE("a=2, alpha=3/2, I=[0,1)")
    {
        const auto got = solve_system_one(DiophSystem::make(2, 1, 1), Exponent::rational(3, 2), 100000);
        const auto want = oracle::twisted_system(
            [](mpfr_t t) {
                mpfr_set_si(t, 4, MPFR_RNDN);
                mpfr_cbrt(t, t, MPFR_RNDN);
            },
            [](mpfr_t s) { mpfr_set_d(s, 1.5, MPFR_RNDN); }, 1, 1, 1, 1, 0, 1, 1, 1, 100000);
        CHECK(ns_of(got) == want);
    }
    SUBCASE("a=3, alpha=5/3, c=1/2, I=[0,1/2)")
    {
        const auto got = solve_system_one(DiophSystem::make(3, Rational(1, 2), 1, 0, Rational(1, 2)),
                                          Exponent::rational(5, 3), 100000);
        const auto want = oracle::twisted_system(
            [](mpfr_t t) {
                mpfr_set_si(t, 27, MPFR_RNDN);
                mpfr_rootn_ui(t, t, 5, MPFR_RNDN);
            },
            [](mpfr_t s) {
                mpfr_set_si(s, 5, MPFR_RNDN);
                mpfr_div_si(s, s, 3, MPFR_RNDN);
            },
            1, 2, 1, 1, 0, 1, 1, 2, 100000);
        CHECK(ns_of(got) == want);
    }
    SUBCASE("a=5/2, alpha=e, c=2, gamma=-3/2, I=[1/3,2/3)")
    {
        const auto got = solve_system_one(DiophSystem::make(Rational(5, 2), 2, Rational(-3, 2), Rational(1, 3),
                                                            Rational(2, 3)),
                                          Exponent::named("e"), 100000);
        const auto want = oracle::twisted_system(
            [](mpfr_t t) {
                mpfr_t e;
                mpfr_init2(e, mpfr_get_prec(t));
                mpfr_set_si(e, -1, MPFR_RNDN);
                mpfr_exp(e, e, MPFR_RNDN);
                mpfr_set_d(t, 2.5, MPFR_RNDN);
                mpfr_pow(t, t, e, MPFR_RNDN);
                mpfr_clear(e);
            },
            [](mpfr_t s) {
                mpfr_set_si(s, 1, MPFR_RNDN);
                mpfr_exp(s, s, MPFR_RNDN);
            },
            2, 1, -3, 2, 1, 3, 2, 3, 100000);
        CHECK(ns_of(got) == want);
    }
}

TEST_CASE("solutions beyond the scan cutoff come from convergents and re-verify")
{
    const auto sys = DiophSystem::make(2, 1, 1);
    SolveOptions opts;
    opts.scan_cutoff = 100;
    const auto r = solve_system_one(sys, Exponent::rational(3, 2), 1000000, opts);
    CHECK(r.candidates_tested > 0);
    CHECK(r.candidates_accepted > 0);
    CHECK_FALSE(r.convergent_fracs.empty());
    for (const auto &s : r.solutions) {
        if (s.n > 100) {
            CHECK(s.source == SolutionSource::Convergent);
        }
        CHECK(verify_solution(sys, Exponent::rational(3, 2), s.n).holds());
    }
}

TEST_CASE("solve_system_one is deterministic across worker counts")
{
    const auto sys = DiophSystem::make(3, 1, Rational(2, 3), Rational(1, 5), Rational(4, 5));
    SolveOptions one;
    SolveOptions many;
    many.workers = 8;
    const auto a = solve_system_one(sys, Exponent::rational(7, 5), 200000, one);
    const auto b = solve_system_one(sys, Exponent::rational(7, 5), 200000, many);
    std::ostringstream sa;
    std::ostringstream sb;
    write_dioph_csv(sa, a);
    write_dioph_csv(sb, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("solve_system_two")
{
    const auto sys = DiophSystem::make(Rational(1, 4), 1, 1);
    const auto r = solve_system_two(sys, Rational(3, 10), 10000);
    REQUIRE_FALSE(r.solutions.empty());
    for (std::int64_t n = 10; n <= 10000; n += 10) {
        CHECK(std::ranges::any_of(r.solutions, [&](const auto &s) { return s.n == n; }));
    }
    const auto u = solve_system_two(sys, Rational(7, 10), 10000);
    MESSAGE("theta=0.7 solutions <= 1e4: " << u.solutions.size());
    CHECK(u.solutions.size() < r.solutions.size());
    CHECK_THROWS_AS(solve_system_two(sys, 1, 100), DomainError);
    CHECK_THROWS_AS(solve_system_two(sys, Rational(1, 4), 100), DomainError);

    // θ² = a makes φ exactly 2.
    const auto e = solve_system_two(DiophSystem::make(Rational(1, 4), 1, Rational(1, 3), 0, Rational(1, 2)),
                                    Rational(1, 2), 1000);
    for (const auto &s : e.solutions) {
        const Rational v = Rational(1, 3) * Rational(s.n * s.n);
        CHECK(v - Rational(v.floor()) < Rational(1, 2));
    }
}

TEST_CASE("solve_system_two agrees with a plain high-precision scan")
{
    const auto sys = DiophSystem::make(Rational(1, 4), 1, 1, 0, Rational(1, 2));
    const auto got = solve_system_two(sys, Rational(2, 5), 50000);
    const auto want = oracle::twisted_system(
        [](mpfr_t t) {
            mpfr_set_si(t, 2, MPFR_RNDN);
            mpfr_div_si(t, t, 5, MPFR_RNDN);
        },
        [](mpfr_t s) {
            mpfr_t u;
            mpfr_init2(u, mpfr_get_prec(s));
            mpfr_set_d(s, 0.25, MPFR_RNDN);
            mpfr_log(s, s, MPFR_RNDN);
            mpfr_set_si(u, 2, MPFR_RNDN);
            mpfr_div_si(u, u, 5, MPFR_RNDN);
            mpfr_log(u, u, MPFR_RNDN);
            mpfr_div(s, s, u, MPFR_RNDN);
            mpfr_clear(u);
        },
        1, 1, 1, 1, 0, 1, 1, 2, 50000);
    CHECK(ns_of(got) == want);
}

TEST_CASE("verify_solution")
{
    const auto sys = DiophSystem::make(2, Rational(1, 10), 1);
    const auto c = verify_solution(sys, Exponent::rational(3, 2), 1);
    CHECK(c.norm_condition == Tri::False);
    CHECK(c.norm_value.find("0.41259894803") != std::string::npos);
    CHECK_FALSE(c.holds());
    CHECK_FALSE(c.precision_trace.empty());

    // n = 4 at α = 3/2: n^α = 8 exactly, so γ n^α = 8 · (1/8) = 1 sits on the
    // boundary and {1} = 0 ∈ [0, 1/2).
    const auto b = DiophSystem::make(2, 100, Rational(1, 8), 0, Rational(1, 2));
    const auto cb = verify_solution(b, Exponent::rational(3, 2), 4);
    CHECK(cb.frac_condition == Tri::True);
    const auto b2 = DiophSystem::make(2, 100, Rational(1, 16), Rational(1, 2), 1);
    CHECK(verify_solution(b2, Exponent::rational(3, 2), 4).frac_condition == Tri::True);
    const auto b3 = DiophSystem::make(2, 100, Rational(1, 16), 0, Rational(1, 2));
    CHECK(verify_solution(b3, Exponent::rational(3, 2), 4).frac_condition == Tri::False);
}
