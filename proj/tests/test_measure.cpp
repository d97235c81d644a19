#include <doctest.h>

#include <cmath>

#include <psseq/measure.hpp>

#include "oracles.hpp"

using namespace psseq;

namespace {

MetricalParams ref_params(Rational gamma = 1, Rational eta = 0)
{
    return MetricalParams::make(DiophSystem::make(Rational(1, 4), 1, gamma, Rational(1, 10), Rational(2, 5)),
                                Rational(26, 100), Rational(49, 100), eta);
}

bool in_F(long double t, std::int64_t n, const MetricalParams &p)
{
    return oracle::in_F(t, n, p.sys.a.to_double(), p.sys.gamma.to_double(), p.sys.i_lo.to_double(),
                        p.sys.i_hi.to_double());
}

void check_against_grid(const IntervalSet &s, const GridMeasure &g)
{
    const double tol = g.cell * static_cast<double>(std::max<std::size_t>(s.size(), 1)) + s.measure_error() + 1e-15;
    CHECK(std::fabs(s.measure() - g.measure) <= tol);
}

Interval iv(double lo, double hi, bool lc = true, bool rc = true)
{
    return {Endpoint{BigFloat::from_double(lo, IntervalSet::kPrecision), 0},
            Endpoint{BigFloat::from_double(hi, IntervalSet::kPrecision), 0}, lc, rc};
}

} // namespace

TEST_CASE("IntervalSet normalization and algebra")
{
    const IntervalSet a({iv(0.1, 0.2), iv(0.2, 0.3, false, false), iv(0.5, 0.6), iv(0.55, 0.58), iv(0.7, 0.7)});
    CHECK(a.size() == 3);
    CHECK(a.measure() == doctest::Approx(0.3));
    CHECK(a.contains(0.7));
    CHECK(a.contains(0.2));
    CHECK_FALSE(a.contains(0.3));
    CHECK_FALSE(a.contains(0.65));

    const IntervalSet open_touch({iv(0.1, 0.2, true, false), iv(0.2, 0.3, false, true)});
    CHECK(open_touch.size() == 2);
    CHECK_FALSE(open_touch.contains(0.2));
    CHECK(IntervalSet({iv(0.3, 0.3, true, false)}).empty());

    const IntervalSet b({iv(0.15, 0.52), iv(0.59, 0.71, false, true)});
    const auto i = intersect(a, b);
    const auto u = unite(a, b);
    CHECK(i.measure() + u.measure() == doctest::Approx(a.measure() + b.measure()).epsilon(1e-14));
    CHECK(i.contains(0.7));
    CHECK_FALSE(i.contains(0.59));
    CHECK(pairwise_overlap_sum({a, b}) == doctest::Approx(i.measure()).epsilon(1e-14));
}

TEST_CASE("psi")
{
    CHECK(psi(7) == Rational(1, 7));
    for (std::int64_t m = 1; m < 30; ++m) {
        for (std::int64_t n = 1; n < 30; ++n) {
            CHECK(psi(m * n) == psi(m) * psi(n));
        }
    }
    Rational s = 0;
    for (int l = 0; l < 40; ++l) {
        s += psi(std::int64_t{1} << l);
    }
    CHECK(Rational(2) - s == Rational(1, std::int64_t{1} << 39));
    CHECK_THROWS_AS(psi(0), DomainError);
}

TEST_CASE("MetricalParams validation and index sets")
{
    const auto sys = DiophSystem::make(Rational(1, 4), 1, 1);
    CHECK_THROWS_AS(MetricalParams::make(sys, Rational(2, 5), Rational(3, 5)), DomainError); // contains √a
    CHECK_THROWS_AS(MetricalParams::make(sys, Rational(1, 5), Rational(2, 5)), DomainError); // below a
    CHECK_THROWS_AS(MetricalParams::make(sys, Rational(3, 10), Rational(2, 5), Rational(1, 30)), DomainError);
    const auto p = MetricalParams::make(sys, Rational(3, 10), Rational(2, 5), Rational(1, 40));
    CHECK(p.solvable_side());
    CHECK_FALSE(MetricalParams::make(sys, Rational(3, 5), Rational(4, 5)).solvable_side());

    for (const std::int64_t n : {1, 7, 40, 1000, 12345}) {
        const auto idx = index_sets(n, p);
        CHECK(idx.s.size() <= idx.t.size());
        if (idx.s.size() > 0) {
            CHECK(idx.t.lo <= idx.s.lo);
            CHECK(idx.s.hi <= idx.t.hi);
        }
        for (std::int64_t m = idx.t.lo - 2; m <= idx.t.hi + 2; ++m) {
            const Rational x(m, n);
            const bool in_t = x > p.theta1 - p.eta && x < p.theta2 + p.eta;
            CHECK(in_t == (m >= idx.t.lo && m <= idx.t.hi));
        }
    }
    const auto big = index_sets(100000, p);
    CHECK(static_cast<double>(big.s.size()) == doctest::Approx(0.1 * 100000 - 5000).epsilon(1e-3));
}

TEST_CASE("set_E examples")
{
    const auto sys = DiophSystem::make(Rational(1, 16), 1, 1);
    const auto p = MetricalParams::make(sys, Rational(3, 10), Rational(9, 10));
    CHECK(set_E(2, p).measure() == doctest::Approx(0.6));
    CHECK(set_E(2, p).size() == 1);
    CHECK(set_E(1, p).measure() == doctest::Approx(0.6));
    const auto e10 = set_E(10, p);
    CHECK(e10.measure() == doctest::Approx(0.12).epsilon(1e-14));
    CHECK(e10.size() == 7);
    CHECK(e10.measure_error() < 1e-50);
}

TEST_CASE("E, F, G agree with a dense grid")
{
    for (const Rational gamma : {Rational(1), Rational(-3, 2)}) {
        const auto p = ref_params(gamma);
        const std::int64_t n = 100;
        const auto E = set_E(n, p);
        const auto F = set_F(n, p);
        const auto G = set_G(n, p);
        constexpr std::int64_t cells = 1'000'000;
        check_against_grid(E, grid_measure(p.theta1, p.theta2, cells, [&](double t) { return oracle::in_E(t, n); }));
        check_against_grid(F, grid_measure(p.theta1, p.theta2, cells, [&](double t) { return in_F(t, n, p); }));
        check_against_grid(
            G, grid_measure(p.theta1, p.theta2, cells, [&](double t) { return oracle::in_E(t, n) && in_F(t, n, p); }));
        CHECK(G.measure() <= std::min(E.measure(), F.measure()));
        CHECK(intersect(E, F).measure() == doctest::Approx(G.measure()).epsilon(1e-12));
        CHECK(intersect(E, F).size() == G.size());
        CHECK(E.measure() + F.measure() == doctest::Approx(G.measure() + unite(E, F).measure()).epsilon(1e-12));
    }
}

TEST_CASE("F on the unsolvable side and for a > 1")
{
    const auto p = MetricalParams::make(DiophSystem::make(Rational(1, 4), 1, Rational(2, 3), Rational(1, 3), 1),
                                        Rational(55, 100), Rational(7, 10));
    const auto F = set_F(8, p);
    check_against_grid(F, grid_measure(p.theta1, p.theta2, 1'000'000, [&](double t) { return in_F(t, 8, p); }));

    const auto q = MetricalParams::make(DiophSystem::make(4, 1, 1, 0, Rational(1, 2)), Rational(21, 10),
                                        Rational(3, 1));
    const auto Fq = set_F(40, q);
    check_against_grid(Fq, grid_measure(q.theta1, q.theta2, 1'000'000, [&](double t) { return in_F(t, 40, q); }));
    CHECK(Fq.size() > 10);
}

TEST_CASE("whole I gives F = (theta1, theta2) and G = E")
{
    const auto p = MetricalParams::make(DiophSystem::make(Rational(1, 4), 1, 1), Rational(26, 100), Rational(49, 100));
    CHECK(set_F(50, p).measure() == doctest::Approx(0.23));
    CHECK(set_F(50, p).size() == 1);
    CHECK(set_G(50, p).measure() == doctest::Approx(set_E(50, p).measure()).epsilon(1e-15));
    CHECK_THROWS_AS(set_F(1, p), DomainError);
}

TEST_CASE("set_F_on restricts to the domain")
{
    const auto p = ref_params();
    const auto dom = IntervalSet::open(Rational(3, 10), Rational(31, 100));
    const auto F = set_F(200, p);
    const auto Fd = set_F_on(200, p, dom);
    CHECK(Fd.measure() == doctest::Approx(intersect(F, dom).measure()).epsilon(1e-12));
}

TEST_CASE("bc_statistics")
{
    const auto p = ref_params();
    const auto one = bc_statistics(p, 3);
    REQUIRE(one.primes == std::vector<std::int64_t>{2});
    CHECK(one.ratio == doctest::Approx(one.measures[0]));
    CHECK(one.measures[0] == doctest::Approx(set_G(2, p).measure()));
    CHECK_THROWS_AS(bc_statistics(p, 2), DomainError);

    const auto s = bc_statistics(p, 120);
    double pair = 0;
    std::vector<IntervalSet> g;
    for (const auto q : s.primes) {
        g.push_back(set_G(q, p));
    }
    for (const auto &x : g) {
        for (const auto &y : g) {
            pair += intersection_measure(x, y);
        }
    }
    CHECK(s.pair_sum == doctest::Approx(pair).epsilon(1e-10));
    CHECK(s.ratio == doctest::Approx(s.sum * s.sum / pair).epsilon(1e-10));
    CHECK(s.kappa > 0);
    CHECK(s.p0 >= 2);
    CHECK(bc_statistics(p, 120, 4).pair_sum == s.pair_sum);

    // With I = [0,1), λ(E_p) is 2(θ2-θ1)/p up to boundary terms.
    const auto whole = MetricalParams::make(DiophSystem::make(Rational(1, 4), 1, 1), p.theta1, p.theta2);
    const auto w = bc_statistics(whole, 500);
    double harmonic = 0;
    for (std::size_t i = 0; i < w.primes.size(); ++i) {
        const double q = static_cast<double>(w.primes[i]);
        CHECK(std::fabs(w.measures[i] - 2 * 0.23 / q) <= 4 / (q * q));
        harmonic += 2 * 0.23 / q;
    }
    CHECK(w.sum == doctest::Approx(harmonic).epsilon(0.05));
}

TEST_CASE("count_triples")
{
    const Rational e1(1, 5);
    const Rational e2(4, 5);
    CHECK(count_triples(10, 2, 2, 3, e1, e2) == oracle::naive_triples(10, 2, 2, 3, 0.2, 0.8));
    CHECK(count_triples(10, 2, 2, 3, e1, e2) == 2);
    // s/q < 1 forces sp != rq, so |sp - rq| >= 1.
    CHECK(count_triples(1000, 100, 97, 1, e1, e2) == 0);
    CHECK(count_triples(5, 10, 7, 100, e1, e2) == 0);

    for (const std::int64_t N : {50, 300, 1000}) {
        for (const std::int64_t Q : {5, 23, 100, 400}) {
            for (const auto p : primes_below(Q + 1)) {
                if (p % 3 != 2 && p != Q) {
                    continue;
                }
                std::int64_t prev = 0;
                for (const std::int64_t L : {1, 2, 5, 17, 60}) {
                    const auto c = count_triples(N, Q, p, L, Rational(3, 10), Rational(7, 10));
                    CHECK(c == oracle::naive_triples(N, Q, p, static_cast<double>(L), 0.3, 0.7));
                    CHECK(c >= prev);
                    prev = c;
                }
            }
        }
    }
    CHECK(count_triples(100, 10, 7, Rational(5, 2), e1, e2) == oracle::naive_triples(100, 10, 7, 2.5, 0.2, 0.8));
    CHECK_THROWS_AS(count_triples(10, 2, 4, 3, e1, e2), DomainError);
    CHECK_THROWS_AS(count_triples(10, 2, 3, 3, e1, e2), DomainError);
    CHECK_THROWS_AS(count_triples(10, 2, 2, 0, e1, e2), DomainError);
}

TEST_CASE("bound_check_triples")
{
    std::vector<TripleRow> grid;
    for (const std::int64_t Q : {10, 100, 1000}) {
        for (const std::int64_t p : {2, 7}) {
            for (const std::int64_t L : {1, 6, 24}) {
                grid.push_back({4 * Q, Q, p, L});
            }
        }
    }
    const auto r = bound_check_triples(grid, Rational(1, 5), Rational(4, 5));
    REQUIRE(r.rows.size() == grid.size());
    CHECK(std::isfinite(r.k_unit));
    CHECK(std::isfinite(r.c_fit));
    CHECK(std::isfinite(r.k_fit));
    CHECK(r.c_fit >= 0);
    for (const auto &row : r.rows) {
        const double q = static_cast<double>(row.Q);
        CHECK(static_cast<double>(row.count) <= row.first_term + r.k_unit * q + 1e-9);
        CHECK(static_cast<double>(row.count) <= r.c_fit * row.first_term + r.k_fit * q + 1e-9);
        if (row.L <= Rational(1)) {
            CHECK(row.count == 0);
        }
    }
    const auto again = bound_check_triples(grid, Rational(1, 5), Rational(4, 5), r.k_unit);
    CHECK(again.violations.empty());
    // first_term is linear in L.
    CHECK(r.rows[2].first_term == doctest::Approx(4 * r.rows[1].first_term));
}

TEST_CASE("set_H measures")
{
    const auto sys = DiophSystem::make(Rational(1, 4), 1, 1);
    const Rational t3(3, 5);
    CHECK_THROWS_AS(set_H_sum(Rational(1, 2), sys, 10), DomainError);
    CHECK_THROWS_AS(set_H_sum(Rational(2, 5), sys, 10), DomainError);
    CHECK_THROWS_AS(set_H_sum(t3, DiophSystem::make(4, 1, 1), 10), DomainError);

    const auto h = set_H_sum(t3, sys, 20000);
    const double phi3 = std::log(0.25) / std::log(0.6);
    CHECK(h.phi3 == doctest::Approx(phi3).epsilon(1e-14));
    CHECK(h.measures[0] == doctest::Approx(0.4));
    for (std::size_t i = 1; i < h.partial.size(); ++i) {
        CHECK(h.partial[i] > h.partial[i - 1]);
    }
    // Union bound per n.
    for (std::int64_t n = 1; n <= 20000; n += 37) {
        const double rho = std::pow(static_cast<double>(n), -phi3);
        CHECK(h.measures[static_cast<std::size_t>(n - 1)] <= (0.4 * static_cast<double>(n) + 2) * 2 * rho + 1e-15);
    }
    // Direct construction as an interval union for small n.
    for (std::int64_t n = 2; n <= 300; ++n) {
        const double rho = std::pow(static_cast<double>(n), -phi3);
        std::vector<Interval> parts;
        for (std::int64_t m = 0; m <= n + 1; ++m) {
            const double x = static_cast<double>(m) / static_cast<double>(n);
            parts.push_back(iv(x - rho, x + rho));
        }
        const auto hset = intersect(IntervalSet(parts), IntervalSet::open(t3, 1));
        CHECK(set_H_measure(n, t3, sys) == doctest::Approx(hset.measure()).epsilon(1e-12));
    }
    // Boundedness via the integral comparison.
    for (const std::int64_t N : {100, 1000, 10000}) {
        CHECK(h.partial.back() <= h.partial[static_cast<std::size_t>(N - 1)] + h.tail_bound(N));
    }
    // Lengths are linear in c once intervals stop overlapping.
    const auto small = set_H_sum(t3, DiophSystem::make(Rational(1, 4), Rational(1, 1000), 1), 2000);
    const auto half = set_H_sum(t3, DiophSystem::make(Rational(1, 4), Rational(1, 2000), 1), 2000);
    CHECK(half.partial.back() < small.partial.back());
    CHECK(half.measures.back() == doctest::Approx(small.measures.back() / 2).epsilon(1e-9));
    CHECK(h.stable_from(2).has_value());
    CHECK(h.certified_digits(10000) >= 2);
}

TEST_CASE("claim_threshold")
{
    const auto p = MetricalParams::make(DiophSystem::make(Rational(1, 4), 1, 1, 0, Rational(1, 2)), Rational(26, 100),
                                        Rational(3, 10), Rational(1, 100));
    const auto ct = claim_threshold(p, {100, 1000, 10000, 40000});
    CHECK(ct.phi2 == doctest::Approx(std::log(0.25) / std::log(0.3)).epsilon(1e-12));
    CHECK(ct.literal_log10_n0 > 0);
    const double k = 0.5 / 3;
    const double above = std::pow(10.0, ct.literal_log10_n0 + 0.01);
    const double below = std::pow(10.0, ct.literal_log10_n0 - 0.01);
    CHECK(std::log(above) / std::pow(above, 2 - ct.phi2) < k);
    CHECK(std::log(below) / std::pow(below, 2 - ct.phi2) > k);
    REQUIRE(ct.rows.size() == 4);
    for (const auto &r : ct.rows) {
        CHECK(r.contained <= r.hits_i0);
    }
    CHECK(ct.rows.back().max_shift < ct.rows.front().max_shift);
    CHECK_THROWS_AS(claim_threshold(ref_params(), {100}), DomainError);
}

TEST_CASE("dichotomy_scan")
{
    const auto sys = DiophSystem::make(Rational(1, 4), 1, 1, 0, Rational(1, 2));
    const std::vector<Rational> grid{Rational(3, 10), Rational(2, 5), Rational(3, 5), Rational(7, 10)};
    const auto s = dichotomy_scan(sys, grid, 2000);
    REQUIRE(s.rows.size() == 4);
    CHECK(s.rows[0].solvable_side);
    CHECK_FALSE(s.rows[3].solvable_side);
    CHECK(s.solvable_count == 2);
    CHECK(s.solvable_hits == s.rows[0].hits + s.rows[1].hits);
    CHECK(s.rows[1].hits == static_cast<std::int64_t>(solve_system_two(sys, Rational(2, 5), 2000).solutions.size()));
    CHECK_THROWS_AS(dichotomy_scan(sys, {Rational(1, 2)}, 100), DomainError);
    CHECK_THROWS_AS(dichotomy_scan(sys, {}, 100), EmptyInput);
}
