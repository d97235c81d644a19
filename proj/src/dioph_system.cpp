#include <psseq/dioph_system.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <gmp.h>

#include <psseq/parallel.hpp>

namespace psseq {

namespace {

// Either an exact rational or a certified enclosure at some precision.
struct Real {
    std::optional<Rational> exact;
    std::optional<CertifiedValue> enc;

    CertifiedValue at(mpfr_prec_t bits) const { return exact ? CertifiedValue::from_rational(*exact, bits) : *enc; }
};

Real exact_real(Rational q) { return {q, std::nullopt}; }
Real enclosed(CertifiedValue v) { return {std::nullopt, std::move(v)}; }

// n^(p/q) when n is a perfect q-th power and the result fits.
std::optional<std::int64_t> integral_power(std::int64_t n, std::int64_t p, std::int64_t q)
{
    mpz_t z;
    mpz_init_set_si(z, n);
    std::optional<std::int64_t> out;
    if (mpz_root(z, z, static_cast<unsigned long>(q)) != 0) {
        mpz_pow_ui(z, z, static_cast<unsigned long>(p));
        if (mpz_fits_slong_p(z)) {
            out = mpz_get_si(z);
        }
    }
    mpz_clear(z);
    return out;
}

// ‖x‖ for an exact rational.
Rational dist_rational(const Rational &x)
{
    const Rational f = x - Rational(x.floor());
    const Rational g = Rational(1) - f;
    return f < g ? f : g;
}

struct Eval {
    Tri norm;
    Tri frac;
    double norm_hi;
    double frac_hi;
    std::string norm_text;
    std::string frac_text;
};

// Decides ‖θn‖ ≤ c n / n^s and {γ n^s} ∈ I from θn and n^s. Returns nullopt
// when the enclosures are too wide to decide.
std::optional<Eval> decide(const DiophSystem &sys, std::int64_t n, const Real &theta_n, const Real &power,
                           mpfr_prec_t bits)
{
    Eval out{Tri::Unknown, Tri::Unknown, 0, 0, {}, {}};

    std::optional<Rational> dist_exact;
    std::optional<CertifiedValue> dist;
    if (theta_n.exact) {
        dist_exact = dist_rational(*theta_n.exact);
        dist = CertifiedValue::from_rational(*dist_exact, bits);
    } else {
        try {
            dist = dist_nearest_int(*theta_n.enc);
        } catch (const AmbiguousRounding &) {
            return std::nullopt;
        }
    }

    std::optional<Rational> rhs_exact;
    if (power.exact) {
        try {
            rhs_exact = sys.c * Rational(n) / *power.exact;
        } catch (const Overflow &) {
        }
    }
    if (dist_exact && rhs_exact) {
        out.norm = tri_from(*dist_exact <= *rhs_exact);
    } else {
        const auto cn = mul_int(CertifiedValue::from_rational(sys.c, bits), n, bits);
        const auto rhs = rhs_exact ? CertifiedValue::from_rational(*rhs_exact, bits) : div(cn, power.at(bits), bits);
        out.norm = less_equal(*dist, rhs);
    }
    out.norm_hi = dist->hi().to_double(MPFR_RNDU);
    out.norm_text = dist_exact ? dist_exact->str() : dist->str(12);
    if (out.norm == Tri::Unknown) {
        return std::nullopt;
    }

    std::optional<Rational> v_exact;
    if (power.exact) {
        try {
            v_exact = sys.gamma * *power.exact;
        } catch (const Overflow &) {
        }
    }
    if (v_exact) {
        const Rational f = *v_exact - Rational(v_exact->floor());
        out.frac = tri_from(f >= sys.i_lo && f < sys.i_hi);
        out.frac_hi = f.to_double();
        out.frac_text = f.str();
        return out;
    }
    const auto v = mul(CertifiedValue::from_rational(sys.gamma, bits), power.at(bits), bits);
    const auto fl = v.certain_floor();
    if (!fl) {
        return std::nullopt;
    }
    const auto f = sub_int(v, *fl, bits);
    out.frac = tri_and(greater_equal(f, sys.i_lo), less(f, sys.i_hi));
    out.frac_hi = f.hi().to_double(MPFR_RNDU);
    out.frac_text = f.str(12);
    if (out.frac == Tri::Unknown) {
        return std::nullopt;
    }
    return out;
}

// θ as an unevaluated double-double, for the cheap pre-filter.
struct FastTheta {
    double hi = 0;
    double lo = 0;

    static FastTheta from(const CertifiedValue &v)
    {
        BigFloat mid(v.precision() + 2);
        mpfr_add(mid.get(), v.lo().get(), v.hi().get(), MPFR_RNDN);
        mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
        FastTheta t;
        t.hi = mid.to_double();
        mpfr_sub_d(mid.get(), mid.get(), t.hi, MPFR_RNDN);
        t.lo = mid.to_double();
        return t;
    }

    // ‖θn‖ to about 1e-15 absolute for n θ < 2^52.
    double dist(std::int64_t n) const
    {
        const auto x = static_cast<double>(n);
        const double p = hi * x;
        const double e = std::fma(hi, x, -p);
        double d = (p - std::nearbyint(p)) + e + lo * x;
        d -= std::nearbyint(d);
        return std::fabs(d);
    }
};

// Passes every n that can satisfy the norm condition; the margin covers the
// double-precision error in both sides.
bool may_pass(double dist, double c, double s, std::int64_t n)
{
    const double rhs = c * std::exp((1 - s) * std::log(static_cast<double>(n)));
    return dist <= rhs * (1 + 1e-9) + 1e-12;
}

struct Problem {
    const DiophSystem &sys;
    std::function<Real(std::int64_t, mpfr_prec_t)> theta_n;
    std::function<Real(std::int64_t, mpfr_prec_t)> power;
    std::function<Certificate(std::int64_t)> verify;
};

enum class Outcome { Rejected, Accepted, Skipped };

Outcome test_candidate(const Problem &pb, std::int64_t n, const PrecisionPolicy &policy, SolutionSource src,
                       std::vector<DiophSolution> &sols, std::vector<SkippedCandidate> &skipped)
{
    Eval e;
    try {
        e = escalate(
            policy, [&](long bits) { return decide(pb.sys, n, pb.theta_n(n, bits), pb.power(n, bits), bits); },
            "system conditions");
    } catch (const PrecisionExhausted &ex) {
        skipped.push_back({n, ex.what()});
        return Outcome::Skipped;
    }
    if (e.norm != Tri::True || e.frac != Tri::True) {
        return Outcome::Rejected;
    }
    const auto cert = pb.verify(n);
    if (cert.norm_condition == Tri::False || cert.frac_condition == Tri::False) {
        throw std::logic_error("solution n=" + std::to_string(n) + " failed independent verification");
    }
    if (!cert.holds()) {
        skipped.push_back({n, "independent verification inconclusive"});
        return Outcome::Skipped;
    }
    sols.push_back({n, e.norm_hi, e.frac_hi, src});
    return Outcome::Accepted;
}

void sort_result(DiophResult &r)
{
    std::ranges::sort(r.solutions, {}, &DiophSolution::n);
    std::ranges::sort(r.skipped, {}, &SkippedCandidate::n);
}

// Exhaustive filtered scan of [1, end].
void scan(const Problem &pb, std::int64_t end, const std::function<double(std::int64_t)> &fast_dist, double s_approx,
          const SolveOptions &opts, DiophResult &out)
{
    if (end < 1) {
        return;
    }
    const std::size_t chunks = chunk_count(1, end + 1, opts.workers);
    std::vector<std::vector<DiophSolution>> sols(chunks);
    std::vector<std::vector<SkippedCandidate>> skipped(chunks);
    const double c = pb.sys.c.to_double();
    parallel_chunks(1, end + 1, opts.workers, [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t n = lo; n < hi; ++n) {
            if (may_pass(fast_dist(n), c, s_approx, n)) {
                test_candidate(pb, n, opts.policy, SolutionSource::Scan, sols[chunk], skipped[chunk]);
            }
        }
    });
    for (auto &s : concat_chunks(std::move(sols))) {
        out.solutions.push_back(s);
    }
    for (auto &s : concat_chunks(std::move(skipped))) {
        out.skipped.push_back(std::move(s));
    }
    out.scanned_up_to = end;
}

void check_budget(std::int64_t budget, const SolveOptions &opts)
{
    if (budget < 1) {
        throw DomainError("budget must be >= 1");
    }
    if (opts.scan_cutoff < 0 || opts.max_multiple < 1) {
        throw DomainError("scan cutoff must be >= 0 and max multiple >= 1");
    }
    opts.policy.validate();
}

// Fractional part {γ m} of γ times an enclosure, as a double.
double frac_mid(const Rational &gamma, const Real &power, mpfr_prec_t bits, bool &ok)
{
    ok = true;
    if (power.exact) {
        const Rational v = gamma * *power.exact;
        return (v - Rational(v.floor())).to_double();
    }
    const auto v = mul(CertifiedValue::from_rational(gamma, bits), *power.enc, bits);
    const auto fl = v.certain_floor();
    if (!fl) {
        ok = false;
        return 0;
    }
    return sub_int(v, *fl, bits).mid();
}

} // namespace

DiophSystem DiophSystem::make(Rational a, Rational c, Rational gamma, Rational i_lo, Rational i_hi)
{
    DiophSystem s{a, c, gamma, i_lo, i_hi};
    s.validate();
    return s;
}

void DiophSystem::validate() const
{
    if (a.sign() <= 0 || a == Rational(1)) {
        throw DomainError("system needs a > 0 and a != 1, got a=" + a.str());
    }
    if (c.sign() <= 0) {
        throw DomainError("system needs c > 0, got c=" + c.str());
    }
    if (gamma.sign() == 0) {
        throw DomainError("system needs gamma != 0");
    }
    if (i_lo.sign() < 0 || i_hi > Rational(1) || !(i_lo < i_hi)) {
        throw DomainError("I = [" + i_lo.str() + ", " + i_hi.str() + ") must be a non-empty sub-interval of [0,1)");
    }
}

DiophSystem DiophSystem::middle_third() const
{
    const Rational w = (i_hi - i_lo) / Rational(3);
    return DiophSystem{a, c, gamma, i_lo + w, i_lo + w + w};
}

const char *to_string(SolutionSource s) noexcept { return s == SolutionSource::Scan ? "scan" : "convergent"; }

ContinuedFraction root_cf(const Rational &a, const Exponent &alpha, int k, const PrecisionPolicy &policy)
{
    if (auto q = root_exact(a, alpha)) {
        return cf_expand(*q, k);
    }
    return cf_expand([&](mpfr_prec_t bits) { return root_enclose(a, alpha, bits); }, k, policy);
}

Certificate verify_solution(const DiophSystem &sys, const Exponent &alpha, std::int64_t n, const PrecisionPolicy &policy)
{
    sys.validate();
    if (n < 1) {
        throw DomainError("verify_solution needs n >= 1");
    }
    policy.validate();
    const auto theta_exact = root_exact(sys.a, alpha);
    std::optional<Rational> power_exact;
    if (alpha.is_rational()) {
        if (auto v = integral_power(n, alpha.ratio().num(), alpha.ratio().den())) {
            power_exact = Rational(*v);
        }
    }
    Certificate cert;
    for (long bits = policy.start_bits;; bits = policy.next(bits)) {
        cert.precision_trace.push_back(bits);
        const mpfr_prec_t w = bits + 32;
        // θn = exp(log(a)/α + log n) and n^α = exp(α log n).
        const auto log_n = log(CertifiedValue::exact_int(n, w), w);
        Real theta_n = theta_exact ? exact_real(*theta_exact * Rational(n))
                                   : enclosed(exp(add(div(log(CertifiedValue::from_rational(sys.a, w), w),
                                                          alpha.enclose(w), w),
                                                      log_n, w),
                                                  bits));
        Real power = power_exact ? exact_real(*power_exact) : enclosed(exp(mul(alpha.enclose(w), log_n, w), bits));
        if (auto e = decide(sys, n, theta_n, power, bits)) {
            cert.norm_condition = e->norm;
            cert.frac_condition = e->frac;
            cert.norm_value = e->norm_text;
            cert.frac_value = e->frac_text;
            return cert;
        }
        if (bits >= policy.max_bits) {
            return cert;
        }
    }
}

Certificate verify_solution_two(const DiophSystem &sys, const Rational &theta, std::int64_t n,
                                const PrecisionPolicy &policy)
{
    sys.validate();
    if (n < 1) {
        throw DomainError("verify_solution needs n >= 1");
    }
    policy.validate();
    Certificate cert;
    for (long bits = policy.start_bits;; bits = policy.next(bits)) {
        cert.precision_trace.push_back(bits);
        const mpfr_prec_t w = bits + 32;
        const auto s = phi(sys.a, theta, w);
        Real power;
        if (n == 1) {
            power = exact_real(Rational(1));
        } else if (s.is_exact() && s.lo().is_integer()) {
            power = exact_real(Rational(n) * Rational(n));
        } else {
            power = enclosed(exp(mul(s, log(CertifiedValue::exact_int(n, w), w), w), bits));
        }
        if (auto e = decide(sys, n, exact_real(theta * Rational(n)), power, bits)) {
            cert.norm_condition = e->norm;
            cert.frac_condition = e->frac;
            cert.norm_value = e->norm_text;
            cert.frac_value = e->frac_text;
            return cert;
        }
        if (bits >= policy.max_bits) {
            return cert;
        }
    }
}

DiophResult solve_system_one(const DiophSystem &sys, const Exponent &alpha, std::int64_t budget,
                             const SolveOptions &opts)
{
    sys.validate();
    check_budget(budget, opts);
    const auto theta_exact = root_exact(sys.a, alpha);

    Problem pb{
        sys,
        [&](std::int64_t n, mpfr_prec_t bits) -> Real {
            if (theta_exact) {
                return exact_real(*theta_exact * Rational(n));
            }
            return enclosed(mul_int(root_enclose(sys.a, alpha, bits + 16), n, bits));
        },
        [&](std::int64_t n, mpfr_prec_t bits) -> Real {
            auto v = pow_enclose(n, alpha, bits);
            if (alpha.is_rational()) {
                if (auto e = integral_power(n, alpha.ratio().num(), alpha.ratio().den())) {
                    return exact_real(Rational(*e));
                }
            }
            return enclosed(std::move(v));
        },
        [&](std::int64_t n) { return verify_solution(sys, alpha, n); },
    };

    DiophResult out;
    const std::int64_t scan_end = std::min(budget, opts.scan_cutoff);
    const double s_approx = alpha.approx();
    if (theta_exact) {
        const Rational t = *theta_exact;
        scan(pb, scan_end, [&](std::int64_t n) { return dist_rational(t * Rational(n)).to_double(); }, s_approx, opts,
             out);
    } else {
        const auto ft = FastTheta::from(root_enclose(sys.a, alpha, 160));
        scan(pb, scan_end, [&](std::int64_t n) { return ft.dist(n); }, s_approx, opts, out);
    }

    // Beyond the scan: convergent denominators of a^(1/α) and small multiples.
    const auto cf = root_cf(sys.a, alpha, 96, opts.policy);
    std::vector<std::int64_t> cands;
    for (const auto &cv : cf.convergents) {
        if (cv.q > budget) {
            break;
        }
        Real power = pb.power(cv.q, 256);
        bool ok = false;
        const double f = frac_mid(sys.gamma, power, 256, ok);
        if (ok) {
            out.convergent_fracs.emplace_back(cv.q, f);
        }
        for (std::int64_t j = 1; j <= opts.max_multiple; ++j) {
            const __int128 m = static_cast<__int128>(cv.q) * j;
            if (m > budget) {
                break;
            }
            if (m > scan_end) {
                cands.push_back(static_cast<std::int64_t>(m));
            }
        }
    }
    std::ranges::sort(cands);
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (const auto n : cands) {
        ++out.candidates_tested;
        if (test_candidate(pb, n, opts.policy, SolutionSource::Convergent, out.solutions, out.skipped) ==
            Outcome::Accepted) {
            ++out.candidates_accepted;
        }
    }
    sort_result(out);
    return out;
}

DiophResult solve_system_two(const DiophSystem &sys, const Rational &theta, std::int64_t budget,
                             const SolveOptions &opts)
{
    sys.validate();
    check_budget(budget, opts);
    const bool below = sys.a < Rational(1);
    const bool inside = below ? (sys.a < theta && theta < Rational(1)) : (Rational(1) < theta && theta < sys.a);
    if (!inside) {
        throw DomainError("theta=" + theta.str() + " must lie strictly between a=" + sys.a.str() + " and 1");
    }
    const auto s0 = phi(sys.a, theta, 128);
    const bool s_is_two = s0.is_exact() && s0.lo().is_integer();

    Problem pb{
        sys,
        [&](std::int64_t n, mpfr_prec_t) { return exact_real(theta * Rational(n)); },
        [&](std::int64_t n, mpfr_prec_t bits) -> Real {
            if (n == 1) {
                return exact_real(Rational(1));
            }
            if (s_is_two) {
                return exact_real(Rational(checked_mul(n, n)));
            }
            const mpfr_prec_t w = bits + 32;
            return enclosed(pow(CertifiedValue::exact_int(n, w), phi(sys.a, theta, w), bits));
        },
        [&](std::int64_t n) { return verify_solution_two(sys, theta, n); },
    };

    const std::int64_t t1 = theta.num();
    const std::int64_t t2 = theta.den();
    auto exact_dist = [&](std::int64_t n) {
        const auto r = static_cast<std::int64_t>((static_cast<__int128>(t1) * n) % t2);
        return static_cast<double>(std::min(r, t2 - r)) / static_cast<double>(t2);
    };

    // Past n*, c/n^(φ-1) < 1/t2, so only ‖θn‖ = 0 (n ≡ 0 mod t2) can pass.
    const double s_approx = s0.mid();
    const double n_star = std::pow(sys.c.to_double() * static_cast<double>(t2), 1 / (s_approx - 1));
    std::int64_t scan_end = budget;
    if (n_star * 1.01 + 2 < static_cast<double>(budget)) {
        scan_end = std::max<std::int64_t>(std::min(budget, opts.scan_cutoff), static_cast<std::int64_t>(n_star * 1.01) + 2);
        scan_end = std::min(scan_end, budget);
    }

    DiophResult out;
    scan(pb, scan_end, exact_dist, s_approx, opts, out);
    std::int64_t first = (scan_end / t2 + 1) * t2;
    const std::size_t chunks = chunk_count(0, first <= budget ? (budget - first) / t2 + 1 : 0, opts.workers);
    std::vector<std::vector<DiophSolution>> sols(chunks);
    std::vector<std::vector<SkippedCandidate>> skipped(chunks);
    if (first <= budget) {
        parallel_chunks(0, (budget - first) / t2 + 1, opts.workers,
                        [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
                            for (std::int64_t i = lo; i < hi; ++i) {
                                test_candidate(pb, first + i * t2, opts.policy, SolutionSource::Scan, sols[chunk],
                                               skipped[chunk]);
                            }
                        });
    }
    for (auto &s : concat_chunks(std::move(sols))) {
        out.solutions.push_back(s);
    }
    for (auto &s : concat_chunks(std::move(skipped))) {
        out.skipped.push_back(std::move(s));
    }
    out.scanned_up_to = budget;
    sort_result(out);
    return out;
}

void write_dioph_csv(std::ostream &os, const DiophResult &r)
{
    os << "n,norm_bound,frac_bound,source\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (const auto &s : r.solutions) {
        line.str("");
        line << s.n << ',' << s.norm_bound << ',' << s.frac_bound << ',' << to_string(s.source) << '\n';
        os << line.str();
    }
}

} // namespace psseq
