#include <psseq/measure.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

#include <psseq/parallel.hpp>

namespace psseq {

namespace {

constexpr mpfr_prec_t kPrec = IntervalSet::kPrecision;

bool sq_less(const Rational &x, const Rational &a) { return x * x < a; }
bool sq_greater(const Rational &x, const Rational &a) { return x * x > a; }

bool strictly_between_a_and_1(const Rational &x, const Rational &a)
{
    return a < Rational(1) ? (a < x && x < Rational(1)) : (Rational(1) < x && x < a);
}

bool is_whole_I(const DiophSystem &sys) { return sys.i_lo == Rational(0) && sys.i_hi == Rational(1); }

struct Inverter {
    const MetricalParams &p;
    std::int64_t n;
    PrecisionPolicy policy;
    // log a and log n, cached per working precision.
    mutable std::vector<std::pair<mpfr_prec_t, std::pair<CertifiedValue, CertifiedValue>>> logs;

    const std::pair<CertifiedValue, CertifiedValue> &logs_at(mpfr_prec_t w) const
    {
        for (const auto &[prec, v] : logs) {
            if (prec == w) {
                return v;
            }
        }
        logs.emplace_back(w, std::pair{log(CertifiedValue::from_rational(p.sys.a, w), w),
                                       log(CertifiedValue::exact_int(n, w), w)});
        return logs.back().second;
    }

    // γ n^φ_a(θ) for θ given exactly by a stored endpoint value.
    CertifiedValue y_at(const BigFloat &theta, mpfr_prec_t w) const
    {
        const CertifiedValue th(theta, theta, true);
        const auto &[la, ln] = logs_at(w);
        const auto s = phi(la, th, w);
        return mul(CertifiedValue::from_rational(p.sys.gamma, w), exp(mul(s, ln, w), w), w);
    }

    // θ with γ n^φ_a(θ) = v, i.e. θ = exp(log a log n / log(v/γ)).
    Endpoint invert(const Rational &v) const
    {
        return escalate(
            policy,
            [&](long bits) -> std::optional<Endpoint> {
                const mpfr_prec_t w = static_cast<mpfr_prec_t>(bits) + 96;
                const auto &[la, ln] = logs_at(w);
                const auto lr = log(CertifiedValue::from_rational(v / p.sys.gamma, w), w);
                const auto th = exp(div(mul(la, ln, w), lr, w), w);
                if (th.width() > std::ldexp(1.0, -static_cast<int>(kPrec) + 8)) {
                    return std::nullopt;
                }
                Endpoint e{BigFloat(kPrec), 0};
                mpfr_add(e.value.get(), th.lo().get(), th.hi().get(), MPFR_RNDN);
                mpfr_div_2ui(e.value.get(), e.value.get(), 1, MPFR_RNDN);
                e.err = th.width() + std::ldexp(1.0, 1 - static_cast<int>(kPrec));
                return e;
            },
            "set_F endpoint");
    }
};

std::int64_t floor_of(const BigFloat &x)
{
    BigFloat f(std::max<mpfr_prec_t>(x.precision(), 64));
    mpfr_floor(f.get(), x.get());
    return mpfr_get_sj(f.get(), MPFR_RNDD);
}

} // namespace

MetricalParams MetricalParams::make(DiophSystem sys, Rational theta1, Rational theta2, Rational eta)
{
    MetricalParams p{std::move(sys), theta1, theta2, eta};
    p.validate();
    return p;
}

void MetricalParams::validate() const
{
    sys.validate();
    if (!(theta1 < theta2)) {
        throw DomainError("need theta1 < theta2");
    }
    if (!strictly_between_a_and_1(theta1, sys.a) || !strictly_between_a_and_1(theta2, sys.a)) {
        throw DomainError("(theta1, theta2) must lie strictly between a=" + sys.a.str() + " and 1");
    }
    if (sq_greater(theta2, sys.a) && sq_less(theta1, sys.a)) {
        throw DomainError("(theta1, theta2) must not contain sqrt(a)");
    }
    if (eta != Rational(0)) {
        const Rational bound = std::min({theta1, Rational(1) - theta2, (theta2 - theta1) / Rational(3)});
        if (eta.sign() <= 0 || !(eta < bound)) {
            throw DomainError("need 0 < eta < min(theta1, 1 - theta2, (theta2 - theta1)/3) = " + bound.str());
        }
    }
}

bool MetricalParams::solvable_side() const
{
    return sys.a < Rational(1) ? !sq_greater(theta2, sys.a) : !sq_less(theta1, sys.a);
}

Rational psi(std::int64_t n)
{
    if (n < 1) {
        throw DomainError("psi needs n >= 1");
    }
    return {1, n};
}

IndexSets index_sets(std::int64_t n, const MetricalParams &p)
{
    if (n < 1) {
        throw DomainError("index sets need n >= 1");
    }
    if (p.eta.sign() <= 0) {
        throw DomainError("index sets need eta > 0");
    }
    const Rational nn(n);
    auto range = [&](const Rational &lo, const Rational &hi) {
        return IndexRange{(lo * nn).floor() + 1, (hi * nn).ceil() - 1};
    };
    return {range(p.theta1 + p.eta, p.theta2 - p.eta), range(p.theta1 - p.eta, p.theta2 + p.eta)};
}

IntervalSet set_E(std::int64_t n, const MetricalParams &p)
{
    p.validate();
    if (n < 1) {
        throw DomainError("set_E needs n >= 1");
    }
    const Rational nn(n);
    const std::int64_t m_lo = (p.theta1 * nn).floor() - 1;
    const std::int64_t m_hi = (p.theta2 * nn).ceil() + 1;
    const std::int64_t n2 = checked_mul(n, n);
    std::vector<Interval> parts;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        const std::int64_t c = checked_mul(m, n);
        parts.push_back({Endpoint::from_rational(Rational(c - 1, n2)), Endpoint::from_rational(Rational(c + 1, n2)),
                         true, true});
    }
    return intersect(IntervalSet(std::move(parts)), IntervalSet::open(p.theta1, p.theta2));
}

IntervalSet set_F_on(std::int64_t n, const MetricalParams &p, const IntervalSet &domain, const PrecisionPolicy &policy)
{
    p.validate();
    policy.validate();
    if (n < 2) {
        throw DomainError("set_F needs n >= 2");
    }
    const IntervalSet dom = intersect(domain, IntervalSet::open(p.theta1, p.theta2));
    if (is_whole_I(p.sys) || dom.empty()) {
        return dom;
    }
    const Inverter inv{p, n, policy};
    // y = γ n^φ_a(θ) is increasing in θ iff (a < 1) == (γ > 0).
    const bool increasing = (p.sys.a < Rational(1)) == (p.sys.gamma.sign() > 0);
    // The y-range only has to locate the integers k; endpoints are inverted at full precision.
    constexpr mpfr_prec_t w = 128;

    std::vector<Interval> parts;
    for (const auto &comp : dom.components()) {
        const auto yl = inv.y_at(comp.left.value, w);
        const auto yr = inv.y_at(comp.right.value, w);
        const BigFloat &ymin = yl.lo() < yr.lo() ? yl.lo() : yr.lo();
        const BigFloat &ymax = yl.hi() > yr.hi() ? yl.hi() : yr.hi();

        // θ-endpoint for a y-boundary; values outside the y-range of the
        // component map to the component's own ends.
        auto theta_of = [&](const Rational &v) -> Endpoint {
            if (compare(ymin, v) > 0) {
                return increasing ? comp.left : comp.right;
            }
            if (compare(ymax, v) < 0) {
                return increasing ? comp.right : comp.left;
            }
            return inv.invert(v);
        };

        const std::int64_t k_lo = floor_of(ymin) - 1;
        const std::int64_t k_hi = floor_of(ymax) + 1;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const Rational v1 = Rational(k) + p.sys.i_lo;
            const Rational v2 = Rational(k) + p.sys.i_hi;
            if (compare(ymax, v1) < 0 || compare(ymin, v2) >= 0) {
                continue;
            }
            Endpoint t1 = theta_of(v1);
            Endpoint t2 = theta_of(v2);
            // y ∈ [v1, v2)
            if (increasing) {
                parts.push_back({std::move(t1), std::move(t2), true, false});
            } else {
                parts.push_back({std::move(t2), std::move(t1), false, true});
            }
        }
    }
    return intersect(IntervalSet(std::move(parts)), dom);
}

IntervalSet set_F(std::int64_t n, const MetricalParams &p, const PrecisionPolicy &policy)
{
    return set_F_on(n, p, IntervalSet::open(p.theta1, p.theta2), policy);
}

IntervalSet set_G(std::int64_t n, const MetricalParams &p, const PrecisionPolicy &policy)
{
    if (n < 2) {
        throw DomainError("set_G needs n >= 2");
    }
    return set_F_on(n, p, set_E(n, p), policy);
}

std::vector<std::int64_t> primes_below(std::int64_t limit)
{
    std::vector<std::int64_t> out;
    if (limit <= 2) {
        return out;
    }
    std::vector<bool> composite(static_cast<std::size_t>(limit), false);
    for (std::int64_t i = 2; i < limit; ++i) {
        if (composite[static_cast<std::size_t>(i)]) {
            continue;
        }
        out.push_back(i);
        for (std::int64_t j = i * i; j < limit; j += i) {
            composite[static_cast<std::size_t>(j)] = true;
        }
    }
    return out;
}

BCStatistics bc_statistics(const MetricalParams &p, std::int64_t limit, unsigned workers,
                           const PrecisionPolicy &policy)
{
    p.validate();
    if (limit < 3) {
        throw DomainError("bc_statistics needs a prime limit >= 3");
    }
    BCStatistics out;
    out.primes = primes_below(limit);
    const auto np = static_cast<std::int64_t>(out.primes.size());
    std::vector<std::vector<IntervalSet>> parts(chunk_count(0, np, workers));
    parallel_chunks(0, np, workers, [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            parts[chunk].push_back(set_G(out.primes[static_cast<std::size_t>(i)], p, policy));
        }
    });
    const auto sets = concat_chunks(std::move(parts));
    for (const auto &g : sets) {
        out.measures.push_back(g.measure());
        out.sum += out.measures.back();
    }
    out.pair_sum = out.sum + 2 * pairwise_overlap_sum(sets);
    out.ratio = out.pair_sum > 0 ? out.sum * out.sum / out.pair_sum : 0;

    const double width = (p.theta2 - p.theta1).to_double();
    std::vector<double> r(out.measures.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = static_cast<double>(out.primes[i]) * out.measures[i] / width;
    }
    std::vector<double> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    const double target = sorted[sorted.size() / 2] / 2;
    std::size_t start = r.size();
    while (start > 0 && r[start - 1] >= target && r[start - 1] > 0) {
        --start;
    }
    if (start < r.size()) {
        out.p0 = out.primes[start];
        out.kappa = *std::min_element(r.begin() + static_cast<std::ptrdiff_t>(start), r.end());
    }
    return out;
}

std::int64_t count_primes_window(std::int64_t N, std::int64_t Q)
{
    const std::int64_t end = std::min(2 * Q, N + 1);
    std::int64_t c = 0;
    for (const auto q : primes_below(end)) {
        c += q > Q ? 1 : 0;
    }
    return c;
}

std::int64_t count_triples(std::int64_t N, std::int64_t Q, std::int64_t p, const Rational &L, const Rational &eta1,
                           const Rational &eta2)
{
    if (L.sign() <= 0) {
        throw DomainError("count_triples needs L > 0");
    }
    if (!(Rational(0) < eta1 && eta1 < eta2 && eta2 < Rational(1))) {
        throw DomainError("count_triples needs 0 < eta1 < eta2 < 1");
    }
    const auto small = primes_below(p + 1);
    if (p < 2 || small.empty() || small.back() != p || p > Q) {
        throw DomainError("count_triples needs a prime p <= Q, got p=" + std::to_string(p));
    }
    const Rational pp(p);
    const std::int64_t r_lo = (eta1 * pp).floor() + 1;
    const std::int64_t r_hi = (eta2 * pp).ceil() - 1;
    const std::int64_t end = std::min(2 * Q, N + 1);
    std::int64_t count = 0;
    for (const auto q : primes_below(end)) {
        if (q <= Q) {
            continue;
        }
        const Rational qq(q);
        for (std::int64_t r = r_lo; r <= r_hi; ++r) {
            const Rational rq(checked_mul(r, q));
            // s strictly between max(η1 q, (rq - L)/p) and min(η2 q, (rq + L)/p).
            const Rational lo = std::max(eta1 * qq, (rq - L) / pp);
            const Rational hi = std::min(eta2 * qq, (rq + L) / pp);
            count += std::max<std::int64_t>(0, hi.ceil() - lo.floor() - 1);
        }
    }
    return count;
}

TripleBound bound_check_triples(std::vector<TripleRow> grid, const Rational &eta1, const Rational &eta2,
                                double k_check)
{
    TripleBound out;
    const double width = (eta2 - eta1).to_double();
    double stt = 0;
    double stq = 0;
    double sqq = 0;
    double sct = 0;
    double scq = 0;
    for (auto &row : grid) {
        row.count = count_triples(row.N, row.Q, row.p, row.L, eta1, eta2);
        row.first_term = width * row.L.to_double() * static_cast<double>(count_primes_window(row.N, row.Q));
        const double t = row.first_term;
        const double q = static_cast<double>(row.Q);
        const double c = static_cast<double>(row.count);
        out.k_unit = std::max(out.k_unit, (c - t) / q);
        stt += t * t;
        stq += t * q;
        sqq += q * q;
        sct += c * t;
        scq += c * q;
    }
    out.rows = std::move(grid);
    const double det = stt * sqq - stq * stq;
    double c_fit = det != 0 ? (sct * sqq - scq * stq) / det : 0;
    const double k_ls = det != 0 ? (stt * scq - stq * sct) / det : 0;
    if (k_ls < 0 && stt > 0) {
        c_fit = sct / stt;
    }
    out.c_fit = std::max(0.0, c_fit);
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        const auto &row = out.rows[i];
        const double q = static_cast<double>(row.Q);
        const double c = static_cast<double>(row.count);
        out.k_fit = std::max(out.k_fit, (c - out.c_fit * row.first_term) / q);
        if (c > row.first_term + k_check * q) {
            out.violations.push_back(i);
        }
    }
    return out;
}

namespace {

struct HContext {
    BigFloat phi3;
    BigFloat theta3;
    BigFloat c;
};

HContext h_context(const Rational &theta3, const DiophSystem &sys)
{
    sys.validate();
    if (!(sys.a < Rational(1))) {
        throw DomainError("set_H needs a < 1");
    }
    if (!(theta3 < Rational(1)) || !sq_greater(theta3, sys.a)) {
        throw DomainError("set_H needs sqrt(a) < theta3 < 1");
    }
    constexpr mpfr_prec_t w = 256;
    HContext h{BigFloat(w), BigFloat::from_rational(theta3, w, MPFR_RNDN), BigFloat::from_rational(sys.c, w, MPFR_RNDN)};
    BigFloat la = BigFloat::from_rational(sys.a, w, MPFR_RNDN);
    mpfr_log(la.get(), la.get(), MPFR_RNDN);
    BigFloat lt(w);
    mpfr_log(lt.get(), h.theta3.get(), MPFR_RNDN);
    mpfr_div(h.phi3.get(), la.get(), lt.get(), MPFR_RNDN);
    if (mpfr_cmp_ui(h.phi3.get(), 2) <= 0) {
        throw DomainError("set_H needs phi_a(theta3) > 2");
    }
    return h;
}

double h_measure(std::int64_t n, const HContext &h)
{
    constexpr mpfr_prec_t w = 256;
    BigFloat rho(w);
    BigFloat t(w);
    // ρ = c n^-φ
    mpfr_set_sj(t.get(), n, MPFR_RNDN);
    mpfr_neg(rho.get(), h.phi3.get(), MPFR_RNDN);
    mpfr_pow(rho.get(), t.get(), rho.get(), MPFR_RNDN);
    mpfr_mul(rho.get(), rho.get(), h.c.get(), MPFR_RNDN);

    BigFloat full(w); // 1 - θ3
    mpfr_ui_sub(full.get(), 1, h.theta3.get(), MPFR_RNDN);
    mpfr_mul_si(t.get(), rho.get(), 2 * n, MPFR_RNDN);
    if (mpfr_cmp_ui(t.get(), 1) >= 0) {
        return full.to_double();
    }
    // Disjoint intervals [m/n - ρ, m/n + ρ]. m is fully inside (θ3, 1)
    // exactly for m_full <= m <= n - 1.
    BigFloat x(w);
    mpfr_add(x.get(), h.theta3.get(), rho.get(), MPFR_RNDN);
    mpfr_mul_si(x.get(), x.get(), n, MPFR_RNDN);
    mpfr_ceil(x.get(), x.get());
    const std::int64_t m_full = mpfr_get_sj(x.get(), MPFR_RNDN);
    BigFloat sum(w);
    if (m_full <= n - 1) {
        mpfr_mul_si(sum.get(), rho.get(), 2 * (n - m_full), MPFR_RNDN);
    }
    BigFloat lo(w);
    BigFloat hi(w);
    auto clipped = [&](std::int64_t m) {
        mpfr_set_sj(t.get(), m, MPFR_RNDN);
        mpfr_div_si(t.get(), t.get(), n, MPFR_RNDN);
        mpfr_sub(lo.get(), t.get(), rho.get(), MPFR_RNDN);
        mpfr_add(hi.get(), t.get(), rho.get(), MPFR_RNDN);
        mpfr_max(lo.get(), lo.get(), h.theta3.get(), MPFR_RNDN);
        if (mpfr_cmp_ui(hi.get(), 1) > 0) {
            mpfr_set_ui(hi.get(), 1, MPFR_RNDN);
        }
        if (mpfr_less_p(lo.get(), hi.get())) {
            mpfr_sub(t.get(), hi.get(), lo.get(), MPFR_RNDN);
            mpfr_add(sum.get(), sum.get(), t.get(), MPFR_RNDN);
        }
    };
    mpfr_mul_si(x.get(), h.theta3.get(), n, MPFR_RNDN);
    const std::int64_t m_start = floor_of(x) - 1;
    for (std::int64_t m = m_start; m < std::min(m_full, n); ++m) {
        clipped(m);
    }
    clipped(n);
    return sum.to_double();
}

} // namespace

double set_H_measure(std::int64_t n, const Rational &theta3, const DiophSystem &sys)
{
    if (n < 1) {
        throw DomainError("set_H needs n >= 1");
    }
    return h_measure(n, h_context(theta3, sys));
}

HSum set_H_sum(const Rational &theta3, const DiophSystem &sys, std::int64_t N)
{
    if (N < 1) {
        throw DomainError("set_H_sum needs N >= 1");
    }
    const auto h = h_context(theta3, sys);
    HSum out;
    out.phi3 = h.phi3.to_double();
    out.c = sys.c.to_double();
    out.one_minus_theta3 = (Rational(1) - theta3).to_double();
    out.measures.reserve(static_cast<std::size_t>(N));
    out.partial.reserve(static_cast<std::size_t>(N));
    // Summed in extended precision; individual terms are far above its ulp.
    long double s = 0;
    for (std::int64_t n = 1; n <= N; ++n) {
        const double m = h_measure(n, h);
        s += m;
        out.measures.push_back(m);
        out.partial.push_back(static_cast<double>(s));
    }
    return out;
}

double HSum::tail_bound(std::int64_t N) const
{
    const double x = static_cast<double>(N);
    return 2 * c * one_minus_theta3 * std::pow(x, 2 - phi3) / (phi3 - 2) + 4 * c * std::pow(x, 1 - phi3) / (phi3 - 1);
}

int HSum::certified_digits(std::int64_t N) const
{
    if (N < 1 || N > static_cast<std::int64_t>(partial.size())) {
        throw DomainError("certified_digits: N outside the computed range");
    }
    const double s = partial[static_cast<std::size_t>(N - 1)];
    return static_cast<int>(std::floor(std::log10(0.5 * s / tail_bound(N))));
}

std::optional<std::int64_t> HSum::stable_from(int digits) const
{
    if (partial.empty() || digits < 1) {
        return std::nullopt;
    }
    const double ref = partial.back();
    if (ref <= 0) {
        return std::nullopt;
    }
    const double unit = std::pow(10.0, std::floor(std::log10(ref)) - (digits - 1));
    const double target = std::round(ref / unit);
    std::int64_t from = static_cast<std::int64_t>(partial.size());
    while (from > 1 && std::round(partial[static_cast<std::size_t>(from - 2)] / unit) == target) {
        --from;
    }
    return from;
}

ClaimThreshold claim_threshold(const MetricalParams &p, const std::vector<std::int64_t> &n_grid,
                               const PrecisionPolicy &policy)
{
    p.validate();
    policy.validate();
    if (!(p.sys.a < Rational(1)) || !p.solvable_side()) {
        throw DomainError("claim_threshold needs a < 1 and theta2 <= sqrt(a)");
    }
    if (p.eta.sign() <= 0) {
        throw DomainError("claim_threshold needs eta > 0");
    }
    ClaimThreshold out;
    out.phi2 = phi(p.sys.a, p.theta2, 128).mid();
    const double lam = (p.sys.i_hi - p.sys.i_lo).to_double();
    const double s = 2 - out.phi2;
    const double k = lam / 3;

    // f(x) = log x - k x^s rises until x* = (1/(k s))^(1/s), then falls.
    auto f = [&](double lx) { return lx - k * std::exp(s * lx); };
    const double lstar = -std::log(k * s) / s;
    if (lstar <= 0 || f(lstar) <= 0) {
        out.literal_log10_n0 = 0;
    } else {
        double lo = lstar;
        double hi = lstar + 1;
        while (f(hi) > 0) {
            hi = lo + 2 * (hi - lo);
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = (lo + hi) / 2;
            (f(mid) > 0 ? lo : hi) = mid;
        }
        out.literal_log10_n0 = hi / std::numbers::ln10;
    }

    const DiophSystem i0 = p.sys.middle_third();
    const double i_lo = p.sys.i_lo.to_double();
    const double i_hi = p.sys.i_hi.to_double();
    for (const auto n : n_grid) {
        if (n < 2) {
            throw DomainError("claim_threshold grid needs n >= 2");
        }
        const auto idx = index_sets(n, p);
        ClaimRow row{n, 0, 0, 0};
        const std::int64_t n2 = checked_mul(n, n);
        const Inverter inv{p, n, policy};
        for (std::int64_t m = idx.s.lo; m <= idx.s.hi; ++m) {
            const std::int64_t c = checked_mul(m, n);
            const auto y0 = mul(CertifiedValue::from_rational(p.sys.gamma, 192),
                                pow(CertifiedValue::exact_int(n, 192), phi(p.sys.a, Rational(m, n), 192), 192), 192);
            const auto yl = inv.y_at(BigFloat::from_rational(Rational(c - 1, n2), kPrec, MPFR_RNDN), 192);
            const auto yr = inv.y_at(BigFloat::from_rational(Rational(c + 1, n2), kPrec, MPFR_RNDN), 192);
            const double d0 = y0.mid();
            row.max_shift = std::max({row.max_shift, std::fabs(yl.mid() - d0), std::fabs(yr.mid() - d0)});
            const double f0 = d0 - std::floor(d0);
            if (!(f0 >= i0.i_lo.to_double() && f0 < i0.i_hi.to_double())) {
                continue;
            }
            ++row.hits_i0;
            const double a = std::min(yl.mid(), yr.mid());
            const double b = std::max(yl.mid(), yr.mid());
            if (std::floor(a) == std::floor(b) && a - std::floor(a) >= i_lo && b - std::floor(b) < i_hi) {
                ++row.contained;
            }
        }
        out.rows.push_back(row);
    }
    for (std::size_t i = out.rows.size(); i-- > 0;) {
        const auto &r = out.rows[i];
        if (!(r.max_shift < lam / 3 && r.contained == r.hits_i0)) {
            break;
        }
        out.empirical_n0 = r.n;
    }
    return out;
}

DichotomySummary dichotomy_scan(const DiophSystem &sys, const std::vector<Rational> &grid, std::int64_t budget,
                                const SolveOptions &opts)
{
    sys.validate();
    if (grid.empty()) {
        throw EmptyInput("dichotomy_scan needs a non-empty theta grid");
    }
    DichotomySummary out;
    for (const auto &theta : grid) {
        if (theta * theta == sys.a) {
            throw DomainError("theta = sqrt(a) is excluded from the dichotomy grid");
        }
        const bool solvable = sys.a < Rational(1) ? sq_less(theta, sys.a) : sq_greater(theta, sys.a);
        const auto res = solve_system_two(sys, theta, budget, opts);
        DichotomyRow row{theta, solvable, static_cast<std::int64_t>(res.solutions.size()),
                         static_cast<std::int64_t>(res.skipped.size()), std::nullopt};
        if (!res.solutions.empty()) {
            row.largest = res.solutions.back().n;
        }
        (solvable ? out.solvable_hits : out.unsolvable_hits) += row.hits;
        ++(solvable ? out.solvable_count : out.unsolvable_count);
        out.rows.push_back(row);
    }
    out.expected_order = out.solvable_hits >= out.unsolvable_hits;
    return out;
}

void write_dichotomy_csv(std::ostream &os, const DichotomySummary &s)
{
    os << "theta,side,hits,skipped,largest_n\n";
    for (const auto &r : s.rows) {
        os << r.theta.str() << ',' << (r.solvable_side ? "solvable" : "unsolvable") << ',' << r.hits << ','
           << r.skipped << ',';
        if (r.largest) {
            os << *r.largest;
        }
        os << '\n';
    }
}

void write_bc_csv(std::ostream &os, const BCStatistics &s)
{
    const auto flags = os.flags();
    os << "p,measure_G\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.primes.size(); ++i) {
        os << s.primes[i] << ',' << s.measures[i] << '\n';
    }
    os.flags(flags);
}

void write_hsum_csv(std::ostream &os, const HSum &h, const std::vector<std::int64_t> &checkpoints)
{
    const auto flags = os.flags();
    os << "N,measure_H,partial_sum,tail_bound\n" << std::setprecision(17);
    for (const auto N : checkpoints) {
        if (N < 1 || N > static_cast<std::int64_t>(h.partial.size())) {
            throw DomainError("checkpoint outside the computed range");
        }
        const auto i = static_cast<std::size_t>(N - 1);
        os << N << ',' << h.measures[i] << ',' << h.partial[i] << ',' << h.tail_bound(N) << '\n';
    }
    os.flags(flags);
}

} // namespace psseq
