#include <psseq/equidist.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <psseq/parallel.hpp>

namespace psseq {

namespace {

// Rational lower and upper bounds for √a would do, but comparing squares is exact.
bool below_sqrt(const Rational &x, const Rational &a) { return x.sign() <= 0 || x * x < a; }
bool above_sqrt(const Rational &x, const Rational &a) { return x.sign() > 0 && x * x > a; }

CertifiedValue exact_double(double x, mpfr_prec_t prec)
{
    BigFloat v(std::max<mpfr_prec_t>(prec, 64));
    mpfr_set_d(v.get(), x, MPFR_RNDN);
    BigFloat w = v;
    return {std::move(v), std::move(w), true};
}

double sign_of(const CertifiedValue &v)
{
    if (mpfr_sgn(v.lo().get()) > 0) {
        return 1;
    }
    if (mpfr_sgn(v.hi().get()) < 0) {
        return -1;
    }
    return 0;
}

} // namespace

void check_eta_range(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2)
{
    if (a.sign() <= 0 || a == Rational(1)) {
        throw DomainError("a must be positive and != 1, got " + a.str());
    }
    if (gamma.sign() == 0) {
        throw DomainError("gamma must be nonzero");
    }
    if (!(eta1 < eta2)) {
        throw DomainError("need eta1 < eta2");
    }
    // min(√a, a) < η1 < η2 < max(√a, a)
    const bool ok = a < Rational(1) ? (a < eta1 && below_sqrt(eta2, a)) : (above_sqrt(eta1, a) && eta2 < a);
    if (!ok) {
        throw DomainError("(eta1, eta2) = (" + eta1.str() + ", " + eta2.str() +
                          ") must lie strictly between sqrt(a) and a for a=" + a.str());
    }
}

SamplePoints equid_sample(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                          std::int64_t n, unsigned workers, const PrecisionPolicy &policy)
{
    check_eta_range(a, gamma, eta1, eta2);
    if (n < 1) {
        throw DomainError("equid_sample needs n >= 1");
    }
    policy.validate();
    const std::int64_t m_lo = (eta1 * Rational(n)).floor() + 1;
    const std::int64_t m_hi = (eta2 * Rational(n)).ceil() - 1;

    SamplePoints out{a, gamma, eta1, eta2, n, std::max<std::int64_t>(0, m_hi - m_lo + 1), {}, {}};
    if (out.count == 0) {
        return out;
    }
    const std::size_t chunks = chunk_count(m_lo, m_hi + 1, workers);
    std::vector<std::vector<double>> pts(chunks);
    std::vector<std::vector<std::int64_t>> bad(chunks);
    parallel_chunks(m_lo, m_hi + 1, workers, [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t m = lo; m < hi; ++m) {
            const Rational theta(m, n);
            try {
                const double f = escalate(
                    policy,
                    [&](long bits) -> std::optional<double> {
                        const mpfr_prec_t w = bits + 32;
                        const auto s = phi(a, theta, w);
                        const auto v = mul(CertifiedValue::from_rational(gamma, w),
                                           pow(CertifiedValue::exact_int(n, w), s, w), bits);
                        const auto fl = v.certain_floor();
                        if (!fl) {
                            return std::nullopt;
                        }
                        const auto fr = sub_int(v, *fl, bits);
                        // Certified to well below double resolution.
                        if (fr.width() > 0x1p-60) {
                            return std::nullopt;
                        }
                        return fr.mid();
                    },
                    "sample point");
                pts[chunk].push_back(f);
            } catch (const PrecisionExhausted &) {
                bad[chunk].push_back(m);
            }
        }
    });
    out.points = concat_chunks(std::move(pts));
    out.flagged = concat_chunks(std::move(bad));
    return out;
}

double star_discrepancy(std::span<const double> points)
{
    if (points.empty()) {
        throw EmptyInput("star discrepancy of an empty point set");
    }
    std::vector<double> x(points.begin(), points.end());
    std::ranges::sort(x);
    const auto n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        d = std::max({d, k / n - x[i], x[i] - (k - 1) / n});
    }
    return d;
}

double weyl_sum(std::int64_t b, std::span<const double> points)
{
    if (b == 0) {
        throw DomainError("weyl_sum needs b != 0");
    }
    if (points.empty()) {
        throw EmptyInput("weyl sum of an empty point set");
    }
    double re = 0;
    double im = 0;
    for (const double x : points) {
        const double t = std::fmod(static_cast<double>(b) * x, 1.0);
        re += std::cos(2 * std::numbers::pi * t);
        im += std::sin(2 * std::numbers::pi * t);
    }
    const auto n = static_cast<double>(points.size());
    return std::min(1.0, std::hypot(re, im) / n);
}

GFunctions GFunctions::make(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                            std::int64_t n)
{
    check_eta_range(a, gamma, eta1, eta2);
    if (n < 1) {
        throw DomainError("g_n needs n >= 1");
    }
    GFunctions g;
    g.a_ = a;
    g.gamma_ = gamma;
    g.eta1_ = eta1;
    g.eta2_ = eta2;
    g.n_ = n;
    g.offset_ = (eta1 * Rational(n)).floor();
    const std::int64_t m_hi = (eta2 * Rational(n)).ceil() - 1;
    g.count_ = std::max<std::int64_t>(0, m_hi - g.offset_);
    return g;
}

void GFunctions::check_x(double x) const
{
    // η1 n < x + ⌊η1 n⌋ < η2 n, checked exactly.
    BigFloat v(256);
    mpfr_set_d(v.get(), x, MPFR_RNDN);
    mpfr_add_si(v.get(), v.get(), offset_, MPFR_RNDN);
    if (!std::isfinite(x) || compare(v, eta1_ * Rational(n_)) <= 0 || compare(v, eta2_ * Rational(n_)) >= 0) {
        std::ostringstream os;
        os << std::setprecision(17) << "x=" << x << " puts (x + floor(eta1 n))/n outside (eta1, eta2)";
        throw DomainError(os.str());
    }
}

CertifiedValue GFunctions::u_of(double x, mpfr_prec_t prec) const
{
    const auto num = add(exact_double(x, prec + 64), CertifiedValue::exact_int(offset_, prec + 64), prec + 64);
    return div(num, CertifiedValue::exact_int(n_, prec), prec);
}

CertifiedValue GFunctions::g(double x, mpfr_prec_t prec) const
{
    check_x(x);
    const mpfr_prec_t w = prec + 32;
    const auto u = u_of(x, w);
    const auto s = phi(log(CertifiedValue::from_rational(a_, w), w), u, w);
    const auto h = mul(log(CertifiedValue::exact_int(n_, w), w), s, w);
    return mul(CertifiedValue::from_rational(gamma_, w), exp(h, w), prec);
}

CertifiedValue GFunctions::g_diff(double x, double h, mpfr_prec_t prec) const
{
    if (h == 0) {
        check_x(x);
        return CertifiedValue::exact_int(0, prec);
    }
    return sub(g(x + h, prec + 16), g(x, prec + 16), prec);
}

GFunctions::Derivatives GFunctions::derivatives(double x, mpfr_prec_t prec) const
{
    check_x(x);
    const mpfr_prec_t w = prec + 48;
    auto k = [&](std::int64_t v) { return CertifiedValue::exact_int(v, w); };

    const auto u = u_of(x, w);
    const auto A = log(CertifiedValue::from_rational(a_, w), w);
    const auto l = log(u, w);
    const auto L = log(k(n_), w);
    const auto nn = k(n_);

    const auto l2 = mul(l, l, w);
    const auto l3 = mul(l2, l, w);
    const auto l4 = mul(l3, l, w);
    const auto u2 = mul(u, u, w);
    const auto u3 = mul(u2, u, w);

    const auto phi0 = div(A, l, w);
    const auto phi1 = neg(div(A, mul(u, l2, w), w));
    const auto phi2 = div(mul(A, add(l, k(2), w), w), mul(u2, l3, w), w);
    const auto poly = add(add(mul_int(l2, 2, w), mul_int(l, 6, w), w), k(6), w);
    const auto phi3 = neg(div(mul(A, poly, w), mul(u3, l4, w), w));

    const auto Ln = div(L, nn, w);
    const auto h1 = mul(Ln, phi1, w);
    const auto h2 = div(mul(Ln, phi2, w), nn, w);
    const auto h3 = div(div(mul(Ln, phi3, w), nn, w), nn, w);

    const auto g0 = mul(CertifiedValue::from_rational(gamma_, w), exp(mul(L, phi0, w), w), w);
    const auto h1sq = mul(h1, h1, w);
    const auto h1cu = mul(h1sq, h1, w);

    return Derivatives{
        CertifiedValue(g0.lo(), g0.hi(), g0.is_exact()),
        mul(g0, h1, prec),
        mul(g0, add(h2, h1sq, w), prec),
        mul(g0, add(add(h3, mul_int(mul(h1, h2, w), 3, w), w), h1cu, w), prec),
        mul(g0, h1cu, prec),
    };
}

BandReport third_derivative_band(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                                 const std::vector<std::int64_t> &n_grid, const std::vector<double> &x_grid)
{
    check_eta_range(a, gamma, eta1, eta2);
    if (n_grid.empty() || x_grid.empty()) {
        throw EmptyInput("third_derivative_band needs nonempty grids");
    }
    for (const double t : x_grid) {
        if (!(t >= 0 && t <= 1)) {
            throw DomainError("x-grid entries are relative positions in [0,1]");
        }
    }
    BandReport rep{};
    const double s_a = phi(a, eta1).mid();
    const double s_b = phi(a, eta2).mid();
    rep.sigma1 = std::min(s_a, s_b);
    rep.sigma2 = std::max(s_a, s_b);

    std::vector<std::int64_t> ns = n_grid;
    std::ranges::sort(ns);
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (const auto n : ns) {
        const auto G = GFunctions::make(a, gamma, eta1, eta2, n);
        if (G.count() < 1) {
            throw DomainError("no m with m/n in (eta1, eta2) at n=" + std::to_string(n));
        }
        BandRow row{n, INFINITY, 0, true, true};
        const double logn = std::log(static_cast<double>(n));
        for (const double t : x_grid) {
            const double x = 1 + t * static_cast<double>(G.count() - 1);
            const auto d = G.derivatives(x);
            const double d3 = d.d3.mid();
            const double lead = d.leading.mid();
            const double s3 = sign_of(d.d3);
            if (s3 == 0 || s3 != sign_of(d.leading)) {
                row.single_sign = false;
            }
            if (std::fabs(d3 - lead) > 0.5 * std::fabs(lead)) {
                row.leading_dominates = false;
            }
            const double la = std::log(std::fabs(d3)) - 3 * std::log(logn);
            row.min_ratio_lo = std::min(row.min_ratio_lo, std::exp(la + (3 - rep.sigma1) * logn));
            row.max_ratio_hi = std::max(row.max_ratio_hi, std::exp(la + (3 - rep.sigma2) * logn));
        }
        rep.rows.push_back(row);
    }
    // n0: start of the longest good suffix of the grid.
    std::size_t start = rep.rows.size();
    while (start > 0 && rep.rows[start - 1].single_sign && rep.rows[start - 1].leading_dominates) {
        --start;
    }
    if (start < rep.rows.size()) {
        rep.n0 = rep.rows[start].n;
        rep.c1 = INFINITY;
        for (std::size_t i = start; i < rep.rows.size(); ++i) {
            rep.c1 = std::min(rep.c1, rep.rows[i].min_ratio_lo);
            rep.c2 = std::max(rep.c2, rep.rows[i].max_ratio_hi);
        }
        rep.feasible = rep.c1 > 0 && std::isfinite(rep.c1) && std::isfinite(rep.c2);
    }
    return rep;
}

EquidRow equid_row(const SamplePoints &s)
{
    EquidRow r{s.n, s.count, 0, {0, 0, 0}};
    if (!s.points.empty()) {
        r.discrepancy = star_discrepancy(s.points);
        for (int b = 1; b <= 3; ++b) {
            r.weyl[b - 1] = weyl_sum(b, s.points);
        }
    }
    return r;
}

void write_equid_csv(std::ostream &os, const std::vector<EquidRow> &rows)
{
    os << "n,N_n,star_discrepancy,weyl_b1,weyl_b2,weyl_b3\n";
    std::ostringstream line;
    line << std::setprecision(12);
    for (const auto &r : rows) {
        line.str("");
        line << r.n << ',' << r.count << ',' << r.discrepancy << ',' << r.weyl[0] << ',' << r.weyl[1] << ','
             << r.weyl[2] << '\n';
        os << line.str();
    }
}

} // namespace psseq
