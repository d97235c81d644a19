#include <psseq/linear_eq.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include <psseq/parallel.hpp>
#include <psseq/ps_core.hpp>

namespace psseq {

namespace {

// Inverse of a modulo m (gcd(a, m) == 1, m >= 1).
std::int64_t mod_inverse(std::int64_t a, std::int64_t m)
{
    if (m == 1) {
        return 0;
    }
    __int128 old_r = mod_floor(a, m);
    __int128 r = m;
    __int128 old_s = 1;
    __int128 s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        std::swap(old_r, r);
        r -= q * old_r;
        std::swap(old_s, s);
        s -= q * old_s;
    }
    auto inv = static_cast<std::int64_t>(old_s % m);
    return inv < 0 ? inv + m : inv;
}

// Smallest k with k^alpha >= target, and whether k^alpha < target + 1, decided
// from certified enclosures of target^(1/alpha) and (target+1)^(1/alpha).
std::optional<WindowLR> try_window(std::int64_t n, std::int64_t x, std::int64_t target, const Exponent &alpha, long bits,
                                   bool &checked_exact)
{
    auto left = root_enclose(target, alpha, bits);
    auto right = root_enclose(target + 1, alpha, bits);

    std::optional<std::int64_t> k0 = left.certain_ceil();
    std::optional<std::int64_t> right_int;
    if (right.is_exact() && right.hi().is_integer()) {
        right_int = right.certain_floor();
    }
    if (alpha.is_rational() && !checked_exact && (!k0 || !right_int)) {
        checked_exact = true;
        // target^(q/p) is an integer iff target is a perfect p-th power.
        auto exact_root = [&](std::int64_t m) -> std::optional<std::int64_t> {
            const auto c = root_ceil(m, alpha);
            const auto v = pow_certified(c, alpha);
            if (v.is_exact() && v.certain_floor() == m) {
                return c;
            }
            return std::nullopt;
        };
        if (!k0) {
            if (auto e = exact_root(target)) {
                k0 = e;
                left = CertifiedValue::exact_int(*e, bits);
            }
        }
        if (!right_int) {
            if (auto e = exact_root(target + 1)) {
                right_int = e;
                right = CertifiedValue::exact_int(*e, bits);
            }
        }
    }
    if (!k0) {
        return std::nullopt;
    }
    Tri inside;
    if (right_int) {
        inside = tri_from(*k0 < *right_int);
    } else {
        inside = less(CertifiedValue::exact_int(*k0, bits), right);
    }
    if (inside == Tri::Unknown) {
        return std::nullopt;
    }
    std::optional<std::int64_t> hit;
    if (inside == Tri::True) {
        hit = *k0;
    }
    return WindowLR{n, x, target, std::move(left), std::move(right), hit};
}

WindowLR decide_window(std::int64_t n, std::int64_t x, std::int64_t target, const Exponent &alpha,
                       const PrecisionPolicy &policy)
{
    bool checked_exact = false;
    return escalate(
        policy, [&](long bits) { return try_window(n, x, target, alpha, bits, checked_exact); }, "window");
}

bool asymptotic_regime(const LinearEq &eq, std::int64_t x)
{
    const Rational ax = eq.a() * Rational(x);
    const Rational top = ax + eq.b() + Rational(1);
    const Rational bottom = ax + eq.b();
    return top <= Rational(2) * ax && bottom >= eq.a() * Rational(x + 1) / Rational(2);
}

} // namespace

LinearEq LinearEq::make(const Rational &a, const Rational &b)
{
    if (a.sign() <= 0) {
        throw DomainError("linear equation needs a > 0, got a=" + a.str());
    }
    const Rational a2b = Rational(a.den()) * b;
    if (!a2b.is_integer()) {
        throw NotSolvableInN("y = " + a.str() + " x + " + b.str() + " has no solutions in N: a2*b is not an integer");
    }
    // a1 x + a2 b ≡ 0 (mod a2)  <=>  x ≡ -a2 b * a1^{-1} (mod a2).
    const std::int64_t a2 = a.den();
    const std::int64_t c = mod_floor(-mod_floor(a2b.num(), a2), a2);
    const std::int64_t inv = mod_inverse(a.num(), a2);
    const auto d = static_cast<std::int64_t>((static_cast<__int128>(c) * inv) % a2);
    return LinearEq(a, b, d);
}

std::optional<std::int64_t> LinearEq::image(std::int64_t x) const
{
    const Rational v = a_ * Rational(x) + b_;
    if (!v.is_integer()) {
        return std::nullopt;
    }
    return v.num();
}

std::string LinearEq::str() const { return "y = " + a_.str() + " x + " + b_.str(); }

bool residue_test(const LinearEq &eq, std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy)
{
    return mod_floor(floor_pow(n, alpha, policy), eq.a2()) == eq.residue();
}

CertifiedValue WindowLR::left_offset(const LinearEq &eq, const Exponent &alpha) const
{
    const auto prec = left.precision();
    const auto base = log(CertifiedValue::from_rational(eq.a(), prec + 32), prec + 32);
    const auto scale = exp(div(base, alpha.enclose(prec + 32), prec + 32), prec + 32);
    return sub(left, mul_int(scale, n, prec + 32), prec);
}

CertifiedValue WindowLR::right_offset(const LinearEq &eq, const Exponent &alpha) const
{
    const auto prec = right.precision();
    const auto base = log(CertifiedValue::from_rational(eq.a(), prec + 32), prec + 32);
    const auto scale = exp(div(base, alpha.enclose(prec + 32), prec + 32), prec + 32);
    return sub(right, mul_int(scale, n, prec + 32), prec);
}

WindowLR window(const LinearEq &eq, std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy)
{
    const std::int64_t x = floor_pow(n, alpha, policy);
    if (mod_floor(x, eq.a2()) != eq.residue()) {
        throw DomainError("window: residue test fails at n=" + std::to_string(n));
    }
    const auto target = eq.image(x);
    if (!target || *target < 1) {
        throw DomainError("window: a*floor(n^alpha)+b < 1 at n=" + std::to_string(n));
    }
    return decide_window(n, x, *target, alpha, policy);
}

std::vector<SolutionRecord> solve_linear(const LinearEq &eq, const Exponent &alpha, std::int64_t n_max,
                                         unsigned workers, const PrecisionPolicy &policy)
{
    if (n_max < 1) {
        throw DomainError("solve_linear: N must be >= 1");
    }
    std::vector<std::vector<SolutionRecord>> parts(chunk_count(1, n_max + 1, workers));
    parallel_chunks(1, n_max + 1, workers, [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
        auto &out = parts[chunk];
        for (std::int64_t n = lo; n < hi; ++n) {
            const std::int64_t x = floor_pow(n, alpha, policy);
            if (mod_floor(x, eq.a2()) != eq.residue()) {
                continue;
            }
            const auto target = eq.image(x);
            if (!target || *target < 1) {
                continue;
            }
            const auto w = decide_window(n, x, *target, alpha, policy);
            if (!w.hit) {
                continue;
            }
            const std::int64_t y = *target;
            const std::int64_t k = *w.hit;
            // Independent re-verification through the inverse map.
            if (member_witness(x, alpha, policy) != n || member_witness(y, alpha, policy) != k ||
                Rational(y) != eq.a() * Rational(x) + eq.b()) {
                throw std::logic_error("solve_linear: solution failed re-verification at n=" + std::to_string(n));
            }
            out.push_back(SolutionRecord{n, x, k, y, asymptotic_regime(eq, x)});
        }
    });
    return concat_chunks(std::move(parts));
}

std::optional<std::int64_t> check_equivalence(const LinearEq &eq, const Exponent &alpha, std::int64_t n_max,
                                              unsigned workers, const PrecisionPolicy &policy)
{
    if (n_max < 1) {
        throw DomainError("check_equivalence: N must be >= 1");
    }
    const std::size_t chunks = chunk_count(1, n_max + 1, workers);
    std::vector<std::int64_t> first_bad(chunks, std::numeric_limits<std::int64_t>::max());
    parallel_chunks(1, n_max + 1, workers, [&](std::size_t chunk, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t n = lo; n < hi; ++n) {
            const std::int64_t x = floor_pow(n, alpha, policy);

            // Direct side: exact rational image, then membership via the inverse map.
            const Rational image = eq.a() * Rational(x) + eq.b();
            const bool direct = image.is_integer() && image.num() >= 1 && is_member(image.num(), alpha, policy);

            // Reduction side: residue class of floor(n^alpha), then J_n ∩ N.
            bool reduced = mod_floor(x, eq.a2()) == eq.residue();
            if (reduced) {
                const auto target = eq.image(x);
                reduced = target && *target >= 1 && decide_window(n, x, *target, alpha, policy).hit.has_value();
            }
            if (direct != reduced) {
                first_bad[chunk] = n;
                return;
            }
        }
    });
    const auto worst = *std::ranges::min_element(first_bad);
    if (worst == std::numeric_limits<std::int64_t>::max()) {
        return std::nullopt;
    }
    return worst;
}

CountFit fit_counts(std::vector<std::int64_t> checkpoints, std::vector<std::int64_t> counts, std::int64_t min_count)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (counts[i] >= min_count) {
            xs.push_back(std::log(static_cast<double>(checkpoints[i])));
            ys.push_back(std::log(static_cast<double>(counts[i])));
        }
    }
    if (xs.size() < 3) {
        throw InsufficientData("count_fit: fewer than 3 checkpoints with at least " + std::to_string(min_count) +
                               " solutions");
    }
    const auto k = static_cast<double>(xs.size());
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0;
    double sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double ssr = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        ssr += r * r;
    }
    const double se = std::sqrt(ssr / (k - 2) / sxx);
    return CountFit{std::move(checkpoints), std::move(counts), slope, se, xs.size()};
}

CountFit count_fit(const LinearEq &eq, const Exponent &alpha, std::vector<std::int64_t> checkpoints, unsigned workers,
                   const PrecisionPolicy &policy)
{
    if (checkpoints.size() < 3) {
        throw DomainError("count_fit needs at least 3 checkpoints");
    }
    if (!std::ranges::is_sorted(checkpoints) || checkpoints.front() < 1 ||
        std::ranges::adjacent_find(checkpoints) != checkpoints.end()) {
        throw DomainError("count_fit checkpoints must be positive and strictly ascending");
    }
    const auto sols = solve_linear(eq, alpha, checkpoints.back(), workers, policy);
    std::vector<std::int64_t> counts;
    counts.reserve(checkpoints.size());
    for (const auto c : checkpoints) {
        const auto it = std::ranges::upper_bound(sols, c, {}, &SolutionRecord::n);
        counts.push_back(it - sols.begin());
    }
    return fit_counts(std::move(checkpoints), std::move(counts));
}

std::vector<XYZTriple> solve_xyz(const Exponent &alpha, std::int64_t n_max, const PrecisionPolicy &policy)
{
    if (n_max < 1) {
        throw DomainError("solve_xyz: N must be >= 1");
    }
    std::vector<std::int64_t> xs(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n) {
        xs[static_cast<std::size_t>(n - 1)] = floor_pow(n, alpha, policy);
    }
    const auto w = ps_window(alpha, checked_mul(2, xs.back()), 1, policy);
    std::vector<XYZTriple> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i; j < xs.size(); ++j) {
            const std::int64_t z = xs[i] + xs[j];
            if (w.contains(z)) {
                out.push_back({xs[i], xs[j], z});
            }
        }
    }
    return out;
}

void write_solutions_csv(std::ostream &os, const std::vector<SolutionRecord> &sols)
{
    os << "n,x,k,y\n";
    for (const auto &s : sols) {
        os << s.n << ',' << s.x << ',' << s.k << ',' << s.y << '\n';
    }
}

void write_count_fit_json(std::ostream &os, const CountFit &fit)
{
    nlohmann::json j;
    j["checkpoints"] = fit.checkpoints;
    j["counts"] = fit.counts;
    j["slope"] = fit.slope;
    j["stderr"] = fit.stderr_;
    os << j.dump(2) << '\n';
}

} // namespace psseq
