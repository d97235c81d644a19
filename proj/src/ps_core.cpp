#include <psseq/ps_core.hpp>

#include <algorithm>

#include <psseq/parallel.hpp>

namespace psseq {

PSWindow::PSWindow(Exponent alpha, std::int64_t limit, std::vector<std::int64_t> members)
    : alpha_(std::move(alpha)), limit_(limit), members_(std::move(members))
{
}

bool PSWindow::contains(std::int64_t m) const { return std::ranges::binary_search(members_, m); }

std::optional<std::int64_t> PSWindow::witness(std::int64_t m) const
{
    const auto it = std::ranges::lower_bound(members_, m);
    if (it == members_.end() || *it != m) {
        return std::nullopt;
    }
    return witness_at(static_cast<std::size_t>(it - members_.begin()));
}

void PSWindow::write_csv(std::ostream &os) const
{
    os << "n,m\n";
    for (std::size_t i = 0; i < members_.size(); ++i) {
        os << witness_at(i) << ',' << members_[i] << '\n';
    }
}

PSWindow ps_window(const Exponent &alpha, std::int64_t limit, unsigned workers, const PrecisionPolicy &policy)
{
    if (limit < 1) {
        throw DomainError("window limit must be >= 1");
    }
    // Largest n with floor(n^alpha) <= limit, i.e. n^alpha < limit + 1.
    const std::int64_t n_max = root_ceil(checked_add(limit, 1), alpha, policy) - 1;
    std::vector<std::int64_t> members(static_cast<std::size_t>(n_max));
    parallel_chunks(1, n_max + 1, workers, [&](std::size_t, std::int64_t lo, std::int64_t hi) {
        for (std::int64_t n = lo; n < hi; ++n) {
            members[static_cast<std::size_t>(n - 1)] = floor_pow(n, alpha, policy);
        }
    });
    return PSWindow(alpha, limit, std::move(members));
}

std::optional<std::int64_t> member_witness(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy)
{
    if (m < 1) {
        throw DomainError("membership query needs m >= 1");
    }
    const std::int64_t k = root_ceil(m, alpha, policy);
    if (floor_pow(k, alpha, policy) == m) {
        return k;
    }
    return std::nullopt;
}

bool is_member(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy)
{
    return member_witness(m, alpha, policy).has_value();
}

APRecord APRecord::make(const Exponent &alpha, std::int64_t start, std::int64_t step, std::int64_t length)
{
    if (step < 1 || length < 1) {
        throw DomainError("arithmetic progression needs step >= 1 and length >= 1");
    }
    for (std::int64_t i = 0; i < length; ++i) {
        const std::int64_t t = checked_add(start, checked_mul(i, step));
        if (t < 1 || !is_member(t, alpha)) {
            throw DomainError("term " + std::to_string(t) + " of the progression is not in PS(" + alpha.str() + ")");
        }
    }
    return APRecord{start, step, length};
}

std::optional<APRecord> find_ap(const Exponent &alpha, std::int64_t step, std::int64_t length, std::int64_t bound)
{
    if (step < 1) {
        throw DomainError("find_ap: step must be >= 1");
    }
    if (length < 2) {
        throw DomainError("find_ap: length must be >= 2");
    }
    if (bound < 1) {
        return std::nullopt;
    }
    const std::int64_t reach = checked_add(bound, checked_mul(length - 1, step));
    const auto w = ps_window(alpha, reach);
    for (const std::int64_t z : w.members()) {
        if (z > bound) {
            break;
        }
        bool ok = true;
        for (std::int64_t i = 1; i < length && ok; ++i) {
            ok = w.contains(z + i * step);
        }
        if (ok) {
            return APRecord::make(alpha, z, step, length);
        }
    }
    return std::nullopt;
}

std::optional<FS3Witness> find_fs3(const Exponent &alpha, std::int64_t bound)
{
    if (bound < 1) {
        return std::nullopt;
    }
    const auto w = ps_window(alpha, bound);
    const auto members = w.members();
    for (const std::int64_t x : members) {
        if (x > bound / 2) {
            break;
        }
        if (!w.contains(2 * x)) {
            continue;
        }
        for (const std::int64_t z : members) {
            if (z > bound - 2 * x) {
                break;
            }
            if (w.contains(z + x) && w.contains(z + 2 * x)) {
                const FS3Witness fs{x, z};
                for (const auto v : fs.values()) {
                    if (!is_member(v, alpha)) {
                        throw DomainError("FS3 witness failed independent re-verification at " + std::to_string(v));
                    }
                }
                return fs;
            }
        }
    }
    return std::nullopt;
}

GapStats gap_stats(const PSWindow &w)
{
    const auto m = w.members();
    if (m.size() < 2) {
        throw TooFewMembers("gap statistics need at least two members");
    }
    GapStats s{{}, 0, 0, 0.0};
    s.gaps.reserve(m.size() - 1);
    for (std::size_t i = 1; i < m.size(); ++i) {
        s.gaps.push_back(m[i] - m[i - 1]);
    }
    s.min = *std::ranges::min_element(s.gaps);
    s.max = *std::ranges::max_element(s.gaps);
    s.mean = static_cast<double>(m.back() - m.front()) / static_cast<double>(s.gaps.size());
    return s;
}

} // namespace psseq
