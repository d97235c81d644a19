#ifndef PSSEQ_PS_CORE_HPP
#define PSSEQ_PS_CORE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <psseq/certified.hpp>

namespace psseq {

// PS(alpha) ∩ [1, limit]. Because consecutive values of n^alpha differ by
// more than 1, n -> floor(n^alpha) is strictly increasing, so the member at
// index i has witness n = i + 1.
class PSWindow {
public:
    PSWindow(Exponent alpha, std::int64_t limit, std::vector<std::int64_t> members);

    const Exponent &alpha() const noexcept { return alpha_; }
    std::int64_t limit() const noexcept { return limit_; }
    std::span<const std::int64_t> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }

    bool contains(std::int64_t m) const;
    // The n with floor(n^alpha) == m, if m is a member.
    std::optional<std::int64_t> witness(std::int64_t m) const;
    static std::int64_t witness_at(std::size_t index) noexcept { return static_cast<std::int64_t>(index) + 1; }

    // CSV with header "n,m".
    void write_csv(std::ostream &os) const;

private:
    Exponent alpha_;
    std::int64_t limit_;
    std::vector<std::int64_t> members_;
};

PSWindow ps_window(const Exponent &alpha, std::int64_t limit, unsigned workers = 1,
                   const PrecisionPolicy &policy = {});

// Membership through the inverse map: m ∈ PS(alpha) iff
// floor(ceil(m^(1/alpha))^alpha) == m.
bool is_member(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy = {});
std::optional<std::int64_t> member_witness(std::int64_t m, const Exponent &alpha, const PrecisionPolicy &policy = {});

// z, z+step, ..., z+(length-1)*step all in PS(alpha). make() re-checks every
// term with is_member and throws DomainError otherwise.
struct APRecord {
    std::int64_t start;
    std::int64_t step;
    std::int64_t length;

    static APRecord make(const Exponent &alpha, std::int64_t start, std::int64_t step, std::int64_t length);
    std::int64_t term(std::int64_t i) const { return start + i * step; }
};

std::optional<APRecord> find_ap(const Exponent &alpha, std::int64_t step, std::int64_t length, std::int64_t bound);

// FS(x, x, z) = {x, 2x, z, z+x, z+2x} ⊆ PS(alpha).
struct FS3Witness {
    std::int64_t x;
    std::int64_t z;

    std::array<std::int64_t, 5> values() const { return {x, 2 * x, z, z + x, z + 2 * x}; }
};

// Smallest x (then smallest z) with all five values <= bound.
std::optional<FS3Witness> find_fs3(const Exponent &alpha, std::int64_t bound);

struct GapStats {
    std::vector<std::int64_t> gaps;
    std::int64_t min;
    std::int64_t max;
    double mean;
};

GapStats gap_stats(const PSWindow &w);

} // namespace psseq

#endif
