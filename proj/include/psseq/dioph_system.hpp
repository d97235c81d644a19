#ifndef PSSEQ_DIOPH_SYSTEM_HPP
#define PSSEQ_DIOPH_SYSTEM_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <psseq/certified.hpp>
#include <psseq/continued_fraction.hpp>

namespace psseq {

// ‖θ n‖ ≤ c / n^(s-1) and {γ n^s} ∈ I = [i_lo, i_hi), where (θ, s) is
// (a^(1/α), α) for the first system and (θ, φ_a(θ)) for the second.
struct DiophSystem {
    Rational a;
    Rational c;
    Rational gamma;
    Rational i_lo;
    Rational i_hi;

    static DiophSystem make(Rational a, Rational c, Rational gamma, Rational i_lo = 0, Rational i_hi = 1);
    void validate() const;

    // Same system with I replaced by its middle third I0.
    DiophSystem middle_third() const;
};

enum class SolutionSource { Scan, Convergent };
const char *to_string(SolutionSource s) noexcept;

struct DiophSolution {
    std::int64_t n;
    double norm_bound; // upper end of the certified enclosure of ‖θ n‖
    double frac_bound; // upper end of the certified enclosure of {γ n^s}
    SolutionSource source;
};

struct SkippedCandidate {
    std::int64_t n;
    std::string reason;
};

struct DiophResult {
    std::vector<DiophSolution> solutions;
    std::vector<SkippedCandidate> skipped;
    std::int64_t scanned_up_to = 0;
    std::int64_t candidates_tested = 0; // convergent-derived candidates beyond the scan
    std::int64_t candidates_accepted = 0;
    // {γ q^s} at convergent denominators q <= budget, for exploration only.
    std::vector<std::pair<std::int64_t, double>> convergent_fracs;
};

struct SolveOptions {
    std::int64_t scan_cutoff = 1'000'000;
    int max_multiple = 8;
    unsigned workers = 1;
    PrecisionPolicy policy{};
};

// ‖a^(1/α) n‖ ≤ c/n^(α-1) and {γ n^α} ∈ I for n <= budget.
DiophResult solve_system_one(const DiophSystem &sys, const Exponent &alpha, std::int64_t budget,
                             const SolveOptions &opts = {});

// ‖θ n‖ ≤ c/n^(φ_a(θ)-1) and {γ n^φ_a(θ)} ∈ I for n <= budget, θ strictly
// between a and 1.
DiophResult solve_system_two(const DiophSystem &sys, const Rational &theta, std::int64_t budget,
                             const SolveOptions &opts = {});

struct Certificate {
    Tri norm_condition = Tri::Unknown;
    Tri frac_condition = Tri::Unknown;
    std::vector<long> precision_trace;
    std::string norm_value;
    std::string frac_value;

    bool holds() const noexcept { return norm_condition == Tri::True && frac_condition == Tri::True; }
};

// Re-evaluates both conditions at n along an evaluation path that shares no
// intermediates with the solvers. Exhausted precision is reported as Unknown.
Certificate verify_solution(const DiophSystem &sys, const Exponent &alpha, std::int64_t n,
                            const PrecisionPolicy &policy = {256, 8192, 2});
Certificate verify_solution_two(const DiophSystem &sys, const Rational &theta, std::int64_t n,
                                const PrecisionPolicy &policy = {256, 8192, 2});

// Continued fraction of a^(1/α).
ContinuedFraction root_cf(const Rational &a, const Exponent &alpha, int k, const PrecisionPolicy &policy = {});

void write_dioph_csv(std::ostream &os, const DiophResult &r);

} // namespace psseq

#endif
