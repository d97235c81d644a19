#ifndef PSSEQ_MEASURE_HPP
#define PSSEQ_MEASURE_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <psseq/dioph_system.hpp>
#include <psseq/interval_set.hpp>

namespace psseq {

// System parameters plus a θ-range (θ1, θ2) lying strictly between a and 1
// on one side of √a, and a margin η for the index sets. η = 0 means unset.
struct MetricalParams {
    DiophSystem sys;
    Rational theta1;
    Rational theta2;
    Rational eta;

    static MetricalParams make(DiophSystem sys, Rational theta1, Rational theta2, Rational eta = 0);
    void validate() const;
    // True when (θ1, θ2) lies on the side of √a where the system is solvable.
    bool solvable_side() const;
};

// ψ(n) = 1/n.
Rational psi(std::int64_t n);

// Inclusive integer ranges; empty when lo > hi.
struct IndexRange {
    std::int64_t lo;
    std::int64_t hi;
    std::int64_t size() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
};

// S_n: θ1 + η < m/n < θ2 - η.  T_n: θ1 - η < m/n < θ2 + η.
struct IndexSets {
    IndexRange s;
    IndexRange t;
};
IndexSets index_sets(std::int64_t n, const MetricalParams &p);

// E_n = {θ ∈ (θ1, θ2) : ‖θn‖ ≤ 1/n}.
IntervalSet set_E(std::int64_t n, const MetricalParams &p);
// F_n = {θ ∈ (θ1, θ2) : {γ n^φ_a(θ)} ∈ I}.
IntervalSet set_F(std::int64_t n, const MetricalParams &p, const PrecisionPolicy &policy = {});
// F_n ∩ domain, for a domain inside (θ1, θ2). Cost grows with the range of
// γ n^φ_a over the domain rather than over all of (θ1, θ2).
IntervalSet set_F_on(std::int64_t n, const MetricalParams &p, const IntervalSet &domain,
                     const PrecisionPolicy &policy = {});
// G_n = E_n ∩ F_n.
IntervalSet set_G(std::int64_t n, const MetricalParams &p, const PrecisionPolicy &policy = {});

struct GridMeasure {
    double measure;
    std::int64_t hits;
    double cell; // grid spacing
};
// Dense-grid membership estimate of a set over (θ1, θ2) using midpoints of
// `cells` equal cells.
template <class Member>
GridMeasure grid_measure(const Rational &theta1, const Rational &theta2, std::int64_t cells, Member &&member)
{
    const double lo = theta1.to_double();
    const double w = (theta2.to_double() - lo) / static_cast<double>(cells);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < cells; ++i) {
        hits += member(lo + (static_cast<double>(i) + 0.5) * w) ? 1 : 0;
    }
    return {static_cast<double>(hits) * w, hits, w};
}

std::vector<std::int64_t> primes_below(std::int64_t limit);

struct BCStatistics {
    std::vector<std::int64_t> primes;
    std::vector<double> measures; // λ(G_p)
    double sum = 0; // Σ_p λ(G_p)
    double pair_sum = 0; // Σ_{p,q} λ(G_p ∩ G_q) over ordered pairs, p = q included
    double ratio = 0; // sum² / pair_sum
    // r_p = p λ(G_p) / (θ2 - θ1). κ is the smallest r_p over the longest
    // suffix of primes on which r_p stays at least half the median r_p;
    // p0 is where that suffix starts.
    double kappa = 0;
    std::int64_t p0 = 0;
};
// Uses the primes p < limit.
BCStatistics bc_statistics(const MetricalParams &p, std::int64_t limit, unsigned workers = 1,
                           const PrecisionPolicy &policy = {});

// Triples (q, r, s) with q prime, Q < q < min(2Q, N+1), r/p and s/q in
// (η1, η2), and |sp - rq| < L.
std::int64_t count_triples(std::int64_t N, std::int64_t Q, std::int64_t p, const Rational &L, const Rational &eta1,
                           const Rational &eta2);
// Number of primes q with Q < q < min(2Q, N+1).
std::int64_t count_primes_window(std::int64_t N, std::int64_t Q);

struct TripleRow {
    std::int64_t N;
    std::int64_t Q;
    std::int64_t p;
    Rational L;
    std::int64_t count = 0;
    double first_term = 0; // (η2 - η1) L #{q}
};

struct TripleBound {
    std::vector<TripleRow> rows;
    double k_unit = 0; // smallest K with count <= first_term + K Q on every row
    double c_fit = 0; // least-squares C >= 0 in count ≈ C first_term + K Q
    double k_fit = 0; // smallest K making C = c_fit a bound on every row
    std::vector<std::size_t> violations; // rows with count > first_term + k_check Q
};
TripleBound bound_check_triples(std::vector<TripleRow> grid, const Rational &eta1, const Rational &eta2,
                                double k_check = 1);

struct HSum {
    double phi3 = 0; // φ_a(θ3)
    std::vector<double> partial; // partial[n-1] = Σ_{k<=n} λ(H_k)
    std::vector<double> measures; // λ(H_n)
    // Σ_{n>N} λ(H_n) <= tail_bound(N) by comparison with an integral.
    double tail_bound(std::int64_t N) const;
    // Largest d with tail_bound(N) < 0.5 10^-d S(N), i.e. digits of S(N)
    // that no later term can change.
    int certified_digits(std::int64_t N) const;
    // Smallest N <= horizon from which S(M) rounded to d significant digits
    // stays equal to S(horizon) rounded for every M in [N, horizon].
    std::optional<std::int64_t> stable_from(int digits) const;

    double c = 0;
    double one_minus_theta3 = 0;
};
// H_n = {θ ∈ (θ3, 1) : ‖θn‖ <= c / n^(φ_a(θ3) - 1)} for n <= N. Uses sys.a
// and sys.c; θ3 must lie in (√a, 1) with a < 1.
HSum set_H_sum(const Rational &theta3, const DiophSystem &sys, std::int64_t N);
// λ(H_n) for a single n.
double set_H_measure(std::int64_t n, const Rational &theta3, const DiophSystem &sys);

struct ClaimRow {
    std::int64_t n;
    double max_shift; // max over m ∈ S_n, θ ∈ E_{n,m} of |γ n^φ(θ) - γ n^φ(m/n)|
    std::int64_t hits_i0; // m ∈ S_n with {γ n^φ(m/n)} ∈ I0
    std::int64_t contained; // of those, how many have E_{n,m} ⊆ F_n
};

struct ClaimThreshold {
    std::vector<ClaimRow> rows;
    double phi2 = 0; // φ_a(θ2)
    // log10 of the point beyond which (log n)/n^(2 - φ2) < λ(I)/3 holds
    // for every n; it overflows 64-bit n for θ2 near √a.
    double literal_log10_n0 = 0;
    // First grid n from which max_shift < λ(I)/3 and contained == hits_i0
    // on every later grid row.
    std::optional<std::int64_t> empirical_n0;
};
ClaimThreshold claim_threshold(const MetricalParams &p, const std::vector<std::int64_t> &n_grid,
                               const PrecisionPolicy &policy = {});

struct DichotomyRow {
    Rational theta;
    bool solvable_side;
    std::int64_t hits;
    std::int64_t skipped;
    std::optional<std::int64_t> largest;
};

struct DichotomySummary {
    std::vector<DichotomyRow> rows;
    std::int64_t solvable_hits = 0;
    std::int64_t unsolvable_hits = 0;
    std::int64_t solvable_count = 0;
    std::int64_t unsolvable_count = 0;
    bool expected_order = false; // solvable_hits >= unsolvable_hits
};
DichotomySummary dichotomy_scan(const DiophSystem &sys, const std::vector<Rational> &grid, std::int64_t budget,
                                const SolveOptions &opts = {});

void write_dichotomy_csv(std::ostream &os, const DichotomySummary &s);
void write_bc_csv(std::ostream &os, const BCStatistics &s);
void write_hsum_csv(std::ostream &os, const HSum &h, const std::vector<std::int64_t> &checkpoints);

} // namespace psseq

#endif
