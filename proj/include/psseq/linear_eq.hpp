#ifndef PSSEQ_LINEAR_EQ_HPP
#define PSSEQ_LINEAR_EQ_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <psseq/certified.hpp>

namespace psseq {

// y = a x + b with a = a1/a2 in lowest terms, a2*b an integer, and residue
// d in [0, a2) such that a*x + b is an integer exactly when x ≡ d (mod a2).
class LinearEq {
public:
    static LinearEq make(const Rational &a, const Rational &b);

    const Rational &a() const noexcept { return a_; }
    const Rational &b() const noexcept { return b_; }
    std::int64_t a1() const noexcept { return a_.num(); }
    std::int64_t a2() const noexcept { return a_.den(); }
    std::int64_t residue() const noexcept { return d_; }

    // a*x + b when it is an integer.
    std::optional<std::int64_t> image(std::int64_t x) const;

    std::string str() const;

private:
    LinearEq(Rational a, Rational b, std::int64_t d) : a_(a), b_(b), d_(d) {}

    Rational a_;
    Rational b_;
    std::int64_t d_;
};

inline LinearEq make_eq(const Rational &a, const Rational &b) { return LinearEq::make(a, b); }

// floor(n^alpha) ≡ d (mod a2).
bool residue_test(const LinearEq &eq, std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy = {});

// J_n = [A^(1/alpha), (A+1)^(1/alpha)) with A = a*floor(n^alpha) + b, plus the
// certified decision whether J_n contains a positive integer (left end
// closed, right end open). `hit` is the smallest such integer k.
struct WindowLR {
    std::int64_t n;
    std::int64_t x; // floor(n^alpha)
    std::int64_t target; // A
    CertifiedValue left;
    CertifiedValue right;
    std::optional<std::int64_t> hit;

    // L_n = left - a^(1/alpha) n and R_n = right - a^(1/alpha) n.
    CertifiedValue left_offset(const LinearEq &eq, const Exponent &alpha) const;
    CertifiedValue right_offset(const LinearEq &eq, const Exponent &alpha) const;
};

WindowLR window(const LinearEq &eq, std::int64_t n, const Exponent &alpha, const PrecisionPolicy &policy = {});

struct SolutionRecord {
    std::int64_t n; // witness of x
    std::int64_t x;
    std::int64_t k; // witness of y
    std::int64_t y;
    // True once a*x + b + 1 <= 2 a x and a*x + b >= a (x+1)/2, i.e. the
    // asymptotic window estimates are already valid at this n.
    bool asymptotic_regime;
};

std::vector<SolutionRecord> solve_linear(const LinearEq &eq, const Exponent &alpha, std::int64_t n_max,
                                         unsigned workers = 1, const PrecisionPolicy &policy = {});

// Checks, for every n <= n_max, that a*floor(n^alpha)+b ∈ PS(alpha) (direct
// membership) agrees with residue_test && J_n ∩ N ≠ ∅. Returns the smallest
// violating n, or nullopt on success.
std::optional<std::int64_t> check_equivalence(const LinearEq &eq, const Exponent &alpha, std::int64_t n_max,
                                              unsigned workers = 1, const PrecisionPolicy &policy = {});

struct CountFit {
    std::vector<std::int64_t> checkpoints;
    std::vector<std::int64_t> counts;
    double slope;
    double stderr_;
    std::size_t used_points;
};

// Counts solutions n <= N at each checkpoint and fits log(count) against
// log(N) by least squares over checkpoints with count >= 5.
CountFit count_fit(const LinearEq &eq, const Exponent &alpha, std::vector<std::int64_t> checkpoints, unsigned workers = 1,
                   const PrecisionPolicy &policy = {});

// Least-squares slope of log(counts) against log(checkpoints), dropping
// checkpoints with fewer than min_count solutions.
CountFit fit_counts(std::vector<std::int64_t> checkpoints, std::vector<std::int64_t> counts, std::int64_t min_count = 5);

struct XYZTriple {
    std::int64_t x;
    std::int64_t y;
    std::int64_t z;
};

// All x <= y with x, y among the first n_max members of PS(alpha) and
// x + y ∈ PS(alpha), ordered by (x, y).
std::vector<XYZTriple> solve_xyz(const Exponent &alpha, std::int64_t n_max, const PrecisionPolicy &policy = {});

void write_solutions_csv(std::ostream &os, const std::vector<SolutionRecord> &sols);
void write_count_fit_json(std::ostream &os, const CountFit &fit);

} // namespace psseq

#endif
