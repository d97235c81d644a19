#ifndef PSSEQ_INTERVAL_SET_HPP
#define PSSEQ_INTERVAL_SET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <psseq/bigfloat.hpp>
#include <psseq/rational.hpp>

namespace psseq {

// A real number stored at IntervalSet::kPrecision with an absolute error
// bound. Rational endpoints carry only the final rounding error.
struct Endpoint {
    BigFloat value;
    double err = 0;

    static Endpoint from_rational(const Rational &q);
    double to_double() const { return value.to_double(); }
};

struct Interval {
    Endpoint left;
    Endpoint right;
    bool left_closed = true;
    bool right_closed = true;

    double length() const;
};

// Finite union of intervals, kept sorted and pairwise disjoint. Touching
// components are merged when the shared point belongs to one of them.
class IntervalSet {
public:
    static constexpr mpfr_prec_t kPrecision = 192;

    IntervalSet() = default;
    // Normalizes arbitrary (possibly overlapping or empty) components.
    explicit IntervalSet(std::vector<Interval> components);
    static IntervalSet open(const Rational &lo, const Rational &hi);

    const std::vector<Interval> &components() const noexcept { return parts_; }
    std::size_t size() const noexcept { return parts_.size(); }
    bool empty() const noexcept { return parts_.empty(); }

    // Σ (right - left).
    double measure() const;
    // Bound on |measure() - true measure| from endpoint errors.
    double measure_error() const;
    // Membership by stored endpoint values.
    bool contains(double x) const;

    friend IntervalSet intersect(const IntervalSet &a, const IntervalSet &b);
    friend IntervalSet unite(const IntervalSet &a, const IntervalSet &b);

    std::string str(int digits = 12) const;

private:
    std::vector<Interval> parts_;
};

// λ(A ∩ B) computed directly by a merge, without building the set.
double intersection_measure(const IntervalSet &a, const IntervalSet &b);

// Σ_{i<j} λ(A_i ∩ A_j) by a sweep over all components at once.
double pairwise_overlap_sum(const std::vector<IntervalSet> &sets);

} // namespace psseq

#endif
