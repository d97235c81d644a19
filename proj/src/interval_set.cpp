#include <psseq/interval_set.hpp>

#include <algorithm>
#include <cmath>

#include <psseq/rational.hpp>

namespace psseq {

namespace {

constexpr mpfr_prec_t kPrec = IntervalSet::kPrecision;

int cmp(const Endpoint &a, const Endpoint &b) { return mpfr_cmp(a.value.get(), b.value.get()); }

double diff(const Endpoint &hi, const Endpoint &lo)
{
    BigFloat d(kPrec);
    mpfr_sub(d.get(), hi.value.get(), lo.value.get(), MPFR_RNDN);
    return d.to_double();
}

bool is_empty(const Interval &iv)
{
    const int c = cmp(iv.left, iv.right);
    return c > 0 || (c == 0 && !(iv.left_closed && iv.right_closed));
}

// Left end of an intersection: the larger one, closed only if both are.
void take_max_left(Interval &out, const Interval &x, const Interval &y)
{
    const int c = cmp(x.left, y.left);
    out.left = c >= 0 ? x.left : y.left;
    out.left_closed = c > 0 ? x.left_closed : c < 0 ? y.left_closed : (x.left_closed && y.left_closed);
}

void take_min_right(Interval &out, const Interval &x, const Interval &y)
{
    const int c = cmp(x.right, y.right);
    out.right = c <= 0 ? x.right : y.right;
    out.right_closed = c < 0 ? x.right_closed : c > 0 ? y.right_closed : (x.right_closed && y.right_closed);
}

} // namespace

Endpoint Endpoint::from_rational(const Rational &q)
{
    Endpoint e{BigFloat::from_rational(q, kPrec, MPFR_RNDN), 0};
    e.err = q.is_integer() ? 0 : std::ldexp(std::fabs(q.to_double()), 1 - static_cast<int>(kPrec));
    return e;
}

double Interval::length() const { return diff(right, left); }

IntervalSet::IntervalSet(std::vector<Interval> components)
{
    std::erase_if(components, is_empty);
    std::sort(components.begin(), components.end(), [](const Interval &x, const Interval &y) {
        const int c = cmp(x.left, y.left);
        return c != 0 ? c < 0 : (x.left_closed && !y.left_closed);
    });
    for (auto &iv : components) {
        if (!parts_.empty()) {
            auto &cur = parts_.back();
            const int c = cmp(iv.left, cur.right);
            if (c < 0 || (c == 0 && (cur.right_closed || iv.left_closed))) {
                const int r = cmp(iv.right, cur.right);
                if (r > 0) {
                    cur.right = std::move(iv.right);
                    cur.right_closed = iv.right_closed;
                } else if (r == 0) {
                    cur.right_closed = cur.right_closed || iv.right_closed;
                }
                continue;
            }
        }
        parts_.push_back(std::move(iv));
    }
}

IntervalSet IntervalSet::open(const Rational &lo, const Rational &hi)
{
    return IntervalSet({Interval{Endpoint::from_rational(lo), Endpoint::from_rational(hi), false, false}});
}

double IntervalSet::measure() const
{
    BigFloat sum(kPrec);
    BigFloat d(kPrec);
    for (const auto &iv : parts_) {
        mpfr_sub(d.get(), iv.right.value.get(), iv.left.value.get(), MPFR_RNDN);
        mpfr_add(sum.get(), sum.get(), d.get(), MPFR_RNDN);
    }
    return sum.to_double();
}

double IntervalSet::measure_error() const
{
    double e = 0;
    for (const auto &iv : parts_) {
        e += iv.left.err + iv.right.err;
    }
    return e;
}

bool IntervalSet::contains(double x) const
{
    auto it = std::partition_point(parts_.begin(), parts_.end(), [x](const Interval &iv) {
        const int c = mpfr_cmp_d(iv.right.value.get(), x);
        return c < 0 || (c == 0 && !iv.right_closed);
    });
    if (it == parts_.end()) {
        return false;
    }
    const int c = mpfr_cmp_d(it->left.value.get(), x);
    return c < 0 || (c == 0 && it->left_closed);
}

IntervalSet intersect(const IntervalSet &a, const IntervalSet &b)
{
    std::vector<Interval> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.parts_.size() && j < b.parts_.size()) {
        const auto &x = a.parts_[i];
        const auto &y = b.parts_[j];
        Interval iv;
        take_max_left(iv, x, y);
        take_min_right(iv, x, y);
        if (!is_empty(iv)) {
            out.push_back(std::move(iv));
        }
        const int c = cmp(x.right, y.right);
        if (c < 0 || (c == 0 && !x.right_closed)) {
            ++i;
        } else {
            ++j;
        }
    }
    IntervalSet r;
    r.parts_ = std::move(out);
    return r;
}

IntervalSet unite(const IntervalSet &a, const IntervalSet &b)
{
    std::vector<Interval> all = a.parts_;
    all.insert(all.end(), b.parts_.begin(), b.parts_.end());
    return IntervalSet(std::move(all));
}

double intersection_measure(const IntervalSet &a, const IntervalSet &b) { return intersect(a, b).measure(); }

double pairwise_overlap_sum(const std::vector<IntervalSet> &sets)
{
    struct Item {
        const Interval *iv;
        std::size_t set;
    };
    std::vector<Item> items;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (const auto &iv : sets[s].components()) {
            items.push_back({&iv, s});
        }
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item &x, const Item &y) { return cmp(x.iv->left, y.iv->left) < 0; });
    BigFloat sum(kPrec);
    BigFloat d(kPrec);
    std::vector<Item> active;
    for (const auto &it : items) {
        std::erase_if(active, [&](const Item &o) { return cmp(o.iv->right, it.iv->left) <= 0; });
        for (const auto &o : active) {
            if (o.set == it.set) {
                continue;
            }
            const Endpoint &r = cmp(o.iv->right, it.iv->right) <= 0 ? o.iv->right : it.iv->right;
            mpfr_sub(d.get(), r.value.get(), it.iv->left.value.get(), MPFR_RNDN);
            mpfr_add(sum.get(), sum.get(), d.get(), MPFR_RNDN);
        }
        active.push_back(it);
    }
    return sum.to_double();
}

std::string IntervalSet::str(int digits) const
{
    if (parts_.empty()) {
        return "{}";
    }
    std::string s;
    for (const auto &iv : parts_) {
        if (!s.empty()) {
            s += " U ";
        }
        s += iv.left_closed ? "[" : "(";
        s += iv.left.value.to_string(digits);
        s += ", ";
        s += iv.right.value.to_string(digits);
        s += iv.right_closed ? "]" : ")";
    }
    return s;
}

} // namespace psseq
