#ifndef PSSEQ_RATIONAL_HPP
#define PSSEQ_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <psseq/errors.hpp>

namespace psseq {

// Exact rational with 64-bit numerator and denominator, always in lowest
// terms with a positive denominator. Arithmetic is carried out in 128 bits
// and throws Overflow when the reduced result does not fit.
class Rational {
public:
    constexpr Rational() = default;
    // NOLINTNEXTLINE(google-explicit-constructor)
    constexpr Rational(std::int64_t n) : num_(n) {}
    Rational(std::int64_t n, std::int64_t d);

    // Accepts "p", "p/q" and finite decimals such as "-0.35".
    static Rational parse(std::string_view text);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    bool is_integer() const noexcept { return den_ == 1; }
    int sign() const noexcept { return (num_ > 0) - (num_ < 0); }

    std::int64_t floor() const;
    std::int64_t ceil() const;

    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    Rational operator-() const;
    Rational abs() const { return sign() < 0 ? -*this : *this; }
    Rational reciprocal() const;

    friend Rational operator+(const Rational &a, const Rational &b);
    friend Rational operator-(const Rational &a, const Rational &b);
    friend Rational operator*(const Rational &a, const Rational &b);
    friend Rational operator/(const Rational &a, const Rational &b);

    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }
    Rational &operator/=(const Rational &o) { return *this = *this / o; }

    friend bool operator==(const Rational &a, const Rational &b) noexcept = default;
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) noexcept;

private:
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Floor division and non-negative remainder for signed integers.
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t mod_floor(std::int64_t a, std::int64_t m);

// Checked 64-bit helpers; throw Overflow.
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);

} // namespace psseq

#endif
