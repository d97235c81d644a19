#ifndef PSSEQ_EQUIDIST_HPP
#define PSSEQ_EQUIDIST_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <psseq/certified.hpp>

namespace psseq {

// {γ n^φ_a(m/n)} for the integers m with η1 < m/n < η2.
struct SamplePoints {
    Rational a;
    Rational gamma;
    Rational eta1;
    Rational eta2;
    std::int64_t n = 0;
    std::int64_t count = 0; // N_n
    std::vector<double> points;
    std::vector<std::int64_t> flagged; // m whose point could not be certified
};

// Checks min(√a, a) < η1 < η2 < max(√a, a), a > 0, a ≠ 1, γ ≠ 0.
void check_eta_range(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2);

SamplePoints equid_sample(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                          std::int64_t n, unsigned workers = 1, const PrecisionPolicy &policy = {});

// max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted points.
double star_discrepancy(std::span<const double> points);

// |N^-1 Σ e(b x_j)|.
double weyl_sum(std::int64_t b, std::span<const double> points);

// g_n(x) = γ n^φ_a((x + ⌊η1 n⌋)/n) and its x-derivatives.
//
// With u = (x + ⌊η1 n⌋)/n, A = ln a, l = ln u, L = ln n and
// h(x) = L φ_a(u(x)), we have g = γ e^h and
//   g'   = g h'
//   g''  = g (h'' + h'^2)
//   g''' = g (h''' + 3 h' h'' + h'^3)
// where h^(j)(x) = L φ^(j)(u) / n^j and
//   φ    =  A / l
//   φ'   = -A / (u l^2)
//   φ''  =  A (l + 2) / (u^2 l^3)
//   φ''' = -A (2 l^2 + 6 l + 6) / (u^3 l^4).
// The h'^3 term gives the leading part g (L/n)^3 u^-3 φ^6 / (-A^3).
class GFunctions {
public:
    static GFunctions make(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                           std::int64_t n);

    std::int64_t n() const noexcept { return n_; }
    std::int64_t offset() const noexcept { return offset_; } // ⌊η1 n⌋
    std::int64_t count() const noexcept { return count_; } // N_n

    struct Derivatives {
        CertifiedValue g;
        CertifiedValue d1;
        CertifiedValue d2;
        CertifiedValue d3;
        CertifiedValue leading; // leading part of g'''
    };

    CertifiedValue g(double x, mpfr_prec_t prec = 128) const;
    // g_{n,h}(x) = g_n(x + h) - g_n(x).
    CertifiedValue g_diff(double x, double h, mpfr_prec_t prec = 128) const;
    Derivatives derivatives(double x, mpfr_prec_t prec = 128) const;

private:
    GFunctions() = default;
    void check_x(double x) const;
    CertifiedValue u_of(double x, mpfr_prec_t prec) const;

    Rational a_;
    Rational gamma_;
    Rational eta1_;
    Rational eta2_;
    std::int64_t n_ = 0;
    std::int64_t offset_ = 0;
    std::int64_t count_ = 0;
};

struct BandRow {
    std::int64_t n;
    double min_ratio_lo; // min |g'''| n^(3-σ1) / (log n)^3 over the x-grid
    double max_ratio_hi; // max |g'''| n^(3-σ2) / (log n)^3 over the x-grid
    bool single_sign; // g''' has the sign of its leading part everywhere
    bool leading_dominates; // |g''' - leading| <= |leading| / 2 everywhere
};

struct BandReport {
    double sigma1;
    double sigma2;
    std::vector<BandRow> rows;
    // Smallest grid n from which every larger grid n satisfies single_sign
    // and leading_dominates; the constants are fitted over those rows.
    std::optional<std::int64_t> n0;
    double c1 = 0;
    double c2 = 0;
    bool feasible = false;
};

// x_grid holds relative positions t in [0,1], mapped to x = 1 + t (N_n - 1).
BandReport third_derivative_band(const Rational &a, const Rational &gamma, const Rational &eta1, const Rational &eta2,
                                 const std::vector<std::int64_t> &n_grid, const std::vector<double> &x_grid);

struct EquidRow {
    std::int64_t n;
    std::int64_t count;
    double discrepancy;
    double weyl[3];
};

EquidRow equid_row(const SamplePoints &s);
void write_equid_csv(std::ostream &os, const std::vector<EquidRow> &rows);

} // namespace psseq

#endif
