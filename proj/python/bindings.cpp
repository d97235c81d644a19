#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <psseq/dioph_system.hpp>
#include <psseq/equidist.hpp>
#include <psseq/io.hpp>
#include <psseq/linear_eq.hpp>
#include <psseq/measure.hpp>
#include <psseq/ps_core.hpp>

namespace py = pybind11;
using namespace psseq;

namespace {

// Accepts int, str ("p/q") or anything with numerator/denominator.
Rational to_rational(const py::handle &h)
{
    if (py::isinstance<py::str>(h)) {
        return Rational::parse(h.cast<std::string>());
    }
    if (py::isinstance<py::bool_>(h)) {
        throw DomainError("expected a rational, got bool");
    }
    if (py::isinstance<py::int_>(h)) {
        return Rational(h.cast<std::int64_t>());
    }
    if (py::hasattr(h, "numerator") && py::hasattr(h, "denominator") && !py::isinstance<py::float_>(h)) {
        return Rational(h.attr("numerator").cast<std::int64_t>(), h.attr("denominator").cast<std::int64_t>());
    }
    throw DomainError("expected int, str or Fraction, got " + py::str(py::type::of(h)).cast<std::string>());
}

Exponent to_exponent(const py::handle &h)
{
    if (py::isinstance<py::str>(h)) {
        return Exponent::parse(h.cast<std::string>());
    }
    return Exponent::rational(to_rational(h));
}

py::object fraction(const Rational &q)
{
    return py::module_::import("fractions").attr("Fraction")(q.num(), q.den());
}

PrecisionPolicy make_policy(long start_bits, long max_bits)
{
    PrecisionPolicy p{start_bits, max_bits, 2};
    p.validate();
    return p;
}

DiophSystem make_system(const py::object &a, const py::object &c, const py::object &gamma, const py::object &i_lo,
                        const py::object &i_hi)
{
    return DiophSystem::make(to_rational(a), to_rational(c), to_rational(gamma), to_rational(i_lo),
                             to_rational(i_hi));
}

py::dict set_summary(const IntervalSet &s)
{
    py::list comps;
    for (const auto &iv : s.components()) {
        comps.append(py::make_tuple(iv.left.to_double(), iv.right.to_double()));
    }
    py::dict d;
    d["measure"] = s.measure();
    d["measure_error"] = s.measure_error();
    d["components"] = comps;
    return d;
}

py::dict dioph_dict(const DiophResult &r)
{
    py::list sols;
    for (const auto &s : r.solutions) {
        py::dict d;
        d["n"] = s.n;
        d["norm_bound"] = s.norm_bound;
        d["frac_bound"] = s.frac_bound;
        d["source"] = to_string(s.source);
        sols.append(d);
    }
    py::list skipped;
    for (const auto &s : r.skipped) {
        skipped.append(py::make_tuple(s.n, s.reason));
    }
    py::dict d;
    d["solutions"] = sols;
    d["skipped"] = skipped;
    d["scanned_up_to"] = r.scanned_up_to;
    d["candidates_tested"] = r.candidates_tested;
    d["candidates_accepted"] = r.candidates_accepted;
    return d;
}

SolveOptions solve_options(std::int64_t scan_cutoff, int max_multiple, unsigned workers, const PrecisionPolicy &p)
{
    SolveOptions so;
    so.scan_cutoff = scan_cutoff;
    so.max_multiple = max_multiple;
    so.workers = workers;
    so.policy = p;
    return so;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Piatetski-Shapiro sequences with certified arithmetic";

    auto base = py::register_exception<Error>(m, "PsseqError", PyExc_ValueError);
    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<AmbiguousRounding>(m, "AmbiguousRounding", base.ptr());
    py::register_exception<NotSolvableInN>(m, "NotSolvableInN", base.ptr());
    py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
    py::register_exception<TooFewMembers>(m, "TooFewMembers", base.ptr());
    py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<Overflow>(m, "Overflow", base.ptr());

    m.def(
        "ps_window",
        [](const py::object &alpha, std::int64_t limit, unsigned workers, long start_bits, long max_bits) {
            const auto w = ps_window(to_exponent(alpha), limit, workers, make_policy(start_bits, max_bits));
            return std::vector<std::int64_t>(w.members().begin(), w.members().end());
        },
        py::arg("alpha"), py::arg("limit"), py::arg("workers") = 1, py::arg("start_bits") = 128,
        py::arg("max_bits") = 4096, "Members of PS(alpha) in [1, limit]; the i-th has witness i + 1.");

    m.def(
        "is_member",
        [](std::int64_t v, const py::object &alpha, long start_bits, long max_bits) {
            return is_member(v, to_exponent(alpha), make_policy(start_bits, max_bits));
        },
        py::arg("m"), py::arg("alpha"), py::arg("start_bits") = 128, py::arg("max_bits") = 4096);

    m.def(
        "member_witness",
        [](std::int64_t v, const py::object &alpha) { return member_witness(v, to_exponent(alpha)); },
        py::arg("m"), py::arg("alpha"));

    m.def(
        "floor_pow", [](std::int64_t n, const py::object &alpha) { return floor_pow(n, to_exponent(alpha)); },
        py::arg("n"), py::arg("alpha"));

    m.def(
        "solve_linear",
        [](const py::object &a, const py::object &b, const py::object &alpha, std::int64_t n_max, unsigned workers) {
            const auto eq = LinearEq::make(to_rational(a), to_rational(b));
            py::list out;
            for (const auto &s : solve_linear(eq, to_exponent(alpha), n_max, workers)) {
                py::dict d;
                d["n"] = s.n;
                d["x"] = s.x;
                d["k"] = s.k;
                d["y"] = s.y;
                d["asymptotic_regime"] = s.asymptotic_regime;
                out.append(d);
            }
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("n_max"), py::arg("workers") = 1,
        "Solutions (x, y) of y = a x + b with x, y in PS(alpha) and witness of x <= n_max.");

    m.def(
        "count_fit",
        [](const py::object &a, const py::object &b, const py::object &alpha, std::vector<std::int64_t> checkpoints,
           unsigned workers) {
            const auto eq = LinearEq::make(to_rational(a), to_rational(b));
            const auto f = count_fit(eq, to_exponent(alpha), std::move(checkpoints), workers);
            py::dict d;
            d["checkpoints"] = f.checkpoints;
            d["counts"] = f.counts;
            d["slope"] = f.slope;
            d["stderr"] = f.stderr_;
            d["used_points"] = f.used_points;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("alpha"), py::arg("checkpoints"), py::arg("workers") = 1);

    m.def(
        "find_fs3",
        [](const py::object &alpha, std::int64_t bound) -> std::optional<std::array<std::int64_t, 5>> {
            const auto w = find_fs3(to_exponent(alpha), bound);
            if (!w) {
                return std::nullopt;
            }
            return w->values();
        },
        py::arg("alpha"), py::arg("bound"), "FS(x, x, z) = (x, 2x, z, z+x, z+2x) inside PS(alpha), or None.");

    m.def(
        "cf_expand",
        [](const py::object &x, int terms) {
            const auto cf = cf_expand(to_rational(x), terms);
            return cf.quotients;
        },
        py::arg("x"), py::arg("terms"));

    m.def(
        "root_cf",
        [](const py::object &a, const py::object &alpha, int terms, long start_bits, long max_bits) {
            const auto cf = root_cf(to_rational(a), to_exponent(alpha), terms, make_policy(start_bits, max_bits));
            py::list conv;
            for (const auto &c : cf.convergents) {
                conv.append(py::make_tuple(c.p, c.q));
            }
            py::dict d;
            d["quotients"] = cf.quotients;
            d["convergents"] = conv;
            d["stop"] = to_string(cf.stop);
            d["bits"] = cf.bits;
            return d;
        },
        py::arg("a"), py::arg("alpha"), py::arg("terms"), py::arg("start_bits") = 128, py::arg("max_bits") = 4096,
        "Continued fraction of a^(1/alpha).");

    m.def(
        "solve_system",
        [](const py::object &alpha, std::int64_t budget, const py::object &a, const py::object &c,
           const py::object &gamma, const py::object &i_lo, const py::object &i_hi, std::int64_t scan_cutoff,
           unsigned workers) {
            const auto sys = make_system(a, c, gamma, i_lo, i_hi);
            return dioph_dict(
                solve_system_one(sys, to_exponent(alpha), budget, solve_options(scan_cutoff, 8, workers, {})));
        },
        py::arg("alpha"), py::arg("budget"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1,
        py::arg("i_lo") = 0, py::arg("i_hi") = 1, py::arg("scan_cutoff") = 1000000, py::arg("workers") = 1,
        "n <= budget with ||theta n|| < c/n and {gamma n^alpha} in I, theta = a^(1/alpha).");

    m.def(
        "solve_system_two",
        [](const py::object &theta, std::int64_t budget, const py::object &a, const py::object &c,
           const py::object &gamma, const py::object &i_lo, const py::object &i_hi, std::int64_t scan_cutoff,
           unsigned workers) {
            const auto sys = make_system(a, c, gamma, i_lo, i_hi);
            return dioph_dict(
                solve_system_two(sys, to_rational(theta), budget, solve_options(scan_cutoff, 8, workers, {})));
        },
        py::arg("theta"), py::arg("budget"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1,
        py::arg("i_lo") = 0, py::arg("i_hi") = 1, py::arg("scan_cutoff") = 1000000, py::arg("workers") = 1,
        "n <= budget with ||theta n|| < c/n and {gamma n^phi_a(theta)} in I.");

    m.def(
        "verify_solution",
        [](const py::object &alpha, std::int64_t n, const py::object &a, const py::object &c, const py::object &gamma,
           const py::object &i_lo, const py::object &i_hi) {
            const auto sys = make_system(a, c, gamma, i_lo, i_hi);
            return verify_solution(sys, to_exponent(alpha), n).holds();
        },
        py::arg("alpha"), py::arg("n"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1, py::arg("i_lo") = 0,
        py::arg("i_hi") = 1);

    m.def(
        "equid_sample",
        [](const py::object &a, const py::object &gamma, const py::object &eta1, const py::object &eta2,
           std::int64_t n, unsigned workers) {
            const auto s =
                equid_sample(to_rational(a), to_rational(gamma), to_rational(eta1), to_rational(eta2), n, workers);
            py::dict d;
            d["count"] = s.count;
            d["points"] = s.points;
            d["flagged"] = s.flagged;
            return d;
        },
        py::arg("a"), py::arg("gamma"), py::arg("eta1"), py::arg("eta2"), py::arg("n"), py::arg("workers") = 1);

    m.def(
        "star_discrepancy", [](const std::vector<double> &pts) { return star_discrepancy(pts); }, py::arg("points"));

    m.def(
        "third_derivative_band",
        [](const py::object &a, const py::object &gamma, const py::object &eta1, const py::object &eta2,
           const std::vector<std::int64_t> &ns, const std::vector<double> &xs) {
            const auto r = third_derivative_band(to_rational(a), to_rational(gamma), to_rational(eta1),
                                                 to_rational(eta2), ns, xs);
            py::dict d;
            d["sigma1"] = r.sigma1;
            d["sigma2"] = r.sigma2;
            d["n0"] = r.n0;
            d["c1"] = r.c1;
            d["c2"] = r.c2;
            d["feasible"] = r.feasible;
            return d;
        },
        py::arg("a"), py::arg("gamma"), py::arg("eta1"), py::arg("eta2"), py::arg("n_grid"), py::arg("x_grid"));

    m.def(
        "measure_sets",
        [](std::int64_t n, const py::object &theta1, const py::object &theta2, const py::object &a,
           const py::object &c, const py::object &gamma, const py::object &i_lo, const py::object &i_hi) {
            const auto p = MetricalParams::make(make_system(a, c, gamma, i_lo, i_hi), to_rational(theta1),
                                                to_rational(theta2));
            py::dict d;
            d["E"] = set_summary(set_E(n, p));
            d["F"] = set_summary(set_F(n, p));
            d["G"] = set_summary(set_G(n, p));
            return d;
        },
        py::arg("n"), py::arg("theta1"), py::arg("theta2"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1,
        py::arg("i_lo") = 0, py::arg("i_hi") = 1, "E_n, F_n and G_n = E_n ∩ F_n on (theta1, theta2).");

    m.def(
        "bc_statistics",
        [](std::int64_t limit, const py::object &theta1, const py::object &theta2, const py::object &a,
           const py::object &c, const py::object &gamma, const py::object &i_lo, const py::object &i_hi,
           unsigned workers) {
            const auto p = MetricalParams::make(make_system(a, c, gamma, i_lo, i_hi), to_rational(theta1),
                                                to_rational(theta2));
            const auto s = bc_statistics(p, limit, workers);
            py::dict d;
            d["primes"] = s.primes;
            d["measures"] = s.measures;
            d["sum"] = s.sum;
            d["pair_sum"] = s.pair_sum;
            d["ratio"] = s.ratio;
            d["kappa"] = s.kappa;
            d["p0"] = s.p0;
            return d;
        },
        py::arg("limit"), py::arg("theta1"), py::arg("theta2"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1,
        py::arg("i_lo") = 0, py::arg("i_hi") = 1, py::arg("workers") = 1);

    m.def(
        "count_triples",
        [](std::int64_t N, std::int64_t Q, std::int64_t p, const py::object &L, const py::object &eta1,
           const py::object &eta2) { return count_triples(N, Q, p, to_rational(L), to_rational(eta1), to_rational(eta2)); },
        py::arg("N"), py::arg("Q"), py::arg("p"), py::arg("L"), py::arg("eta1"), py::arg("eta2"));

    m.def(
        "h_sum",
        [](const py::object &theta3, std::int64_t N, const py::object &a, const py::object &c) {
            const auto h = set_H_sum(to_rational(theta3), DiophSystem::make(to_rational(a), to_rational(c), 1, 0, 1), N);
            py::dict d;
            d["phi3"] = h.phi3;
            d["partial_sum"] = h.partial.back();
            d["tail_bound"] = h.tail_bound(N);
            d["certified_digits"] = h.certified_digits(N);
            return d;
        },
        py::arg("theta3"), py::arg("N"), py::arg("a"), py::arg("c") = 1);

    m.def(
        "dichotomy_scan",
        [](const std::vector<py::object> &thetas, std::int64_t budget, const py::object &a, const py::object &c,
           const py::object &gamma, const py::object &i_lo, const py::object &i_hi, unsigned workers) {
            std::vector<Rational> grid;
            for (const auto &t : thetas) {
                grid.push_back(to_rational(t));
            }
            const auto s = dichotomy_scan(make_system(a, c, gamma, i_lo, i_hi), grid, budget,
                                          solve_options(1000000, 8, workers, {}));
            py::list rows;
            for (const auto &r : s.rows) {
                py::dict d;
                d["theta"] = fraction(r.theta);
                d["solvable_side"] = r.solvable_side;
                d["hits"] = r.hits;
                d["skipped"] = r.skipped;
                d["largest"] = r.largest;
                rows.append(d);
            }
            py::dict d;
            d["rows"] = rows;
            d["solvable_hits"] = s.solvable_hits;
            d["unsolvable_hits"] = s.unsolvable_hits;
            d["expected_order"] = s.expected_order;
            return d;
        },
        py::arg("thetas"), py::arg("budget"), py::arg("a"), py::arg("c") = 1, py::arg("gamma") = 1,
        py::arg("i_lo") = 0, py::arg("i_hi") = 1, py::arg("workers") = 1);
}
