#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <psseq/dioph_system.hpp>
#include <psseq/equidist.hpp>
#include <psseq/io.hpp>
#include <psseq/linear_eq.hpp>
#include <psseq/measure.hpp>
#include <psseq/ps_core.hpp>

namespace psseq::cli {

namespace {

using json = nlohmann::json;

struct Artifact {
    std::string name;
    std::string content;
    bool primary;
};

struct Options {
    std::string out_dir;
    unsigned workers = 1;
    long start_bits = 128;
    long max_bits = 4096;

    std::string alpha;
    std::int64_t limit = 0;
    std::int64_t m = 0;
    std::string a = "2";
    std::string b = "0";
    std::int64_t n_max = 0;
    std::vector<std::int64_t> checkpoints{1000, 10000, 100000, 1000000};

    int system = 1;
    std::string c = "1";
    std::string gamma = "1";
    std::string i_lo = "0";
    std::string i_hi = "1";
    std::string theta;
    std::int64_t budget = 100000;
    std::int64_t scan_cutoff = 1000000;
    int max_multiple = 8;

    std::string x;
    int terms = 20;

    std::string equid_a = "1/4";
    std::string eta1 = "3/10";
    std::string eta2 = "9/20";
    std::vector<std::int64_t> ns{1000, 10000, 100000};
    int bins = 50;
    bool band = false;
    int band_points = 100;

    std::string kind = "sets";
    std::string theta1;
    std::string theta2;
    std::string theta3 = "3/5";
    std::string eta = "0";
    std::int64_t n = 100;
    std::int64_t primes = 1000;
    std::int64_t h_max = 10000;
    std::vector<std::int64_t> triple_q{10, 100, 1000};
    std::vector<std::int64_t> triple_p{2, 3, 7};
    std::vector<std::string> triple_l{"1", "6", "24"};
    std::int64_t triple_n_factor = 4;
    std::vector<std::string> thetas;
    std::int64_t bound = 10000000;
};

PrecisionPolicy policy_of(const Options &o)
{
    PrecisionPolicy p{o.start_bits, o.max_bits, 2};
    p.validate();
    return p;
}

DiophSystem system_of(const Options &o)
{
    return DiophSystem::make(Rational::parse(o.a), Rational::parse(o.c), Rational::parse(o.gamma),
                             Rational::parse(o.i_lo), Rational::parse(o.i_hi));
}

template <class F>
std::string render(F &&f)
{
    std::ostringstream os;
    f(os);
    return os.str();
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

std::vector<Rational> parse_all(const std::vector<std::string> &v)
{
    std::vector<Rational> out;
    for (const auto &s : v) {
        out.push_back(Rational::parse(s));
    }
    return out;
}

// --- subcommands ---------------------------------------------------------

std::vector<Artifact> cmd_gen(const Options &o)
{
    const auto alpha = Exponent::parse(o.alpha);
    const auto w = ps_window(alpha, o.limit, o.workers, policy_of(o));
    return {{"window.csv", render([&](std::ostream &os) { w.write_csv(os); }), true}};
}

std::vector<Artifact> cmd_member(const Options &o, std::ostream &out)
{
    const auto alpha = Exponent::parse(o.alpha);
    if (o.m < 1) {
        throw DomainError("member needs m >= 1");
    }
    out << (is_member(o.m, alpha, policy_of(o)) ? "true" : "false") << '\n';
    return {};
}

std::vector<Artifact> cmd_solve_linear(const Options &o)
{
    const auto eq = LinearEq::make(Rational::parse(o.a), Rational::parse(o.b));
    const auto alpha = Exponent::parse(o.alpha);
    if (o.n_max < 1) {
        throw DomainError("solve-linear needs --n-max >= 1");
    }
    const auto sols = solve_linear(eq, alpha, o.n_max, o.workers, policy_of(o));
    json j{{"equation", eq.str()}, {"alpha", alpha.str()}, {"n_max", o.n_max}, {"solutions", sols.size()}};
    return {{"solutions.csv", render([&](std::ostream &os) { write_solutions_csv(os, sols); }), true},
            {"solve_linear.json", dump(j), false}};
}

std::vector<Artifact> cmd_count_fit(const Options &o)
{
    const auto eq = LinearEq::make(Rational::parse(o.a), Rational::parse(o.b));
    const auto fit = count_fit(eq, Exponent::parse(o.alpha), o.checkpoints, o.workers, policy_of(o));
    return {{"count_fit.json", render([&](std::ostream &os) { write_count_fit_json(os, fit); }), true}};
}

std::vector<Artifact> cmd_solve_system(const Options &o)
{
    const auto sys = system_of(o);
    SolveOptions so;
    so.scan_cutoff = o.scan_cutoff;
    so.max_multiple = o.max_multiple;
    so.workers = o.workers;
    so.policy = policy_of(o);
    if (o.budget < 1) {
        throw DomainError("solve-system needs --budget >= 1");
    }
    DiophResult r;
    json j{{"system", o.system}, {"budget", o.budget}};
    if (o.system == 1) {
        const auto alpha = Exponent::parse(o.alpha);
        r = solve_system_one(sys, alpha, o.budget, so);
        j["alpha"] = alpha.str();
    } else if (o.system == 2) {
        const auto theta = Rational::parse(o.theta);
        r = solve_system_two(sys, theta, o.budget, so);
        j["theta"] = theta.str();
    } else {
        throw DomainError("--system must be 1 or 2");
    }
    j["solutions"] = r.solutions.size();
    j["scanned_up_to"] = r.scanned_up_to;
    j["candidates_tested"] = r.candidates_tested;
    j["candidates_accepted"] = r.candidates_accepted;
    json skipped = json::array();
    for (const auto &s : r.skipped) {
        skipped.push_back({{"n", s.n}, {"reason", s.reason}});
    }
    j["skipped"] = skipped;
    return {{"system.csv", render([&](std::ostream &os) { write_dioph_csv(os, r); }), true},
            {"system.json", dump(j), false}};
}

std::vector<Artifact> cmd_cf(const Options &o)
{
    const auto policy = policy_of(o);
    ContinuedFraction cf;
    json j{{"terms", o.terms}};
    if (o.terms < 1) {
        throw DomainError("cf needs --terms >= 1");
    }
    if (!o.x.empty()) {
        const auto &tokens = named_exponent_tokens();
        bool named = false;
        for (auto t = tokens; *t != nullptr; ++t) {
            named = named || o.x == *t;
        }
        if (named) {
            const auto e = Exponent::named(o.x);
            cf = cf_expand([&](mpfr_prec_t p) { return e.enclose(p); }, o.terms, policy);
        } else {
            const auto q = Rational::parse(o.x);
            if (q.sign() <= 0) {
                throw DomainError("cf target must be positive");
            }
            cf = cf_expand(q, o.terms);
        }
        j["target"] = o.x;
    } else {
        const auto a = Rational::parse(o.a);
        const auto alpha = Exponent::parse(o.alpha);
        cf = root_cf(a, alpha, o.terms, policy);
        j["target"] = a.str() + "^(1/" + alpha.str() + ")";
    }
    j["stop"] = to_string(cf.stop);
    j["bits"] = cf.bits;
    j["quotients"] = cf.quotients;
    return {{"cf.csv", render([&](std::ostream &os) { write_cf_csv(os, cf); }), true}, {"cf.json", dump(j), false}};
}

std::vector<Artifact> cmd_equidist(const Options &o)
{
    const auto a = Rational::parse(o.equid_a);
    const auto gamma = Rational::parse(o.gamma);
    const auto e1 = Rational::parse(o.eta1);
    const auto e2 = Rational::parse(o.eta2);
    check_eta_range(a, gamma, e1, e2);
    if (o.ns.empty()) {
        throw EmptyInput("equidist needs at least one --n");
    }
    const auto policy = policy_of(o);
    std::vector<EquidRow> rows;
    std::vector<double> last;
    json flagged = json::object();
    for (const auto n : o.ns) {
        auto s = equid_sample(a, gamma, e1, e2, n, o.workers, policy);
        rows.push_back(equid_row(s));
        if (!s.flagged.empty()) {
            flagged[std::to_string(n)] = s.flagged;
        }
        last = std::move(s.points);
    }
    std::vector<Artifact> out{
        {"equidist.csv", render([&](std::ostream &os) { write_equid_csv(os, rows); }), true},
        {"equidist_hist.svg", render([&](std::ostream &os) {
             write_histogram_svg(os, last, o.bins, "fractional parts, n = " + std::to_string(o.ns.back()));
         }),
         false}};
    json j{{"a", a.str()}, {"gamma", gamma.str()}, {"eta1", e1.str()}, {"eta2", e2.str()}, {"flagged", flagged}};
    if (o.band) {
        std::vector<double> xs;
        for (int i = 0; i < o.band_points; ++i) {
            xs.push_back(o.band_points == 1 ? 0.5 : static_cast<double>(i) / (o.band_points - 1));
        }
        const auto rep = third_derivative_band(a, gamma, e1, e2, o.ns, xs);
        json band{{"sigma1", rep.sigma1}, {"sigma2", rep.sigma2}, {"feasible", rep.feasible},
                  {"c1", rep.c1},         {"c2", rep.c2}};
        band["n0"] = rep.n0 ? json(*rep.n0) : json(nullptr);
        json brow = json::array();
        for (const auto &r : rep.rows) {
            brow.push_back({{"n", r.n},
                            {"min_ratio_lo", r.min_ratio_lo},
                            {"max_ratio_hi", r.max_ratio_hi},
                            {"single_sign", r.single_sign},
                            {"leading_dominates", r.leading_dominates}});
        }
        band["rows"] = brow;
        j["band"] = band;
    }
    out.push_back({"equidist.json", dump(j), false});
    return out;
}

json set_json(const IntervalSet &s)
{
    return {{"measure", s.measure()}, {"measure_error", s.measure_error()}, {"components", s.size()}};
}

std::vector<Artifact> cmd_measure(const Options &o)
{
    const auto sys = system_of(o);
    const auto policy = policy_of(o);
    if (o.kind == "hsum") {
        const auto t3 = Rational::parse(o.theta3);
        const auto h = set_H_sum(t3, sys, o.h_max);
        std::vector<std::int64_t> cps;
        for (std::int64_t c = 10; c <= o.h_max; c *= 10) {
            cps.push_back(c);
        }
        if (cps.empty() || cps.back() != o.h_max) {
            cps.push_back(o.h_max);
        }
        const auto stable = h.stable_from(4);
        json j{{"theta3", t3.str()},
               {"phi3", h.phi3},
               {"N", o.h_max},
               {"partial_sum", h.partial.back()},
               {"tail_bound", h.tail_bound(o.h_max)},
               {"certified_digits", h.certified_digits(o.h_max)}};
        j["stable4_from"] = stable ? json(*stable) : json(nullptr);
        return {{"hsum.csv", render([&](std::ostream &os) { write_hsum_csv(os, h, cps); }), true},
                {"hsum.json", dump(j), false}};
    }
    if (o.kind == "triples") {
        const auto e1 = Rational::parse(o.eta1);
        const auto e2 = Rational::parse(o.eta2);
        std::vector<TripleRow> grid;
        for (const auto q : o.triple_q) {
            for (const auto p : o.triple_p) {
                if (p > q) {
                    continue;
                }
                for (const auto &l : o.triple_l) {
                    grid.push_back({o.triple_n_factor * q, q, p, Rational::parse(l)});
                }
            }
        }
        const auto r = bound_check_triples(grid, e1, e2);
        json rows = json::array();
        for (const auto &row : r.rows) {
            rows.push_back({{"N", row.N}, {"Q", row.Q}, {"p", row.p}, {"L", row.L.str()}, {"count", row.count},
                            {"first_term", row.first_term}});
        }
        json j{{"k_unit", r.k_unit}, {"c_fit", r.c_fit}, {"k_fit", r.k_fit}, {"violations", r.violations},
               {"rows", rows}};
        return {{"triples.json", dump(j), true}};
    }
    const auto mp = MetricalParams::make(sys, Rational::parse(o.theta1), Rational::parse(o.theta2),
                                         Rational::parse(o.eta));
    if (o.kind == "sets") {
        json j{{"n", o.n},
               {"E", set_json(set_E(o.n, mp))},
               {"F", set_json(set_F(o.n, mp, policy))},
               {"G", set_json(set_G(o.n, mp, policy))}};
        return {{"sets.json", dump(j), true}};
    }
    if (o.kind == "bc") {
        const auto s = bc_statistics(mp, o.primes, o.workers, policy);
        json j{{"primes_below", o.primes}, {"sum", s.sum},     {"pair_sum", s.pair_sum},
               {"ratio", s.ratio},         {"kappa", s.kappa}, {"p0", s.p0}};
        return {{"bc.csv", render([&](std::ostream &os) { write_bc_csv(os, s); }), true}, {"bc.json", dump(j), false}};
    }
    if (o.kind == "claim") {
        const auto ct = claim_threshold(mp, o.ns, policy);
        json rows = json::array();
        for (const auto &r : ct.rows) {
            rows.push_back(
                {{"n", r.n}, {"max_shift", r.max_shift}, {"hits_i0", r.hits_i0}, {"contained", r.contained}});
        }
        json j{{"phi2", ct.phi2}, {"literal_log10_n0", ct.literal_log10_n0}, {"rows", rows}};
        j["empirical_n0"] = ct.empirical_n0 ? json(*ct.empirical_n0) : json(nullptr);
        return {{"claim.json", dump(j), true}};
    }
    throw DomainError("--kind must be one of sets, bc, hsum, triples, claim");
}

std::vector<Artifact> cmd_dichotomy(const Options &o)
{
    const auto sys = system_of(o);
    SolveOptions so;
    so.scan_cutoff = o.scan_cutoff;
    so.max_multiple = o.max_multiple;
    so.workers = o.workers;
    so.policy = policy_of(o);
    const auto s = dichotomy_scan(sys, parse_all(o.thetas), o.budget, so);
    json j{{"budget", o.budget},
           {"solvable_hits", s.solvable_hits},
           {"unsolvable_hits", s.unsolvable_hits},
           {"solvable_thetas", s.solvable_count},
           {"unsolvable_thetas", s.unsolvable_count},
           {"solvable_at_least_unsolvable", s.expected_order}};
    return {{"dichotomy.csv", render([&](std::ostream &os) { write_dichotomy_csv(os, s); }), true},
            {"dichotomy.json", dump(j), false}};
}

std::vector<Artifact> cmd_fs3(const Options &o)
{
    const auto alpha = Exponent::parse(o.alpha);
    const auto w = find_fs3(alpha, o.bound);
    json j{{"alpha", alpha.str()}, {"bound", o.bound}, {"found", w.has_value()}};
    if (w) {
        j["x"] = w->x;
        j["z"] = w->z;
        const auto v = w->values();
        j["values"] = v;
        bool all = true;
        for (const auto m : v) {
            all = all && is_member(m, alpha, policy_of(o));
        }
        j["verified"] = all;
    }
    return {{"fs3.json", dump(j), true}};
}

std::vector<Artifact> cmd_xyz(const Options &o)
{
    const auto t = solve_xyz(Exponent::parse(o.alpha), o.n_max, policy_of(o));
    return {{"xyz.csv", render([&](std::ostream &os) { write_xyz_csv(os, t); }), true}};
}

// --- config merging ------------------------------------------------------

std::string flag_of(const std::string &key)
{
    std::string f = "--" + key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

std::string scalar(const json &v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<std::int64_t>());
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    throw ParseError("config values must be strings, integers, booleans or arrays of those");
}

// Flags given in the config replace the same flags on the command line.
std::vector<std::string> merge_config(const std::vector<std::string> &args)
{
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) {
        return rest;
    }
    std::ifstream f(*path);
    if (!f) {
        throw ParseError("cannot read config " + *path);
    }
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::exception &e) {
        throw ParseError("config " + *path + ": " + e.what());
    }
    if (!cfg.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    if (cfg.contains("params")) {
        for (auto &[k, v] : cfg["params"].items()) {
            cfg[k] = v;
        }
        cfg.erase("params");
    }
    std::optional<std::string> command;
    if (cfg.contains("command")) {
        command = cfg["command"].get<std::string>();
        cfg.erase("command");
    }
    std::set<std::string> overridden;
    std::vector<std::string> extra;
    for (auto &[k, v] : cfg.items()) {
        const auto flag = flag_of(k);
        overridden.insert(flag);
        if (v.is_array()) {
            extra.push_back(flag);
            for (const auto &e : v) {
                extra.push_back(scalar(e));
            }
        } else if (v.is_boolean()) {
            if (v.get<bool>()) {
                extra.push_back(flag);
            }
        } else {
            extra.push_back(flag + "=" + scalar(v));
        }
    }
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        const auto eq = rest[i].find('=');
        const auto name = rest[i].substr(0, eq);
        if (overridden.count(name) != 0) {
            if (eq == std::string::npos) {
                while (i + 1 < rest.size() && rest[i + 1].rfind("--", 0) != 0) {
                    ++i;
                }
            }
            continue;
        }
        merged.push_back(rest[i]);
    }
    if (command) {
        const bool has_command = std::any_of(merged.begin(), merged.end(), [](const std::string &s) {
            return !s.empty() && s[0] != '-';
        });
        if (!has_command) {
            merged.insert(merged.begin(), *command);
        }
    }
    merged.insert(merged.end(), extra.begin(), extra.end());
    return merged;
}

void report(std::ostream &err, const std::string &kind, const std::string &message)
{
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err)
{
    Options o;
    CLI::App app{"Piatetski-Shapiro sequence experiments"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--config", "JSON config; its keys override the matching flags");
    app.add_option("--out-dir", o.out_dir, "output directory (default: $PSSEQ_OUTPUT_DIR, else stdout)");
    app.add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1U, 256U));
    app.add_option("--start-bits", o.start_bits, "initial working precision");
    app.add_option("--max-bits", o.max_bits, "precision ceiling");

    auto sys_opts = [&](CLI::App *s) {
        s->add_option("--a", o.a, "base a (rational)");
        s->add_option("--c", o.c, "constant c > 0");
        s->add_option("--gamma", o.gamma, "twist gamma != 0");
        s->add_option("--i-lo", o.i_lo, "I = [i_lo, i_hi)");
        s->add_option("--i-hi", o.i_hi);
    };

    std::function<std::vector<Artifact>()> action;

    auto *gen = app.add_subcommand("gen", "PS(alpha) ∩ [1, limit] as CSV");
    gen->add_option("--alpha", o.alpha, "exponent p/q or constant token")->required();
    gen->add_option("--limit", o.limit)->required();
    gen->callback([&] { action = [&] { return cmd_gen(o); }; });

    auto *member = app.add_subcommand("member", "membership test, prints true/false");
    member->add_option("--alpha", o.alpha)->required();
    member->add_option("--m", o.m)->required();
    member->callback([&] { action = [&] { return cmd_member(o, out); }; });

    auto *sl = app.add_subcommand("solve-linear", "solutions of y = a x + b in PS(alpha)");
    sl->add_option("--a", o.a);
    sl->add_option("--b", o.b);
    sl->add_option("--alpha", o.alpha)->required();
    sl->add_option("--n-max", o.n_max)->required();
    sl->callback([&] { action = [&] { return cmd_solve_linear(o); }; });

    auto *cf = app.add_subcommand("count-fit", "log-log slope of solution counts");
    cf->add_option("--a", o.a);
    cf->add_option("--b", o.b);
    cf->add_option("--alpha", o.alpha)->required();
    cf->add_option("--checkpoints", o.checkpoints);
    cf->callback([&] { action = [&] { return cmd_count_fit(o); }; });

    auto *ss = app.add_subcommand("solve-system", "twisted Diophantine systems");
    sys_opts(ss);
    ss->add_option("--system", o.system, "1: theta = a^(1/alpha); 2: rational theta");
    ss->add_option("--alpha", o.alpha);
    ss->add_option("--theta", o.theta);
    ss->add_option("--budget", o.budget);
    ss->add_option("--scan-cutoff", o.scan_cutoff);
    ss->add_option("--max-multiple", o.max_multiple);
    ss->callback([&] { action = [&] { return cmd_solve_system(o); }; });

    auto *cfc = app.add_subcommand("cf", "continued fraction of x or of a^(1/alpha)");
    cfc->add_option("--x", o.x, "rational or constant token");
    cfc->add_option("--a", o.a);
    cfc->add_option("--alpha", o.alpha);
    cfc->add_option("--terms", o.terms);
    cfc->callback([&] { action = [&] { return cmd_cf(o); }; });

    auto *eq = app.add_subcommand("equidist", "fractional parts of gamma n^phi_a(m/n)");
    eq->add_option("--a", o.equid_a);
    eq->add_option("--gamma", o.gamma);
    eq->add_option("--eta1", o.eta1);
    eq->add_option("--eta2", o.eta2);
    eq->add_option("--n", o.ns);
    eq->add_option("--bins", o.bins);
    eq->add_flag("--band", o.band, "also fit the third-derivative band over the --n values");
    eq->add_option("--band-points", o.band_points);
    eq->callback([&] { action = [&] { return cmd_equidist(o); }; });

    auto *ms = app.add_subcommand("measure", "interval-set measures and counting lemmas");
    sys_opts(ms);
    ms->add_option("--kind", o.kind)->check(CLI::IsMember({"sets", "bc", "hsum", "triples", "claim"}));
    ms->add_option("--theta1", o.theta1);
    ms->add_option("--theta2", o.theta2);
    ms->add_option("--theta3", o.theta3);
    ms->add_option("--eta", o.eta);
    ms->add_option("--eta1", o.eta1);
    ms->add_option("--eta2", o.eta2);
    ms->add_option("--n", o.n);
    ms->add_option("--claim-n", o.ns);
    ms->add_option("--primes", o.primes, "use primes below this limit");
    ms->add_option("--h-max", o.h_max);
    ms->add_option("--triple-q", o.triple_q);
    ms->add_option("--triple-p", o.triple_p);
    ms->add_option("--triple-l", o.triple_l);
    ms->add_option("--triple-n-factor", o.triple_n_factor);
    ms->callback([&] { action = [&] { return cmd_measure(o); }; });

    auto *di = app.add_subcommand("dichotomy", "system two across a theta grid");
    sys_opts(di);
    di->add_option("--thetas", o.thetas)->required();
    di->add_option("--budget", o.budget);
    di->add_option("--scan-cutoff", o.scan_cutoff);
    di->add_option("--max-multiple", o.max_multiple);
    di->callback([&] { action = [&] { return cmd_dichotomy(o); }; });

    auto *fs = app.add_subcommand("fs3", "finite sums set FS(x, x, z) inside PS(alpha)");
    fs->add_option("--alpha", o.alpha)->required();
    fs->add_option("--bound", o.bound);
    fs->callback([&] { action = [&] { return cmd_fs3(o); }; });

    auto *xyz = app.add_subcommand("xyz", "x + y = z with all three in PS(alpha)");
    xyz->add_option("--alpha", o.alpha)->required();
    xyz->add_option("--n-max", o.n_max)->required();
    xyz->callback([&] { action = [&] { return cmd_xyz(o); }; });

    try {
        auto args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        report(err, "UsageError", e.what());
        return kValidation;
    } catch (const Error &e) {
        report(err, e.kind(), e.what());
        return kValidation;
    }

    try {
        if (o.out_dir.empty()) {
            if (const char *env = std::getenv("PSSEQ_OUTPUT_DIR")) {
                o.out_dir = env;
            }
        }
        const auto artifacts = action();
        if (o.out_dir.empty()) {
            for (const auto &a : artifacts) {
                if (a.primary) {
                    out << a.content;
                }
            }
        } else {
            std::filesystem::create_directories(o.out_dir);
            for (const auto &a : artifacts) {
                const auto path = (std::filesystem::path(o.out_dir) / a.name).string();
                write_file(path, a.content);
                out << path << '\n';
            }
        }
    } catch (const PrecisionExhausted &e) {
        report(err, e.kind(), e.what());
        return kPrecision;
    } catch (const Error &e) {
        report(err, e.kind(), e.what());
        return kValidation;
    } catch (const std::filesystem::filesystem_error &e) {
        report(err, "IOError", e.what());
        return kValidation;
    } catch (const std::exception &e) {
        report(err, "InternalError", e.what());
        return kInternal;
    }
    return kOk;
}

} // namespace psseq::cli
