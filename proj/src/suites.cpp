#include "pppci/suites.hpp"

#include "pppci/ci.hpp"
#include "pppci/error.hpp"
#include "pppci/kernel.hpp"
#include "pppci/measure_spec.hpp"
#include "pppci/random_measures.hpp"
#include "pppci/sim.hpp"
#include "pppci/stats.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace pppci {

bool SuiteResult::pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

namespace {

using nlohmann::json;

void add(SuiteResult& r, std::string name, bool pass, std::string detail) {
    r.checks.push_back(SuiteCheck{std::move(name), pass, std::move(detail)});
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

Rectangle rect(const char* text) { return Rectangle::parse(text); }

CiQuery query(IndexSet a, IndexSet b, IndexSet c) { return CiQuery{a, b, c}; }

const IndexSet k1 = IndexSet::of({0});
const IndexSet k2 = IndexSet::of({1});
const IndexSet k3 = IndexSet::of({2});

// --- equivalence ----------------------------------------------------------

struct AgreementTally {
    long measures = 0;
    long queries = 0;
    long holds = 0;
    long fails = 0;
    long disagreements = 0;
    std::string first_disagreement;
};

void tally_measure(const LayeredDiscreteMeasure& m, int depth, AgreementTally& t, const std::string& label) {
    ++t.measures;
    for (const auto& [a, b, c] : all_queries(m.dims())) {
        auto q = query(a, b, c);
        auto rep = equivalence_crosscheck(m, q, depth);
        ++t.queries;
        if (!rep.agree) {
            ++t.disagreements;
            if (t.first_disagreement.empty()) {
                t.first_disagreement = label + " " + q.to_string() + ": b=" + std::to_string(rep.definition.holds) +
                                       " c=" + std::to_string(rep.reduced.holds) +
                                       " d=" + std::to_string(rep.kernel.holds);
            }
        } else if (rep.kernel.holds) {
            ++t.holds;
        } else {
            ++t.fails;
        }
    }
}

std::string tally_detail(const AgreementTally& t) {
    std::string s = std::to_string(t.measures) + " measures, " + std::to_string(t.queries) + " queries (" +
                    std::to_string(t.holds) + " hold, " + std::to_string(t.fails) + " fail), " +
                    std::to_string(t.disagreements) + " disagreements";
    if (!t.first_disagreement.empty()) s += "; first: " + t.first_disagreement;
    return s;
}

SuiteResult suite_equivalence(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "equivalence";
    const int h = o.depth;
    const CiQuery q123 = query(k1, k2, k3);

    struct Expect {
        const char* name;
        bool holds;
    };
    for (Expect e : {Expect{"M1", true}, Expect{"M2", false}, Expect{"M3", false}, Expect{"EMPTY3", true}}) {
        auto m = builtin_measure(e.name);
        auto rep = equivalence_crosscheck(m, q123, h);
        bool ok = rep.agree && rep.kernel.holds == e.holds;
        add(r, std::string(e.name) + " 1_|_2|3", ok,
            std::string("b/c/d = ") + (rep.definition.holds ? "holds" : "fails") + "/" +
                (rep.reduced.holds ? "holds" : "fails") + "/" + (rep.kernel.holds ? "holds" : "fails") +
                " at H=" + std::to_string(h));
    }

    AgreementTally builtins;
    for (const char* name : {"M1", "M2", "M3", "EMPTY3"}) tally_measure(builtin_measure(name), h, builtins, name);
    add(r, "builtin agreement, all queries", builtins.disagreements == 0, tally_detail(builtins));

    RandomSource rng(o.seed, 1);
    AgreementTally kernels;
    for (std::size_t i = 0; i < o.random_measures; ++i) {
        auto spec = random_kernel_spec(rng);
        tally_measure(measure_from_json(spec), h, kernels, "kernel#" + std::to_string(i));
    }
    add(r, "random kernel-built agreement", kernels.disagreements == 0 && kernels.measures >= 100 &&
                                                 kernels.holds > 0 && kernels.fails > 0,
        tally_detail(kernels));

    AgreementTally raws;
    for (std::size_t i = 0; i < o.random_measures / 2; ++i) {
        auto spec = random_raw_spec(rng);
        tally_measure(measure_from_json(spec), h, raws, "raw#" + std::to_string(i));
    }
    add(r, "random raw-template agreement", raws.disagreements == 0, tally_detail(raws));
    r.details = {{"depth", h},
                 {"random_kernel_measures", kernels.measures},
                 {"random_raw_measures", raws.measures},
                 {"queries", builtins.queries + kernels.queries + raws.queries}};
    return r;
}

// --- witness --------------------------------------------------------------

SuiteResult suite_witness(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "witness";
    const CiQuery q = query(k1, k2, k3);
    auto m2 = builtin_measure("M2");
    auto kd = ci_check_kernel(m2, q, o.depth);
    bool ok = !kd.holds && kd.witness && kd.witness->kind == CiWitness::Kind::KernelCell &&
              kd.witness->c == Point{Rational(1)} && kd.witness->lhs == Rational(1, 2) &&
              kd.witness->rhs == Rational(1, 4) && reproduce_witness(m2, q, *kd.witness);
    add(r, "M2 kernel witness at y_3 = 1", ok, kd.witness ? kd.witness->describe() : "no witness");

    auto db = ci_check_definition(m2, q, o.depth);
    ok = !db.holds && db.witness && db.witness->h == 1 && db.witness->v == 2 && db.witness->lhs == Rational(1, 2) &&
         db.witness->rhs == Rational(1, 4) && reproduce_witness(m2, q, *db.witness);
    add(r, "M2 definition witness R_{1,3}", ok, db.witness ? db.witness->describe() : "no witness");

    auto m3 = builtin_measure("M3");
    auto rc = ci_check_reduced(m3, q, o.depth);
    ok = !rc.holds && rc.witness && rc.witness->kind == CiWitness::Kind::Face &&
         rc.witness->face == IndexSet::of({0, 1}) && rc.witness->face_mass.is_infinite() &&
         reproduce_witness(m3, q, *rc.witness);
    add(r, "M3 face-null witness {1,2}", ok, rc.witness ? rc.witness->describe() : "no witness");

    auto kd3 = ci_check_kernel(m3, q, o.depth);
    ok = !kd3.holds && kd3.witness && kd3.witness->kind == CiWitness::Kind::Face &&
         kd3.witness->face == IndexSet::of({0, 1});
    add(r, "M3 kernel checker face witness", ok, kd3.witness ? kd3.witness->describe() : "no witness");

    // Monotonicity in H: the witness found at H stays at H + 3.
    auto deeper = ci_check_kernel(m2, q, o.depth + 3);
    ok = !deeper.holds && deeper.witness && deeper.witness->c == kd.witness->c &&
         deeper.witness->lhs == kd.witness->lhs && deeper.witness->rhs == kd.witness->rhs;
    add(r, "M2 witness stable in depth", ok, "H=" + std::to_string(o.depth + 3));
    return r;
}

// --- bivariate ------------------------------------------------------------

SuiteResult suite_bivariate(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "bivariate";
    struct Expect {
        const char* name;
        BivariateCase expected;
    };
    for (Expect e : {Expect{"BIV_A", BivariateCase::TrivialZero}, Expect{"BIV_B1", BivariateCase::Separated_b1},
                     Expect{"BIV_B2", BivariateCase::Separated_b2}, Expect{"BIV_B3", BivariateCase::Separated_b3},
                     Expect{"BIV_NI", BivariateCase::NotIndependent},
                     Expect{"BIV_C", BivariateCase::FiniteFactorized_c},
                     Expect{"BIV_D", BivariateCase::FiniteFactorized_d}}) {
        auto rep = classify_bivariate(builtin_measure(e.name));
        add(r, std::string(e.name) + " -> " + to_string(e.expected), rep.result == e.expected,
            "got " + to_string(rep.result) + " (Λ(y1=0) " + rep.y1_zero.to_string() + ", Λ(y2=0) " +
                rep.y2_zero.to_string() + ", interior " + rep.interior.to_string() + ")");
    }

    // ξ_1({0} ∪ (1/2,1]) and ξ_2(E_2°) share the finite atom (0, 1).
    auto ni = builtin_measure("BIV_NI");
    DepthSampler sampler(ni, o.sim_depth);
    std::vector<Rectangle> windows = {rect("{0}|(1/2,1];*"), rect("*;!0")};
    auto counts = sample_counts([&](RandomSource& g) { return sampler.sample(g); }, windows, o.replicates,
                                o.seed + 31, "BIV_NI direct");
    auto cov = count_covariance_check(counts, 0, 1, 0.0);
    bool positive = cov.z_score && *cov.z_score > kZBand;
    add(r, "BIV_NI count covariance > 4 se", positive,
        "cov " + fmt(cov.details["cov"].get<double>()) + ", z " + fmt(*cov.z_score) + ", N " +
            std::to_string(o.replicates));
    r.details["ni_covariance"] = cov.to_json();
    return r;
}

// --- sampler --------------------------------------------------------------

std::vector<Rectangle> sampler_windows() {
    return {rect("(1/4,inf);*;*"), rect("*;(1/4,inf);*"), rect("*;*;(1/4,inf)")};
}

CountSample functional_counts(const LayeredDiscreteMeasure& m, int depth, std::size_t n, std::uint64_t seed,
                              const std::string& label) {
    Blocks blocks{k1, k2, k3};
    auto perp = build_perp_measure(m, blocks.a, blocks.b, blocks.c, PerpConvention::FaceRestricted);
    auto kernel = disintegrate(m, blocks.a, blocks.b, blocks.c, depth);
    FunctionalRepSampler sampler(perp, blocks, kernel.a_kernel(), kernel.b_kernel(), depth);
    return sample_counts([&](RandomSource& g) { return sampler.sample(g); }, sampler_windows(), n, seed, label);
}

CountSample direct_counts(const LayeredDiscreteMeasure& m, int depth, std::size_t n, std::uint64_t seed,
                          const std::string& label) {
    DepthSampler sampler(m, depth);
    return sample_counts([&](RandomSource& g) { return sampler.sample(g); }, sampler_windows(), n, seed, label);
}

SuiteResult suite_sampler(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "sampler";
    auto m1 = builtin_measure("M1");
    auto d1 = direct_counts(m1, o.sim_depth, o.replicates, o.seed + 41, "M1 direct");
    auto f1 = functional_counts(m1, o.sim_depth, o.replicates, o.seed + 42, "M1 functional");
    auto eq = joint_count_equality(d1, f1);
    add(r, "M1 direct vs functional representation", eq.pass,
        "chi2 " + fmt(eq.statistic) + ", dof " + std::to_string(eq.dof) + ", p " + fmt(*eq.p_value));
    r.details["m1"] = eq.to_json();

    auto m2 = builtin_measure("M2");
    auto d2 = direct_counts(m2, o.sim_depth, o.replicates, o.seed + 43, "M2 direct");
    auto f2 = functional_counts(m2, o.sim_depth, o.replicates, o.seed + 44, "M2 product impostor");
    auto neq = joint_count_equality(d2, f2);
    add(r, "M2 direct vs product-kernel impostor is rejected", !neq.pass,
        "chi2 " + fmt(neq.statistic) + ", dof " + std::to_string(neq.dof) + ", p " + fmt(*neq.p_value));
    r.details["m2"] = neq.to_json();
    return r;
}

// --- condcov --------------------------------------------------------------

SuiteResult suite_condcov(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "condcov";
    const Blocks blocks{k1, k2, k3};

    auto m1 = builtin_measure("M1");
    RandomSource g(o.seed + 51);
    auto xi_c = project(sample_depth(m1, o.sim_depth, g), blocks.c);
    auto a1 = rect("(1/8,inf)");
    auto a2 = rect("(1/8,inf)");
    auto exact1 = cond_moment_formulas(m1, blocks, a1, a2, xi_c);
    auto kernel1 = disintegrate(m1, blocks.a, blocks.b, blocks.c, o.sim_depth);
    auto t1 = empirical_cond_cov(kernel1, a1, a2, xi_c, o.replicates, o.seed + 52);
    add(r, "M1 formula cov = 0", exact1.cov == 0 && exact1.base_points > 0,
        "cov " + to_string(exact1.cov) + ", means " + to_string(exact1.mean_1) + ", " + to_string(exact1.mean_2) +
            " over " + std::to_string(exact1.base_points) + " base points");
    add(r, "M1 MC means and cov within 4 se", t1.pass, "max |z| " + fmt(t1.statistic));
    r.details["m1"] = t1.to_json();

    auto m2 = builtin_measure("M2");
    PointPattern one;
    one.dims = 1;
    one.depth = 1;
    one.points = {Point{Rational(1)}};
    auto b1 = rect("{1}");
    auto exact2 = cond_moment_formulas(m2, blocks, b1, b1, one);
    auto kernel2 = disintegrate(m2, blocks.a, blocks.b, blocks.c, 1);
    auto t2 = empirical_cond_cov(kernel2, b1, b1, one, o.replicates, o.seed + 53);
    add(r, "M2 formula cov = 1/4", exact2.cov == Rational(1, 4) && exact2.mean_1 == Rational(1, 2) &&
                                       exact2.mean_2 == Rational(1, 2),
        "cov " + to_string(exact2.cov) + ", means " + to_string(exact2.mean_1) + ", " + to_string(exact2.mean_2));
    add(r, "M2 MC means and cov within 4 se", t2.pass, "max |z| " + fmt(t2.statistic));
    r.details["m2"] = t2.to_json();
    return r;
}

// --- laplace --------------------------------------------------------------

SuiteResult suite_laplace(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "laplace";
    auto m1 = builtin_measure("M1");
    const char* windows[] = {"*;*;(1/4,inf)", "(1/2,inf);*;*"};
    json rows = json::array();
    std::uint64_t k = 0;
    for (const char* w : windows) {
        auto win = rect(w);
        double mass = to_double(mass_on_rectangle(m1, win).value);
        for (double t : {0.5, 1.0, 2.0}) {
            auto res = laplace_check(
                m1, [&](const Point& p) { return win.contains(p) ? t : 0.0; }, o.sim_depth, o.replicates,
                o.seed + 61 + k++);
            double direct = std::exp(-mass * (1 - std::exp(-t)));
            bool ok = std::abs(res.z_score) < kZBand && std::abs(res.closed_form - direct) < 1e-12;
            add(r, std::string("window ") + w + ", t=" + fmt(t), ok,
                "mc " + fmt(res.mc_estimate, 6) + ", closed " + fmt(res.closed_form, 6) + ", z " + fmt(res.z_score));
            rows.push_back({{"window", w}, {"t", t}, {"mass", mass}, {"mc", res.mc_estimate},
                            {"closed_form", res.closed_form}, {"z", res.z_score}});
        }
    }
    r.details["rows"] = rows;
    return r;
}

// --- semigraphoid ---------------------------------------------------------

SuiteResult suite_semigraphoid(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "semigraphoid";
    int depth = std::min(o.depth, 4);
    for (const char* name : {"M1x4", "SEP4"}) {
        auto m = builtin_measure(name);
        bool iv = check_assumption_iv(m).pass;
        auto rep = semigraphoid_check(kernel_oracle(m, depth), 4);
        std::string detail = std::to_string(rep.quadruples) + " quadruples, " + std::to_string(rep.oracle_calls) +
                             " distinct triples, " + std::to_string(rep.violations.size()) + " violations";
        if (!rep.violations.empty()) {
            const auto& v = rep.violations.front();
            detail += "; first " + v.axiom + " A=" + v.a.to_string() + " B=" + v.b.to_string() +
                      " C=" + v.c.to_string() + " D=" + v.d.to_string();
        }
        add(r, std::string(name) + " semigraphoid axioms", iv && rep.pass(), detail);
    }
    RandomSource rng(o.seed, 7);
    long agree = 0, pass = 0, fail = 0;
    for (std::size_t i = 0; i < o.random_declarations; ++i) {
        auto classes = random_face_classes(rng, 5);
        auto eq = check_e1_equivalence(classes);
        agree += eq.agree;
        (eq.assumption_iv.pass ? pass : fail) += 1;
    }
    add(r, "E1 equivalence on random declarations",
        agree == static_cast<long>(o.random_declarations) && o.random_declarations >= 100 && pass > 0 && fail > 0,
        std::to_string(agree) + "/" + std::to_string(o.random_declarations) + " agree (" + std::to_string(pass) +
            " satisfy (iv), " + std::to_string(fail) + " violate)");
    bool builtin_agree = true;
    for (const auto& name : builtin_names()) builtin_agree = builtin_agree && check_e1_equivalence(builtin_measure(name)).agree;
    add(r, "E1 equivalence on builtins", builtin_agree, std::to_string(builtin_names().size()) + " builtins");
    return r;
}

// --- poisson --------------------------------------------------------------

SuiteResult suite_poisson(const SuiteOptions& o) {
    SuiteResult r;
    r.suite = "poisson";
    auto m1 = builtin_measure("M1");
    std::vector<Rectangle> windows = {rect("(1/2,inf);(1/2,inf);*"), rect("*;*;(1/2,inf)"), rect("*;*;(1/8,inf)"),
                                      rect("*;*;(1/8,1/2]")};
    const Rational expected[] = {Rational(1, 4), Rational(1), Rational(3), Rational(2)};
    bool masses = true;
    for (std::size_t w = 0; w < windows.size(); ++w) masses = masses && mass_on_rectangle(m1, windows[w]).value == expected[w];
    add(r, "exact window masses 1/4, 1, 3", masses, "M1");

    DepthSampler sampler(m1, o.sim_depth);
    auto counts = sample_counts([&](RandomSource& g) { return sampler.sample(g); }, windows, o.replicates,
                                o.seed + 71, "M1 direct");
    for (std::size_t w = 0; w < 3; ++w) {
        auto gof = poisson_gof(counts, w, to_double(expected[w]));
        add(r, "GOF mass " + to_string(expected[w]), gof.pass,
            "chi2 " + fmt(gof.statistic) + ", dof " + std::to_string(gof.dof) + ", p " + fmt(*gof.p_value));
        auto law = count_law_check(counts, w, to_double(expected[w]));
        add(r, "mean/var mass " + to_string(expected[w]), law.pass, "max |z| " + fmt(law.statistic));
    }
    auto cov = count_covariance_check(counts, 1, 3, 0.0);
    add(r, "disjoint-window covariance", cov.pass, "z " + fmt(*cov.z_score));

    auto g1 = builtin_measure("G1");
    auto win = rect("(1/5,11/10];{0};{0}");
    WindowSampler ws(g1, win);
    auto gc = sample_counts(
        [&](RandomSource& g) {
            PointPattern p;
            p.dims = 3;
            ws.sample_into(g, p.points);
            return p;
        },
        {win}, o.replicates, o.seed + 72, "G1 window");
    auto law = count_law_check(gc, 0, 3.0);
    add(r, "G1 window (0.2,1.1] mean 3", ws.mass() == 3 && law.pass,
        "mass " + to_string(ws.mass()) + ", mean " + fmt(law.details["mean"].get<double>()));

    auto dump = [&](std::uint64_t seed) {
        RandomSource g(seed);
        std::ostringstream os;
        write_pattern(os, sample_depth(m1, o.sim_depth, g), m1.digest());
        return os.str();
    };
    auto a = dump(o.seed + 73), b = dump(o.seed + 73), c = dump(o.seed + 74);
    add(r, "identical seeds give byte-identical dumps", a == b && a != c, std::to_string(a.size()) + " bytes");
    return r;
}

using Clock = std::chrono::steady_clock;

}  // namespace

std::vector<std::string> suite_names() {
    return {"equivalence", "witness", "bivariate", "sampler", "condcov", "laplace", "semigraphoid", "poisson"};
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
    auto t0 = Clock::now();
    SuiteResult r;
    if (name == "equivalence") {
        r = suite_equivalence(options);
    } else if (name == "witness") {
        r = suite_witness(options);
    } else if (name == "bivariate") {
        r = suite_bivariate(options);
    } else if (name == "sampler") {
        r = suite_sampler(options);
    } else if (name == "condcov") {
        r = suite_condcov(options);
    } else if (name == "laplace") {
        r = suite_laplace(options);
    } else if (name == "semigraphoid") {
        r = suite_semigraphoid(options);
    } else if (name == "poisson") {
        r = suite_poisson(options);
    } else {
        throw ConfigError("unknown suite '" + name + "'");
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return r;
}

void write_suite_csv(std::ostream& os, const std::vector<SuiteResult>& results) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        return out + "\"";
    };
    os << "suite,check,verdict,detail\n";
    for (const auto& r : results) {
        for (const auto& c : r.checks)
            os << r.suite << ',' << quote(c.name) << ',' << (c.pass ? "pass" : "fail") << ',' << quote(c.detail) << '\n';
    }
}

}  // namespace pppci
