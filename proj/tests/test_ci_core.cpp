#include "helpers.hpp"

#include "pppci/ci.hpp"
#include "pppci/error.hpp"
#include "pppci/kernel.hpp"
#include "pppci/measure_spec.hpp"
#include "pppci/random.hpp"
#include "pppci/random_measures.hpp"

#include <doctest.h>

using namespace pppci;
using testing::measure;
using testing::pt;

namespace {

const IndexSet k1 = IndexSet::of({0});
const IndexSet k2 = IndexSet::of({1});
const IndexSet k3 = IndexSet::of({2});

FiniteRestriction uniform(std::vector<Point> points) {
    FiniteRestriction p;
    for (auto& x : points) p.atoms.push_back({std::move(x), Rational(1, static_cast<long>(points.size()))});
    p.total = 1;
    p.mass = 1;
    return p;
}

// Classical CI on a finite table, straight from P(a,b,c)P(c) = P(a,c)P(b,c).
bool brute_ci(const FiniteRestriction& p, IndexSet a, IndexSet b, IndexSet c) {
    std::map<Point, Rational> pc;
    std::map<std::tuple<Point, Point, Point>, Rational> pabc;
    for (const auto& x : p.atoms) {
        auto ya = project(x.point, a), yb = project(x.point, b), yc = project(x.point, c);
        pc[yc] += x.weight;
        pabc[{ya, yb, yc}] += x.weight;
    }
    std::map<Point, std::map<Point, Rational>> ma, mb;
    for (const auto& [k, w] : pabc) {
        ma[std::get<2>(k)][std::get<0>(k)] += w;
        mb[std::get<2>(k)][std::get<1>(k)] += w;
    }
    for (const auto& [c_val, c_mass] : pc) {
        for (const auto& [av, wa] : ma[c_val]) {
            for (const auto& [bv, wb] : mb[c_val]) {
                auto it = pabc.find({av, bv, c_val});
                Rational joint = it == pabc.end() ? Rational(0) : it->second;
                if (joint * c_mass != wa * wb) return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("ci_core") {

TEST_CASE("query parsing") {
    auto q = CiQuery::parse("1,2 _|_ 3 | 4", 4);
    CHECK(q.a == IndexSet::of({0, 1}));
    CHECK(q.b == IndexSet::of({2}));
    CHECK(q.c == IndexSet::of({3}));
    auto e = CiQuery::parse(" _|_ 2 | 3", 3);
    CHECK(e.a.empty());
    CHECK(e.trivial());
    auto noc = CiQuery::parse("1 _|_ 2", 3);
    CHECK(noc.c.empty());
    CHECK_THROWS_AS(CiQuery::parse("1 _|_ 1 | 3", 3), ConfigError);
    CHECK_THROWS_AS(CiQuery::parse("1 _|_ 4 | 3", 3), ConfigError);
    CHECK_THROWS_AS(CiQuery::parse("1 2 3", 3), ConfigError);
}

TEST_CASE("classical CI on finite restrictions") {
    auto prod = uniform({pt({0, 0, 1}), pt({0, 1, 1}), pt({1, 0, 1}), pt({1, 1, 1})});
    CHECK(ci_under_restriction(prod, k1, k2, k3).holds);

    auto coupled = uniform({pt({0, 0, 1}), pt({1, 1, 1})});
    auto r = ci_under_restriction(coupled, k1, k2, k3);
    CHECK_FALSE(r.holds);
    REQUIRE(r.witness);
    CHECK(r.witness->a == pt({1}));
    CHECK(r.witness->b == pt({1}));
    CHECK(r.witness->c == pt({1}));
    CHECK(r.witness->lhs == Rational(1, 2));
    CHECK(r.witness->rhs == Rational(1, 4));

    CHECK(ci_under_restriction(coupled, IndexSet{}, k2, k3).holds);
}

TEST_CASE("classical CI agrees with a brute-force table") {
    RandomSource rng(17);
    for (int i = 0; i < 200; ++i) {
        FiniteRestriction p;
        int n = 1 + static_cast<int>(rng() % 5);
        Rational total = 0;
        for (int j = 0; j < n; ++j) {
            Point x = {Rational(static_cast<long>(rng() % 2)), Rational(static_cast<long>(rng() % 2)),
                       Rational(static_cast<long>(rng() % 2))};
            Rational w(static_cast<long>(1 + rng() % 3));
            p.atoms.push_back({x, w});
            total += w;
        }
        for (auto& a : p.atoms) a.weight /= total;
        p.total = 1;
        CHECK(ci_under_restriction(p, k1, k2, k3).holds == brute_ci(p, k1, k2, k3));
        CHECK(ci_under_restriction(p, k1, k2 | k3, IndexSet{}).holds == brute_ci(p, k1, k2 | k3, IndexSet{}));
    }
}

TEST_CASE("definition checker") {
    auto q = CiQuery{k1, k2, k3};
    for (int h : {1, 3, 6}) CHECK(ci_check_definition(builtin_measure("M1"), q, h).holds);
    auto m2 = ci_check_definition(builtin_measure("M2"), q, 6);
    CHECK_FALSE(m2.holds);
    REQUIRE(m2.witness);
    CHECK(m2.witness->kind == CiWitness::Kind::Rectangle);
    CHECK(m2.witness->h == 1);
    CHECK(m2.witness->v == 2);
    CHECK(ci_check_definition(builtin_measure("EMPTY3"), q, 6).holds);
    CHECK(m2.depth == 6);
}

TEST_CASE("reduced checker") {
    auto q = CiQuery{k1, k2, k3};
    CHECK(ci_check_reduced(builtin_measure("M1"), q, 6).holds);
    auto m3 = ci_check_reduced(builtin_measure("M3"), q, 6);
    CHECK_FALSE(m3.holds);
    REQUIRE(m3.witness);
    CHECK(m3.witness->kind == CiWitness::Kind::Face);
    CHECK(m3.witness->face == IndexSet::of({0, 1}));
    CHECK(m3.witness->face_mass.is_infinite());

    auto sep = builtin_measure("BIV_B1");
    CHECK(ci_check_reduced(sep, CiQuery{k1, k2, IndexSet{}}, 6).holds);
}

TEST_CASE("kernel checker") {
    auto q = CiQuery{k1, k2, k3};
    CHECK(ci_check_kernel(builtin_measure("M1"), q, 6).holds);
    auto m2 = ci_check_kernel(builtin_measure("M2"), q, 6);
    CHECK_FALSE(m2.holds);
    REQUIRE(m2.witness);
    CHECK(m2.witness->kind == CiWitness::Kind::KernelCell);
    CHECK(m2.witness->c == pt({1}));
    CHECK(m2.witness->lhs == Rational(1, 2));
    CHECK(m2.witness->rhs == Rational(1, 4));
    // Row {(0,0): 1/2, (1,1): 1/2} against the product of its marginals.
    auto k = disintegrate(builtin_measure("M2"), k1, k2, k3, 1);
    REQUIRE(k.rows().size() == 1);
    CHECK(k.rows()[0].joint.size() == 2);
    CHECK(k.rows()[0].marginal_a.at(pt({0})) == Rational(1, 2));
    CHECK(k.rows()[0].marginal_b.at(pt({1})) == Rational(1, 2));

    // Nothing off {y_C = 0} and the face condition holds.
    CHECK(ci_check_kernel(builtin_measure("G1"), CiQuery{k2, k3, k1}, 6).holds);
}

TEST_CASE("checkers refuse measures violating (iv)") {
    auto one = measure(R"({"dims": 3, "support": "nonnegative", "family": "raw_layers",
        "layers": [[{"point": [1, 0, 0], "weight": 1}]]})");
    auto q = CiQuery{k1, k2, k3};
    CHECK_THROWS_AS(ci_check_definition(one, q, 3), AssumptionViolation);
    CHECK_THROWS_AS(ci_check_reduced(one, q, 3), AssumptionViolation);
    CHECK_THROWS_AS(ci_check_kernel(one, q, 3), AssumptionViolation);
}

TEST_CASE("equivalence cross-check") {
    auto q = CiQuery{k1, k2, k3};
    auto e = equivalence_crosscheck(builtin_measure("EMPTY3"), q, 6);
    CHECK(e.agree);
    CHECK(e.definition.holds);
    CHECK(e.reduced.holds);
    CHECK(e.kernel.holds);
    auto m2 = equivalence_crosscheck(builtin_measure("M2"), q, 6);
    CHECK(m2.agree);
    CHECK_FALSE(m2.definition.holds);
    CHECK_FALSE(m2.reduced.holds);
    CHECK_FALSE(m2.kernel.holds);

    RandomSource rng(123);
    for (int i = 0; i < 20; ++i) {
        auto m = measure_from_json(random_kernel_spec(rng));
        for (const auto& [a, b, c] : all_queries(3)) CHECK(equivalence_crosscheck(m, CiQuery{a, b, c}, 5).agree);
    }
}

TEST_CASE("verdicts are monotone in depth") {
    RandomSource rng(77);
    for (int i = 0; i < 20; ++i) {
        auto m = measure_from_json(random_raw_spec(rng));
        for (const auto& [a, b, c] : all_queries(3)) {
            CiQuery q{a, b, c};
            bool prev = true;
            for (int h = 1; h <= 5; ++h) {
                bool now = ci_check_definition(m, q, h).holds;
                // A violation found at h persists at every larger depth.
                if (!prev) CHECK_FALSE(now);
                prev = now;
            }
        }
    }
}

TEST_CASE("witnesses reproduce") {
    RandomSource rng(55);
    int failures = 0;
    for (int i = 0; i < 20; ++i) {
        auto m = measure_from_json(random_kernel_spec(rng));
        for (const auto& [a, b, c] : all_queries(3)) {
            CiQuery q{a, b, c};
            for (auto method : {CiMethod::DefinitionB, CiMethod::ReducedC, CiMethod::KernelD}) {
                auto v = ci_check(m, q, 5, method);
                if (v.holds) continue;
                ++failures;
                REQUIRE(v.witness);
                CHECK(reproduce_witness(m, q, *v.witness));
            }
        }
    }
    CHECK(failures > 0);
    CiWitness fake;
    fake.kind = CiWitness::Kind::KernelCell;
    fake.c = pt({1});
    fake.a = pt({1});
    fake.b = pt({1});
    fake.lhs = 1;
    fake.rhs = 1;
    CHECK_FALSE(reproduce_witness(builtin_measure("M2"), CiQuery{k1, k2, k3}, fake));
}

TEST_CASE("the reduced rectangles need not partition the space") {
    // R_{h,1} and R_{h,2} overlap on {y_1, y_2 large}; the verdict must not
    // depend on how the overlap is split.
    auto m = builtin_measure("M1x4");
    CiQuery q{IndexSet::of({0}), IndexSet::of({1}), IndexSet::of({2, 3})};
    auto e = equivalence_crosscheck(m, q, 5);
    CHECK(e.agree);
    CHECK(e.kernel.holds);
}

TEST_CASE("bivariate classification") {
    CHECK(classify_bivariate(builtin_measure("BIV_A")).result == BivariateCase::TrivialZero);
    CHECK(classify_bivariate(builtin_measure("BIV_B1")).result == BivariateCase::Separated_b1);
    CHECK(classify_bivariate(builtin_measure("BIV_B2")).result == BivariateCase::Separated_b2);
    CHECK(classify_bivariate(builtin_measure("BIV_B3")).result == BivariateCase::Separated_b3);
    CHECK(classify_bivariate(builtin_measure("BIV_C")).result == BivariateCase::FiniteFactorized_c);
    CHECK(classify_bivariate(builtin_measure("BIV_D")).result == BivariateCase::FiniteFactorized_d);
    auto ni = classify_bivariate(builtin_measure("BIV_NI"));
    CHECK(ni.result == BivariateCase::NotIndependent);
    CHECK(ni.y2_zero.is_infinite());
    CHECK(ni.y1_zero.is_finite());
    CHECK_FALSE(is_independent(ni.result));
    CHECK(is_independent(BivariateCase::Separated_b2));

    // Coupled finite part does not factorize.
    auto coupled = measure(R"({"dims": 2, "support": "nonnegative", "family": "raw_layers",
        "layers": [[{"point": [1, 0], "weight": 1}, {"point": [1, 1], "weight": 1},
                    {"point": ["3/4", 0], "weight": 1}]]})");
    CHECK(classify_bivariate(coupled).result == BivariateCase::NotIndependent);

    // Blocks of a larger space: M1 puts infinite mass on {y_1 != 0, y_2 != 0}.
    CHECK(classify_bivariate(builtin_measure("M1"), k1, k2).result == BivariateCase::NotIndependent);
}

TEST_CASE("semigraphoid axioms") {
    auto r = semigraphoid_check(kernel_oracle(builtin_measure("M1x4"), 4), 4);
    CHECK(r.pass());
    CHECK(r.quadruples == 625);
    auto s = semigraphoid_check(kernel_oracle(builtin_measure("SEP4"), 4), 4);
    CHECK(s.pass());

    // Full independence: every relation holds.
    auto sep = kernel_oracle(builtin_measure("SEP4"), 4);
    for (const auto& [a, b, c] : all_queries(4)) CHECK(sep(a, b, c));

    // Symmetry of the checker.
    auto m2 = kernel_oracle(builtin_measure("M2"), 5);
    for (const auto& [a, b, c] : all_queries(3)) CHECK(m2(a, b, c) == m2(b, a, c));

    // A deliberately broken oracle is caught.
    auto broken = [](IndexSet a, IndexSet b, IndexSet) { return a.mask() < b.mask(); };
    CHECK_FALSE(semigraphoid_check(broken, 3).pass());
}

}  // TEST_SUITE
