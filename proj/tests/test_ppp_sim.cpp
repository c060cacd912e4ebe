#include "helpers.hpp"

#include "pppci/error.hpp"
#include "pppci/measure_spec.hpp"
#include "pppci/parallel.hpp"
#include "pppci/random_measures.hpp"
#include "pppci/sim.hpp"
#include "pppci/stats.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

using namespace pppci;
using testing::measure;
using testing::pt;

namespace {

const IndexSet k1 = IndexSet::of({0});
const IndexSet k2 = IndexSet::of({1});
const IndexSet k3 = IndexSet::of({2});

CountSample counts_of(const PatternSampler& s, std::vector<const char*> windows, std::size_t n, std::uint64_t seed,
                      const std::string& label) {
    std::vector<Rectangle> rs;
    for (const char* w : windows) rs.push_back(Rectangle::parse(w));
    return sample_counts(s, rs, n, seed, label);
}

PatternSampler depth_sampler(const LayeredDiscreteMeasure& m, int depth) {
    auto d = std::make_shared<DepthSampler>(m, depth);
    return [d](RandomSource& g) { return d->sample(g); };
}

}  // namespace

TEST_SUITE("ppp_sim") {

TEST_CASE("random source streams") {
    RandomSource a(1), b(1), c(2);
    CHECK(a() == b());
    CHECK(RandomSource(1)() != c());
    auto s1 = RandomSource(5).substream(3), s2 = RandomSource(5).substream(3), s3 = RandomSource(5).substream(4);
    auto x = s1();
    CHECK(x == s2());
    CHECK(x != s3());
    RandomSource u(9);
    for (int i = 0; i < 1000; ++i) {
        double v = u.uniform();
        CHECK((v >= 0 && v < 1));
    }
    RandomSource p(4);
    double s = 0;
    for (int i = 0; i < 20000; ++i) s += static_cast<double>(p.poisson(40.0));
    CHECK(std::abs(s / 20000 - 40.0) < 4 * std::sqrt(40.0 / 20000));
}

TEST_CASE("window sampler") {
    auto g1 = builtin_measure("G1");
    auto r = Rectangle::parse("(1/5,11/10];{0};{0}");
    WindowSampler ws(g1, r);
    CHECK(ws.mass() == 3);
    CHECK(ws.atoms().size() == 3);

    auto sample = sample_counts(
        [&](RandomSource& g) {
            PointPattern p;
            p.dims = 3;
            ws.sample_into(g, p.points);
            return p;
        },
        {r}, 100000, 42, "G1");
    auto s = summarize(sample.column(0));
    CHECK(std::abs(s.mean - 3.0) < 3 * s.stderr_);
    CHECK(std::abs(s.var - 3.0) < 0.1);

    WindowSampler none(g1, Rectangle::parse("*;(1,2];*"));
    CHECK(none.mass() == 0);
    RandomSource rng(1);
    for (int i = 0; i < 100; ++i) {
        std::vector<Point> out;
        none.sample_into(rng, out);
        CHECK(out.empty());
    }
    CHECK_THROWS_AS(sample_window(g1, Rectangle::parse("(0,2];{0};{0}"), rng), DomainError);
}

TEST_CASE("depth sampler") {
    auto g1 = builtin_measure("G1");
    RandomSource rng(3);
    CHECK(sample_depth(g1, 0, rng).size() == 0);

    // Layers 1..3 of G1 carry mass 1 each.
    auto sample = counts_of(depth_sampler(g1, 3), {"(1/2,inf);*;*", "(1/4,1/2];*;*", "(1/8,1/4];*;*", "*;*;*"},
                            100000, 7, "G1");
    auto gof = poisson_gof(sample, 3, 3.0);
    CHECK(gof.pass);
    for (std::size_t w = 0; w < 3; ++w) CHECK(count_law_check(sample, w, 1.0).pass);
    CHECK(count_covariance_check(sample, 0, 1).pass);
    CHECK(count_covariance_check(sample, 1, 2).pass);

    auto p = sample_depth(builtin_measure("M1"), 4, rng);
    for (const auto& x : p.points) CHECK(layer_of(x) <= 4);

    // Successive calls on one source give fresh patterns.
    std::set<std::size_t> sizes;
    for (int i = 0; i < 50; ++i) sizes.insert(sample_depth(g1, 6, rng).size());
    CHECK(sizes.size() > 1);
}

TEST_CASE("projection") {
    PointPattern p;
    p.dims = 3;
    p.points = {pt({1, 0, 1}), pt({0, 1, 1})};
    auto q = project(p, k1);
    CHECK(q.dims == 1);
    CHECK(q.origin_count == 1);
    REQUIRE(q.points.size() == 2);
    std::multiset<Point> got(q.points.begin(), q.points.end());
    CHECK(got == std::multiset<Point>{pt({1}), pt({0})});
    auto id = project(p, IndexSet::full(3));
    CHECK(id.points == p.points);
    CHECK(id.origin_count == 0);
}

TEST_CASE("projecting then windowing equals windowing the cylinder") {
    auto m1 = builtin_measure("M1");
    RandomSource rng(12);
    const char* subs[] = {"(1/4,inf);{0}", "{0,1};*", "(1/8,1/2];!0"};
    for (int i = 0; i < 100; ++i) {
        auto p = sample_depth(m1, 4, rng);
        auto q = project(p, IndexSet::of({0, 2}));
        for (const char* s : subs) {
            auto sub = Rectangle::parse(s);
            CHECK(q.count_in(sub) == p.count_in(Rectangle::cylinder(sub, IndexSet::of({0, 2}), 3)));
        }
    }
}

TEST_CASE("nu transform") {
    PointPattern base;
    base.dims = 1;
    base.points = {pt({1}), pt({Rational(1, 2)}), pt({1})};
    RandomSource rng(2);
    auto same = nu_transform(base, IdentityKernel(1), rng);
    CHECK(same.points == base.points);

    auto z = pt({Rational(3, 4), 1});
    auto constant = nu_transform(base, ConstantKernel(1, z), rng);
    CHECK(constant.points.size() == 3);
    for (const auto& x : constant.points) CHECK(x == z);

    // Poisson(2) points at one site, thinned by a fair coin.
    WindowSampler site(std::vector<Atom>{{pt({1}), Rational(2)}});
    std::map<Point, KernelRow> rows;
    rows[pt({1})] = KernelRow::make({{pt({0}), Rational(1, 2)}, {pt({1}), Rational(1, 2)}});
    TableKernel coin(1, 1, rows);
    auto sample = sample_counts(
        [&](RandomSource& g) {
            PointPattern b;
            b.dims = 1;
            auto g0 = g.substream(0);
            site.sample_into(g0, b.points);
            auto g1 = g.substream(1);
            return nu_transform(b, coin, g1);
        },
        {Rectangle::parse("{0}"), Rectangle::parse("{1}")}, 100000, 5, "coin");
    CHECK(poisson_gof(sample, 0, 1.0).pass);
    CHECK(poisson_gof(sample, 1, 1.0).pass);
    CHECK(count_covariance_check(sample, 0, 1).pass);
}

TEST_CASE("functional representation: point by point") {
    // Perp-type base: one axis ray on coordinate 1 and the base ray on 3.
    auto perp = measure(R"({"dims": 3, "support": "nonnegative", "family": "raw_layers",
        "repeat": [{"point": [1, 0, 0], "weight": 1}, {"point": [0, 0, 1], "weight": 1}]})");
    auto ha = std::make_shared<ConstantKernel>(1, pt({Rational(1, 2)}));
    std::map<Point, KernelRow> rows;
    auto hb = std::make_shared<SelfSimilarKernel>(
        1, 1, rows, KernelRow::make({{pt({0}), Rational(1, 2)}, {pt({1}), Rational(1, 2)}}));
    FunctionalRepSampler s(perp, Blocks{k1, k2, k3}, ha, hb, 4);
    RandomSource rng(8);
    int axis = 0, based = 0;
    for (int r = 0; r < 200; ++r) {
        auto p = s.sample(rng);
        for (const auto& x : p.points) {
            if (x[2] == 0) {
                ++axis;
                CHECK(x[0] != 0);
                CHECK(x[1] == 0);
            } else {
                ++based;
                CHECK(x[0] == Rational(1, 2));
                CHECK((x[1] == 0 || x[1] == x[2]));
            }
        }
    }
    CHECK(axis > 0);
    CHECK(based > 0);
}

TEST_CASE("functional representation of M1 matches direct sampling") {
    auto m1 = builtin_measure("M1");
    auto perp = build_perp_measure(m1, k1, k2, k3, PerpConvention::FaceRestricted);
    auto k = disintegrate(m1, k1, k2, k3, 4);
    auto fr = std::make_shared<FunctionalRepSampler>(perp, Blocks{k1, k2, k3}, k.a_kernel(), k.b_kernel(), 4);
    std::vector<const char*> w = {"(1/4,inf);*;*", "*;(1/4,inf);*", "*;*;(1/4,inf)"};
    auto direct = counts_of(depth_sampler(m1, 4), w, 40000, 1, "direct");
    auto func = counts_of([fr](RandomSource& g) { return fr->sample(g); }, w, 40000, 2, "functional");
    CHECK(joint_count_equality(direct, func, 40000).pass);
}

TEST_CASE("the marginal-embedding perp is not a functional representation base") {
    // Under the marginal embedding the A and B marginals of Λ are embedded as
    // well as the base, so kernel outputs are added on top of a second copy.
    auto m1 = builtin_measure("M1");
    auto perp = build_perp_measure(m1, k1, k2, k3, PerpConvention::MarginalEmbedding);
    auto k = disintegrate(m1, k1, k2, k3, 4);
    auto fr = std::make_shared<FunctionalRepSampler>(perp, Blocks{k1, k2, k3}, k.a_kernel(), k.b_kernel(), 4);
    std::vector<const char*> w = {"(1/4,inf);*;*", "*;(1/4,inf);*", "*;*;(1/4,inf)"};
    auto direct = counts_of(depth_sampler(m1, 4), w, 40000, 1, "direct");
    auto func = counts_of([fr](RandomSource& g) { return fr->sample(g); }, w, 40000, 2, "functional");
    CHECK_FALSE(joint_count_equality(direct, func, 40000).pass);
}

TEST_CASE("functional representation requires delta-zero origin rows") {
    std::map<Point, KernelRow> rows;
    rows[pt({0})] = KernelRow::dirac(pt({1}));
    CHECK_THROWS_AS(TableKernel(1, 1, rows), DomainError);

    auto perp = build_perp_measure(builtin_measure("M1"), k1, k2, k3, PerpConvention::FaceRestricted);
    auto ok = std::make_shared<IdentityKernel>(1);
    auto wide = std::make_shared<IdentityKernel>(2);
    CHECK_THROWS_AS(FunctionalRepSampler(perp, Blocks{k1, k2, k3}, wide, ok, 4), DomainError);
    CHECK_NOTHROW(FunctionalRepSampler(perp, Blocks{k1, k2, k3}, ok, ok, 4));
}

TEST_CASE("non-punctured representation") {
    PointPattern empty;
    empty.dims = 1;
    RandomSource rng(4);
    ConstantKernel c1(1, pt({Rational(1, 4)})), c2(1, pt({Rational(3, 4)}));
    CHECK(sample_nonpunctured_rep(empty, Blocks{k1, k2, k3}, 3, c1, c2, rng).size() == 0);

    PointPattern base;
    base.dims = 1;
    base.points = {pt({1}), pt({Rational(1, 2)})};
    auto out = sample_nonpunctured_rep(base, Blocks{k1, k2, k3}, 3, c1, c2, rng);
    REQUIRE(out.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(out.points[i][0] == Rational(1, 4));
        CHECK(out.points[i][1] == Rational(3, 4));
        CHECK(out.points[i][2] == base.points[i][0]);
    }

    // Base ξ_3 of M1 plus the product kernels reproduces M1 in distribution.
    auto m1 = builtin_measure("M1");
    auto marg = marginalize(m1, k3).measure;
    auto k = disintegrate(m1, k1, k2, k3, 4);
    auto ka = k.a_kernel(), kb = k.b_kernel();
    auto base_sampler = std::make_shared<DepthSampler>(marg, 4);
    std::vector<const char*> w = {"(1/4,inf);*;*", "*;(1/4,inf);*", "(1/8,inf);*;(1/2,inf)"};
    auto rep = counts_of(
        [&](RandomSource& g) {
            auto g0 = g.substream(0);
            auto b = base_sampler->sample(g0);
            auto g1 = g.substream(1);
            return sample_nonpunctured_rep(b, Blocks{k1, k2, k3}, 3, *ka, *kb, g1);
        },
        w, 40000, 3, "rep");
    auto direct = counts_of(depth_sampler(m1, 4), w, 40000, 9, "direct");
    CHECK(joint_count_equality(rep, direct, 40000).pass);
}

TEST_CASE("poisson integral") {
    auto m1 = builtin_measure("M1");
    auto r = Rectangle::parse("*;*;(1/8,inf)");
    Integrand zero{[](const Point&) { return Rational(0); }, 0, {}};
    Integrand ind{[&](const Point& p) { return r.contains(p) ? Rational(1) : Rational(0); }, *r.bound_depth(), {}};
    RandomSource rng(6);
    std::vector<double> vals;
    for (int i = 0; i < 100000; ++i) {
        auto p = sample_depth(m1, 4, rng);
        CHECK(poisson_integral(p, m1, zero) == 0);
        auto v = poisson_integral(p, m1, ind);
        if (i < 50) CHECK(v == Rational(static_cast<long>(p.count_in(r))));
        vals.push_back(to_double(v));
    }
    auto s = summarize(vals);
    CHECK(std::abs(s.mean - 3.0) < 4 * s.stderr_);

    auto g1 = builtin_measure("G1");
    Integrand tail{[](const Point&) { return Rational(1); }, 2, {IndexSet::of({0})}};
    CHECK_FALSE(certify_integrable(g1, tail).ok);
    CHECK_THROWS_AS(poisson_integral(PointPattern{}, g1, tail), DomainError);
}

TEST_CASE("laplace functional") {
    auto m1 = builtin_measure("M1");
    auto zero = laplace_check(m1, [](const Point&) { return 0.0; }, 4, 1000, 1);
    CHECK(zero.closed_form == 1.0);
    CHECK(zero.mc_estimate == 1.0);
    auto r = Rectangle::parse("*;*;(1/4,inf)");
    for (double t : {0.5, 1.0, 2.0}) {
        auto res = laplace_check(m1, [&](const Point& p) { return r.contains(p) ? t : 0.0; }, 4, 100000, 10);
        CHECK(res.closed_form == doctest::Approx(std::exp(-2.0 * (1 - std::exp(-t)))).epsilon(1e-12));
        CHECK(std::abs(res.z_score) < 3);
    }
}

TEST_CASE("conditional moment formulas") {
    Blocks blocks{k1, k2, k3};
    PointPattern empty;
    empty.dims = 1;
    auto m2 = builtin_measure("M2");
    auto a = Rectangle::parse("{1}");
    auto e = cond_moment_formulas(m2, blocks, a, a, empty);
    CHECK(e.mean_1 == 0);
    CHECK(e.mean_2 == 0);
    CHECK(e.cov == 0);

    PointPattern one;
    one.dims = 1;
    one.depth = 1;
    one.points = {pt({1})};
    auto m = cond_moment_formulas(m2, blocks, a, a, one);
    CHECK(m.cov == Rational(1, 4));
    CHECK(m.mean_1 == Rational(1, 2));
    CHECK(m.mean_2 == Rational(1, 2));

    auto m1 = builtin_measure("M1");
    RandomSource rng(13);
    auto w = Rectangle::parse("(1/8,inf)");
    for (int i = 0; i < 20; ++i) {
        auto xi = project(sample_depth(m1, 4, rng), k3);
        CHECK(cond_moment_formulas(m1, blocks, w, w, xi).cov == 0);
    }
    // Λ_A(A_1) infinite: the formulas do not apply.
    CHECK_THROWS_AS(cond_moment_formulas(m1, blocks, Rectangle::parse("!0"), w, one), DomainError);
}

TEST_CASE("pattern dumps") {
    auto m1 = builtin_measure("M1");
    auto dump = [&](std::uint64_t seed, int depth) {
        RandomSource g(seed);
        auto p = sample_depth(m1, depth, g);
        p.seed = seed;
        std::ostringstream os;
        write_pattern(os, p, m1.digest());
        return os.str();
    };
    CHECK(dump(1, 4) == dump(1, 4));
    CHECK(dump(1, 4) != dump(2, 4));
    auto empty = dump(1, 0);
    CHECK(empty.find("points=0") != std::string::npos);
    CHECK(empty.find("depth=0") != std::string::npos);
    CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
}

TEST_CASE("replicate streams do not depend on scheduling") {
    auto m1 = builtin_measure("M1");
    auto s = depth_sampler(m1, 4);
    auto a = counts_of(s, {"*;*;(1/8,inf)"}, 500, 77, "a");
    std::vector<std::int64_t> serial;
    for (std::size_t r = 0; r < 500; ++r) {
        auto g = RandomSource(77).substream(r);
        serial.push_back(static_cast<std::int64_t>(s(g).count_in(Rectangle::parse("*;*;(1/8,inf)"))));
    }
    CHECK(a.column(0) == serial);

    std::atomic<int> seen{0};
    parallel_for(100, [&](std::size_t) { ++seen; });
    CHECK(seen == 100);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }),
                    std::runtime_error);
}

}  // TEST_SUITE
