#ifndef PPPCI_SIM_HPP
#define PPPCI_SIM_HPP

#include "pppci/counts.hpp"
#include "pppci/kernel.hpp"
#include "pppci/measure.hpp"
#include "pppci/random.hpp"

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace pppci {

// Finite multiset of points of R^V (or of a projection of it).
struct PointPattern {
    int dims = 0;
    std::vector<Point> points;
    int depth = 0;
    std::uint64_t seed = 0;
    // Points sitting at the origin; only `project` produces them. In the
    // untruncated process this count can be infinite.
    std::size_t origin_count = 0;

    std::size_t size() const { return points.size(); }
    std::size_t count_in(const Rectangle& r) const;
};

// Poisson(Λ(R)) points drawn i.i.d. from P_R; the atom table is built once.
class WindowSampler {
public:
    WindowSampler() = default;
    WindowSampler(const LayeredDiscreteMeasure& measure, const Rectangle& r);
    explicit WindowSampler(std::vector<Atom> atoms);

    const Rational& mass() const { return mass_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    void sample_into(RandomSource& rng, std::vector<Point>& out) const;
    // Same draws as sample_into, reported as atom indices.
    void sample_indices(RandomSource& rng, std::vector<std::size_t>& out) const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    Rational mass_ = 0;
    double mean_ = 0;
};

// Independent layers 1..H; layer h is driven by substream h of rng.split().
class DepthSampler {
public:
    DepthSampler(const LayeredDiscreteMeasure& measure, int depth);
    int depth() const { return depth_; }
    int dims() const { return dims_; }
    PointPattern sample(RandomSource& rng) const;

private:
    int dims_;
    int depth_;
    std::vector<WindowSampler> layers_;
};

// Throws DomainError for windows of infinite mass.
PointPattern sample_window(const LayeredDiscreteMeasure& measure, const Rectangle& r, RandomSource& rng);
PointPattern sample_depth(const LayeredDiscreteMeasure& measure, int depth, RandomSource& rng);

// Points landing on 0_I are kept and counted in origin_count.
PointPattern project(const PointPattern& pattern, IndexSet coords);

// Point i draws from kernel.row(y_i) with substream i of rng.split().
PointPattern nu_transform(const PointPattern& pattern, const SamplableKernel& kernel, RandomSource& rng);

// Samples η from the perp measure up to depth H and maps each point to
// (h_A(η_C, θ_A) + η_A, h_B(η_C, θ_B) + η_B, η_C). With s = rng.split(), η
// uses s.substream(0); θ_{iA} and θ_{iB} use substreams of 1 and 2 split by
// point index.
class FunctionalRepSampler {
public:
    FunctionalRepSampler(const LayeredDiscreteMeasure& perp, Blocks blocks, std::shared_ptr<const SamplableKernel> h_a,
                         std::shared_ptr<const SamplableKernel> h_b, int depth);
    PointPattern sample(RandomSource& rng) const;

private:
    Blocks blocks_;
    std::shared_ptr<const SamplableKernel> h_a_, h_b_;
    DepthSampler eta_;
};

PointPattern sample_functional_rep(const LayeredDiscreteMeasure& perp, Blocks blocks,
                                   std::shared_ptr<const SamplableKernel> h_a,
                                   std::shared_ptr<const SamplableKernel> h_b, int depth, RandomSource& rng);

// (h_1(η_i, θ_i1), h_2(η_i, θ_i2), η_i) for every base point η_i on E_C.
PointPattern sample_nonpunctured_rep(const PointPattern& base, Blocks blocks, int dims, const SamplableKernel& h1,
                                     const SamplableKernel& h2, RandomSource& rng);

struct Integrand {
    std::function<Rational(const Point&)> f;
    // f vanishes outside layers 1..support_depth except possibly on these
    // faces, where |f| <= 1 is assumed.
    int support_depth = 0;
    std::vector<Face> tail_faces;
};

struct IntegrabilityCertificate {
    bool ok = false;
    Rational head_sum = 0;     // Σ over layers <= support_depth of (|f| ∧ 1) w
    Rational tail_budget = 0;  // declared totals of the tail faces
    std::string reason;
};

// Tail faces must be Finite or Zero.
IntegrabilityCertificate certify_integrable(const LayeredDiscreteMeasure& measure, const Integrand& f);

// Σ_{y ∈ pattern} f(y). Throws DomainError when integrability is not
// certified or a pattern point outside the certified region has f != 0.
Rational poisson_integral(const PointPattern& pattern, const LayeredDiscreteMeasure& measure, const Integrand& f);

struct LaplaceResult {
    double mc_estimate = 0;
    double closed_form = 0;
    double stderr_ = 0;
    double z_score = 0;
    std::size_t replicates = 0;
};

// mc: mean of exp(-∫ f dξ) over n replicates at depth H; closed form
// exp(-Σ_atoms (1 - e^{-f(y)}) w(y)) over layers 1..H.
LaplaceResult laplace_check(const LayeredDiscreteMeasure& measure, const std::function<double(const Point&)>& f,
                            int depth, std::size_t n, std::uint64_t seed);

struct CondMoments {
    Rational mean_1 = 0;
    Rational mean_2 = 0;
    Rational cov = 0;
    std::size_t base_points = 0;  // non-origin points of ξ_C used
};

// Exact conditional means and covariance of ξ_A(A_1), ξ_B(A_2) given ξ_C on
// the {y_C != 0} part. a_1 lives on E_A, a_2 on E_B; xi_c on E_C.
CondMoments cond_moment_formulas(const ConditionalKernel& kernel, const Rectangle& a_1, const Rectangle& a_2,
                                 const PointPattern& xi_c);
// Disintegrates up to xi_c.depth (at least 1) first and requires finite
// Λ_A(A_1), Λ_B(A_2).
CondMoments cond_moment_formulas(const LayeredDiscreteMeasure& measure, Blocks blocks, const Rectangle& a_1,
                                 const Rectangle& a_2, const PointPattern& xi_c);

// Header "# seed=<s> depth=<H> measure=<digest> points=<n>", then one point
// per line with tab-separated rationals.
void write_pattern(std::ostream& os, const PointPattern& pattern, const std::string& digest);

using PatternSampler = std::function<PointPattern(RandomSource&)>;

// Replicate r uses RandomSource(seed).substream(r).
CountSample sample_counts(const PatternSampler& sampler, const std::vector<Rectangle>& windows, std::size_t n,
                          std::uint64_t seed, std::string source);

}  // namespace pppci

#endif
