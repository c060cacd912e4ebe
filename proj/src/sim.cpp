#include "pppci/sim.hpp"

#include "pppci/error.hpp"
#include "pppci/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pppci {

std::size_t PointPattern::count_in(const Rectangle& r) const {
    std::size_t n = 0;
    for (const auto& p : points) {
        if (r.contains(p)) ++n;
    }
    return n;
}

WindowSampler::WindowSampler(const LayeredDiscreteMeasure& measure, const Rectangle& r)
    : WindowSampler(atoms_in(measure, r)) {}

WindowSampler::WindowSampler(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) mass_ += a.weight;
    if (mass_ == 0) return;
    mean_ = to_double(mass_);
    Rational acc = 0;
    cumulative_.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        acc += a.weight;
        cumulative_.push_back(to_double(acc / mass_));
    }
    cumulative_.back() = 1.0;
}

void WindowSampler::sample_indices(RandomSource& rng, std::vector<std::size_t>& out) const {
    if (atoms_.empty()) return;
    auto n = rng.poisson(mean_);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(rng.categorical(cumulative_));
}

void WindowSampler::sample_into(RandomSource& rng, std::vector<Point>& out) const {
    if (atoms_.empty()) return;
    auto n = rng.poisson(mean_);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(atoms_[rng.categorical(cumulative_)].point);
}

DepthSampler::DepthSampler(const LayeredDiscreteMeasure& measure, int depth)
    : dims_(measure.dims()), depth_(std::max(depth, 0)) {
    for (int h = 1; h <= depth_; ++h) layers_.emplace_back(measure.layer(h));
}

PointPattern DepthSampler::sample(RandomSource& rng) const {
    PointPattern out;
    out.dims = dims_;
    out.depth = depth_;
    out.seed = rng.seed();
    const auto base = rng.split();
    for (int h = 1; h <= depth_; ++h) {
        auto sub = base.substream(static_cast<std::uint64_t>(h));
        layers_[static_cast<std::size_t>(h - 1)].sample_into(sub, out.points);
    }
    return out;
}

PointPattern sample_window(const LayeredDiscreteMeasure& measure, const Rectangle& r, RandomSource& rng) {
    if (mass_on_rectangle(measure, r).infinite) throw DomainError("window " + r.to_string() + " has infinite mass");
    WindowSampler s(measure, r);
    PointPattern out;
    out.dims = measure.dims();
    out.depth = r.bound_depth().value_or(0);
    out.seed = rng.seed();
    s.sample_into(rng, out.points);
    return out;
}

PointPattern sample_depth(const LayeredDiscreteMeasure& measure, int depth, RandomSource& rng) {
    return DepthSampler(measure, depth).sample(rng);
}

PointPattern project(const PointPattern& pattern, IndexSet coords) {
    PointPattern out;
    out.dims = coords.size();
    out.depth = pattern.depth;
    out.seed = pattern.seed;
    out.points.reserve(pattern.points.size());
    for (const auto& p : pattern.points) {
        Point y = pppci::project(p, coords);
        if (is_origin(y)) ++out.origin_count;
        out.points.push_back(std::move(y));
    }
    return out;
}

PointPattern nu_transform(const PointPattern& pattern, const SamplableKernel& kernel, RandomSource& rng) {
    PointPattern out;
    out.dims = kernel.target_dims();
    out.depth = pattern.depth;
    out.seed = pattern.seed;
    out.points.reserve(pattern.points.size());
    const auto base = rng.split();
    for (std::size_t i = 0; i < pattern.points.size(); ++i) {
        auto sub = base.substream(i);
        out.points.push_back(kernel.row(pattern.points[i]).draw(sub.uniform()));
    }
    return out;
}

namespace {

void check_vanishing(const SamplableKernel& k, int source_dims, int target_dims, const char* name) {
    if (k.source_dims() != source_dims || k.target_dims() != target_dims)
        throw DomainError(std::string(name) + " has the wrong dimensions");
    if (!k.row(zero_point(source_dims)).is_dirac_at_origin())
        throw DomainError(std::string(name) + " must map 0_C to the target origin");
}

void add_block(Point& p, const Point& sub, IndexSet block) {
    int i = 0;
    for (int v : block.members()) p[static_cast<std::size_t>(v)] += sub[static_cast<std::size_t>(i++)];
}

}  // namespace

FunctionalRepSampler::FunctionalRepSampler(const LayeredDiscreteMeasure& perp, Blocks blocks,
                                           std::shared_ptr<const SamplableKernel> h_a,
                                           std::shared_ptr<const SamplableKernel> h_b, int depth)
    : blocks_(blocks), h_a_(std::move(h_a)), h_b_(std::move(h_b)), eta_(perp, depth) {
    if (blocks.a.intersects(blocks.b) || blocks.a.intersects(blocks.c) || blocks.b.intersects(blocks.c) ||
        (blocks.a | blocks.b | blocks.c) != perp.space().all())
        throw std::invalid_argument("functional representation needs a partition of V");
    check_vanishing(*h_a_, blocks.c.size(), blocks.a.size(), "h_A");
    check_vanishing(*h_b_, blocks.c.size(), blocks.b.size(), "h_B");
}

PointPattern FunctionalRepSampler::sample(RandomSource& rng) const {
    const auto base = rng.split();
    auto eta_rng = base.substream(0);
    PointPattern out = eta_.sample(eta_rng);
    const auto theta_a = base.substream(1);
    const auto theta_b = base.substream(2);
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        Point& p = out.points[i];
        Point yc = pppci::project(p, blocks_.c);
        auto ua = theta_a.substream(i);
        auto ub = theta_b.substream(i);
        add_block(p, h_a_->row(yc).draw(ua.uniform()), blocks_.a);
        add_block(p, h_b_->row(yc).draw(ub.uniform()), blocks_.b);
    }
    out.seed = rng.seed();
    return out;
}

PointPattern sample_functional_rep(const LayeredDiscreteMeasure& perp, Blocks blocks,
                                   std::shared_ptr<const SamplableKernel> h_a,
                                   std::shared_ptr<const SamplableKernel> h_b, int depth, RandomSource& rng) {
    return FunctionalRepSampler(perp, blocks, std::move(h_a), std::move(h_b), depth).sample(rng);
}

PointPattern sample_nonpunctured_rep(const PointPattern& base, Blocks blocks, int dims, const SamplableKernel& h1,
                                     const SamplableKernel& h2, RandomSource& rng) {
    if (base.dims != blocks.c.size() || h1.target_dims() != blocks.a.size() || h2.target_dims() != blocks.b.size())
        throw DomainError("non-punctured representation has mismatched dimensions");
    PointPattern out;
    out.dims = dims;
    out.depth = base.depth;
    out.seed = base.seed;
    const auto base_rng = rng.split();
    const auto t1 = base_rng.substream(1);
    const auto t2 = base_rng.substream(2);
    for (std::size_t i = 0; i < base.points.size(); ++i) {
        const Point& eta = base.points[i];
        Point p = zero_point(dims);
        auto u1 = t1.substream(i);
        auto u2 = t2.substream(i);
        add_block(p, h1.row(eta).draw(u1.uniform()), blocks.a);
        add_block(p, h2.row(eta).draw(u2.uniform()), blocks.b);
        add_block(p, eta, blocks.c);
        out.points.push_back(std::move(p));
    }
    return out;
}

IntegrabilityCertificate certify_integrable(const LayeredDiscreteMeasure& measure, const Integrand& f) {
    IntegrabilityCertificate cert;
    for (int h = 1; h <= f.support_depth; ++h) {
        for (const auto& a : measure.layer(h)) {
            Rational v = abs(f.f(a.point));
            cert.head_sum += (v < 1 ? v : Rational(1)) * a.weight;
        }
    }
    for (Face face : f.tail_faces) {
        auto cls = measure.face_classes().get(face);
        if (cls.is_infinite()) {
            cert.reason = "tail face " + face.to_string() + " has infinite mass";
            return cert;
        }
        if (cls.is_finite()) cert.tail_budget += cls.total();
    }
    cert.ok = true;
    return cert;
}

Rational poisson_integral(const PointPattern& pattern, const LayeredDiscreteMeasure& measure, const Integrand& f) {
    auto cert = certify_integrable(measure, f);
    if (!cert.ok) throw DomainError("integrability not certified: " + cert.reason);
    Rational sum = 0;
    for (const auto& p : pattern.points) {
        Rational v = f.f(p);
        if (v == 0) continue;
        if (is_origin(p)) throw DomainError("integrand is non-zero at the origin");
        if (layer_of(p) > f.support_depth &&
            std::find(f.tail_faces.begin(), f.tail_faces.end(), face_of(p)) == f.tail_faces.end())
            throw DomainError("integrand is non-zero at " + to_string(p) + " outside the certified region");
        sum += v;
    }
    return sum;
}

LaplaceResult laplace_check(const LayeredDiscreteMeasure& measure, const std::function<double(const Point&)>& f,
                            int depth, std::size_t n, std::uint64_t seed) {
    LaplaceResult r;
    r.replicates = n;
    double exponent = 0;
    for (int h = 1; h <= depth; ++h) {
        for (const auto& a : measure.layer(h)) exponent += (1.0 - std::exp(-f(a.point))) * to_double(a.weight);
    }
    r.closed_form = std::exp(-exponent);
    DepthSampler sampler(measure, depth);
    std::vector<double> values(n);
    const RandomSource root(seed);
    parallel_for(n, [&](std::size_t i) {
        auto rng = root.substream(i);
        auto pattern = sampler.sample(rng);
        double s = 0;
        for (const auto& p : pattern.points) s += f(p);
        values[i] = std::exp(-s);
    });
    auto m = summarize(values);
    r.mc_estimate = m.mean;
    r.stderr_ = m.stderr_;
    if (r.stderr_ > 0) {
        r.z_score = (r.mc_estimate - r.closed_form) / r.stderr_;
    } else {
        r.z_score = r.mc_estimate == r.closed_form ? 0.0 : INFINITY;
    }
    return r;
}

CondMoments cond_moment_formulas(const ConditionalKernel& kernel, const Rectangle& a_1, const Rectangle& a_2,
                                 const PointPattern& xi_c) {
    if (a_1.dims() != kernel.a().size() || a_2.dims() != kernel.b().size())
        throw DomainError("conditional moment windows have the wrong dimensions");
    CondMoments m;
    for (const auto& y : xi_c.points) {
        if (is_origin(y)) continue;
        const auto* row = kernel.find(y);
        if (!row) throw DomainError("no kernel row for realized y_C = " + to_string(y));
        Rational p1 = 0, p2 = 0, p12 = 0;
        for (const auto& [a, p] : row->marginal_a) {
            if (a_1.contains(a)) p1 += p;
        }
        for (const auto& [b, p] : row->marginal_b) {
            if (a_2.contains(b)) p2 += p;
        }
        for (const auto& [ab, p] : row->joint) {
            if (a_1.contains(ab.first) && a_2.contains(ab.second)) p12 += p;
        }
        m.mean_1 += p1;
        m.mean_2 += p2;
        m.cov += p12 - p1 * p2;
        ++m.base_points;
    }
    return m;
}

CondMoments cond_moment_formulas(const LayeredDiscreteMeasure& measure, Blocks blocks, const Rectangle& a_1,
                                 const Rectangle& a_2, const PointPattern& xi_c) {
    auto check_finite = [&](IndexSet block, const Rectangle& w) {
        auto marginal = marginalize(measure, block);
        if (mass_on_rectangle(marginal.measure, w).infinite)
            throw DomainError("window " + w.to_string() + " has infinite marginal mass");
    };
    check_finite(blocks.a, a_1);
    check_finite(blocks.b, a_2);
    int depth = std::max(1, xi_c.depth);
    for (const auto& y : xi_c.points) {
        if (!is_origin(y)) depth = std::max(depth, layer_of(y));
    }
    auto kernel = disintegrate(measure, blocks.a, blocks.b, blocks.c, depth);
    return cond_moment_formulas(kernel, a_1, a_2, xi_c);
}

void write_pattern(std::ostream& os, const PointPattern& pattern, const std::string& digest) {
    os << "# seed=" << pattern.seed << " depth=" << pattern.depth << " measure=" << digest
       << " points=" << pattern.points.size() << '\n';
    for (const auto& p : pattern.points) {
        for (std::size_t v = 0; v < p.size(); ++v) {
            if (v) os << '\t';
            os << to_string(p[v]);
        }
        os << '\n';
    }
}

CountSample sample_counts(const PatternSampler& sampler, const std::vector<Rectangle>& windows, std::size_t n,
                          std::uint64_t seed, std::string source) {
    CountSample s;
    s.seed = seed;
    s.source = std::move(source);
    for (std::size_t w = 0; w < windows.size(); ++w) s.windows.push_back("W" + std::to_string(w + 1));
    s.counts.assign(n, std::vector<std::int64_t>(windows.size(), 0));
    const RandomSource root(seed);
    parallel_for(n, [&](std::size_t i) {
        auto rng = root.substream(i);
        auto pattern = sampler(rng);
        for (std::size_t w = 0; w < windows.size(); ++w)
            s.counts[i][w] = static_cast<std::int64_t>(pattern.count_in(windows[w]));
    });
    return s;
}

}  // namespace pppci
