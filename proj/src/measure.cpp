#include "pppci/measure.hpp"

#include "pppci/error.hpp"

#include <algorithm>
#include <cstdio>

namespace pppci {

std::vector<Atom> canonical_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.point < y.point; });
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (auto& a : atoms) {
        if (!out.empty() && out.back().point == a.point) {
            out.back().weight += a.weight;
        } else {
            out.push_back(std::move(a));
        }
    }
    return out;
}

namespace {

Rational max_abs(const Point& p) {
    Rational m = 0;
    for (const auto& x : p) {
        Rational a = abs(x);
        if (a > m) m = a;
    }
    return m;
}

}  // namespace

TemplateSource::TemplateSource(int dims, std::vector<std::vector<Atom>> explicit_layers,
                               std::vector<Atom> repeat)
    : dims_(dims), explicit_(std::move(explicit_layers)), repeat_(std::move(repeat)) {
    for (std::size_t h = 0; h < explicit_.size(); ++h) {
        for (const auto& a : explicit_[h]) {
            if (static_cast<int>(a.point.size()) != dims_ || is_origin(a.point) || a.weight <= 0)
                throw ConfigError("invalid explicit atom " + to_string(a.point));
            if (layer_of(a.point) != static_cast<int>(h) + 1)
                throw ConfigError("atom " + to_string(a.point) + " is not in layer " + std::to_string(h + 1));
        }
    }
    for (const auto& a : repeat_) {
        if (static_cast<int>(a.point.size()) != dims_ || is_origin(a.point) || a.weight <= 0)
            throw ConfigError("invalid repeating atom " + to_string(a.point));
        if (max_abs(a.point) > 1)
            throw ConfigError("repeating atom " + to_string(a.point) + " must satisfy max|y| <= 1");
        repeat_layer_.push_back(layer_of(a.point));
    }
}

std::vector<Atom> TemplateSource::layer(int h) const {
    std::vector<Atom> out;
    if (h >= 1 && h <= static_cast<int>(explicit_.size())) out = explicit_[static_cast<std::size_t>(h - 1)];
    for (std::size_t i = 0; i < repeat_.size(); ++i) {
        int start = repeat_layer_[i];
        if (start > h) continue;
        out.push_back(Atom{scaled(repeat_[i].point, pow2_neg(h - start)), repeat_[i].weight});
    }
    return out;
}

FaceClassMap TemplateSource::derived_classes() const {
    FaceClassMap classes(dims_);
    for (const auto& layer : explicit_) {
        for (const auto& a : layer) classes.add(face_of(a.point), FaceMassClass::finite(a.weight));
    }
    for (const auto& a : repeat_) classes.set(face_of(a.point), FaceMassClass::infinite());
    return classes;
}

namespace {

class EmptySource final : public LayerSource {
public:
    std::vector<Atom> layer(int) const override { return {}; }
};

class MarginalSource final : public LayerSource {
public:
    MarginalSource(LayeredDiscreteMeasure parent, IndexSet d) : parent_(std::move(parent)), d_(d) {}

    std::vector<Atom> layer(int h) const override {
        std::vector<Atom> out;
        // y_D in layer h forces the full point into layers 1..h.
        for (int k = 1; k <= h; ++k) {
            for (const auto& a : parent_.layer(k)) {
                Point y = project(a.point, d_);
                if (is_origin(y) || layer_of(y) != h) continue;
                out.push_back(Atom{std::move(y), a.weight});
            }
        }
        return out;
    }

private:
    LayeredDiscreteMeasure parent_;
    IndexSet d_;
};

class PerpSource final : public LayerSource {
public:
    PerpSource(LayeredDiscreteMeasure parent, IndexSet a, IndexSet b, IndexSet c, PerpConvention conv)
        : parent_(std::move(parent)), a_(a), b_(b), c_(c), conv_(conv) {}

    std::vector<Atom> layer(int h) const override {
        std::vector<Atom> out;
        const int d = parent_.dims();
        auto embed_block = [&](const Atom& atom, IndexSet block) {
            Point y = embed(project(atom.point, block), block, d);
            if (!is_origin(y) && layer_of(y) == h) out.push_back(Atom{std::move(y), atom.weight});
        };
        for (int k = 1; k <= h; ++k) {
            for (const auto& atom : parent_.layer(k)) {
                if (conv_ == PerpConvention::MarginalEmbedding) {
                    embed_block(atom, a_);
                    embed_block(atom, b_);
                } else if (k == h) {
                    Face f = face_of(atom.point);
                    if (f.subset_of(a_) || f.subset_of(b_)) out.push_back(atom);
                }
                embed_block(atom, c_);
            }
        }
        return out;
    }

private:
    LayeredDiscreteMeasure parent_;
    IndexSet a_, b_, c_;
    PerpConvention conv_;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

LayeredDiscreteMeasure::LayeredDiscreteMeasure(PuncturedSpace space, std::shared_ptr<const LayerSource> source,
                                               FaceClassMap classes, std::string provenance)
    : space_(space),
      source_(std::move(source)),
      classes_(std::move(classes)),
      provenance_(std::move(provenance)),
      cache_(std::make_shared<Cache>()) {
    if (classes_.dims() != space_.dims()) throw std::invalid_argument("face class map has wrong dimension");
}

LayeredDiscreteMeasure LayeredDiscreteMeasure::empty(PuncturedSpace space) {
    return LayeredDiscreteMeasure(space, std::make_shared<EmptySource>(), FaceClassMap(space.dims()), "empty");
}

const std::vector<Atom>& LayeredDiscreteMeasure::layer(int h) const {
    if (h < 1) throw std::invalid_argument("layers are numbered from 1");
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->layers.find(h);
    if (it != cache_->layers.end()) return it->second;
    auto atoms = canonical_atoms(source_->layer(h));
    for (const auto& a : atoms) {
        if (!space_.admits(a.point) || a.weight <= 0)
            throw InconsistentMeasure("generator produced an invalid atom " + to_string(a.point));
        if (layer_of(a.point) != h)
            throw InconsistentMeasure("atom " + to_string(a.point) + " generated outside layer " +
                                      std::to_string(h));
        if (classes_.get(face_of(a.point)).is_zero())
            throw InconsistentMeasure("atom " + to_string(a.point) + " lies on the Zero face " +
                                      face_of(a.point).to_string());
    }
    return cache_->layers.emplace(h, std::move(atoms)).first->second;
}

std::vector<Atom> LayeredDiscreteMeasure::atoms_up_to(int depth) const {
    std::vector<Atom> out;
    for (int h = 1; h <= depth; ++h) {
        const auto& l = layer(h);
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

const TemplateSource* LayeredDiscreteMeasure::as_template() const {
    return dynamic_cast<const TemplateSource*>(source_.get());
}

void LayeredDiscreteMeasure::validate(int depth) const {
    std::map<Face, Rational> sums;
    for (int h = 1; h <= depth; ++h) {
        for (const auto& a : layer(h)) sums[face_of(a.point)] += a.weight;
    }
    for (const auto& [face, sum] : sums) {
        auto cls = classes_.get(face);
        if (cls.is_finite() && sum > cls.total())
            throw InconsistentMeasure("face " + face.to_string() + " exceeds its declared total " +
                                      to_string(cls.total()));
    }
}

std::optional<int> LayeredDiscreteMeasure::exhaustion_depth(Face face, int max_depth) const {
    auto cls = classes_.get(face);
    if (cls.is_zero()) return 0;
    if (!cls.is_finite()) return std::nullopt;
    Rational sum = 0;
    for (int h = 1; h <= max_depth; ++h) {
        for (const auto& a : layer(h)) {
            if (face_of(a.point) == face) sum += a.weight;
        }
        if (sum == cls.total()) return h;
        if (sum > cls.total())
            throw InconsistentMeasure("face " + face.to_string() + " exceeds its declared total");
    }
    return std::nullopt;
}

std::string LayeredDiscreteMeasure::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(provenance_)));
    return buf;
}

std::string Mass::to_string() const {
    return infinite ? "inf" : pppci::to_string(value);
}

namespace {

std::optional<Rational> abs_infimum_nonzero(const CoordSet& s) {
    std::optional<Rational> best;
    for (const auto& i : s.pieces()) {
        if (i.lo && i.hi && *i.lo == 0 && *i.hi == 0) continue;
        CoordSet single = CoordSet::interval(i.lo, i.hi, i.lo_closed, i.hi_closed);
        auto v = single.abs_infimum();
        if (v && (!best || *v < *best)) best = v;
    }
    return best;
}

// Result of scanning one face slice R ∩ {face(y) = S}.
struct SliceScan {
    bool infinite = false;
    std::vector<Atom> atoms;
};

void collect_face_atoms(const LayeredDiscreteMeasure& m, const Rectangle& r, Face face, int depth,
                        std::vector<Atom>& out) {
    for (int h = 1; h <= depth; ++h) {
        for (const auto& a : m.layer(h)) {
            if (face_of(a.point) == face && r.contains(a.point)) out.push_back(a);
        }
    }
}

SliceScan scan_unbounded(const LayeredDiscreteMeasure& m, const Rectangle& r) {
    SliceScan scan;
    const auto support = m.space().support();
    for (const auto& [face, cls] : m.face_classes().entries()) {
        bool meets = true;
        for (int v = 0; v < m.dims() && meets; ++v) {
            meets = face.contains(v) ? r[v].has_nonzero(support) : r[v].contains_zero();
        }
        if (!meets) continue;

        std::optional<int> slice_depth;
        for (int v : face.members()) {
            auto inf = abs_infimum_nonzero(r[v]);
            if (!inf || *inf == 0) continue;
            int h = 1;
            while (!(pow2_neg(h) < *inf)) ++h;
            if (!slice_depth || h < *slice_depth) slice_depth = h;
        }
        if (slice_depth) {
            collect_face_atoms(m, r, face, *slice_depth, scan.atoms);
            continue;
        }
        if (cls.is_infinite()) {
            bool germ = true;
            for (int v : face.members()) germ = germ && r[v].contains_punctured_neighbourhood(support);
            if (!germ)
                throw UndecidableMass("cannot classify the mass of " + r.to_string() + " on the Infinite face " +
                                      face.to_string());
            scan.infinite = true;
            continue;
        }
        auto depth = m.exhaustion_depth(face);
        if (depth) {
            collect_face_atoms(m, r, face, *depth, scan.atoms);
            continue;
        }
        bool whole = true;
        for (int v : face.members()) whole = whole && r[v].contains_all_nonzero(support);
        if (!whole)
            throw UndecidableMass("cannot enumerate the Finite face " + face.to_string() + " inside " +
                                  r.to_string());
        // Whole face inside R: its total is known, its atoms are not.
        scan.atoms.push_back(Atom{Point{}, cls.total()});
    }
    return scan;
}

}  // namespace

Mass mass_on_rectangle(const LayeredDiscreteMeasure& measure, const Rectangle& r) {
    if (r.dims() != measure.dims()) throw std::invalid_argument("rectangle dimension mismatch");
    if (r.is_empty()) return Mass::finite(0);
    Rational sum = 0;
    if (auto depth = r.bound_depth()) {
        for (int h = 1; h <= *depth; ++h) {
            for (const auto& a : measure.layer(h)) {
                if (r.contains(a.point)) sum += a.weight;
            }
        }
        return Mass::finite(sum);
    }
    auto scan = scan_unbounded(measure, r);
    if (scan.infinite) return Mass::infinity();
    for (const auto& a : scan.atoms) sum += a.weight;
    return Mass::finite(sum);
}

std::vector<Atom> atoms_in(const LayeredDiscreteMeasure& measure, const Rectangle& r) {
    if (r.dims() != measure.dims()) throw std::invalid_argument("rectangle dimension mismatch");
    if (r.is_empty()) return {};
    std::vector<Atom> out;
    if (auto depth = r.bound_depth()) {
        for (int h = 1; h <= *depth; ++h) {
            for (const auto& a : measure.layer(h)) {
                if (r.contains(a.point)) out.push_back(a);
            }
        }
        return out;
    }
    auto scan = scan_unbounded(measure, r);
    if (scan.infinite) throw DomainError("window " + r.to_string() + " has infinite mass");
    for (auto& a : scan.atoms) {
        if (a.point.empty())
            throw UndecidableMass("window " + r.to_string() + " has finite mass but its atoms cannot be enumerated");
    }
    return canonical_atoms(std::move(scan.atoms));
}

FiniteRestriction normalized_restriction(const LayeredDiscreteMeasure& measure, const Rectangle& r,
                                         std::optional<int> depth) {
    std::vector<Atom> atoms;
    if (depth) {
        auto bound = r.bound_depth();
        if (!bound) throw DomainError("normalized restriction needs a bounded rectangle");
        int top = std::min(*bound, *depth);
        for (int h = 1; h <= top; ++h) {
            for (const auto& a : measure.layer(h)) {
                if (r.contains(a.point)) atoms.push_back(a);
            }
        }
    } else {
        atoms = atoms_in(measure, r);
    }
    Rational mass = 0;
    for (const auto& a : atoms) mass += a.weight;
    if (mass == 0) throw DomainError("rectangle " + r.to_string() + " has zero mass");
    FiniteRestriction out;
    out.mass = mass;
    out.window = r.to_string();
    for (auto& a : atoms) out.atoms.push_back(Atom{a.point, a.weight / mass});
    out.total = 1;
    return out;
}

Marginal marginalize(const LayeredDiscreteMeasure& measure, IndexSet d) {
    const IndexSet all = measure.space().all();
    if (d.empty() || !d.subset_of(all)) throw std::invalid_argument("marginal coordinates must be a nonempty subset of V");
    FaceMassClass origin;
    if (d == all) return Marginal{measure, origin};
    FaceClassMap classes(d.size());
    for (const auto& [face, cls] : measure.face_classes().entries()) {
        IndexSet image = face & d;
        if (image.empty()) {
            origin += cls;
            continue;
        }
        // Relabel to 0..|D|-1 in ascending order of D.
        std::vector<int> rel;
        int i = 0;
        for (int v : d.members()) {
            if (image.contains(v)) rel.push_back(i);
            ++i;
        }
        classes.add(IndexSet::of(rel), cls);
    }
    auto source = std::make_shared<MarginalSource>(measure, d);
    LayeredDiscreteMeasure out(PuncturedSpace(d.size(), measure.space().support()), std::move(source),
                               std::move(classes), "marginal(" + d.to_string() + "," + measure.provenance() + ")");
    return Marginal{std::move(out), origin};
}

LayeredDiscreteMeasure build_perp_measure(const LayeredDiscreteMeasure& measure, IndexSet a, IndexSet b,
                                          IndexSet c, PerpConvention convention) {
    const IndexSet all = measure.space().all();
    if (a.intersects(b) || a.intersects(c) || b.intersects(c) || (a | b | c) != all)
        throw std::invalid_argument("perp measure needs a partition A, B, C of V");
    FaceClassMap classes(measure.dims());
    for (const auto& [face, cls] : measure.face_classes().entries()) {
        if (convention == PerpConvention::MarginalEmbedding) {
            if (face.intersects(a)) classes.add(face & a, cls);
            if (face.intersects(b)) classes.add(face & b, cls);
        } else if (face.subset_of(a) || face.subset_of(b)) {
            classes.add(face, cls);
        }
        if (face.intersects(c)) classes.add(face & c, cls);
    }
    std::string tag = std::string("perp(") +
                      (convention == PerpConvention::MarginalEmbedding ? "marginal" : "face_restricted") + "," +
                      a.to_string() + "," + b.to_string() + "," + c.to_string() + "," + measure.provenance() + ")";
    return LayeredDiscreteMeasure(measure.space(), std::make_shared<PerpSource>(measure, a, b, c, convention),
                                  std::move(classes), std::move(tag));
}

LayeredDiscreteMeasure template_sum(const std::vector<LayeredDiscreteMeasure>& parts, std::string provenance) {
    if (parts.empty()) throw std::invalid_argument("template_sum needs at least one part");
    const auto space = parts.front().space();
    std::vector<std::vector<Atom>> explicit_layers;
    std::vector<Atom> repeat;
    for (const auto& p : parts) {
        if (p.space() != space) throw ConfigError("template_sum parts live on different spaces");
        const auto* t = p.as_template();
        if (!t) throw ConfigError("template_sum needs template-generated parts (" + p.provenance() + ")");
        if (t->explicit_layers().size() > explicit_layers.size()) explicit_layers.resize(t->explicit_layers().size());
        for (std::size_t h = 0; h < t->explicit_layers().size(); ++h) {
            auto& dst = explicit_layers[h];
            dst.insert(dst.end(), t->explicit_layers()[h].begin(), t->explicit_layers()[h].end());
        }
        repeat.insert(repeat.end(), t->repeat().begin(), t->repeat().end());
    }
    for (auto& l : explicit_layers) l = canonical_atoms(std::move(l));
    repeat = canonical_atoms(std::move(repeat));
    auto source = std::make_shared<TemplateSource>(space.dims(), std::move(explicit_layers), std::move(repeat));
    auto classes = source->derived_classes();
    return LayeredDiscreteMeasure(space, std::move(source), std::move(classes), std::move(provenance));
}

ExplosivenessReport check_assumption_iv(const LayeredDiscreteMeasure& measure) {
    return check_assumption_iv(measure.face_classes());
}

E1Equivalence check_e1_equivalence(const FaceClassMap& classes) {
    E1Equivalence out;
    out.assumption_iv = check_assumption_iv(classes);
    out.e1 = check_e1(classes);
    out.agree = out.assumption_iv.pass == out.e1.pass;
    return out;
}

E1Equivalence check_e1_equivalence(const LayeredDiscreteMeasure& measure) {
    return check_e1_equivalence(measure.face_classes());
}

}  // namespace pppci
