#include "pppci/kernel.hpp"

#include "pppci/error.hpp"

#include <algorithm>

namespace pppci {

KernelRow KernelRow::make(std::vector<std::pair<Point, Rational>> entries) {
    if (entries.empty()) throw ConfigError("kernel row is empty");
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    KernelRow row;
    row.dims_ = static_cast<int>(entries.front().first.size());
    Rational sum = 0;
    for (auto& [value, p] : entries) {
        if (static_cast<int>(value.size()) != row.dims_) throw ConfigError("kernel row mixes target dimensions");
        if (p <= 0) throw ConfigError("kernel probabilities must be positive");
        sum += p;
        if (!row.values_.empty() && row.values_.back() == value) {
            row.probs_.back() += p;
        } else {
            row.values_.push_back(std::move(value));
            row.probs_.push_back(std::move(p));
        }
    }
    if (sum != 1) throw ConfigError("kernel row sums to " + to_string(sum) + ", not 1");
    double acc = 0;
    for (const auto& p : row.probs_) {
        acc += to_double(p);
        row.cumulative_.push_back(acc);
    }
    row.cumulative_.back() = 1.0;
    return row;
}

KernelRow KernelRow::dirac(Point value) {
    std::vector<std::pair<Point, Rational>> e;
    e.emplace_back(std::move(value), Rational(1));
    return make(std::move(e));
}

std::size_t KernelRow::draw_index(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return cumulative_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

Rational KernelRow::prob_in(const Rectangle& r) const {
    Rational p = 0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (r.contains(values_[i])) p += probs_[i];
    }
    return p;
}

bool KernelRow::is_dirac_at_origin() const {
    return values_.size() == 1 && is_origin(values_.front());
}

KernelRow KernelRow::rescaled(const Rational& s) const {
    KernelRow out = *this;
    for (auto& v : out.values_) v = scaled(v, s);
    return out;
}

TableKernel::TableKernel(int source_dims, int target_dims, std::map<Point, KernelRow> rows)
    : source_dims_(source_dims),
      target_dims_(target_dims),
      rows_(std::move(rows)),
      origin_row_(KernelRow::dirac(zero_point(target_dims))) {
    for (const auto& [y, row] : rows_) {
        if (static_cast<int>(y.size()) != source_dims_ || row.target_dims() != target_dims_)
            throw ConfigError("kernel row has the wrong dimension");
        if (is_origin(y) && !row.is_dirac_at_origin())
            throw DomainError("kernel row at the origin must be the point mass at the target origin");
    }
}

const KernelRow& TableKernel::row(const Point& y) const {
    auto it = rows_.find(y);
    if (it != rows_.end()) return it->second;
    if (is_origin(y)) return origin_row_;
    throw DomainError("kernel has no row for " + to_string(y));
}

SelfSimilarKernel::SelfSimilarKernel(int source_dims, int target_dims, std::map<Point, KernelRow> rows,
                                     std::optional<KernelRow> default_row)
    : source_dims_(source_dims),
      target_dims_(target_dims),
      rows_(std::move(rows)),
      default_(std::move(default_row)),
      origin_row_(KernelRow::dirac(zero_point(target_dims))) {
    auto check = [&](const KernelRow& row) {
        if (row.target_dims() != target_dims_) throw ConfigError("kernel row has the wrong target dimension");
        for (const auto& v : row.values()) {
            for (const auto& x : v) {
                if (abs(x) > 1) throw ConfigError("self-similar kernel values must satisfy |v| <= 1");
            }
        }
    };
    for (const auto& [key, row] : rows_) {
        if (static_cast<int>(key.size()) != source_dims_ || is_origin(key))
            throw ConfigError("invalid kernel key " + to_string(key));
        if (layer_of(key) != 1) throw ConfigError("kernel key " + to_string(key) + " is not in layer 1");
        check(row);
    }
    if (default_) check(*default_);
}

const KernelRow& SelfSimilarKernel::row(const Point& y) const {
    if (static_cast<int>(y.size()) != source_dims_) throw DomainError("kernel source dimension mismatch");
    if (is_origin(y)) return origin_row_;
    std::lock_guard lock(mutex_);
    auto hit = cache_.find(y);
    if (hit != cache_.end()) return hit->second;
    int layer = layer_of(y);
    Point key = scaled(y, pow2_neg(1 - layer));
    const KernelRow* base = nullptr;
    if (auto it = rows_.find(key); it != rows_.end()) {
        base = &it->second;
    } else if (default_) {
        base = &*default_;
    } else {
        throw DomainError("kernel has no row for " + to_string(y));
    }
    return cache_.emplace(y, base->rescaled(pow2_neg(layer - 1))).first->second;
}

const KernelRow& IdentityKernel::row(const Point& y) const {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(y);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(y, KernelRow::dirac(y)).first->second;
}

ConstantKernel::ConstantKernel(int source_dims, Point z)
    : source_dims_(source_dims),
      z_(z),
      row_(KernelRow::dirac(z)),
      origin_row_(KernelRow::dirac(zero_point(static_cast<int>(z.size())))) {}

const KernelRow& ConstantKernel::row(const Point& y) const {
    return is_origin(y) ? origin_row_ : row_;
}

ConditionalKernel::ConditionalKernel(IndexSet a, IndexSet b, IndexSet c, int dims, int depth,
                                     std::vector<DisintegrationRow> rows)
    : a_(a), b_(b), c_(c), dims_(dims), depth_(depth), rows_(std::move(rows)) {
    std::stable_sort(rows_.begin(), rows_.end(), [](const DisintegrationRow& x, const DisintegrationRow& y) {
        if (x.layer != y.layer) return x.layer < y.layer;
        return x.base < y.base;
    });
    for (std::size_t i = 0; i < rows_.size(); ++i) index_.emplace(rows_[i].base, i);
}

const DisintegrationRow* ConditionalKernel::find(const Point& y_c) const {
    auto it = index_.find(y_c);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

FiniteRestriction ConditionalKernel::base() const {
    FiniteRestriction out;
    for (const auto& r : rows_) {
        out.atoms.push_back(Atom{r.base, r.base_mass});
        out.total += r.base_mass;
    }
    out.mass = out.total;
    out.window = "base C=" + c_.to_string() + " depth " + std::to_string(depth_);
    return out;
}

namespace {

KernelRow row_from_map(const std::map<Point, Rational>& m) {
    std::vector<std::pair<Point, Rational>> e(m.begin(), m.end());
    return KernelRow::make(std::move(e));
}

}  // namespace

std::shared_ptr<TableKernel> ConditionalKernel::a_kernel() const {
    std::map<Point, KernelRow> rows;
    for (const auto& r : rows_) rows.emplace(r.base, row_from_map(r.marginal_a));
    return std::make_shared<TableKernel>(c_.size(), a_.size(), std::move(rows));
}

std::shared_ptr<TableKernel> ConditionalKernel::b_kernel() const {
    std::map<Point, KernelRow> rows;
    for (const auto& r : rows_) rows.emplace(r.base, row_from_map(r.marginal_b));
    return std::make_shared<TableKernel>(c_.size(), b_.size(), std::move(rows));
}

std::shared_ptr<TableKernel> ConditionalKernel::joint_kernel() const {
    std::map<Point, KernelRow> rows;
    for (const auto& r : rows_) {
        std::vector<std::pair<Point, Rational>> e;
        for (const auto& [ab, p] : r.joint) {
            Point v = ab.first;
            v.insert(v.end(), ab.second.begin(), ab.second.end());
            e.emplace_back(std::move(v), p);
        }
        rows.emplace(r.base, KernelRow::make(std::move(e)));
    }
    return std::make_shared<TableKernel>(c_.size(), a_.size() + b_.size(), std::move(rows));
}

ConditionalKernel disintegrate(const LayeredDiscreteMeasure& measure, IndexSet a, IndexSet b, IndexSet c,
                               int depth) {
    if (c.empty()) throw std::invalid_argument("disintegration needs a non-empty conditioning set");
    if (a.intersects(b) || a.intersects(c) || b.intersects(c) || !(a | b | c).subset_of(measure.space().all()))
        throw std::invalid_argument("disintegration needs disjoint subsets of V");
    std::map<Point, DisintegrationRow> groups;
    // Atoms with y_C in layer <= depth all lie in layers <= depth.
    for (int h = 1; h <= depth; ++h) {
        for (const auto& atom : measure.layer(h)) {
            Point yc = project(atom.point, c);
            if (is_origin(yc)) continue;
            int lc = layer_of(yc);
            if (lc > depth) continue;
            auto& g = groups[yc];
            g.layer = lc;
            g.base_mass += atom.weight;
            g.joint[{project(atom.point, a), project(atom.point, b)}] += atom.weight;
        }
    }
    std::vector<DisintegrationRow> rows;
    rows.reserve(groups.size());
    for (auto& [yc, g] : groups) {
        g.base = yc;
        for (auto& [ab, w] : g.joint) {
            w /= g.base_mass;
            g.marginal_a[ab.first] += w;
            g.marginal_b[ab.second] += w;
        }
        rows.push_back(std::move(g));
    }
    return ConditionalKernel(a, b, c, measure.dims(), depth, std::move(rows));
}

LayeredDiscreteMeasure from_kernel_product(const LayeredDiscreteMeasure& base_c, const SelfSimilarKernel& kernel_a,
                                           const SelfSimilarKernel& kernel_b, Blocks blocks, int dims,
                                           const std::vector<LayeredDiscreteMeasure>& axis_parts,
                                           std::string provenance) {
    const IndexSet all = IndexSet::full(dims);
    if (blocks.c.empty() || blocks.a.intersects(blocks.b) || blocks.a.intersects(blocks.c) ||
        blocks.b.intersects(blocks.c) || (blocks.a | blocks.b | blocks.c) != all)
        throw ConfigError("kernel_product blocks must partition V with a non-empty C");
    if (base_c.dims() != blocks.c.size()) throw ConfigError("base measure must live on E_C");
    if (kernel_a.source_dims() != blocks.c.size() || kernel_b.source_dims() != blocks.c.size() ||
        kernel_a.target_dims() != blocks.a.size() || kernel_b.target_dims() != blocks.b.size())
        throw ConfigError("kernel dimensions do not match the blocks");
    const auto* tpl = base_c.as_template();
    if (!tpl) throw ConfigError("kernel_product needs a template-generated base measure");

    auto assemble = [&](const Point& yc, const Point& ya, const Point& yb) {
        Point p = zero_point(dims);
        auto place = [&](const Point& sub, IndexSet block) {
            int i = 0;
            for (int v : block.members()) p[static_cast<std::size_t>(v)] = sub[static_cast<std::size_t>(i++)];
        };
        place(ya, blocks.a);
        place(yb, blocks.b);
        place(yc, blocks.c);
        return p;
    };
    auto expand = [&](const Atom& base, std::vector<Atom>& out) {
        const KernelRow& ra = kernel_a.row(base.point);
        const KernelRow& rb = kernel_b.row(base.point);
        for (std::size_t i = 0; i < ra.size(); ++i) {
            for (std::size_t j = 0; j < rb.size(); ++j) {
                out.push_back(Atom{assemble(base.point, ra.values()[i], rb.values()[j]),
                                   base.weight * ra.probs()[i] * rb.probs()[j]});
            }
        }
    };

    std::vector<std::vector<Atom>> explicit_layers(tpl->explicit_layers().size());
    for (std::size_t h = 0; h < tpl->explicit_layers().size(); ++h) {
        for (const auto& atom : tpl->explicit_layers()[h]) expand(atom, explicit_layers[h]);
    }
    std::vector<Atom> repeat;
    for (const auto& atom : tpl->repeat()) expand(atom, repeat);

    PuncturedSpace space(dims, base_c.space().support());
    auto src = std::make_shared<TemplateSource>(dims, std::move(explicit_layers), std::move(repeat));
    auto classes = src->derived_classes();
    LayeredDiscreteMeasure product(space, std::move(src), std::move(classes), provenance);
    if (axis_parts.empty()) return product;
    std::vector<LayeredDiscreteMeasure> parts{product};
    for (const auto& p : axis_parts) {
        if (p.dims() != dims) throw ConfigError("axis part has the wrong dimension");
        for (const auto& [face, cls] : p.face_classes().entries()) {
            if (face.intersects(blocks.c)) throw ConfigError("axis parts must vanish off {y_C = 0}");
        }
        parts.push_back(p);
    }
    return template_sum(parts, std::move(provenance));
}

}  // namespace pppci
