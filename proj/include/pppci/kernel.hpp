#ifndef PPPCI_KERNEL_HPP
#define PPPCI_KERNEL_HPP

#include "pppci/measure.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace pppci {

// A finite probability distribution on target points. Probabilities are exact
// and sum to exactly 1; `cumulative` is the double image used for sampling.
class KernelRow {
public:
    KernelRow() = default;
    // Merges repeated values. Throws ConfigError unless every probability is
    // positive and they sum to 1.
    static KernelRow make(std::vector<std::pair<Point, Rational>> entries);
    static KernelRow dirac(Point value);

    std::size_t size() const { return values_.size(); }
    const std::vector<Point>& values() const { return values_; }
    const std::vector<Rational>& probs() const { return probs_; }
    int target_dims() const { return dims_; }

    // u in [0,1)
    std::size_t draw_index(double u) const;
    const Point& draw(double u) const { return values_[draw_index(u)]; }

    // Exact probability of a value set.
    Rational prob_in(const Rectangle& r) const;
    bool is_dirac_at_origin() const;

    KernelRow rescaled(const Rational& s) const;

private:
    int dims_ = 0;
    std::vector<Point> values_;
    std::vector<Rational> probs_;
    std::vector<double> cumulative_;
};

// y ↦ ν(· | y). The origin of the source space maps to δ_0 of the target for
// the kernels used in functional representations.
class SamplableKernel {
public:
    virtual ~SamplableKernel() = default;
    virtual int source_dims() const = 0;
    virtual int target_dims() const = 0;
    // Throws DomainError when no row exists for y.
    virtual const KernelRow& row(const Point& y) const = 0;
};

// Explicit rows for finitely many source points.
class TableKernel final : public SamplableKernel {
public:
    TableKernel(int source_dims, int target_dims, std::map<Point, KernelRow> rows);

    int source_dims() const override { return source_dims_; }
    int target_dims() const override { return target_dims_; }
    const KernelRow& row(const Point& y) const override;
    const std::map<Point, KernelRow>& rows() const { return rows_; }

private:
    int source_dims_;
    int target_dims_;
    std::map<Point, KernelRow> rows_;
    KernelRow origin_row_;
};

// Rows keyed by the layer-1 rescaling of y: for y in layer l the key is
// 2^{l-1} y and the row values are multiplied by 2^{-(l-1)}. Values must
// satisfy |v| <= 1 so that (value, y) stays in the layer of y.
class SelfSimilarKernel final : public SamplableKernel {
public:
    SelfSimilarKernel(int source_dims, int target_dims, std::map<Point, KernelRow> rows,
                      std::optional<KernelRow> default_row);

    int source_dims() const override { return source_dims_; }
    int target_dims() const override { return target_dims_; }
    const KernelRow& row(const Point& y) const override;

    const std::map<Point, KernelRow>& rows() const { return rows_; }
    const std::optional<KernelRow>& default_row() const { return default_; }

private:
    int source_dims_;
    int target_dims_;
    std::map<Point, KernelRow> rows_;
    std::optional<KernelRow> default_;
    KernelRow origin_row_;
    mutable std::mutex mutex_;
    mutable std::map<Point, KernelRow> cache_;
};

class IdentityKernel final : public SamplableKernel {
public:
    explicit IdentityKernel(int dims) : dims_(dims) {}
    int source_dims() const override { return dims_; }
    int target_dims() const override { return dims_; }
    const KernelRow& row(const Point& y) const override;

private:
    int dims_;
    mutable std::mutex mutex_;
    mutable std::map<Point, KernelRow> cache_;
};

// Every non-origin y goes to z; the origin goes to 0.
class ConstantKernel final : public SamplableKernel {
public:
    ConstantKernel(int source_dims, Point z);
    int source_dims() const override { return source_dims_; }
    int target_dims() const override { return static_cast<int>(z_.size()); }
    const KernelRow& row(const Point& y) const override;

private:
    int source_dims_;
    Point z_;
    KernelRow row_;
    KernelRow origin_row_;
};

struct DisintegrationRow {
    Point base;         // y_C
    Rational base_mass; // Λ_C°({y_C})
    int layer = 0;      // layer of y_C in E_C°
    std::map<std::pair<Point, Point>, Rational> joint;  // (y_A, y_B) -> probability
    std::map<Point, Rational> marginal_a;
    std::map<Point, Rational> marginal_b;
};

// Λ_{AB|C°} on the base atoms of Λ_C° in layers 1..depth.
class ConditionalKernel {
public:
    ConditionalKernel(IndexSet a, IndexSet b, IndexSet c, int dims, int depth, std::vector<DisintegrationRow> rows);

    IndexSet a() const { return a_; }
    IndexSet b() const { return b_; }
    IndexSet c() const { return c_; }
    int depth() const { return depth_; }
    // Ordered by layer of y_C, then lexicographically.
    const std::vector<DisintegrationRow>& rows() const { return rows_; }
    const DisintegrationRow* find(const Point& y_c) const;

    // Base as an unnormalized restriction: atoms y_C with their masses.
    FiniteRestriction base() const;

    std::shared_ptr<TableKernel> a_kernel() const;
    std::shared_ptr<TableKernel> b_kernel() const;
    // Target coordinates: A block followed by B block, ascending within each.
    std::shared_ptr<TableKernel> joint_kernel() const;

private:
    IndexSet a_, b_, c_;
    int dims_;
    int depth_;
    std::vector<DisintegrationRow> rows_;
    std::map<Point, std::size_t> index_;
};

// Groups atoms with y_C != 0 (y_C in layers 1..depth) by y_C. A, B, C are
// disjoint subsets of V; coordinates outside A ∪ B ∪ C are ignored.
ConditionalKernel disintegrate(const LayeredDiscreteMeasure& measure, IndexSet a, IndexSet b, IndexSet c,
                               int depth);

struct Blocks {
    IndexSet a, b, c;
};

// Measure on E_V° whose {y_C != 0} part is base ⊗ kernel_a ⊗ kernel_b and
// whose {y_C = 0} part is the sum of the axis parts. The base must be template
// generated on E_C°; axis parts are template measures on E_V° with y_C = 0.
LayeredDiscreteMeasure from_kernel_product(const LayeredDiscreteMeasure& base_c, const SelfSimilarKernel& kernel_a,
                                           const SelfSimilarKernel& kernel_b, Blocks blocks, int dims,
                                           const std::vector<LayeredDiscreteMeasure>& axis_parts,
                                           std::string provenance);

}  // namespace pppci

#endif
