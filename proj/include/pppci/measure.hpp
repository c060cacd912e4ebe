#ifndef PPPCI_MEASURE_HPP
#define PPPCI_MEASURE_HPP

#include "pppci/face_class.hpp"
#include "pppci/rational.hpp"
#include "pppci/space.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pppci {

// Layers probed when a Finite face has to be enumerated exhaustively.
inline constexpr int kProbeDepth = 48;

struct Atom {
    Point point;
    Rational weight;
};

// Deterministic generator h -> atoms of layer h. Implementations must be pure.
class LayerSource {
public:
    virtual ~LayerSource() = default;
    virtual std::vector<Atom> layer(int h) const = 0;
};

// Explicit atoms for the first layers plus a self-similar part: every repeat
// atom r (max|r| <= 1, lying in layer l) contributes 2^{-(k)} r with the same
// weight to layer l + k for all k >= 0.
class TemplateSource final : public LayerSource {
public:
    TemplateSource(int dims, std::vector<std::vector<Atom>> explicit_layers, std::vector<Atom> repeat);

    std::vector<Atom> layer(int h) const override;

    int dims() const { return dims_; }
    const std::vector<std::vector<Atom>>& explicit_layers() const { return explicit_; }
    const std::vector<Atom>& repeat() const { return repeat_; }

    // Repeating faces are Infinite, faces hit only by explicit atoms are
    // Finite with the exact sum, all others Zero.
    FaceClassMap derived_classes() const;

private:
    int dims_;
    std::vector<std::vector<Atom>> explicit_;
    std::vector<Atom> repeat_;
    std::vector<int> repeat_layer_;
};

// Locally finite atomic measure on the punctured space, generated lazily
// layer by layer. Immutable; copies share the generator and the layer cache.
class LayeredDiscreteMeasure {
public:
    LayeredDiscreteMeasure(PuncturedSpace space, std::shared_ptr<const LayerSource> source,
                           FaceClassMap classes, std::string provenance);

    static LayeredDiscreteMeasure empty(PuncturedSpace space);

    const PuncturedSpace& space() const { return space_; }
    int dims() const { return space_.dims(); }

    // Atoms of layer h, merged by location and sorted lexicographically.
    // Throws InconsistentMeasure when the generator leaves the layer or hits a
    // Zero face.
    const std::vector<Atom>& layer(int h) const;
    std::vector<Atom> atoms_up_to(int depth) const;

    const FaceClassMap& face_classes() const { return classes_; }
    const std::string& provenance() const { return provenance_; }
    const LayerSource& source() const { return *source_; }
    std::shared_ptr<const LayerSource> source_ptr() const { return source_; }
    // Non-null when the measure is generated by a TemplateSource.
    const TemplateSource* as_template() const;

    // Layer containment and face-class consistency up to `depth`.
    void validate(int depth) const;

    // Depth at which the partial sum over `face` reaches its declared Finite
    // total, if that happens within max_depth.
    std::optional<int> exhaustion_depth(Face face, int max_depth = kProbeDepth) const;

    // FNV-1a 64 of the provenance tag, as 16 hex digits.
    std::string digest() const;

private:
    struct Cache {
        std::mutex mutex;
        std::map<int, std::vector<Atom>> layers;
    };

    PuncturedSpace space_;
    std::shared_ptr<const LayerSource> source_;
    FaceClassMap classes_;
    std::string provenance_;
    std::shared_ptr<Cache> cache_;
};

// Λ(R): exact rational, or infinite.
struct Mass {
    bool infinite = false;
    Rational value = 0;

    static Mass finite(Rational v) { return Mass{false, std::move(v)}; }
    static Mass infinity() { return Mass{true, 0}; }
    std::string to_string() const;
    bool operator==(const Mass& o) const { return infinite == o.infinite && (infinite || value == o.value); }
};

// Bounded R: exact sum over layers 1..bound_depth. Unbounded R: classified
// face by face from the declarations; throws UndecidableMass when a face slice
// of R can be neither enumerated nor classified.
Mass mass_on_rectangle(const LayeredDiscreteMeasure& measure, const Rectangle& r);

// Every atom of R, for R of finite, decidable mass. Throws DomainError when
// Λ(R) is infinite and UndecidableMass as above.
std::vector<Atom> atoms_in(const LayeredDiscreteMeasure& measure, const Rectangle& r);

struct FiniteRestriction {
    std::vector<Atom> atoms;
    Rational total = 0;  // sum of atom weights
    Rational mass = 0;   // Λ(window) before any normalization
    std::string window;
};

// P_R: atoms of R (restricted to layers <= depth when given) with weights
// divided by Λ(R). Throws DomainError for zero or infinite mass.
FiniteRestriction normalized_restriction(const LayeredDiscreteMeasure& measure, const Rectangle& r,
                                         std::optional<int> depth = std::nullopt);

struct Marginal {
    LayeredDiscreteMeasure measure;  // on E_D^o, coordinates in ascending order of D
    FaceMassClass origin_mass;       // Λ(y_D = 0_D)
};

Marginal marginalize(const LayeredDiscreteMeasure& measure, IndexSet d);

enum class PerpConvention {
    // (y_A, 0, 0) pushforward of all of Λ plus the same for B and C; keeps
    // every block marginal.
    MarginalEmbedding,
    // Λ restricted to {y_A != 0, y_B = 0, y_C = 0} and {y_A = 0, y_B != 0,
    // y_C = 0}, plus the embedded Λ_C^o. Base measure of the functional
    // representation.
    FaceRestricted,
};

// Λ⊥_{AB;C}. A, B, C must partition V.
LayeredDiscreteMeasure build_perp_measure(const LayeredDiscreteMeasure& measure, IndexSet a, IndexSet b,
                                          IndexSet c,
                                          PerpConvention convention = PerpConvention::MarginalEmbedding);

// Sum of template measures on the same space.
LayeredDiscreteMeasure template_sum(const std::vector<LayeredDiscreteMeasure>& parts, std::string provenance);

ExplosivenessReport check_assumption_iv(const LayeredDiscreteMeasure& measure);

struct E1Equivalence {
    ExplosivenessReport assumption_iv;
    ExplosivenessReport e1;
    bool agree = false;
};

E1Equivalence check_e1_equivalence(const FaceClassMap& classes);
E1Equivalence check_e1_equivalence(const LayeredDiscreteMeasure& measure);

// Merges equal locations and sorts lexicographically.
std::vector<Atom> canonical_atoms(std::vector<Atom> atoms);

}  // namespace pppci

#endif
