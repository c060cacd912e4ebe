#ifndef PPPCI_CI_HPP
#define PPPCI_CI_HPP

#include "pppci/face_class.hpp"
#include "pppci/measure.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pppci {

struct CiQuery {
    IndexSet a, b, c;

    // "1,2 _|_ 3 | 4" with 1-based indices; either side and the condition may
    // be empty. Throws ConfigError on malformed or overlapping sets.
    static CiQuery parse(std::string_view text, int dims);
    void validate(int dims) const;
    IndexSet support() const { return a | b | c; }
    bool trivial() const { return a.empty() || b.empty(); }
    std::string to_string() const;
};

enum class CiMethod { DefinitionB, ReducedC, KernelD };
std::string to_string(CiMethod m);

struct CiWitness {
    enum class Kind { Rectangle, KernelCell, Face };
    Kind kind = Kind::Rectangle;
    // Rectangle: R_{h,v} (v is a coordinate of V, 0-based). KernelCell: base
    // atom c with its layer in h.
    int v = -1;
    int h = 0;
    Point a, b, c;
    // Rectangle: P(a,b,c)P(c) vs P(a,c)P(b,c). KernelCell: row(a,b) vs rowA(a)rowB(b).
    Rational lhs, rhs;
    // Face: the offending face and its aggregated class.
    Face face;
    FaceMassClass face_mass;

    std::string describe() const;
};

struct CiVerdict {
    bool holds = true;
    CiMethod method = CiMethod::DefinitionB;
    int depth = 0;
    std::optional<CiWitness> witness;
    CiQuery query;
    double wall_time_ms = 0;
};

struct RestrictionCheck {
    bool holds = true;
    std::optional<CiWitness> witness;  // kind Rectangle, v/h unset
};

// Classical CI Y_A ⊥ Y_B | Y_C for Y ~ P, in exact arithmetic.
RestrictionCheck ci_under_restriction(const FiniteRestriction& p, IndexSet a, IndexSet b, IndexSet c);

// All three throw AssumptionViolation when assumption (iv) fails.
CiVerdict ci_check_definition(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth);
CiVerdict ci_check_reduced(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth);
CiVerdict ci_check_kernel(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth);
CiVerdict ci_check(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth, CiMethod method);

// Re-evaluates a witness from scratch; true iff the same violation (same
// lhs/rhs or face class) is reproduced.
bool reproduce_witness(const LayeredDiscreteMeasure& measure, const CiQuery& q, const CiWitness& w);

struct EquivalenceReport {
    bool agree = true;
    CiVerdict definition, reduced, kernel;
};

EquivalenceReport equivalence_crosscheck(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth);

enum class BivariateCase {
    TrivialZero,
    Separated_b1,
    Separated_b2,
    Separated_b3,
    FiniteFactorized_c,
    FiniteFactorized_d,
    NotIndependent,
};
std::string to_string(BivariateCase c);
bool is_independent(BivariateCase c);

struct BivariateReport {
    BivariateCase result = BivariateCase::NotIndependent;
    FaceMassClass total;
    FaceMassClass interior;  // Λ(y_1 != 0, y_2 != 0)
    FaceMassClass y1_zero;   // Λ(y_1 = 0)
    FaceMassClass y2_zero;   // Λ(y_2 = 0)
    std::optional<bool> factorizes;  // evaluated for the finite cases
};

// d = 2, or the two blocks x1, x2 of a larger space (other coordinates are
// marginalized away). Throws UndecidableMass when a finite part cannot be
// enumerated.
BivariateReport classify_bivariate(const LayeredDiscreteMeasure& measure);
BivariateReport classify_bivariate(const LayeredDiscreteMeasure& measure, IndexSet x1, IndexSet x2);

using CiOracle = std::function<bool(IndexSet a, IndexSet b, IndexSet c)>;

struct SemigraphoidViolation {
    std::string axiom;
    IndexSet a, b, c, d;
};

struct SemigraphoidReport {
    int dims = 0;
    long quadruples = 0;
    long premises_checked = 0;
    long oracle_calls = 0;
    std::vector<SemigraphoidViolation> violations;
    bool pass() const { return violations.empty(); }
};

// Enumerates every assignment of V to {A, B, C, D, unused} and checks
// symmetry, decomposition, weak union and contraction. The oracle is called
// once per distinct triple.
SemigraphoidReport semigraphoid_check(const CiOracle& oracle, int dims);

// Oracle backed by ci_check_kernel at the given depth.
CiOracle kernel_oracle(const LayeredDiscreteMeasure& measure, int depth);

}  // namespace pppci

#endif
