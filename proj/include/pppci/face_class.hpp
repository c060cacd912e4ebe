#ifndef PPPCI_FACE_CLASS_HPP
#define PPPCI_FACE_CLASS_HPP

#include "pppci/rational.hpp"
#include "pppci/space.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pppci {

// Declared total mass of one face: zero, a finite positive total, or infinite.
class FaceMassClass {
public:
    enum class Kind { Zero, Finite, Infinite };

    FaceMassClass() = default;
    static FaceMassClass zero() { return {}; }
    // finite(0) collapses to zero.
    static FaceMassClass finite(Rational total);
    static FaceMassClass infinite();

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_infinite() const { return kind_ == Kind::Infinite; }
    // Zero for Zero, the total for Finite; undefined for Infinite.
    const Rational& total() const { return total_; }

    // Infinite dominates, finite totals add.
    FaceMassClass operator+(const FaceMassClass& other) const;
    FaceMassClass& operator+=(const FaceMassClass& other) { return *this = *this + other; }

    bool operator==(const FaceMassClass& other) const;

    // "zero", "finite(3/2)", "infinite"
    std::string to_string() const;

private:
    Kind kind_ = Kind::Zero;
    Rational total_ = 0;
};

// Face -> mass class; faces not present are Zero.
class FaceClassMap {
public:
    FaceClassMap() = default;
    explicit FaceClassMap(int dims) : dims_(dims) {}

    int dims() const { return dims_; }
    FaceMassClass get(Face face) const;
    void set(Face face, FaceMassClass cls);
    void add(Face face, const FaceMassClass& cls);
    const std::map<Face, FaceMassClass>& entries() const { return classes_; }

    FaceMassClass aggregate(const std::function<bool(Face)>& pred) const;
    FaceMassClass total() const;
    // Λ(y_A ≠ 0, y_B = 0)
    FaceMassClass nonzero_zero(IndexSet a, IndexSet b) const;
    // Λ(y_A ≠ 0, y_B ≠ 0, y_C = 0)
    FaceMassClass interior(IndexSet a, IndexSet b, IndexSet c) const;

private:
    int dims_ = 0;
    std::map<Face, FaceMassClass> classes_;
};

struct ExplosivenessPair {
    IndexSet a;
    IndexSet b;
    FaceMassClass aggregate;
    bool pass = true;
};

struct ExplosivenessReport {
    bool pass = true;
    std::vector<ExplosivenessPair> pairs;
    std::vector<ExplosivenessPair> offending() const;
};

// For every disjoint (A ≠ ∅, B), Λ(y_A ≠ 0, y_B = 0) ∈ {0, ∞}.
ExplosivenessReport check_assumption_iv(const FaceClassMap& classes);

// For every D ⊆ V and d ∈ D, Λ(y_d ≠ 0, y_{V∖D} = 0) ∈ {0, ∞}. Evaluated
// independently of check_assumption_iv.
ExplosivenessReport check_e1(const FaceClassMap& classes);

}  // namespace pppci

#endif
