#include "pppci/face_class.hpp"

namespace pppci {

FaceMassClass FaceMassClass::finite(Rational total) {
    FaceMassClass c;
    if (total < 0) throw std::invalid_argument("face total must be non-negative");
    if (total == 0) return c;
    c.kind_ = Kind::Finite;
    c.total_ = std::move(total);
    return c;
}

FaceMassClass FaceMassClass::infinite() {
    FaceMassClass c;
    c.kind_ = Kind::Infinite;
    return c;
}

FaceMassClass FaceMassClass::operator+(const FaceMassClass& other) const {
    if (is_infinite() || other.is_infinite()) return infinite();
    return finite(total_ + other.total_);
}

bool FaceMassClass::operator==(const FaceMassClass& other) const {
    if (kind_ != other.kind_) return false;
    return kind_ != Kind::Finite || total_ == other.total_;
}

std::string FaceMassClass::to_string() const {
    switch (kind_) {
        case Kind::Zero:
            return "zero";
        case Kind::Finite:
            return "finite(" + pppci::to_string(total_) + ")";
        case Kind::Infinite:
            return "infinite";
    }
    return "?";
}

FaceMassClass FaceClassMap::get(Face face) const {
    auto it = classes_.find(face);
    return it == classes_.end() ? FaceMassClass::zero() : it->second;
}

void FaceClassMap::set(Face face, FaceMassClass cls) {
    if (face.empty()) throw std::invalid_argument("the empty face is not part of the punctured space");
    if (cls.is_zero()) {
        classes_.erase(face);
    } else {
        classes_[face] = std::move(cls);
    }
}

void FaceClassMap::add(Face face, const FaceMassClass& cls) {
    set(face, get(face) + cls);
}

FaceMassClass FaceClassMap::aggregate(const std::function<bool(Face)>& pred) const {
    FaceMassClass sum;
    for (const auto& [face, cls] : classes_) {
        if (pred(face)) sum += cls;
    }
    return sum;
}

FaceMassClass FaceClassMap::total() const {
    return aggregate([](Face) { return true; });
}

FaceMassClass FaceClassMap::nonzero_zero(IndexSet a, IndexSet b) const {
    return aggregate([&](Face s) { return s.intersects(a) && !s.intersects(b); });
}

FaceMassClass FaceClassMap::interior(IndexSet a, IndexSet b, IndexSet c) const {
    return aggregate([&](Face s) { return s.intersects(a) && s.intersects(b) && !s.intersects(c); });
}

std::vector<ExplosivenessPair> ExplosivenessReport::offending() const {
    std::vector<ExplosivenessPair> out;
    for (const auto& p : pairs) {
        if (!p.pass) out.push_back(p);
    }
    return out;
}

ExplosivenessReport check_assumption_iv(const FaceClassMap& classes) {
    ExplosivenessReport report;
    const IndexSet all = IndexSet::full(classes.dims());
    for (std::uint32_t am = 1; am <= all.mask(); ++am) {
        IndexSet a = IndexSet::from_mask(am);
        if (!a.subset_of(all)) continue;
        IndexSet rest = all - a;
        // Enumerate every B ⊆ V \ A, including B = ∅.
        std::uint32_t bm = rest.mask();
        while (true) {
            IndexSet b = IndexSet::from_mask(bm);
            ExplosivenessPair pair{a, b, classes.nonzero_zero(a, b), true};
            pair.pass = !pair.aggregate.is_finite();
            report.pass = report.pass && pair.pass;
            report.pairs.push_back(pair);
            if (bm == 0) break;
            bm = (bm - 1) & rest.mask();
        }
    }
    return report;
}

ExplosivenessReport check_e1(const FaceClassMap& classes) {
    ExplosivenessReport report;
    const IndexSet all = IndexSet::full(classes.dims());
    for (std::uint32_t dm = 1; dm <= all.mask(); ++dm) {
        IndexSet d_set = IndexSet::from_mask(dm);
        if (!d_set.subset_of(all)) continue;
        IndexSet outside = all - d_set;
        for (int d : d_set.members()) {
            // Sum over faces S with d ∈ S and S ⊆ D.
            FaceMassClass agg =
                classes.aggregate([&](Face s) { return s.contains(d) && s.subset_of(d_set); });
            ExplosivenessPair pair{IndexSet::of({d}), outside, agg, !agg.is_finite()};
            report.pass = report.pass && pair.pass;
            report.pairs.push_back(pair);
        }
    }
    return report;
}

}  // namespace pppci
