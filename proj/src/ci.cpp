#include "pppci/ci.hpp"

#include "pppci/error.hpp"
#include "pppci/kernel.hpp"

#include <chrono>
#include <map>
#include <tuple>

namespace pppci {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return std::string(s);
}

IndexSet parse_set(std::string_view text, int dims) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '{') {
        if (s.back() != '}') throw ConfigError("unbalanced braces in set '" + s + "'");
        s = trim(std::string_view(s).substr(1, s.size() - 2));
    }
    std::vector<int> members;
    std::size_t pos = 0;
    while (pos <= s.size() && !s.empty()) {
        auto comma = s.find(',', pos);
        std::string item = trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (item.empty()) throw ConfigError("empty element in set '" + s + "'");
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad coordinate index '" + item + "'");
        }
        if (v < 1 || v > dims) throw ConfigError("coordinate " + item + " outside 1.." + std::to_string(dims));
        members.push_back(v - 1);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return IndexSet::of(members);
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_assumption_iv(const LayeredDiscreteMeasure& m) {
    auto report = check_assumption_iv(m);
    if (report.pass) return;
    const auto& p = report.offending().front();
    throw AssumptionViolation("assumption (iv) fails at A=" + p.a.to_string() + ", B=" + p.b.to_string() +
                              ": aggregate " + p.aggregate.to_string());
}

// Coordinates of `s` relative to the ascending enumeration of `d`.
IndexSet relabel(IndexSet s, IndexSet d) {
    std::vector<int> rel;
    int i = 0;
    for (int v : d.members()) {
        if (s.contains(v)) rel.push_back(i);
        ++i;
    }
    return IndexSet::of(rel);
}

int relative_index(int v, IndexSet d) {
    int i = 0;
    for (int u : d.members()) {
        if (u == v) return i;
        ++i;
    }
    return -1;
}

struct CondBlock {
    Rational pc = 0;
    std::map<Point, Rational> pa, pb;
    std::map<std::pair<Point, Point>, Rational> pab;
};

std::map<Point, CondBlock> tabulate(const FiniteRestriction& p, IndexSet a, IndexSet b, IndexSet c) {
    std::map<Point, CondBlock> blocks;
    for (const auto& atom : p.atoms) {
        Point pa = project(atom.point, a);
        Point pb = project(atom.point, b);
        auto& blk = blocks[project(atom.point, c)];
        blk.pc += atom.weight;
        blk.pa[pa] += atom.weight;
        blk.pb[pb] += atom.weight;
        blk.pab[{std::move(pa), std::move(pb)}] += atom.weight;
    }
    return blocks;
}

// Realized cells first, descending; then unrealized cells.
template <class JointMap, class MargMap, class Visit>
bool scan_cells(const JointMap& joint, const MargMap& ma, const MargMap& mb, Visit visit) {
    for (auto it = joint.rbegin(); it != joint.rend(); ++it) {
        if (!visit(it->first.first, it->first.second, it->second)) return false;
    }
    for (auto ia = ma.rbegin(); ia != ma.rend(); ++ia) {
        for (auto ib = mb.rbegin(); ib != mb.rend(); ++ib) {
            if (joint.count({ia->first, ib->first})) continue;
            if (!visit(ia->first, ib->first, Rational(0))) return false;
        }
    }
    return true;
}

struct Prepared {
    IndexSet d;
    Marginal marginal;
    IndexSet a, b, c;  // relative to d
};

Prepared prepare(const LayeredDiscreteMeasure& m, const CiQuery& q) {
    IndexSet d = q.support();
    auto marginal = marginalize(m, d);
    return Prepared{d, std::move(marginal), relabel(q.a, d), relabel(q.b, d), relabel(q.c, d)};
}

std::optional<CiWitness> check_rectangle(const Prepared& p, int v, int h) {
    int rel = relative_index(v, p.d);
    auto r = Rectangle::reduced(p.d.size(), rel, h);
    auto atoms = atoms_in(p.marginal.measure, r);
    if (atoms.empty()) return std::nullopt;
    auto restriction = normalized_restriction(p.marginal.measure, r);
    auto check = ci_under_restriction(restriction, p.a, p.b, p.c);
    if (check.holds) return std::nullopt;
    auto w = *check.witness;
    w.v = v;
    w.h = h;
    return w;
}

std::optional<CiWitness> face_null(const LayeredDiscreteMeasure& m, const CiQuery& q) {
    auto agg = m.face_classes().interior(q.a, q.b, q.c);
    if (agg.is_zero()) return std::nullopt;
    CiWitness w;
    w.kind = CiWitness::Kind::Face;
    w.face_mass = agg;
    for (const auto& [face, cls] : m.face_classes().entries()) {
        if (face.intersects(q.a) && face.intersects(q.b) && !face.intersects(q.c)) {
            w.face = face;
            break;
        }
    }
    return w;
}

CiVerdict start(const LayeredDiscreteMeasure& m, const CiQuery& q, int depth, CiMethod method) {
    if (depth < 1) throw ConfigError("depth must be at least 1");
    q.validate(m.dims());
    CiVerdict v;
    v.method = method;
    v.depth = depth;
    v.query = q;
    return v;
}

}  // namespace

CiQuery CiQuery::parse(std::string_view text, int dims) {
    auto sep = text.find("_|_");
    if (sep == std::string_view::npos) throw ConfigError("query must have the form 'A _|_ B | C'");
    auto lhs = text.substr(0, sep);
    auto rest = text.substr(sep + 3);
    auto bar = rest.find('|');
    CiQuery q;
    q.a = parse_set(lhs, dims);
    q.b = parse_set(rest.substr(0, bar), dims);
    if (bar != std::string_view::npos) q.c = parse_set(rest.substr(bar + 1), dims);
    q.validate(dims);
    return q;
}

void CiQuery::validate(int dims) const {
    const IndexSet all = IndexSet::full(dims);
    if (!(a | b | c).subset_of(all)) throw ConfigError("query sets exceed V");
    if (a.intersects(b) || a.intersects(c) || b.intersects(c)) throw ConfigError("query sets must be disjoint");
}

std::string CiQuery::to_string() const {
    auto plain = [](IndexSet s) {
        std::string out;
        for (int v : s.members()) {
            if (!out.empty()) out += ",";
            out += std::to_string(v + 1);
        }
        return out;
    };
    return plain(a) + " _|_ " + plain(b) + " | " + plain(c);
}

std::string to_string(CiMethod m) {
    switch (m) {
        case CiMethod::DefinitionB:
            return "definition_b";
        case CiMethod::ReducedC:
            return "reduced_c";
        case CiMethod::KernelD:
            return "kernel_d";
    }
    return "?";
}

std::string CiWitness::describe() const {
    switch (kind) {
        case Kind::Face:
            return "face " + face.to_string() + " carries " + face_mass.to_string() + " on {y_A!=0, y_B!=0, y_C=0}";
        case Kind::Rectangle:
            return "R_{" + std::to_string(h) + "," + std::to_string(v + 1) + "} cell a=" + pppci::to_string(a) +
                   " b=" + pppci::to_string(b) + " c=" + pppci::to_string(c) + ": " + pppci::to_string(lhs) +
                   " != " + pppci::to_string(rhs);
        case Kind::KernelCell:
            return "base y_C=" + pppci::to_string(c) + " cell a=" + pppci::to_string(a) +
                   " b=" + pppci::to_string(b) + ": " + pppci::to_string(lhs) + " != " + pppci::to_string(rhs);
    }
    return "?";
}

RestrictionCheck ci_under_restriction(const FiniteRestriction& p, IndexSet a, IndexSet b, IndexSet c) {
    RestrictionCheck out;
    if (a.empty() || b.empty()) return out;
    auto blocks = tabulate(p, a, b, c);
    for (const auto& [cv, blk] : blocks) {
        if (blk.pc == 0) continue;
        bool ok = scan_cells(blk.pab, blk.pa, blk.pb, [&](const Point& av, const Point& bv, const Rational& pabc) {
            Rational lhs = pabc * blk.pc;
            Rational rhs = blk.pa.at(av) * blk.pb.at(bv);
            if (lhs == rhs) return true;
            CiWitness w;
            w.kind = CiWitness::Kind::Rectangle;
            w.a = av;
            w.b = bv;
            w.c = cv;
            w.lhs = lhs;
            w.rhs = rhs;
            out.witness = std::move(w);
            return false;
        });
        if (!ok) {
            out.holds = false;
            return out;
        }
    }
    return out;
}

CiVerdict ci_check_definition(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth) {
    auto t0 = Clock::now();
    auto verdict = start(measure, q, depth, CiMethod::DefinitionB);
    if (!q.trivial()) {
        require_assumption_iv(measure);
        measure.validate(depth);
        auto prep = prepare(measure, q);
        for (int h = 1; h <= depth && verdict.holds; ++h) {
            for (int v : prep.d.members()) {
                if (auto w = check_rectangle(prep, v, h)) {
                    verdict.holds = false;
                    verdict.witness = std::move(w);
                    break;
                }
            }
        }
    }
    verdict.wall_time_ms = elapsed_ms(t0);
    return verdict;
}

CiVerdict ci_check_reduced(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth) {
    auto t0 = Clock::now();
    auto verdict = start(measure, q, depth, CiMethod::ReducedC);
    if (!q.trivial()) {
        require_assumption_iv(measure);
        measure.validate(depth);
        if (auto w = face_null(measure, q)) {
            verdict.holds = false;
            verdict.witness = std::move(w);
        } else if (!q.c.empty()) {
            auto prep = prepare(measure, q);
            for (int h = 1; h <= depth && verdict.holds; ++h) {
                for (int v : q.c.members()) {
                    if (auto w = check_rectangle(prep, v, h)) {
                        verdict.holds = false;
                        verdict.witness = std::move(w);
                        break;
                    }
                }
            }
        }
    }
    verdict.wall_time_ms = elapsed_ms(t0);
    return verdict;
}

CiVerdict ci_check_kernel(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth) {
    auto t0 = Clock::now();
    if (q.c.empty()) {
        auto v = ci_check_reduced(measure, q, depth);
        v.method = CiMethod::KernelD;
        v.wall_time_ms = elapsed_ms(t0);
        return v;
    }
    auto verdict = start(measure, q, depth, CiMethod::KernelD);
    if (!q.trivial()) {
        require_assumption_iv(measure);
        measure.validate(depth);
        if (auto w = face_null(measure, q)) {
            verdict.holds = false;
            verdict.witness = std::move(w);
        } else {
            auto kernel = disintegrate(measure, q.a, q.b, q.c, depth);
            for (const auto& row : kernel.rows()) {
                bool ok = scan_cells(row.joint, row.marginal_a, row.marginal_b,
                                     [&](const Point& av, const Point& bv, const Rational& pab) {
                                         Rational rhs = row.marginal_a.at(av) * row.marginal_b.at(bv);
                                         if (pab == rhs) return true;
                                         CiWitness w;
                                         w.kind = CiWitness::Kind::KernelCell;
                                         w.h = row.layer;
                                         w.a = av;
                                         w.b = bv;
                                         w.c = row.base;
                                         w.lhs = pab;
                                         w.rhs = rhs;
                                         verdict.witness = std::move(w);
                                         return false;
                                     });
                if (!ok) {
                    verdict.holds = false;
                    break;
                }
            }
        }
    }
    verdict.wall_time_ms = elapsed_ms(t0);
    return verdict;
}

CiVerdict ci_check(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth, CiMethod method) {
    switch (method) {
        case CiMethod::DefinitionB:
            return ci_check_definition(measure, q, depth);
        case CiMethod::ReducedC:
            return ci_check_reduced(measure, q, depth);
        case CiMethod::KernelD:
            return ci_check_kernel(measure, q, depth);
    }
    throw std::invalid_argument("unknown method");
}

bool reproduce_witness(const LayeredDiscreteMeasure& measure, const CiQuery& q, const CiWitness& w) {
    switch (w.kind) {
        case CiWitness::Kind::Face: {
            auto agg = measure.face_classes().interior(q.a, q.b, q.c);
            bool face_ok = w.face.intersects(q.a) && w.face.intersects(q.b) && !w.face.intersects(q.c) &&
                           !measure.face_classes().get(w.face).is_zero();
            return face_ok && agg == w.face_mass;
        }
        case CiWitness::Kind::Rectangle: {
            auto prep = prepare(measure, q);
            auto r = Rectangle::reduced(prep.d.size(), relative_index(w.v, prep.d), w.h);
            auto p = normalized_restriction(prep.marginal.measure, r);
            auto blocks = tabulate(p, prep.a, prep.b, prep.c);
            auto it = blocks.find(w.c);
            if (it == blocks.end()) return false;
            const auto& blk = it->second;
            auto ia = blk.pa.find(w.a);
            auto ib = blk.pb.find(w.b);
            if (ia == blk.pa.end() || ib == blk.pb.end()) return false;
            auto jab = blk.pab.find({w.a, w.b});
            Rational pabc = jab == blk.pab.end() ? Rational(0) : jab->second;
            Rational lhs = pabc * blk.pc;
            Rational rhs = ia->second * ib->second;
            return lhs == w.lhs && rhs == w.rhs && lhs != rhs;
        }
        case CiWitness::Kind::KernelCell: {
            auto kernel = disintegrate(measure, q.a, q.b, q.c, w.h);
            const auto* row = kernel.find(w.c);
            if (!row) return false;
            auto ia = row->marginal_a.find(w.a);
            auto ib = row->marginal_b.find(w.b);
            if (ia == row->marginal_a.end() || ib == row->marginal_b.end()) return false;
            auto j = row->joint.find({w.a, w.b});
            Rational lhs = j == row->joint.end() ? Rational(0) : j->second;
            Rational rhs = ia->second * ib->second;
            return lhs == w.lhs && rhs == w.rhs && lhs != rhs;
        }
    }
    return false;
}

EquivalenceReport equivalence_crosscheck(const LayeredDiscreteMeasure& measure, const CiQuery& q, int depth) {
    EquivalenceReport r;
    r.definition = ci_check_definition(measure, q, depth);
    r.reduced = ci_check_reduced(measure, q, depth);
    r.kernel = ci_check_kernel(measure, q, depth);
    r.agree = r.definition.holds == r.reduced.holds && r.reduced.holds == r.kernel.holds;
    return r;
}

std::string to_string(BivariateCase c) {
    switch (c) {
        case BivariateCase::TrivialZero:
            return "TrivialZero";
        case BivariateCase::Separated_b1:
            return "Separated_b1";
        case BivariateCase::Separated_b2:
            return "Separated_b2";
        case BivariateCase::Separated_b3:
            return "Separated_b3";
        case BivariateCase::FiniteFactorized_c:
            return "FiniteFactorized_c";
        case BivariateCase::FiniteFactorized_d:
            return "FiniteFactorized_d";
        case BivariateCase::NotIndependent:
            return "NotIndependent";
    }
    return "?";
}

bool is_independent(BivariateCase c) { return c != BivariateCase::NotIndependent; }

BivariateReport classify_bivariate(const LayeredDiscreteMeasure& measure) {
    if (measure.dims() != 2) throw std::invalid_argument("classify_bivariate needs d = 2 or two blocks");
    return classify_bivariate(measure, IndexSet::of({0}), IndexSet::of({1}));
}

BivariateReport classify_bivariate(const LayeredDiscreteMeasure& measure, IndexSet x1, IndexSet x2) {
    if (x1.empty() || x2.empty() || x1.intersects(x2) || !(x1 | x2).subset_of(measure.space().all()))
        throw std::invalid_argument("classify_bivariate needs two non-empty disjoint blocks");
    BivariateReport r;
    for (const auto& [face, cls] : measure.face_classes().entries()) {
        bool in1 = face.intersects(x1);
        bool in2 = face.intersects(x2);
        if (in1 && in2) {
            r.interior += cls;
        } else if (in1) {
            r.y2_zero += cls;
        } else if (in2) {
            r.y1_zero += cls;
        }
    }
    r.total = r.interior + r.y1_zero + r.y2_zero;
    if (r.total.is_zero()) {
        r.result = BivariateCase::TrivialZero;
        return r;
    }
    if (r.interior.is_zero()) {
        if (r.y1_zero.is_infinite() && r.y2_zero.is_infinite()) {
            r.result = BivariateCase::Separated_b1;
            return r;
        }
        if (r.y1_zero.is_infinite() && r.y2_zero.is_zero()) {
            r.result = BivariateCase::Separated_b2;
            return r;
        }
        if (r.y1_zero.is_zero() && r.y2_zero.is_infinite()) {
            r.result = BivariateCase::Separated_b3;
            return r;
        }
    }
    if (r.total.is_finite() && (r.y1_zero.is_zero() || r.y2_zero.is_zero())) {
        IndexSet d = x1 | x2;
        auto marginal = marginalize(measure, d);
        int depth = 1;
        for (const auto& [face, cls] : marginal.measure.face_classes().entries()) {
            auto e = marginal.measure.exhaustion_depth(face);
            if (!e)
                throw UndecidableMass("finite face " + face.to_string() + " is not exhausted within " +
                                      std::to_string(kProbeDepth) + " layers");
            depth = std::max(depth, *e);
        }
        FiniteRestriction p;
        for (auto& a : marginal.measure.atoms_up_to(depth)) {
            p.total += a.weight;
            p.atoms.push_back(std::move(a));
        }
        for (auto& a : p.atoms) a.weight /= p.total;
        p.mass = p.total;
        p.total = 1;
        p.window = "E_12";
        bool fact = ci_under_restriction(p, relabel(x1, d), relabel(x2, d), IndexSet{}).holds;
        r.factorizes = fact;
        if (fact) {
            r.result = r.y1_zero.is_zero() ? BivariateCase::FiniteFactorized_c : BivariateCase::FiniteFactorized_d;
            return r;
        }
    }
    r.result = BivariateCase::NotIndependent;
    return r;
}

SemigraphoidReport semigraphoid_check(const CiOracle& oracle, int dims) {
    if (dims < 1 || dims > 8) throw std::invalid_argument("semigraphoid enumeration supports 1 <= d <= 8");
    SemigraphoidReport report;
    report.dims = dims;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, bool> memo;
    auto ci = [&](IndexSet a, IndexSet b, IndexSet c) {
        auto key = std::make_tuple(a.mask(), b.mask(), c.mask());
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        ++report.oracle_calls;
        bool v = oracle(a, b, c);
        memo.emplace(key, v);
        return v;
    };
    long total = 1;
    for (int i = 0; i < dims; ++i) total *= 5;
    for (long code = 0; code < total; ++code) {
        std::vector<int> sets[4];
        long x = code;
        for (int v = 0; v < dims; ++v) {
            int label = static_cast<int>(x % 5);
            x /= 5;
            if (label < 4) sets[label].push_back(v);
        }
        IndexSet a = IndexSet::of(sets[0]), b = IndexSet::of(sets[1]), c = IndexSet::of(sets[2]),
                 d = IndexSet::of(sets[3]);
        ++report.quadruples;
        auto violate = [&](const char* axiom) { report.violations.push_back({axiom, a, b, c, d}); };
        if (ci(a, b, c)) {
            ++report.premises_checked;
            if (!ci(b, a, c)) violate("L1 symmetry");
        }
        if (ci(a, b | d, c)) {
            ++report.premises_checked;
            if (!ci(a, b, c)) violate("L2 decomposition");
            if (!ci(a, b, c | d)) violate("L3 weak union");
        }
        if (ci(a, b, c) && ci(a, d, b | c)) {
            ++report.premises_checked;
            if (!ci(a, b | d, c)) violate("L4 contraction");
        }
    }
    return report;
}

CiOracle kernel_oracle(const LayeredDiscreteMeasure& measure, int depth) {
    return [measure, depth](IndexSet a, IndexSet b, IndexSet c) {
        return ci_check_kernel(measure, CiQuery{a, b, c}, depth).holds;
    };
}

}  // namespace pppci
