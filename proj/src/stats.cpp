#include "pppci/stats.hpp"

#include "pppci/error.hpp"
#include "pppci/parallel.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace pppci {

nlohmann::json TestReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["statistic"] = statistic_name;
    j["value"] = statistic;
    j["dof"] = dof;
    j["p_value"] = p_value ? nlohmann::json(*p_value) : nlohmann::json(nullptr);
    j["z_score"] = z_score ? nlohmann::json(*z_score) : nlohmann::json(nullptr);
    j["threshold"] = threshold;
    j["verdict"] = pass ? "pass" : "fail";
    j["degenerate"] = degenerate;
    j["inputs"] = inputs;
    j["details"] = details;
    return j;
}

namespace {

double chi2_upper(double stat, int dof) {
    if (dof < 1) return 1.0;
    boost::math::chi_squared_distribution<double> d(dof);
    return boost::math::cdf(boost::math::complement(d, std::max(stat, 0.0)));
}

double z_of(double estimate, double expected, double se) {
    if (se > 0) return (estimate - expected) / se;
    return estimate == expected ? 0.0 : INFINITY;
}

}  // namespace

TestReport poisson_gof(const CountSample& sample, std::size_t window, double mean, std::size_t min_replicates) {
    sample.validate();
    TestReport r;
    r.name = "poisson_gof";
    r.statistic_name = "chi_square";
    r.threshold = "p > 0.001";
    r.inputs = {{"window", sample.windows.at(window)}, {"mean", mean}, {"replicates", sample.replicates()},
                {"seed", sample.seed}, {"source", sample.source}};
    const std::size_t n = sample.replicates();
    if (n < min_replicates)
        throw DomainError("poisson_gof needs at least " + std::to_string(min_replicates) + " replicates");
    auto col = sample.column(window);
    if (mean <= 0) {
        bool all_zero = std::all_of(col.begin(), col.end(), [](std::int64_t c) { return c == 0; });
        r.degenerate = true;
        r.pass = all_zero;
        r.p_value = all_zero ? 1.0 : 0.0;
        return r;
    }
    std::map<std::int64_t, std::size_t> hist;
    for (auto c : col) ++hist[c];
    boost::math::poisson_distribution<double> pois(mean);
    const double dn = static_cast<double>(n);

    struct Bin {
        std::int64_t lo, hi;  // hi < 0: open tail
        double expected;
        std::size_t observed;
    };
    std::vector<Bin> bins;
    Bin cur{0, 0, 0.0, 0};
    for (std::int64_t k = 0;; ++k) {
        cur.hi = k;
        cur.expected += dn * boost::math::pdf(pois, static_cast<double>(k));
        cur.observed += hist.count(k) ? hist[k] : 0;
        double tail = dn * boost::math::cdf(boost::math::complement(pois, static_cast<double>(k)));
        if (tail < 5.0) {
            cur.hi = -1;
            cur.expected += tail;
            for (auto it = hist.upper_bound(k); it != hist.end(); ++it) cur.observed += it->second;
            if (cur.expected < 5.0 && !bins.empty()) {
                bins.back().hi = -1;
                bins.back().expected += cur.expected;
                bins.back().observed += cur.observed;
            } else {
                bins.push_back(cur);
            }
            break;
        }
        if (cur.expected >= 5.0) {
            bins.push_back(cur);
            cur = Bin{k + 1, k + 1, 0.0, 0};
        }
    }
    if (bins.size() < 2) throw DomainError("poisson_gof: fewer than two bins after pooling");
    double stat = 0;
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& b : bins) {
        double d = static_cast<double>(b.observed) - b.expected;
        stat += d * d / b.expected;
        jb.push_back({{"lo", b.lo}, {"hi", b.hi < 0 ? nlohmann::json("inf") : nlohmann::json(b.hi)},
                      {"observed", b.observed}, {"expected", b.expected}});
    }
    r.statistic = stat;
    r.dof = static_cast<int>(bins.size()) - 1;
    r.p_value = chi2_upper(stat, r.dof);
    r.pass = *r.p_value > kSignificance;
    r.details["bins"] = jb;
    return r;
}

std::vector<TestReport> poisson_gof(const CountSample& sample, const std::vector<double>& means,
                                    std::size_t min_replicates) {
    std::vector<TestReport> out;
    for (std::size_t w = 0; w < means.size(); ++w) out.push_back(poisson_gof(sample, w, means[w], min_replicates));
    return out;
}

TestReport joint_count_equality(const CountSample& s1, const CountSample& s2, std::size_t min_replicates) {
    s1.validate();
    s2.validate();
    TestReport r;
    r.name = "joint_count_equality";
    r.statistic_name = "chi_square_two_sample";
    r.threshold = "p > 0.001";
    r.inputs = {{"windows", s1.windows}, {"replicates_1", s1.replicates()}, {"replicates_2", s2.replicates()},
                {"seed_1", s1.seed}, {"seed_2", s2.seed}, {"source_1", s1.source}, {"source_2", s2.source}};
    if (s1.windows != s2.windows) throw DomainError("joint_count_equality needs identical windows");
    if (s1.replicates() < min_replicates || s2.replicates() < min_replicates)
        throw DomainError("joint_count_equality needs at least " + std::to_string(min_replicates) +
                          " replicates per sample");
    const std::size_t k = s1.window_count();
    std::vector<std::int64_t> caps(k);
    for (std::size_t w = 0; w < k; ++w) {
        auto pooled = s1.column(w);
        auto c2 = s2.column(w);
        pooled.insert(pooled.end(), c2.begin(), c2.end());
        auto idx = static_cast<std::size_t>(std::ceil(0.995 * static_cast<double>(pooled.size()))) - 1;
        std::nth_element(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(idx), pooled.end());
        caps[w] = pooled[idx];
    }
    std::map<std::vector<std::int64_t>, std::pair<double, double>> cells;
    auto add = [&](const CountSample& s, bool first) {
        for (const auto& row : s.counts) {
            std::vector<std::int64_t> key(k);
            for (std::size_t w = 0; w < k; ++w) key[w] = std::min(row[w], caps[w] + 1);
            auto& c = cells[key];
            (first ? c.first : c.second) += 1;
        }
    };
    add(s1, true);
    add(s2, false);
    const double n1 = static_cast<double>(s1.replicates());
    const double n2 = static_cast<double>(s2.replicates());
    const double f1 = n1 / (n1 + n2), f2 = n2 / (n1 + n2);

    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> pooled{0, 0};
    for (const auto& [key, c] : cells) {
        double tot = c.first + c.second;
        if (tot * std::min(f1, f2) < 5.0) {
            pooled.first += c.first;
            pooled.second += c.second;
        } else {
            bins.push_back(c);
        }
    }
    if (pooled.first + pooled.second > 0) {
        if ((pooled.first + pooled.second) * std::min(f1, f2) < 5.0 && !bins.empty()) {
            auto smallest = std::min_element(bins.begin(), bins.end(), [](const auto& x, const auto& y) {
                return x.first + x.second < y.first + y.second;
            });
            smallest->first += pooled.first;
            smallest->second += pooled.second;
        } else {
            bins.push_back(pooled);
        }
    }
    if (bins.size() < 2) throw DomainError("joint_count_equality: degenerate binning (fewer than two cells)");
    double stat = 0;
    for (const auto& [o1, o2] : bins) {
        double tot = o1 + o2;
        double e1 = tot * f1, e2 = tot * f2;
        stat += (o1 - e1) * (o1 - e1) / e1 + (o2 - e2) * (o2 - e2) / e2;
    }
    r.statistic = stat;
    r.dof = static_cast<int>(bins.size()) - 1;
    r.p_value = chi2_upper(stat, r.dof);
    r.pass = *r.p_value > kSignificance;
    r.details = {{"caps", caps}, {"cells", cells.size()}, {"bins", bins.size()}};
    return r;
}

TestReport count_law_check(const CountSample& sample, std::size_t window, double mass) {
    TestReport r;
    r.name = "count_law";
    r.statistic_name = "max_abs_z";
    r.threshold = "|z| < 4";
    r.inputs = {{"window", sample.windows.at(window)}, {"mass", mass}, {"replicates", sample.replicates()},
                {"seed", sample.seed}};
    auto col = sample.column(window);
    auto s = summarize(col);
    const double n = static_cast<double>(col.size());
    double m4 = 0;
    for (auto c : col) {
        double d = static_cast<double>(c) - s.mean;
        m4 += d * d * d * d;
    }
    m4 /= n;
    double var_se = std::sqrt(std::max(m4 - s.var * s.var, 0.0) / n);
    double z_mean = z_of(s.mean, mass, s.stderr_);
    double z_var = z_of(s.var, mass, var_se);
    r.degenerate = s.stderr_ == 0;
    r.z_score = std::abs(z_mean) > std::abs(z_var) ? z_mean : z_var;
    r.statistic = std::abs(*r.z_score);
    r.pass = std::abs(z_mean) < kZBand && std::abs(z_var) < kZBand;
    r.details = {{"mean", s.mean}, {"mean_stderr", s.stderr_}, {"z_mean", z_mean},
                 {"var", s.var}, {"var_stderr", var_se}, {"z_var", z_var}};
    return r;
}

namespace {

CondCovEstimate covariance(const std::vector<double>& x, const std::vector<double>& y) {
    CondCovEstimate e;
    e.x = summarize(x);
    e.y = summarize(y);
    const std::size_t n = x.size();
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = (x[i] - e.x.mean) * (y[i] - e.y.mean);
    auto p = summarize(prod);
    e.cov = n > 1 ? p.mean * static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
    e.cov_stderr = p.stderr_;
    return e;
}

}  // namespace

TestReport count_covariance_check(const CountSample& sample, std::size_t w1, std::size_t w2, double expected) {
    TestReport r;
    r.name = "count_covariance";
    r.statistic_name = "z";
    r.threshold = "|z| < 4";
    r.inputs = {{"window_1", sample.windows.at(w1)}, {"window_2", sample.windows.at(w2)},
                {"expected", expected}, {"replicates", sample.replicates()}, {"seed", sample.seed}};
    std::vector<double> x, y;
    for (const auto& row : sample.counts) {
        x.push_back(static_cast<double>(row.at(w1)));
        y.push_back(static_cast<double>(row.at(w2)));
    }
    auto e = covariance(x, y);
    r.degenerate = e.cov_stderr == 0;
    r.z_score = z_of(e.cov, expected, e.cov_stderr);
    r.statistic = *r.z_score;
    r.pass = std::abs(*r.z_score) < kZBand;
    r.details = {{"cov", e.cov}, {"stderr", e.cov_stderr}};
    return r;
}

TestReport empirical_cond_cov(const ConditionalKernel& kernel, const Rectangle& a_1, const Rectangle& a_2,
                              const PointPattern& xi_c, std::size_t n, std::uint64_t seed) {
    TestReport r;
    r.name = "empirical_cond_cov";
    r.statistic_name = "max_abs_z";
    r.threshold = "|z| < 4";
    r.inputs = {{"window_1", a_1.to_string()}, {"window_2", a_2.to_string()}, {"xi_c_points", xi_c.size()},
                {"replicates", n}, {"seed", seed}};
    auto exact = cond_moment_formulas(kernel, a_1, a_2, xi_c);

    struct Prepared {
        std::vector<double> cumulative;
        std::vector<std::pair<bool, bool>> hits;
    };
    std::vector<Prepared> rows;
    std::vector<std::size_t> point_index;
    for (std::size_t i = 0; i < xi_c.points.size(); ++i) {
        const auto& y = xi_c.points[i];
        if (is_origin(y)) continue;
        const auto* row = kernel.find(y);
        Prepared p;
        double acc = 0;
        for (const auto& [ab, prob] : row->joint) {
            acc += to_double(prob);
            p.cumulative.push_back(acc);
            p.hits.emplace_back(a_1.contains(ab.first), a_2.contains(ab.second));
        }
        p.cumulative.back() = 1.0;
        rows.push_back(std::move(p));
        point_index.push_back(i);
    }
    std::vector<double> xs(n), ys(n);
    const RandomSource root(seed);
    parallel_for(n, [&](std::size_t rep) {
        auto rng = root.substream(rep);
        int x = 0, y = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            auto sub = rng.substream(point_index[j]);
            auto k = sub.categorical(rows[j].cumulative);
            x += rows[j].hits[k].first;
            y += rows[j].hits[k].second;
        }
        xs[rep] = x;
        ys[rep] = y;
    });
    auto e = covariance(xs, ys);
    double m1 = to_double(exact.mean_1), m2 = to_double(exact.mean_2), cv = to_double(exact.cov);
    double z1 = z_of(e.x.mean, m1, e.x.stderr_);
    double z2 = z_of(e.y.mean, m2, e.y.stderr_);
    double zc = z_of(e.cov, cv, e.cov_stderr);
    r.degenerate = e.x.stderr_ == 0 || e.y.stderr_ == 0 || e.cov_stderr == 0;
    double worst = std::max({std::abs(z1), std::abs(z2), std::abs(zc)});
    r.statistic = worst;
    r.z_score = zc;
    r.pass = worst < kZBand;
    r.details = {{"formula_mean_1", to_string(exact.mean_1)}, {"formula_mean_2", to_string(exact.mean_2)},
                 {"formula_cov", to_string(exact.cov)},       {"mc_mean_1", e.x.mean},
                 {"mc_mean_2", e.y.mean},                     {"mc_cov", e.cov},
                 {"cov_stderr", e.cov_stderr},                {"z_mean_1", z1},
                 {"z_mean_2", z2},                            {"z_cov", zc}};
    return r;
}

}  // namespace pppci
