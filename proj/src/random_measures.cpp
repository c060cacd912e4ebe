#include "pppci/random_measures.hpp"

#include <algorithm>
#include <array>

namespace pppci {

using nlohmann::json;

namespace {

const std::array<const char*, 3> kNonzero = {"1", "3/4", "5/8"};
const std::array<const char*, 3> kWeights = {"1/4", "1/2", "1"};

std::size_t pick(RandomSource& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

const char* value_or_zero(RandomSource& rng) {
    std::size_t i = pick(rng, 4);
    return i == 3 ? "0" : kNonzero[i];
}

json random_dist(RandomSource& rng) {
    std::vector<std::string> values = {"0", "1", "3/4", "5/8"};
    std::shuffle(values.begin(), values.end(), rng);
    std::size_t k = 1 + pick(rng, 3);
    std::vector<std::string> probs;
    if (k == 1) {
        probs = {"1"};
    } else if (k == 2) {
        probs = pick(rng, 2) ? std::vector<std::string>{"1/2", "1/2"} : std::vector<std::string>{"1/4", "3/4"};
    } else {
        probs = pick(rng, 2) ? std::vector<std::string>{"1/4", "1/4", "1/2"}
                             : std::vector<std::string>{"1/2", "1/4", "1/4"};
    }
    json d = json::array();
    for (std::size_t i = 0; i < k; ++i) d.push_back({{"value", json::array({values[i]})}, {"prob", probs[i]}});
    return d;
}

json random_kernel(RandomSource& rng, const std::vector<std::string>& keys) {
    json k = json::object();
    if (pick(rng, 3) == 0) {
        k["default"] = random_dist(rng);
        return k;
    }
    json rows = json::array();
    for (const auto& key : keys) rows.push_back({{"at", json::array({key})}, {"dist", random_dist(rng)}});
    k["rows"] = rows;
    return k;
}

}  // namespace

json random_kernel_spec(RandomSource& rng) {
    std::array<int, 3> perm = {1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    json spec = {{"dims", 3}, {"support", "nonnegative"}, {"family", "kernel_product"}};
    spec["blocks"] = {{"a", json::array({perm[0]})}, {"b", json::array({perm[1]})}, {"c", json::array({perm[2]})}};

    std::vector<std::string> keys;
    for (const char* v : kNonzero) {
        if (pick(rng, 2) || (keys.empty() && v == kNonzero.back())) keys.push_back(v);
    }
    json repeat = json::array();
    for (const auto& key : keys) repeat.push_back({{"point", json::array({key})}, {"weight", kWeights[pick(rng, 3)]}});
    spec["base"] = {{"dims", 1}, {"support", "nonnegative"}, {"family", "raw_layers"}, {"repeat", repeat}};
    spec["kernel_a"] = random_kernel(rng, keys);
    spec["kernel_b"] = random_kernel(rng, keys);

    if (pick(rng, 2)) {
        json atoms = json::array();
        std::size_t n = 1 + pick(rng, 3);
        for (std::size_t i = 0; i < n; ++i) {
            json point = json::array({"0", "0", "0"});
            const char* va = value_or_zero(rng);
            const char* vb = value_or_zero(rng);
            if (std::string(va) == "0" && std::string(vb) == "0") va = kNonzero[pick(rng, 3)];
            point[static_cast<std::size_t>(perm[0] - 1)] = va;
            point[static_cast<std::size_t>(perm[1] - 1)] = vb;
            atoms.push_back({{"point", point}, {"weight", kWeights[pick(rng, 3)]}});
        }
        json part = {{"dims", 3}, {"support", "nonnegative"}, {"family", "raw_layers"}, {"repeat", atoms}};
        spec["axis_parts"] = json::array();
        spec["axis_parts"].push_back(part);
    }
    return spec;
}

json random_raw_spec(RandomSource& rng) {
    json atoms = json::array();
    std::size_t n = 1 + pick(rng, 6);
    for (std::size_t i = 0; i < n; ++i) {
        json point = json::array();
        bool nonzero = false;
        for (int v = 0; v < 3; ++v) {
            const char* x = value_or_zero(rng);
            nonzero = nonzero || std::string(x) != "0";
            point.push_back(x);
        }
        if (!nonzero) point[pick(rng, 3)] = kNonzero[pick(rng, 3)];
        atoms.push_back({{"point", point}, {"weight", kWeights[pick(rng, 3)]}});
    }
    return {{"dims", 3}, {"support", "nonnegative"}, {"family", "raw_layers"}, {"repeat", atoms}};
}

FaceClassMap random_face_classes(RandomSource& rng, int max_dims) {
    int dims = 1 + static_cast<int>(pick(rng, static_cast<std::size_t>(max_dims)));
    FaceClassMap classes(dims);
    // Sparse declarations, so that both verdicts occur.
    std::size_t finite_odds = 4 + pick(rng, 12);
    for (std::uint32_t mask = 1; mask < (1u << dims); ++mask) {
        std::size_t r = pick(rng, 3 * finite_odds);
        if (r == 0) {
            classes.set(IndexSet::from_mask(mask), FaceMassClass::finite(Rational(1 + static_cast<long>(pick(rng, 4))) / 2));
        } else if (r <= finite_odds) {
            classes.set(IndexSet::from_mask(mask), FaceMassClass::infinite());
        }
    }
    return classes;
}

std::vector<std::tuple<IndexSet, IndexSet, IndexSet>> all_queries(int dims) {
    std::vector<std::tuple<IndexSet, IndexSet, IndexSet>> out;
    long total = 1;
    for (int i = 0; i < dims; ++i) total *= 4;
    for (long code = 0; code < total; ++code) {
        std::vector<int> sets[3];
        long x = code;
        for (int v = 0; v < dims; ++v) {
            int label = static_cast<int>(x % 4);
            x /= 4;
            if (label < 3) sets[label].push_back(v);
        }
        if (sets[0].empty() || sets[1].empty()) continue;
        out.emplace_back(IndexSet::of(sets[0]), IndexSet::of(sets[1]), IndexSet::of(sets[2]));
    }
    return out;
}

}  // namespace pppci
