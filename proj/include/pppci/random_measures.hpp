#ifndef PPPCI_RANDOM_MEASURES_HPP
#define PPPCI_RANDOM_MEASURES_HPP

#include "pppci/face_class.hpp"
#include "pppci/measure.hpp"
#include "pppci/random.hpp"

#include <json.hpp>

namespace pppci {

// Random kernel_product spec on d = 3: a random assignment of the coordinates
// to blocks A, B, C, a self-similar base on E_C, random kernel rows and
// optional axis parts on {y_C = 0}. Every non-zero coordinate lies in
// {1, 3/4, 5/8} times the layer scale, so the measure is layer aligned and
// all face classes are Zero or Infinite.
nlohmann::json random_kernel_spec(RandomSource& rng);

// Random raw_layers spec on d = 3 with 1 to 6 repeating atoms, layer aligned
// as above.
nlohmann::json random_raw_spec(RandomSource& rng);

// Random declaration on 1 <= d <= max_dims faces: each face Zero, Finite or
// Infinite.
FaceClassMap random_face_classes(RandomSource& rng, int max_dims);

// All 18 ordered queries (A, B non-empty) on d = 3, or in general every
// assignment of V to {A, B, C, unused} with A and B non-empty.
std::vector<std::tuple<IndexSet, IndexSet, IndexSet>> all_queries(int dims);

}  // namespace pppci

#endif
