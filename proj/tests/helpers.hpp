#ifndef PPPCI_TEST_HELPERS_HPP
#define PPPCI_TEST_HELPERS_HPP

#include "pppci/measure_spec.hpp"

#include <json.hpp>

#include <string>

namespace testing {

inline pppci::LayeredDiscreteMeasure measure(const std::string& json_text) {
    return pppci::measure_from_json(nlohmann::json::parse(json_text));
}

inline pppci::Point pt(std::initializer_list<pppci::Rational> xs) { return pppci::Point(xs); }

}  // namespace testing

#endif
