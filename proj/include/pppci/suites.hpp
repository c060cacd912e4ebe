#ifndef PPPCI_SUITES_HPP
#define PPPCI_SUITES_HPP

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pppci {

struct SuiteOptions {
    int depth = 6;      // CI checkers
    int sim_depth = 4;  // samplers
    std::size_t replicates = 100000;
    std::uint64_t seed = 20261014;
    std::size_t random_measures = 100;
    std::size_t random_declarations = 100;
};

struct SuiteCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCheck> checks;
    nlohmann::json details = nlohmann::json::object();
    double wall_ms = 0;
    bool pass() const;
};

// equivalence, witness, bivariate, sampler, condcov, laplace, semigraphoid,
// poisson
std::vector<std::string> suite_names();
// Throws ConfigError for unknown names.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

// Columns suite, check, verdict, detail.
void write_suite_csv(std::ostream& os, const std::vector<SuiteResult>& results);

}  // namespace pppci

#endif
