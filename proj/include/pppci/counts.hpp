#ifndef PPPCI_COUNTS_HPP
#define PPPCI_COUNTS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pppci {

// Replicate x window count matrix.
struct CountSample {
    std::vector<std::string> windows;
    std::vector<std::vector<std::int64_t>> counts;
    std::uint64_t seed = 0;
    std::string source;

    std::size_t replicates() const { return counts.size(); }
    std::size_t window_count() const { return windows.size(); }
    std::vector<std::int64_t> column(std::size_t w) const;
    // Throws std::invalid_argument on ragged rows or negative counts.
    void validate() const;
};

struct MomentSummary {
    double mean = 0;
    double var = 0;     // unbiased
    double stderr_ = 0; // of the mean
};

MomentSummary summarize(const std::vector<std::int64_t>& xs);
MomentSummary summarize(const std::vector<double>& xs);

// CSV columns window_id, replicate_block, count_mean, count_var, stderr; one
// row per window and block of `block_size` replicates, plus an "all" row.
void write_count_csv(std::ostream& os, const CountSample& sample, std::size_t block_size);

}  // namespace pppci

#endif
