#include "pppci/counts.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace pppci {

std::vector<std::int64_t> CountSample::column(std::size_t w) const {
    std::vector<std::int64_t> out;
    out.reserve(counts.size());
    for (const auto& row : counts) out.push_back(row.at(w));
    return out;
}

void CountSample::validate() const {
    for (const auto& row : counts) {
        if (row.size() != windows.size()) throw std::invalid_argument("count matrix row has the wrong width");
        for (auto c : row) {
            if (c < 0) throw std::invalid_argument("negative count");
        }
    }
}

namespace {

template <class T>
MomentSummary summarize_impl(const std::vector<T>& xs) {
    MomentSummary s;
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) return s;
    // Welford
    double mean = 0, m2 = 0;
    std::size_t k = 0;
    for (auto x : xs) {
        ++k;
        double d = static_cast<double>(x) - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (static_cast<double>(x) - mean);
    }
    s.mean = mean;
    s.var = xs.size() > 1 ? m2 / (n - 1) : 0.0;
    s.stderr_ = std::sqrt(s.var / n);
    return s;
}

}  // namespace

MomentSummary summarize(const std::vector<std::int64_t>& xs) { return summarize_impl(xs); }
MomentSummary summarize(const std::vector<double>& xs) { return summarize_impl(xs); }

void write_count_csv(std::ostream& os, const CountSample& sample, std::size_t block_size) {
    if (block_size == 0) block_size = sample.replicates();
    os << "window_id,replicate_block,count_mean,count_var,stderr\n";
    os << std::setprecision(10);
    for (std::size_t w = 0; w < sample.window_count(); ++w) {
        auto col = sample.column(w);
        std::size_t blocks = block_size ? (col.size() + block_size - 1) / block_size : 0;
        for (std::size_t b = 0; b < blocks && blocks > 1; ++b) {
            std::vector<std::int64_t> part(col.begin() + static_cast<std::ptrdiff_t>(b * block_size),
                                           col.begin() + static_cast<std::ptrdiff_t>(std::min(col.size(), (b + 1) * block_size)));
            auto s = summarize(part);
            os << sample.windows[w] << ',' << b << ',' << s.mean << ',' << s.var << ',' << s.stderr_ << '\n';
        }
        auto s = summarize(col);
        os << sample.windows[w] << ",all," << s.mean << ',' << s.var << ',' << s.stderr_ << '\n';
    }
}

}  // namespace pppci
