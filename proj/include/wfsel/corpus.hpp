#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wfsel/series.hpp"

namespace wfsel {

// Per-year token counts for one word: the focal variant (whose frequency
// the analysis tracks) against the competing variant.
struct VariantCounts {
    struct Row {
        int year = 0;
        long long count_focal = 0;
        long long count_other = 0;
    };

    std::string word;
    std::vector<Row> rows;  // unique years, any order on input

    void validate() const;
};

struct BinSpec {
    int width_years = 1;
    int origin_year = 0;  // bin alignment; callers default to the earliest year
};

constexpr long long kDefaultMinTokens = 100;

// CSV with header year,count_focal,count_other.
VariantCounts read_counts_csv(const std::string& path);

// Aggregate annual counts into bins of width_years anchored at
// origin_year.  Bin time is the midpoint of the covered years; bins
// holding fewer than min_tokens tokens are omitted.  Throws when nothing
// survives.
TimeSeries bin_counts(const VariantCounts& counts, const BinSpec& spec,
                      long long min_tokens = kDefaultMinTokens);

// Unweighted mean of per-word frequencies on a common bin grid; words
// missing a bin are excluded from that bin's mean and the aggregated
// token count is the contributors' sum.  token_weighted switches to a
// token-weighted mean.
TimeSeries aggregate_word_set(const std::vector<TimeSeries>& series_list,
                              bool token_weighted = false);

// Downsample every point to the smallest token count in the series with
// a hypergeometric draw, so sampling noise is uniform across bins.
TimeSeries equalize_sampling(const TimeSeries& series, std::uint64_t seed);

// Inclusion screen: true when both variants hold more than `threshold`
// of the usage in at least one bin of `width_years`.
bool usage_screen(const VariantCounts& counts, double threshold = 0.01,
                  int width_years = 5, long long min_tokens = kDefaultMinTokens);

// Word-set manifest: named sets of count-file paths (relative paths are
// resolved against the manifest's directory).
std::map<std::string, std::vector<std::string>> read_manifest(const std::string& path);

}  // namespace wfsel
