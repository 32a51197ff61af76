#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rankone/word.hpp"

namespace rankone {

// Decomposition of a prefix into return words to 0,
//   prefix = head 0^{t0} w_1 0^{t1} w_2 0^{t2} ... w_r 0^{tr} residual,
// where head and the w_j are 0-free, every t_j >= 1, and residual is a
// trailing 0-free partial return word (empty when the prefix ends in 0;
// a trailing 0-run always extends the gap of the block before it).
// Concatenating the parts reproduces the prefix exactly.
struct ReturnWordDecomposition {
    Word head;
    std::size_t head_zero_run = 0; // t0 (0 only when the prefix has no 0 after head -- excluded by precondition)
    std::vector<std::pair<Word, std::size_t>> blocks; // (w_j, t_j), j >= 1
    Word residual;
    std::size_t total_length = 0;

    Word reassemble() const;
};

struct ReturnWordStats {
    std::map<Word, std::size_t> return_word_counts;
    std::size_t zero_count = 0; // N_n(0)
    std::map<std::size_t, std::size_t> gap_lengths; // multiset of t_j, j >= 1
    std::size_t residual_length = 0;
    std::size_t total_length = 0;
};

enum class FreqMethod { empirical, michel, durand, inclusionExclusion, mirsky };

std::string to_string(FreqMethod m);

// rho0 and exact frequencies F_w per return word, tagged with how they
// were obtained. F_w is the frequency of the block 0w0, not the plain
// occurrence frequency of w.
struct FrequencyTable {
    double rho0 = 0.0;
    std::map<Word, double> exact;
    FreqMethod method = FreqMethod::empirical;

    // sum_w |w| F_w; at most 1 - rho0 up to boundary terms.
    double weighted_length_sum() const;
};

// Largest pairwise discrepancy max_w |F_w - G_w| (missing entries read 0),
// including |rho0 - rho0'|.
double table_discrepancy(const FrequencyTable& a, const FrequencyTable& b);

// Unique decomposition of a prefix containing at least one 0.
ReturnWordDecomposition decompose(std::span<const Symbol> prefix);

ReturnWordStats collect_stats(const ReturnWordDecomposition& d);

// N_n(pattern)/n, counting occurrences that fit entirely in the prefix.
double empirical_frequency(std::span<const Symbol> prefix, const Word& pattern);

// F_w = N_n(0w0)/n for every nonempty 0-free w with |w| <= max_return_len
// observed between two zeros; overlapping occurrences share their boundary
// zeros and all count. rho0 = N_n(0)/n.
FrequencyTable empirical_exact_frequencies(std::span<const Symbol> prefix,
                                           std::size_t max_return_len = 64);

} // namespace rankone
