#include "rankone/returnwords.hpp"

#include <algorithm>
#include <cmath>

#include "rankone/errors.hpp"

namespace rankone {

Word ReturnWordDecomposition::reassemble() const {
    Word out;
    out.reserve(total_length);
    out.insert(out.end(), head.begin(), head.end());
    out.insert(out.end(), head_zero_run, Symbol{0});
    for (const auto& [w, t] : blocks) {
        out.insert(out.end(), w.begin(), w.end());
        out.insert(out.end(), t, Symbol{0});
    }
    out.insert(out.end(), residual.begin(), residual.end());
    return out;
}

std::string to_string(FreqMethod m) {
    switch (m) {
    case FreqMethod::empirical: return "empirical";
    case FreqMethod::michel: return "michel";
    case FreqMethod::durand: return "durand";
    case FreqMethod::inclusionExclusion: return "inclusionExclusion";
    case FreqMethod::mirsky: return "mirsky";
    }
    return "?";
}

double FrequencyTable::weighted_length_sum() const {
    double s = 0.0;
    for (const auto& [w, f] : exact) s += static_cast<double>(w.size()) * f;
    return s;
}

double table_discrepancy(const FrequencyTable& a, const FrequencyTable& b) {
    double d = std::abs(a.rho0 - b.rho0);
    auto scan = [&](const FrequencyTable& x, const FrequencyTable& y) {
        for (const auto& [w, f] : x.exact) {
            auto it = y.exact.find(w);
            double g = it == y.exact.end() ? 0.0 : it->second;
            d = std::max(d, std::abs(f - g));
        }
    };
    scan(a, b);
    scan(b, a);
    return d;
}

ReturnWordDecomposition decompose(std::span<const Symbol> prefix) {
    ReturnWordDecomposition d;
    d.total_length = prefix.size();

    std::size_t i = 0;
    while (i < prefix.size() && prefix[i] != 0) d.head.push_back(prefix[i++]);
    if (i == prefix.size()) throw NoZeroSymbol("prefix contains no symbol 0");

    while (i < prefix.size() && prefix[i] == 0) {
        ++d.head_zero_run;
        ++i;
    }
    while (i < prefix.size()) {
        Word w;
        while (i < prefix.size() && prefix[i] != 0) w.push_back(prefix[i++]);
        std::size_t run = 0;
        while (i < prefix.size() && prefix[i] == 0) {
            ++run;
            ++i;
        }
        if (run == 0) {
            d.residual = std::move(w); // prefix ended inside a return word
        } else {
            d.blocks.emplace_back(std::move(w), run);
        }
    }
    return d;
}

ReturnWordStats collect_stats(const ReturnWordDecomposition& d) {
    ReturnWordStats s;
    s.total_length = d.total_length;
    s.zero_count = d.head_zero_run;
    s.residual_length = d.residual.size();
    for (const auto& [w, t] : d.blocks) {
        ++s.return_word_counts[w];
        s.zero_count += t;
        ++s.gap_lengths[t];
    }
    return s;
}

double empirical_frequency(std::span<const Symbol> prefix, const Word& pattern) {
    if (pattern.size() > prefix.size())
        throw ConfigError("pattern longer than prefix");
    if (prefix.empty()) return 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j + pattern.size() <= prefix.size(); ++j) {
        if (std::equal(pattern.begin(), pattern.end(), prefix.begin() + j)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(prefix.size());
}

FrequencyTable empirical_exact_frequencies(std::span<const Symbol> prefix,
                                           std::size_t max_return_len) {
    FrequencyTable table;
    table.method = FreqMethod::empirical;
    const std::size_t n = prefix.size();
    if (n == 0) return table;

    std::map<Word, std::size_t> counts;
    std::size_t zeros = 0;
    std::size_t last_zero = 0;
    bool seen_zero = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (prefix[i] != 0) continue;
        ++zeros;
        if (seen_zero && i > last_zero + 1) {
            std::size_t len = i - last_zero - 1;
            if (len <= max_return_len)
                ++counts[Word(prefix.begin() + last_zero + 1, prefix.begin() + i)];
        }
        last_zero = i;
        seen_zero = true;
    }
    table.rho0 = static_cast<double>(zeros) / static_cast<double>(n);
    for (auto& [w, c] : counts)
        table.exact.emplace(w, static_cast<double>(c) / static_cast<double>(n));
    return table;
}

} // namespace rankone
