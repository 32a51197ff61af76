#include "rankone/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankone/errors.hpp"
#include "rankone/rng.hpp"

namespace rankone::seq {

namespace {

constexpr std::int64_t kLengthCap = std::int64_t{1} << 56;

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    return (a > kLengthCap - b) ? kLengthCap : a + b;
}

} // namespace

Word Substitution::apply(std::span<const Symbol> w) const {
    Word out;
    std::size_t total = 0;
    for (Symbol a : w) total += images[a].size();
    out.reserve(total);
    for (Symbol a : w) {
        const Word& img = images[a];
        out.insert(out.end(), img.begin(), img.end());
    }
    return out;
}

void Substitution::validate() const {
    if (alphabet_size == 0 || images.size() != alphabet_size)
        throw ConfigError("substitution needs one image per letter");
    if (seed >= alphabet_size) throw ConfigError("seed letter outside alphabet");
    for (std::size_t a = 0; a < alphabet_size; ++a) {
        if (images[a].empty())
            throw ConfigError("substitution image of letter " + std::to_string(a) +
                              " is empty");
        for (Symbol s : images[a])
            if (s >= alphabet_size)
                throw ConfigError("substitution image contains letter outside alphabet");
    }
    if (images[seed].front() != seed)
        throw NotProlongable("zeta(seed) does not start with the seed letter");

    // |zeta^n(b)| is a nondecreasing integer sequence; a coordinate that
    // stalls for s+1 consecutive steps is stalled forever (every letter it
    // reaches has stalled too), so it is bounded and condition (i) fails.
    const std::size_t s = alphabet_size;
    std::vector<std::int64_t> len(s, 1);
    std::vector<std::size_t> stall(s, 0);
    for (std::size_t step = 0; step < 4 * (s + 1); ++step) {
        std::vector<std::int64_t> next(s, 0);
        for (std::size_t b = 0; b < s; ++b)
            for (Symbol a : images[b]) next[b] = sat_add(next[b], len[a]);
        for (std::size_t b = 0; b < s; ++b) {
            stall[b] = (next[b] == len[b] && next[b] < kLengthCap) ? stall[b] + 1 : 0;
            if (stall[b] > s)
                throw NotGrowing("letter " + std::to_string(b) +
                                 " has bounded images under iteration");
        }
        len.swap(next);
    }
}

Substitution Substitution::fibonacci() {
    return Substitution{2, {{0, 1}, {0}}, 0};
}

Substitution Substitution::thue_morse() {
    return Substitution{2, {{0, 1}, {1, 0}}, 0};
}

Substitution Substitution::tribonacci() {
    return Substitution{3, {{0, 1}, {0, 2}, {0}}, 0};
}

Word substitution_fixed_point(const Substitution& sub, std::size_t n) {
    sub.validate();
    Word w{sub.seed};
    while (w.size() < n) {
        Word next = sub.apply(w);
        if (next.size() == w.size() && next == w)
            throw NotGrowing("fixed point does not reach requested length");
        w = std::move(next);
    }
    w.resize(n);
    return w;
}

Word bfree_characteristic(const bfree::BFreeSet& B, std::size_t n) {
    return B.characteristic(n);
}

Word increasing_runs_word(std::size_t n) {
    Word w;
    w.reserve(n);
    std::size_t run = 1;
    while (w.size() < n) {
        w.push_back(0);
        for (std::size_t i = 0; i < run && w.size() < n; ++i) w.push_back(1);
        ++run;
    }
    return w;
}

namespace {

void check_probability_vector(const std::vector<double>& p) {
    if (p.empty()) throw NotStochastic("empty probability vector");
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw NotStochastic("negative probability");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw NotStochastic("probabilities sum to " + std::to_string(total));
}

Symbol draw(const std::vector<double>& p, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<Symbol>(i);
    }
    return static_cast<Symbol>(p.size() - 1);
}

} // namespace

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P) {
    const std::size_t m = P.size();
    if (m == 0) throw NotStochastic("empty transition matrix");
    for (const auto& row : P) {
        if (row.size() != m) throw NotStochastic("transition matrix not square");
        check_probability_vector(row);
    }
    // Solve pi(P - I) = 0 with sum pi = 1: replace the last equation of the
    // transposed system by the normalization and eliminate.
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < m; ++j) A[m - 1][j] = 1.0;
    A[m - 1][m] = 1.0;

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-14)
            throw NotStochastic("stationary distribution is not unique");
        std::swap(A[col], A[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < m; ++i) pi[i] = A[i][m] / A[i][i];
    for (double& x : pi) x = std::max(x, 0.0);
    double total = 0.0;
    for (double x : pi) total += x;
    for (double& x : pi) x /= total;
    return pi;
}

Word sample_bernoulli(const BernoulliSource& src, std::size_t n) {
    check_probability_vector(src.p);
    if (src.p[0] <= 0.0)
        throw ZeroMassOnSymbolZero("symbol 0 has probability 0");
    SplitMix64 rng(src.seed);
    Word w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = draw(src.p, rng.next_unit());
    return w;
}

Word sample_markov(const MarkovSource& src, std::size_t n) {
    std::vector<double> pi = stationary_distribution(src.transition);
    if (pi[0] <= 0.0)
        throw ZeroMassOnSymbolZero("symbol 0 has stationary probability 0");
    SplitMix64 rng(src.seed);
    Word w(n);
    if (n == 0) return w;
    Symbol state = draw(pi, rng.next_unit());
    w[0] = state;
    for (std::size_t i = 1; i < n; ++i) {
        state = draw(src.transition[state], rng.next_unit());
        w[i] = state;
    }
    return w;
}

SequenceStream::SequenceStream(SourceDescriptor desc) : desc_(std::move(desc)) {}

std::span<const Symbol> SequenceStream::prefix(std::size_t n) {
    if (buffer_.size() < n) {
        // Every source is deterministic given (descriptor, seed), so
        // regenerating from scratch preserves prefix monotonicity.
        buffer_ = std::visit(
            [&](const auto& src) -> Word {
                using T = std::decay_t<decltype(src)>;
                if constexpr (std::is_same_v<T, SubstitutionSource>)
                    return substitution_fixed_point(src.sub, n);
                else if constexpr (std::is_same_v<T, BFreeSource>)
                    return bfree_characteristic(src.set, n);
                else if constexpr (std::is_same_v<T, BernoulliSource>)
                    return sample_bernoulli(src, n);
                else if constexpr (std::is_same_v<T, MarkovSource>)
                    return sample_markov(src, n);
                else if constexpr (std::is_same_v<T, IncreasingRunsSource>)
                    return increasing_runs_word(n);
                else {
                    if (src.word.size() < n)
                        throw ConfigError("explicit word shorter than requested prefix");
                    return Word(src.word.begin(), src.word.begin() + n);
                }
            },
            desc_);
    }
    return std::span<const Symbol>(buffer_.data(), n);
}

} // namespace rankone::seq
