#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rankone/bfree.hpp"
#include "rankone/word.hpp"

namespace rankone::seq {

// A substitution zeta: letter -> nonempty word on {0,...,s-1}. The fixed
// point zeta^inf(seed) exists when zeta(seed) begins with seed and every
// letter's image grows without bound under iteration.
struct Substitution {
    std::size_t alphabet_size = 0;
    std::vector<Word> images;
    Symbol seed = 0;

    const Word& image(Symbol a) const { return images[a]; }
    Word apply(std::span<const Symbol> w) const;

    // Throws NotProlongable / NotGrowing / ConfigError.
    void validate() const;

    static Substitution fibonacci();  // 0 -> 01, 1 -> 0
    static Substitution thue_morse(); // 0 -> 01, 1 -> 10
    static Substitution tribonacci(); // 0 -> 01, 1 -> 02, 2 -> 0
};

// Length-n prefix of the fixed point zeta^inf(seed).
Word substitution_fixed_point(const Substitution& sub, std::size_t n);

// Characteristic word of the B-free integers: position k-1 holds eta_k.
Word bfree_characteristic(const bfree::BFreeSet& B, std::size_t n);

// The sequence 0 1 0 1^2 0 1^3 ... whose return-word lengths grow without
// bound (rho0 = 0, all exact frequencies 0).
Word increasing_runs_word(std::size_t n);

struct BernoulliSource {
    std::vector<double> p;
    std::uint64_t seed = 0;
};

struct MarkovSource {
    std::vector<std::vector<double>> transition; // row-stochastic
    std::uint64_t seed = 0;
};

// Stationary vector pi with pi P = pi, sum pi = 1. Throws NotStochastic.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P);

// Seeded, reproducible samples. Markov start states are drawn from the
// stationary vector. Throws NotStochastic / ZeroMassOnSymbolZero.
Word sample_bernoulli(const BernoulliSource& src, std::size_t n);
Word sample_markov(const MarkovSource& src, std::size_t n);

struct SubstitutionSource {
    Substitution sub;
};
struct BFreeSource {
    bfree::BFreeSet set;
};
struct ExplicitSource {
    Word word;
};
struct IncreasingRunsSource {};

using SourceDescriptor = std::variant<SubstitutionSource, BFreeSource, BernoulliSource,
                                      MarkovSource, ExplicitSource, IncreasingRunsSource>;

// Lazily extended prefix view of a sequence. Deterministic for a fixed
// descriptor (and seed); prefix(n) is always a prefix of prefix(n+1).
// Single writer: do not extend one stream from several threads.
class SequenceStream {
public:
    explicit SequenceStream(SourceDescriptor desc);

    std::span<const Symbol> prefix(std::size_t n);
    const SourceDescriptor& descriptor() const { return desc_; }

private:
    SourceDescriptor desc_;
    Word buffer_;
};

} // namespace rankone::seq
