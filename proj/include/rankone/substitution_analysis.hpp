#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "rankone/returnwords.hpp"
#include "rankone/sequences.hpp"
#include "rankone/word.hpp"

namespace rankone::subst {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Composition matrix m_{a,b} = number of occurrences of letter a in
// zeta(b). Column sums are the image lengths and M_{zeta^n} = M^n.
IntMatrix composition_matrix(const seq::Substitution& sub);

// M^N > 0 for some N >= 1, tested at Wielandt's exponent (s-1)^2 + 1.
bool is_primitive(const IntMatrix& M);

struct PerronData {
    double eigenvalue = 0.0;
    Eigen::VectorXd probability_vector; // nonnegative, sums to 1
    int iterations = 0;
    double residual = 0.0; // ||Mv - rho v||_inf at exit
};

// Dominant eigenpair of a primitive nonnegative matrix by power iteration
// with Collatz-Wielandt bounds, to relative residual 1e-12.
PerronData perron(const IntMatrix& M);
PerronData perron(const Eigen::MatrixXd& M);

// Michel's induced substitution zeta_t on the admissible t-words of the
// fixed point, listed in first-appearance order. Images read off the first
// |zeta(w_0)| sliding windows of zeta(w).
struct InducedSubstitution {
    seq::Substitution base;
    int order = 1;
    std::vector<Word> alphabet;   // admissible t-words
    seq::Substitution induced;    // substitution over indices into `alphabet`
};

InducedSubstitution induced_substitution(const seq::Substitution& sub, int t);

// Frequencies nu([w]) of all admissible t-words: the Perron probability
// vector of the composition matrix of zeta_t.
std::map<Word, double> frequencies_via_michel(const seq::Substitution& sub, int t);

// Durand's normalized derivative substitution eta on the return words to
// [0] (words 0* with exactly one 0 such that w0 occurs), listed in
// first-appearance order via phi, with phi . eta = zeta . phi.
struct DerivativeSubstitution {
    seq::Substitution base;
    std::vector<Word> return_words_to_zero; // phi(i), each starts with 0
    seq::Substitution eta;
};

DerivativeSubstitution derivative_substitution(const seq::Substitution& sub);

// Exact frequencies F_w = lambda([0w]) mu([0]): lambda from the Perron
// vector of M_eta, mu([0]) from the Perron vector of M_zeta. The element
// "0" of R(0) (adjacent zeros) feeds rho0 only.
FrequencyTable exact_frequencies_via_durand(const seq::Substitution& sub);

// F_w by the alternating sum over chains w < w' < ... of proper subwords
// inside `return_words`, with S^(0) = nu([w]) taken from `cylinder_freq`.
// Occurrence counts N_w(w') are plain left-to-right sliding counts.
FrequencyTable exact_frequencies_via_inclusion_exclusion(
    const std::map<Word, double>& cylinder_freq, const std::set<Word>& return_words,
    double rho0);

// Distinct return words of a prefix of the fixed point, for feeding the
// inclusion-exclusion route.
std::set<Word> return_words_from_prefix(const seq::Substitution& sub,
                                        std::size_t prefix_length = 1 << 14);

// The Michel route end to end: discover the return words, compute nu([w])
// from the induced substitutions zeta_t, and resolve the exact frequencies
// by the alternating-sum formula. rho0 = mu([0]) from M_zeta.
FrequencyTable michel_exact_frequencies(const seq::Substitution& sub);

} // namespace rankone::subst
