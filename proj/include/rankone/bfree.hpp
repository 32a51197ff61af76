#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rankone/returnwords.hpp"
#include "rankone/word.hpp"

namespace rankone::bfree {

// A set B = {b_1 < b_2 < ...} of pairwise coprime integers >= 2 with
// sum 1/b_k < infinity. Either an explicit finite list or the built-in
// infinite family of prime squares (whose B-free integers are the
// square-free integers). Generators are materialized on demand up to a
// cutoff; the part beyond the cutoff is controlled by tail_bound_beyond.
class BFreeSet {
public:
    static BFreeSet squarefree();
    static BFreeSet explicit_set(std::vector<std::int64_t> generators);

    bool is_infinite() const { return kind_ == Kind::Squarefree; }

    // Smallest generator b_1.
    std::int64_t b1() const;

    // All generators b_k <= limit, increasing.
    std::vector<std::int64_t> generators_up_to(std::int64_t limit) const;

    // Upper bound on sum_{b_k > limit} 1/b_k.
    double tail_bound_beyond(std::int64_t limit) const;

    // Sieve of eta_1..eta_n: eta_k = 0 iff some b in B divides k. Integers
    // index from 1; the word indexes the same values from 0.
    Word characteristic(std::size_t n) const;

private:
    enum class Kind { Squarefree, Explicit };
    Kind kind_ = Kind::Squarefree;
    std::vector<std::int64_t> generators_; // explicit only

    BFreeSet() = default;
};

// Immutable snapshot of the shared prime table, grown monotonically as
// larger cutoffs are requested. The snapshot may extend beyond n; callers
// must stop at their own cutoff so results do not depend on cache warmth.
std::shared_ptr<const std::vector<std::int64_t>> primes_up_to(std::int64_t n);

// t(A, b): the number of residue classes modulo b met by A.
int residue_class_count(const std::vector<std::int64_t>& A, std::int64_t b);

// A is B-admissible iff t(A, b_k) < b_k for every generator; only
// generators b_k <= |A| can be saturated, so the check is finite.
bool is_admissible(const std::vector<std::int64_t>& A, const BFreeSet& B);

// Positions forced to 1 (A) and to 0 (B) of a cylinder in {0,1}^N.
struct CylinderSpec {
    std::vector<std::int64_t> ones;
    std::vector<std::int64_t> zeros;
};

// Mirsky measure of the all-ones cylinder C^1_A:
//   nu(C^1_A) = prod_k (1 - t(A, b_k)/b_k),
// which is 0 exactly when A is not admissible. `precision` bounds the
// relative error of the truncated product after the tail correction.
double cylinder_measure_positive(const std::vector<std::int64_t>& A, const BFreeSet& B,
                                 double precision = 1e-7);

// Mirsky measure of C_{A,B} by inclusion-exclusion over the 0-positions:
//   nu(C_{A,B}) = sum_{A subset D subset A u B} (-1)^{#(D\A)} nu(C^1_D).
double cylinder_measure(const CylinderSpec& spec, const BFreeSet& B, double precision = 1e-7);

// Euler-type product zeta^B_t(s) = prod_k (1 - t/b_k^{s/2})^{-1}. For the
// square-free family b_k = p^2 this is prod_p (1 - t/p^s)^{-1}, the
// function zeta_t(s) of the Dirichlet series sum t^Omega(n)/n^s; in
// particular zeta^B_1(2) is the Riemann zeta value zeta(2).
double euler_zeta(int t, double s, const BFreeSet& B, double precision = 1e-7);

// Exact frequencies F_{1^t} of the characteristic sequence of the B-free
// integers, for the full return-word set R = {1, 11, ..., 1^{b1-1}}.
// Computed by two routes that must agree within 10*precision:
//   (1) the alternating sum over chains of runs with S^(0) = 1/zeta^B_t(2);
//   (2) the telescoping F_{1^t} = nu([1^t 0]) - nu([1^{t+1} 0]) through
//       cylinder measures.
// rho0 = 1 - 1/zeta^B_1(2).
FrequencyTable exact_frequencies(const BFreeSet& B, double precision = 1e-7);

} // namespace rankone::bfree
