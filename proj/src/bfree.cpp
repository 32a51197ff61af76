#include "rankone/bfree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>

#include "rankone/errors.hpp"

namespace rankone::bfree {

namespace {

constexpr std::int64_t kSieveCap = 300'000'000; // largest prime cutoff we will sieve

std::vector<std::int64_t> sieve(std::int64_t n) {
    std::vector<std::int64_t> primes;
    if (n < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (composite[p]) continue;
        for (std::int64_t q = p * p; q <= n; q += p) composite[q] = true;
    }
    primes.reserve(static_cast<std::size_t>(n > 10 ? n / (std::log(double(n)) - 1.1) : 8));
    for (std::int64_t p = 2; p <= n; ++p)
        if (!composite[p]) primes.push_back(p);
    return primes;
}

std::mutex prime_mutex;
std::shared_ptr<const std::vector<std::int64_t>> prime_cache;
std::int64_t prime_cache_limit = 0;

// Iteration stops at the caller's own cutoff, never at the cache end.
template <typename Fn>
void for_primes_up_to(std::int64_t n, Fn&& fn) {
    auto snapshot = primes_up_to(n);
    auto end = std::upper_bound(snapshot->begin(), snapshot->end(), n);
    for (auto it = snapshot->begin(); it != end; ++it) fn(*it);
}

} // namespace

std::shared_ptr<const std::vector<std::int64_t>> primes_up_to(std::int64_t n) {
    if (n > kSieveCap)
        throw PrecisionUnreachable("prime cutoff " + std::to_string(n) +
                                   " exceeds sieve capacity");
    std::lock_guard<std::mutex> lock(prime_mutex);
    if (n > prime_cache_limit) {
        std::int64_t limit = std::max<std::int64_t>(n, 2 * prime_cache_limit);
        prime_cache = std::make_shared<const std::vector<std::int64_t>>(sieve(limit));
        prime_cache_limit = limit;
    }
    return prime_cache;
}

BFreeSet BFreeSet::squarefree() {
    BFreeSet b;
    b.kind_ = Kind::Squarefree;
    return b;
}

BFreeSet BFreeSet::explicit_set(std::vector<std::int64_t> generators) {
    if (generators.empty()) throw ConfigError("empty generator list");
    std::sort(generators.begin(), generators.end());
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i] < 2) throw ConfigError("generators must be >= 2");
        if (i && generators[i] == generators[i - 1])
            throw ConfigError("duplicate generator");
        for (std::size_t j = 0; j < i; ++j)
            if (std::gcd(generators[i], generators[j]) != 1)
                throw ConfigError("generators " + std::to_string(generators[j]) + " and " +
                                  std::to_string(generators[i]) + " are not coprime");
    }
    BFreeSet b;
    b.kind_ = Kind::Explicit;
    b.generators_ = std::move(generators);
    return b;
}

std::int64_t BFreeSet::b1() const {
    if (kind_ == Kind::Squarefree) return 4;
    return generators_.front();
}

std::vector<std::int64_t> BFreeSet::generators_up_to(std::int64_t limit) const {
    if (kind_ == Kind::Explicit) {
        std::vector<std::int64_t> out;
        for (std::int64_t b : generators_)
            if (b <= limit) out.push_back(b);
        return out;
    }
    std::vector<std::int64_t> out;
    if (limit < 4) return out;
    auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit)));
    while ((root + 1) * (root + 1) <= limit) ++root;
    while (root * root > limit) --root;
    for_primes_up_to(root, [&](std::int64_t p) { out.push_back(p * p); });
    return out;
}

double BFreeSet::tail_bound_beyond(std::int64_t limit) const {
    if (kind_ == Kind::Explicit) {
        double s = 0.0;
        for (std::int64_t b : generators_)
            if (b > limit) s += 1.0 / static_cast<double>(b);
        return s;
    }
    // sum_{p^2 > limit} 1/p^2 <= sum_{n > sqrt(limit)} 1/n^2 <= 1/(sqrt(limit)-1)
    double root = std::sqrt(static_cast<double>(limit));
    if (root <= 2.0) return 0.5;
    return 1.0 / (root - 1.0);
}

Word BFreeSet::characteristic(std::size_t n) const {
    Word eta(n, Symbol{1});
    for (std::int64_t b : generators_up_to(static_cast<std::int64_t>(n))) {
        for (std::int64_t k = b; k <= static_cast<std::int64_t>(n); k += b)
            eta[static_cast<std::size_t>(k - 1)] = 0;
    }
    return eta;
}

int residue_class_count(const std::vector<std::int64_t>& A, std::int64_t b) {
    if (b < 2) throw ConfigError("modulus must be >= 2");
    std::set<std::int64_t> classes;
    for (std::int64_t a : A) classes.insert(((a % b) + b) % b);
    return static_cast<int>(classes.size());
}

bool is_admissible(const std::vector<std::int64_t>& A, const BFreeSet& B) {
    if (A.empty()) return true;
    // t(A, b) <= |A| < b for b > |A|, so only small generators can saturate.
    for (std::int64_t b : B.generators_up_to(static_cast<std::int64_t>(A.size()))) {
        if (residue_class_count(A, b) == b) return false;
    }
    return true;
}

namespace {

// Truncated product prod_{b <= cutoff} (1 - t(A,b)/b) with a midpoint tail
// correction: the dropped log-mass lies in [-K, 0] with K bounded by
// tA * tail_bound, so multiplying by exp(-K/2) leaves a relative error of
// at most K/2 up to second order. For b > max(A) the count t(A,b) equals
// the number of distinct elements of A, which keeps the large-generator
// sweep a plain log1p accumulation.
double euler_product_over_generators(const std::vector<std::int64_t>& A, const BFreeSet& B,
                                     double precision) {
    if (A.empty()) return 1.0;
    if (precision <= 0) throw ConfigError("precision must be positive");
    const std::set<std::int64_t> distinct(A.begin(), A.end());
    const double tA = static_cast<double>(distinct.size());
    const std::int64_t max_a = *std::max_element(A.begin(), A.end());
    const double budget = precision / 4.0;

    double log_sum = 0.0;
    double tail = 0.0;
    if (B.is_infinite()) {
        // prime cutoff P from t/(P-1) <= 2*budget; generators are p^2 <= P^2
        double P = tA / (2.0 * budget) + 2.0;
        if (P > static_cast<double>(kSieveCap))
            throw PrecisionUnreachable("tail bound needs primes beyond sieve capacity");
        std::int64_t cutoff = static_cast<std::int64_t>(P);
        bool zero_factor = false;
        for_primes_up_to(cutoff, [&](std::int64_t p) {
            std::int64_t b = p * p;
            double t = b <= max_a ? static_cast<double>(residue_class_count(A, b)) : tA;
            if (t >= static_cast<double>(b)) zero_factor = true;
            if (zero_factor) return;
            log_sum += std::log1p(-t / static_cast<double>(b));
        });
        if (zero_factor) return 0.0;
        tail = tA * B.tail_bound_beyond(cutoff * cutoff);
    } else {
        for (std::int64_t b : B.generators_up_to(std::numeric_limits<std::int64_t>::max())) {
            double t = b <= max_a ? static_cast<double>(residue_class_count(A, b)) : tA;
            double factor = 1.0 - t / static_cast<double>(b);
            if (factor <= 0.0) return 0.0;
            log_sum += std::log1p(-t / static_cast<double>(b));
        }
    }
    return std::exp(log_sum - tail / 2.0);
}

} // namespace

double cylinder_measure_positive(const std::vector<std::int64_t>& A, const BFreeSet& B,
                                 double precision) {
    if (!is_admissible(A, B)) return 0.0;
    return euler_product_over_generators(A, B, precision);
}

double cylinder_measure(const CylinderSpec& spec, const BFreeSet& B, double precision) {
    for (std::int64_t a : spec.ones)
        if (a < 1) throw ConfigError("cylinder positions index from 1");
    for (std::int64_t b : spec.zeros)
        if (b < 1) throw ConfigError("cylinder positions index from 1");
    for (std::int64_t a : spec.ones)
        for (std::int64_t b : spec.zeros)
            if (a == b) throw ConfigError("cylinder 1-positions and 0-positions overlap");
    if (spec.zeros.size() > 20)
        throw TooManyFreePositions("inclusion-exclusion over " +
                                   std::to_string(spec.zeros.size()) + " positions");
    const std::size_t nb = spec.zeros.size();
    const double per_term = precision / static_cast<double>(std::size_t{1} << nb);
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << nb); ++mask) {
        std::vector<std::int64_t> D = spec.ones;
        int extra = 0;
        for (std::size_t i = 0; i < nb; ++i) {
            if (mask & (std::size_t{1} << i)) {
                D.push_back(spec.zeros[i]);
                ++extra;
            }
        }
        double term = cylinder_measure_positive(D, B, per_term);
        total += (extra % 2 == 0) ? term : -term;
    }
    return total;
}

double euler_zeta(int t, double s, const BFreeSet& B, double precision) {
    if (t < 1) throw ConfigError("euler_zeta needs t >= 1");
    if (precision <= 0) throw ConfigError("precision must be positive");
    // Factors 1 - t/b^{s/2}; for the square-free family b = p^2 this is
    // 1 - t/p^s. Convergence needs sum b^{-s/2} finite and all factors > 0.
    const double half = s / 2.0;
    if (B.is_infinite() && s <= 1.0) throw Divergent("zeta_t(s) diverges for s <= 1");
    const double budget = precision / 4.0;

    double log_prod = 0.0;
    double tail = 0.0;
    if (B.is_infinite()) {
        // primes: tail sum_{p > P} t/p^s <= t * P^{1-s}/(s-1)
        double P = std::pow(static_cast<double>(t) / ((s - 1.0) * 2.0 * budget),
                            1.0 / (s - 1.0)) +
                   2.0;
        if (!(P <= static_cast<double>(kSieveCap)))
            throw PrecisionUnreachable("tail bound needs primes beyond sieve capacity");
        std::int64_t cutoff = std::max<std::int64_t>(static_cast<std::int64_t>(P), 3);
        for_primes_up_to(cutoff, [&](std::int64_t p) {
            double factor = 1.0 - static_cast<double>(t) / std::pow(double(p), s);
            if (factor <= 0.0)
                throw Divergent("factor 1 - t/p^s vanishes at p = " + std::to_string(p));
            log_prod += std::log(factor);
        });
        tail = static_cast<double>(t) * std::pow(static_cast<double>(cutoff), 1.0 - s) /
               (s - 1.0);
    } else {
        for (std::int64_t b :
             B.generators_up_to(std::numeric_limits<std::int64_t>::max())) {
            double factor = 1.0 - static_cast<double>(t) / std::pow(double(b), half);
            if (factor <= 0.0)
                throw Divergent("factor 1 - t/b^{s/2} vanishes at b = " + std::to_string(b));
            log_prod += std::log(factor);
        }
    }
    return std::exp(-(log_prod - tail / 2.0));
}

namespace {

// S^(j) sums of Theorem-style chains of runs 1^k < 1^{k+j1} < ... built on
// N_{1^a}(1^{a+j}) = j+1, with nu([1^t]) = 1/zeta^B_t(2).
// alternating_sum[k] = F_{1^k}.
std::vector<double> run_inclusion_exclusion(const std::vector<double>& nu_run) {
    const int lmax = static_cast<int>(nu_run.size()) - 1; // nu_run[t], 1 <= t <= lmax
    std::vector<double> F(lmax + 1, 0.0);
    for (int k = 1; k <= lmax; ++k) {
        // chains k = c0 < c1 < ... < cj <= lmax, weight prod (c_{i+1}-c_i+1)
        double total = 0.0;
        struct Frame {
            int last;
            int depth;
            double weight;
        };
        std::vector<Frame> stack{{k, 0, 1.0}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            double term = f.weight * nu_run[f.last];
            total += (f.depth % 2 == 0) ? term : -term;
            for (int nxt = f.last + 1; nxt <= lmax; ++nxt)
                stack.push_back({nxt, f.depth + 1,
                                 f.weight * static_cast<double>(nxt - f.last + 1)});
        }
        F[k] = total;
    }
    return F;
}

} // namespace

FrequencyTable exact_frequencies(const BFreeSet& B, double precision) {
    const std::int64_t b1 = B.b1();
    if (b1 > 17)
        throw ConfigError("return-word set {1,...,1^{b1-1}} too large (b1 = " +
                          std::to_string(b1) + ")");
    const int lmax = static_cast<int>(b1) - 1;

    // Route 1: alternating sums over chains with S^(0) = 1/zeta^B_t(2).
    std::vector<double> nu_run(lmax + 1, 0.0);
    for (int t = 1; t <= lmax; ++t) nu_run[t] = 1.0 / euler_zeta(t, 2.0, B, precision);
    std::vector<double> F_sum = run_inclusion_exclusion(nu_run);

    // Route 2: telescoping F_{1^t} = nu([1^t 0]) - nu([1^{t+1} 0]) through
    // the inclusion-exclusion cylinder measures.
    auto nu_run_zero = [&](int t) {
        CylinderSpec spec;
        for (int i = 1; i <= t; ++i) spec.ones.push_back(i);
        spec.zeros.push_back(t + 1);
        return cylinder_measure(spec, B, precision);
    };
    FrequencyTable table;
    table.method = FreqMethod::mirsky;
    table.rho0 = 1.0 - 1.0 / euler_zeta(1, 2.0, B, precision);
    for (int t = 1; t <= lmax; ++t) {
        double telescoped = nu_run_zero(t) - nu_run_zero(t + 1);
        if (std::abs(telescoped - F_sum[t]) > 10.0 * precision)
            throw MethodDisagreement(
                "F_{1^" + std::to_string(t) + "}: alternating sum " +
                std::to_string(F_sum[t]) + " vs telescoping " +
                std::to_string(telescoped));
        table.exact.emplace(Word(static_cast<std::size_t>(t), Symbol{1}), F_sum[t]);
    }
    return table;
}

} // namespace rankone::bfree
