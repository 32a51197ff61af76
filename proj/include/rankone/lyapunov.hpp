#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankone/returnwords.hpp"
#include "rankone/sequences.hpp"
#include "rankone/word.hpp"

namespace rankone::lyap {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// A_0 = u v' with lambda = v'u cached. (uv')^t = lambda^{t-1} uv' and
// ||uv'||_F = ||u||_2 ||v||_2.
struct RankOneMatrix {
    CVector u;
    CVector v;

    Complex lambda() const { return (v.transpose() * u)(0); }
    CMatrix dense() const { return u * v.transpose(); }

    // Factor a numerically rank-one matrix; throws RankOneViolation when the
    // residual exceeds 1e-10 relative.
    static RankOneMatrix from_dense(const CMatrix& A);
};

// The product alphabet: A_0 rank one plus dense A_1..A_{m-1}.
struct MatrixFamily {
    RankOneMatrix a0;
    std::vector<CMatrix> others;
    bool all_nonnegative = false;   // real with nonnegative entries
    bool others_invertible = false; // condition numbers below 1e12

    std::size_t dimension() const { return static_cast<std::size_t>(a0.u.size()); }
    std::size_t count() const { return others.size() + 1; }
    const CMatrix& letter(Symbol s) const { return s == 0 ? a0_dense_ : others[s - 1]; }

    static MatrixFamily create(RankOneMatrix a0, std::vector<CMatrix> others);

private:
    CMatrix a0_dense_; // fixed at creation; letter() stays safe to share
};

// v' A_w u for a 0-free word w, evaluated left to right.
Complex word_contraction(const MatrixFamily& family, const Word& w);

// Extended real in [-inf, +inf) with the closed form's per-term breakdown.
struct LyapunovValue {
    bool minus_infinity = false;
    double value = 0.0; // meaningful when !minus_infinity
    double rho0_term = 0.0;
    std::vector<std::pair<Word, double>> per_word_terms; // decreasing |w|
    std::string degenerate_reason;                       // "lambdaZero" | "annihilatingWord" | ""
    double truncation_bound = 0.0; // remainder bound for truncated series

    double as_double() const {
        return minus_infinity ? -std::numeric_limits<double>::infinity() : value;
    }
};

// L = rho0 log|v'u| + sum_w F_w log(|v' A_w u| / |v'u|), summed in
// decreasing |w| order. Degeneracies (v'u = 0, or an annihilating word
// with positive frequency) yield -infinity as a value, not an error.
LyapunovValue closed_form_lyapunov(const MatrixFamily& family, const FrequencyTable& freqs);

// Bernoulli specialization: rho0 = p_0 and F_w = p_0^2 p_w over all 0-free
// words, enumerated by length until the cumulative weight
// p_0 + sum (|w|+1) F_w reaches 1 - mass_tolerance.
LyapunovValue bernoulli_lyapunov(const MatrixFamily& family, const std::vector<double>& p,
                                 double mass_tolerance = 1e-12);

// Markov analogue: rho0 = pi_0 and F_w = pi_0 P(0,w_1) ... P(w_l,0).
LyapunovValue markov_lyapunov(const MatrixFamily& family,
                              const std::vector<std::vector<double>>& P,
                              double mass_tolerance = 1e-12);

// Independent products of rank-one matrices A_j = u_j v_j':
// L = sum_{i,j} p_i p_j log|u_i' v_j|.
double all_rank_one_lyapunov(const std::vector<RankOneMatrix>& matrices,
                             const std::vector<double>& p);

enum class MatrixNorm { frobenius, op_one };

struct DirectEstimate {
    bool minus_infinity = false;
    double estimate = 0.0;
    std::size_t zero_product_at = 0; // step index when minus_infinity
    std::vector<std::pair<std::size_t, double>> trace; // (k, (1/k) log ||Pi_k||)
};

// (1/n) log ||A_{w_0} ... A_{w_{n-1}}|| with per-step renormalization: the
// factored-out norms accumulate in log scale, so overflow cannot occur. An
// exactly zero running product reports -infinity.
DirectEstimate direct_estimate(const MatrixFamily& family, std::span<const Symbol> omega,
                               MatrixNorm norm = MatrixNorm::frobenius,
                               std::size_t trace_points = 64);
DirectEstimate direct_estimate(const MatrixFamily& family, seq::SequenceStream& omega,
                               std::size_t n, MatrixNorm norm = MatrixNorm::frobenius,
                               std::size_t trace_points = 64);

// Dominant eigenvalue modulus by power iteration from a seeded random
// start, relative tolerance 1e-10.
double spectral_radius(const Eigen::MatrixXd& A);

} // namespace rankone::lyap
