#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rankone/returnwords.hpp"
#include "rankone/word.hpp"

namespace rankone::mfa {

// A potential f(x_0, x_1) on the first two coordinates of S^N.
struct PotentialSpec {
    Eigen::MatrixXd f; // |S| x |S|

    std::size_t alphabet() const { return static_cast<std::size_t>(f.rows()); }
    void validate() const;
};

// Weight sequences are restricted to {0,1}: the weight-0 matrix must be
// the rank-one all-ones matrix for the closed form to apply.
struct WeightSequence {
    Word values; // a representative prefix; every entry 0 or 1
    void validate() const;
};

// A_w(beta) = (e^{beta w f(i,j)}): the all-ones matrix for w = 0.
Eigen::MatrixXd beta_matrix(const PotentialSpec& pot, int w, double beta);

// psi(beta): the Lyapunov exponent of the beta-deformed family, via the
// closed form with 1'1 = |S| carrying the rho0 log|S| term. The frequency
// table must describe the weight sequence's return words (runs of 1s).
double pressure(const PotentialSpec& pot, const FrequencyTable& freqs, double beta);

// Analytic psi'(beta): term-by-term product-rule derivative of
// log(1' A_{1^t}(beta) 1) using dA_1/dbeta = f .* A_1.
double pressure_derivative(const PotentialSpec& pot, const FrequencyTable& freqs,
                           double beta);

// psi'(+-inf) from the dominant-exponent structure: extreme path sums of f
// over each word block (max-plus / min-plus dynamic programming).
double pressure_derivative_at_infinity(const PotentialSpec& pot, const FrequencyTable& freqs,
                                       bool plus);

struct PressureCurve {
    struct Sample {
        double beta;
        double psi;
        double dpsi;
    };
    std::vector<Sample> samples;
};

struct SpectrumCurve {
    struct Sample {
        double alpha;
        double dim;
    };
    std::vector<Sample> samples;
    double alpha_min = 0.0; // psi'(-inf)
    double alpha_max = 0.0; // psi'(+inf)
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

// Grid points are independent; `threads` > 1 evaluates them in parallel
// with the output order fixed by the grid.
PressureCurve pressure_curve(const PotentialSpec& pot, const FrequencyTable& freqs,
                             const std::vector<double>& beta_grid, std::size_t threads = 1);

// Parametric Legendre transform: (alpha, dim) = (psi'(beta),
// (psi(beta) - beta psi'(beta)) / log|S|) over the grid.
SpectrumCurve spectrum(const PotentialSpec& pot, const FrequencyTable& freqs,
                       const PressureCurve& curve);
SpectrumCurve spectrum(const PotentialSpec& pot, const FrequencyTable& freqs,
                       const std::vector<double>& beta_grid, std::size_t threads = 1);

} // namespace rankone::mfa
