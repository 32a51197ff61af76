#include "rankone/multifractal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rankone/errors.hpp"
#include "rankone/lyapunov.hpp"

namespace rankone::mfa {

void PotentialSpec::validate() const {
    if (f.rows() == 0 || f.rows() != f.cols())
        throw ConfigError("potential table must be square and nonempty");
    if (!f.allFinite()) throw ConfigError("potential table must be finite");
}

void WeightSequence::validate() const {
    for (Symbol w : values)
        if (w > 1)
            throw ConfigError(
                "weights must take values in {0,1}: weight 0 must map to the "
                "rank-one all-ones matrix");
}

Eigen::MatrixXd beta_matrix(const PotentialSpec& pot, int w, double beta) {
    pot.validate();
    if (w != 0 && w != 1) throw ConfigError("weight must be 0 or 1");
    return (static_cast<double>(w) * beta * pot.f.array()).exp().matrix();
}

namespace {

lyap::MatrixFamily beta_family(const PotentialSpec& pot, double beta) {
    const auto S = static_cast<Eigen::Index>(pot.alphabet());
    lyap::RankOneMatrix ones;
    ones.u = lyap::CVector::Ones(S);
    ones.v = lyap::CVector::Ones(S);
    return lyap::MatrixFamily::create(
        std::move(ones), {beta_matrix(pot, 1, beta).cast<lyap::Complex>()});
}

void check_runs_only(const FrequencyTable& freqs) {
    for (const auto& [w, f] : freqs.exact)
        for (Symbol s : w)
            if (s != 1)
                throw ConfigError("frequency table of a weight sequence must "
                                  "contain runs of 1s only");
}

} // namespace

double pressure(const PotentialSpec& pot, const FrequencyTable& freqs, double beta) {
    pot.validate();
    check_runs_only(freqs);
    lyap::LyapunovValue v = lyap::closed_form_lyapunov(beta_family(pot, beta), freqs);
    if (v.minus_infinity) throw NumericalBreakdown("pressure degenerated to -infinity");
    if (!std::isfinite(v.value))
        throw NumericalBreakdown("pressure overflowed; beta * |w| * max|f| too large");
    return v.value;
}

double pressure_derivative(const PotentialSpec& pot, const FrequencyTable& freqs,
                           double beta) {
    pot.validate();
    check_runs_only(freqs);
    const auto S = static_cast<Eigen::Index>(pot.alphabet());
    const Eigen::MatrixXd A = beta_matrix(pot, 1, beta);
    const Eigen::MatrixXd dA = pot.f.cwiseProduct(A);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(S);

    double total = 0.0;
    for (const auto& [w, fw] : freqs.exact) {
        if (fw == 0.0) continue;
        const std::size_t t = w.size();
        // product rule over A^t: d(A^t) = sum_k A^k dA A^{t-1-k}
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(S, S);
        std::vector<Eigen::MatrixXd> powers{P};
        for (std::size_t k = 0; k < t; ++k) powers.push_back(powers.back() * A);
        double value = one.dot(powers[t] * one);
        double derivative = 0.0;
        for (std::size_t k = 0; k < t; ++k)
            derivative += one.dot(powers[k] * dA * powers[t - 1 - k] * one);
        total += fw * derivative / value;
    }
    return total;
}

double pressure_derivative_at_infinity(const PotentialSpec& pot, const FrequencyTable& freqs,
                                       bool plus) {
    pot.validate();
    check_runs_only(freqs);
    const auto S = static_cast<Eigen::Index>(pot.alphabet());
    double total = 0.0;
    for (const auto& [w, fw] : freqs.exact) {
        if (fw == 0.0) continue;
        const std::size_t t = w.size();
        // extreme path sum of f over t steps (max-plus / min-plus power)
        Eigen::VectorXd m = Eigen::VectorXd::Zero(S);
        for (std::size_t step = 0; step < t; ++step) {
            Eigen::VectorXd next(S);
            for (Eigen::Index j = 0; j < S; ++j) {
                double best = plus ? -std::numeric_limits<double>::infinity()
                                   : std::numeric_limits<double>::infinity();
                for (Eigen::Index i = 0; i < S; ++i) {
                    double cand = m(i) + pot.f(i, j);
                    best = plus ? std::max(best, cand) : std::min(best, cand);
                }
                next(j) = best;
            }
            m = next;
        }
        total += fw * (plus ? m.maxCoeff() : m.minCoeff());
    }
    return total;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    if (points == 0) throw GridEmpty("grid has no points");
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

PressureCurve pressure_curve(const PotentialSpec& pot, const FrequencyTable& freqs,
                             const std::vector<double>& beta_grid, std::size_t threads) {
    if (beta_grid.empty()) throw GridEmpty("grid has no points");
    if (!std::is_sorted(beta_grid.begin(), beta_grid.end()))
        throw ConfigError("beta grid must be sorted");
    PressureCurve curve;
    curve.samples.resize(beta_grid.size());
    auto evaluate = [&](std::size_t i) {
        double beta = beta_grid[i];
        curve.samples[i] = {beta, pressure(pot, freqs, beta),
                            pressure_derivative(pot, freqs, beta)};
    };
    threads = std::min(threads, beta_grid.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < beta_grid.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < beta_grid.size();
                     i = next.fetch_add(1))
                    evaluate(i);
            });
        for (auto& th : pool) th.join();
    }
    return curve;
}

SpectrumCurve spectrum(const PotentialSpec& pot, const FrequencyTable& freqs,
                       const PressureCurve& curve) {
    const double logS = std::log(static_cast<double>(pot.alphabet()));
    SpectrumCurve out;
    out.samples.reserve(curve.samples.size());
    for (const auto& s : curve.samples)
        out.samples.push_back({s.dpsi, (s.psi - s.beta * s.dpsi) / logS});
    out.alpha_min = pressure_derivative_at_infinity(pot, freqs, false);
    out.alpha_max = pressure_derivative_at_infinity(pot, freqs, true);
    return out;
}

SpectrumCurve spectrum(const PotentialSpec& pot, const FrequencyTable& freqs,
                       const std::vector<double>& beta_grid, std::size_t threads) {
    return spectrum(pot, freqs, pressure_curve(pot, freqs, beta_grid, threads));
}

} // namespace rankone::mfa
