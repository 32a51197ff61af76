#include "rankone/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rankone/errors.hpp"
#include "rankone/rng.hpp"

namespace rankone::lyap {

namespace {

double matrix_norm(const CMatrix& A, MatrixNorm norm) {
    if (norm == MatrixNorm::frobenius) return A.norm();
    double best = 0.0; // operator 1-norm: max column abs sum
    for (Eigen::Index j = 0; j < A.cols(); ++j) best = std::max(best, A.col(j).cwiseAbs().sum());
    return best;
}

bool entries_nonnegative(const CMatrix& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            Complex z = A(i, j);
            if (z.imag() != 0.0 || z.real() < 0.0) return false;
        }
    return true;
}

bool invertible_at_tolerance(const CMatrix& A) {
    Eigen::JacobiSVD<CMatrix> svd(A);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    return smin > 0.0 && smax / smin < 1e12;
}

} // namespace

RankOneMatrix RankOneMatrix::from_dense(const CMatrix& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw DimensionMismatch("rank-one factorization needs a square matrix");
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0) throw RankOneViolation("zero matrix is excluded (A_0 != 0)");
    if (sv.size() > 1 && sv(1) > 1e-10 * sv(0))
        throw RankOneViolation("matrix has numerical rank > 1");
    RankOneMatrix r;
    r.u = svd.matrixU().col(0) * sv(0);
    r.v = svd.matrixV().col(0).conjugate();
    return r;
}

MatrixFamily MatrixFamily::create(RankOneMatrix a0, std::vector<CMatrix> others) {
    if (others.empty()) throw ConfigError("family needs at least two matrices");
    const auto d = a0.u.size();
    if (a0.v.size() != d) throw DimensionMismatch("u and v have different lengths");
    MatrixFamily f;
    f.a0 = std::move(a0);
    f.a0_dense_ = f.a0.dense();
    f.all_nonnegative = entries_nonnegative(f.a0_dense_);
    f.others_invertible = true;
    for (auto& A : others) {
        if (A.rows() != d || A.cols() != d)
            throw DimensionMismatch("family matrices must all be d x d");
        f.all_nonnegative = f.all_nonnegative && entries_nonnegative(A);
        f.others_invertible = f.others_invertible && invertible_at_tolerance(A);
    }
    f.others = std::move(others);
    return f;
}

Complex word_contraction(const MatrixFamily& family, const Word& w) {
    Eigen::RowVectorXcd row = family.a0.v.transpose();
    for (Symbol s : w) {
        if (s == 0) throw ConfigError("word contraction is over 0-free words");
        if (s >= family.count()) throw ConfigError("word uses a letter outside the family");
        row = row * family.letter(s);
    }
    return (row * family.a0.u)(0);
}

LyapunovValue closed_form_lyapunov(const MatrixFamily& family, const FrequencyTable& freqs) {
    LyapunovValue out;
    const double abs_lambda = std::abs(family.a0.lambda());
    if (abs_lambda == 0.0) {
        out.minus_infinity = true;
        out.degenerate_reason = "lambdaZero";
        return out;
    }

    std::vector<std::pair<Word, double>> items(freqs.exact.begin(), freqs.exact.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
        return a.first < b.first;
    });

    out.rho0_term = freqs.rho0 * std::log(abs_lambda);
    double total = out.rho0_term;
    for (const auto& [w, f] : items) {
        if (f < 0.0) throw ConfigError("negative frequency for word " + format_word(w));
        if (f == 0.0) continue;
        double c = std::abs(word_contraction(family, w));
        if (c == 0.0) {
            out.minus_infinity = true;
            out.degenerate_reason = "annihilatingWord";
            out.per_word_terms.clear();
            return out;
        }
        double term = f * std::log(c / abs_lambda);
        out.per_word_terms.emplace_back(w, term);
        total += term;
    }
    if (std::isnan(total)) throw NumericalBreakdown("closed form produced NaN");
    if (std::isinf(total) && total < 0.0) {
        out.minus_infinity = true;
        out.degenerate_reason = "annihilatingWord";
        return out;
    }
    out.value = total;
    return out;
}

namespace {

// Shared series driver: enumerate 0-free words level by level with
// per-word measure weights, stop once the cumulative length mass
// rho0 + sum |w| F_w reaches 1 - tol (it accounts for every position of
// the sequence), and report a positive-part remainder bound
// D * (residual length mass) from |v' A_w u| <= ||v|| ||u|| Delta^{|w|}.
LyapunovValue series_lyapunov(const MatrixFamily& family,
                              double rho0,
                              const std::function<double(const Word&)>& weight_of,
                              double mass_tolerance) {
    const std::size_t m = family.count();
    FrequencyTable table;
    table.rho0 = rho0;
    table.method = FreqMethod::empirical;

    double mass = rho0;
    std::vector<Word> level;
    for (Symbol s = 1; s < m; ++s) level.push_back({s});
    constexpr std::size_t kWordBudget = std::size_t{1} << 22;
    std::size_t enumerated = 0;
    std::size_t len = 1;
    while (mass < 1.0 - mass_tolerance && !level.empty()) {
        for (const Word& w : level) {
            double f = weight_of(w);
            if (f > 0.0) table.exact.emplace(w, f);
            mass += static_cast<double>(len) * f;
        }
        enumerated += level.size();
        if (mass >= 1.0 - mass_tolerance) break;
        if (enumerated * (m - 1) > kWordBudget)
            break; // stop extending; the remainder bound below stays honest
        std::vector<Word> next;
        next.reserve(level.size() * (m - 1));
        for (const Word& w : level)
            for (Symbol s = 1; s < m; ++s) {
                Word e = w;
                e.push_back(s);
                next.push_back(std::move(e));
            }
        level = std::move(next);
        ++len;
    }

    LyapunovValue out = closed_form_lyapunov(family, table);
    if (!out.minus_infinity) {
        double delta = 0.0;
        for (const auto& A : family.others) delta = std::max(delta, A.norm());
        double log_delta = std::max(0.0, std::log(std::max(delta, 1e-300)));
        double scale = family.a0.u.norm() * family.a0.v.norm() /
                       std::abs(family.a0.lambda());
        double residual_mass = std::max(0.0, 1.0 - mass);
        out.truncation_bound = residual_mass * (log_delta + std::abs(std::log(scale)));
    }
    return out;
}

} // namespace

LyapunovValue bernoulli_lyapunov(const MatrixFamily& family, const std::vector<double>& p,
                                 double mass_tolerance) {
    if (p.size() != family.count())
        throw DimensionMismatch("probability vector does not match the family");
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw NotStochastic("negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw NotStochastic("probabilities do not sum to 1");
    if (p[0] <= 0.0) throw ZeroMassOnSymbolZero("p_0 must be positive");

    const double p0 = p[0];
    return series_lyapunov(
        family, p0,
        [&](const Word& w) {
            double f = p0 * p0;
            for (Symbol s : w) f *= p[s];
            return f;
        },
        mass_tolerance);
}

LyapunovValue markov_lyapunov(const MatrixFamily& family,
                              const std::vector<std::vector<double>>& P,
                              double mass_tolerance) {
    if (P.size() != family.count())
        throw DimensionMismatch("transition matrix does not match the family");
    std::vector<double> pi = seq::stationary_distribution(P);
    if (pi[0] <= 0.0) throw ZeroMassOnSymbolZero("symbol 0 has stationary probability 0");
    return series_lyapunov(
        family, pi[0],
        [&](const Word& w) {
            double f = pi[0] * P[0][w.front()];
            for (std::size_t i = 0; i + 1 < w.size(); ++i) f *= P[w[i]][w[i + 1]];
            f *= P[w.back()][0];
            return f;
        },
        mass_tolerance);
}

double all_rank_one_lyapunov(const std::vector<RankOneMatrix>& matrices,
                             const std::vector<double>& p) {
    if (matrices.empty() || matrices.size() != p.size())
        throw DimensionMismatch("need one probability per matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        for (std::size_t j = 0; j < matrices.size(); ++j) {
            double weight = p[i] * p[j];
            if (weight == 0.0) continue;
            double inner = std::abs((matrices[i].u.transpose() * matrices[j].v)(0));
            if (inner == 0.0) return -std::numeric_limits<double>::infinity();
            total += weight * std::log(inner);
        }
    }
    return total;
}

DirectEstimate direct_estimate(const MatrixFamily& family, std::span<const Symbol> omega,
                               MatrixNorm norm, std::size_t trace_points) {
    const std::size_t n = omega.size();
    if (n == 0) throw ConfigError("direct estimate needs n >= 1");
    const auto d = static_cast<Eigen::Index>(family.dimension());

    DirectEstimate out;
    const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(trace_points, 1));

    CMatrix P = CMatrix::Identity(d, d);
    CMatrix tmp(d, d);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Symbol s = omega[k];
        if (s >= family.count())
            throw ConfigError("sequence uses a symbol outside the family");
        tmp.noalias() = P * family.letter(s);
        P.swap(tmp);
        double nrm = matrix_norm(P, norm);
        if (nrm == 0.0) {
            out.minus_infinity = true;
            out.zero_product_at = k;
            return out;
        }
        if (!std::isfinite(nrm)) throw NumericalBreakdown("matrix norm became non-finite");
        P /= nrm;
        acc += std::log(nrm);
        if ((k + 1) % stride == 0 || k + 1 == n)
            out.trace.emplace_back(k + 1, acc / static_cast<double>(k + 1));
    }
    out.estimate = acc / static_cast<double>(n);
    return out;
}

DirectEstimate direct_estimate(const MatrixFamily& family, seq::SequenceStream& omega,
                               std::size_t n, MatrixNorm norm, std::size_t trace_points) {
    return direct_estimate(family, omega.prefix(n), norm, trace_points);
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw ConfigError("spectral radius needs a square matrix");
    constexpr int kMaxIterations = 200000;
    constexpr double kTolerance = 1e-10;

    SplitMix64 rng(0x5eed5eed5eed5eedull);
    Eigen::VectorXd v(A.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next_unit() + 0.5;
    v /= v.norm();

    double prev = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd w = A * v;
        double nrm = w.norm();
        if (nrm == 0.0) return 0.0; // start vector hit the kernel of A^k; radius 0 for nilpotent behaviour
        double est = nrm / v.norm();
        v = w / nrm;
        if (it > 0 && std::abs(est - prev) <= kTolerance * std::max(1.0, std::abs(est))) {
            // one Rayleigh refinement on the converged direction
            return std::abs(v.dot(A * v));
        }
        prev = est;
    }
    throw NoConvergence("power iteration for the spectral radius did not settle");
}

} // namespace rankone::lyap
