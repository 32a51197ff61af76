#include "rankone/substitution_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rankone/errors.hpp"

namespace rankone::subst {

IntMatrix composition_matrix(const seq::Substitution& sub) {
    const auto s = static_cast<Eigen::Index>(sub.alphabet_size);
    IntMatrix M = IntMatrix::Zero(s, s);
    for (Eigen::Index b = 0; b < s; ++b)
        for (Symbol a : sub.images[static_cast<std::size_t>(b)]) ++M(a, b);
    return M;
}

bool is_primitive(const IntMatrix& M) {
    const Eigen::Index s = M.rows();
    if (s == 0 || M.cols() != s) throw ConfigError("composition matrix must be square");
    // Boolean powers up to the Wielandt exponent (s-1)^2 + 1: a nonnegative
    // matrix is primitive iff that power is strictly positive.
    using BMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
    auto bmul = [s](const BMatrix& A, const BMatrix& B) {
        BMatrix C = BMatrix::Constant(s, s, false);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index k = 0; k < s; ++k)
                if (A(i, k))
                    for (Eigen::Index j = 0; j < s; ++j)
                        if (B(k, j)) C(i, j) = true;
        return C;
    };
    BMatrix base = (M.array() > 0).matrix();
    std::int64_t n = (s - 1) * (s - 1) + 1;
    BMatrix acc = BMatrix::Constant(s, s, false);
    for (Eigen::Index i = 0; i < s; ++i) acc(i, i) = true;
    while (n > 0) {
        if (n & 1) acc = bmul(acc, base);
        base = bmul(base, base);
        n >>= 1;
    }
    return acc.all();
}

PerronData perron(const Eigen::MatrixXd& M) {
    const Eigen::Index s = M.rows();
    if (s == 0 || M.cols() != s) throw ConfigError("matrix must be square");
    if ((M.array() < 0.0).any()) throw ConfigError("perron needs a nonnegative matrix");

    constexpr int kMaxIterations = 100000;
    constexpr double kTolerance = 1e-12;

    PerronData out;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(s, 1.0 / static_cast<double>(s));
    // Warm up so that v is strictly positive (primitive matrices make the
    // iterate positive within the Wielandt exponent).
    const int warmup = static_cast<int>(2 * s + 4);
    for (int i = 0; i < warmup; ++i) {
        Eigen::VectorXd w = M * v;
        double sum = w.sum();
        if (sum <= 0.0) throw NotPrimitive("power iteration collapsed to zero");
        v = w / sum;
    }
    if ((v.array() <= 0.0).any())
        throw NotPrimitive("iterate not strictly positive; matrix is not primitive");

    double rho = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd w = M * v;
        // Collatz-Wielandt: the Perron root lies between the extreme
        // componentwise ratios.
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Eigen::Index i = 0; i < s; ++i) {
            double r = w(i) / v(i);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rho = 0.5 * (lo + hi);
        double residual = (w - rho * v).cwiseAbs().maxCoeff();
        v = w / w.sum();
        if (hi - lo <= kTolerance * rho && residual <= kTolerance * rho) {
            out.eigenvalue = rho;
            out.probability_vector = v;
            out.iterations = warmup + it + 1;
            out.residual = (M * v - rho * v).cwiseAbs().maxCoeff();
            return out;
        }
    }
    throw NoConvergence("power iteration did not reach 1e-12 in 1e5 iterations");
}

PerronData perron(const IntMatrix& M) {
    if (!is_primitive(M)) throw NotPrimitive("composition matrix is not primitive");
    return perron(M.cast<double>().eval());
}

namespace {

// Sliding t-windows of the fixed point, in first-appearance order, closed
// under taking the first |zeta(w_0)| windows of zeta(w). The paper assumes
// the admissible words are known; we discover them from a prefix and
// iterate closure until the set stabilizes.
std::vector<Word> admissible_words(const seq::Substitution& sub, int t,
                                   std::size_t prefix_length) {
    Word prefix = seq::substitution_fixed_point(sub, prefix_length);
    std::vector<Word> order;
    std::map<Word, std::size_t> index;
    auto add = [&](const Word& w) {
        if (index.emplace(w, order.size()).second) order.push_back(w);
    };
    for (std::size_t i = 0; i + t <= prefix.size(); ++i)
        add(Word(prefix.begin() + i, prefix.begin() + i + t));

    for (std::size_t scan = 0; scan < order.size(); ++scan) {
        Word img = sub.apply(order[scan]);
        std::size_t windows = sub.image(order[scan][0]).size();
        for (std::size_t i = 0; i < windows; ++i)
            add(Word(img.begin() + i, img.begin() + i + t));
    }
    return order;
}

} // namespace

InducedSubstitution induced_substitution(const seq::Substitution& sub, int t) {
    sub.validate();
    if (t < 1) throw ConfigError("induced substitution needs t >= 1");
    IntMatrix M = composition_matrix(sub);
    if (!is_primitive(M)) throw NotPrimitive("substitution is not primitive");

    const std::size_t scan_length =
        std::max<std::size_t>(10000, 10 * static_cast<std::size_t>(std::pow(
                                              double(sub.alphabet_size), double(t))));
    InducedSubstitution out;
    out.base = sub;
    out.order = t;
    out.alphabet = admissible_words(sub, t, scan_length);

    std::map<Word, std::size_t> index;
    for (std::size_t i = 0; i < out.alphabet.size(); ++i) index[out.alphabet[i]] = i;

    out.induced.alphabet_size = out.alphabet.size();
    out.induced.seed = 0; // the first window of the fixed point
    out.induced.images.resize(out.alphabet.size());
    for (std::size_t a = 0; a < out.alphabet.size(); ++a) {
        const Word& w = out.alphabet[a];
        Word img = sub.apply(w);
        std::size_t windows = sub.image(w[0]).size();
        Word code;
        code.reserve(windows);
        for (std::size_t i = 0; i < windows; ++i) {
            Word win(img.begin() + i, img.begin() + i + t);
            auto it = index.find(win);
            if (it == index.end())
                throw NoConvergence("admissible-word closure did not stabilize");
            code.push_back(static_cast<Symbol>(it->second));
        }
        out.induced.images[a] = std::move(code);
    }
    return out;
}

std::map<Word, double> frequencies_via_michel(const seq::Substitution& sub, int t) {
    sub.validate();
    if (sub.alphabet_size == 1) {
        // Degenerate one-letter alphabet: the fixed point is constant.
        std::map<Word, double> out;
        out.emplace(Word(static_cast<std::size_t>(t), sub.seed), 1.0);
        return out;
    }
    InducedSubstitution ind = induced_substitution(sub, t);
    PerronData pd = perron(composition_matrix(ind.induced));
    std::map<Word, double> out;
    for (std::size_t i = 0; i < ind.alphabet.size(); ++i)
        out.emplace(ind.alphabet[i], pd.probability_vector(static_cast<Eigen::Index>(i)));
    return out;
}

namespace {

// Splits a word starting with 0 into return words to [0] (blocks 0* that
// run up to the next 0). Returns std::nullopt on an unknown block.
std::optional<Word> decompose_over_return_words(
    const Word& w, const std::map<Word, std::size_t>& index) {
    Word code;
    std::size_t i = 0;
    while (i < w.size()) {
        if (w[i] != 0) return std::nullopt;
        std::size_t j = i + 1;
        while (j < w.size() && w[j] != 0) ++j;
        auto it = index.find(Word(w.begin() + i, w.begin() + j));
        if (it == index.end()) return std::nullopt;
        code.push_back(static_cast<Symbol>(it->second));
        i = j;
    }
    return code;
}

} // namespace

DerivativeSubstitution derivative_substitution(const seq::Substitution& sub) {
    sub.validate();
    IntMatrix M = composition_matrix(sub);
    if (!is_primitive(M)) throw NotPrimitive("substitution is not primitive");
    if (sub.image(sub.seed).front() != 0 || sub.image(0).front() != 0)
        throw DecompositionFailure(
            "derivative substitution needs a fixed point starting with 0 and "
            "zeta(0) starting with 0");

    for (std::size_t scan_length = 1 << 14; scan_length <= (1 << 24); scan_length *= 4) {
        Word prefix = seq::substitution_fixed_point(sub, scan_length);
        std::vector<Word> order;
        std::map<Word, std::size_t> index;
        std::size_t i = 0;
        while (i < prefix.size()) {
            std::size_t j = i + 1;
            while (j < prefix.size() && prefix[j] != 0) ++j;
            if (j == prefix.size()) break; // unfinished block
            Word block(prefix.begin() + i, prefix.begin() + j);
            if (index.emplace(block, order.size()).second) order.push_back(block);
            i = j;
        }

        DerivativeSubstitution out;
        out.base = sub;
        out.return_words_to_zero = order;
        out.eta.alphabet_size = order.size();
        out.eta.seed = 0;
        out.eta.images.resize(order.size());
        bool complete = true;
        for (std::size_t a = 0; a < order.size() && complete; ++a) {
            auto code = decompose_over_return_words(sub.apply(order[a]), index);
            if (!code) {
                complete = false; // rescan with a longer prefix
                break;
            }
            out.eta.images[a] = std::move(*code);
        }
        if (!complete) continue;
        out.eta.validate();
        return out;
    }
    throw DecompositionFailure("images do not factor over the return words to [0]");
}

FrequencyTable exact_frequencies_via_durand(const seq::Substitution& sub) {
    DerivativeSubstitution der = derivative_substitution(sub);
    PerronData lambda = perron(composition_matrix(der.eta));
    PerronData mu = perron(composition_matrix(sub));
    const double mu0 = mu.probability_vector(0);

    FrequencyTable table;
    table.method = FreqMethod::durand;
    table.rho0 = mu0;
    for (std::size_t i = 0; i < der.return_words_to_zero.size(); ++i) {
        const Word& zw = der.return_words_to_zero[i];
        if (zw.size() == 1) continue; // the word "0": adjacent zeros, rho0 only
        Word w(zw.begin() + 1, zw.end());
        table.exact.emplace(std::move(w),
                            lambda.probability_vector(static_cast<Eigen::Index>(i)) * mu0);
    }
    return table;
}

FrequencyTable exact_frequencies_via_inclusion_exclusion(
    const std::map<Word, double>& cylinder_freq, const std::set<Word>& return_words,
    double rho0) {
    std::vector<Word> words(return_words.begin(), return_words.end());
    for (const Word& w : words) {
        if (w.empty()) throw ConfigError("empty return word");
        if (!cylinder_freq.count(w))
            throw MissingFrequency("no cylinder frequency for word " + format_word(w));
    }
    // chains w = c0 < c1 < ... over proper subwords; terms vanish beyond
    // the maximal length, so depth-first enumeration terminates.
    std::vector<std::vector<std::pair<std::size_t, double>>> super(words.size());
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = 0; j < words.size(); ++j)
            if (is_proper_subword(words[i], words[j]))
                super[i].emplace_back(j, static_cast<double>(subword_count(words[i], words[j])));

    FrequencyTable table;
    table.method = FreqMethod::inclusionExclusion;
    table.rho0 = rho0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        double total = 0.0;
        struct Frame {
            std::size_t at;
            int depth;
            double weight;
        };
        std::vector<Frame> stack{{i, 0, 1.0}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            double nu = cylinder_freq.at(words[f.at]);
            total += (f.depth % 2 == 0 ? 1.0 : -1.0) * f.weight * nu;
            for (const auto& [j, count] : super[f.at])
                stack.push_back({j, f.depth + 1, f.weight * count});
        }
        table.exact.emplace(words[i], total);
    }
    return table;
}

std::set<Word> return_words_from_prefix(const seq::Substitution& sub,
                                        std::size_t prefix_length) {
    Word prefix = seq::substitution_fixed_point(sub, prefix_length);
    ReturnWordDecomposition d = decompose(prefix);
    std::set<Word> out;
    for (const auto& [w, t] : d.blocks) out.insert(w);
    return out;
}

FrequencyTable michel_exact_frequencies(const seq::Substitution& sub) {
    // Return words of a minimal sequence recur with bounded gaps; accept
    // the discovered set once it stabilizes across a 4x longer scan.
    std::set<Word> R;
    bool stable = false;
    for (std::size_t len = 1 << 12; len <= (1 << 22); len *= 4) {
        std::set<Word> next = return_words_from_prefix(sub, 4 * len);
        if (return_words_from_prefix(sub, len) == next) {
            R = std::move(next);
            stable = true;
            break;
        }
    }
    if (!stable) throw NoConvergence("return-word set did not stabilize");

    std::set<std::size_t> lengths;
    for (const Word& w : R) lengths.insert(w.size());
    std::map<Word, double> cylinder;
    for (std::size_t t : lengths) {
        auto freqs = frequencies_via_michel(sub, static_cast<int>(t));
        for (const auto& [w, nu] : freqs)
            if (R.count(w)) cylinder.emplace(w, nu);
    }
    double rho0 = perron(composition_matrix(sub)).probability_vector(0);
    FrequencyTable table = exact_frequencies_via_inclusion_exclusion(cylinder, R, rho0);
    table.method = FreqMethod::michel;
    return table;
}

} // namespace rankone::subst
