#include "rankone/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rankone/errors.hpp"
#include "rankone/returnwords.hpp"
#include "rankone/substitution_analysis.hpp"
#include "rankone/validation.hpp"

namespace rankone::cli {

namespace {

using nlohmann::json;

std::string format_real_impl(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

const json& require_field(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing field \"" + key + "\" in " + where);
    return *it;
}

Word parse_word_field(const json& j, const std::string& where) {
    if (j.is_string()) return parse_word(j.get<std::string>());
    if (j.is_array()) {
        Word w;
        for (const auto& e : j) {
            if (!e.is_number_unsigned())
                throw ConfigError("word entries must be nonnegative integers in " + where);
            w.push_back(e.get<Symbol>());
        }
        return w;
    }
    throw ConfigError("word must be a digit string or an array in " + where);
}

lyap::Complex parse_scalar(const json& j, const std::string& where) {
    if (j.is_number()) return lyap::Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return lyap::Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigError("matrix entries must be reals or [re,im] pairs in " + where);
}

lyap::CMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be an array of rows in " + where);
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ConfigError("matrix rows must be arrays in " + where);
    lyap::CMatrix A(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ConfigError("matrix rows must have equal lengths in " + where);
        for (std::size_t k = 0; k < cols; ++k) A(i, k) = parse_scalar(j[i][k], where);
    }
    return A;
}

lyap::CVector parse_vector(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError("vector must be a nonempty array in " + where);
    lyap::CVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = parse_scalar(j[i], where);
    return v;
}

seq::Substitution parse_substitution(const json& j, const std::string& where) {
    seq::Substitution sub;
    const json& images = require_field(j, "images", where);
    if (!images.is_array() || images.empty())
        throw ConfigError("\"images\" must be a nonempty array in " + where);
    for (const auto& img : images) sub.images.push_back(parse_word_field(img, where));
    sub.alphabet_size = sub.images.size();
    sub.seed = j.value("seed_letter", Symbol{0});
    sub.validate();
    return sub;
}

std::size_t env_thread_count() {
    const char* raw = std::getenv("RANKONE_THREADS");
    if (!raw) return 1;
    long v = std::strtol(raw, nullptr, 10);
    return v > 1 ? static_cast<std::size_t>(v) : 1;
}

// Deterministic single-file SVG: polylines and numeric tick labels only.
void write_svg(const std::string& path, const std::vector<double>& xs,
               const std::vector<double>& ys) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    const double width = 640, height = 480, margin = 56;
    double xmin = xs.front(), xmax = xs.front(), ymin = ys.front(), ymax = ys.front();
    for (double x : xs) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    for (double y : ys) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    out << "<line x1=\"" << num(margin) << "\" y1=\"" << num(height - margin) << "\" x2=\""
        << num(width - margin) << "\" y2=\"" << num(height - margin)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(margin) << "\" y1=\"" << num(margin) << "\" x2=\""
        << num(margin) << "\" y2=\"" << num(height - margin)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double fx = xmin + (xmax - xmin) * t / 4.0;
        double fy = ymin + (ymax - ymin) * t / 4.0;
        out << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(height - margin) << "\" x2=\""
            << num(px(fx)) << "\" y2=\"" << num(height - margin + 5)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(height - margin + 18)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        out << "<line x1=\"" << num(margin - 5) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
            << num(margin) << "\" y2=\"" << num(py(fy))
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(margin - 8) << "\" y=\"" << num(py(fy) + 3)
            << "\" font-size=\"10\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ' ';
        out << num(px(xs[i])) << ',' << num(py(ys[i]));
    }
    out << "\"/>\n</svg>\n";
}

void print_table(const FrequencyTable& table, std::ostream& out) {
    out << "method," << to_string(table.method) << "\n";
    out << "rho0," << format_real_impl(table.rho0) << "\n";
    out << "word,F\n";
    for (const auto& [w, f] : table.exact)
        out << format_word(w) << ',' << format_real_impl(f) << "\n";
}

struct FreqOptions {
    std::size_t prefix_length = 1 << 20;
    std::size_t max_return_len = 64;
    double precision = 1e-7;
};

FreqOptions parse_freq_options(const json& config) {
    FreqOptions opt;
    if (config.contains("frequency")) {
        const json& f = config["frequency"];
        opt.prefix_length = f.value("prefix_length", opt.prefix_length);
        opt.max_return_len = f.value("max_return_len", opt.max_return_len);
        opt.precision = f.value("precision", opt.precision);
    }
    return opt;
}

FrequencyTable table_by_method(const std::string& method, const seq::SourceDescriptor& desc,
                               const FreqOptions& opt) {
    const auto* sub_src = std::get_if<seq::SubstitutionSource>(&desc);
    const auto* bfree_src = std::get_if<seq::BFreeSource>(&desc);
    if (method == "empirical") {
        seq::SequenceStream stream(desc);
        return empirical_exact_frequencies(stream.prefix(opt.prefix_length),
                                           opt.max_return_len);
    }
    if (method == "michel") {
        if (!sub_src) throw ConfigError("method michel needs a substitution sequence");
        return subst::michel_exact_frequencies(sub_src->sub);
    }
    if (method == "durand") {
        if (!sub_src) throw ConfigError("method durand needs a substitution sequence");
        return subst::exact_frequencies_via_durand(sub_src->sub);
    }
    if (method == "inclusionExclusion") {
        // the alternating sum fed by empirical cylinder frequencies
        seq::SequenceStream stream(desc);
        auto prefix = stream.prefix(opt.prefix_length);
        ReturnWordDecomposition d = decompose(prefix);
        std::set<Word> R;
        for (const auto& [w, t] : d.blocks)
            if (w.size() <= opt.max_return_len) R.insert(w);
        std::map<Word, double> cylinder;
        for (const Word& w : R) cylinder.emplace(w, empirical_frequency(prefix, w));
        auto stats = collect_stats(d);
        double rho0 = static_cast<double>(stats.zero_count) / static_cast<double>(prefix.size());
        return subst::exact_frequencies_via_inclusion_exclusion(cylinder, R, rho0);
    }
    if (method == "mirsky") {
        if (!bfree_src) throw ConfigError("method mirsky needs a bfree sequence");
        return bfree::exact_frequencies(bfree_src->set, opt.precision);
    }
    throw ConfigError("unknown frequency method \"" + method + "\"");
}

std::string default_method(const seq::SourceDescriptor& desc) {
    if (std::holds_alternative<seq::SubstitutionSource>(desc)) return "durand";
    if (std::holds_alternative<seq::BFreeSource>(desc)) return "mirsky";
    return "empirical";
}

FrequencyTable weights_table(const json& weights, double precision) {
    const std::string type = require_field(weights, "type", "weights").get<std::string>();
    if (type == "mobius2")
        return bfree::exact_frequencies(bfree::BFreeSet::squarefree(), precision);
    if (type == "substitution") {
        seq::Substitution sub = parse_substitution(weights, "weights");
        if (sub.alphabet_size > 2)
            throw ConfigError("weights must take values in {0,1}: weight 0 must map to "
                              "the rank-one all-ones matrix");
        return subst::exact_frequencies_via_durand(sub);
    }
    if (type == "explicit") {
        Word w = parse_word_field(require_field(weights, "word", "weights"), "weights");
        mfa::WeightSequence{w}.validate();
        return empirical_exact_frequencies(w);
    }
    throw ConfigError("unknown weights type \"" + type + "\"");
}

} // namespace

std::string format_real(double x) { return format_real_impl(x); }

seq::SourceDescriptor parse_sequence(const json& j) {
    const std::string type = require_field(j, "type", "sequence").get<std::string>();
    if (type == "substitution")
        return seq::SubstitutionSource{parse_substitution(j, "sequence")};
    if (type == "bfree") return seq::BFreeSource{parse_bfree(require_field(j, "set", "sequence"))};
    if (type == "bernoulli") {
        if (!j.contains("seed")) throw ConfigError("seed is mandatory for stochastic sequences");
        seq::BernoulliSource src;
        src.p = require_field(j, "p", "sequence").get<std::vector<double>>();
        src.seed = j["seed"].get<std::uint64_t>();
        return src;
    }
    if (type == "markov") {
        if (!j.contains("seed")) throw ConfigError("seed is mandatory for stochastic sequences");
        seq::MarkovSource src;
        src.transition =
            require_field(j, "transition", "sequence").get<std::vector<std::vector<double>>>();
        src.seed = j["seed"].get<std::uint64_t>();
        return src;
    }
    if (type == "explicit")
        return seq::ExplicitSource{parse_word_field(require_field(j, "word", "sequence"),
                                                    "sequence")};
    if (type == "increasing-runs") return seq::IncreasingRunsSource{};
    throw ConfigError("unknown sequence type \"" + type + "\"");
}

bfree::BFreeSet parse_bfree(const json& j) {
    const std::string type = require_field(j, "type", "bfree set").get<std::string>();
    if (type == "squarefree") return bfree::BFreeSet::squarefree();
    if (type == "explicit")
        return bfree::BFreeSet::explicit_set(
            require_field(j, "generators", "bfree set").get<std::vector<std::int64_t>>());
    throw ConfigError("unknown bfree set type \"" + type + "\"");
}

lyap::MatrixFamily parse_family(const json& j) {
    const json& a0 = require_field(j, "a0", "family");
    lyap::RankOneMatrix r;
    if (a0.contains("u") && a0.contains("v")) {
        r.u = parse_vector(a0["u"], "family.a0.u");
        r.v = parse_vector(a0["v"], "family.a0.v");
    } else if (a0.contains("dense")) {
        r = lyap::RankOneMatrix::from_dense(parse_matrix(a0["dense"], "family.a0.dense"));
    } else {
        throw ConfigError("family.a0 needs either {u,v} or {dense}");
    }
    const json& others = require_field(j, "others", "family");
    if (!others.is_array() || others.empty())
        throw ConfigError("family.others must list A_1..A_{m-1}");
    std::vector<lyap::CMatrix> rest;
    for (std::size_t i = 0; i < others.size(); ++i)
        rest.push_back(parse_matrix(others[i], "family.others[" + std::to_string(i) + "]"));
    return lyap::MatrixFamily::create(std::move(r), std::move(rest));
}

mfa::PotentialSpec parse_potential(const json& j) {
    mfa::PotentialSpec pot;
    lyap::CMatrix f = parse_matrix(require_field(j, "f", "potential"), "potential.f");
    pot.f = f.real();
    if (!f.imag().isZero(0.0)) throw ConfigError("potential table must be real");
    pot.validate();
    return pot;
}

void cmd_sequence(const json& config, std::ostream& out) {
    auto desc = parse_sequence(require_field(config, "sequence", "config"));
    std::size_t n = config.value("length", std::size_t{64});
    seq::SequenceStream stream(desc);
    auto prefix = stream.prefix(n);
    out << format_word(Word(prefix.begin(), prefix.end())) << "\n";
}

void cmd_freq(const json& config, std::ostream& out) {
    auto desc = parse_sequence(require_field(config, "sequence", "config"));
    FreqOptions opt = parse_freq_options(config);
    std::vector<std::string> methods;
    if (config.contains("frequency") && config["frequency"].contains("methods"))
        methods = config["frequency"]["methods"].get<std::vector<std::string>>();
    if (methods.empty()) methods.push_back(default_method(desc));

    std::vector<std::pair<std::string, FrequencyTable>> tables;
    for (const auto& m : methods) {
        tables.emplace_back(m, table_by_method(m, desc, opt));
        if (tables.size() > 1) out << "\n";
        print_table(tables.back().second, out);
    }
    if (tables.size() > 1) {
        out << "\n";
        double overall = 0.0;
        for (std::size_t i = 0; i < tables.size(); ++i)
            for (std::size_t k = i + 1; k < tables.size(); ++k) {
                double d = table_discrepancy(tables[i].second, tables[k].second);
                overall = std::max(overall, d);
                out << "discrepancy," << tables[i].first << ',' << tables[k].first << ','
                    << format_real_impl(d) << "\n";
            }
        out << "max_discrepancy," << format_real_impl(overall) << "\n";
    }
}

void cmd_lyap(const json& config, std::ostream& out) {
    auto desc = parse_sequence(require_field(config, "sequence", "config"));
    auto family = parse_family(require_field(config, "family", "config"));
    FreqOptions opt = parse_freq_options(config);

    lyap::LyapunovValue value;
    std::string method;
    if (const auto* bern = std::get_if<seq::BernoulliSource>(&desc)) {
        method = "bernoulli-series";
        value = lyap::bernoulli_lyapunov(family, bern->p);
    } else if (const auto* markov = std::get_if<seq::MarkovSource>(&desc)) {
        method = "markov-series";
        value = lyap::markov_lyapunov(family, markov->transition);
    } else {
        method = default_method(desc);
        if (config.contains("frequency") && config["frequency"].contains("methods"))
            method = config["frequency"]["methods"].at(0).get<std::string>();
        FrequencyTable table = table_by_method(method, desc, opt);
        if (table.rho0 < 0.01)
            out << "warning,rho0=" << format_real_impl(table.rho0)
                << " vanishes; hypotheses not met\n";
        value = lyap::closed_form_lyapunov(family, table);
    }

    out << "method," << method << "\n";
    if (value.minus_infinity) {
        out << "closed_form,-inf\n";
        out << "degenerate_reason," << value.degenerate_reason << "\n";
    } else {
        out << "closed_form," << format_real_impl(value.value) << "\n";
        out << "rho0_term," << format_real_impl(value.rho0_term) << "\n";
        for (const auto& [w, term] : value.per_word_terms)
            out << "term," << format_word(w) << ',' << format_real_impl(term) << "\n";
        if (value.truncation_bound > 0.0)
            out << "truncation_bound," << format_real_impl(value.truncation_bound) << "\n";
    }

    std::size_t direct_n = 0;
    lyap::MatrixNorm norm = lyap::MatrixNorm::frobenius;
    if (config.contains("lyapunov")) {
        direct_n = config["lyapunov"].value("direct_n", std::size_t{0});
        std::string norm_name = config["lyapunov"].value("norm", std::string("frobenius"));
        if (norm_name == "op1")
            norm = lyap::MatrixNorm::op_one;
        else if (norm_name != "frobenius")
            throw ConfigError("unknown norm \"" + norm_name + "\"");
    }
    if (direct_n > 0) {
        seq::SequenceStream stream(desc);
        lyap::DirectEstimate direct = lyap::direct_estimate(family, stream, direct_n, norm);
        if (direct.minus_infinity) {
            out << "direct_estimate,-inf\n";
            out << "zero_product_at," << direct.zero_product_at << "\n";
        } else {
            out << "direct_estimate," << format_real_impl(direct.estimate) << "\n";
            if (!value.minus_infinity)
                out << "gap," << format_real_impl(std::abs(direct.estimate - value.value))
                    << "\n";
        }
    }
}

void cmd_spectrum(const json& config, std::ostream& out) {
    mfa::PotentialSpec pot = parse_potential(require_field(config, "potential", "config"));
    FreqOptions opt = parse_freq_options(config);
    FrequencyTable table = weights_table(require_field(config, "weights", "config"),
                                         opt.precision);

    double lo = -40.0, hi = 40.0;
    std::size_t points = 801;
    if (config.contains("grid")) {
        lo = config["grid"].value("min", lo);
        hi = config["grid"].value("max", hi);
        points = config["grid"].value("points", points);
    }
    if (points == 0) throw GridEmpty("grid has no points");
    std::vector<double> grid = mfa::uniform_grid(lo, hi, points);

    // grid points are independent; RANKONE_THREADS drives the parallel map
    mfa::PressureCurve curve = mfa::pressure_curve(pot, table, grid, env_thread_count());
    mfa::SpectrumCurve spec = mfa::spectrum(pot, table, curve);

    const json& output = require_field(config, "output", "config");
    std::string pressure_path = require_field(output, "pressure_csv", "output").get<std::string>();
    std::string spectrum_path = require_field(output, "spectrum_csv", "output").get<std::string>();
    {
        std::ofstream csv(pressure_path);
        if (!csv) throw ConfigError("cannot write " + pressure_path);
        csv << "beta,psi,dpsi\n";
        for (const auto& s : curve.samples)
            csv << format_real_impl(s.beta) << ',' << format_real_impl(s.psi) << ','
                << format_real_impl(s.dpsi) << "\n";
    }
    {
        std::ofstream csv(spectrum_path);
        if (!csv) throw ConfigError("cannot write " + spectrum_path);
        csv << "alpha,dim\n";
        for (const auto& s : spec.samples)
            csv << format_real_impl(s.alpha) << ',' << format_real_impl(s.dim) << "\n";
    }
    std::vector<double> psi, alpha, dim;
    for (const auto& s : curve.samples) psi.push_back(s.psi);
    for (const auto& s : spec.samples) {
        alpha.push_back(s.alpha);
        dim.push_back(s.dim);
    }
    if (output.contains("pressure_svg")) write_svg(output["pressure_svg"], grid, psi);
    if (output.contains("spectrum_svg")) write_svg(output["spectrum_svg"], alpha, dim);

    out << "alpha_min," << format_real_impl(spec.alpha_min) << "\n";
    out << "alpha_max," << format_real_impl(spec.alpha_max) << "\n";
    out << "pressure_csv," << pressure_path << "\n";
    out << "spectrum_csv," << spectrum_path << "\n";
}

void cmd_validate(const json& config, std::ostream& out) {
    std::vector<int> ids;
    if (config.contains("ids")) ids = config["ids"].get<std::vector<int>>();
    auto results = validation::run_acceptance(ids);
    out << "criterion,id,status,name,detail\n";
    for (const auto& r : results) {
        auto sanitize = [](std::string s) {
            for (char& ch : s)
                if (ch == ',') ch = ';';
            return s;
        };
        out << "criterion," << r.id << ',' << (r.pass ? "PASS" : "FAIL") << ','
            << sanitize(r.name) << ',' << sanitize(r.detail) << "\n";
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lyapunov exponents of matrix products with one rank-one matrix"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t length_override = 0;
    std::vector<int> ids;

    auto* seq_cmd = app.add_subcommand("sequence", "dump a sequence prefix");
    seq_cmd->add_option("-c,--config", config_path, "JSON config")->required();
    seq_cmd->add_option("-n,--length", length_override, "prefix length override");

    auto* freq_cmd = app.add_subcommand("freq", "frequency tables and method comparison");
    freq_cmd->add_option("-c,--config", config_path, "JSON config")->required();

    auto* lyap_cmd = app.add_subcommand("lyap", "closed-form Lyapunov exponent");
    lyap_cmd->add_option("-c,--config", config_path, "JSON config")->required();

    auto* spectrum_cmd = app.add_subcommand("spectrum", "pressure and dimension spectrum");
    spectrum_cmd->add_option("-c,--config", config_path, "JSON config")->required();

    auto* validate_cmd = app.add_subcommand("validate", "run the acceptance criteria");
    validate_cmd->add_option("-c,--config", config_path, "JSON config");
    validate_cmd->add_option("--ids", ids, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (seq_cmd->parsed()) {
            json config = load_file(config_path);
            if (length_override > 0) config["length"] = length_override;
            cmd_sequence(config, out);
        } else if (freq_cmd->parsed()) {
            cmd_freq(load_file(config_path), out);
        } else if (lyap_cmd->parsed()) {
            cmd_lyap(load_file(config_path), out);
        } else if (spectrum_cmd->parsed()) {
            cmd_spectrum(load_file(config_path), out);
        } else if (validate_cmd->parsed()) {
            json config = config_path.empty() ? json::object() : load_file(config_path);
            if (!ids.empty()) config["ids"] = ids;
            cmd_validate(config, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace rankone::cli
