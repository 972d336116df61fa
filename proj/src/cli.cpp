#include "yy/cli.hpp"

#include "yy/baselines.hpp"
#include "yy/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace yy {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return f;
}

SynthesisReport design_filter(const JobConfig& cfg, const DesignProblem& problem) {
    SynthesisOptions opt;
    opt.tol            = cfg.tol;
    opt.max_iterations = cfg.max_iterations;
    return design_fir(build_generalized_plant(problem), cfg.taps(), opt);
}

FirFilter load_filter(const fs::path& path, const DesignProblem& problem) {
    FirFilter K = read_filter_json(path).filter;
    if (std::abs(K.period() - problem.h) > 1e-9 * problem.h) {
        throw std::invalid_argument("filter period " + format_real(K.period()) + " differs from problem.h");
    }
    return K;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string filter_json(const SynthesisReport& report) {
    std::string s = "{\n";
    s += "  \"period\": " + format_real(report.filter.period()) + ",\n";
    s += "  \"taps\": [";
    for (std::size_t i = 0; i < report.filter.taps().size(); ++i) {
        s += (i == 0 ? "" : ", ") + format_real(report.filter.taps()[i]);
    }
    s += "],\n";
    s += "  \"achieved_norm\": " + format_real(report.achieved_norm) + ",\n";
    s += "  \"lower_bound\": " + format_real(report.lower_bound) + ",\n";
    s += std::string("  \"converged\": ") + (report.converged ? "true" : "false") + ",\n";
    s += std::string("  \"tool_version\": \"") + kToolVersion + "\"\n}\n";
    return s;
}

FilterFile read_filter_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read filter file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("malformed filter file '" + path.string() + "' at byte " +
                                    std::to_string(e.byte) + ": " + e.what());
    }
    try {
        FilterFile f;
        const auto taps = j.at("taps").get<std::vector<double>>();
        if (taps.empty()) {
            throw std::invalid_argument("filter file has no taps");
        }
        f.filter        = FirFilter(taps, j.at("period").get<double>());
        f.achieved_norm = j.value("achieved_norm", 0.0);
        f.lower_bound   = j.value("lower_bound", 0.0);
        f.converged     = j.value("converged", false);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("invalid filter file '" + path.string() + "': " + e.what());
    }
}

SignalGrid read_signal_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read signal file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || (line != "t,value" && line != "t,value\r")) {
        throw std::invalid_argument(path.string() + ": expected header 't,value'");
    }
    std::vector<double> t, v;
    int                 lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) {
                throw std::invalid_argument("missing comma");
            }
            std::size_t used = 0;
            t.push_back(std::stod(line.substr(0, comma)));
            const std::string rest = line.substr(comma + 1);
            v.push_back(std::stod(rest, &used));
            if (rest.find_first_not_of(" \r", used) != std::string::npos) {
                throw std::invalid_argument("trailing text");
            }
        } catch (const std::exception&) {
            throw std::invalid_argument(path.string() + ": malformed row at line " + std::to_string(lineno));
        }
    }
    if (t.size() < 2) {
        throw std::invalid_argument(path.string() + ": need at least two samples");
    }
    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(step > 0.0)) {
        throw std::invalid_argument(path.string() + ": time must increase");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * step) {
            throw std::invalid_argument(path.string() + ": non-uniform time step at line " + std::to_string(i + 2));
        }
    }
    return SignalGrid::scalar(step, t.front(), v);
}

void write_signal_csv(const fs::path& path, const SignalGrid& s) {
    auto f = open_out(path);
    f << "t,value\n";
    for (Eigen::Index k = 0; k < s.length(); ++k) {
        f << format_real(s.time(k)) << ',' << format_real(s.values()(0, k)) << '\n';
    }
}

int cmd_design(const JobConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    const DesignProblem problem = cfg.problem();
    const SynthesisReport report  = design_filter(cfg, problem);

    fs::create_directories(cfg.out_dir);
    open_out(cfg.out_dir / "filter.json") << filter_json(report);
    auto log = open_out(cfg.out_dir / "design_log.csv");
    log << "iteration,lower_bound,certified,best\n";
    for (const auto& r : report.log) {
        log << r.iteration << ',' << format_real(r.lower_bound) << ',' << format_real(r.certified) << ','
            << format_real(r.best) << '\n';
    }
    out << "achieved_norm " << format_real(report.achieved_norm) << "\nlower_bound " << format_real(report.lower_bound)
        << "\niterations " << report.iterations << "\nconverged " << (report.converged ? "true" : "false") << '\n';
    return report.converged ? kExitOk : kExitNotConverged;
}

int cmd_norm(const JobConfig& cfg, const fs::path& filter_path, std::ostream& out, std::ostream& /*err*/) {
    const DesignProblem problem = cfg.problem();
    const FirFilter     K       = load_filter(filter_path, problem);
    const double        J       = evaluate_J(problem, K);
    out << "J " << format_real(J) << '\n';

    fs::create_directories(cfg.out_dir);
    auto csv = open_out(cfg.out_dir / "norms.csv");
    csv << "N,delay_steps,J,difference\n";
    out << "N,delay_steps,J,difference\n";
    double prev = std::nan("");
    for (int n : {2, 4, 8, 16}) {
        // Same physical delay L = delay_steps * h / N at every fast rate.
        const long long num = static_cast<long long>(problem.delay_steps) * n;
        std::string     row;
        if (num % problem.N != 0) {
            row  = std::to_string(n) + ",,,";
            prev = std::nan("");
        } else {
            DesignProblem p = problem;
            p.N             = n;
            p.delay_steps   = static_cast<int>(num / problem.N);
            const double Jn = evaluate_J(p, K);
            row = std::to_string(n) + ',' + std::to_string(p.delay_steps) + ',' + format_real(Jn) + ',' +
                  (std::isnan(prev) ? std::string() : format_real(std::abs(Jn - prev)));
            prev = Jn;
        }
        csv << row << '\n';
        out << row << '\n';
    }
    return kExitOk;
}

int cmd_compare(const JobConfig& cfg, const std::optional<fs::path>& filter_path, std::ostream& out,
                std::ostream& err) {
    const DesignProblem problem = cfg.problem();
    const int           M       = cfg.fast_multiplier();
    const double        step    = problem.h / M;

    std::vector<SignalGrid> corpus;
    if (!cfg.corpus.empty()) {
        for (const auto& p : cfg.corpus) {
            corpus.push_back(read_signal_csv(p));
            if (std::abs(corpus.back().step() - step) > 1e-9 * step) {
                throw std::invalid_argument("grid mismatch: " + p.string() + " has step " +
                                            format_real(corpus.back().step()) + ", expected h / sim_rate_multiplier = " +
                                            format_real(step));
            }
        }
    } else {
        std::mt19937_64                  rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const auto                       len    = static_cast<std::size_t>(cfg.corpus_length) * static_cast<std::size_t>(M);
        const auto                       active = len - len / 4;
        for (int i = 0; i < cfg.corpus_size; ++i) {
            std::vector<double> w(len, 0.0);
            for (std::size_t k = 1; k < active; ++k) {
                w[k] = gauss(rng);
            }
            corpus.push_back(SignalGrid::scalar(step, 0.0, w));
        }
    }

    const FirFilter K = filter_path ? load_filter(*filter_path, problem) : design_filter(cfg, problem).filter;
    std::vector<PipelineSpec> specs{PipelineSpec{YyPipeline{K}, M, true},
                                    PipelineSpec{SincPipeline{cfg.sinc_truncation}, M, true}};
    const Kernel phi1 = Kernel::from_name(cfg.phi1, problem.h);
    const Kernel phi2 = Kernel::from_name(cfg.phi2, problem.h);
    if (phi1.kind == KernelKind::impulse || M >= 16) {
        specs.push_back(PipelineSpec{SplinePipeline{phi1, phi2, cfg.tail_length}, M, true});
    } else {
        err << "note: spline pipeline skipped (needs sim_rate_multiplier >= 16 for a non-impulse sampler)\n";
    }

    const CompareTable table = compare(problem, specs, corpus);
    fs::create_directories(cfg.out_dir);
    auto csv = open_out(cfg.out_dir / "compare.csv");
    csv << "pipeline,signal,l2_error,l2_input,ratio,worst_ratio,mean_ratio,flag\n";
    for (const auto& r : table.rows) {
        csv << r.pipeline << ',' << r.signal << ',' << format_real(r.l2_error) << ',' << format_real(r.l2_input) << ','
            << (r.defined ? format_real(r.ratio) : "") << ",,," << (r.defined ? "ok" : "undefined") << '\n';
    }
    out << "pipeline,worst_ratio,mean_ratio,flag\n";
    for (const auto& s : table.summary) {
        const std::string worst = s.defined_count > 0 ? format_real(s.worst_ratio) : "";
        const std::string mean  = s.defined_count > 0 ? format_real(s.mean_ratio) : "";
        const std::string flag  = s.flagged ? "undefined" : "ok";
        csv << s.pipeline << ",summary,,,," << worst << ',' << mean << ',' << flag << '\n';
        out << s.pipeline << ',' << worst << ',' << mean << ',' << flag << '\n';
    }
    return kExitOk;
}

int cmd_baseline(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    const Kernel        phi1 = Kernel::from_name(cfg.phi1, cfg.h);
    const Kernel        phi2 = Kernel::from_name(cfg.phi2, cfg.h);
    const LaurentFilter a12  = gram_filter(phi1, phi2);
    const auto          rep  = classify_roots(a12);

    fs::create_directories(cfg.out_dir);
    {
        auto csv = open_out(cfg.out_dir / "gram.csv");
        csv << "n,c\n";
        for (int n = a12.first_index(); n <= a12.last_index(); ++n) {
            csv << n << ',' << format_real(a12[n]) << '\n';
        }
    }
    {
        std::string j = "{\n  \"roots\": [";
        for (std::size_t i = 0; i < rep.roots.size(); ++i) {
            j += std::string(i == 0 ? "" : ", ") + "[" + format_real(rep.roots[i].real()) + ", " +
                 format_real(rep.roots[i].imag()) + "]";
        }
        j += "],\n";
        j += "  \"inside_count\": " + std::to_string(rep.inside_count) + ",\n";
        j += "  \"outside_count\": " + std::to_string(rep.outside_count) + ",\n";
        j += "  \"on_circle_count\": " + std::to_string(rep.on_circle_count) + ",\n";
        j += "  \"advance\": " + std::to_string(rep.advance) + ",\n";
        j += std::string("  \"invertible\": ") + (rep.invertible ? "true" : "false") + ",\n";
        j += std::string("  \"causal_stable\": ") + (rep.causal_stable ? "true" : "false") + ",\n";
        j += std::string("  \"noncausal_stable\": ") + (rep.noncausal_stable ? "true" : "false") + "\n}\n";
        open_out(cfg.out_dir / "realizability.json") << j;
    }
    out << "gram " << phi1.name() << " / " << phi2.name() << ": " << a12.coeffs().size() << " coefficients, "
        << rep.inside_count << " inside, " << rep.outside_count << " outside, " << rep.on_circle_count
        << " on the unit circle; causal_stable " << (rep.causal_stable ? "true" : "false") << '\n';

    try {
        const GramInverse inv = invert_gram(a12, cfg.tail_length);
        auto              csv = open_out(cfg.out_dir / "inverse.csv");
        csv << "n,k\n";
        for (int n = inv.response.first_index(); n <= inv.response.last_index(); ++n) {
            csv << n << ',' << format_real(inv.response[n]) << '\n';
        }
    } catch (const NotInvertible& e) {
        err << "error: " << e.what();
        for (const auto& r : e.on_circle_roots()) {
            err << " (" << format_real(r.real()) << ", " << format_real(r.imag()) << ")";
        }
        err << '\n';
        return kExitInfeasible;
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sampled-data signal reconstruction filter design", "yyfilter"};
    app.require_subcommand(1);
    std::string                config_path, out_dir, filter_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--seed", seed, "random seed (overrides synthesis.seed)");
    app.add_option("--out-dir", out_dir, "output directory (overrides output.dir)");
    auto* design   = app.add_subcommand("design", "synthesize the FIR filter");
    auto* norm     = app.add_subcommand("norm", "certify J(K) and the convergence table over N");
    auto* cmp      = app.add_subcommand("compare", "compare reconstruction pipelines on a corpus");
    app.add_subcommand("baseline", "Gram filter and realizability of a spline/sinc baseline");
    norm->add_option("--filter", filter_path, "filter.json (default: <out-dir>/filter.json)");
    cmp->add_option("--filter", filter_path, "filter.json (default: design from the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        JobConfig cfg = load_config(config_path);
        if (seed) {
            cfg.seed = *seed;
        }
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (design->parsed()) {
            return cmd_design(cfg, out, err);
        }
        if (norm->parsed()) {
            return cmd_norm(cfg, filter_path.empty() ? cfg.out_dir / "filter.json" : fs::path(filter_path), out, err);
        }
        if (cmp->parsed()) {
            return cmd_compare(cfg, filter_path.empty() ? std::nullopt : std::optional<fs::path>(filter_path), out,
                               err);
        }
        return cmd_baseline(cfg, out, err);
    } catch (const NotInvertible& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace yy
