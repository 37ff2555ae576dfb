#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "krein/branches.hpp"
#include "krein/index_counts.hpp"
#include "krein/pencil.hpp"
#include "krein/random.hpp"
#include "krein/report.hpp"

namespace {

enum Exit { ok = 0, residual_failure = 1, usage = 2, input_invalid = 3, numerical_failure = 4 };

struct Config {
    std::string input;
    std::string output;
    std::optional<double> lambda_min, lambda_max;
    std::optional<int> samples;
    std::uint64_t seed = 0;
    int n = 3, p = 2, q = 0;
    int indent = -1;
    int verbosity = 0;
};

void emit(const Config& c, const std::string& text) {
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        return;
    }
    const std::filesystem::path target(c.output);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw krein::InputError("cannot write " + tmp.string());
        f << text;
    }
    std::filesystem::rename(tmp, target);
}

krein::LoadedProblem load(const Config& c) {
    if (c.input.empty()) throw krein::InputError("--input is required");
    krein::LoadedProblem lp = krein::load_problem(c.input);
    for (const auto& w : lp.warnings) std::cerr << "warning: " << w << "\n";
    return lp;
}

krein::PolyPencil pencil_of(const krein::Problem& p) {
    if (const auto* pencil = std::get_if<krein::PolyPencil>(&p)) return *pencil;
    return std::get<krein::HamiltonianProblem>(p).pencil();
}

krein::AnalysisOptions analysis_options(const Config& c) {
    krein::AnalysisOptions o;
    if (c.samples) o.samples = *c.samples;
    if (c.lambda_min || c.lambda_max)
        o.range = std::pair{c.lambda_min.value_or(0.0), c.lambda_max.value_or(0.0)};
    o.seed = c.seed;
    return o;
}

void log_warnings(const Config& c, const std::vector<std::string>& w) {
    if (c.verbosity > 0)
        for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

int run_analyze(const Config& c) {
    const krein::PolyPencil pencil = pencil_of(load(c).problem);
    const krein::IndexReport r = krein::analyze_pencil(pencil, analysis_options(c));
    log_warnings(c, r.warnings);
    emit(c, krein::dump_json(krein::report_to_json(r), c.indent));
    return ok;
}

int run_curves(const Config& c) {
    const krein::PolyPencil pencil = pencil_of(load(c).problem);
    krein::GridSpec g;
    if (c.lambda_min && c.lambda_max) {
        g.lambda_min = *c.lambda_min;
        g.lambda_max = *c.lambda_max;
    } else {
        const double K = krein::compute_K_infinity(pencil);
        g.lambda_min = c.lambda_min.value_or(-K);
        g.lambda_max = c.lambda_max.value_or(K);
    }
    if (c.samples) g.samples = *c.samples;
    const krein::BranchFamily f = krein::track_branches(pencil, g);
    log_warnings(c, f.warnings);
    emit(c, krein::branches_to_csv(f));
    return ok;
}

int run_verify(const Config& c) {
    const krein::PolyPencil pencil = pencil_of(load(c).problem);
    krein::AnalysisOptions o = analysis_options(c);
    o.local_pairs = 20;
    const krein::IndexReport r = krein::analyze_pencil(pencil, o);
    log_warnings(c, r.warnings);
    emit(c, krein::dump_json(krein::verify_summary(r), c.indent));
    return krein::all_residuals_zero(r) ? ok : residual_failure;
}

int run_hamiltonian(const Config& c) {
    const krein::LoadedProblem lp = load(c);
    const auto* h = std::get_if<krein::HamiltonianProblem>(&lp.problem);
    if (h == nullptr) throw krein::InputError("hamiltonian: input is not a Hamiltonian problem");
    const krein::HamiltonianReport r = krein::analyze_hamiltonian(*h);
    log_warnings(c, r.spectrum.warnings);
    emit(c, krein::dump_json(krein::hamiltonian_to_json(*h, r), c.indent));
    if (r.theorem1.applicable && r.theorem1.residual != 0) return residual_failure;
    if (r.theorem2 && !r.theorem2->holds) return residual_failure;
    return ok;
}

int run_random(const Config& c) {
    krein::Rng rng(c.seed);
    const krein::PolyPencil pencil = krein::random_pencil(c.n, c.p, c.q, rng);
    emit(c, krein::dump_json(krein::problem_to_json(pencil), c.indent));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Index counts and Krein signatures of Hermitian matrix pencils"};
    app.require_subcommand(1, 1);
    Config c;

    auto add_io = [&](CLI::App* s, bool needs_input) {
        auto* in = s->add_option("--input", c.input, "problem JSON file");
        if (needs_input) in->required();
        s->add_option("--output", c.output, "output file (stdout when omitted)");
        s->add_option("--json-indent", c.indent, "JSON indentation (compact when negative)");
        s->add_flag("-v,--verbose", c.verbosity, "print warnings");
    };
    auto add_grid = [&](CLI::App* s) {
        s->add_option("--lambda-min", c.lambda_min, "lower end of the lambda range");
        s->add_option("--lambda-max", c.lambda_max, "upper end of the lambda range");
        s->add_option("--samples", c.samples, "initial grid samples")->check(CLI::Range(3, 1000000));
        s->add_option("--seed", c.seed, "seed for random endpoint pairs");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "full index report");
    add_io(analyze, true);
    add_grid(analyze);
    CLI::App* curves = app.add_subcommand("curves", "eigencurve CSV");
    add_io(curves, true);
    add_grid(curves);
    CLI::App* verify = app.add_subcommand("verify", "identity residuals; exit 1 unless all zero");
    add_io(verify, true);
    add_grid(verify);
    CLI::App* ham = app.add_subcommand("hamiltonian", "JL spectrum and Hamiltonian counts");
    add_io(ham, true);
    CLI::App* random = app.add_subcommand("random", "seeded random pencil");
    add_io(random, false);
    random->add_option("--seed", c.seed, "generator seed");
    random->add_option("--n", c.n, "matrix size")->check(CLI::PositiveNumber);
    random->add_option("--p", c.p, "matrix polynomial degree")->check(CLI::NonNegativeNumber);
    random->add_option("--q", c.q, "degree of g")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (c.lambda_min && c.lambda_max && !(*c.lambda_min < *c.lambda_max))
            throw krein::InputError("--lambda-min must be below --lambda-max");
        if (*analyze) return run_analyze(c);
        if (*curves) return run_curves(c);
        if (*verify) return run_verify(c);
        if (*ham) return run_hamiltonian(c);
        return run_random(c);
    } catch (const krein::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_invalid;
    } catch (const krein::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return input_invalid;
    } catch (const krein::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_invalid;
    }
}
