// condent: command-line front end.
//
// Exit status: 0 ok; 1 bad arguments or spec strings; 2 parameters outside a
// precondition; 3 numerical failure (no convergence, lost resolution);
// 4 identity or invariant violation with --strict.

#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "condent/errors.hpp"

using namespace condent;
using namespace condent::cli;

namespace {

void common_options(CLI::App* sub, Common& c, bool with_format = true) {
    sub->add_option("--out,-o", c.out, "Output file (stdout when omitted)");
    if (with_format) sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--units", c.units, "nats or bits")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Units>{{"nats", Units::nats}, {"bits", Units::bits}}))
        ->default_str("nats");
    sub->add_flag("--strict", c.strict, "Treat bound-ordering or identity warnings as failures (exit 4)");
    sub->add_option("--seed", c.seed, "Seed for every sampled quantity")->default_val(42);
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const condent::ParseError*>(&e)) return 1;
    if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const InputError*>(&e) || dynamic_cast<const TailError*>(&e) ||
        dynamic_cast<const RegularityError*>(&e) || dynamic_cast<const UnsupportedInputError*>(&e))
        return 2;
    if (dynamic_cast<const IdentityViolation*>(&e)) return 4;
    return 3;
}

const char* category(int code) {
    switch (code) {
        case 1: return "parse error";
        case 2: return "domain error";
        case 3: return "numerical error";
        case 4: return "invariant violation";
    }
    return "error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential entropy of the conditional mean: bounds, identities and figure data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Common c;
    ReportArgs ra;
    SweepArgs sa;
    RateArgs rl;
    ExpoArgs ea;
    VectorArgs va;
    FigureArgs fa;

    auto* report = app.add_subcommand("report", "Entropy report for Y = X + W (JSON)");
    report->add_option("input", ra.input, "Input distribution spec, e.g. gaussian:mu=0,var=1")->required();
    report->add_option("--noise-var", ra.noise_var, "Noise variance")->default_val(1.0);
    report->add_option("--oracle-samples", ra.oracle_samples, "Add the sampled kNN oracle with this many samples (>= 100000)");
    common_options(report, c);

    auto* sweep = app.add_subcommand("sweep", "Bounds against sigma_X^2 for one input family (CSV)");
    sweep->add_option("family", sa.family, "Catalog family: gaussian, uniform, exponential, laplace, triangular, gm2")->required();
    sweep->add_option("--grid", sa.grid, "sigma_X^2 values v1,v2,... or lo:hi:count (default 1.25,1.5,2,3,4,6,8)");
    sweep->add_option("--noise-var", sa.noise_var, "Noise variance")->default_val(1.0);
    common_options(sweep, c);

    auto* rate = app.add_subcommand("rate-loss", "Remote and CEO rate bounds against D (CSV)");
    rate->add_option("input", rl.input, "Input distribution spec")->required();
    rate->add_option("--noise-var", rl.noise_var, "Noise variance per agent")->default_val(1.0);
    rate->add_option("--agents", rl.agents, "Number of agents M, or inf")->default_val("2");
    rate->add_option("--d-grid", rl.d_grid, "Distortions v1,v2,... or lo:hi:count (default 50 log-spaced points)");
    common_options(rate, c);

    auto* expo = app.add_subcommand("expofam", "Exponential-family bound: gap against d (CSV), or one channel (JSON)");
    expo->add_option("--input", ea.input, "Input spec for a single-channel record, e.g. betaprime:alpha=7,gamma=3");
    expo->add_option("--family", ea.family, "Channel family for --input: gamma:alpha=.. or gaussian-base:var=..")
        ->default_val("gamma:alpha=7");
    expo->add_option("--d-grid", ea.d_grid, "Values of d = alpha - gamma (default 0.5,1,3,7)");
    expo->add_option("--gamma", ea.gamma, "Beta-prime gamma for the numeric columns")->default_val(3.0);
    expo->add_flag("--numeric", ea.numeric, "Add quadrature truth, bound and gap next to the closed form");
    common_options(expo, c);

    auto* vec = app.add_subcommand("vector", "Vector channel Y = A X + W, n <= 3 (JSON)");
    vec->add_option("channel", va.channel, "vec:n=2,input=prod(uniform:var=1;laplace:var=1),A=[[1,0],[0,1]],Kw=[[1,0],[0,1]]")
        ->required();
    vec->add_option("--y-samples", va.y_samples, "Monte Carlo outputs for the log-det and MMSE averages (at least 1000)")->default_val(4000);
    vec->add_option("--knn-samples", va.knn_samples, "Samples for the kNN entropy of Y")->default_val(1000000);
    vec->add_option("--particles", va.particles, "Importance-sampling particles for n = 3")->default_val(100000);
    common_options(vec, c);

    auto* fig = app.add_subcommand("figure", "Figure data: CSVs plus a manifest per figure");
    fig->add_option("ids", fa.ids, "fig3 fig4 fig5 fig6 fig7, or all")->required();
    fig->add_option("--out-dir", fa.out_dir, "Directory for the CSVs and manifests")->default_val(".");
    fig->add_option("--grid", fa.grid, "sigma_X^2 grid for fig3 and fig4");
    common_options(fig, c, false);

    auto* self = app.add_subcommand("selftest", "Run the invariant suite; one PASS/FAIL line per property");
    common_options(self, c, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*report) return run_report(c, ra);
        if (*sweep) return run_sweep(c, sa);
        if (*rate) return run_rate_loss(c, rl);
        if (*expo) return run_expofam(c, ea);
        if (*vec) return run_vector(c, va);
        if (*fig) return run_figure(c, fa);
        if (*self) return run_selftest(c);
    } catch (const std::exception& e) {
        const int code = exit_code(e);
        std::cerr << "condent: " << category(code) << ": " << e.what() << "\n";
        return code;
    }
    return 1;
}
