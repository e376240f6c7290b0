#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "output.hpp"

namespace condent::cli {

struct Common {
    Units units = Units::nats;
    std::string out;     // file path; stdout when empty
    std::string format;  // json | csv; empty picks the command default
    bool strict = false;
    std::uint64_t seed = 42;
};

struct ReportArgs {
    std::string input;
    double noise_var = 1.0;
    std::size_t oracle_samples = 0;  // > 0 adds the sampled kNN oracle
};

struct SweepArgs {
    std::string family;  // catalog name, e.g. gm2
    double noise_var = 1.0;
    std::string grid;  // empty: the fig3 default grid
};

struct RateArgs {
    std::string input;
    double noise_var = 1.0;
    std::string agents = "2";  // integer or "inf"
    std::string d_grid;        // empty: 50 log-spaced points over the CEO window
};

struct ExpoArgs {
    std::string input;   // single-channel record when set
    std::string family = "gamma:alpha=7";
    std::string d_grid;  // gap-vs-d table otherwise
    double gamma = 3.0;
    bool numeric = false;
};

struct VectorArgs {
    std::string channel;
    std::size_t y_samples = 4000;
    std::size_t knn_samples = 1'000'000;
    std::size_t particles = 100'000;
};

struct FigureArgs {
    std::vector<std::string> ids;
    std::string out_dir = ".";
    std::string grid;  // overrides the default sigma_X^2 grid of fig3 and fig4
};

// Each returns the process exit status; library errors propagate as exceptions.
int run_report(const Common& c, const ReportArgs& a);
int run_sweep(const Common& c, const SweepArgs& a);
int run_rate_loss(const Common& c, const RateArgs& a);
int run_expofam(const Common& c, const ExpoArgs& a);
int run_vector(const Common& c, const VectorArgs& a);
int run_figure(const Common& c, const FigureArgs& a);
int run_selftest(const Common& c);

// Default sigma_X^2 grid of the bound sweep (gm2 needs sigma_X^2 > 1).
std::vector<double> default_sweep_grid();

// Prints warnings to stderr; in strict mode raises IdentityViolation instead.
void handle_warnings(const Common& c, const std::vector<std::string>& warnings);

}  // namespace condent::cli
