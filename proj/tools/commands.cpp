#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "condent/awgn_scalar.hpp"
#include "condent/bounds_scalar.hpp"
#include "condent/errors.hpp"
#include "condent/expofam.hpp"
#include "condent/format.hpp"
#include "condent/parallel.hpp"
#include "condent/rate_bounds.hpp"
#include "condent/spec_parse.hpp"
#include "condent/vector_awgn.hpp"

namespace condent::cli {

namespace {

constexpr double kFig4Alphas[] = {0.4, 2.0 / 3.0};
constexpr int kRateAgents[] = {2, 5, 10};
const char* const kRateInputs[] = {"uniform", "laplace", "exponential"};

bool want_csv(const Common& c, bool csv_default) {
    if (c.format.empty()) return csv_default;
    if (c.format == "csv") return true;
    if (c.format == "json") return false;
    throw ParseError("--format must be json or csv, got '" + c.format + "'");
}

void emit_table(const Common& c, const Table& t) {
    emit(want_csv(c, true) ? t.csv(c.units) : t.json(c.units).dump(2) + "\n", c.out);
}

void emit_record(const Common& c, const Json& rec) {
    emit(want_csv(c, false) ? record_csv(rec) : rec.dump(2) + "\n", c.out);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> grid_or(const std::string& s, std::vector<double> fallback) {
    return s.empty() ? fallback : parse_grid(s);
}

std::string require_catalog(const std::string& name) {
    for (const auto& n : catalog_names())
        if (n == name) return n;
    std::string all;
    for (const auto& n : catalog_names()) all += (all.empty() ? "" : ", ") + n;
    throw ParseError("unknown input family '" + name + "' (expected one of " + all + ")");
}

CEOSetting ceo_setting(const InputDistribution& in, double noise_var, const std::string& agents) {
    if (agents == "inf") return CEOSetting::infinite(in, noise_var);
    const double m = parse_number(agents);
    if (m < 1 || m != std::floor(m) || m > 1e6) throw ParseError("--agents must be a positive integer or inf, got '" + agents + "'");
    return CEOSetting::finite(in, noise_var, static_cast<int>(m));
}

std::vector<BoundsReport> bounds_over(const std::string& family, const std::vector<double>& grid, double noise_var) {
    std::vector<std::optional<BoundsReport>> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out[i] = bounds_report(ScalarChannel(make_catalog(family, grid[i]), noise_var));
    });
    std::vector<BoundsReport> r;
    for (auto& b : out) r.push_back(std::move(*b));
    return r;
}

std::vector<std::string> sandwich_warnings(const BoundsReport& b, const std::string& where) {
    std::vector<std::string> w;
    for (const auto& v : sandwich_violations(b)) w.push_back(where + ": " + v);
    return w;
}

Table bounds_table(const std::vector<double>& grid, const std::vector<BoundsReport>& rows, bool full) {
    Table t;
    t.col("sigma_x2", Kind::plain);
    t.est("truth", Kind::info);
    t.est("lower_main", Kind::info);
    t.est("ub_jensen", Kind::info);
    t.est("ub_linear", Kind::info);
    if (full) {
        t.est("ub_maxent", Kind::info);
        t.est("mmse", Kind::plain);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& b = rows[i];
        t.add(grid[i]).add(b.truth).add(b.lower_main).add(b.ub_jensen).add(b.ub_linear);
        if (full) t.add(b.ub_maxent).add(b.detail.mmse);
        t.end_row();
    }
    return t;
}

struct RateColumn {
    const char* name;
    std::optional<double> RateRow::*row = nullptr;
    std::optional<double> RateLoss::*loss = nullptr;
};

const std::vector<RateColumn>& rate_columns() {
    static const std::vector<RateColumn> cols{
        {"remote_lb1", &RateRow::remote_lb1},         {"remote_lb2", &RateRow::remote_lb2},
        {"coop_tight", &RateRow::coop_tight},         {"coop_weak", &RateRow::coop_weak},
        {"ceo_ub", &RateRow::ceo_ub},                 {"loss_lb", nullptr, &RateLoss::lb},
        {"loss_ub_thm9", nullptr, &RateLoss::ub_thm9}, {"loss_ub_thm10", nullptr, &RateLoss::ub_thm10},
        {"loss_ub_prev", nullptr, &RateLoss::ub_prev}, {"loss_gauss_exact", nullptr, &RateLoss::gauss_exact},
    };
    return cols;
}

std::optional<double> pick(const RateRow& r, const RateColumn& c) { return c.row ? r.*c.row : r.loss.*c.loss; }

// One block of rows for a setting; selected columns only (all when empty).
void rate_rows(Table& t, const CEOSetting& s, const std::vector<double>& grid, const std::vector<std::string>& names,
               const std::optional<std::string>& label) {
    const auto p = ceo_powers(s);
    std::vector<RateRow> vals(grid.size()), errs(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        vals[i] = rate_row(s, p, grid[i]);
        errs[i] = rate_row_error(s, p, grid[i]);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (label) t.add(*label).add(s.infinite_agents ? Table::Cell(std::string("inf")) : Table::Cell(double(s.agents)));
        t.add(grid[i]);
        for (const auto& c : rate_columns()) {
            bool use = names.empty();
            for (const auto& n : names) use = use || n == c.name;
            if (use) t.add(pick(vals[i], c), pick(errs[i], c));
        }
        t.end_row();
    }
}

void rate_header(Table& t, const std::vector<std::string>& names, bool labelled) {
    if (labelled) {
        t.col("input", Kind::text);
        t.col("agents", Kind::text);
    }
    t.col("D", Kind::plain);
    for (const auto& c : rate_columns()) {
        bool use = names.empty();
        for (const auto& n : names) use = use || n == c.name;
        if (use) t.est(c.name, Kind::info);
    }
}

std::vector<double> default_d_grid(const CEOSetting& s) {
    const double vx = s.input.variance();
    return distortion_grid(std::max(s.linear_mmse(), 0.01 * vx), vx, 50);
}

Json thm7_record(const Common& c, const ExpoFamChannel& ch) {
    const auto t = thm7_lower_bound(ch);
    Json j = record_header("expofam", c.units);
    j["input"] = ch.input().spec();
    j["family"] = ch.family().tag;
    j["truth"] = estimate(t.truth, Kind::info, c.units);
    j["bound"] = estimate(t.bound, Kind::info, c.units);
    j["corrective"] = estimate(t.corrective, Kind::info, c.units);
    j["h_x"] = estimate(t.h_x, Kind::info, c.units);
    j["h_y"] = estimate(t.h_y, Kind::info, c.units);
    j["h_y_given_x"] = estimate(t.h_y_given_x, Kind::info, c.units);
    j["e_log_cond_var"] = estimate(t.e_log_cond_var, Kind::info, c.units);
    j["gap"] = estimate({t.gap, combined_tolerance({t.truth.abs_error, t.bound.abs_error}, 0.0) / 3.0, t.truth.method},
                        Kind::info, c.units);
    std::vector<std::string> warn;
    if (t.gap < -combined_tolerance({t.truth.abs_error, t.bound.abs_error}))
        warn.push_back("lower bound exceeds h(E[X|Y]) by " + shortest(-t.gap));
    j["warnings"] = warn;
    handle_warnings(c, warn);
    return j;
}

Table gap_table(const std::vector<double>& ds, double gamma, bool numeric, std::vector<std::string>& warn) {
    Table t;
    t.col("d", Kind::plain);
    t.est("gap", Kind::info);
    t.col("two_over_d", Kind::info);
    t.col("two_over_3d", Kind::info);
    if (numeric) {
        t.est("truth_numeric", Kind::info);
        t.est("bound_numeric", Kind::info);
        t.est("gap_numeric", Kind::info);
    }
    std::vector<std::optional<Thm7Result>> num(ds.size());
    std::vector<std::string> fail(ds.size());
    if (numeric) {
        parallel_for(ds.size(), [&](std::size_t i) {
            try {
                num[i] = thm7_lower_bound(ExpoFamChannel(make_beta_prime(gamma + ds[i], gamma), gamma_family(gamma + ds[i])));
            } catch (const Error& e) {
                fail[i] = e.what();
            }
        });
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double d = ds[i];
        t.add(d).add(EstimateWithError::exact(beta_prime_gap(d))).add(2.0 / d).add(2.0 / (3.0 * d));
        if (numeric) {
            if (num[i]) {
                const auto& r = *num[i];
                t.add(r.truth).add(r.bound);
                t.add(r.gap, std::hypot(r.truth.abs_error, r.bound.abs_error));
            } else {
                warn.push_back("d=" + shortest(d) + ": numeric evaluation failed: " + fail[i]);
                for (int k = 0; k < 6; ++k) t.add(Table::Cell());
            }
        }
        t.end_row();
    }
    return t;
}

Json manifest(const Common& c, const std::string& id, const std::vector<std::string>& files, Json params) {
    Json m = record_header("figure", c.units);
    m["figure"] = id;
    m["files"] = files;
    m["seed"] = c.seed;
    m["parameters"] = std::move(params);
    Json tol;
    tol["comparison"] = "3 x root-sum-square of the operands' abs_error";
    tol["comparison_floor"] = 1e-6;
    tol["absent_cells"] = "bound outside its validity window";
    m["tolerances"] = tol;
    return m;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    emit(text, (dir / name).string());
}

}  // namespace

std::vector<double> default_sweep_grid() { return {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}; }

void handle_warnings(const Common& c, const std::vector<std::string>& warnings) {
    if (warnings.empty()) return;
    if (c.strict) {
        std::string all;
        for (const auto& w : warnings) all += (all.empty() ? "" : "; ") + w;
        throw IdentityViolation(all);
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_report(const Common& c, const ReportArgs& a) {
    const ScalarChannel ch(parse_distribution(a.input), a.noise_var);
    const auto b = bounds_report(ch);
    const auto& r = b.detail;
    const Units u = c.units;
    Json j = record_header("report", u);
    j["input"] = ch.input().spec();
    j["noise_var"] = a.noise_var;
    j["h_x"] = estimate(r.h_x, Kind::info, u);
    j["h_y"] = estimate(r.h_y, Kind::info, u);
    j["h_cond_mean"] = estimate(r.h_cond_mean, Kind::info, u);
    j["mmse"] = estimate(r.mmse, Kind::plain, u);
    j["var_cond_mean"] = estimate(r.var_cond_mean, Kind::plain, u);
    j["var_cond_mean_direct"] = estimate(r.var_cond_mean_direct, Kind::plain, u);
    j["e_log_cond_var"] = estimate(r.e_log_cond_var, Kind::info, u);
    j["var_cond_var"] = estimate(r.var_cond_var, Kind::plain, u);
    j["lower_main"] = estimate(r.lower_main, Kind::info, u);
    j["ub_jensen"] = estimate(r.ub_jensen, Kind::info, u);
    j["ub_linear"] = estimate(r.ub_linear, Kind::info, u);
    j["ub_maxent"] = estimate(r.ub_maxent, Kind::info, u);
    Json gaps;
    auto gap = [&](const char* name, double g, double tol) {
        gaps[name] = estimate({g, tol / 3.0, Method::quadrature}, Kind::info, u);
    };
    gap("lower_main", b.gap_lower, b.tol_lower);
    gap("ub_jensen", b.gap_jensen, b.tol_jensen);
    gap("ub_linear", b.gap_linear, b.tol_linear);
    gap("ub_maxent", b.gap_maxent, b.tol_maxent);
    j["gaps"] = gaps;
    j["floor_hits"] = r.floor_hits;
    auto warn = sandwich_warnings(b, "sigma_x2=" + shortest(ch.input().variance()));
    if (a.oracle_samples > 0) {
        const auto s = entropy_cond_mean_sampled(ch, a.oracle_samples, c.seed);
        Json o;
        o["h_cond_mean_sampled"] = estimate(s, Kind::info, u);
        o["samples"] = a.oracle_samples;
        o["seed"] = c.seed;
        o["agrees"] = std::abs(s.value - r.h_cond_mean.value) <= combined_tolerance({s.abs_error, r.h_cond_mean.abs_error});
        if (!o["agrees"].get<bool>())
            warn.push_back("sampled oracle " + shortest(s.value) + " disagrees with quadrature " + shortest(r.h_cond_mean.value));
        j["oracle"] = o;
    }
    j["warnings"] = warn;
    handle_warnings(c, warn);
    emit_record(c, j);
    return 0;
}

int run_sweep(const Common& c, const SweepArgs& a) {
    const auto fam = require_catalog(a.family);
    const auto grid = grid_or(a.grid, default_sweep_grid());
    const auto rows = bounds_over(fam, grid, a.noise_var);
    std::vector<std::string> warn;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto w = sandwich_warnings(rows[i], fam + " sigma_x2=" + shortest(grid[i]));
        warn.insert(warn.end(), w.begin(), w.end());
    }
    handle_warnings(c, warn);
    emit_table(c, bounds_table(grid, rows, true));
    return 0;
}

int run_rate_loss(const Common& c, const RateArgs& a) {
    const auto s = ceo_setting(parse_distribution(a.input), a.noise_var, a.agents);
    const auto grid = grid_or(a.d_grid, default_d_grid(s));
    Table t;
    rate_header(t, {}, false);
    rate_rows(t, s, grid, {}, std::nullopt);
    emit_table(c, t);
    return 0;
}

int run_expofam(const Common& c, const ExpoArgs& a) {
    if (!a.input.empty()) {
        emit_record(c, thm7_record(c, ExpoFamChannel(parse_distribution(a.input), parse_family(a.family))));
        return 0;
    }
    if (!(a.gamma > 0.0)) throw ParameterError("--gamma must be positive");
    std::vector<std::string> warn;
    const auto t = gap_table(grid_or(a.d_grid, {0.5, 1.0, 3.0, 7.0}), a.gamma, a.numeric, warn);
    handle_warnings(c, warn);
    emit_table(c, t);
    return 0;
}

int run_vector(const Common& c, const VectorArgs& a) {
    const auto ch = parse_vector_channel(a.channel);
    VectorOptions o;
    o.y_samples = a.y_samples;
    o.knn_samples = a.knn_samples;
    o.particles = a.particles;
    o.seed = c.seed;
    const auto s = vector_summary(ch, o);
    const Units u = c.units;
    Json j = record_header("vector", u);
    j["channel"] = ch.spec();
    j["dim"] = s.dim;
    j["seed"] = c.seed;
    j["y_samples"] = s.y_samples;
    j["knn_samples"] = s.knn_samples;
    j["h_x"] = estimate(s.h_x, Kind::info, u);
    j["h_y"] = estimate(s.h_y, Kind::info, u);
    j["e_log_det"] = estimate(s.e_log_det, Kind::info, u);
    j["h_cond_mean"] = estimate(s.truth, Kind::info, u);
    j["h_cond_mean_knn"] = estimate(s.truth_knn, Kind::info, u);
    j["cross_check_ok"] = s.cross_check_ok;
    j["lower_main"] = estimate(s.lower_main, Kind::info, u);
    j["ub_jensen"] = estimate(s.ub_jensen, Kind::info, u);
    j["ub_maxent"] = estimate(s.ub_maxent, Kind::info, u);
    j["log_det_mmse"] = estimate(s.log_det_mmse, Kind::info, u);
    auto mat = [](const Mat& m) {
        Json rows = Json::array();
        for (int i = 0; i < m.rows(); ++i) {
            Json r = Json::array();
            for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
            rows.push_back(r);
        }
        return rows;
    };
    j["mmse"] = mat(s.mmse);
    j["mmse_abs_error"] = mat(s.mmse_error);
    j["cov_cond_mean"] = mat(s.cov_cond_mean);
    j["total_variance_abs_error"] = mat(s.total_var_error);
    if (s.gaussian_closed_form)
        j["gaussian_closed_form"] = estimate(EstimateWithError::exact(*s.gaussian_closed_form), Kind::info, u);
    else
        j["gaussian_closed_form"] = nullptr;
    std::vector<std::string> warn;
    auto order = [&](const char* what, const EstimateWithError& lo, const EstimateWithError& hi) {
        if (lo.value > hi.value + combined_tolerance({lo.abs_error, hi.abs_error}))
            warn.push_back(std::string(what) + ": " + shortest(lo.value) + " > " + shortest(hi.value));
    };
    order("lower_main <= h_cond_mean", s.lower_main, s.truth);
    order("h_cond_mean <= ub_jensen", s.truth, s.ub_jensen);
    order("ub_jensen <= ub_maxent", s.ub_jensen, s.ub_maxent);
    if (!s.cross_check_ok) warn.push_back("kNN cross-check disagrees with the log-det estimate");
    j["warnings"] = warn;
    handle_warnings(c, warn);
    emit_record(c, j);
    return 0;
}

int run_figure(const Common& c, const FigureArgs& a) {
    std::vector<std::string> ids;
    for (const auto& id : a.ids) {
        if (id == "all") {
            ids.insert(ids.end(), {"fig3", "fig4", "fig5", "fig6", "fig7"});
        } else if (id == "fig3" || id == "fig4" || id == "fig5" || id == "fig6" || id == "fig7") {
            ids.push_back(id);
        } else {
            throw ParseError("unknown figure '" + id + "' (expected fig3..fig7 or all)");
        }
    }
    const std::filesystem::path dir(a.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ParameterError("cannot create output directory '" + a.out_dir + "': " + ec.message());
    const Units u = c.units;
    std::vector<std::string> warn;

    for (const auto& id : ids) {
        std::vector<std::string> files;
        Json params;
        params["noise_var"] = 1.0;
        if (id == "fig3") {
            const auto grid = grid_or(a.grid, default_sweep_grid());
            params["sigma_x2"] = grid;
            params["inputs"] = Json::array();
            for (const char* fam : {"gm2", "exponential", "uniform"}) {
                const auto rows = bounds_over(fam, grid, 1.0);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    auto w = sandwich_warnings(rows[i], std::string(fam) + " sigma_x2=" + shortest(grid[i]));
                    warn.insert(warn.end(), w.begin(), w.end());
                }
                const std::string name = "fig3_" + std::string(fam) + ".csv";
                write_file(dir, name, bounds_table(grid, rows, false).csv(u));
                files.push_back(name);
                params["inputs"].push_back(fam);
            }
        } else if (id == "fig4") {
            const auto grid = grid_or(a.grid, log_grid(0.1, 10.0, 21));
            params["input"] = "uniform";
            params["sigma_x2"] = grid;
            params["alpha"] = Json::array({kFig4Alphas[0], kFig4Alphas[1]});
            Table t;
            t.col("alpha", Kind::plain);
            t.col("sigma_x2", Kind::plain);
            t.est("n_y_alpha", Kind::plain);
            t.est("lb_main", Kind::plain);
            t.est("lb_costa", Kind::plain);
            t.est("gap_main", Kind::plain);
            t.est("gap_costa", Kind::plain);
            for (double al : kFig4Alphas) {
                std::vector<EPIComparison> r(grid.size());
                parallel_for(grid.size(), [&](std::size_t i) {
                    r[i] = costa_comparison(make_uniform_zero_mean(grid[i]), 1.0, al);
                });
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double e = r[i].abs_error;
                    t.add(al).add(grid[i]).add(r[i].n_y_alpha, e).add(r[i].lb_main, e).add(r[i].lb_costa, e);
                    t.add(r[i].gap_main, e).add(r[i].gap_costa, e);
                    t.end_row();
                    for (auto [g, what] : {std::pair{r[i].gap_main, "gap_main"}, std::pair{r[i].gap_costa, "gap_costa"}})
                        if (g < -combined_tolerance({e}))
                            warn.push_back("fig4 alpha=" + shortest(al) + " sigma_x2=" + shortest(grid[i]) + ": " + what +
                                           " negative");
                }
            }
            write_file(dir, "fig4.csv", t.csv(u));
            files.push_back("fig4.csv");
        } else if (id == "fig5" || id == "fig6") {
            const std::vector<std::string> cols = id == "fig5"
                                                      ? std::vector<std::string>{"loss_ub_thm9", "loss_ub_thm10", "loss_ub_prev"}
                                                      : std::vector<std::string>{"loss_lb", "loss_ub_thm10", "loss_gauss_exact"};
            params["sigma_x2"] = 1.0;
            params["agents"] = Json::array({kRateAgents[0], kRateAgents[1], kRateAgents[2]});
            params["inputs"] = Json::array();
            params["d_points"] = 40;
            Table t;
            rate_header(t, cols, true);
            for (const char* in : kRateInputs) {
                params["inputs"].push_back(make_catalog(in, 1.0).spec());
                for (int m : kRateAgents) {
                    const auto s = CEOSetting::finite(make_catalog(in, 1.0), 1.0, m);
                    rate_rows(t, s, distortion_grid(s.linear_mmse(), 1.0, 40), cols, make_catalog(in, 1.0).name());
                }
            }
            write_file(dir, id + ".csv", t.csv(u));
            files.push_back(id + ".csv");
        } else {
            const auto ds = log_grid(0.01, 50.0, 49);
            params["d"] = ds;
            params["gap"] = "closed form for Beta-prime input through the Gamma channel";
            write_file(dir, "fig7.csv", gap_table(ds, 3.0, false, warn).csv(u));
            files.push_back("fig7.csv");
        }
        write_file(dir, id + "_manifest.json", manifest(c, id, files, params).dump(2) + "\n");
    }
    handle_warnings(c, warn);
    return 0;
}

}  // namespace condent::cli
