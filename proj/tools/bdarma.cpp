#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <bdarma/bdarma.hpp>

namespace fs = std::filesystem;
using namespace bdarma;

namespace {

ZeroPolicy zero_policy_of(const std::string& name) {
    if (name == "reject") return ZeroPolicy::Reject;
    if (name == "epsilon") return ZeroPolicy::Epsilon;
    throw config_error("zero policy must be reject or epsilon, got " + name);
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw data_error("cannot create output directory " + dir + ": " + ec.message());
}

int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            size_t a = cur.find_first_not_of(" \t");
            size_t b = cur.find_last_not_of(" \t");
            if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

CsvTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + " is empty");
    t.header = csv_detail::split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = csv_detail::split_line(line);
        if (cells.size() != t.header.size())
            throw data_error(path + ": row " + std::to_string(t.rows.size() + 2) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

double cell_double(const CsvTable& t, size_t row, int col, const std::string& path) {
    try {
        return std::stod(t.rows[row][col]);
    } catch (const std::exception&) {
        throw data_error(path + ": cannot parse " + t.rows[row][col] + " in row " +
                         std::to_string(row + 2));
    }
}

void write_forecast_csv(const std::string& path, const Forecast& fc) {
    std::vector<std::vector<std::string>> rows;
    for (int h = 0; h < fc.mean.rows(); ++h)
        for (int j = 0; j < fc.mean.cols(); ++j)
            rows.push_back({std::to_string(h + 1), std::to_string(j + 1), fmt17(fc.mean(h, j)),
                            fmt17(fc.median(h, j)), fmt17(fc.lo(h, j)), fmt17(fc.hi(h, j))});
    write_table_csv(path, {"t", "component", "mean", "median", "q2.5", "q97.5"}, rows);
}

MatrixXd read_forecast_mean(const std::string& path) {
    const CsvTable t = read_table(path);
    const std::vector<std::string> want = {"t", "component", "mean", "median", "q2.5", "q97.5"};
    if (t.header != want) throw data_error(path + ": expected header t,component,mean,median,q2.5,q97.5");
    int H = 0, J = 0;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        H = std::max(H, static_cast<int>(cell_double(t, r, 0, path)));
        J = std::max(J, static_cast<int>(cell_double(t, r, 1, path)));
    }
    if (H <= 0 || J <= 0 || t.rows.size() != static_cast<size_t>(H) * J)
        throw data_error(path + ": expected a full horizon x component grid");
    MatrixXd mean(H, J);
    mean.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const int h = static_cast<int>(cell_double(t, r, 0, path)) - 1;
        const int j = static_cast<int>(cell_double(t, r, 1, path)) - 1;
        mean(h, j) = cell_double(t, r, 2, path);
    }
    if (!mean.allFinite()) throw data_error(path + ": grid has missing (t, component) cells");
    return mean;
}

// Shared by `evaluate` and `forecast --actuals` so the two emit identical
// tables for identical inputs.
void write_metrics_csv(const std::string& path, const MatrixXd& fc_mean, const MatrixXd& actual) {
    const int J = static_cast<int>(fc_mean.cols());
    ForecastErrorAccumulator acc(J);
    acc.add(fc_mean, actual);
    const VectorXd frmse = acc.frmse(), fmae = acc.fmae();
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j < J; ++j)
        rows.push_back({"component_" + std::to_string(j + 1), fmt17(frmse[j]), fmt17(fmae[j])});
    rows.push_back({"total", fmt17(acc.total_frmse()), fmt17(acc.total_fmae())});
    write_table_csv(path, {"component", "frmse", "fmae"}, rows);
}

MatrixXd head_rows(const CompositionalSeries& s, int H, const std::string& what) {
    if (s.T() < H)
        throw data_error(what + " has " + std::to_string(s.T()) + " rows, need " +
                         std::to_string(H));
    return s.values().topRows(H);
}

void write_residuals_csv(const std::string& path, Link link, int ref, const MatrixXd& fc_mean,
                         const MatrixXd& actual) {
    std::vector<std::vector<std::string>> rows;
    for (int h = 0; h < fc_mean.rows(); ++h) {
        const VectorXd pred = link_forward(link, fc_mean.row(h).transpose(), ref);
        const VectorXd obs = link_forward(link, actual.row(h).transpose(), ref);
        for (int k = 0; k < pred.size(); ++k)
            rows.push_back(
                {std::to_string(h + 1), std::to_string(k + 1), fmt17(obs[k] - pred[k])});
    }
    write_table_csv(path, {"t", "coordinate", "residual"}, rows);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------

struct CommonArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    int threads = default_threads();
};

void run_simulate(const CommonArgs& a, const std::string& engine_flag) {
    const Config cfg = Config::load(a.config);
    const ModelSpec spec = model_spec_from_config(cfg);
    spec.validate();
    const std::string engine =
        engine_flag.empty() ? cfg.get_string("engine", "darma") : engine_flag;
    const Params par = params_from_config(cfg, spec, /*require_scale=*/engine != "tvarma");
    const int T = cfg.get_int("length");
    const int burn = cfg.get_int("burn", 100);
    const std::string start = cfg.get_string("start_date", "2015-01-01");

    Rng master(a.seed);
    Rng sim_rng = master.child("simulate");
    int retries = 0;
    SimulatedSeries sim;
    if (engine == "darma") {
        sim = simulate_darma(spec, par, T, sim_rng, burn, &retries);
    } else if (engine == "tvarma") {
        const MatrixXd chol = innovation_chol_from_config(cfg, spec.K());
        sim = simulate_tvarma(spec, par, chol, T, sim_rng, burn, &retries);
    } else {
        throw config_error("engine must be darma or tvarma, got " + engine);
    }

    make_out_dir(a.out);
    write_series_csv(join(a.out, "series.csv"), sim.series, start);

    RunManifest m;
    m.command = "simulate";
    m.seed = a.seed;
    m.engine = engine;
    m.threads = a.threads;
    m.config_hash = config_hash(cfg);
    m.add_input(a.config);
    m.outputs = {"series.csv"};
    m.extra["length"] = std::to_string(T);
    m.extra["dgm_retries"] = std::to_string(retries);
    m.write(join(a.out, "manifest.json"));
}

void run_fit(const CommonArgs& a, const std::string& data, const std::string& engine_flag,
             const std::string& mask_flag, const std::string& zero_flag) {
    const Config cfg = Config::load(a.config);
    ModelSpec spec = model_spec_from_config(cfg);
    if (!mask_flag.empty()) spec.mask = mask_flag;
    spec.validate();
    const std::string policy_name =
        zero_flag.empty() ? cfg.get_string("zero_policy", "reject") : zero_flag;
    const CompositionalSeries series = read_series_csv(data, zero_policy_of(policy_name));
    const std::string engine = engine_flag.empty() ? cfg.get_string("engine", "bayes") : engine_flag;

    make_out_dir(a.out);
    Rng master(a.seed);
    std::vector<std::string> outputs;
    nlohmann::ordered_json diag;

    if (engine == "bayes") {
        const NutsOptions nuts = nuts_from_config(cfg, a.threads);
        const DarmaPosterior post(spec, series, true);
        const BayesFit fit = fit_bayes_darma(post, master.child("fit"), nuts);

        const auto names = post.layout().names();
        std::ofstream draws(join(a.out, "draws.csv"));
        if (!draws) throw data_error("cannot open draws.csv for writing");
        draws << "chain,iter,lp";
        for (const auto& n : names) draws << "," << n;
        draws << "\n";
        for (size_t c = 0; c < fit.chains.size(); ++c) {
            const ChainRun& run = fit.chains[c];
            for (int i = 0; i < run.draws.rows(); ++i) {
                draws << (c + 1) << "," << (i + 1) << "," << fmt17(run.logpost[i]);
                for (int k = 0; k < run.draws.cols(); ++k) draws << "," << fmt17(run.draws(i, k));
                draws << "\n";
            }
        }
        draws.close();

        std::vector<std::vector<std::string>> rows;
        for (const auto& p : fit.summary)
            rows.push_back({p.name, fmt17(p.mean), fmt17(p.sd), fmt17(p.median), fmt17(p.q2_5),
                            fmt17(p.q97_5), fmt17(p.rhat), fmt17(p.ess)});
        write_table_csv(join(a.out, "summary.csv"),
                        {"name", "mean", "sd", "median", "q2_5", "q97_5", "rhat", "ess"}, rows);

        diag["engine"] = engine;
        diag["chains"] = nlohmann::ordered_json::array();
        for (const auto& run : fit.chains)
            diag["chains"].push_back({{"step_size", run.step_size},
                                      {"accept_rate", run.accept_rate},
                                      {"divergences", run.divergences},
                                      {"warmup_divergences", run.warmup_divergences},
                                      {"max_depth_hits", run.max_depth_hits},
                                      {"draws", run.draws.rows()}});
        diag["warnings"] = fit.warnings;
        print_warnings(fit.warnings);
        outputs = {"draws.csv", "summary.csv", "diagnostics.json"};
    } else if (engine == "mle-darma" || engine == "tvarma") {
        const MleOptions mle = mle_from_config(cfg);
        const MleFit fit = engine == "mle-darma"
                               ? fit_mle_darma(spec, series, master.child("fit"), mle)
                               : fit_mle_tvarma(spec, series, master.child("fit"), mle);
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < fit.names.size(); ++i) {
            double se = 0.0;
            if (fit.covariance.size() > 0 && fit.covariance(i, i) > 0.0)
                se = std::sqrt(fit.covariance(i, i));
            rows.push_back({fit.names[i], fmt17(fit.theta[static_cast<Eigen::Index>(i)]),
                            fmt17(se)});
        }
        write_table_csv(join(a.out, "estimates.csv"), {"name", "estimate", "se"}, rows);
        diag["engine"] = engine;
        diag["loglik"] = fit.loglik;
        diag["converged"] = fit.converged;
        diag["attempts"] = fit.attempts;
        std::vector<std::string> warnings;
        if (!fit.converged)
            warnings.push_back("optimizer did not reach the gradient tolerance; estimates from "
                               "the best attempt are persisted");
        diag["warnings"] = warnings;
        print_warnings(warnings);
        outputs = {"estimates.csv", "diagnostics.json"};
    } else {
        throw config_error("engine must be bayes, mle-darma, or tvarma, got " + engine);
    }

    {
        std::ofstream dj(join(a.out, "diagnostics.json"));
        dj << diag.dump(2) << "\n";
    }

    Config fit_cfg = cfg;
    fit_cfg.set("engine", engine);
    fit_cfg.set("data", fs::absolute(data).string());
    fit_cfg.set("zero_policy", policy_name);
    if (!mask_flag.empty()) fit_cfg.set("model.mask", mask_flag);
    fit_cfg.save(join(a.out, "fit.cfg"));
    outputs.push_back("fit.cfg");

    RunManifest m;
    m.command = "fit";
    m.seed = a.seed;
    m.engine = engine;
    m.threads = a.threads;
    m.config_hash = config_hash(cfg);
    m.add_input(a.config);
    m.add_input(data);
    m.outputs = outputs;
    m.write(join(a.out, "manifest.json"));
}

MatrixXd load_bayes_draws(const std::string& path, const Layout& layout) {
    const CsvTable t = read_table(path);
    const auto names = layout.names();
    std::vector<int> cols;
    for (const auto& n : names) {
        const int c = t.column(n);
        if (c < 0) throw data_error(path + ": missing draw column " + n);
        cols.push_back(c);
    }
    MatrixXd draws(t.rows.size(), names.size());
    for (size_t r = 0; r < t.rows.size(); ++r)
        for (size_t k = 0; k < cols.size(); ++k)
            draws(r, k) = cell_double(t, r, cols[k], path);
    return draws;
}

VectorXd load_estimates(const std::string& path, const std::vector<std::string>& names) {
    const CsvTable t = read_table(path);
    const int name_col = t.column("name");
    const int est_col = t.column("estimate");
    if (name_col < 0 || est_col < 0) throw data_error(path + ": expected name,estimate columns");
    std::map<std::string, double> by_name;
    for (size_t r = 0; r < t.rows.size(); ++r)
        by_name[t.rows[r][name_col]] = cell_double(t, r, est_col, path);
    VectorXd theta(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        auto it = by_name.find(names[i]);
        if (it == by_name.end()) throw data_error(path + ": missing estimate for " + names[i]);
        theta[static_cast<Eigen::Index>(i)] = it->second;
    }
    return theta;
}

void run_forecast(const std::string& fit_dir, int horizon, const std::string& out,
                  std::uint64_t seed, int paths, const std::string& actuals) {
    if (horizon < 1) throw config_error("horizon must be at least 1");
    const std::string fit_cfg_path = join(fit_dir, "fit.cfg");
    const Config cfg = Config::load(fit_cfg_path);
    ModelSpec spec = model_spec_from_config(cfg);
    spec.validate();
    const std::string engine = cfg.get_string("engine");
    const std::string data = cfg.get_string("data");
    const ZeroPolicy policy = zero_policy_of(cfg.get_string("zero_policy", "reject"));
    const CompositionalSeries series = read_series_csv(data, policy);

    Rng master(seed);
    Forecast fc;
    std::vector<std::string> inputs = {fit_cfg_path, data};
    if (engine == "bayes") {
        const Layout layout = Layout::build(spec);
        const std::string draws_path = join(fit_dir, "draws.csv");
        const MatrixXd draws = load_bayes_draws(draws_path, layout);
        inputs.push_back(draws_path);
        fc = forecast_bayes_darma(spec, series, layout, draws, horizon, master.child("forecast"));
    } else if (engine == "mle-darma") {
        ModelSpec ml = spec;
        ml.prior.horseshoe = false;
        ml.prior.gamma_intercept_gamma = false;
        const std::string est_path = join(fit_dir, "estimates.csv");
        const VectorXd theta = load_estimates(est_path, Layout::build(ml).names());
        inputs.push_back(est_path);
        fc = forecast_mle_darma(spec, series, theta, horizon, paths, master.child("forecast"));
    } else if (engine == "tvarma") {
        const TvarmaLikelihood lik(spec, series);
        const std::string est_path = join(fit_dir, "estimates.csv");
        const VectorXd theta = load_estimates(est_path, lik.names());
        inputs.push_back(est_path);
        fc = forecast_mle_tvarma(spec, series, theta, horizon, paths, master.child("forecast"));
    } else {
        throw config_error("fit directory has unknown engine " + engine);
    }

    make_out_dir(out);
    write_forecast_csv(join(out, "forecast.csv"), fc);
    std::vector<std::string> outputs = {"forecast.csv"};

    if (!actuals.empty()) {
        const CompositionalSeries obs = read_series_csv(actuals, policy);
        const MatrixXd realized = head_rows(obs, horizon, actuals);
        write_metrics_csv(join(out, "metrics.csv"), fc.mean, realized);
        write_residuals_csv(join(out, "residuals.csv"), Link::Alr, spec.ref(), fc.mean, realized);
        inputs.push_back(actuals);
        outputs.push_back("metrics.csv");
        outputs.push_back("residuals.csv");
    }

    RunManifest m;
    m.command = "forecast";
    m.seed = seed;
    m.engine = engine;
    m.config_hash = config_hash(cfg);
    for (const auto& p : inputs) m.add_input(p);
    m.outputs = outputs;
    m.extra["horizon"] = std::to_string(horizon);
    m.write(join(out, "manifest.json"));
}

void run_evaluate(const std::string& forecast_path, const std::string& actuals,
                  const std::string& out) {
    const MatrixXd mean = read_forecast_mean(forecast_path);
    const CompositionalSeries obs = read_series_csv(actuals, ZeroPolicy::Epsilon);
    const MatrixXd realized = head_rows(obs, static_cast<int>(mean.rows()), actuals);
    if (realized.cols() != mean.cols())
        throw data_error("forecast has " + std::to_string(mean.cols()) + " components, actuals " +
                         std::to_string(realized.cols()));
    make_out_dir(out);
    write_metrics_csv(join(out, "metrics.csv"), mean, realized);

    RunManifest m;
    m.command = "evaluate";
    m.add_input(forecast_path);
    m.add_input(actuals);
    m.outputs = {"metrics.csv"};
    m.write(join(out, "manifest.json"));
}

void run_select(const CommonArgs& a, const std::string& data, const std::string& zero_flag) {
    const Config cfg = Config::load(a.config);
    const std::string policy_name =
        zero_flag.empty() ? cfg.get_string("zero_policy", "reject") : zero_flag;
    const CompositionalSeries series = read_series_csv(data, zero_policy_of(policy_name));

    const auto names = split_names(cfg.get_string("candidates"));
    if (names.size() < 2) throw config_error("selection needs at least 2 candidates");
    std::vector<Candidate> candidates;
    for (const auto& n : names) {
        Candidate c;
        c.name = n;
        c.spec = model_spec_from_config(cfg, "candidate." + n + ".");
        c.spec.validate();
        candidates.push_back(std::move(c));
    }
    const LfoOptions opts = lfo_from_config(cfg, a.threads);
    const auto scores = rank_by_lfo(candidates, series, Rng(a.seed).child("select"), opts);

    make_out_dir(a.out);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> step_rows;
    int rank = 1;
    for (const auto& s : scores) {
        if (s.failed) {
            rows.push_back({"-", s.name, "", "", "", "", "failed"});
            continue;
        }
        rows.push_back({std::to_string(rank++), s.name, fmt17(s.lfo.elpd), fmt17(s.elpd_diff),
                        fmt17(s.elpd_diff_se), std::to_string(s.lfo.refits), "ok"});
        for (int i = 0; i < s.lfo.per_step.size(); ++i) {
            const int t = s.lfo.step_times[i];
            const bool refit =
                std::find(s.lfo.refit_times.begin(), s.lfo.refit_times.end(), t) !=
                s.lfo.refit_times.end();
            step_rows.push_back({s.name, std::to_string(t), fmt17(s.lfo.per_step[i]),
                                 fmt17(s.lfo.khat[i]), refit ? "1" : "0"});
        }
        std::cout << s.name << ": elpd " << s.lfo.elpd << ", refits " << s.lfo.refits << "\n";
    }
    for (const auto& s : scores)
        if (s.failed) std::cout << s.name << ": failed (" << s.error << ")\n";
    write_table_csv(join(a.out, "selection.csv"),
                    {"rank", "name", "elpd", "elpd_diff", "elpd_diff_se", "refits", "status"},
                    rows);
    write_table_csv(join(a.out, "steps.csv"), {"name", "t", "elpd_step", "khat", "refit"},
                    step_rows);

    RunManifest m;
    m.command = "select";
    m.seed = a.seed;
    m.threads = a.threads;
    m.config_hash = config_hash(cfg);
    m.add_input(a.config);
    m.add_input(data);
    m.outputs = {"selection.csv", "steps.csv"};
    m.write(join(a.out, "manifest.json"));
}

void write_study_tables(const std::string& out, const SimulationStudyResult& res) {
    std::vector<std::vector<std::string>> rec_rows;
    std::vector<std::vector<std::string>> fc_rows;
    std::vector<std::vector<std::string>> count_rows;
    for (const ModelStudyMetrics* m : res.models()) {
        for (const auto& c : m->coefficients)
            rec_rows.push_back({m->model, c.name, fmt17(c.truth), fmt17(c.bias), fmt17(c.rmse),
                                fmt17(c.interval_length), fmt17(c.coverage)});
        for (int j = 0; j < m->frmse.size(); ++j)
            fc_rows.push_back({m->model, "component_" + std::to_string(j + 1),
                               fmt17(m->frmse[j]), fmt17(m->fmae[j])});
        fc_rows.push_back({m->model, "total", fmt17(m->total_frmse), fmt17(m->total_fmae)});
        count_rows.push_back({m->model, std::to_string(m->failures),
                              std::to_string(m->fit_retries)});
    }
    write_table_csv(join(out, "recovery.csv"),
                    {"model", "coefficient", "truth", "bias", "rmse", "interval_length",
                     "coverage"},
                    rec_rows);
    write_table_csv(join(out, "forecast_metrics.csv"), {"model", "component", "frmse", "fmae"},
                    fc_rows);
    write_table_csv(join(out, "counts.csv"), {"model", "failures", "fit_retries"}, count_rows);
}

void run_replicate_study(const CommonArgs& a) {
    const Config cfg = Config::load(a.config);
    const std::string which = cfg.get_string("study", "study1");
    Rng master(a.seed);
    make_out_dir(a.out);

    RunManifest m;
    m.command = "replicate-study";
    m.seed = a.seed;
    m.threads = a.threads;
    m.config_hash = config_hash(cfg);
    m.add_input(a.config);
    m.extra["study"] = which;

    if (which == "benchmark") {
        const BenchmarkOptions opts = benchmark_options_from_config(cfg, a.threads);
        const BenchmarkResult res = run_benchmark(master.child("benchmark"), opts);

        std::vector<std::string> header = {"replicate"};
        for (const auto& name : res.models) header.push_back(name);
        std::vector<std::vector<std::string>> frmse_rows, fmae_rows;
        for (int r = 0; r < res.total_frmse.rows(); ++r) {
            std::vector<std::string> row1 = {std::to_string(r + 1)}, row2 = row1;
            for (int v = 0; v < res.total_frmse.cols(); ++v) {
                row1.push_back(fmt17(res.total_frmse(r, v)));
                row2.push_back(fmt17(res.total_fmae(r, v)));
            }
            frmse_rows.push_back(row1);
            fmae_rows.push_back(row2);
        }
        write_table_csv(join(a.out, "benchmark_frmse.csv"), header, frmse_rows);
        write_table_csv(join(a.out, "benchmark_fmae.csv"), header, fmae_rows);

        std::vector<std::vector<std::string>> pooled_rows, param_rows;
        for (size_t v = 0; v < res.models.size(); ++v) {
            std::vector<std::string> row = {res.models[v]};
            for (int j = 0; j < res.pooled_frmse.cols(); ++j)
                row.push_back(fmt17(res.pooled_frmse(static_cast<int>(v), j)));
            pooled_rows.push_back(row);
            param_rows.push_back({res.models[v], std::to_string(res.free_a_entries[v])});
        }
        std::vector<std::string> pooled_header = {"model"};
        for (int j = 0; j < res.pooled_frmse.cols(); ++j)
            pooled_header.push_back("component_" + std::to_string(j + 1));
        write_table_csv(join(a.out, "pooled_frmse.csv"), pooled_header, pooled_rows);
        write_table_csv(join(a.out, "free_params.csv"), {"model", "free_a_entries"}, param_rows);
        m.outputs = {"benchmark_frmse.csv", "benchmark_fmae.csv", "pooled_frmse.csv",
                     "free_params.csv"};
    } else {
        const SimulationStudyOptions opts = study_options_from_config(cfg, a.threads);
        const SimulationStudyResult res = run_simulation_study(master.child(which), opts);
        write_study_tables(a.out, res);
        m.outputs = {"recovery.csv", "forecast_metrics.csv", "counts.csv"};
        m.extra["dgm_retries"] = std::to_string(res.dgm_retries);
    }
    m.write(join(a.out, "manifest.json"));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet ARMA modeling of compositional time series"};
    app.require_subcommand(1);

    CommonArgs sim_args, fit_args, sel_args, study_args;
    std::string sim_engine;
    std::string fit_data, fit_engine, fit_mask, fit_zero;
    std::string fc_fit_dir, fc_out, fc_actuals;
    std::uint64_t fc_seed = 1;
    int fc_horizon = 0, fc_paths = 1000;
    std::string sel_data, sel_zero;
    std::string ev_forecast, ev_actuals, ev_out;

    auto* sim = app.add_subcommand("simulate", "draw a synthetic series from a configured model");
    sim->add_option("--config", sim_args.config, "model + generating values")->required();
    sim->add_option("--out", sim_args.out, "output directory")->required();
    sim->add_option("--seed", sim_args.seed, "rng seed");
    sim->add_option("--engine", sim_engine, "darma or tvarma");
    sim->add_option("--threads", sim_args.threads, "worker threads");

    auto* fit = app.add_subcommand("fit", "fit a model to a series");
    fit->add_option("--data", fit_data, "series CSV")->required();
    fit->add_option("--config", fit_args.config, "model config")->required();
    fit->add_option("--out", fit_args.out, "output directory")->required();
    fit->add_option("--engine", fit_engine, "bayes, mle-darma, or tvarma");
    fit->add_option("--seed", fit_args.seed, "rng seed");
    fit->add_option("--mask", fit_mask, "full, diagonal, or nearest_neighbor");
    fit->add_option("--threads", fit_args.threads, "worker threads");
    fit->add_option("--zero-policy", fit_zero, "reject or epsilon");

    auto* fc = app.add_subcommand("forecast", "forecast from a saved fit");
    fc->add_option("--fit", fc_fit_dir, "fit output directory")->required();
    fc->add_option("--horizon", fc_horizon, "steps ahead")->required();
    fc->add_option("--out", fc_out, "output directory")->required();
    fc->add_option("--seed", fc_seed, "rng seed");
    fc->add_option("--paths", fc_paths, "paths for point-estimate forecasts");
    fc->add_option("--actuals", fc_actuals, "realized series CSV for error tables");

    auto* sel = app.add_subcommand("select", "rank candidate models by forward predictive fit");
    sel->add_option("--data", sel_data, "series CSV")->required();
    sel->add_option("--config", sel_args.config, "candidates config")->required();
    sel->add_option("--out", sel_args.out, "output directory")->required();
    sel->add_option("--seed", sel_args.seed, "rng seed");
    sel->add_option("--threads", sel_args.threads, "worker threads");
    sel->add_option("--zero-policy", sel_zero, "reject or epsilon");

    auto* ev = app.add_subcommand("evaluate", "score a forecast against realized data");
    ev->add_option("--forecast", ev_forecast, "forecast CSV")->required();
    ev->add_option("--actuals", ev_actuals, "realized series CSV")->required();
    ev->add_option("--out", ev_out, "output directory")->required();

    auto* study = app.add_subcommand("replicate-study", "run a replicated recovery/forecast study");
    study->add_option("--config", study_args.config, "study config")->required();
    study->add_option("--out", study_args.out, "output directory")->required();
    study->add_option("--seed", study_args.seed, "rng seed");
    study->add_option("--threads", study_args.threads, "worker threads");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) run_simulate(sim_args, sim_engine);
        if (fit->parsed()) run_fit(fit_args, fit_data, fit_engine, fit_mask, fit_zero);
        if (fc->parsed()) run_forecast(fc_fit_dir, fc_horizon, fc_out, fc_seed, fc_paths,
                                       fc_actuals);
        if (sel->parsed()) run_select(sel_args, sel_data, sel_zero);
        if (ev->parsed()) run_evaluate(ev_forecast, ev_actuals, ev_out);
        if (study->parsed()) run_replicate_study(study_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
