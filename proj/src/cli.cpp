#include "scalespec/cli.hpp"

#include "scalespec/bench.hpp"
#include "scalespec/fit.hpp"
#include "scalespec/mle.hpp"
#include "scalespec/rolling.hpp"
#include "scalespec/series.hpp"
#include "scalespec/spectrum.hpp"
#include "scalespec/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace scalespec::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string input_b;
    std::string date_column = "date";
    std::string value_column = "price";
    std::string input_kind = "price";
    std::string window = "full";  // "full" or integer M
    Index center = 0;             // 0: middle of the series
    Index j_first = 1;
    Index j_last = 0;             // 0: floor(M~/2)
    std::string mode = "robust";
    double h0 = 0.5;
    double steps_per_year = kDefaultStepsPerYear;
    std::uint64_t seed = 1;
    Index replicas = 200;
    std::string format = "csv";
    std::string output;

    // synth
    std::string kind = "fbm";
    double hurst = 0.5;
    std::optional<double> hurst_end;
    std::string profile = "ramp";
    double sigma = 1.0;
    std::optional<double> sigma_end;
    Index n = 4096;
    double noise = 0.0;
    Index frequencies = Index(1) << 16;
    double cutoff = 0.0;

    // variogram
    std::string column = "misfit";
    Index max_lag = 50;

    // bench
    std::vector<double> hurst_grid{0.8};
    bool no_full_covariance = false;
    std::string residual_output;

    ordered_json to_json() const {
        ordered_json j;
        j["subcommand"] = subcommand;
        if (subcommand == "synth") {
            j["kind"] = kind;
            j["H"] = hurst;
            if (hurst_end) j["H_end"] = *hurst_end;
            j["profile"] = profile;
            j["sigma"] = sigma;
            if (sigma_end) j["sigma_end"] = *sigma_end;
            j["n"] = n;
            j["seed"] = seed;
            j["noise"] = noise;
            if (kind == "mbm") {
                j["frequencies"] = frequencies;
                j["cutoff"] = cutoff;
            }
            return j;
        }
        if (subcommand == "bench-estimators") {
            j["H"] = hurst_grid;
            j["noise"] = noise;
            j["n"] = n;
            j["replicas"] = replicas;
            j["seed"] = seed;
            j["sigma"] = sigma;
            j["j_first"] = j_first;
            j["j_last"] = j_last;
            j["full_covariance"] = !no_full_covariance;
            return j;
        }
        j["input"] = input;
        if (!input_b.empty()) j["input_b"] = input_b;
        j["date_column"] = date_column;
        j["value_column"] = value_column;
        j["input_kind"] = input_kind;
        if (subcommand == "variogram") {
            j["column"] = column;
            j["max_lag"] = max_lag;
            return j;
        }
        j["M"] = window;
        j["n0"] = center;
        j["j_first"] = j_first;
        j["j_last"] = j_last;
        j["mode"] = mode;
        j["H0"] = h0;
        j["steps_per_year"] = steps_per_year;
        return j;
    }
};

std::string num(double value) {
    if (std::isnan(value)) {
        return "";
    }
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

ordered_json jnum(double value) {
    if (!std::isfinite(value)) {
        return nullptr;
    }
    return value;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read input file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
            return std::filesystem::path(dir) / p;
        }
    }
    return p;
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty()) {
        out << text;
        return;
    }
    const auto path = resolve_output(cfg.output);
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot write output file '" + path.string() + "'");
    }
    file << text;
}

std::string envelope(const RunConfig& cfg, ordered_json result) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = cfg.to_json();
    doc["result"] = std::move(result);
    return doc.dump(2) + "\n";
}

SeriesKind parse_kind(const std::string& kind) {
    if (kind == "price") return SeriesKind::price;
    if (kind == "log_price") return SeriesKind::log_price;
    throw UsageError("input kind must be 'price' or 'log_price'");
}

SampledSeries load(const std::string& path, const RunConfig& cfg) {
    ColumnConfig columns;
    columns.date_column = cfg.date_column;
    columns.value_column = cfg.value_column;
    columns.kind = parse_kind(cfg.input_kind);
    try {
        return ingest_csv(read_file(path), columns).series;
    } catch (const DataError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

SampledSeries load_log_prices(const std::string& path, const RunConfig& cfg) {
    auto series = load(path, cfg);
    if (series.size() < 2) {
        throw UsageError(path + ": need at least 2 observations");
    }
    if (series.kind() == SeriesKind::price) {
        return log_transform(series);
    }
    return series;
}

Index resolve_window(const RunConfig& cfg, Index N) {
    if (cfg.window == "full") {
        return N;
    }
    Index M = 0;
    auto [ptr, ec] = std::from_chars(cfg.window.data(), cfg.window.data() + cfg.window.size(), M);
    if (ec != std::errc{} || ptr != cfg.window.data() + cfg.window.size()) {
        throw UsageError("--M must be 'full' or an integer");
    }
    if (M < 4 || M > N) {
        throw UsageError("--M must lie in [4, " + std::to_string(N) + "]");
    }
    return M;
}

struct ResolvedWindow {
    AnalysisWindow window;
    Index j_first = 1;
    Index j_last = 1;
};

ResolvedWindow resolve_analysis(const SampledSeries& log_prices, const RunConfig& cfg) {
    const Index N = log_prices.size();
    const Index M = resolve_window(cfg, N);
    const Index n0 = cfg.center > 0 ? cfg.center : std::max<Index>(1, N / 2);
    if (n0 > N) {
        throw UsageError("--n0 must lie in [1, " + std::to_string(N) + "]");
    }
    ResolvedWindow r;
    r.window = window_slice(log_prices, n0, M);
    const Index limit = r.window.effective() / 2;
    r.j_first = cfg.j_first;
    r.j_last = cfg.j_last > 0 ? cfg.j_last : limit;
    if (r.j_first < 1 || r.j_last <= r.j_first || r.j_last > limit) {
        throw UsageError("scale range must satisfy 1 <= ji < je <= " + std::to_string(limit));
    }
    return r;
}

std::string index_label(const SampledSeries& series, Index position) {
    if (series.dates()) {
        return format_iso_date((*series.dates())[static_cast<std::size_t>(position)]);
    }
    return std::to_string(series.start_index() + position);
}

std::string fit_csv_header() { return "H,sigma_step,sigma_annual,c,p,misfit,branch\n"; }

std::string fit_csv_row(const PowerLawFit& fit, double steps_per_year) {
    return num(fit.h_hat) + "," + num(fit.sigma_step) + "," +
           num(annualize(fit.sigma_step, fit.h_hat, steps_per_year)) + "," + num(fit.c_hat) + "," +
           num(fit.p_hat) + "," + num(fit.misfit) + "," + std::string(to_string(fit.branch)) + "\n";
}

ordered_json fit_json(const PowerLawFit& fit, double steps_per_year) {
    ordered_json j;
    j["H"] = jnum(fit.h_hat);
    j["sigma_step"] = jnum(fit.sigma_step);
    j["sigma_annual"] = jnum(annualize(fit.sigma_step, fit.h_hat, steps_per_year));
    j["c"] = jnum(fit.c_hat);
    j["p"] = jnum(fit.p_hat);
    j["misfit"] = jnum(fit.misfit);
    j["branch"] = to_string(fit.branch);
    j["j_first"] = fit.j_first;
    j["j_last"] = fit.j_last;
    // Endpoints of the fitted line in (scale_in_steps, S) coordinates.
    ordered_json line = ordered_json::array();
    for (Index j_scale : {fit.j_first, fit.j_last}) {
        const double scale = 2.0 * static_cast<double>(j_scale);
        line.push_back({{"scale_in_steps", scale}, {"S", jnum(std::exp2(fit.c_hat + fit.p_hat * std::log2(scale)))}});
    }
    j["line"] = line;
    return j;
}

// --- subcommands -----------------------------------------------------------

std::string cmd_synth(const RunConfig& cfg) {
    if (cfg.n < 2) throw UsageError("--n must be at least 2");
    if (cfg.noise < 0.0) throw UsageError("--noise must be non-negative");
    GaussianProcessSpec spec;
    spec.n = cfg.n;
    spec.seed = cfg.seed;
    auto path_of = [&](double start, std::optional<double> end) {
        VectorXd p(cfg.n);
        const double stop = end.value_or(start);
        for (Index t = 0; t < cfg.n; ++t) {
            const double frac = cfg.n > 1 ? static_cast<double>(t) / static_cast<double>(cfg.n - 1) : 0.0;
            p[t] = cfg.profile == "step" ? (t < cfg.n / 2 ? start : stop) : start + (stop - start) * frac;
        }
        return p;
    };
    spec.h_path = path_of(cfg.hurst, cfg.hurst_end);
    spec.sigma_path = path_of(cfg.sigma, cfg.sigma_end);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    SampledSeries path = [&] {
        if (cfg.kind == "fbm") {
            if (!spec.is_constant()) throw UsageError("fbm requires constant H and sigma");
            if (cfg.sigma <= 0.0) throw UsageError("--sigma must be positive");
            return synth_fbm(spec);
        }
        MbmGrid grid;
        grid.frequencies = cfg.frequencies;
        grid.cutoff = cfg.cutoff;
        if (grid.frequencies < 4 * cfg.n) throw UsageError("--K must be at least 4n");
        return synth_mbm(spec, grid);
    }();
    if (cfg.noise > 0.0) {
        path = add_white_noise(path, cfg.noise, derive_seed(cfg.seed, 0x6e6f697365ULL));
    }
    if (cfg.format == "json") {
        ordered_json values = ordered_json::array();
        for (Index i = 0; i < path.size(); ++i) values.push_back(path.values()[i]);
        return envelope(cfg, {{"values", values}});
    }
    return serialize_csv(path, "value");
}

std::string cmd_returns(const RunConfig& cfg) {
    RunConfig local = cfg;
    local.input_kind = "price";
    const auto prices = load(cfg.input, local);
    if (prices.size() < 2) throw UsageError("need at least 2 prices");
    const auto r = returns(prices);
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (Index i = 0; i < r.size(); ++i) {
            rows.push_back({{"t", index_label(r, i)}, {"return", r.values()[i]}});
        }
        return envelope(cfg, {{"returns", rows}});
    }
    return serialize_csv(r, "return");
}

std::string cmd_spectrum(const RunConfig& cfg) {
    const auto q = load_log_prices(cfg.input, cfg);
    const auto rw = resolve_analysis(q, cfg);
    const auto spectrum = scale_spectrum(rw.window, rw.j_first, rw.j_last);
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (Index k = 0; k < spectrum.size(); ++k) {
            rows.push_back({{"scale_in_steps", 2 * (spectrum.j_first + k)},
                            {"S", spectrum.s[k]},
                            {"N", spectrum.counts[static_cast<std::size_t>(k)]}});
        }
        ordered_json result;
        result["effective_window"] = spectrum.effective_window;
        result["n0"] = spectrum.center;
        result["spectrum"] = rows;
        try {
            result["robust_fit"] = fit_json(robust_fit(spectrum), cfg.steps_per_year);
        } catch (const ComputationError&) {
            result["robust_fit"] = nullptr;
        }
        return envelope(cfg, result);
    }
    std::string text = "scale_in_steps,S,N\n";
    for (Index k = 0; k < spectrum.size(); ++k) {
        text += std::to_string(2 * (spectrum.j_first + k)) + "," + num(spectrum.s[k]) + "," +
                std::to_string(spectrum.counts[static_cast<std::size_t>(k)]) + "\n";
    }
    return text;
}

PowerLawFit fit_by_mode(const ScaleSpectrum& spectrum, const RunConfig& cfg) {
    if (cfg.mode == "robust") return robust_fit(spectrum);
    if (cfg.mode == "linear") return gls_fit(spectrum, 1);
    if (cfg.mode == "cubic") return gls_fit(spectrum, 3);
    if (cfg.mode == "fixed") return fixed_h_fit(spectrum, cfg.h0);
    throw UsageError("--mode must be robust, linear, cubic or fixed");
}

std::string emit_fit(const RunConfig& cfg, const PowerLawFit& fit, const AnalysisWindow& w) {
    if (cfg.format == "json") {
        auto result = fit_json(fit, cfg.steps_per_year);
        result["effective_window"] = w.effective();
        result["n0"] = w.center;
        return envelope(cfg, result);
    }
    return fit_csv_header() + fit_csv_row(fit, cfg.steps_per_year);
}

std::string cmd_fit(const RunConfig& cfg) {
    const auto q = load_log_prices(cfg.input, cfg);
    const auto rw = resolve_analysis(q, cfg);
    const auto spectrum = scale_spectrum(rw.window, rw.j_first, rw.j_last);
    return emit_fit(cfg, fit_by_mode(spectrum, cfg), rw.window);
}

std::string cmd_ml_fit(const RunConfig& cfg) {
    const auto q = load_log_prices(cfg.input, cfg);
    const auto rw = resolve_analysis(q, cfg);
    if (rw.window.effective() < 16) throw UsageError("ML fit needs a window of at least 16 samples");
    const auto ml = ml_fit(rw.window.q);
    auto fit = line_from_parameters(ml.h_hat, ml.sigma_step, rw.j_first, rw.j_last, FitBranch::ml);
    const auto spectrum = scale_spectrum(rw.window, rw.j_first, rw.j_last);
    fit.misfit = spectral_misfit(spectrum, fit);
    return emit_fit(cfg, fit, rw.window);
}

std::string cmd_roll(const RunConfig& cfg) {
    const auto q = load_log_prices(cfg.input, cfg);
    RollingConfig rc;
    if (cfg.window == "full") throw UsageError("roll requires an integer --M");
    rc.window = resolve_window(cfg, q.size());
    rc.j_first = cfg.j_first;
    if (cfg.j_last > 0) rc.j_last = cfg.j_last;
    if (cfg.mode == "robust") {
        rc.mode = TrackMode::robust;
    } else if (cfg.mode == "fixed") {
        rc.mode = TrackMode::fixed_h;
    } else {
        throw UsageError("roll --mode must be robust or fixed");
    }
    rc.h0 = cfg.h0;
    rc.steps_per_year = cfg.steps_per_year;
    try {
        rc.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto track = rolling_estimates(q, rc);
    const std::string label = q.dates() ? "date" : "index";
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (Index k = 0; k < track.size(); ++k) {
            const bool missing = track.missing[static_cast<std::size_t>(k)];
            rows.push_back({{label, index_label(q, k)},
                            {"H", jnum(track.h[k])},
                            {"sigma_annual", jnum(track.sigma_annual[k])},
                            {"misfit", jnum(track.misfit[k])},
                            {"flag", missing ? "missing" : "ok"}});
        }
        return envelope(cfg, {{"track", rows}});
    }
    std::string text = label + ",H,sigma_annual,misfit,flag\n";
    for (Index k = 0; k < track.size(); ++k) {
        const bool missing = track.missing[static_cast<std::size_t>(k)];
        text += index_label(q, k) + "," + num(track.h[k]) + "," + num(track.sigma_annual[k]) + "," +
                num(track.misfit[k]) + "," + (missing ? "missing" : "ok") + "\n";
    }
    return text;
}

// Inner join on dates when both inputs carry them; otherwise lengths must match.
std::pair<VectorXd, VectorXd> align(const SampledSeries& a, const SampledSeries& b) {
    if (a.dates() && b.dates()) {
        std::vector<double> va, vb;
        const auto& da = *a.dates();
        const auto& db = *b.dates();
        std::size_t i = 0, j = 0;
        while (i < da.size() && j < db.size()) {
            if (da[i] < db[j]) {
                ++i;
            } else if (db[j] < da[i]) {
                ++j;
            } else {
                va.push_back(a.values()[static_cast<Index>(i++)]);
                vb.push_back(b.values()[static_cast<Index>(j++)]);
            }
        }
        const auto n = static_cast<Index>(va.size());
        return {Eigen::Map<VectorXd>(va.data(), n), Eigen::Map<VectorXd>(vb.data(), n)};
    }
    if (a.size() != b.size()) {
        throw UsageError("inputs differ in length and carry no dates to align on");
    }
    return {a.values(), b.values()};
}

std::string cmd_xcorr(const RunConfig& cfg) {
    if (cfg.input_b.empty()) throw UsageError("xcorr requires --input-b");
    const auto a = load_log_prices(cfg.input, cfg);
    const auto b = load_log_prices(cfg.input_b, cfg);
    auto [va, vb] = align(a, b);
    if (va.size() < 4) throw UsageError("fewer than 4 aligned observations");
    const SampledSeries sa(va, SeriesKind::log_price);
    const SampledSeries sb(vb, SeriesKind::log_price);
    const auto rw = resolve_analysis(sa, cfg);
    const auto wb = window_slice(sb, rw.window.center, rw.window.nominal);
    const auto cross = cross_scale_correlation(rw.window, wb, rw.j_first, rw.j_last);
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (std::size_t k = 0; k < cross.rho.size(); ++k) {
            const auto& rho = cross.rho[k];
            rows.push_back({{"scale_in_steps", 2 * (cross.j_first + static_cast<Index>(k))},
                            {"rho", rho ? ordered_json(*rho) : ordered_json(nullptr)}});
        }
        return envelope(cfg, {{"aligned_length", va.size()}, {"correlation", rows}});
    }
    std::string text = "scale_in_steps,rho\n";
    for (std::size_t k = 0; k < cross.rho.size(); ++k) {
        const auto& rho = cross.rho[k];
        text += std::to_string(2 * (cross.j_first + static_cast<Index>(k))) + "," + (rho ? num(*rho) : "") + "\n";
    }
    return text;
}

std::string cmd_variogram(const RunConfig& cfg) {
    std::vector<double> z;
    try {
        z = read_csv_column(read_file(cfg.input), cfg.column);
    } catch (const DataError& e) {
        throw UsageError(cfg.input + ": " + e.what());
    }
    if (cfg.max_lag < 1 || cfg.max_lag >= static_cast<Index>(z.size())) {
        throw UsageError("--max-lag must lie in [1, " + std::to_string(z.size()) + ")");
    }
    const auto v = variogram(std::span<const double>(z), cfg.max_lag);
    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (std::size_t k = 0; k < v.lags.size(); ++k) {
            rows.push_back({{"lag", v.lags[k]},
                            {"gamma", jnum(v.gamma[static_cast<Index>(k)])},
                            {"pairs", v.pairs[k]}});
        }
        return envelope(cfg, {{"variogram", rows}});
    }
    std::string text = "lag,gamma,pairs\n";
    for (std::size_t k = 0; k < v.lags.size(); ++k) {
        text += std::to_string(v.lags[k]) + "," + num(v.gamma[static_cast<Index>(k)]) + "," +
                std::to_string(v.pairs[k]) + "\n";
    }
    return text;
}

std::string cmd_bench(RunConfig& cfg) {
    BenchConfig bc;
    bc.hurst = cfg.hurst_grid;
    bc.noise = cfg.noise;
    bc.n = cfg.n;
    bc.replicas = cfg.replicas;
    bc.seed = cfg.seed;
    bc.sigma = cfg.sigma;
    bc.j_first = cfg.j_first;
    if (cfg.j_last > 0) bc.j_last = cfg.j_last;
    bc.full_covariance = !cfg.no_full_covariance;
    try {
        bc.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    cfg.j_last = bc.j_last.value_or(bc.n / 2);
    const auto result = bench_estimators(bc);

    std::string residuals = "H,noise,scale_in_steps,ratio\n";
    for (const auto& rr : result.residual_ratios) {
        residuals += num(rr.hurst) + "," + num(rr.noise) + "," + std::to_string(rr.scale_in_steps) + "," +
                     num(rr.ratio) + "\n";
    }
    if (!cfg.residual_output.empty()) {
        const auto path = resolve_output(cfg.residual_output);
        std::ofstream file(path, std::ios::binary);
        if (!file) throw UsageError("cannot write residual file '" + path.string() + "'");
        file << residuals;
    }

    if (cfg.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& r : result.rows) {
            rows.push_back({{"H", r.hurst},
                            {"noise", r.noise},
                            {"estimator", r.estimator},
                            {"replicas", r.replicas},
                            {"mean_H", jnum(r.mean_h)},
                            {"std_H", jnum(r.std_h)},
                            {"bias", jnum(r.bias)}});
        }
        ordered_json ratios = ordered_json::array();
        for (const auto& rr : result.residual_ratios) {
            ratios.push_back({{"H", rr.hurst},
                              {"noise", rr.noise},
                              {"scale_in_steps", rr.scale_in_steps},
                              {"ratio", jnum(rr.ratio)}});
        }
        return envelope(cfg, {{"estimators", rows}, {"residual_ratios", ratios}});
    }
    std::string text = "H,noise,estimator,replicas,mean_H,std_H,bias\n";
    for (const auto& r : result.rows) {
        text += num(r.hurst) + "," + num(r.noise) + "," + r.estimator + "," + std::to_string(r.replicas) + "," +
                num(r.mean_h) + "," + num(r.std_h) + "," + num(r.bias) + "\n";
    }
    return text;
}

void add_input_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--input", cfg.input, "CSV file")->required();
    sub->add_option("--date-col", cfg.date_column, "Date column name (empty: none)");
    sub->add_option("--value-col", cfg.value_column, "Value column name");
    sub->add_option("--input-kind", cfg.input_kind, "price or log_price")
        ->check(CLI::IsMember({"price", "log_price"}));
}

void add_window_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--M", cfg.window, "Window length, or 'full' for the whole series");
    sub->add_option("--n0", cfg.center, "1-based center index (default: middle)");
    sub->add_option("--ji", cfg.j_first, "First scale index")->check(CLI::PositiveNumber);
    sub->add_option("--je", cfg.j_last, "Last scale index (default: floor(M/2))");
}

void add_fit_options(CLI::App* sub, RunConfig& cfg, bool with_mode) {
    if (with_mode) {
        sub->add_option("--mode", cfg.mode, "robust, linear, cubic or fixed");
        sub->add_option("--H0", cfg.h0, "Imposed Hurst exponent for fixed mode")->check(CLI::Range(0.0, 1.0));
    }
    sub->add_option("--steps-per-year", cfg.steps_per_year, "Observations per year")->check(CLI::Range(1.0, 1e9));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Local power-law (Hurst exponent and volatility) analysis of time series", "scalespec"};
    app.require_subcommand(1);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", cfg.output, "Output path (default: stdout)");

    auto* synth = app.add_subcommand("synth", "Generate fBm or mBm paths");
    synth->add_option("--kind", cfg.kind, "fbm or mbm")->check(CLI::IsMember({"fbm", "mbm"}));
    synth->add_option("--H", cfg.hurst, "Hurst exponent (start of path for mbm)");
    synth->add_option("--H-end", cfg.hurst_end, "Final Hurst exponent (mbm)");
    synth->add_option("--sigma", cfg.sigma, "Volatility per step (start of path for mbm)");
    synth->add_option("--sigma-end", cfg.sigma_end, "Final volatility (mbm)");
    synth->add_option("--profile", cfg.profile, "ramp or step between start and end values")
        ->check(CLI::IsMember({"ramp", "step"}));
    synth->add_option("--n", cfg.n, "Number of samples");
    synth->add_option("--seed", cfg.seed, "Random seed");
    synth->add_option("--noise", cfg.noise, "Additive white-noise standard deviation");
    synth->add_option("--K", cfg.frequencies, "Frequency grid size (mbm)");
    synth->add_option("--cutoff", cfg.cutoff, "Frequency cutoff (mbm, default pi*n)");

    auto* ret = app.add_subcommand("returns", "Relative price changes");
    add_input_options(ret, cfg);

    auto* spec = app.add_subcommand("spectrum", "Haar scale spectrum of one window");
    add_input_options(spec, cfg);
    add_window_options(spec, cfg);
    add_fit_options(spec, cfg, false);

    auto* fit = app.add_subcommand("fit", "Power-law fit of one window");
    add_input_options(fit, cfg);
    add_window_options(fit, cfg);
    add_fit_options(fit, cfg, true);

    auto* ml = app.add_subcommand("ml-fit", "Gaussian maximum-likelihood fit of one window");
    add_input_options(ml, cfg);
    add_window_options(ml, cfg);
    add_fit_options(ml, cfg, false);

    auto* roll = app.add_subcommand("roll", "Rolling-window parameter tracks");
    add_input_options(roll, cfg);
    roll->add_option("--M", cfg.window, "Window length");
    roll->add_option("--ji", cfg.j_first, "First scale index")->check(CLI::PositiveNumber);
    roll->add_option("--je", cfg.j_last, "Last scale index (default: floor(M/2))");
    add_fit_options(roll, cfg, true);

    auto* xcorr = app.add_subcommand("xcorr", "Scale-based correlation of two series");
    add_input_options(xcorr, cfg);
    xcorr->add_option("--input-b", cfg.input_b, "Second CSV file")->required();
    add_window_options(xcorr, cfg);

    auto* vario = app.add_subcommand("variogram", "Variogram of one column");
    vario->add_option("--input", cfg.input, "CSV file")->required();
    vario->add_option("--column", cfg.column, "Column name");
    vario->add_option("--max-lag", cfg.max_lag, "Largest lag");

    auto* bench = app.add_subcommand("bench-estimators", "Monte Carlo comparison of Hurst estimators");
    bench->add_option("--H", cfg.hurst_grid, "Hurst values (comma separated)")->delimiter(',');
    bench->add_option("--noise", cfg.noise, "Noise std relative to the increment std");
    bench->add_option("--replicas", cfg.replicas, "Replicas per setting");
    bench->add_option("--n", cfg.n, "Samples per replica");
    bench->add_option("--seed", cfg.seed, "Random seed");
    bench->add_option("--sigma", cfg.sigma, "Volatility per step");
    bench->add_option("--ji", cfg.j_first, "First scale index")->check(CLI::PositiveNumber);
    bench->add_option("--je", cfg.j_last, "Last scale index (default: n/2)");
    bench->add_flag("--no-full-cov", cfg.no_full_covariance, "Skip the full-covariance estimator");
    bench->add_option("--residuals", cfg.residual_output, "CSV path for per-scale residual ratios");

    // Subcommands accept the global flags after their name too.
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    const auto* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (cfg.subcommand == "roll" && chosen->get_option("--M")->count() == 0) {
        cfg.window = "256";
    }

    try {
        std::string text;
        if (cfg.subcommand == "synth") text = cmd_synth(cfg);
        else if (cfg.subcommand == "returns") text = cmd_returns(cfg);
        else if (cfg.subcommand == "spectrum") text = cmd_spectrum(cfg);
        else if (cfg.subcommand == "fit") text = cmd_fit(cfg);
        else if (cfg.subcommand == "ml-fit") text = cmd_ml_fit(cfg);
        else if (cfg.subcommand == "roll") text = cmd_roll(cfg);
        else if (cfg.subcommand == "xcorr") text = cmd_xcorr(cfg);
        else if (cfg.subcommand == "variogram") text = cmd_variogram(cfg);
        else text = cmd_bench(cfg);
        write_output(cfg, text, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace scalespec::cli
