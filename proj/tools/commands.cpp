#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "isocorr/allocator.hpp"
#include "isocorr/corr_stats.hpp"
#include "isocorr/cross_section.hpp"
#include "isocorr/error.hpp"
#include "isocorr/experiment.hpp"
#include "isocorr/format.hpp"
#include "isocorr/iso_algebra.hpp"
#include "isocorr/market_data.hpp"
#include "isocorr/synthetic.hpp"

namespace isocorr::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kToolName = "isocorr";
constexpr const char* kToolVersion = "1.0.0";
constexpr std::uint64_t kDefaultSeed = 20241001;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

/// Collects the files written by one command and emits the run manifest.
class RunDirectory {
public:
    RunDirectory(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw IoError("cannot create output directory '" + dir_.string() + "'");
        }
    }

    json& config() { return config_; }

    void add_input(const fs::path& path) {
        inputs_.push_back(json{{"path", path.string()}, {"sha256", sha256_file(path)}});
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot write '" + path.string() + "'");
        }
        f << content;
        if (!f) {
            throw IoError("write failed for '" + path.string() + "'");
        }
        outputs_.push_back(name);
    }

    void write_json(const std::string& name, const json& value) { write(name, value.dump(2) + "\n"); }

    void finish() {
        json manifest;
        manifest["tool"] = kToolName;
        manifest["version"] = kToolVersion;
        manifest["command"] = command_;
        manifest["config"] = config_;
        manifest["inputs"] = inputs_;
        std::vector<std::string> outputs = outputs_;
        std::sort(outputs.begin(), outputs.end());
        manifest["outputs"] = outputs;
        write_json("manifest.json", manifest);
    }

private:
    fs::path dir_;
    std::string command_;
    json config_ = json::object();
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
};

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

/// NaN and infinities are not JSON numbers; emit them as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::ostringstream s;
    s << "bin_left,bin_right,count\n";
    for (const auto& b : bins) {
        s << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
    }
    return s.str();
}

// --- pairs ----------------------------------------------------------------

struct PairsOptions {
    std::string input;
    std::string out;
    std::uint64_t seed = kDefaultSeed;
    int trials = 5000;
    int bins = 50;
    std::string ref_mean = "sample";
    double min_coverage = 1.0;
};

int cmd_pairs(const PairsOptions& o, std::ostream& out, std::ostream& err) {
    const ReturnsPanel panel = load_returns_any(o.input, o.min_coverage);
    RunDirectory run(o.out, "pairs");
    run.add_input(o.input);
    run.config() = {{"input", o.input},      {"seed", o.seed},         {"trials", o.trials},
                    {"bins", o.bins},        {"ref_mean", o.ref_mean}, {"min_coverage", o.min_coverage}};

    const auto samples = sample_pairs(panel, o.trials, o.seed);

    std::ostringstream rows;
    rows << "trial,asset_a,asset_b,r,z,n_obs\n";
    std::vector<double> rs;
    std::vector<double> zs;
    int clamped = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        rows << i << ',' << panel.asset_ids[static_cast<std::size_t>(s.asset_a)] << ','
             << panel.asset_ids[static_cast<std::size_t>(s.asset_b)] << ',' << format_double(s.pearson_r)
             << ',' << format_double(s.fisher_z) << ',' << s.n_obs << '\n';
        if (s.defined) {
            rs.push_back(s.pearson_r);
            zs.push_back(s.fisher_z);
        }
        clamped += s.clamped ? 1 : 0;
    }
    run.write("pairs.csv", rows.str());
    if (clamped > 0) {
        err << "warning: " << clamped << " pair(s) had |r| clamped to 1-1e-12 before atanh\n";
    }
    if (zs.empty()) {
        throw UndefinedCorrelation("pairs: no sampled pair has a defined correlation");
    }

    const double n = static_cast<double>(zs.size());
    double mean_r = 0.0;
    double mean_z = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        mean_r += rs[i];
        mean_z += zs[i];
    }
    mean_r /= n;
    mean_z /= n;
    double var_z = 0.0;
    for (double z : zs) {
        var_z += (z - mean_z) * (z - mean_z);
    }
    const double sd_z = zs.size() > 1 ? std::sqrt(var_z / (n - 1.0)) : 0.0;

    run.write("hist_r.csv", histogram_csv(histogram(rs, o.bins, -1.0, 1.0)));
    auto [zlo, zhi] = std::minmax_element(zs.begin(), zs.end());
    double lo = *zlo;
    double hi = *zhi;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    run.write("hist_z.csv", histogram_csv(histogram(zs, o.bins, lo, hi)));

    const int n_obs = panel.periods();
    const double atanh_mean_r = std::atanh(std::clamp(mean_r, -kMaxAbsCorrelation, kMaxAbsCorrelation));
    const double reference_mean =
        o.ref_mean == "scaled" ? std::sqrt(static_cast<double>(n_obs - 3)) * atanh_mean_r : mean_z;

    json summary;
    summary["assets"] = panel.assets();
    summary["periods"] = n_obs;
    summary["pair_population"] = pair_population(panel.assets());
    summary["trials"] = o.trials;
    summary["defined_pairs"] = zs.size();
    summary["clamped_pairs"] = clamped;
    summary["mean_r"] = number(mean_r);
    summary["atanh_mean_r"] = number(atanh_mean_r);
    summary["mean_z"] = number(mean_z);
    summary["sd_z"] = number(sd_z);
    summary["ks_reference"] = {{"mean_convention", o.ref_mean}, {"mean", number(reference_mean)}, {"sd", 1.0}};
    if (zs.size() >= 8) {
        const KsResult ks = ks_test_normal(zs, reference_mean, 1.0);
        summary["ks_d"] = number(ks.d_statistic);
        summary["ks_p"] = number(ks.p_value);
    } else {
        err << "warning: fewer than 8 defined pairs; KS test skipped\n";
        summary["ks_d"] = nullptr;
        summary["ks_p"] = nullptr;
    }
    run.write_json("pairs_summary.json", summary);
    run.finish();
    out << "pairs: " << o.trials << " samples over " << panel.assets() << " assets, mean r "
        << format_double(mean_r) << ", sd(Z) " << format_double(sd_z) << '\n';
    return kSuccess;
}

// --- ndof -----------------------------------------------------------------

struct NdofOptions {
    std::string input;
    std::string out;
    std::uint64_t seed = kDefaultSeed;
    int trials = 1000;
    int fit_min = 0;  // 0: default window
    int fit_max = 0;
    double min_coverage = 1.0;
};

int cmd_ndof(const NdofOptions& o, std::ostream& out, std::ostream& err) {
    const ReturnsPanel panel = load_returns_any(o.input, o.min_coverage);
    const int n_max = panel.assets();
    auto [fit_min, fit_max] = default_fit_window(n_max);
    if (o.fit_min > 0) {
        fit_min = o.fit_min;
    }
    if (o.fit_max > 0) {
        fit_max = o.fit_max;
    }
    if (fit_min > fit_max) {
        throw ValidationError("ndof: --fit-min exceeds --fit-max");
    }

    RunDirectory run(o.out, "ndof");
    run.add_input(o.input);
    run.config() = {{"input", o.input},     {"seed", o.seed},       {"trials", o.trials},
                    {"fit_min", fit_min},   {"fit_max", fit_max},   {"min_coverage", o.min_coverage}};

    const auto trials = run_dof_experiment(panel, o.trials, o.seed);
    std::ostringstream rows;
    rows << "trial,n,v_i,v_p,n_star,degenerate\n";
    int degenerate = 0;
    for (const auto& t : trials) {
        rows << t.trial << ',' << t.n << ',' << format_double(t.v_i) << ',' << format_double(t.v_p) << ','
             << format_double(t.n_star) << ',' << (t.degenerate ? 1 : 0) << '\n';
        degenerate += t.degenerate ? 1 : 0;
    }
    run.write("trials.csv", rows.str());
    if (degenerate > 0) {
        err << "warning: " << degenerate << " degenerate trial(s) excluded from the fit\n";
    }

    const DofTrial terminal = full_universe_trial(panel);
    json report;
    report["n_max"] = n_max;
    report["trials"] = o.trials;
    report["degenerate_trials"] = degenerate;
    report["terminal_nstar"] = number(terminal.n_star);

    std::optional<OlsFit> fit;
    try {
        fit = fit_large_n(trials, fit_min, fit_max);
    } catch (const Error& e) {
        err << "warning: large-N fit skipped: " << e.what() << '\n';
    }

    std::optional<double> rho_hat;
    if (!terminal.degenerate && n_max >= 2 && terminal.n_star <= n_max) {
        rho_hat = rho_hat_from_nstar(n_max, terminal.n_star);
    }
    const double k_hat = terminal.degenerate ? NAN : n_max / terminal.n_star;

    if (fit) {
        report["fit"] = {{"slope", number(fit->slope)},
                         {"intercept", number(fit->intercept)},
                         {"slope_se", number(fit->slope_se)},
                         {"intercept_se", number(fit->intercept_se)},
                         {"r2", number(fit->r_squared)},
                         {"f", number(fit->f_statistic)},
                         {"f_dof", {1, fit->n_points - 2}},
                         {"t_slope", number(fit->t_slope)},
                         {"t_intercept", number(fit->t_intercept)},
                         {"n_points", fit->n_points},
                         {"fit_range", {fit->fit_range.first, fit->fit_range.second}}};
        const ModelVerdict v = verdict(terminal, *fit, n_max);
        report["verdict"] = {
            {"rho_hat_terminal", optional_number(v.rho_hat_terminal)},
            {"rho_hat_intercept", optional_number(v.rho_hat_intercept)},
            {"rho_hat_intercept_note", "1/intercept, reading the intercept as the large-N limit 1/rho"},
            {"k_hat_asymptote", number(v.k_hat_asymptote)},
            {"k_hat_slope", number(v.k_hat_slope)},
            {"slope_significant", v.slope_significant},
            {"favours_isotropic", v.favours_isotropic()}};
    } else {
        report["fit"] = nullptr;
        report["verdict"] = {{"rho_hat_terminal", optional_number(rho_hat)},
                             {"k_hat_asymptote", number(k_hat)}};
    }
    run.write_json("fit.json", report);

    std::vector<int> grid(static_cast<std::size_t>(n_max));
    for (int i = 0; i < n_max; ++i) {
        grid[static_cast<std::size_t>(i)] = i + 1;
    }
    std::vector<double> iso(grid.size(), NAN);
    std::vector<double> factor(grid.size(), NAN);
    if (rho_hat && *rho_hat >= 0.0) {
        iso = iso_nstar_curve(*rho_hat, grid);
    }
    if (k_hat >= 1.0) {
        factor = model_curves(0.0, k_hat, grid).factor;
    }
    std::ostringstream curves;
    curves << "n,n_star_iso,n_star_factor,n_star_ols\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ols = fit ? fit->intercept + fit->slope * grid[i] : NAN;
        curves << grid[i] << ',' << format_double(iso[i]) << ',' << format_double(factor[i]) << ','
               << format_double(ols) << '\n';
    }
    run.write("curves.csv", curves.str());
    run.finish();

    out << "ndof: " << o.trials << " trials, terminal N* " << format_double(terminal.n_star);
    if (rho_hat) {
        out << ", rho_hat " << format_double(*rho_hat);
    }
    out << '\n';
    return kSuccess;
}

// --- allocate -------------------------------------------------------------

struct AllocateOptions {
    std::string input;
    std::string out;
    double rho = 0.0;
    double lambda = 0.0;
    std::string model = "mvo";
};

struct AlphaTable {
    std::vector<std::string> ids;
    Eigen::VectorXd alphas;
    Eigen::VectorXd sigmas;
};

AlphaTable read_alpha_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "asset_id,alpha,sigma") {
        throw ValidationError(path.string() + ":1: expected header 'asset_id,alpha,sigma'");
    }
    std::vector<std::string> ids;
    std::vector<double> alphas;
    std::vector<double> sigmas;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        double a = 0.0;
        double s = 0.0;
        if (fields.size() != 3 || fields[0].empty() || !parse_double(fields[1], a) ||
            !parse_double(fields[2], s)) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        ids.push_back(fields[0]);
        alphas.push_back(a);
        sigmas.push_back(s);
    }
    if (ids.empty()) {
        throw ValidationError(path.string() + ": no assets");
    }
    return AlphaTable{ids, Eigen::Map<Eigen::VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size())),
                      Eigen::Map<Eigen::VectorXd>(sigmas.data(), static_cast<Eigen::Index>(sigmas.size()))};
}

int cmd_allocate(const AllocateOptions& o, std::ostream& out, std::ostream&) {
    const AlphaTable table = read_alpha_csv(o.input);
    const IsotropicModel model(o.rho, table.sigmas);
    const AlphaVector alpha(table.alphas, model);
    const AllocationResult result =
        o.model == "laplace" ? laplace_allocation(model, alpha, o.lambda) : mvo_isotropic(model, alpha, o.lambda);

    RunDirectory run(o.out, "allocate");
    run.add_input(o.input);
    run.config() = {{"input", o.input}, {"rho", o.rho}, {"lambda", o.lambda}, {"model", o.model}};

    std::ostringstream w;
    w << "asset_id,weight\n";
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        w << table.ids[i] << ',' << format_double(result.weights(static_cast<Eigen::Index>(i))) << '\n';
    }
    run.write("weights.csv", w.str());
    run.write_json("diagnostics.json", {{"model", o.model},
                                        {"n", model.n()},
                                        {"rho", model.rho()},
                                        {"lambda", result.lambda},
                                        {"z_sq", number(result.z_sq)},
                                        {"omega", number(result.omega)},
                                        {"centering_factor", number(result.centering)}});
    run.finish();
    out << "allocate: " << o.model << " weights for " << model.n() << " assets, Z^2 "
        << format_double(result.z_sq) << ", omega " << format_double(result.omega) << '\n';
    return kSuccess;
}

// --- curves ---------------------------------------------------------------

struct CurvesOptions {
    std::string out;
    std::vector<double> rhos{0.25, 0.5, 0.75};
    std::vector<int> n_grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
};

int cmd_curves(const CurvesOptions& o, std::ostream& out, std::ostream&) {
    RunDirectory run(o.out, "curves");
    run.config() = {{"rho", o.rhos}, {"n_grid", o.n_grid}};

    std::ostringstream risk;
    std::ostringstream centering;
    std::ostringstream nstar;
    risk << "rho,n,v_s,v_r,ratio\n";
    centering << "rho,n,factor\n";
    nstar << "rho,n,n_star\n";
    for (double rho : o.rhos) {
        const auto curve = iso_nstar_curve(rho, o.n_grid);
        for (std::size_t i = 0; i < o.n_grid.size(); ++i) {
            const int n = o.n_grid[i];
            const RiskPartition p = risk_partition(1.0, rho, n);
            const std::string r = format_double(rho);
            risk << r << ',' << n << ',' << format_double(p.v_s) << ',' << format_double(p.v_r) << ','
                 << format_double(p.ratio.value_or(NAN)) << '\n';
            centering << r << ',' << n << ',' << format_double(centering_factor(rho, n)) << '\n';
            nstar << r << ',' << n << ',' << format_double(curve[i]) << '\n';
        }
    }
    run.write("risk.csv", risk.str());
    run.write("centering.csv", centering.str());
    run.write("nstar.csv", nstar.str());
    run.finish();
    out << "curves: " << o.rhos.size() << " rho values x " << o.n_grid.size() << " sizes\n";
    return kSuccess;
}

// --- ingest ---------------------------------------------------------------

struct IngestOptions {
    std::string input;
    std::string out;
    double min_coverage = 0.9;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
    const PricePanel raw = load_price_csv(o.input);
    auto [clean, report] = drop_incomplete_assets(raw, o.min_coverage);
    const ReturnsPanel returns = to_returns(clean);

    RunDirectory run(o.out, "ingest");
    run.add_input(o.input);
    run.config() = {{"input", o.input}, {"min_coverage", o.min_coverage}};

    std::ostringstream prices_csv;
    write_price_csv(clean, prices_csv);
    run.write("prices.csv", prices_csv.str());
    std::ostringstream returns_csv;
    write_returns_csv(returns, returns_csv);
    run.write("returns.csv", returns_csv.str());

    json dropped = json::array();
    for (const auto& d : report.assets_dropped) {
        dropped.push_back({{"asset_id", d.asset_id}, {"reason", d.reason}});
        err << "warning: dropped " << d.asset_id << " (" << d.reason << ")\n";
    }
    run.write_json("ingest_report.json", {{"assets_input", raw.assets()},
                                          {"assets_loaded", report.assets_loaded},
                                          {"assets_dropped", dropped},
                                          {"price_dates", report.periods},
                                          {"return_periods", returns.periods()},
                                          {"dates_dropped", report.dates_dropped},
                                          {"missing_cells_before", report.missing_cells_before},
                                          {"min_coverage", report.min_coverage},
                                          {"policy", report.policy}});
    run.finish();
    out << "ingest: " << report.assets_loaded << " assets, " << returns.periods() << " return periods\n";
    return kSuccess;
}

// --- algebra (debug) ------------------------------------------------------

struct AlgebraOptions {
    std::string out;
    int n = 4;
    double rho = 0.3;
};

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream s;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            s << (j ? "," : "") << format_double(m(i, j));
        }
        s << '\n';
    }
    return s.str();
}

int cmd_algebra(const AlgebraOptions& o, std::ostream& out, std::ostream& err) {
    const EquiCorrMatrix g(o.n, o.rho);
    RunDirectory run(o.out, "algebra");
    run.config() = {{"n", o.n}, {"rho", o.rho}};
    run.write("G.csv", matrix_csv(g.to_dense()));
    run.write("Q.csv", matrix_csv(orthogonal_eigenmatrix(o.n)));
    const EigenStructure e = eigenvalues(g);
    run.write_json("eigenvalues.json", {{"common", e.common_eigenvalue},
                                        {"degenerate", e.degenerate_eigenvalue},
                                        {"multiplicity", e.multiplicity}});
    if (g.is_singular()) {
        err << "warning: G is singular at rho=" << format_double(o.rho) << "; G_inverse.csv not written\n";
    } else {
        run.write("G_inverse.csv", matrix_csv(inverse(g).to_dense()));
    }
    run.finish();
    out << "algebra: wrote G_" << o.n << " artefacts\n";
    return kSuccess;
}

// --- synth ----------------------------------------------------------------

struct SynthOptions {
    std::string out;
    std::string model = "iso";
    int assets = 100;
    int periods = 500;
    double rho = 0.15;
    double sigma = 0.01;
    int factors = 5;
    double loading = 0.005;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream&) {
    ReturnsPanel returns;
    if (o.model == "factor") {
        const Eigen::MatrixXd b = Eigen::MatrixXd::Constant(o.assets, o.factors, o.loading);
        const Eigen::VectorXd idio = Eigen::VectorXd::Constant(o.assets, o.sigma * o.sigma);
        returns = factor_gaussian_panel(b, idio, o.periods, o.seed);
    } else {
        returns = isotropic_gaussian_panel(o.assets, o.periods, o.rho, o.sigma, o.seed);
    }
    const PricePanel prices = compound_prices(returns);
    RunDirectory run(o.out, "synth");
    run.config() = {{"model", o.model},     {"assets", o.assets},   {"periods", o.periods},
                    {"rho", o.rho},         {"sigma", o.sigma},     {"factors", o.factors},
                    {"loading", o.loading}, {"seed", o.seed}};
    std::ostringstream csv;
    write_price_csv(prices, csv);
    run.write("prices.csv", csv.str());
    run.finish();
    out << "synth: " << o.assets << " assets x " << prices.dates_count() << " dates\n";
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Isotropic correlation models for the equity cross-section", kToolName};
    app.require_subcommand(1);

    PairsOptions pairs;
    auto* p = app.add_subcommand("pairs", "Random pair correlations, Fisher-Z and KS summary");
    p->add_option("--input", pairs.input, "Price or returns CSV")->required();
    p->add_option("--out", pairs.out, "Output directory")->required();
    p->add_option("--seed", pairs.seed, "Random seed");
    p->add_option("--trials", pairs.trials, "Number of sampled pairs")->check(CLI::PositiveNumber);
    p->add_option("--bins", pairs.bins, "Histogram bins")->check(CLI::PositiveNumber);
    p->add_option("--ref-mean", pairs.ref_mean, "Reference mean for the Fisher-Z KS test")
        ->check(CLI::IsMember({"sample", "scaled"}));
    p->add_option("--min-coverage", pairs.min_coverage, "Asset coverage threshold for price input")
        ->check(CLI::Range(1e-9, 1.0));

    NdofOptions ndof;
    auto* d = app.add_subcommand("ndof", "Randomized N*(N) experiment with large-N fit");
    d->add_option("--input", ndof.input, "Price or returns CSV")->required();
    d->add_option("--out", ndof.out, "Output directory")->required();
    d->add_option("--seed", ndof.seed, "Random seed");
    d->add_option("--trials", ndof.trials, "Number of random portfolios")->check(CLI::PositiveNumber);
    d->add_option("--fit-min", ndof.fit_min, "Smallest N in the fit window")->check(CLI::PositiveNumber);
    d->add_option("--fit-max", ndof.fit_max, "Largest N in the fit window")->check(CLI::PositiveNumber);
    d->add_option("--min-coverage", ndof.min_coverage, "Asset coverage threshold for price input")
        ->check(CLI::Range(1e-9, 1.0));

    AllocateOptions alloc;
    auto* a = app.add_subcommand("allocate", "Closed-form isotropic portfolio weights");
    a->add_option("--input", alloc.input, "CSV with header asset_id,alpha,sigma")->required();
    a->add_option("--out", alloc.out, "Output directory")->required();
    a->add_option("--rho", alloc.rho, "Common correlation")->required();
    a->add_option("--lambda", alloc.lambda, "Risk-aversion multiplier")->required();
    a->add_option("--model", alloc.model, "mvo or laplace")->check(CLI::IsMember({"mvo", "laplace"}));

    CurvesOptions curves;
    auto* c = app.add_subcommand("curves", "Risk partition, centering factor and N* curves");
    c->add_option("--out", curves.out, "Output directory")->required();
    c->add_option("--rho", curves.rhos, "Correlation grid")->delimiter(',');
    c->add_option("--n-grid", curves.n_grid, "Portfolio sizes")->delimiter(',');

    IngestOptions ingest;
    auto* i = app.add_subcommand("ingest", "Validate a price CSV and derive returns");
    i->add_option("--input", ingest.input, "Canonical price CSV")->required();
    i->add_option("--out", ingest.out, "Output directory")->required();
    i->add_option("--min-coverage", ingest.min_coverage, "Minimum fraction of dates observed per asset")
        ->check(CLI::Range(1e-9, 1.0));

    AlgebraOptions algebra;
    auto* g = app.add_subcommand("algebra", "Dump dense G_N, Q_N and G_N^-1 for inspection");
    g->add_option("--out", algebra.out, "Output directory")->required();
    g->add_option("--n", algebra.n, "Dimension")->check(CLI::PositiveNumber);
    g->add_option("--rho", algebra.rho, "Common correlation");

    SynthOptions synth;
    auto* s = app.add_subcommand("synth", "Write a synthetic Gaussian price panel");
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_option("--model", synth.model, "iso or factor")->check(CLI::IsMember({"iso", "factor"}));
    s->add_option("--assets", synth.assets, "Number of assets")->check(CLI::PositiveNumber);
    s->add_option("--periods", synth.periods)->check(CLI::Range(2, 1000000));
    s->add_option("--rho", synth.rho, "Common correlation (iso)")->check(CLI::Range(0.0, 1.0));
    s->add_option("--sigma", synth.sigma, "Per-period volatility (idiosyncratic sd for factor)");
    s->add_option("--factors", synth.factors, "Number of factors (factor)")->check(CLI::NonNegativeNumber);
    s->add_option("--loading", synth.loading, "Common loading b (factor)");
    s->add_option("--seed", synth.seed, "Random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidation;
    }

    try {
        if (*p) return cmd_pairs(pairs, out, err);
        if (*d) return cmd_ndof(ndof, out, err);
        if (*a) return cmd_allocate(alloc, out, err);
        if (*c) return cmd_curves(curves, out, err);
        if (*i) return cmd_ingest(ingest, out, err);
        if (*g) return cmd_algebra(algebra, out, err);
        if (*s) return cmd_synth(synth, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kValidation;
}

}  // namespace isocorr::cli
