#include "wasabi/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wasabi/algorithm.hpp"
#include "wasabi/diagnostics.hpp"
#include "wasabi/errors.hpp"
#include "wasabi/io.hpp"
#include "wasabi/parallel.hpp"
#include "wasabi/sample_set.hpp"
#include "wasabi/search.hpp"
#include "wasabi/simulator.hpp"

namespace wasabi {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;
constexpr std::size_t kPsmGuard = 5000;

struct DrawInput {
    std::string path;
    std::size_t thin = 1;
};

struct LoadedInput {
    SampleSet draws;
    bool relabeled = false;
    std::string digest;
};

LoadedInput load_draws(const DrawInput& in) {
    if (in.thin < 1) throw std::invalid_argument("--thin must be >= 1");
    LoadedDraws loaded = read_draws_file(in.path);
    LoadedInput out{std::move(loaded.draws), loaded.relabeled, file_digest(in.path)};
    if (in.thin > 1) out.draws = out.draws.thinned(in.thin);
    return out;
}

struct FitOptions {
    std::size_t particles = 2;
    std::string init = "average";
    std::optional<double> epsilon;
    std::size_t max_iter = 100;
    std::size_t runs = 8;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> k_max;
    std::size_t search_runs = 2;
    bool no_outlier_check = false;
    uint64_t seed = 0;
};

void add_fit_options(CLI::App* cmd, FitOptions& fit) {
    cmd->add_option("--init", fit.init, "average, complete, plusplus, topvi or fixed=FILE")->capture_default_str();
    cmd->add_option("--epsilon", fit.epsilon, "convergence threshold on W in bits (default 0.0001*log2(n))");
    cmd->add_option("--max-iter", fit.max_iter, "iteration cap")->capture_default_str();
    cmd->add_option("--runs", fit.runs, "independent starts")->capture_default_str();
    cmd->add_option("--batch", fit.batch, "mini-batch size");
    cmd->add_option("--k-max", fit.k_max, "cluster cap for the inner search");
    cmd->add_option("--search-runs", fit.search_runs, "restarts of the inner search")->capture_default_str();
    cmd->add_flag("--no-outlier-check", fit.no_outlier_check, "skip outlier swaps");
    cmd->add_option("--seed", fit.seed, "random seed")->capture_default_str();
}

WasabiConfig make_config(const FitOptions& fit, std::size_t particles) {
    WasabiConfig cfg;
    cfg.particles = particles;
    cfg.epsilon = fit.epsilon;
    cfg.max_iter = fit.max_iter;
    cfg.runs = fit.runs;
    cfg.minibatch = fit.batch;
    cfg.outlier_check = !fit.no_outlier_check;
    cfg.search.k_max = fit.k_max;
    cfg.search.runs = fit.search_runs;
    cfg.seed = fit.seed;
    const std::string& init = fit.init;
    if (init == "average") {
        cfg.init = InitMethod::average;
    } else if (init == "complete") {
        cfg.init = InitMethod::complete;
    } else if (init == "plusplus") {
        cfg.init = InitMethod::plusplus;
    } else if (init == "topvi") {
        cfg.init = InitMethod::topvi;
    } else if (init.rfind("fixed=", 0) == 0) {
        cfg.init = InitMethod::fixed;
        cfg.fixed = read_draws_file(init.substr(6)).draws.draws();
    } else {
        throw std::invalid_argument("unknown --init value '" + init + "'");
    }
    return cfg;
}

json config_json(const FitOptions& fit, const DrawInput& in) {
    json j;
    j["init"] = fit.init;
    j["epsilon"] = fit.epsilon ? json(*fit.epsilon) : json(nullptr);
    j["max_iter"] = fit.max_iter;
    j["runs"] = fit.runs;
    j["batch"] = fit.batch ? json(*fit.batch) : json(nullptr);
    j["k_max"] = fit.k_max ? json(*fit.k_max) : json(nullptr);
    j["search_runs"] = fit.search_runs;
    j["outlier_check"] = !fit.no_outlier_check;
    j["seed"] = fit.seed;
    j["thin"] = in.thin;
    j["threads"] = thread_count();
    return j;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
}

void write_json(const fs::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

// Runs `fn` with a stream that is stdout for "-" and the named file
// otherwise.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
    } else {
        auto out = open_out(path);
        fn(out);
    }
}

std::vector<std::string> write_posterior(const fs::path& dir, const WasabiPosterior& wp, const LoadedInput& in,
                                         const FitOptions& fit, std::size_t thin) {
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "particles.csv");
        write_partitions(out, wp.particles);
    }
    {
        auto out = open_out(dir / "assignments.csv");
        for (std::size_t a : wp.assignments) out << a << '\n';
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["particles"] = wp.size();
    j["n"] = in.draws.n();
    j["draws"] = in.draws.size();
    j["distinct_draws"] = in.draws.unique_count();
    j["weights"] = wp.weights;
    j["per_particle_evi"] = wp.per_particle_evi;
    std::vector<std::size_t> clusters;
    for (const auto& p : wp.particles) clusters.push_back(p.k());
    j["particle_clusters"] = clusters;
    j["wasserstein"] = wp.wasserstein;
    j["trace"] = wp.trace;
    j["minibatch_iterations"] = wp.minibatch_iterations;
    j["converged"] = wp.converged;
    j["run"] = wp.run;
    j["warnings"] = wp.warnings;
    j["draws_digest"] = in.digest;
    j["thin"] = thin;
    j["seed"] = fit.seed;
    write_json(dir / "summary.json", j);
    return {"particles.csv", "assignments.csv", "summary.json"};
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::pair<std::string, std::string>>& inputs, bool canonicalized,
                    double seconds, const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = config;
    j["seed"] = config.contains("seed") ? config["seed"] : json(nullptr);
    json ins = json::array();
    for (const auto& [path, digest] : inputs) ins.push_back({{"path", path}, {"digest", digest}});
    j["inputs"] = ins;
    j["canonicalized_on_load"] = canonicalized;
    j["wall_clock_seconds"] = seconds;
    j["outputs"] = outputs;
    write_json(dir / "manifest.json", j);
}

void report_warnings(const WasabiPosterior& wp) {
    for (const auto& w : wp.warnings) std::cerr << "warning: " << w << '\n';
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void cmd_summarize(const DrawInput& din, const FitOptions& fit, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedInput in = load_draws(din);
    const WasabiPosterior wp = run(in.draws, make_config(fit, fit.particles));
    report_warnings(wp);
    const fs::path dir(out_dir);
    auto outputs = write_posterior(dir, wp, in, fit, din.thin);
    json cfg = config_json(fit, din);
    cfg["L"] = fit.particles;
    outputs.push_back("manifest.json");
    write_manifest(dir, "summarize", cfg, {{din.path, in.digest}}, in.relabeled, elapsed(start), outputs);
    std::cout << "W = " << wp.wasserstein << " bits, L = " << wp.size() << '\n';
}

void cmd_elbow(const DrawInput& din, const FitOptions& fit, std::size_t l_min, std::size_t l_max,
               const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    if (l_min < 1 || l_max < l_min) throw std::invalid_argument("need 1 <= --L-min <= --L-max");
    const LoadedInput in = load_draws(din);
    std::vector<std::size_t> counts;
    for (std::size_t l = l_min; l <= l_max; ++l) counts.push_back(l);
    const auto entries = elbow(in.draws, counts, make_config(fit, l_min));

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs{"elbow.csv"};
    {
        auto out = open_out(dir / "elbow.csv");
        out << "L,W\n";
        for (const auto& e : entries) {
            out << e.particles << ',' << json(e.wasserstein).dump() << '\n';
            std::cout << "L = " << e.particles << "  W = " << e.wasserstein << '\n';
        }
    }
    for (const auto& e : entries) {
        report_warnings(e.posterior);
        const std::string sub = "L" + std::to_string(e.particles);
        for (const auto& f : write_posterior(dir / sub, e.posterior, in, fit, din.thin)) {
            outputs.push_back(sub + "/" + f);
        }
    }
    json cfg = config_json(fit, din);
    cfg["L_min"] = l_min;
    cfg["L_max"] = l_max;
    outputs.push_back("manifest.json");
    write_manifest(dir, "elbow", cfg, {{din.path, in.digest}}, in.relabeled, elapsed(start), outputs);
}

WasabiPosterior load_posterior(const fs::path& dir, const LoadedInput& in, json& summary) {
    std::ifstream sf(dir / "summary.json");
    if (!sf) throw DataError("no summary.json in " + dir.string());
    try {
        summary = json::parse(sf);
    } catch (const json::exception& e) {
        throw DataError(std::string("summary.json: ") + e.what());
    }
    if (summary.value("schema_version", 0) != kSchemaVersion) throw DataError("unsupported summary schema_version");

    WasabiPosterior wp;
    wp.particles = read_draws_file((dir / "particles.csv").string()).draws.draws();
    wp.weights = summary.at("weights").get<std::vector<double>>();
    wp.per_particle_evi = summary.at("per_particle_evi").get<std::vector<double>>();
    wp.wasserstein = summary.at("wasserstein").get<double>();
    wp.trace = summary.at("trace").get<std::vector<double>>();
    std::ifstream af(dir / "assignments.csv");
    if (!af) throw DataError("no assignments.csv in " + dir.string());
    std::string line;
    std::size_t row = 0;
    while (std::getline(af, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t pos = 0;
        long long v = -1;
        try {
            v = std::stoll(line, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || v < 0 || static_cast<std::size_t>(v) >= wp.particles.size()) {
            throw DataError("assignments.csv row " + std::to_string(row) + ": invalid region id");
        }
        wp.assignments.push_back(static_cast<std::size_t>(v));
    }
    if (wp.weights.size() != wp.particles.size() || wp.assignments.size() != in.draws.size() ||
        wp.particles.front().n() != in.draws.n()) {
        throw DataError("summary does not match the draws");
    }
    return wp;
}

void cmd_diagnose(const DrawInput& din_in, const std::string& summary_dir, std::string out_dir,
                  const std::string& evic, bool region_psms, bool force) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path sdir(summary_dir);
    json summary;
    DrawInput din = din_in;
    std::string digest;
    {
        std::ifstream sf(sdir / "summary.json");
        if (!sf) throw DataError("no summary.json in " + summary_dir);
        const json peek = json::parse(sf, nullptr, false);
        if (peek.is_discarded()) throw DataError("summary.json is not valid JSON");
        din.thin = peek.value("thin", std::size_t{1});
        digest = peek.value("draws_digest", std::string());
    }
    const LoadedInput in = load_draws(din);
    if (digest != in.digest) throw DataError("draws digest mismatch: summary was built from different draws");
    const WasabiPosterior wp = load_posterior(sdir, in, summary);
    DiagnosticsOptions options;
    if (evic == "wasabi") {
        options.evic_source = EvicSource::wasabi;
    } else if (evic == "mcmc") {
        options.evic_source = EvicSource::mcmc;
    } else {
        throw std::invalid_argument("--evic must be wasabi or mcmc");
    }
    if (region_psms && in.draws.n() > kPsmGuard && !force) {
        throw std::invalid_argument("item-level PSMs refused for n > 5000 without --force");
    }
    options.region_psms = region_psms;
    const DiagnosticsReport rep = diagnose(in.draws, wp, options);

    if (out_dir.empty()) out_dir = (sdir / "diagnostics").string();
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    {
        auto out = open_out(dir / "meet.csv");
        write_partitions(out, std::span<const Partition>(&rep.meet.meet, 1));
        outputs.push_back("meet.csv");
    }
    {
        auto out = open_out(dir / "wasabi_psm.csv");
        write_matrix(out, rep.collapsed_psm.values(), rep.collapsed_psm.dim(), rep.collapsed_psm.dim());
        outputs.push_back("wasabi_psm.csv");
    }
    {
        auto out = open_out(dir / "evic.csv");
        for (const auto& row : rep.particle_evic) write_matrix(out, row, 1, row.size());
        outputs.push_back("evic.csv");
    }
    for (std::size_t l = 0; l < rep.region_psms.size(); ++l) {
        const std::string name = "region_psm_" + std::to_string(l) + ".csv";
        auto out = open_out(dir / name);
        write_matrix(out, rep.region_psms[l].values(), rep.region_psms[l].dim(), rep.region_psms[l].dim());
        outputs.push_back(name);
    }
    {
        auto vic = open_out(dir / "vic.csv");
        auto vicg = open_out(dir / "vicg.csv");
        vic << "a,b,item,vic\n";
        vicg << "a,b,cluster_a,cluster_b,vicg\n";
        for (const auto& c : rep.comparisons) {
            for (std::size_t i = 0; i < c.vic.size(); ++i) {
                vic << c.a << ',' << c.b << ',' << i << ',' << json(c.vic[i]).dump() << '\n';
            }
            for (const auto& [key, v] : c.vicg) {
                vicg << c.a << ',' << c.b << ',' << key.first << ',' << key.second << ',' << json(v).dump() << '\n';
            }
        }
        outputs.push_back("vic.csv");
        outputs.push_back("vicg.csv");
    }

    json r;
    r["schema_version"] = kSchemaVersion;
    r["meet_clusters"] = rep.meet.meet.k();
    r["meet_sizes"] = rep.meet.meet_sizes;
    r["cluster_map"] = rep.meet.cluster_map;
    r["evic_source"] = evic;
    std::vector<double> totals;
    for (const auto& row : rep.particle_evic) {
        double t = 0.0;
        for (double v : row) t += v;
        totals.push_back(t);
    }
    r["particle_evic_total"] = totals;
    r["region_evi"] = rep.region_evi;
    r["region_evi_normalized"] = rep.region_evi_normalized;
    json pairs = json::array();
    for (const auto& c : rep.comparisons) pairs.push_back({{"a", c.a}, {"b", c.b}, {"vi", c.vi}});
    r["pairwise_vi"] = pairs;
    r["wasserstein"] = wp.wasserstein;
    r["evi_identity_gap"] = rep.evi_identity_gap;
    r["psm_identity_gap"] = rep.psm_identity_gap ? json(*rep.psm_identity_gap) : json(nullptr);
    write_json(dir / "report.json", r);
    outputs.push_back("report.json");

    json cfg;
    cfg["summary_dir"] = summary_dir;
    cfg["evic"] = evic;
    cfg["region_psm"] = region_psms;
    cfg["force"] = force;
    cfg["thin"] = din.thin;
    outputs.push_back("manifest.json");
    write_manifest(dir, "diagnose", cfg, {{din.path, in.digest}}, in.relabeled, elapsed(start), outputs);
    std::cout << "meet clusters = " << rep.meet.meet.k() << ", identity gap = " << rep.evi_identity_gap << '\n';
}

void cmd_minvi(const DrawInput& din, const SearchConfig& cfg, const std::string& out_path) {
    const LoadedInput in = load_draws(din);
    const SearchResult res = minvi_search(in.draws, cfg);
    with_output(out_path, [&](std::ostream& out) { write_partitions(out, std::span<const Partition>(&res.partition, 1)); });
    std::cerr << "expected VI = " << res.expected_vi << " bits, K = " << res.partition.k() << '\n';
}

void cmd_psm(const DrawInput& din, bool force, const std::string& out_path) {
    const LoadedInput in = load_draws(din);
    if (in.draws.n() > kPsmGuard && !force) {
        throw std::invalid_argument("PSM refused for n > 5000 without --force");
    }
    const Psm m = psm(in.draws);
    with_output(out_path, [&](std::ostream& out) { write_matrix(out, m.values(), m.dim(), m.dim()); });
}

struct SimulateOptions {
    std::string preset = "bimodal";
    std::optional<std::size_t> n;
    uint64_t seed = 1;
    double m = 1.25;
    double sigma = 0.4;
    double df = 5.0;
    double gamma = 2.0;
    std::string labels_path;
    std::string out = "-";
};

void cmd_simulate(const SimulateOptions& o) {
    MixtureSpec spec;
    if (o.preset == "bimodal") {
        spec = bimodal_spec(o.n.value_or(600), o.seed);
    } else if (o.preset == "quadrants") {
        spec = quadrants_spec(o.m, o.n.value_or(600), o.seed);
    } else if (o.preset == "truncated") {
        spec = truncated_spec(o.sigma, o.n.value_or(200), o.seed);
    } else if (o.preset == "skewt") {
        spec = skewt_spec(o.df, o.gamma, o.n.value_or(200), o.seed);
    } else {
        throw std::invalid_argument("unknown --preset '" + o.preset + "'");
    }
    const Dataset data = gen_mixture(spec);
    with_output(o.out, [&](std::ostream& out) { write_data(out, data); });
    if (!o.labels_path.empty()) {
        auto out = open_out(o.labels_path);
        for (Label l : data.labels) out << l << '\n';
    }
}

struct GibbsOptions {
    std::string data = "-";
    std::string alpha = "1";
    GibbsConfig cfg;
    std::string out = "-";
};

void cmd_gibbs(const GibbsOptions& o) {
    Dataset data;
    if (o.data == "-") {
        data = read_data(std::cin);
    } else {
        std::ifstream in(o.data);
        if (!in) throw DataError("cannot open " + o.data);
        data = read_data(in);
    }
    DpmHyper hyper;
    try {
        hyper = default_hyper(data, o.alpha == "empirical" ? AlphaRule::empirical : AlphaRule::one);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    if (o.alpha != "empirical") {
        std::size_t pos = 0;
        double a = 0.0;
        try {
            a = std::stod(o.alpha, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != o.alpha.size() || !(a > 0.0)) throw std::invalid_argument("--alpha must be 1, empirical or a positive value");
        hyper.alpha = a;
    }
    const SampleSet draws = dpm_gibbs(data, hyper, o.cfg);
    with_output(o.out, [&](std::ostream& out) { write_partitions(out, draws.draws()); });
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"WASABI posterior summaries of Bayesian clustering draws"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = all cores)");

    DrawInput din;
    FitOptions fit;
    std::string out_dir = "wasabi_out";

    auto* summarize = app.add_subcommand("summarize", "fit L particles and write the summary");
    summarize->add_option("draws", din.path, "draws CSV")->required()->check(CLI::ExistingFile);
    summarize->add_option("--L", fit.particles, "number of particles")->capture_default_str();
    summarize->add_option("--thin", din.thin, "keep every k-th draw")->capture_default_str();
    summarize->add_option("--out", out_dir, "output directory")->capture_default_str();
    add_fit_options(summarize, fit);

    std::size_t l_min = 1;
    std::size_t l_max = 10;
    std::string elbow_out = "wasabi_elbow";
    auto* elbow_cmd = app.add_subcommand("elbow", "W for a range of particle counts");
    elbow_cmd->add_option("draws", din.path, "draws CSV")->required()->check(CLI::ExistingFile);
    elbow_cmd->add_option("--L-min", l_min, "smallest L")->capture_default_str();
    elbow_cmd->add_option("--L-max", l_max, "largest L")->capture_default_str();
    elbow_cmd->add_option("--thin", din.thin, "keep every k-th draw")->capture_default_str();
    elbow_cmd->add_option("--out", elbow_out, "output directory")->capture_default_str();
    add_fit_options(elbow_cmd, fit);

    std::string summary_dir;
    std::string diag_out;
    std::string evic = "wasabi";
    bool region_psm = false;
    bool force = false;
    auto* diag = app.add_subcommand("diagnose", "meet, collapsed PSM, EVIC and region diagnostics");
    diag->add_option("draws", din.path, "draws CSV the summary was built from")->required()->check(CLI::ExistingFile);
    diag->add_option("summary_dir", summary_dir, "summarize output directory")->required()->check(CLI::ExistingDirectory);
    diag->add_option("--out", diag_out, "output directory (default SUMMARY_DIR/diagnostics)");
    diag->add_option("--evic", evic, "wasabi or mcmc")->capture_default_str();
    diag->add_flag("--region-psm", region_psm, "write the item-level PSM of every region");
    diag->add_flag("--force", force, "allow item-level PSMs for n > 5000");

    SearchConfig scfg;
    std::string minvi_out = "-";
    auto* minvi = app.add_subcommand("minvi", "partition minimizing posterior expected VI");
    minvi->add_option("draws", din.path, "draws CSV")->required()->check(CLI::ExistingFile);
    minvi->add_option("--k-max", scfg.k_max, "cluster cap");
    minvi->add_option("--runs", scfg.runs, "restarts")->capture_default_str();
    minvi->add_option("--max-sweeps", scfg.max_sweeps, "sweep cap per restart")->capture_default_str();
    minvi->add_option("--seed", scfg.seed, "random seed")->capture_default_str();
    minvi->add_option("--thin", din.thin, "keep every k-th draw")->capture_default_str();
    minvi->add_option("--out", minvi_out, "output file, - for stdout")->capture_default_str();

    std::string psm_out = "-";
    auto* psm_cmd = app.add_subcommand("psm", "posterior similarity matrix");
    psm_cmd->add_option("draws", din.path, "draws CSV")->required()->check(CLI::ExistingFile);
    psm_cmd->add_option("--thin", din.thin, "keep every k-th draw")->capture_default_str();
    psm_cmd->add_flag("--force", force, "allow n > 5000");
    psm_cmd->add_option("--out", psm_out, "output file, - for stdout")->capture_default_str();

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "generate mixture data");
    simulate->add_option("--preset", sim.preset, "bimodal, quadrants, truncated or skewt")->capture_default_str();
    simulate->add_option("--n", sim.n, "number of points");
    simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
    simulate->add_option("--m", sim.m, "quadrant offset")->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "truncated-Gaussian sd")->capture_default_str();
    simulate->add_option("--df", sim.df, "skewed-t degrees of freedom")->capture_default_str();
    simulate->add_option("--gamma", sim.gamma, "skewed-t skewness")->capture_default_str();
    simulate->add_option("--labels", sim.labels_path, "also write the true labels here");
    simulate->add_option("--out", sim.out, "output file, - for stdout")->capture_default_str();

    GibbsOptions gib;
    auto* gibbs = app.add_subcommand("gibbs", "collapsed Gibbs sampler for a Gaussian DP mixture");
    gibbs->add_option("data", gib.data, "data CSV, - for stdin")->capture_default_str();
    gibbs->add_option("--alpha", gib.alpha, "1, empirical (2/log n) or a value")->capture_default_str();
    gibbs->add_option("--iters", gib.cfg.iters, "total sweeps")->capture_default_str();
    gibbs->add_option("--burnin", gib.cfg.burnin, "discarded sweeps")->capture_default_str();
    gibbs->add_option("--thin", gib.cfg.thin, "keep every k-th sweep")->capture_default_str();
    gibbs->add_option("--chains", gib.cfg.chains, "independent chains")->capture_default_str();
    gibbs->add_option("--seed", gib.cfg.seed, "random seed")->capture_default_str();
    gibbs->add_option("--out", gib.out, "output file, - for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        set_thread_count(threads);
        if (*summarize) cmd_summarize(din, fit, out_dir);
        if (*elbow_cmd) cmd_elbow(din, fit, l_min, l_max, elbow_out);
        if (*diag) cmd_diagnose(din, summary_dir, diag_out, evic, region_psm, force);
        if (*minvi) cmd_minvi(din, scfg, minvi_out);
        if (*psm_cmd) cmd_psm(din, force, psm_out);
        if (*simulate) cmd_simulate(sim);
        if (*gibbs) cmd_gibbs(gib);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInvariant;
    }
    return kOk;
}

}  // namespace wasabi
