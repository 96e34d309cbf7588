// glasscav: cavity spin-glass simulation pipeline.
//
// Subcommands: jmatrix, replicas, analyze, image, randmat, reproduce.
// Every command writes a manifest with digests of its inputs and outputs; the
// reproduce subcommand replays a manifest and verifies byte-identical results.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glasscav/config.hpp"
#include "glasscav/frft.hpp"
#include "glasscav/glass.hpp"
#include "glasscav/imaging.hpp"
#include "glasscav/io.hpp"
#include "glasscav/manifest.hpp"
#include "glasscav/randmat.hpp"
#include "glasscav/rng.hpp"
#include "glasscav/threading.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glasscav;

namespace {

struct CommandResult {
    std::vector<std::string> outputs;  // paths relative to the output directory
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& settings,
                    std::uint64_t seed, int threads, const std::vector<std::string>& inputs,
                    const CommandResult& result) {
    RunManifest m;
    m.version = tool_version();
    m.command = command;
    m.settings = settings;
    m.base_seed = seed;
    m.threads = threads;
    m.created_utc = utc_timestamp();
    for (const auto& in : inputs) m.input_digests[in] = sha256_file_hex(in);
    for (const auto& out : result.outputs)
        m.output_digests[out] = sha256_file_hex(join_path(out_dir, out));
    std::string name = command;
    if (settings.contains("sub")) name += "_" + settings.at("sub").get<std::string>();
    m.save(join_path(out_dir, "manifest_" + name + ".json"));
}

void write_histogram_csv(const Histogram& h, const std::string& path) {
    std::string text = "bin_center,probability,stderr\n";
    for (std::size_t k = 0; k < h.size(); ++k) {
        text += format_double(h.bin_centers[k]) + "," + format_double(h.probabilities[k]) + "," +
                format_double(h.stderr_[k]) + "\n";
    }
    write_text_file(path, text);
}

json sites_to_json(const std::vector<SpinSite>& sites) {
    json arr = json::array();
    for (const auto& s : sites)
        arr.push_back({{"x_um", s.position_um[0]},
                       {"y_um", s.position_um[1]},
                       {"sigma_x_um", s.density.sigma_x_um},
                       {"sigma_y_um", s.density.sigma_y_um},
                       {"a00", s.density.a00},
                       {"a01", s.density.a01},
                       {"a10", s.density.a10}});
    return arr;
}

std::vector<SpinSite> sites_from_json(const json& arr) {
    std::vector<SpinSite> sites;
    for (const auto& e : arr) {
        SpinSite s;
        s.position_um = {e.at("x_um").get<double>(), e.at("y_um").get<double>()};
        s.density.sigma_x_um = e.at("sigma_x_um").get<double>();
        s.density.sigma_y_um = e.at("sigma_y_um").get<double>();
        s.density.a00 = e.at("a00").get<double>();
        s.density.a01 = e.at("a01").get<double>();
        s.density.a10 = e.at("a10").get<double>();
        sites.push_back(s);
    }
    return sites;
}

ReplicaEnsemble ensemble_from_rows_cli(const Eigen::MatrixXd& rows) {
    ReplicaEnsemble e;
    e.n_spins = static_cast<int>(rows.cols());
    for (int a = 0; a < rows.rows(); ++a) {
        SpinConfiguration c;
        c.s = rows.row(a).transpose();
        c.raw_amplitudes = c.s;
        c.seed = static_cast<std::uint64_t>(a);
        e.configs.push_back(c);
    }
    return e;
}

// ---------------------------------------------------------------------------
// command implementations (shared by the CLI entry points and `reproduce`)
// ---------------------------------------------------------------------------

CommandResult run_jmatrix(const json& settings, const std::string& out_dir) {
    const ExperimentConfig cfg = parse_config(settings.at("config"));
    const auto sites = resolve_sites(cfg);
    const CouplingMatrix Jm = assemble_J(sites, cfg.geometry, cfg.quadrature);

    fs::create_directories(out_dir);
    write_csv_matrix(Jm.J, join_path(out_dir, "J.csv"));

    json sidecar;
    sidecar["sites"] = sites_to_json(sites);
    sidecar["geometry"] = config_to_json(cfg)["geometry"];
    sidecar["quadrature"] = config_to_json(cfg)["quadrature"];
    sidecar["include_local"] = Jm.include_local;
    sidecar["seed"] = cfg.sites.seed;
    sidecar["eigenvalues"] = std::vector<double>(Jm.eigvals.data(), Jm.eigvals.data() + Jm.n());
    sidecar["j_digest"] = sha256_file_hex(join_path(out_dir, "J.csv"));
    write_text_file(join_path(out_dir, "J.json"), sidecar.dump(2) + "\n");

    return {{"J.csv", "J.json"}};
}

CommandResult run_replicas(const json& settings, const std::string& out_dir, int threads) {
    const std::string j_csv = settings.at("j_csv").get<std::string>();
    const std::string j_sidecar = settings.at("j_sidecar").get<std::string>();
    const ExperimentConfig cfg = parse_config(settings.at("config"));

    CouplingMatrix Jm;
    Jm.J = read_csv_matrix(j_csv);
    if (Jm.J.rows() != Jm.J.cols()) throw std::invalid_argument("replicas: J matrix must be square");
    const json sidecar = json::parse(read_text_file(j_sidecar));
    Jm.sites = sites_from_json(sidecar.at("sites"));
    if (static_cast<int>(Jm.sites.size()) != Jm.J.rows())
        throw std::invalid_argument("replicas: J matrix / sidecar dimension mismatch");
    Jm.geom = cfg.geometry;
    Jm.recompute_eigen();

    const int n_reps = cfg.n_reps > 0 ? cfg.n_reps : default_replica_count(Jm.n());
    const ReplicaEnsemble ens = generate_ensemble(Jm, cfg.physical, cfg.schedule, n_reps,
                                                  cfg.base_seed, cfg.engine, cfg.engine_options,
                                                  threads);

    fs::create_directories(out_dir);
    write_csv_matrix(ens.as_matrix(), join_path(out_dir, "ensemble.csv"));
    json side;
    side["base_seed"] = cfg.base_seed;
    side["n_reps"] = n_reps;
    side["engine"] = config_to_json(cfg)["engine"];
    side["schedule"] = config_to_json(cfg)["schedule"];
    side["physical"] = config_to_json(cfg)["physical"];
    side["j_provenance"] = sha256_file_hex(j_csv);
    write_text_file(join_path(out_dir, "ensemble.json"), side.dump(2) + "\n");
    return {{"ensemble.csv", "ensemble.json"}};
}

CommandResult run_analyze(const json& settings, const std::string& out_dir) {
    const std::string sub = settings.at("sub").get<std::string>();
    std::vector<std::string> inputs;
    for (const auto& p : settings.at("inputs")) inputs.push_back(p.get<std::string>());
    const bool binarize_flag = settings.value("binarize", false);
    const int bins = settings.value("bins", 50);
    const std::uint64_t seed = settings.value("seed", 0ull);

    fs::create_directories(out_dir);
    CommandResult result;

    auto load_ensemble = [&](const std::string& path) {
        ReplicaEnsemble e = ensemble_from_rows_cli(read_csv_matrix(path));
        return binarize_flag ? binarize(e) : e;
    };

    if (sub == "overlap") {
        if (inputs.size() != 1) throw std::invalid_argument("analyze overlap: one ensemble file");
        const ReplicaEnsemble e = load_ensemble(inputs[0]);
        Histogram h = overlap_distribution(overlap_matrix(e), bins);
        h.stderr_ = bootstrap_errors(
            [bins](const Eigen::MatrixXd& rows) {
                return overlap_distribution(overlap_matrix(rows), bins).probabilities;
            },
            e.as_matrix(), 500, seed);
        write_histogram_csv(h, join_path(out_dir, "overlap_hist.csv"));
        result.outputs = {"overlap_hist.csv"};
    } else if (sub == "parisi") {
        if (inputs.size() < 2)
            throw std::invalid_argument("analyze parisi: need >= 2 ensemble files");
        std::vector<Histogram> hs;
        for (const auto& p : inputs)
            hs.push_back(overlap_distribution(overlap_matrix(load_ensemble(p)), bins));
        const Histogram avg = parisi_distribution(hs, 1000, seed);
        write_histogram_csv(avg, join_path(out_dir, "parisi_hist.csv"));
        result.outputs = {"parisi_hist.csv"};
    } else if (sub == "qx") {
        if (inputs.empty()) throw std::invalid_argument("analyze qx: need ensemble files");
        std::vector<Histogram> hs_cont, hs_bin;
        for (const auto& p : inputs) {
            const ReplicaEnsemble e = ensemble_from_rows_cli(read_csv_matrix(p));
            hs_cont.push_back(overlap_distribution(overlap_matrix(e), bins));
            hs_bin.push_back(overlap_distribution(overlap_matrix(binarize(e)), bins));
        }
        auto qx_out = [&](const std::vector<Histogram>& hs, const std::string& tag) {
            const Histogram avg =
                hs.size() > 1 ? parisi_distribution(hs, 1000, seed) : hs.front();
            const ParisiFunction pf = parisi_function(avg);
            std::string text = "x,q,q_fit\n";
            for (std::size_t i = 0; i < pf.x.size(); ++i)
                text += format_double(pf.x[i]) + "," + format_double(pf.q[i]) + "," +
                        format_double(pf.fitted_q(pf.x[i])) + "\n";
            write_text_file(join_path(out_dir, "qx_" + tag + ".csv"), text);
            json fitj = {{"q_ea", pf.fit.q_ea},     {"a", pf.fit.a},
                         {"b", pf.fit.b},           {"c", pf.fit.c},
                         {"x_star", pf.fit.x_star}, {"fit_residual", pf.fit.fit_residual},
                         {"fitted", pf.fit.fitted}};
            write_text_file(join_path(out_dir, "qx_fit_" + tag + ".json"), fitj.dump(2) + "\n");
            result.outputs.push_back("qx_" + tag + ".csv");
            result.outputs.push_back("qx_fit_" + tag + ".json");
        };
        qx_out(hs_cont, "continuous");
        qx_out(hs_bin, "binarized");
    } else if (sub == "kcorr") {
        ReplicaEnsemble e;
        if (settings.value("paramagnet", false)) {
            const int n = settings.value("n", 16);
            const int n_reps = settings.value("n_reps", 200);
            Rng rng = Rng::stream(seed, 0x706d67);
            Eigen::MatrixXd rows(n_reps, n);
            for (int a = 0; a < n_reps; ++a)
                for (int i = 0; i < n; ++i)
                    rows(a, i) = (rng.normal() > 0 ? 1.0 : -1.0) / std::sqrt(double(n));
            e = ensemble_from_rows_cli(rows);
        } else {
            if (inputs.size() != 1) throw std::invalid_argument("analyze kcorr: one ensemble file");
            e = load_ensemble(inputs[0]);
        }
        const KCorrelator k = k_correlator(overlap_matrix(e));
        write_histogram_csv(k.histogram, join_path(out_dir, "k_hist.csv"));
        json summary = {{"mean_k", k.mean_k}, {"fwhm", k.fwhm}, {"n_triples", k.n_triples}};
        write_text_file(join_path(out_dir, "k_summary.json"), summary.dump(2) + "\n");
        result.outputs = {"k_hist.csv", "k_summary.json"};
    } else if (sub == "cluster") {
        if (inputs.size() != 1) throw std::invalid_argument("analyze cluster: one ensemble file");
        const std::string linkage_name = settings.value("linkage", "average");
        Linkage linkage = Linkage::average;
        if (linkage_name == "single") linkage = Linkage::single;
        else if (linkage_name == "complete") linkage = Linkage::complete;
        else if (linkage_name != "average")
            throw std::invalid_argument("analyze cluster: unknown linkage " + linkage_name);
        const Dendrogram dg = cluster_replicas(overlap_matrix(load_ensemble(inputs[0])), linkage);
        json out;
        out["n_leaves"] = dg.n_leaves;
        out["leaf_order"] = dg.leaf_order;
        json merges = json::array();
        for (const auto& m : dg.merges)
            merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height},
                              {"count", m.count}});
        out["merges"] = merges;
        write_text_file(join_path(out_dir, "dendrogram.json"), out.dump(2) + "\n");
        result.outputs = {"dendrogram.json"};
    } else if (sub == "entropy") {
        if (inputs.size() != 1) throw std::invalid_argument("analyze entropy: one ensemble file");
        const EntropyEstimate e = shannon_entropy_jackknife(load_ensemble(inputs[0]));
        json out = {{"plug_in_bits", e.plug_in_bits},
                    {"jackknife_bits", e.jackknife_bits},
                    {"distinct_patterns", e.distinct_patterns}};
        write_text_file(join_path(out_dir, "entropy.json"), out.dump(2) + "\n");
        result.outputs = {"entropy.json"};
    } else if (sub == "magnetization") {
        if (inputs.size() != 1)
            throw std::invalid_argument("analyze magnetization: one ensemble file");
        const ReplicaEnsemble e = load_ensemble(inputs[0]);
        MagnetizationStats m = magnetization_stats(e);
        const int mbins = static_cast<int>(m.histogram.size());
        m.histogram.stderr_ = bootstrap_errors(
            [mbins](const Eigen::MatrixXd& rows) {
                ReplicaEnsemble re = ensemble_from_rows_cli(rows);
                return magnetization_stats(re, mbins).histogram.probabilities;
            },
            e.as_matrix(), 500, seed);
        write_histogram_csv(m.histogram, join_path(out_dir, "magnetization_hist.csv"));
        const auto boot = bootstrap_errors(
            [](const Eigen::MatrixXd& rows) {
                double acc = 0.0;
                for (int a = 0; a < rows.rows(); ++a) {
                    double mm = 0.0;
                    for (int i = 0; i < rows.cols(); ++i) mm += rows(a, i) < 0 ? -1.0 : 1.0;
                    acc += std::abs(mm / rows.cols());
                }
                return std::vector<double>{acc / rows.rows()};
            },
            e.as_matrix(), 1000, seed);
        json out = {{"mean_m", m.mean_m},
                    {"stderr_mean_m", m.stderr_mean_m},
                    {"mean_abs_m", m.mean_abs_m},
                    {"stderr_mean_abs_m", boot[0]}};
        write_text_file(join_path(out_dir, "magnetization.json"), out.dump(2) + "\n");
        result.outputs = {"magnetization_hist.csv", "magnetization.json"};
    } else {
        throw std::invalid_argument("analyze: unknown subcommand " + sub);
    }
    return result;
}

CommandResult run_image(const json& settings, const std::string& out_dir) {
    const std::string sub = settings.at("sub").get<std::string>();
    fs::create_directories(out_dir);
    CommandResult result;

    if (sub == "synth") {
        const ExperimentConfig cfg = parse_config(settings.at("config"));
        const auto sites = resolve_sites(cfg);
        SpinConfiguration c;
        if (settings.contains("spins")) {
            const auto spins = settings.at("spins").get<std::vector<double>>();
            c.raw_amplitudes = Eigen::Map<const Eigen::VectorXd>(
                spins.data(), static_cast<Eigen::Index>(spins.size()));
            if (c.raw_amplitudes.norm() == 0.0)
                throw std::invalid_argument("image synth: zero spin vector");
            c.s = c.raw_amplitudes.normalized();
        } else {
            Rng rng = Rng::stream(settings.value("spin_seed", 1ull), 0x73706e);
            c.raw_amplitudes.resize(static_cast<Eigen::Index>(sites.size()));
            for (Eigen::Index i = 0; i < c.raw_amplitudes.size(); ++i)
                c.raw_amplitudes(i) = rng.normal() > 0 ? 1.0 : -1.0;
            c.s = c.raw_amplitudes.normalized();
        }
        SynthesisOptions opts;
        opts.grid = cfg.image_grid;
        if (settings.contains("snr_db")) opts.noise_snr_db = settings.at("snr_db").get<double>();
        opts.noise_seed = settings.value("noise_seed", 0ull);
        const ComplexFieldImage img = synthesize_field(c, sites, cfg.geometry, opts);
        save_field_binary(img, join_path(out_dir, "field.gcf"));
        if (settings.value("csv", false)) {
            save_field_csv(img, join_path(out_dir, "field"));
            result.outputs = {"field.gcf", "field.re.csv", "field.im.csv", "field.meta.json"};
        } else {
            result.outputs = {"field.gcf"};
        }
        json truth;
        truth["spins"] = std::vector<double>(c.s.data(), c.s.data() + c.s.size());
        truth["sites"] = sites_to_json(sites);
        write_text_file(join_path(out_dir, "synth_truth.json"), truth.dump(2) + "\n");
        result.outputs.push_back("synth_truth.json");
    } else if (sub == "filter") {
        const std::string field_path = settings.at("field").get<std::string>();
        const ExperimentConfig cfg = parse_config(settings.value("config", json::object()));
        const ComplexFieldImage img = load_field_binary(field_path);
        FrftOptions fopts;
        fopts.oversample = cfg.frft_oversample;
        const ComplexFieldImage filtered = symmetry_average(img, cfg.geometry, fopts);
        save_field_binary(filtered, join_path(out_dir, "field_filtered.gcf"));
        result.outputs = {"field_filtered.gcf"};
    } else if (sub == "fit") {
        const std::string field_path = settings.at("field").get<std::string>();
        const std::string sites_path = settings.at("sites").get<std::string>();
        const ExperimentConfig cfg = parse_config(settings.value("config", json::object()));
        ComplexFieldImage img = load_field_binary(field_path);
        if (img.grid.squaredNorm() == 0.0)
            throw std::invalid_argument("image fit: degenerate (all-zero) image");
        if (settings.value("downsample", true)) img = downsample2(img);
        const json sites_json = json::parse(read_text_file(sites_path));
        const std::vector<SpinSite> sites =
            sites_from_json(sites_json.contains("sites") ? sites_json.at("sites") : sites_json);
        FitOptions fopts;
        fopts.max_iterations = settings.value("max_iterations", 200);
        const FitResult fit = fit_spins(img, sites, cfg.geometry, fopts);
        json out;
        out["residual"] = fit.residual;
        out["sigma_x_um"] = fit.sigma_x_um;
        out["sigma_y_um"] = fit.sigma_y_um;
        out["iterations"] = fit.iterations;
        out["converged"] = fit.converged;
        out["rank_warning"] = fit.rank_warning;
        out["recovered_s"] = std::vector<double>(
            fit.recovered_s.data(), fit.recovered_s.data() + fit.recovered_s.size());
        json per_site = json::array();
        for (const auto& s : fit.sites)
            per_site.push_back({{"amplitude", s.amplitude},
                                {"x_um", s.position_um[0]},
                                {"y_um", s.position_um[1]},
                                {"a00", s.a00},
                                {"a01", s.a01},
                                {"a10", s.a10}});
        out["sites"] = per_site;
        write_text_file(join_path(out_dir, "fit.json"), out.dump(2) + "\n");
        result.outputs = {"fit.json"};
    } else {
        throw std::invalid_argument("image: unknown subcommand " + sub);
    }
    return result;
}

CommandResult run_randmat(const json& settings, const std::string& out_dir, int threads) {
    const auto n_values = settings.at("n").get<std::vector<int>>();
    const auto w_values = settings.at("w_over_w0").get<std::vector<double>>();
    const int draws = settings.at("draws").get<int>();
    const std::uint64_t seed = settings.value("seed", 1ull);
    const ExperimentConfig cfg = parse_config(settings.value("config", json::object()));
    for (double w : w_values)
        if (w < 0.0) throw std::invalid_argument("randmat: w/w0 must be nonnegative");
    for (int n : n_values)
        if (n < 2) throw std::invalid_argument("randmat: n must be >= 2");

    const SweepResult sweep = sweep_w(n_values, w_values, draws, seed, cfg.geometry, threads);
    fs::create_directories(out_dir);
    std::string text = "n,w_over_w0,statistic,value,stderr\n";
    for (const auto& c : sweep.cells) {
        auto row = [&](const std::string& name, double v, double e) {
            text += std::to_string(c.n) + "," + format_double(c.w_over_w0) + "," + name + "," +
                    format_double(v) + "," + format_double(e) + "\n";
        };
        row("hellinger", c.hellinger, c.hellinger_stderr);
        row("p_negative", c.p_negative, c.p_negative_stderr);
        row("p_frustrated_triple", c.p_frustrated, c.p_frustrated_stderr);
        row("pearson", c.pearson, c.pearson_stderr);
    }
    write_text_file(join_path(out_dir, "sweep.csv"), text);
    return {{"sweep.csv"}};
}

int dispatch(const std::string& command, const json& settings, const std::string& out_dir,
             int threads, const std::vector<std::string>& inputs) {
    CommandResult result;
    if (command == "jmatrix") result = run_jmatrix(settings, out_dir);
    else if (command == "replicas") result = run_replicas(settings, out_dir, threads);
    else if (command == "analyze") result = run_analyze(settings, out_dir);
    else if (command == "image") result = run_image(settings, out_dir);
    else if (command == "randmat") result = run_randmat(settings, out_dir, threads);
    else throw std::invalid_argument("unknown command: " + command);
    write_manifest(out_dir, command, settings, settings.value("seed", 0ull), threads, inputs,
                   result);
    return 0;
}

int run_reproduce(const std::string& manifest_path, const std::string& out_dir, int threads) {
    const RunManifest m = RunManifest::load(manifest_path);
    std::vector<std::string> inputs;
    for (const auto& [path, digest] : m.input_digests) {
        if (sha256_file_hex(path) != digest)
            throw std::runtime_error("reproduce: input changed since the original run: " + path);
        inputs.push_back(path);
    }
    dispatch(m.command, m.settings, out_dir, m.threads, inputs);

    int mismatches = 0;
    for (const auto& [name, digest] : m.output_digests) {
        const std::string fresh = sha256_file_hex(join_path(out_dir, name));
        if (fresh != digest) {
            std::cerr << "reproduce: digest mismatch for " << name << "\n";
            ++mismatches;
        } else {
            std::cout << "reproduce: " << name << " ok\n";
        }
    }
    if (mismatches) throw std::runtime_error("reproduce: outputs differ from the manifest");
    std::cout << "reproduce: all outputs byte-identical\n";
    return 0;
}

json load_config_setting(const std::string& config_path) {
    if (config_path.empty()) return json::object();
    return json::parse(read_text_file(config_path));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glasscav: driven-dissipative multimode-cavity Ising spin glass pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: GLASSCAV_THREADS or cores)");

    std::string config_path, out_dir = ".", j_csv, j_sidecar, field_path, sites_path, manifest_path;
    std::string analyze_sub, image_sub, linkage = "average";
    std::vector<std::string> ensemble_inputs;
    std::vector<double> spins, w_values{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    std::vector<int> n_values{16};
    double t_ramp_ms = -1.0, snr_db = -1.0;
    int n_reps = -1, draws = 50, bins = 50, max_iterations = 200;
    std::uint64_t seed = 1, noise_seed = 0, spin_seed = 1;
    bool binarize_flag = false, paramagnet = false, csv_flag = false, no_downsample = false;
    int pm_n = 16, pm_reps = 200;

    auto* cmd_jmatrix = app.add_subcommand("jmatrix", "assemble a disordered coupling matrix");
    cmd_jmatrix->add_option("--config", config_path, "experiment config JSON")->required();
    cmd_jmatrix->add_option("--out", out_dir, "output directory");

    auto* cmd_replicas = app.add_subcommand("replicas", "generate replica spin configurations");
    cmd_replicas->add_option("--j", j_csv, "J matrix CSV")->required();
    cmd_replicas->add_option("--j-sidecar", j_sidecar, "J sidecar JSON (default: <j>.json)");
    cmd_replicas->add_option("--config", config_path, "experiment config JSON");
    cmd_replicas->add_option("--t-ramp-ms", t_ramp_ms, "override ramp time in ms");
    cmd_replicas->add_option("--n-reps", n_reps, "replica count (default per system size)");
    cmd_replicas->add_option("--seed", seed, "base seed");
    cmd_replicas->add_option("--out", out_dir, "output directory");

    auto* cmd_analyze = app.add_subcommand("analyze", "replica-statistics analyses");
    cmd_analyze
        ->add_option("sub", analyze_sub, "overlap|parisi|qx|kcorr|cluster|entropy|magnetization")
        ->required();
    cmd_analyze->add_option("inputs", ensemble_inputs, "ensemble CSV files");
    cmd_analyze->add_flag("--binarize", binarize_flag, "binarize spins first");
    cmd_analyze->add_option("--bins", bins, "histogram bins");
    cmd_analyze->add_flag("--paramagnet", paramagnet, "kcorr: random-sign baseline ensemble");
    cmd_analyze->add_option("--n", pm_n, "paramagnet baseline system size");
    cmd_analyze->add_option("--n-reps", pm_reps, "paramagnet baseline replica count");
    cmd_analyze->add_option("--linkage", linkage, "cluster: average|single|complete");
    cmd_analyze->add_option("--seed", seed, "bootstrap / baseline seed");
    cmd_analyze->add_option("--out", out_dir, "output directory");

    auto* cmd_image = app.add_subcommand("image", "field synthesis, filtering and fitting");
    cmd_image->add_option("sub", image_sub, "synth|filter|fit")->required();
    cmd_image->add_option("--config", config_path, "experiment config JSON");
    cmd_image->add_option("--spins", spins, "explicit spin vector for synth");
    cmd_image->add_option("--spin-seed", spin_seed, "random sign pattern seed for synth");
    cmd_image->add_option("--snr-db", snr_db, "additive complex noise SNR (dB)");
    cmd_image->add_option("--noise-seed", noise_seed, "noise seed");
    cmd_image->add_flag("--csv", csv_flag, "synth: also write the CSV pair");
    cmd_image->add_option("--field", field_path, "field image file (filter/fit)");
    cmd_image->add_option("--sites", sites_path, "sites JSON (fit; J sidecar or synth truth)");
    cmd_image->add_flag("--no-downsample", no_downsample, "fit at full resolution");
    cmd_image->add_option("--max-iterations", max_iterations, "fit iteration cap");
    cmd_image->add_option("--out", out_dir, "output directory");

    auto* cmd_randmat = app.add_subcommand("randmat", "FM-to-glass crossover sweep");
    cmd_randmat->add_option("--n", n_values, "system sizes");
    cmd_randmat->add_option("--w", w_values, "w/w0 values");
    cmd_randmat->add_option("--draws", draws, "disorder draws per cell");
    cmd_randmat->add_option("--seed", seed, "sweep seed");
    cmd_randmat->add_option("--config", config_path, "experiment config JSON");
    cmd_randmat->add_option("--out", out_dir, "output directory");

    auto* cmd_reproduce = app.add_subcommand("reproduce", "replay a manifest and verify digests");
    cmd_reproduce->add_option("manifest", manifest_path, "manifest JSON")->required();
    cmd_reproduce->add_option("--out", out_dir, "output directory for the replay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // flag/usage problems are validation failures
    }

    try {
        if (cmd_jmatrix->parsed()) {
            json settings;
            settings["config"] = load_config_setting(config_path);
            return dispatch("jmatrix", settings, out_dir, threads, {config_path});
        }
        if (cmd_replicas->parsed()) {
            json cfg = load_config_setting(config_path);
            if (t_ramp_ms > 0.0) cfg["schedule"]["t_ramp_ms"] = t_ramp_ms;
            if (n_reps > 0) cfg["replicas"]["n_reps"] = n_reps;
            if (cmd_replicas->count("--seed")) cfg["replicas"]["base_seed"] = seed;
            json settings;
            settings["config"] = cfg;
            settings["j_csv"] = j_csv;
            settings["j_sidecar"] =
                j_sidecar.empty() ? j_csv.substr(0, j_csv.rfind('.')) + ".json" : j_sidecar;
            std::vector<std::string> inputs{j_csv, settings["j_sidecar"].get<std::string>()};
            if (!config_path.empty()) inputs.push_back(config_path);
            return dispatch("replicas", settings, out_dir, threads, inputs);
        }
        if (cmd_analyze->parsed()) {
            json settings;
            settings["sub"] = analyze_sub;
            settings["inputs"] = ensemble_inputs;
            settings["binarize"] = binarize_flag;
            settings["bins"] = bins;
            settings["seed"] = seed;
            if (paramagnet) {
                settings["paramagnet"] = true;
                settings["n"] = pm_n;
                settings["n_reps"] = pm_reps;
            }
            if (analyze_sub == "cluster") settings["linkage"] = linkage;
            return dispatch("analyze", settings, out_dir, threads, ensemble_inputs);
        }
        if (cmd_image->parsed()) {
            json settings;
            settings["sub"] = image_sub;
            settings["config"] = load_config_setting(config_path);
            std::vector<std::string> inputs;
            if (!config_path.empty()) inputs.push_back(config_path);
            if (image_sub == "synth") {
                if (!spins.empty()) settings["spins"] = spins;
                settings["spin_seed"] = spin_seed;
                if (snr_db >= 0.0) settings["snr_db"] = snr_db;
                settings["noise_seed"] = noise_seed;
                settings["csv"] = csv_flag;
            } else {
                settings["field"] = field_path;
                inputs.push_back(field_path);
                if (image_sub == "fit") {
                    settings["sites"] = sites_path;
                    settings["downsample"] = !no_downsample;
                    settings["max_iterations"] = max_iterations;
                    inputs.push_back(sites_path);
                }
            }
            return dispatch("image", settings, out_dir, threads, inputs);
        }
        if (cmd_randmat->parsed()) {
            json settings;
            settings["n"] = n_values;
            settings["w_over_w0"] = w_values;
            settings["draws"] = draws;
            settings["seed"] = seed;
            settings["config"] = load_config_setting(config_path);
            std::vector<std::string> inputs;
            if (!config_path.empty()) inputs.push_back(config_path);
            return dispatch("randmat", settings, out_dir, threads, inputs);
        }
        if (cmd_reproduce->parsed()) {
            return run_reproduce(manifest_path, out_dir, threads);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;  // validation failure
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;  // malformed config/sidecar
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;  // runtime / numerical failure
    }
    return 0;
}
