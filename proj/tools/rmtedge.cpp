// rmtedge: heavy-tailed covariance edge statistics toolkit
//
// Subcommands:
//   theory    closed-form asymptotic constants for given (alpha, c, N, t)
//   edge      subordination left edge for one spectrum file
//   ensemble  seeded Monte-Carlo run from a JSON config
//   check     regularity / rigidity / interlacing on an existing run
//   goe-ref   GOE smallest-eigenvalue reference sample

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rmtedge/ensemble.hpp"
#include "rmtedge/errors.hpp"
#include "rmtedge/free_convolution.hpp"
#include "rmtedge/spectral.hpp"
#include "rmtedge/theory.hpp"
#include "rmtedge/theta.hpp"

namespace {

using nlohmann::json;
using namespace rmtedge;

std::vector<double> read_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum file " + path);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) {
        std::stringstream ss(tok);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty()) vals.push_back(std::stod(cell));
        }
    }
    if (vals.empty()) throw ConfigError("spectrum file " + path + " holds no values");
    return vals;
}

int cmd_theory(double alpha, double s0, double c, int n, double t) {
    const ThetaSpec spec = build_theta(alpha, s0);
    TheoryInputs inp{alpha, c, spec.c_const, static_cast<double>(n), t};
    const MPParams mp(c);
    json out;
    out["theta"] = {{"alpha", alpha},
                    {"s0", s0},
                    {"core_height", spec.core_height},
                    {"tail_amplitude", spec.tail_amplitude},
                    {"c_const", spec.c_const}};
    out["sigma_alpha"] = sigma_alpha(inp);
    out["lambda_shift"] = lambda_shift(inp);
    out["lambda_shift_term"] = lambda_shift_term(inp);
    out["tilde_sigma_critical"] = tilde_sigma_critical(c, spec.c_const);
    const DeterministicEdge de = deterministic_edge(mp, t);
    out["zeta_bar"] = de.zeta_bar;
    out["gamma_limit"] = de.gamma_limit;
    out["sigma_m"] = sigma_m(inp);
    std::cout << out.dump(2) << std::endl;
    return 0;
}

int cmd_edge(const std::string& file, int n, double t) {
    std::vector<double> vals = read_spectrum_file(file);
    const int m = static_cast<int>(vals.size());
    if (n <= m) throw ConfigError("edge: need N > M = number of eigenvalues");
    const Spectrum spec = spectrum_from_values(std::move(vals), m, n);
    const EdgeSolution e = find_left_edge(spec, t);
    const SubordinationResiduals r = subordination_residuals(spec, t, e);
    json out;
    out["zeta_minus"] = e.zeta_minus;
    out["lambda_minus_t"] = e.lambda_minus_t;
    out["phi_second"] = e.phi_second;
    out["gamma_N"] = e.gamma_n;
    out["gap"] = e.gap;
    out["multiple_sign_changes"] = e.multiple_sign_changes;
    out["F_residual"] = r.f_val;
    out["F_zeta_residual"] = r.f_zeta;
    std::cout << out.dump(2) << std::endl;
    return 0;
}

int cmd_ensemble(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                 int workers_override, const std::string& out_override,
                 const std::string& mode_override, bool assert_thresholds) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = config_from_json(buf.str());
    if (has_seed) cfg.master_seed = seed_override;
    if (workers_override > 0) cfg.workers = workers_override;
    if (!out_override.empty()) cfg.output_path = out_override;
    if (!mode_override.empty()) {
        if (mode_override == "paper-eps") {
            cfg.mode = EpsMode::PaperEps;
        } else if (mode_override == "direct-t") {
            cfg.mode = EpsMode::DirectT;
        } else {
            throw ConfigError("--mode must be paper-eps or direct-t");
        }
        cfg.validate();
    }
    const EnsembleResult res = cfg.arm == EnsembleArm::Gdm ? run_gdm_ensemble(cfg)
                                                           : run_edge_ensemble(cfg);
    const RigidityReport rig = rigidity_check(res.records, cfg.n_cols);
    json reports;
    reports["rigidity"] = {{"fraction_within", rig.fraction_within},
                           {"max_scaled_dev", rig.max_scaled_dev},
                           {"threshold", rig.threshold},
                           {"counted", rig.counted}};
    export_results(res, cfg, reports.dump(), cfg.output_path);
    std::cout << "wrote " << cfg.output_path << "/records.csv ("
              << rig.counted << " replicates, good fraction " << res.good_fraction
              << ", failures " << res.failures << ")\n";
    if (assert_thresholds) {
        const double want = cfg.arm == EnsembleArm::Gdm ? 0.95 : 0.90;
        if (rig.fraction_within < want) {
            std::cerr << "rigidity fraction " << rig.fraction_within << " below " << want
                      << "\n";
            return 4;
        }
    }
    return 0;
}

int cmd_check(const std::string& dir, int max_reps, bool assert_thresholds) {
    namespace fs = std::filesystem;
    std::ifstream sj(fs::path(dir) / "summary.json");
    if (!sj) throw ConfigError("check: missing summary.json in " + dir);
    json summary = json::parse(sj);
    ExperimentConfig cfg = config_from_json(summary.at("config").dump());
    auto records = read_records_csv((fs::path(dir) / "records.csv").string());

    const RigidityReport rig = rigidity_check(records, cfg.n_cols);
    json out;
    out["rigidity"] = {{"fraction_within", rig.fraction_within},
                       {"max_scaled_dev", rig.max_scaled_dev},
                       {"threshold", rig.threshold}};

    // regularity from stored spectra when present
    std::ifstream sp(fs::path(dir) / "spectra_X.csv");
    int reg_pass = 0, reg_total = 0;
    if (sp) {
        std::string line;
        while (std::getline(sp, line) && reg_total < max_reps) {
            std::stringstream ss(line);
            std::string cell;
            std::vector<double> vals;
            bool first = true;
            while (std::getline(ss, cell, ',')) {
                if (first) {
                    first = false;
                    continue;
                }
                vals.push_back(std::stod(cell));
            }
            if (vals.empty()) continue;
            Spectrum s = spectrum_from_values(std::move(vals), cfg.m_rows, cfg.n_cols);
            RegularityReport rep = regularity_check(s, 0.05, 0.3);
            ++reg_total;
            if (rep.verdict) ++reg_pass;
        }
    }
    out["regularity"] = {{"checked", reg_total}, {"passed", reg_pass}};

    // interlacing by deterministic replay of the recorded seeds
    const ThetaSpec spec = build_theta(cfg.alpha, cfg.s0);
    const DecompositionParams params = cfg.make_params(spec);
    int int_total = 0, int_pass = 0, int_skip = 0;
    for (const auto& rec : records) {
        if (int_total >= max_reps) break;
        const Eigen::MatrixXd y = sample_matrix(spec, cfg.m_rows, cfg.n_cols, rec.seed);
        const Decomposition d = decompose(y, params, spec);
        const InterlacingReport rep = interlacing_check(d);
        ++int_total;
        if (rep.skipped) {
            ++int_skip;
        } else if (rep.ok) {
            ++int_pass;
        }
    }
    out["interlacing"] = {{"checked", int_total}, {"passed", int_pass}, {"skipped", int_skip}};
    std::cout << out.dump(2) << std::endl;
    if (assert_thresholds) {
        const bool rigid_ok =
            rig.fraction_within >= (cfg.arm == EnsembleArm::Gdm ? 0.95 : 0.90);
        const bool inter_ok = int_pass + int_skip == int_total;
        if (!rigid_ok || !inter_ok) return 4;
    }
    return 0;
}

int cmd_goe_ref(int m, int draws, std::uint64_t seed, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("goe-ref: cannot open " + out_path);
    out << "stat\n";
    const double m23 = std::pow(static_cast<double>(m), 2.0 / 3.0);
    for (int r = 0; r < draws; ++r) {
        const double mu = goe_smallest(m, child_seed(seed, static_cast<std::uint64_t>(r)));
        out << m23 * (mu + 2.0) << '\n';
    }
    std::cout << "wrote " << draws << " reference draws to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-tailed covariance edge statistics toolkit"};
    app.require_subcommand(1);

    // theory
    double alpha = 3.0, s0 = 1.0, c = 0.25, t = 0.1;
    int n = 1000;
    auto* theory = app.add_subcommand("theory", "print asymptotic constants");
    theory->add_option("--alpha", alpha, "tail index in (2,4)")->required();
    theory->add_option("--s0", s0, "core/tail changeover");
    theory->add_option("--c", c, "aspect ratio M/N")->required();
    theory->add_option("--N", n, "dimension N")->required();
    theory->add_option("--t", t, "Gaussian time");

    // edge
    std::string spectrum_file;
    int edge_n = 0;
    double edge_t = 0.1;
    auto* edge = app.add_subcommand("edge", "edge solution for one spectrum file");
    edge->add_option("file", spectrum_file, "eigenvalue list (newline/comma separated)")
        ->required();
    edge->add_option("--N", edge_n, "column dimension N")->required();
    edge->add_option("--t", edge_t, "Gaussian time")->required();

    // ensemble
    std::string config_path, out_dir, mode_override;
    std::uint64_t seed = 0;
    int workers = 0;
    bool assert_thresholds = false;
    auto* ens = app.add_subcommand("ensemble", "run a Monte-Carlo ensemble from JSON config");
    ens->add_option("--config", config_path, "config JSON path")->required();
    auto* seed_opt = ens->add_option("--seed", seed, "master seed override");
    ens->add_option("--workers", workers, "worker threads override");
    ens->add_option("--out", out_dir, "output directory override");
    ens->add_option("--mode", mode_override, "mode override {paper-eps, direct-t}");
    ens->add_flag("--assert", assert_thresholds, "exit 4 when ensemble thresholds fail");

    // check
    std::string check_dir;
    int max_reps = 1 << 30;
    bool check_assert = false;
    auto* check = app.add_subcommand("check", "diagnostics on an existing run directory");
    check->add_option("dir", check_dir, "run directory (records.csv + summary.json)")
        ->required();
    check->add_option("--max-reps", max_reps, "cap on re-examined replicates");
    check->add_flag("--assert", check_assert, "exit 4 when thresholds fail");

    // goe-ref
    int goe_m = 250, goe_draws = 400;
    std::uint64_t goe_seed = 1;
    std::string goe_out = "goe_ref.csv";
    auto* goe = app.add_subcommand("goe-ref", "GOE smallest-eigenvalue reference sample");
    goe->add_option("--M", goe_m, "matrix dimension");
    goe->add_option("--draws", goe_draws, "number of draws");
    goe->add_option("--seed", goe_seed, "seed");
    goe->add_option("--out", goe_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (theory->parsed()) return cmd_theory(alpha, s0, c, n, t);
        if (edge->parsed()) return cmd_edge(spectrum_file, edge_n, edge_t);
        if (ens->parsed()) {
            return cmd_ensemble(config_path, seed, !seed_opt->empty(), workers, out_dir,
                                mode_override, assert_thresholds);
        }
        if (check->parsed()) return cmd_check(check_dir, max_reps, check_assert);
        if (goe->parsed()) return cmd_goe_ref(goe_m, goe_draws, goe_seed, goe_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
