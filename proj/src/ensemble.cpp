#include "rmtedge/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rmtedge/errors.hpp"
#include "rmtedge/free_convolution.hpp"
#include "rmtedge/rng.hpp"

namespace rmtedge {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (!(alpha > 2.0 && alpha < 4.0)) throw ConfigError("config: alpha in (2,4) required");
    if (!(s0 > 0.0)) throw ConfigError("config: s0 > 0 required");
    if (m_rows < 1 || m_rows >= n_cols) throw ConfigError("config: require 1 <= M < N");
    if (replicates < 1) throw ConfigError("config: replicates >= 1 required");
    if (workers < 1) throw ConfigError("config: workers >= 1 required");
    if (mode == EpsMode::PaperEps) {
        if (t_target != 0.0 || heavy_theta != 0.0) {
            throw ConfigError("config: t_target/heavy_theta are direct-t fields");
        }
    } else {
        if (eps_a != 0.0 || eps_b != 0.0) {
            throw ConfigError("config: eps_a/eps_b are paper-eps fields");
        }
        if (!(t_target > 0.0 && t_target < 1.0)) {
            throw ConfigError("config: direct-t mode needs t_target in (0,1)");
        }
    }
}

DecompositionParams ExperimentConfig::make_params(const ThetaSpec& spec) const {
    if (mode == EpsMode::PaperEps) {
        if (eps_a == 0.0 && eps_b == 0.0) {
            return DecompositionParams::paper_defaults(alpha, n_cols);
        }
        return DecompositionParams::paper(alpha, n_cols, eps_a, eps_b);
    }
    double heavy = heavy_theta;
    if (heavy == 0.0) {
        const double eps_b_def = 0.9 * (alpha - 2.0) / (10.0 * alpha);
        heavy = std::pow(static_cast<double>(n_cols), 0.5 - eps_b_def);
    }
    return DecompositionParams::direct(spec, n_cols, t_target, heavy);
}

namespace {

const char* kConfigKeys[] = {"alpha", "s0",        "M",           "N",       "c_N",
                             "mode",  "eps_a",     "eps_b",       "t_target", "heavy_theta",
                             "arm",   "replicates", "master_seed", "workers", "output_path"};

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : kConfigKeys) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("config: unknown key '" + it.key() + "'");
    }
    ExperimentConfig cfg;
    try {
        cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("s0")) cfg.s0 = j.at("s0").get<double>();
        cfg.m_rows = j.at("M").get<int>();
        cfg.n_cols = j.at("N").get<int>();
        const std::string mode = j.value("mode", std::string("paper-eps"));
        if (mode == "paper-eps") {
            cfg.mode = EpsMode::PaperEps;
        } else if (mode == "direct-t") {
            cfg.mode = EpsMode::DirectT;
        } else {
            throw ConfigError("config: mode must be 'paper-eps' or 'direct-t'");
        }
        cfg.eps_a = j.value("eps_a", 0.0);
        cfg.eps_b = j.value("eps_b", 0.0);
        cfg.t_target = j.value("t_target", 0.0);
        cfg.heavy_theta = j.value("heavy_theta", 0.0);
        const std::string arm = j.value("arm", std::string("heavy"));
        if (arm == "heavy") {
            cfg.arm = EnsembleArm::Heavy;
        } else if (arm == "gdm") {
            cfg.arm = EnsembleArm::Gdm;
        } else {
            throw ConfigError("config: arm must be 'heavy' or 'gdm'");
        }
        cfg.replicates = j.at("replicates").get<int>();
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        cfg.workers = j.value("workers", 1);
        cfg.output_path = j.value("output_path", std::string("."));
        if (j.contains("c_N")) {
            const double c = j.at("c_N").get<double>();
            if (std::abs(c - cfg.c_n()) > 1e-9) {
                throw ConfigError("config: c_N inconsistent with M/N");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["alpha"] = cfg.alpha;
    j["s0"] = cfg.s0;
    j["M"] = cfg.m_rows;
    j["N"] = cfg.n_cols;
    j["c_N"] = cfg.c_n();
    j["mode"] = cfg.mode == EpsMode::PaperEps ? "paper-eps" : "direct-t";
    if (cfg.mode == EpsMode::PaperEps) {
        j["eps_a"] = cfg.eps_a;
        j["eps_b"] = cfg.eps_b;
    } else {
        j["t_target"] = cfg.t_target;
        j["heavy_theta"] = cfg.heavy_theta;
    }
    j["arm"] = cfg.arm == EnsembleArm::Heavy ? "heavy" : "gdm";
    j["replicates"] = cfg.replicates;
    j["master_seed"] = cfg.master_seed;
    j["workers"] = cfg.workers;
    j["output_path"] = cfg.output_path;
    return j.dump(2);
}

namespace {

ReplicateRecord run_one(const ExperimentConfig& cfg, const ThetaSpec& spec,
                        const DecompositionParams& params, std::uint64_t seed,
                        bool gdm_arm, std::vector<double>* spectrum_out) {
    ReplicateRecord rec;
    rec.seed = seed;
    const Eigen::MatrixXd y = sample_matrix(spec, cfg.m_rows, cfg.n_cols, seed);
    const Decomposition d = decompose(y, params, spec);
    rec.t = d.t;
    rec.good_psi = is_good(d.psi_mask, cfg.alpha).good;

    const Eigen::MatrixXd x = d.x_part();
    const Spectrum sx = covariance_spectrum(x);
    if (spectrum_out) *spectrum_out = sx.values;
    rec.lambda_m_x = sx.smallest();

    const EdgeSolution edge = find_left_edge(sx, d.t);
    rec.lambda_minus_t = edge.lambda_minus_t;
    rec.zeta_minus = edge.zeta_minus;
    rec.gamma_n = edge.gamma_n;
    rec.edge_fluct = edge.lambda_minus_t;

    if (gdm_arm) {
        // V_t = X + sqrt(t) W, W iid N(0, 1/N); fresh child stream so the
        // noise draw does not depend on how many Theta draws preceded it
        Rng noise(child_seed(seed, 0x5733bdc1u));
        Eigen::MatrixXd v(cfg.m_rows, cfg.n_cols);
        const double sd = std::sqrt(d.t / cfg.n_cols);
        for (int i = 0; i < cfg.m_rows; ++i) {
            for (int j = 0; j < cfg.n_cols; ++j) {
                v(i, j) = x(i, j) + sd * noise.gaussian();
            }
        }
        rec.lambda_m_y = covariance_spectrum(v).smallest();
    } else {
        rec.lambda_m_y = covariance_spectrum(y).smallest();
    }
    rec.tw_stat = rec.gamma_n * std::pow(static_cast<double>(cfg.m_rows), 2.0 / 3.0) *
                  (rec.lambda_m_y - rec.lambda_minus_t);
    return rec;
}

EnsembleResult run_ensemble_impl(const ExperimentConfig& cfg, bool gdm_arm) {
    cfg.validate();
    const ThetaSpec spec = build_theta(cfg.alpha, cfg.s0);
    const DecompositionParams params = cfg.make_params(spec);

    EnsembleResult out;
    out.records.resize(cfg.replicates);
    out.spectra_x.resize(cfg.replicates);

    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int r = next.fetch_add(1);
            if (r >= cfg.replicates) break;
            const std::uint64_t seed = child_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
            try {
                out.records[r] =
                    run_one(cfg, spec, params, seed, gdm_arm, &out.spectra_x[r]);
            } catch (const std::exception& e) {
                out.records[r].seed = seed;
                out.records[r].failed = true;
                out.records[r].failure = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(cfg.workers, cfg.replicates);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    int failures = 0;
    int good = 0;
    for (const auto& rec : out.records) {
        if (rec.failed) {
            ++failures;
        } else if (rec.good_psi) {
            ++good;
        }
    }
    out.failures = failures;
    const int succeeded = cfg.replicates - failures;
    if (failures * 10 > cfg.replicates) {
        std::string first;
        for (const auto& rec : out.records) {
            if (rec.failed) {
                first = rec.failure;
                break;
            }
        }
        throw SolverError("ensemble: more than 10% of replicates failed; first failure: " + first);
    }
    out.good_fraction = succeeded > 0 ? static_cast<double>(good) / succeeded : 0.0;
    if (succeeded > 0 && out.good_fraction < 0.99) {
        throw SolverError("ensemble: good-Psi frequency " + std::to_string(out.good_fraction) +
                          " below 0.99, sampling-bug verdict");
    }
    return out;
}

}  // namespace

EnsembleResult run_edge_ensemble(const ExperimentConfig& cfg) {
    return run_ensemble_impl(cfg, /*gdm_arm=*/false);
}

EnsembleResult run_gdm_ensemble(const ExperimentConfig& cfg) {
    return run_ensemble_impl(cfg, /*gdm_arm=*/true);
}

ComparisonReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                               double threshold) {
    if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] <= sb[j]) {
            ++i;
        } else {
            ++j;
        }
        const double fa = static_cast<double>(i) / sa.size();
        const double fb = static_cast<double>(j) / sb.size();
        ks = std::max(ks, std::abs(fa - fb));
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    };
    auto sd = [&](const std::vector<double>& v, double mu) {
        double s = 0.0;
        for (double x : v) s += (x - mu) * (x - mu);
        return std::sqrt(s / (v.size() > 1 ? v.size() - 1 : 1));
    };
    ComparisonReport rep;
    rep.ks_distance = ks;
    rep.n_a = static_cast<int>(a.size());
    rep.n_b = static_cast<int>(b.size());
    const double ma = mean(a), mb = mean(b);
    rep.mean_diff = ma - mb;
    const double sdb = sd(b, mb);
    rep.std_ratio = sdb > 0.0 ? sd(a, ma) / sdb : 0.0;
    rep.threshold = threshold;
    rep.verdict = ks <= threshold;
    return rep;
}

double ks_vs_normal(std::vector<double> sample) {
    if (sample.empty()) throw ConfigError("ks_vs_normal: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double phi = 0.5 * std::erfc(-sample[i] / std::sqrt(2.0));
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(phi - lo), std::abs(phi - hi)});
    }
    return ks;
}

RegularityReport regularity_check(const Spectrum& spec, double eta_star, double window,
                                  double c_h) {
    if (!(eta_star > 0.0 && window > 0.0)) {
        throw ConfigError("regularity_check: eta_star and window must be positive");
    }
    const double lam = spec.smallest();
    RegularityReport rep;
    rep.c_h = c_h;
    rep.right_ratio_min = rep.left_ratio_min = 1e300;
    rep.right_ratio_max = rep.left_ratio_max = -1e300;
    const double eta_max = std::min(10.0, window);
    const int n_e = 12, n_eta = 16;
    for (int ie = 0; ie <= n_e; ++ie) {
        const double off = window * ie / n_e;
        // right side: E in [lam, lam + window], eta >= eta* + sqrt(eta* off)
        {
            const double e = lam + off;
            const double eta_lo = eta_star + std::sqrt(eta_star * off);
            if (eta_lo < eta_max) {
                for (int ik = 0; ik <= n_eta; ++ik) {
                    const double eta =
                        eta_lo * std::pow(eta_max / eta_lo, static_cast<double>(ik) / n_eta);
                    const double im = stieltjes(spec, {e, eta}, 0).imag();
                    const double ratio = im / std::sqrt(off + eta);
                    rep.right_ratio_min = std::min(rep.right_ratio_min, ratio);
                    rep.right_ratio_max = std::max(rep.right_ratio_max, ratio);
                }
            }
        }
        // left side: E in [lam - window, lam], eta >= eta*
        {
            const double e = lam - off;
            if (eta_star < eta_max) {
                for (int ik = 0; ik <= n_eta; ++ik) {
                    const double eta =
                        eta_star * std::pow(eta_max / eta_star, static_cast<double>(ik) / n_eta);
                    const double im = stieltjes(spec, {e, eta}, 0).imag();
                    const double ratio = im * std::sqrt(off + eta) / eta;
                    rep.left_ratio_min = std::min(rep.left_ratio_min, ratio);
                    rep.left_ratio_max = std::max(rep.left_ratio_max, ratio);
                }
            }
        }
    }
    rep.verdict = rep.right_ratio_min >= 1.0 / c_h && rep.right_ratio_max <= c_h &&
                  rep.left_ratio_min >= 1.0 / c_h && rep.left_ratio_max <= c_h;
    return rep;
}

RigidityReport rigidity_check(const std::vector<ReplicateRecord>& records, int n_cols) {
    RigidityReport rep;
    rep.threshold = std::pow(static_cast<double>(n_cols), -2.0 / 3.0 + 0.1);
    const double n23 = std::pow(static_cast<double>(n_cols), 2.0 / 3.0);
    int within = 0;
    for (const auto& rec : records) {
        if (rec.failed) continue;
        ++rep.counted;
        const double dev = std::abs(rec.lambda_m_y - rec.lambda_minus_t);
        if (dev <= rep.threshold) ++within;
        rep.max_scaled_dev = std::max(rep.max_scaled_dev, n23 * dev);
    }
    rep.fraction_within = rep.counted > 0 ? static_cast<double>(within) / rep.counted : 0.0;
    return rep;
}

InterlacingReport interlacing_check(const Decomposition& decomp) {
    InterlacingReport rep;
    MinorSpectra minors;
    try {
        minors = minor_spectra(decomp);
    } catch (const ConfigError& e) {
        rep.skipped = true;
        rep.reason = e.what();
        return rep;
    }
    const Spectrum sx = covariance_spectrum(decomp.x_part());
    rep.lower = minors.col_removed.smallest();
    rep.mid = sx.smallest();
    rep.upper = minors.row_removed.smallest();
    rep.ok = rep.lower <= rep.mid + 1e-9 && rep.mid <= rep.upper + 1e-9;
    return rep;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace

void export_results(const EnsembleResult& result, const ExperimentConfig& cfg,
                    const std::string& reports_json, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream csv(fs::path(out_dir) / "records.csv", std::ios::binary);
        if (!csv) throw ConfigError("export: cannot open records.csv for writing");
        csv << "seed,good_psi,t,lambda_M_Y,lambda_M_X,zeta_minus,lambda_minus_t,gamma_N,tw_stat\n";
        for (const auto& rec : result.records) {
            if (rec.failed) continue;
            csv << rec.seed << ',' << (rec.good_psi ? 1 : 0) << ',' << fmt17(rec.t) << ','
                << fmt17(rec.lambda_m_y) << ',' << fmt17(rec.lambda_m_x) << ','
                << fmt17(rec.zeta_minus) << ',' << fmt17(rec.lambda_minus_t) << ','
                << fmt17(rec.gamma_n) << ',' << fmt17(rec.tw_stat) << '\n';
        }
    }
    {
        std::ofstream csv(fs::path(out_dir) / "spectra_X.csv", std::ios::binary);
        for (std::size_t r = 0; r < result.spectra_x.size(); ++r) {
            if (result.records[r].failed) continue;
            csv << result.records[r].seed;
            for (double v : result.spectra_x[r]) csv << ',' << fmt17(v);
            csv << '\n';
        }
    }
    {
        json summary;
        summary["config"] = json::parse(config_to_json(cfg));
        summary["reports"] = reports_json.empty() ? json::object() : json::parse(reports_json);
        summary["good_fraction"] = result.good_fraction;
        summary["failures"] = result.failures;
        json fails = json::array();
        for (const auto& rec : result.records) {
            if (rec.failed) {
                fails.push_back({{"seed", rec.seed}, {"error", rec.failure}});
            }
        }
        summary["failure_details"] = fails;
        const ThetaSpec spec = build_theta(cfg.alpha, cfg.s0);
        summary["theory"] = {{"c_const", spec.c_const},
                             {"core_height", spec.core_height},
                             {"tail_amplitude", spec.tail_amplitude}};
        std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
        if (!js) throw ConfigError("export: cannot open summary.json for writing");
        js << summary.dump(2) << '\n';
    }
    {
        std::ofstream sc(fs::path(out_dir) / "summary.schema.json", std::ios::binary);
        sc << ensemble_json_schema() << '\n';
    }
}

std::vector<ReplicateRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_records_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("read_records_csv: empty file");
    const std::string expect =
        "seed,good_psi,t,lambda_M_Y,lambda_M_X,zeta_minus,lambda_minus_t,gamma_N,tw_stat";
    if (line != expect) throw ConfigError("read_records_csv: unexpected header: " + line);
    std::vector<ReplicateRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw ConfigError("read_records_csv: bad row: " + line);
        ReplicateRecord rec;
        rec.seed = std::stoull(cells[0]);
        rec.good_psi = cells[1] == "1";
        rec.t = std::stod(cells[2]);
        rec.lambda_m_y = std::stod(cells[3]);
        rec.lambda_m_x = std::stod(cells[4]);
        rec.zeta_minus = std::stod(cells[5]);
        rec.lambda_minus_t = std::stod(cells[6]);
        rec.gamma_n = std::stod(cells[7]);
        rec.tw_stat = std::stod(cells[8]);
        rec.edge_fluct = rec.lambda_minus_t;
        out.push_back(rec);
    }
    return out;
}

std::string ensemble_json_schema() {
    return R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "rmtedge ensemble summary",
  "type": "object",
  "required": ["config", "reports", "good_fraction", "failures", "theory"],
  "properties": {
    "config": {
      "type": "object",
      "required": ["alpha", "M", "N", "mode", "replicates", "master_seed"],
      "properties": {
        "alpha": {"type": "number"},
        "s0": {"type": "number"},
        "M": {"type": "integer"},
        "N": {"type": "integer"},
        "c_N": {"type": "number"},
        "mode": {"enum": ["paper-eps", "direct-t"]},
        "eps_a": {"type": "number"},
        "eps_b": {"type": "number"},
        "t_target": {"type": "number"},
        "heavy_theta": {"type": "number"},
        "arm": {"enum": ["heavy", "gdm"]},
        "replicates": {"type": "integer"},
        "master_seed": {"type": "integer"},
        "workers": {"type": "integer"},
        "output_path": {"type": "string"}
      }
    },
    "reports": {"type": "object"},
    "good_fraction": {"type": "number"},
    "failures": {"type": "integer"},
    "failure_details": {"type": "array"},
    "theory": {
      "type": "object",
      "required": ["c_const"],
      "properties": {
        "c_const": {"type": "number"},
        "core_height": {"type": "number"},
        "tail_amplitude": {"type": "number"}
      }
    }
  }
})";
}

}  // namespace rmtedge
