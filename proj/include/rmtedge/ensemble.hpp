#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmtedge/decomposition.hpp"
#include "rmtedge/spectral.hpp"
#include "rmtedge/theta.hpp"

namespace rmtedge {

enum class EpsMode { PaperEps, DirectT };
enum class EnsembleArm { Heavy, Gdm };

struct ExperimentConfig {
    double alpha = 3.0;
    double s0 = 1.0;
    int m_rows = 0;
    int n_cols = 0;
    EpsMode mode = EpsMode::PaperEps;
    // paper-eps mode (0 means use the defaults)
    double eps_a = 0.0;
    double eps_b = 0.0;
    // direct-t mode
    double t_target = 0.0;
    double heavy_theta = 0.0;   // C threshold in Theta units; 0 -> N^{1/2 - eps_b_default}
    EnsembleArm arm = EnsembleArm::Heavy;
    int replicates = 1;
    std::uint64_t master_seed = 0;
    int workers = 1;
    std::string output_path;

    double c_n() const { return static_cast<double>(m_rows) / n_cols; }
    void validate() const;
    DecompositionParams make_params(const ThetaSpec& spec) const;
};

// parse/serialize; unknown keys rejected
ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

struct ReplicateRecord {
    std::uint64_t seed = 0;
    double lambda_m_y = 0.0;     // smallest eigenvalue of the comparison arm (S(Y) or S(V_t))
    double lambda_m_x = 0.0;     // smallest eigenvalue of S(X)
    double lambda_minus_t = 0.0;
    double zeta_minus = 0.0;
    double gamma_n = 0.0;
    double t = 0.0;
    bool good_psi = false;
    double tw_stat = 0.0;        // gamma_N M^{2/3} (lambda_M_Y - lambda_{-,t})
    double edge_fluct = 0.0;     // = lambda_minus_t
    bool failed = false;
    std::string failure;
};

struct EnsembleResult {
    std::vector<ReplicateRecord> records;          // all replicates, index = replicate
    std::vector<std::vector<double>> spectra_x;    // per-replicate S(X) eigenvalues
    double good_fraction = 0.0;
    int failures = 0;
};

// Per replicate: sample Y, decompose, X = B + C, edge solve on S(X),
// smallest eigenvalue of the arm matrix. Deterministic for a given
// master_seed regardless of worker count. Throws when >10% of replicates
// fail or the good-Psi frequency drops below 0.99.
EnsembleResult run_edge_ensemble(const ExperimentConfig& cfg);
EnsembleResult run_gdm_ensemble(const ExperimentConfig& cfg);

struct ComparisonReport {
    double ks_distance = 0.0;
    int n_a = 0;
    int n_b = 0;
    double mean_diff = 0.0;
    double std_ratio = 0.0;
    double threshold = 0.0;
    bool verdict = false;
};

// exact two-sample sup-CDF distance by merge scan
ComparisonReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                               double threshold = 1.0);

// KS distance of a sample against the standard normal CDF
double ks_vs_normal(std::vector<double> sample);

struct RegularityReport {
    double right_ratio_min = 0.0, right_ratio_max = 0.0;
    double left_ratio_min = 0.0, left_ratio_max = 0.0;
    bool verdict = false;
    double c_h = 10.0;
};

// Im m_X scaling around the smallest eigenvalue per the eta*-regularity
// domains; `window` caps both |E - lambda_-| and eta.
RegularityReport regularity_check(const Spectrum& spec, double eta_star, double window,
                                  double c_h = 10.0);

struct RigidityReport {
    double fraction_within = 0.0;
    double max_scaled_dev = 0.0;   // max N^{2/3} |lambda_M - lambda_{-,t}|
    double threshold = 0.0;        // N^{-2/3+0.1}
    int counted = 0;
};

RigidityReport rigidity_check(const std::vector<ReplicateRecord>& records, int n_cols);

// both interlacing inequalities with 1e-9 slack; degenerate masks skip
struct InterlacingReport {
    bool ok = false;
    bool skipped = false;
    std::string reason;
    double lower = 0.0, mid = 0.0, upper = 0.0;
};

InterlacingReport interlacing_check(const Decomposition& decomp);

// records.csv with pinned columns, spectra_X.csv, summary.json (+ echoed
// config, reports, theory constants); UTF-8, '.' decimal, locale-free.
void export_results(const EnsembleResult& result, const ExperimentConfig& cfg,
                    const std::string& reports_json, const std::string& out_dir);

// re-read records.csv (used by `check` and the round-trip tests)
std::vector<ReplicateRecord> read_records_csv(const std::string& path);

std::string ensemble_json_schema();

}  // namespace rmtedge
