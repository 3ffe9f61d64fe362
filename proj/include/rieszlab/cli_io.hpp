#pragma once

// Configuration, reporting and the end-to-end pipeline.
//
// Configs are JSON with a fixed key set; complex numbers are [re, im]
// pairs.  Parsing then re-serializing a config is idempotent after
// canonicalization (sorted keys, fixed indentation), and the canonical text
// is what gets hashed into report provenance, so identical runs produce
// byte-identical reports.
//
// The pipeline runs audit -> continuous margin -> tau-grid margin scan ->
// simulation at the chosen tau -> decay fits (-> optional resolvent scan),
// recording stage-tagged errors and certificate booleans along the way.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rieszlab/decay_lab.hpp"
#include "rieszlab/generators.hpp"
#include "rieszlab/modal_core.hpp"
#include "rieszlab/resolvent_probe.hpp"
#include "rieszlab/stability.hpp"

namespace rieszlab {

using Json = nlohmann::json;

enum class GeneratorKind { Explicit, SyntheticPolynomial, WavePerturbed };
enum class FeedbackSource { Generator, Given, Designed };

struct X0Config {
    std::string law = "power"; // "power", "power_log", "explicit"
    double q = 1.5;            // coeff_n = n^{-q} (log(n+1))^{s}
    double s = 0.0;
    bool normalize = true;
    std::vector<Complex> coeffs; // law == "explicit"
};

struct F2Config {
    double scale = 0.0;
    std::size_t support = 0;
    double exponent = 2.0;
};

struct SystemConfig {
    GeneratorKind generator = GeneratorKind::SyntheticPolynomial;
    SectorParams sector;

    // synthetic_polynomial
    std::size_t N = 100;
    std::optional<double> upsilon_scale; // defaults to sector.upsilon
    PowerLaw b_law{1.0, 2.0};
    PowerLaw f_law{0.0, 2.0};

    // wave_perturbed
    std::size_t N_pairs = 50;
    std::vector<double> b0_coeffs;

    // explicit
    std::vector<ModeTriple> explicit_modes;
    TailSums explicit_tails;

    double beta = 0.0;
    double gamma = 0.0;

    FeedbackSource feedback_source = FeedbackSource::Generator;
    std::vector<Complex> given_f;
    std::vector<Complex> targets;
    std::optional<F2Config> f2;

    std::optional<double> tau;       // default: tau_star / 2
    std::vector<double> tau_grid;    // ascending
    std::optional<double> eps_floor; // default: eps_c / 2

    double t_end = 1e3;
    std::size_t substeps = 4;
    X0Config x0;
    std::optional<std::pair<double, double>> fit_window; // default: trailing half log span
    bool run_equivalence = false;

    double axis_w_min = 1e-2, axis_w_max = 1e3;
    std::size_t axis_points = 800;
    std::vector<Complex> probes;
    std::size_t circle_nodes = 256;
    std::size_t radii_levels = 18;
    std::optional<double> scan_delta; // resolvent scan scaling exponent
    std::size_t scan_nodes = 2048;
    std::size_t exterior_count = 0;   // random exterior |1-H| scan size

    std::string out_dir;
    bool write_csv = true;
    std::uint64_t seed = 1;

    Json canonical() const;      // canonical JSON form (round-trip fixed point)
    std::string canonical_text() const;
};

SystemConfig parse_config(const Json& j);
SystemConfig parse_config_text(const std::string& text);

// Log-spaced frequency magnitudes in [axis_w_min, axis_w_max], swept on both
// half-axes, plus the origin — the grid the pipeline feeds to the continuous
// margin scan.
std::vector<double> default_axis_grid(const SystemConfig& cfg);

// FNV-1a 64-bit over the canonical text, hex encoded.
std::string config_hash(const SystemConfig& cfg);

// Instantiates the configured family and applies the configured feedback.
// Designed targets are solved here; the returned design is empty otherwise.
struct BuiltSystem {
    TruncatedSystem sys;
    FeedbackDesign design;
    StateVec x0;
};
BuiltSystem build_system(const SystemConfig& cfg);

struct RunReport {
    std::string config_hash;
    std::uint64_t seed = 0;

    AssumptionReport audit;
    SpectrumSplit split;

    bool ran_margins = false;
    ContinuousMargin continuous;
    TauStarScan tau_scan;
    double floor_used = 0.0;

    std::optional<double> chosen_tau;
    std::optional<Trajectory> trajectory;
    std::vector<DecayFit> fits;
    std::optional<EquivalenceReport> equivalence;
    std::optional<ScanTable> scan;
    std::optional<ScanTable> scan_adjoint;

    bool audit_pass = false;
    bool tau_star_found = false;
    bool overall_pass = false;

    Json to_json() const;
};

// Full deterministic pipeline.  Certificate failures (audit fail, no
// certifiable tau) stop the pipeline early and are reported in the
// certificate booleans; genuine errors are rethrown as PipelineError with
// the failing stage tag.
RunReport run_pipeline(const SystemConfig& cfg);

// CSV writers (columns pinned by the report format).
void write_margins_csv(const std::string& path, const TauStarScan& scan);
void write_scan_csv(const std::string& path, const ScanTable& table);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_fits_csv(const std::string& path, const std::vector<DecayFit>& fits);
Trajectory read_trajectory_csv(const std::string& path);

const char* model_name(DecayModel m);

} // namespace rieszlab
