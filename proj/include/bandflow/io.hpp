#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bandflow/classical.hpp"
#include "bandflow/half_integer.hpp"
#include "bandflow/lattice.hpp"
#include "bandflow/params.hpp"
#include "bandflow/quantum.hpp"

namespace bandflow::io {

inline constexpr int schema_version = 1;

/// Closed loop for the monodromy command. Either explicit waypoints, or a
/// rectangle around a subset of the interior critical values of the
/// energy-momentum map (indices in ascending jz order).
struct LoopSpec {
    std::string name;
    std::vector<lattice::Waypoint> waypoints;
    std::vector<int> around;
    double half_width = 2.0;
    double half_height = 40.0;
    lattice::Orientation orientation = lattice::Orientation::clockwise;
};

struct RunConfig {
    PhysParams model;
    bool has_A = false;
    std::vector<double> a_grid;

    int mesh_n_theta = 64;
    int mesh_n_phi = 64;
    /// Evaluate Chern numbers for the rescaled counterpart of a quantum
    /// model instead of the unit-sphere parameters as given.
    bool chern_counterpart = false;

    std::vector<double> emmap_jz;
    int emmap_scan_points = 2001;
    int emmap_sample_check = 0;

    std::vector<double> dh_jz;

    std::vector<LoopSpec> loops;

    /// Representative A values for the flow command; defaults to a_grid.
    std::vector<double> flow_points;

    std::optional<std::string> out_dir;
};

/// Parses and validates a JSON run configuration. Throws ConfigError with
/// the offending key on any schema violation.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double x);
/// Inverse of format_double; throws ConfigError on malformed input.
double parse_double(const std::string& s);

/// Writes `content` to a temporary file beside `path` and renames it over
/// `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct SpectrumRow {
    double A = 0.0;
    HalfInt jz;
    int n = 0;
    double E = 0.0;
    int band = -1; // -1 when unassigned
    bool is_edge = false;

    bool operator==(const SpectrumRow&) const = default;
};

std::vector<SpectrumRow> spectrum_rows(const quantum::JointSpectrum& spectrum,
                                       const quantum::BandDecomposition& bands);
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);
std::vector<SpectrumRow> parse_spectrum_csv(const std::string& text);

struct ChernRow {
    double A = 0.0;
    int band_count = 0;
    std::vector<int> chern; // empty when invalid
    double min_gap = 0.0;
    bool valid = false;

    bool operator==(const ChernRow&) const = default;
};

std::string chern_csv(const std::vector<ChernRow>& rows);
std::vector<ChernRow> parse_chern_csv(const std::string& text);

std::string emmap_csv(const classical::EMImage& image);
std::string critical_csv(const classical::EMImage& image);
/// Reads both files back into one image.
classical::EMImage parse_emmap_csv(const std::string& boundary, const std::string& critical);

std::string dh_csv(const classical::ReducedVolumeProfile& profile);
classical::ReducedVolumeProfile parse_dh_csv(const std::string& text);

std::string flow_json(const quantum::SpectralFlowReport& report, const PhysParams& params);
quantum::SpectralFlowReport parse_flow_json(const std::string& text);

struct LoopResult {
    std::string name;
    std::vector<lattice::Waypoint> waypoints;
    lattice::TransportResult transport;
};

struct MonodromyOutput {
    PhysParams params;
    std::vector<lattice::Waypoint> defects;
    std::vector<LoopResult> loops;
};

std::string monodromy_json(const MonodromyOutput& out);
MonodromyOutput parse_monodromy_json(const std::string& text);

} // namespace bandflow::io
