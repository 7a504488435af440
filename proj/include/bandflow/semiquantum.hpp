#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bandflow/linalg.hpp"
#include "bandflow/params.hpp"
#include "bandflow/quantum.hpp"

namespace bandflow::semiquantum {

/// Point of the unit sphere of slow variables (x1, x2, x3).
struct SpherePoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 1.0;

    /// Polar angle theta from +e3, azimuth phi.
    static SpherePoint from_angles(double theta, double phi);
    /// Throws ConfigError unless the norm is 1 to 1e-12.
    void validate() const;
};

/// 2 S_z f(x3) + gamma S_- (x1 + i x2) + conj(gamma) S_+ (x1 - i x2)
/// in the basis S_z = S, S-1, ..., -S.
linalg::HermitianMatrix h_semiquantum(const SpherePoint& p, const PhysParams& params);

/// Closed oriented polygonal surface approximating the unit sphere.
/// Faces are listed counter-clockwise as seen from outside.
struct SphereMesh {
    std::vector<SpherePoint> vertices;
    std::vector<std::vector<std::size_t>> faces;
    int n_theta = 0;
    int n_phi = 0;

    /// n_theta x n_phi latitude-longitude grid: quads between rings and a
    /// triangle fan around each pole, each pole being a single vertex.
    static SphereMesh lat_long(int n_theta = 64, int n_phi = 64);

    /// Same construction at twice the resolution in both directions.
    SphereMesh refined() const;

    std::size_t edge_count() const;
    int euler_characteristic() const;

    /// Throws ConfigError if a face is degenerate or inward-oriented, an
    /// edge is not shared by exactly two oppositely oriented faces, or the
    /// Euler characteristic is not 2.
    void validate() const;
};

enum class Pole { north, south };

const char* pole_name(Pole p);

struct Degeneracy {
    double A = 0.0;
    Pole pole = Pole::north;
    /// Smallest adjacent eigenvalue gap at the pole at this A.
    double gap = 0.0;
};

/// Values of A in [a_min, a_max] where eigenvalues of the semi-quantum
/// Hamiltonian touch; these sit at the poles where f(+-1) = 0. `params.A`
/// is ignored. Sorted by A, north before south on ties.
std::vector<Degeneracy> degeneracy_scan(const PhysParams& params, double a_min, double a_max);

/// Eigen-decomposition of the semi-quantum Hamiltonian at every mesh vertex.
std::vector<linalg::EigenDecomposition> vertex_eigensystems(const PhysParams& params,
                                                            const SphereMesh& mesh,
                                                            unsigned threads = 1);

/// Smallest adjacent eigenvalue gap over all vertices and the vertex where
/// it is attained.
struct GapInfo {
    double min_gap = 0.0;
    std::size_t vertex = 0;
    double max_abs_eigenvalue = 0.0;
};

GapInfo gap_info(const std::vector<linalg::EigenDecomposition>& eig);

/// Berry phase of band `band` around each face: arg of the product of the
/// link overlaps <v(p_i)|v(p_{i+1})> along the face boundary, in (-pi, pi].
std::vector<double> plaquette_phases(const SphereMesh& mesh,
                                     const std::vector<linalg::EigenDecomposition>& eig,
                                     std::size_t band);

/// Smallest |<v(p_i)|v(p_j)>| over mesh edges for one band.
double min_link_overlap(const SphereMesh& mesh, const std::vector<linalg::EigenDecomposition>& eig,
                        std::size_t band);

struct ChernOptions {
    unsigned threads = 1;
    /// Gap tolerance relative to the largest |eigenvalue| over the mesh.
    double rel_gap_tol = 1e-8;
    double max_residual = 0.05;
    double min_overlap = 1e-3;
};

struct ChernReport {
    PhysParams params;
    double A = 0.0;
    /// Ascending band order.
    std::vector<int> chern;
    /// Unrounded per-band sums.
    std::vector<double> raw;
    double min_gap = 0.0;
    double max_residual = 0.0;
    bool valid = false;
    std::optional<std::size_t> offending_vertex;
    std::string message;
};

/// Chern number of each eigenline bundle, (1/2pi) times the integrated
/// curvature of i<v|dv> over the outward-oriented sphere. For the band with
/// eigenvalue 2r of 2 S.x this is -2r.
///
/// If the gap closes anywhere on the mesh the report comes back invalid and
/// names the vertex. Throws MeshTooCoarse if a sum is not within
/// max_residual of an integer or a link overlap drops below min_overlap.
ChernReport chern_numbers(const PhysParams& params, const SphereMesh& mesh,
                          const ChernOptions& options = {});

/// after - before, componentwise. Throws NumericalRefusal on an invalid
/// report and ConfigError on mismatched band counts.
std::vector<int> delta_chern(const ChernReport& before, const ChernReport& after);

/// Semi-quantum model whose walls coincide with the zero crossings of the
/// quantum one-dimensional blocks: x = L_vec / L, so delta -> delta L,
/// d -> d L^2, gamma -> gamma L. A is unchanged.
PhysParams semiquantum_counterpart(const PhysParams& quantum_params);

struct CountingRow {
    int band = 0;
    int levels = 0;
    int chern = 0;
    int expected = 0;
    bool pass = false;
};

struct CountingReport {
    bool conclusive = false;
    bool pass = false;
    std::vector<CountingRow> rows;
    std::string message;
};

/// Checks N_b = 2L + 1 - Ch_b band by band. `chern` must have been computed
/// for semiquantum_counterpart(params) at the same A (ConfigError
/// otherwise). Unassigned levels make the report inconclusive.
CountingReport verify_counting(const PhysParams& params, const ChernReport& chern,
                               const quantum::BandDecomposition& bands);

} // namespace bandflow::semiquantum
