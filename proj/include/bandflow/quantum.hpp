#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bandflow/half_integer.hpp"
#include "bandflow/linalg.hpp"
#include "bandflow/params.hpp"

namespace bandflow::quantum {

/// |V_k; L, M_L> with pseudo-spin projection k and orbital projection M_L.
struct BasisState {
    HalfInt k;
    HalfInt m_l;
};

/// Restriction of H to the eigenspace J_z = jz. The basis is ordered by
/// M_L descending (equivalently k ascending).
struct JzBlock {
    HalfInt jz;
    std::vector<BasisState> basis;
    linalg::HermitianMatrix matrix;

    std::size_t dim() const { return basis.size(); }
};

/// Number of (k, M_L) pairs with |k| <= S, |M_L| <= L, k + M_L = jz.
std::size_t block_dim(HalfInt S, int L, HalfInt jz);

JzBlock jz_block(const PhysParams& params, HalfInt jz);

/// One block per jz in -(L+S), ..., L+S, ascending.
std::vector<JzBlock> jz_blocks(const PhysParams& params);

/// Address of a level: J_z value and ascending index inside its block.
/// Within-block eigenvalues do not cross under variation of A, so this
/// identifies a level along a sweep.
struct LevelId {
    HalfInt jz;
    int n = 0;

    auto operator<=>(const LevelId&) const = default;
};

struct Level {
    HalfInt jz;
    int n = 0;
    double energy = 0.0;
    /// <S_z> in the eigenvector; diagnostic only, never used for banding.
    double sz_expectation = 0.0;

    LevelId id() const { return LevelId{jz, n}; }
};

struct JointSpectrum {
    PhysParams params;
    std::vector<Level> levels; // jz ascending, then n ascending

    std::vector<double> energies() const;
};

JointSpectrum joint_spectrum(const PhysParams& params);

/// Edge states live in blocks of non-maximal dimension: |jz| > L - S.
bool is_edge(const PhysParams& params, HalfInt jz);

struct BandDecomposition {
    /// bands[b] for b = 0 .. 2S ascending in energy; each band sorted by energy.
    std::vector<std::vector<Level>> bands;
    std::vector<Level> unassigned;
    /// Smallest separation between band b and band b+1 over the bulk columns.
    std::vector<double> gaps;

    bool clean() const { return unassigned.empty(); }
    std::vector<int> counts() const;
    std::optional<int> band_of(const LevelId& id) const;
};

struct BandOptions {
    /// An edge level is assigned only if its distance to the predicted
    /// position of its band is at most this fraction of the distance to the
    /// nearest other band's prediction.
    double ambiguity_ratio = 0.5;
    /// Relative gap tolerance of the energy-projection fallback.
    double rel_gap_tol = 1e-6;
};

/// Groups the joint spectrum into 2S+1 bands in the (J_z, E) plane.
///
/// Bulk columns (|jz| <= L - S) have exactly 2S+1 levels whose eigenvalues
/// never cross under variation of A, so level n of a bulk column belongs to
/// band n. Edge columns are visited outward from the bulk; each band's sheet
/// is extrapolated linearly from its last two columns and the column's levels
/// are matched to distinct bands, preserving energy order, at minimal total
/// distance. A level whose match is not decisive (see BandOptions) is
/// reported as unassigned. When L < S there is no bulk column and the
/// spectrum is split at its 2S largest energy gaps instead.
BandDecomposition assign_bands(const JointSpectrum& spectrum, const BandOptions& options = {});

/// Energy-projection rule: split the sorted energies at the 2S largest gaps;
/// levels bordering a cut narrower than rel_gap_tol * width are unassigned.
BandDecomposition assign_bands_by_energy_gaps(const JointSpectrum& spectrum,
                                              double rel_gap_tol = 1e-6);

/// redistribution[j][k] = number of levels moving from band j to band k.
using Redistribution = std::vector<std::vector<int>>;

struct SpectralFlowReport {
    std::vector<double> domain_points;
    int band_count = 0;
    /// Band populations at each domain point, indexed by b ascending.
    std::vector<std::vector<int>> band_counts;
    /// One entry per adjacent pair (A_i, A_{i+1}).
    std::vector<Redistribution> redistributions;
    /// Delta N_b per adjacent pair, indexed by b ascending.
    std::vector<std::vector<int>> local_flow;
    std::vector<int> global_flow;
};

/// Local and global spectral flow across ascending representative A values.
/// `base.A` is ignored. Throws NumericalRefusal if any point leaves levels
/// unassigned, ConfigError if the points are not strictly ascending.
SpectralFlowReport sweep_spectral_flow(const PhysParams& base, std::span<const double> a_points,
                                       unsigned threads = 1);

} // namespace bandflow::quantum
