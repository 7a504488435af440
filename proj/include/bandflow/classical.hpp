#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <utility>
#include <span>
#include <vector>

#include "bandflow/params.hpp"

namespace bandflow::classical {

using Vec3 = std::array<double, 3>;

/// Point of S^2 x S^2 with radii |S| and |L|.
struct ClassicalPoint {
    Vec3 s{0.0, 0.0, 0.0};
    Vec3 l{0.0, 0.0, 0.0};

    static ClassicalPoint from_angles(double s_mag, double theta_s, double phi_s, double l_mag,
                                      double theta_l, double phi_l);

    /// Throws ConfigError unless |s| = s_mag and |l| = l_mag to 1e-12
    /// (relative).
    void validate(double s_mag, double l_mag) const;
};

/// Classical radii taken from the quantum numbers: |S| = S, |L| = L.
double spin_amplitude(const PhysParams& params);
double orbital_amplitude(const PhysParams& params);

/// SO(2)-invariant coordinates of a point.
struct ReducedPoint {
    double sz = 0.0;
    double lz = 0.0;
    double tau = 0.0;   // Sx Lx + Sy Ly
    double sigma = 0.0; // Sx Ly - Sy Lx

    double kz() const { return sz - lz; }
    double jz() const { return sz + lz; }

    /// sigma^2 - [(|S|^2 - Sz^2)(|L|^2 - Lz^2) - tau^2].
    double syzygy_residual(double s_mag, double l_mag) const;
};

ReducedPoint reduce(const ClassicalPoint& p);

/// 2 Sz f(Lz) + 2 Re(gamma) tau - 2 Im(gamma) sigma.
double h_classical(const ClassicalPoint& p, const PhysParams& params);
double h_classical(const ReducedPoint& r, const PhysParams& params);

enum class CriticalLocation { boundary, interior };

const char* location_name(CriticalLocation loc);

struct CriticalValue {
    double jz = 0.0;
    double energy = 0.0;
    double sz = 0.0;
    double lz = 0.0;
    CriticalLocation location = CriticalLocation::boundary;
};

struct EMImage {
    std::vector<double> jz;
    std::vector<double> e_min;
    std::vector<double> e_max;
    std::vector<CriticalValue> critical_values;
};

struct EMOptions {
    int scan_points = 2001;
    /// Interior margin as a fraction of the slice span.
    double rel_margin = 1e-6;
    unsigned threads = 1;
};

/// Energy range of the fiber over J_z = jz. Throws ConfigError when the
/// slice is empty (|jz| > |L| + |S|).
std::pair<double, double> em_slice(const PhysParams& params, double jz, const EMOptions& options = {});

/// Image of (H, J_z) sampled at the given jz values, plus the images of the
/// four singular orbits (Sz, Lz) = (+-|S|, +-|L|) classified against the
/// slice through them. Requires gamma != 0.
EMImage em_image(const PhysParams& params, std::span<const double> jz_samples,
                 const EMOptions& options = {});

/// Smallest and largest energy over `samples` random points of the fiber
/// J_z = jz (Sz uniform on its interval, both azimuths uniform). A direct
/// check of em_slice that never uses the reduced formula.
std::pair<double, double> sampled_slice_range(const PhysParams& params, double jz, int samples,
                                              std::mt19937_64& rng);

/// jz values spread evenly over [-(|L|+|S|), |L|+|S|], endpoints included.
std::vector<double> uniform_jz_grid(const PhysParams& params, int count);

struct ReducedVolumeProfile {
    std::vector<double> jz;
    std::vector<double> volume;
};

/// Length of the allowed Sz interval at each jz. The jz-marginal of the
/// product area measure on S^2 x S^2 is 4 pi^2 |S| |L| times this.
ReducedVolumeProfile dh_volume(double s_mag, double l_mag, std::span<const double> jz_samples);

/// Kink locations of the profile: +-(|L| - |S|), +-(|L| + |S|), deduplicated
/// and ascending.
std::vector<double> dh_kinks(double s_mag, double l_mag);

struct OrbitSpaceReport {
    std::size_t samples = 0;
    double max_syzygy_residual = 0.0;
    /// Largest tau^2 - (|S|^2 - Sz^2)(|L|^2 - Lz^2); should be <= 0.
    double max_tau_excess = 0.0;
    bool pass = false;
};

OrbitSpaceReport orbit_space_check(std::span<const ClassicalPoint> points, double s_mag, double l_mag,
                                   double tol = 1e-10);

} // namespace bandflow::classical
