#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bandflow/half_integer.hpp"
#include "bandflow/quantum.hpp"

namespace bandflow::lattice {

/// Lattice site: J_z column and ascending index inside the column.
struct SiteAddress {
    HalfInt jz;
    int n = 0;

    auto operator<=>(const SiteAddress&) const = default;
};

/// Joint spectrum viewed as points (jz, E) arranged in columns.
class QuantumLattice {
public:
    QuantumLattice() = default;
    static QuantumLattice from_spectrum(const quantum::JointSpectrum& spectrum);

    bool empty() const { return columns_.empty(); }
    const std::map<HalfInt, std::vector<double>>& columns() const { return columns_; }

    bool has_column(HalfInt jz) const { return columns_.contains(jz); }
    bool has_site(const SiteAddress& s) const;
    /// Throws TransportError for a missing site.
    double energy(const SiteAddress& s) const;
    int column_size(HalfInt jz) const;

    /// Site of column jz closest in energy to e. Throws TransportError if
    /// the column is missing or two sites are equally close within
    /// tie_rel * (local level spacing).
    SiteAddress nearest_site(HalfInt jz, double e, double tie_rel = 1e-9) const;

    /// Median spacing between adjacent levels over all columns.
    double typical_spacing() const;

private:
    std::map<HalfInt, std::vector<double>> columns_;
};

/// Cell spanned by u = (0, 1) and v = (1, v_offset) in (jz-step, n-step)
/// coordinates, anchored at origin.
struct LatticeCell {
    SiteAddress origin;
    int v_offset = 0;

    SiteAddress u_corner() const { return {origin.jz, origin.n + 1}; }
    SiteAddress v_corner() const { return {origin.jz + 1, origin.n + v_offset}; }
    SiteAddress uv_corner() const { return {origin.jz + 1, origin.n + v_offset + 1}; }

    bool fits(const QuantumLattice& lat) const;

    bool operator==(const LatticeCell&) const = default;
};

/// Integer 2x2 matrix; row i holds the coordinates of the i-th transported
/// basis vector (u, then v) in the initial (u, v) basis.
struct MonodromyMatrix {
    std::array<std::array<int, 2>, 2> m{{{1, 0}, {0, 1}}};

    static MonodromyMatrix identity() { return {}; }
    int det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    int trace() const { return m[0][0] + m[1][1]; }
    /// Inverse of a determinant-one matrix.
    MonodromyMatrix inverse() const;
    std::string str() const;

    bool operator==(const MonodromyMatrix&) const = default;
};

MonodromyMatrix operator*(const MonodromyMatrix& a, const MonodromyMatrix& b);

struct Waypoint {
    double jz = 0.0;
    double energy = 0.0;
};

/// Sense of traversal in the (jz, E) plane, jz horizontal and E vertical.
/// A clockwise loop around one focus-focus defect gives [[1,0],[-1,1]].
enum class Orientation { clockwise, counterclockwise };

const char* orientation_name(Orientation o);

/// Sense of a closed polyline from the sign of its enclosed area.
Orientation loop_orientation(std::span<const Waypoint> loop);

/// Axis-aligned rectangle around (jz, E) starting from its lower-left corner.
std::vector<Waypoint> rectangle_loop(double jz, double energy, double half_width, double half_height,
                                     Orientation orientation = Orientation::clockwise);

struct TransportOptions {
    /// Polyline sampling step in units of one column (jz) and of the
    /// typical level spacing (E).
    double step = 0.1;
    double tie_rel = 1e-9;
};

struct TransportResult {
    LatticeCell start;
    LatticeCell final;
    MonodromyMatrix matrix;
    int horizontal_steps = 0;
    int vertical_steps = 0;
    /// Cell after every step, in order.
    std::vector<LatticeCell> trace;
    std::string basis = "u = (0, 1), v = (1, m) in (jz-step, n-step) coordinates";
};

/// Cell at the site nearest to `at`, with v pointing to the site of the
/// next column closest in energy.
LatticeCell initial_cell(const QuantumLattice& lat, const Waypoint& at,
                         const TransportOptions& options = {});

/// Carries `start` along the closed polyline `loop` (the first waypoint is
/// repeated implicitly at the end). Each step moves the origin by one
/// column or one level. After every step v is re-chosen as the site of the
/// column to the right whose energy continues the previous v edge: the
/// corner nearest to E(origin) + [E(v corner) - E(origin)]_previous.
///
/// Throws TransportError on a nearest-site tie or when a cell corner leaves
/// the lattice.
TransportResult transport_cell(const QuantumLattice& lat, const LatticeCell& start,
                               std::span<const Waypoint> loop, const TransportOptions& options = {});

} // namespace bandflow::lattice
