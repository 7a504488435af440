#include "bandflow/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bandflow/errors.hpp"

namespace bandflow::lattice {

QuantumLattice QuantumLattice::from_spectrum(const quantum::JointSpectrum& spectrum)
{
    QuantumLattice lat;
    for (const auto& l : spectrum.levels) {
        lat.columns_[l.jz].push_back(l.energy);
    }
    for (auto& [jz, col] : lat.columns_) {
        std::sort(col.begin(), col.end());
    }
    return lat;
}

bool QuantumLattice::has_site(const SiteAddress& s) const
{
    const auto it = columns_.find(s.jz);
    return it != columns_.end() && s.n >= 0 && s.n < static_cast<int>(it->second.size());
}

double QuantumLattice::energy(const SiteAddress& s) const
{
    if (!has_site(s)) {
        throw TransportError("site (" + s.jz.str() + ", " + std::to_string(s.n) +
                             ") is outside the joint spectrum");
    }
    return columns_.at(s.jz)[static_cast<std::size_t>(s.n)];
}

int QuantumLattice::column_size(HalfInt jz) const
{
    const auto it = columns_.find(jz);
    return it == columns_.end() ? 0 : static_cast<int>(it->second.size());
}

SiteAddress QuantumLattice::nearest_site(HalfInt jz, double e, double tie_rel) const
{
    const auto it = columns_.find(jz);
    if (it == columns_.end() || it->second.empty()) {
        throw TransportError("column jz = " + jz.str() + " is outside the joint spectrum");
    }
    const auto& col = it->second;
    const auto pos = std::lower_bound(col.begin(), col.end(), e);
    int best = static_cast<int>(pos - col.begin());
    if (best == static_cast<int>(col.size())) {
        --best;
    } else if (best > 0 && e - col[best - 1] <= col[best] - e) {
        --best;
    }
    // Compare against the other neighbour of e for ties.
    const int other = col[best] <= e ? best + 1 : best - 1;
    if (other >= 0 && other < static_cast<int>(col.size())) {
        const double d_best = std::abs(col[best] - e);
        const double d_other = std::abs(col[other] - e);
        const double spacing = std::abs(col[other] - col[best]);
        if (d_other - d_best <= tie_rel * spacing) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "energy " << e << " is equidistant from levels " << best << " and " << other
                << " of column jz = " << jz.str() << "; re-route the loop";
            throw TransportError(msg.str());
        }
    }
    return SiteAddress{jz, best};
}

double QuantumLattice::typical_spacing() const
{
    std::vector<double> gaps;
    for (const auto& [jz, col] : columns_) {
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            gaps.push_back(col[i + 1] - col[i]);
        }
    }
    if (gaps.empty()) {
        return 1.0;
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double g = gaps[gaps.size() / 2];
    return g > 0.0 ? g : 1.0;
}

bool LatticeCell::fits(const QuantumLattice& lat) const
{
    return lat.has_site(origin) && lat.has_site(u_corner()) && lat.has_site(v_corner()) &&
           lat.has_site(uv_corner());
}

MonodromyMatrix MonodromyMatrix::inverse() const
{
    MonodromyMatrix r;
    r.m = {{{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}}};
    return r;
}

std::string MonodromyMatrix::str() const
{
    return "[[" + std::to_string(m[0][0]) + "," + std::to_string(m[0][1]) + "],[" +
           std::to_string(m[1][0]) + "," + std::to_string(m[1][1]) + "]]";
}

MonodromyMatrix operator*(const MonodromyMatrix& a, const MonodromyMatrix& b)
{
    MonodromyMatrix r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        }
    }
    return r;
}

const char* orientation_name(Orientation o)
{
    return o == Orientation::clockwise ? "clockwise" : "counterclockwise";
}

Orientation loop_orientation(std::span<const Waypoint> loop)
{
    double area2 = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % loop.size()];
        area2 += a.jz * b.energy - b.jz * a.energy;
    }
    return area2 < 0.0 ? Orientation::clockwise : Orientation::counterclockwise;
}

std::vector<Waypoint> rectangle_loop(double jz, double energy, double half_width, double half_height,
                                     Orientation orientation)
{
    std::vector<Waypoint> loop{{jz - half_width, energy - half_height},
                               {jz + half_width, energy - half_height},
                               {jz + half_width, energy + half_height},
                               {jz - half_width, energy + half_height}};
    if (orientation == Orientation::clockwise) {
        std::reverse(loop.begin() + 1, loop.end());
    }
    return loop;
}

namespace {

HalfInt column_near(const QuantumLattice& lat, double jz)
{
    // Columns are spaced by one; pick the closest existing one.
    const auto& cols = lat.columns();
    HalfInt best = cols.begin()->first;
    for (const auto& [c, col] : cols) {
        if (std::abs(c.value() - jz) < std::abs(best.value() - jz)) {
            best = c;
        }
    }
    return best;
}

void require_fit(const QuantumLattice& lat, const LatticeCell& cell)
{
    if (!cell.fits(lat)) {
        throw TransportError("cell at (" + cell.origin.jz.str() + ", " + std::to_string(cell.origin.n) +
                             ") with v = (1, " + std::to_string(cell.v_offset) +
                             ") leaves the joint spectrum");
    }
}

} // namespace

LatticeCell initial_cell(const QuantumLattice& lat, const Waypoint& at, const TransportOptions& options)
{
    if (lat.empty()) {
        throw TransportError("empty lattice");
    }
    LatticeCell cell;
    cell.origin = lat.nearest_site(column_near(lat, at.jz), at.energy, options.tie_rel);
    const SiteAddress v = lat.nearest_site(cell.origin.jz + 1, lat.energy(cell.origin), options.tie_rel);
    cell.v_offset = v.n - cell.origin.n;
    require_fit(lat, cell);
    return cell;
}

TransportResult transport_cell(const QuantumLattice& lat, const LatticeCell& start,
                               std::span<const Waypoint> loop, const TransportOptions& options)
{
    if (loop.size() < 2) {
        throw ConfigError("a loop needs at least two waypoints");
    }
    require_fit(lat, start);

    TransportResult result;
    result.start = start;
    LatticeCell cell = start;
    const double spacing = lat.typical_spacing();

    auto v_edge = [&](const LatticeCell& c) { return lat.energy(c.v_corner()) - lat.energy(c.origin); };
    auto retarget_v = [&](LatticeCell& c, double edge) {
        const SiteAddress v = lat.nearest_site(c.origin.jz + 1, lat.energy(c.origin) + edge, options.tie_rel);
        c.v_offset = v.n - c.origin.n;
        require_fit(lat, c);
    };

    auto step_right = [&] {
        const double edge = v_edge(cell);
        cell.origin = cell.v_corner();
        cell.v_offset = 0;
        retarget_v(cell, edge);
        ++result.horizontal_steps;
        result.trace.push_back(cell);
    };
    auto step_left = [&] {
        const double edge = v_edge(cell);
        const SiteAddress o =
            lat.nearest_site(cell.origin.jz - 1, lat.energy(cell.origin) - edge, options.tie_rel);
        cell.v_offset = cell.origin.n - o.n;
        cell.origin = o;
        require_fit(lat, cell);
        ++result.horizontal_steps;
        result.trace.push_back(cell);
    };
    auto step_vertical = [&](int dn) {
        const double edge = v_edge(cell);
        cell.origin.n += dn;
        cell.v_offset -= dn;
        require_fit(lat, cell);
        retarget_v(cell, edge);
        ++result.vertical_steps;
        result.trace.push_back(cell);
    };

    // Move the origin to the site nearest (jz, e): columns first, then levels.
    auto follow = [&](double jz, double e) {
        const HalfInt target = column_near(lat, jz);
        while (cell.origin.jz < target) {
            step_right();
        }
        while (cell.origin.jz > target) {
            step_left();
        }
        const SiteAddress site = lat.nearest_site(target, e, options.tie_rel);
        while (cell.origin.n < site.n) {
            step_vertical(+1);
        }
        while (cell.origin.n > site.n) {
            step_vertical(-1);
        }
    };

    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Waypoint a = loop[i];
        const Waypoint b = loop[(i + 1) % loop.size()];
        const double span = std::max(std::abs(b.jz - a.jz), std::abs(b.energy - a.energy) / spacing);
        const int pieces = std::max(1, static_cast<int>(std::ceil(span / options.step)));
        for (int k = 1; k <= pieces; ++k) {
            const double t = static_cast<double>(k) / pieces;
            follow(a.jz + t * (b.jz - a.jz), a.energy + t * (b.energy - a.energy));
        }
    }

    if (cell.origin != start.origin) {
        throw TransportError("transport did not return to the starting site");
    }
    result.final = cell;
    result.matrix.m = {{{1, 0}, {cell.v_offset - start.v_offset, 1}}};
    return result;
}

} // namespace bandflow::lattice
