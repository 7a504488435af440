#include "bandflow/semiquantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "bandflow/errors.hpp"
#include "bandflow/parallel.hpp"

namespace bandflow::semiquantum {

using linalg::Complex;

SpherePoint SpherePoint::from_angles(double theta, double phi)
{
    return SpherePoint{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta)};
}

void SpherePoint::validate() const
{
    const double r2 = x1 * x1 + x2 * x2 + x3 * x3;
    if (!std::isfinite(r2) || std::abs(r2 - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "point (" << x1 << ", " << x2 << ", " << x3 << ") is not on the unit sphere";
        throw ConfigError(msg.str());
    }
}

linalg::HermitianMatrix h_semiquantum(const SpherePoint& p, const PhysParams& params)
{
    const auto ops = linalg::spin_operators(params.S);
    const Complex w{p.x1, p.x2};
    linalg::ComplexMatrix h = ops.sz.matrix() * Complex{2.0 * params.profile(p.x3), 0.0};
    h += ops.sminus * (params.gamma * w);
    h += ops.splus * (std::conj(params.gamma) * std::conj(w));
    return linalg::HermitianMatrix(std::move(h));
}

SphereMesh SphereMesh::lat_long(int n_theta, int n_phi)
{
    if (n_theta < 2 || n_phi < 3) {
        throw ConfigError("sphere mesh needs n_theta >= 2 and n_phi >= 3");
    }
    SphereMesh mesh;
    mesh.n_theta = n_theta;
    mesh.n_phi = n_phi;
    const double pi = std::numbers::pi;

    mesh.vertices.push_back(SpherePoint{0.0, 0.0, 1.0});
    for (int i = 1; i < n_theta; ++i) {
        const double theta = pi * i / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            mesh.vertices.push_back(SpherePoint::from_angles(theta, 2.0 * pi * j / n_phi));
        }
    }
    mesh.vertices.push_back(SpherePoint{0.0, 0.0, -1.0});
    const std::size_t south = mesh.vertices.size() - 1;

    auto ring = [n_phi](int i, int j) {
        return static_cast<std::size_t>(1 + (i - 1) * n_phi + (j % n_phi));
    };
    for (int j = 0; j < n_phi; ++j) {
        mesh.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    }
    for (int i = 1; i + 1 < n_theta; ++i) {
        for (int j = 0; j < n_phi; ++j) {
            mesh.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    for (int j = 0; j < n_phi; ++j) {
        mesh.faces.push_back({south, ring(n_theta - 1, j + 1), ring(n_theta - 1, j)});
    }
    return mesh;
}

SphereMesh SphereMesh::refined() const
{
    return lat_long(2 * n_theta, 2 * n_phi);
}

std::size_t SphereMesh::edge_count() const
{
    std::size_t directed = 0;
    for (const auto& f : faces) {
        directed += f.size();
    }
    return directed / 2;
}

int SphereMesh::euler_characteristic() const
{
    return static_cast<int>(vertices.size()) - static_cast<int>(edge_count()) +
           static_cast<int>(faces.size());
}

void SphereMesh::validate() const
{
    for (const auto& v : vertices) {
        v.validate();
    }
    std::map<std::pair<std::size_t, std::size_t>, int> directed;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& f = faces[fi];
        if (f.size() < 3) {
            throw ConfigError("face " + std::to_string(fi) + " has fewer than three vertices");
        }
        // Newell normal against the centroid direction.
        double nx = 0, ny = 0, nz = 0, cx = 0, cy = 0, cz = 0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            if (f[k] >= vertices.size()) {
                throw ConfigError("face " + std::to_string(fi) + " references a missing vertex");
            }
            const auto& a = vertices[f[k]];
            const auto& b = vertices[f[(k + 1) % f.size()]];
            nx += (a.x2 - b.x2) * (a.x3 + b.x3);
            ny += (a.x3 - b.x3) * (a.x1 + b.x1);
            nz += (a.x1 - b.x1) * (a.x2 + b.x2);
            cx += a.x1;
            cy += a.x2;
            cz += a.x3;
            if (++directed[{f[k], f[(k + 1) % f.size()]}] > 1) {
                throw ConfigError("edge (" + std::to_string(f[k]) + ", " +
                                  std::to_string(f[(k + 1) % f.size()]) +
                                  ") is used twice with the same orientation");
            }
        }
        if (nx * cx + ny * cy + nz * cz <= 0.0) {
            throw ConfigError("face " + std::to_string(fi) + " is degenerate or oriented inward");
        }
    }
    for (const auto& [e, count] : directed) {
        if (!directed.contains({e.second, e.first})) {
            throw ConfigError("edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                              ") has no oppositely oriented partner");
        }
    }
    if (euler_characteristic() != 2) {
        throw ConfigError("mesh Euler characteristic is " + std::to_string(euler_characteristic()) +
                          ", expected 2");
    }
}

const char* pole_name(Pole p)
{
    return p == Pole::north ? "north" : "south";
}

namespace {

double min_adjacent_gap(const std::vector<double>& values)
{
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        g = std::min(g, values[i + 1] - values[i]);
    }
    return g;
}

} // namespace

std::vector<Degeneracy> degeneracy_scan(const PhysParams& params, double a_min, double a_max)
{
    params.validate();
    if (params.gamma == Complex{}) {
        throw ConfigError("gamma = 0: eigenvalues touch on whole circles, degeneracies are not isolated");
    }
    if (!(a_min <= a_max)) {
        throw ConfigError("degeneracy scan needs a_min <= a_max");
    }
    if (params.S.twice() == 0) {
        return {};
    }

    std::vector<Degeneracy> out;
    const std::pair<Pole, double> roots[] = {{Pole::north, -params.d - params.delta},
                                             {Pole::south, -params.d + params.delta}};
    for (const auto& [pole, a] : roots) {
        if (a < a_min || a > a_max) {
            continue;
        }
        const PhysParams at = params.with_A(a);
        const SpherePoint p{0.0, 0.0, pole == Pole::north ? 1.0 : -1.0};
        const double gap = min_adjacent_gap(linalg::eigvalsh(h_semiquantum(p, at)));
        const double scale = std::abs(params.d) + std::abs(params.delta) + std::abs(a) + 1.0;
        if (gap > 1e-12 * scale) {
            std::ostringstream msg;
            msg << "expected a degeneracy at the " << pole_name(pole) << " pole for A = " << a
                << " but the gap is " << gap;
            throw NumericalRefusal(msg.str());
        }
        out.push_back(Degeneracy{a, pole, gap});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Degeneracy& x, const Degeneracy& y) { return x.A < y.A; });
    return out;
}

std::vector<linalg::EigenDecomposition> vertex_eigensystems(const PhysParams& params,
                                                            const SphereMesh& mesh, unsigned threads)
{
    params.validate();
    std::vector<linalg::EigenDecomposition> eig(mesh.vertices.size());
    parallel_for(mesh.vertices.size(), threads,
                 [&](std::size_t i) { eig[i] = linalg::eigh(h_semiquantum(mesh.vertices[i], params)); });
    return eig;
}

GapInfo gap_info(const std::vector<linalg::EigenDecomposition>& eig)
{
    GapInfo info;
    info.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eig.size(); ++i) {
        const double g = min_adjacent_gap(eig[i].values);
        if (g < info.min_gap) {
            info.min_gap = g;
            info.vertex = i;
        }
        for (double v : eig[i].values) {
            info.max_abs_eigenvalue = std::max(info.max_abs_eigenvalue, std::abs(v));
        }
    }
    return info;
}

namespace {

Complex link(const linalg::EigenDecomposition& a, const linalg::EigenDecomposition& b, std::size_t band)
{
    Complex s{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a.vectors(i, band)) * b.vectors(i, band);
    }
    return s;
}

} // namespace

std::vector<double> plaquette_phases(const SphereMesh& mesh,
                                     const std::vector<linalg::EigenDecomposition>& eig,
                                     std::size_t band)
{
    std::vector<double> phases;
    phases.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        Complex prod{1.0, 0.0};
        for (std::size_t k = 0; k < f.size(); ++k) {
            prod *= link(eig[f[k]], eig[f[(k + 1) % f.size()]], band);
            // Keep the running product at unit scale; only its phase matters.
            if (const double m = std::abs(prod); m > 0.0) {
                prod /= m;
            }
        }
        phases.push_back(std::arg(prod));
    }
    return phases;
}

double min_link_overlap(const SphereMesh& mesh, const std::vector<linalg::EigenDecomposition>& eig,
                        std::size_t band)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& f : mesh.faces) {
        for (std::size_t k = 0; k < f.size(); ++k) {
            m = std::min(m, std::abs(link(eig[f[k]], eig[f[(k + 1) % f.size()]], band)));
        }
    }
    return m;
}

ChernReport chern_numbers(const PhysParams& params, const SphereMesh& mesh, const ChernOptions& options)
{
    params.validate();
    mesh.validate();

    ChernReport report;
    report.params = params;
    report.A = params.A;
    const auto eig = vertex_eigensystems(params, mesh, options.threads);
    const GapInfo gaps = gap_info(eig);
    report.min_gap = gaps.min_gap;

    const double tol = options.rel_gap_tol * gaps.max_abs_eigenvalue;
    if (!(gaps.min_gap > tol)) {
        const auto& p = mesh.vertices[gaps.vertex];
        std::ostringstream msg;
        msg.precision(17);
        msg << "eigenvalue gap " << gaps.min_gap << " <= " << tol << " at vertex " << gaps.vertex
            << " (" << p.x1 << ", " << p.x2 << ", " << p.x3 << ")";
        report.offending_vertex = gaps.vertex;
        report.message = msg.str();
        return report;
    }

    const std::size_t nb = static_cast<std::size_t>(params.band_count());
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t b = 0; b < nb; ++b) {
        const double overlap = min_link_overlap(mesh, eig, b);
        if (overlap < options.min_overlap) {
            std::ostringstream msg;
            msg << "band " << b << ": link overlap " << overlap << " below " << options.min_overlap
                << "; refine the mesh";
            throw MeshTooCoarse(msg.str());
        }
        double sum = 0.0;
        for (double ph : plaquette_phases(mesh, eig, b)) {
            sum += ph;
        }
        const double raw = -sum / two_pi;
        const double rounded = std::round(raw);
        const double residual = std::abs(raw - rounded);
        report.max_residual = std::max(report.max_residual, residual);
        if (residual >= options.max_residual) {
            std::ostringstream msg;
            msg << "band " << b << ": Berry flux " << raw << " is not within " << options.max_residual
                << " of an integer; refine the mesh";
            throw MeshTooCoarse(msg.str());
        }
        report.raw.push_back(raw);
        report.chern.push_back(static_cast<int>(rounded));
    }

    int total = 0;
    for (int c : report.chern) {
        total += c;
    }
    if (total != 0) {
        throw MeshTooCoarse("Chern numbers do not sum to zero (sum " + std::to_string(total) + ")");
    }
    report.valid = true;
    return report;
}

std::vector<int> delta_chern(const ChernReport& before, const ChernReport& after)
{
    if (!before.valid || !after.valid) {
        throw NumericalRefusal("delta-Chern needs two valid reports");
    }
    if (before.chern.size() != after.chern.size()) {
        throw ConfigError("delta-Chern: band counts differ (" + std::to_string(before.chern.size()) +
                          " vs " + std::to_string(after.chern.size()) + ")");
    }
    std::vector<int> out(before.chern.size());
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b] = after.chern[b] - before.chern[b];
    }
    return out;
}

PhysParams semiquantum_counterpart(const PhysParams& quantum_params)
{
    PhysParams p = quantum_params;
    const double l = quantum_params.L;
    p.delta = quantum_params.delta * l;
    p.d = quantum_params.d * l * l;
    p.gamma = quantum_params.gamma * l;
    return p;
}

CountingReport verify_counting(const PhysParams& params, const ChernReport& chern,
                               const quantum::BandDecomposition& bands)
{
    const PhysParams expect = semiquantum_counterpart(params);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); };
    if (!close(chern.params.A, expect.A) || !close(chern.params.delta, expect.delta) ||
        !close(chern.params.d, expect.d) || std::abs(chern.params.gamma - expect.gamma) > 1e-12 * (1.0 + std::abs(expect.gamma)) ||
        chern.params.S != expect.S) {
        throw ConfigError("Chern report was not computed for the semi-quantum counterpart of these parameters");
    }

    CountingReport report;
    if (!chern.valid) {
        report.message = "Chern report is invalid: " + chern.message;
        return report;
    }
    if (!bands.clean()) {
        report.message = std::to_string(bands.unassigned.size()) + " level(s) not assigned to a band";
        return report;
    }
    if (bands.bands.size() != chern.chern.size()) {
        throw ConfigError("band decomposition and Chern report have different band counts");
    }

    report.conclusive = true;
    report.pass = true;
    const int full = 2 * params.L + 1;
    for (std::size_t b = 0; b < bands.bands.size(); ++b) {
        CountingRow row;
        row.band = static_cast<int>(b);
        row.levels = static_cast<int>(bands.bands[b].size());
        row.chern = chern.chern[b];
        row.expected = full - row.chern;
        row.pass = row.levels == row.expected;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace bandflow::semiquantum
