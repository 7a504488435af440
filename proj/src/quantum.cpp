#include "bandflow/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "bandflow/errors.hpp"
#include "bandflow/parallel.hpp"

namespace bandflow::quantum {

std::size_t block_dim(HalfInt S, int L, HalfInt jz)
{
    std::size_t count = 0;
    for (int m = L; m >= -L; --m) {
        const HalfInt k = jz - m;
        if (abs(k) <= S && (k.twice() - S.twice()) % 2 == 0) {
            ++count;
        }
    }
    return count;
}

JzBlock jz_block(const PhysParams& params, HalfInt jz)
{
    params.validate();
    const HalfInt S = params.S;
    const int L = params.L;
    if ((jz.twice() - S.twice()) % 2 != 0 || abs(jz) > S + L) {
        throw ConfigError("jz = " + jz.str() + " is not an eigenvalue of J_z for S = " + S.str() +
                          ", L = " + std::to_string(L));
    }

    JzBlock block;
    block.jz = jz;
    for (int m = L; m >= -L; --m) {
        const HalfInt k = jz - m;
        if (abs(k) <= S) {
            block.basis.push_back(BasisState{k, HalfInt::from_int(m)});
        }
    }

    const std::size_t n = block.basis.size();
    const HalfInt orbital = HalfInt::from_int(L);
    linalg::ComplexMatrix h(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& st = block.basis[a];
        const double m = st.m_l.value();
        h(a, a) = 2.0 * st.k.value() * params.profile(m);
        // gamma S_- L_+ : |k, M> -> |k-1, M+1>, the previous basis entry.
        if (a > 0) {
            const double coeff =
                linalg::ladder_coefficient(S, st.k - 1) * linalg::ladder_coefficient(orbital, st.m_l);
            h(a - 1, a) = params.gamma * coeff;
            h(a, a - 1) = std::conj(params.gamma) * coeff;
        }
    }
    block.matrix = linalg::HermitianMatrix(std::move(h));
    return block;
}

std::vector<JzBlock> jz_blocks(const PhysParams& params)
{
    params.validate();
    const HalfInt top = params.S + params.L;
    std::vector<JzBlock> blocks;
    for (HalfInt jz = -top; jz <= top; jz = jz + 1) {
        blocks.push_back(jz_block(params, jz));
    }
    return blocks;
}

std::vector<double> JointSpectrum::energies() const
{
    std::vector<double> e;
    e.reserve(levels.size());
    for (const auto& l : levels) {
        e.push_back(l.energy);
    }
    return e;
}

JointSpectrum joint_spectrum(const PhysParams& params)
{
    JointSpectrum spec;
    spec.params = params;
    for (const auto& block : jz_blocks(params)) {
        const auto eig = linalg::eigh(block.matrix);
        for (std::size_t n = 0; n < eig.dim(); ++n) {
            double sz = 0.0;
            for (std::size_t i = 0; i < block.dim(); ++i) {
                sz += std::norm(eig.vectors(i, n)) * block.basis[i].k.value();
            }
            spec.levels.push_back(Level{block.jz, static_cast<int>(n), eig.values[n], sz});
        }
    }
    return spec;
}

bool is_edge(const PhysParams& params, HalfInt jz)
{
    return abs(jz) > HalfInt::from_int(params.L) - params.S;
}

std::vector<int> BandDecomposition::counts() const
{
    std::vector<int> c;
    c.reserve(bands.size());
    for (const auto& b : bands) {
        c.push_back(static_cast<int>(b.size()));
    }
    return c;
}

std::optional<int> BandDecomposition::band_of(const LevelId& id) const
{
    for (std::size_t b = 0; b < bands.size(); ++b) {
        for (const auto& l : bands[b]) {
            if (l.id() == id) {
                return static_cast<int>(b);
            }
        }
    }
    return std::nullopt;
}

BandDecomposition assign_bands_by_energy_gaps(const JointSpectrum& spectrum, double rel_gap_tol)
{
    const int band_count = spectrum.params.band_count();
    std::vector<Level> sorted = spectrum.levels;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Level& a, const Level& b) {
        if (a.energy != b.energy) {
            return a.energy < b.energy;
        }
        return a.id() < b.id();
    });

    BandDecomposition out;
    out.bands.resize(static_cast<std::size_t>(band_count));
    if (sorted.size() < static_cast<std::size_t>(band_count)) {
        out.unassigned = sorted;
        return out;
    }

    const double width = sorted.back().energy - sorted.front().energy;
    const double gap_tol = rel_gap_tol * width;

    // Rank the gaps; ties go to the lower position.
    std::vector<std::size_t> gap_pos(sorted.size() - 1);
    std::iota(gap_pos.begin(), gap_pos.end(), std::size_t{0});
    auto gap = [&](std::size_t i) { return sorted[i + 1].energy - sorted[i].energy; };
    std::stable_sort(gap_pos.begin(), gap_pos.end(),
                     [&](std::size_t a, std::size_t b) { return gap(a) > gap(b); });
    std::vector<std::size_t> cuts(gap_pos.begin(), gap_pos.begin() + (band_count - 1));
    std::sort(cuts.begin(), cuts.end());

    std::vector<bool> drop(sorted.size(), false);
    for (std::size_t c : cuts) {
        out.gaps.push_back(gap(c));
        if (gap(c) < gap_tol || width == 0.0) {
            drop[c] = true;
            drop[c + 1] = true;
        }
    }

    std::size_t band = 0;
    std::size_t next_cut = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (drop[i]) {
            out.unassigned.push_back(sorted[i]);
        } else {
            out.bands[band].push_back(sorted[i]);
        }
        if (next_cut < cuts.size() && cuts[next_cut] == i) {
            ++band;
            ++next_cut;
        }
    }
    return out;
}

namespace {

/// Order-preserving injective match of ascending energies to bands at
/// minimal total |E - prediction|. Returns the band of each level.
std::vector<int> match_column(std::span<const double> energies, std::span<const double> predicted)
{
    const std::size_t m = energies.size();
    const std::size_t nb = predicted.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cost(m, std::vector<double>(nb, inf));
    std::vector<std::vector<int>> from(m, std::vector<int>(nb, -1));
    for (std::size_t b = 0; b < nb; ++b) {
        cost[0][b] = std::abs(energies[0] - predicted[b]);
    }
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t b = i; b < nb; ++b) {
            for (std::size_t prev = i - 1; prev < b; ++prev) {
                const double c = cost[i - 1][prev] + std::abs(energies[i] - predicted[b]);
                if (c < cost[i][b]) {
                    cost[i][b] = c;
                    from[i][b] = static_cast<int>(prev);
                }
            }
        }
    }
    std::size_t best = m - 1;
    for (std::size_t b = m - 1; b < nb; ++b) {
        if (cost[m - 1][b] < cost[m - 1][best]) {
            best = b;
        }
    }
    std::vector<int> out(m);
    int b = static_cast<int>(best);
    for (std::size_t i = m; i-- > 0;) {
        out[i] = b;
        b = from[i][static_cast<std::size_t>(b)];
    }
    return out;
}

} // namespace

BandDecomposition assign_bands(const JointSpectrum& spectrum, const BandOptions& options)
{
    const PhysParams& params = spectrum.params;
    const int nb = params.band_count();
    const HalfInt bulk_edge = HalfInt::from_int(params.L) - params.S;
    if (bulk_edge.twice() < 0) {
        return assign_bands_by_energy_gaps(spectrum, options.rel_gap_tol);
    }

    std::map<HalfInt, std::vector<Level>> columns;
    for (const auto& l : spectrum.levels) {
        columns[l.jz].push_back(l);
    }
    for (auto& [jz, col] : columns) {
        std::sort(col.begin(), col.end(), [](const Level& a, const Level& b) { return a.n < b.n; });
    }

    BandDecomposition out;
    out.bands.resize(static_cast<std::size_t>(nb));
    out.gaps.assign(static_cast<std::size_t>(nb > 0 ? nb - 1 : 0), std::numeric_limits<double>::infinity());

    // sheet[b] maps jz -> energy of the band-b level in that column.
    std::vector<std::map<HalfInt, double>> sheet(static_cast<std::size_t>(nb));
    for (auto& [jz, col] : columns) {
        if (abs(jz) > bulk_edge) {
            continue;
        }
        if (col.size() != static_cast<std::size_t>(nb)) {
            throw Error("bulk column jz = " + jz.str() + " does not have 2S+1 levels");
        }
        for (int b = 0; b < nb; ++b) {
            out.bands[b].push_back(col[b]);
            sheet[b][jz] = col[b].energy;
            if (b + 1 < nb) {
                out.gaps[b] = std::min(out.gaps[b], col[b + 1].energy - col[b].energy);
            }
        }
    }

    const HalfInt top = params.S + params.L;
    for (int dir : {+1, -1}) {
        for (HalfInt jz = dir > 0 ? bulk_edge + 1 : -bulk_edge - 1; abs(jz) <= top;
             jz = dir > 0 ? jz + 1 : jz - 1) {
            const auto& col = columns.at(jz);
            std::vector<double> predicted(static_cast<std::size_t>(nb));
            for (int b = 0; b < nb; ++b) {
                // Nearest two columns of this band on the bulk side.
                const auto& sh = sheet[b];
                std::vector<std::pair<double, double>> pts;
                for (HalfInt c = dir > 0 ? jz - 1 : jz + 1; abs(c) <= top && pts.size() < 2;
                     c = dir > 0 ? c - 1 : c + 1) {
                    if (auto it = sh.find(c); it != sh.end()) {
                        pts.emplace_back(c.value(), it->second);
                    }
                }
                if (pts.size() == 1) {
                    predicted[b] = pts[0].second;
                } else {
                    const double slope = (pts[0].second - pts[1].second) / (pts[0].first - pts[1].first);
                    predicted[b] = pts[0].second + slope * (jz.value() - pts[0].first);
                }
            }

            std::vector<double> energies;
            for (const auto& l : col) {
                energies.push_back(l.energy);
            }
            const auto match = match_column(energies, predicted);
            for (std::size_t i = 0; i < col.size(); ++i) {
                const int b = match[i];
                const double own = std::abs(energies[i] - predicted[b]);
                double other = std::numeric_limits<double>::infinity();
                for (int c = 0; c < nb; ++c) {
                    if (c != b) {
                        other = std::min(other, std::abs(energies[i] - predicted[c]));
                    }
                }
                if (own <= options.ambiguity_ratio * other) {
                    out.bands[b].push_back(col[i]);
                    sheet[b][jz] = energies[i];
                } else {
                    out.unassigned.push_back(col[i]);
                }
            }
        }
    }

    for (auto& band : out.bands) {
        std::stable_sort(band.begin(), band.end(), [](const Level& a, const Level& b) {
            return a.energy != b.energy ? a.energy < b.energy : a.id() < b.id();
        });
    }
    return out;
}

SpectralFlowReport sweep_spectral_flow(const PhysParams& base, std::span<const double> a_points,
                                       unsigned threads)
{
    base.validate();
    if (a_points.empty()) {
        throw ConfigError("spectral flow needs at least one A point");
    }
    for (std::size_t i = 0; i < a_points.size(); ++i) {
        if (!std::isfinite(a_points[i])) {
            throw ConfigError("A points must be finite");
        }
        if (i > 0 && !(a_points[i] > a_points[i - 1])) {
            throw ConfigError("A points must be strictly ascending");
        }
    }

    const std::size_t npts = a_points.size();
    std::vector<BandDecomposition> decomps(npts);
    parallel_for(npts, threads, [&](std::size_t i) {
        decomps[i] = assign_bands(joint_spectrum(base.with_A(a_points[i])));
    });

    for (std::size_t i = 0; i < npts; ++i) {
        if (!decomps[i].clean()) {
            std::ostringstream msg;
            msg << "A = " << a_points[i] << " is not inside an iso-Chern domain: "
                << decomps[i].unassigned.size() << " level(s) could not be assigned to a band";
            throw NumericalRefusal(msg.str());
        }
    }

    const int nb = base.band_count();
    SpectralFlowReport report;
    report.domain_points.assign(a_points.begin(), a_points.end());
    report.band_count = nb;
    report.global_flow.assign(static_cast<std::size_t>(nb), 0);

    std::vector<std::map<LevelId, int>> labels(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        report.band_counts.push_back(decomps[i].counts());
        for (std::size_t b = 0; b < decomps[i].bands.size(); ++b) {
            for (const auto& l : decomps[i].bands[b]) {
                labels[i][l.id()] = static_cast<int>(b);
            }
        }
    }

    for (std::size_t i = 0; i + 1 < npts; ++i) {
        Redistribution f(static_cast<std::size_t>(nb), std::vector<int>(static_cast<std::size_t>(nb), 0));
        for (const auto& [id, from] : labels[i]) {
            const int to = labels[i + 1].at(id);
            if (to != from) {
                ++f[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
            }
        }
        std::vector<int> flow(static_cast<std::size_t>(nb), 0);
        for (int b = 0; b < nb; ++b) {
            for (int k = 0; k < nb; ++k) {
                if (k != b) {
                    flow[b] += f[k][b] - f[b][k];
                }
            }
            report.global_flow[b] += flow[b];
        }
        report.redistributions.push_back(std::move(f));
        report.local_flow.push_back(std::move(flow));
    }
    return report;
}

} // namespace bandflow::quantum
