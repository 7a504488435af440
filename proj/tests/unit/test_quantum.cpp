#include <doctest.h>

#include <cmath>
#include <map>

#include "bandflow/errors.hpp"
#include "bandflow/quantum.hpp"
#include "oracle.hpp"

using namespace bandflow;
using namespace bandflow::quantum;

namespace {

PhysParams make(double S, int L, double A, double delta, double d, std::complex<double> gamma)
{
    PhysParams p;
    p.S = HalfInt::from_double(S);
    p.L = L;
    p.A = A;
    p.delta = delta;
    p.d = d;
    p.gamma = gamma;
    return p;
}

double level_energy(const JointSpectrum& spec, HalfInt jz, int n)
{
    for (const auto& lv : spec.levels) {
        if (lv.jz == jz && lv.n == n) {
            return lv.energy;
        }
    }
    FAIL("level not found");
    return 0.0;
}

} // namespace

TEST_CASE("block dimensions count (k, M_L) pairs")
{
    const HalfInt S = HalfInt::from_int(2);
    const std::map<int, std::size_t> expected{{7, 1}, {6, 2}, {5, 3}, {4, 4}, {3, 5}, {2, 5}, {1, 5}, {0, 5}};
    for (const auto& [jz, dim] : expected) {
        CHECK(block_dim(S, 5, HalfInt::from_int(jz)) == dim);
        CHECK(block_dim(S, 5, HalfInt::from_int(-jz)) == dim);
    }
    const auto blocks = jz_blocks(make(2, 5, 0, 1, 0, 1));
    CHECK(blocks.size() == 15);
    CHECK_THROWS_AS(jz_block(make(2, 5, 0, 1, 0, 1), HalfInt::from_twice(1)), ConfigError);
}

TEST_CASE("S=1/2 two-dimensional blocks match the explicit 2x2 matrix")
{
    const PhysParams p = make(0.5, 5, -3.7, 1.3, 0.6, {1, 2});
    for (int m = -p.L + 1; m <= p.L; ++m) {
        const auto b = jz_block(p, HalfInt::from_twice(2 * m - 1));
        REQUIRE(b.dim() == 2);
        // basis: |V_-; M_L>, |V_+; M_L - 1>
        CHECK(b.basis[0].k == HalfInt::from_twice(-1));
        CHECK(b.basis[0].m_l == HalfInt::from_int(m));
        const double c = std::sqrt(p.L * (p.L + 1.0) - m * (m - 1.0));
        const double diag0 = -(p.A + p.delta * m + p.d * m * m);
        const double diag1 = p.A + p.delta * (m - 1) + p.d * (m - 1) * (m - 1);
        CHECK(std::abs(b.matrix(0, 0) - diag0) < 1e-14);
        CHECK(std::abs(b.matrix(1, 1) - diag1) < 1e-14);
        CHECK(std::abs(b.matrix(0, 1) - p.gamma * c) < 1e-14);
        CHECK(std::abs(b.matrix(1, 0) - std::conj(p.gamma) * c) < 1e-14);
    }
    const auto top = jz_block(p, HalfInt::from_twice(2 * p.L + 1));
    REQUIRE(top.dim() == 1);
    CHECK(top.matrix(0, 0).real() == doctest::Approx(p.A + p.delta * p.L + p.d * p.L * p.L).epsilon(1e-14));
}

TEST_CASE("joint spectrum has (2S+1)(2L+1) levels and matches the dense oracle")
{
    for (const double S : {0.5, 1.0, 1.5, 2.0}) {
        for (const int L : {0, 1, 3, 5}) {
            const PhysParams p = make(S, L, 2.1, -0.7, 0.4, {0.5, -1.5});
            const auto spec = joint_spectrum(p);
            CAPTURE(S);
            CAPTURE(L);
            CHECK(spec.levels.size() == static_cast<std::size_t>((2 * S + 1) * (2 * L + 1)));
            CHECK(oracle::multiset_distance(spec.energies(), oracle::dense_spectrum(p)) < 1e-9);
        }
    }
}

TEST_CASE("small S=1/2, L=1 spectrum")
{
    const PhysParams p = make(0.5, 1, 0, 0, 0, 1);
    const auto e = joint_spectrum(p).energies();
    const double r = std::sqrt(2.0);
    CHECK(oracle::multiset_distance(e, {-r, -r, 0, 0, r, r}) < 1e-12);
    CHECK(oracle::multiset_distance(e, oracle::dense_spectrum(p)) < 1e-12);
}

TEST_CASE("dense J_z commutes with the dense Hamiltonian")
{
    for (const double S : {0.5, 1.0, 2.0}) {
        const PhysParams p = make(S, 5, -1.2, 0.8, 0.3, {1, 2});
        const auto h = oracle::dense_hamiltonian(p);
        const auto j = oracle::dense_jz(p);
        CHECK((h * j - j * h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("one-dimensional blocks are linear in A")
{
    const PhysParams base = make(0.5, 5, 0, 3, 1, {1, 2});
    const HalfInt top = HalfInt::from_twice(11);
    const HalfInt bottom = -top;
    for (int i = 1; i < 20; ++i) {
        const double a = -60 + 4.0 * i;
        for (const HalfInt jz : {top, bottom}) {
            const double d2 = level_energy(joint_spectrum(base.with_A(a - 4)), jz, 0) -
                              2 * level_energy(joint_spectrum(base.with_A(a)), jz, 0) +
                              level_energy(joint_spectrum(base.with_A(a + 4)), jz, 0);
            CHECK(std::abs(d2) < 1e-10);
        }
    }
    // A + delta L + d L^2 vanishes at A = -40
    CHECK(std::abs(level_energy(joint_spectrum(base.with_A(-40)), top, 0)) < 1e-12);
    // -A + delta L - d L^2 vanishes at A = -10
    CHECK(std::abs(level_energy(joint_spectrum(base.with_A(-10)), bottom, 0)) < 1e-12);
}

TEST_CASE("edge columns are those with |jz| > L - S")
{
    const PhysParams p = make(1, 5, 0, 1, 0, 1);
    CHECK_FALSE(is_edge(p, HalfInt::from_int(4)));
    CHECK(is_edge(p, HalfInt::from_int(5)));
    CHECK(is_edge(p, HalfInt::from_int(-6)));
}

TEST_CASE("band populations in each domain")
{
    struct Case {
        PhysParams p;
        std::vector<int> counts;
    };
    const std::vector<Case> cases{
        {make(0.5, 5, -60, 3, 1, {1, 2}), {11, 11}},
        {make(0.5, 5, -25, 3, 1, {1, 2}), {10, 12}},
        {make(0.5, 5, 0, 3, 1, {1, 2}), {11, 11}},
        {make(1, 5, -30, 1, 0.5, {1, 2}), {11, 11, 11}},
        {make(1, 5, -15, 1, 0.5, {1, 2}), {9, 11, 13}},
        {make(1, 5, -15, -1, 0.5, {1, 2}), {13, 11, 9}},
        {make(2, 5, 0, 1, 0, 1), {7, 9, 11, 13, 15}},
        {make(1.5, 5, 0, 1, 0, 1), {8, 10, 12, 14}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.p.S.str());
        CAPTURE(c.p.A);
        const auto bands = assign_bands(joint_spectrum(c.p));
        CHECK(bands.clean());
        CHECK(bands.counts() == c.counts);
        CHECK(bands.gaps.size() == c.counts.size() - 1);
    }
}

TEST_CASE("bands are ordered inside every column and partition the spectrum")
{
    const auto spec = joint_spectrum(make(1, 5, -15, 1, 0.5, {1, 2}));
    const auto bands = assign_bands(spec);
    std::size_t total = bands.unassigned.size();
    std::map<HalfInt, std::vector<std::pair<int, double>>> by_column;
    for (std::size_t b = 0; b < bands.bands.size(); ++b) {
        total += bands.bands[b].size();
        for (const auto& lv : bands.bands[b]) {
            by_column[lv.jz].push_back({static_cast<int>(b), lv.energy});
            CHECK(bands.band_of(lv.id()) == static_cast<int>(b));
        }
    }
    CHECK(total == spec.levels.size());
    for (auto& [jz, entries] : by_column) {
        std::sort(entries.begin(), entries.end());
        for (std::size_t i = 1; i < entries.size(); ++i) {
            CHECK(entries[i - 1].first < entries[i].first);
            CHECK(entries[i - 1].second < entries[i].second);
        }
    }
}

TEST_CASE("levels in transit near a wall stay unassigned")
{
    const auto bands = assign_bands(joint_spectrum(make(1, 5, -12.5, 1, 0.5, {1, 2})));
    CHECK_FALSE(bands.clean());
    for (const auto& lv : bands.unassigned) {
        CHECK(is_edge(make(1, 5, 0, 1, 0.5, 1), lv.jz));
    }
}

TEST_CASE("energy-gap banding agrees far from the walls")
{
    const auto bands = assign_bands_by_energy_gaps(joint_spectrum(make(0.5, 5, -60, 3, 1, {1, 2})));
    CHECK(bands.clean());
    CHECK(bands.counts() == std::vector<int>{11, 11});
}

TEST_CASE("spectral flow for S=1")
{
    const std::vector<double> pts{-30, -15, 0};
    const auto r = sweep_spectral_flow(make(1, 5, 123, 1, 0.5, {1, 2}), pts);
    REQUIRE(r.local_flow.size() == 2);
    CHECK(r.local_flow[0] == std::vector<int>{-2, 0, 2});
    CHECK(r.local_flow[1] == std::vector<int>{2, 0, -2});
    CHECK(r.global_flow == std::vector<int>{0, 0, 0});
    CHECK(r.redistributions[0] == Redistribution{{0, 1, 1}, {0, 0, 1}, {0, 0, 0}});
    CHECK(r.redistributions[1] == Redistribution{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
    CHECK(r.band_counts == std::vector<std::vector<int>>{{11, 11, 11}, {9, 11, 13}, {11, 11, 11}});
}

TEST_CASE("spectral flow for general S follows -2(S - b)")
{
    for (const double S : {0.5, 1.0, 1.5, 2.0}) {
        CAPTURE(S);
        const std::vector<double> pts{-20, 0, 20};
        const auto r = sweep_spectral_flow(make(S, 5, 0, 1, 0, 1), pts);
        const int n = static_cast<int>(2 * S + 1);
        std::vector<int> first(n), second(n);
        for (int b = 0; b < n; ++b) {
            first[b] = static_cast<int>(-2 * (S - b));
            second[b] = -first[b];
        }
        CHECK(r.local_flow[0] == first);
        CHECK(r.local_flow[1] == second);
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                // first wall moves levels upward only, second wall downward only
                CHECK(r.redistributions[0][j][k] == (k > j ? 1 : 0));
                CHECK(r.redistributions[1][j][k] == (k < j ? 1 : 0));
            }
        }
    }
}

TEST_CASE("spectral flow is identical with worker threads")
{
    const std::vector<double> pts{-60, -25, 0, 20};
    const PhysParams p = make(0.5, 5, 0, 3, 1, {1, 2});
    const auto a = sweep_spectral_flow(p, pts, 1);
    const auto b = sweep_spectral_flow(p, pts, 3);
    CHECK(a.band_counts == b.band_counts);
    CHECK(a.redistributions == b.redistributions);
}

TEST_CASE("spectral flow rejects bad sweeps")
{
    const PhysParams p = make(1, 5, 0, 1, 0.5, {1, 2});
    const std::vector<double> descending{0, -15};
    CHECK_THROWS_AS(sweep_spectral_flow(p, descending), ConfigError);
    const std::vector<double> at_wall{-30, -12.5};
    CHECK_THROWS_AS(sweep_spectral_flow(p, at_wall), NumericalRefusal);
}

TEST_CASE("parameter validation")
{
    PhysParams p = make(1, 5, 0, 1, 0, 1);
    p.A = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = make(2, 1, 0, 1, 0, 1);
    CHECK_FALSE(p.warnings().empty());
}
