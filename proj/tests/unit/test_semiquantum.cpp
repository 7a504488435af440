#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bandflow/errors.hpp"
#include "bandflow/quantum.hpp"
#include "bandflow/semiquantum.hpp"

using namespace bandflow;
using namespace bandflow::semiquantum;
using linalg::Complex;

namespace {

PhysParams make(double S, double A, double delta, double d, std::complex<double> gamma, int L = 5)
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

const SphereMesh& mesh()
{
    static const SphereMesh m = SphereMesh::lat_long(32, 32);
    return m;
}

} // namespace

TEST_CASE("S=1/2 Hamiltonian at the north pole and its eigenvalues")
{
    const PhysParams p = make(0.5, 0.4, 1.5, 0.7, {1, 2});
    const auto h = h_semiquantum({0, 0, 1}, p);
    const double f = p.A + p.delta + p.d;
    CHECK(std::abs(h(0, 0) - f) < 1e-15);
    CHECK(std::abs(h(1, 1) + f) < 1e-15);
    CHECK(std::abs(h(0, 1)) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        const auto pt = SpherePoint::from_angles(std::acos(2 * u(rng) - 1), 2 * std::numbers::pi * u(rng));
        const auto ev = linalg::eigvalsh(h_semiquantum(pt, p));
        const double g = p.profile(pt.x3);
        const double r = std::sqrt(g * g + std::norm(p.gamma) * (pt.x1 * pt.x1 + pt.x2 * pt.x2));
        CHECK(std::abs(ev[0] + r) < 1e-12);
        CHECK(std::abs(ev[1] - r) < 1e-12);
    }
}

TEST_CASE("at the poles the Hamiltonian is 2 f(x3) S_z")
{
    for (const double S : {1.0, 1.5, 2.0}) {
        const PhysParams p = make(S, -0.3, 0.9, 0.2, {0.5, 1});
        for (const double x3 : {1.0, -1.0}) {
            const auto h = h_semiquantum({0, 0, x3}, p);
            for (std::size_t k = 0; k < h.dim(); ++k) {
                CHECK(std::abs(h(k, k) - 2 * p.profile(x3) * (S - k)) < 1e-14);
            }
        }
    }
}

TEST_CASE("S=1/2 energy-reflection: i sigma_2 conj(H) (-i sigma_2) = -H")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    linalg::ComplexMatrix s2(2, 2);
    s2(0, 1) = 1.0;
    s2(1, 0) = -1.0; // i sigma_2
    for (int i = 0; i < 100; ++i) {
        const PhysParams p = make(0.5, 3 * u(rng), 2 * u(rng), u(rng), {u(rng), u(rng)});
        const auto pt = SpherePoint::from_angles(std::acos(u(rng)), 4 * u(rng));
        const auto h = h_semiquantum(pt, p).matrix();
        const auto lhs = s2 * h.conjugate() * s2.adjoint();
        CHECK(linalg::max_abs_entry(lhs + h) < 1e-12);
    }
}

TEST_CASE("sphere mesh is a closed oriented surface")
{
    for (const auto& [nt, np] : std::vector<std::pair<int, int>>{{2, 3}, {8, 12}, {64, 64}}) {
        const auto m = SphereMesh::lat_long(nt, np);
        CHECK_NOTHROW(m.validate());
        CHECK(m.euler_characteristic() == 2);
        for (const auto& v : m.vertices) {
            CHECK_NOTHROW(v.validate());
        }
    }
    const auto r = mesh().refined();
    CHECK(r.n_theta == 64);
    CHECK(r.n_phi == 64);

    auto flipped = SphereMesh::lat_long(8, 8);
    std::reverse(flipped.faces[3].begin(), flipped.faces[3].end());
    CHECK_THROWS_AS(flipped.validate(), ConfigError);
    CHECK_THROWS_AS(SphereMesh::lat_long(1, 8), ConfigError);
    CHECK_THROWS_AS((SpherePoint{1, 1, 0}.validate()), ConfigError);
}

TEST_CASE("degeneracy scan finds the pole walls")
{
    const auto two = degeneracy_scan(make(0.5, 0, 1, 0, 1), -5, 5);
    REQUIRE(two.size() == 2);
    CHECK(two[0].A == -1);
    CHECK(two[0].pole == Pole::north);
    CHECK(two[1].A == 1);
    CHECK(two[1].pole == Pole::south);

    const auto same = degeneracy_scan(make(0.5, 0, 0, 1, 1), -5, 5);
    REQUIRE(same.size() == 2);
    CHECK(same[0].A == -1);
    CHECK(same[1].A == -1);
    CHECK(same[0].pole != same[1].pole);

    const auto origin = degeneracy_scan(make(2, 0, 0, 0, 1), -5, 5);
    REQUIRE(origin.size() == 2);
    CHECK(origin[0].A == 0);
    CHECK(origin[0].gap < 1e-12);

    CHECK(degeneracy_scan(make(0.5, 0, 1, 0, 1), 2, 5).empty());
    CHECK_THROWS_AS(degeneracy_scan(make(0.5, 0, 1, 0, 0), -5, 5), ConfigError);
}

TEST_CASE("Chern numbers of the two-band model")
{
    CHECK(chern_numbers(make(0.5, 0, 1, 0, 1), mesh()).chern == std::vector<int>{1, -1});
    CHECK(chern_numbers(make(0.5, 0, -1, 0, 1), mesh()).chern == std::vector<int>{-1, 1});
    CHECK(chern_numbers(make(0.5, -2, 1, 0, 1), mesh()).chern == std::vector<int>{0, 0});
    CHECK(chern_numbers(make(0.5, 0, 0, 1, 1), mesh()).chern == std::vector<int>{0, 0});
    const auto r = chern_numbers(make(0.5, 0.2, 1, 0, {1, 2}), mesh());
    CHECK(r.valid);
    CHECK(r.max_residual < 0.05);
    CHECK(r.raw.size() == 2);
}

TEST_CASE("Chern numbers for eigenvalue 2r are -2r")
{
    for (const double S : {1.0, 1.5, 2.0, 2.5}) {
        CAPTURE(S);
        const auto r = chern_numbers(make(S, 0, 1, 0, 1), mesh());
        REQUIRE(r.valid);
        for (std::size_t b = 0; b < r.chern.size(); ++b) {
            CHECK(r.chern[b] == static_cast<int>(std::lround(2 * (S - static_cast<double>(b)))));
        }
    }
}

TEST_CASE("Chern report refuses at a wall and names the vertex")
{
    const auto r = chern_numbers(make(0.5, -1, 1, 0, 1), mesh());
    CHECK_FALSE(r.valid);
    REQUIRE(r.offending_vertex.has_value());
    const auto& v = mesh().vertices[*r.offending_vertex];
    CHECK(v.x3 == doctest::Approx(1.0));
    CHECK(r.chern.empty());
    CHECK_THROWS_AS(delta_chern(r, r), NumericalRefusal);
}

TEST_CASE("a coarse mesh is reported, not rounded")
{
    // link overlaps vanish between the few vertices of a 4 x 4 mesh
    CHECK_THROWS_AS(chern_numbers(make(2, 0, 1, 0, 1), SphereMesh::lat_long(4, 4)), MeshTooCoarse);
    // here the rounded numbers would not even sum to zero
    CHECK_THROWS_AS(chern_numbers(make(2, -0.9, 1, 0, 1), SphereMesh::lat_long(3, 3)), MeshTooCoarse);
}

TEST_CASE("delta-Chern across the walls")
{
    const auto before = chern_numbers(make(0.5, -2, 1, 0, 1), mesh());
    const auto mid = chern_numbers(make(0.5, 0, 1, 0, 1), mesh());
    const auto after = chern_numbers(make(0.5, 2, 1, 0, 1), mesh());
    CHECK(delta_chern(before, mid) == std::vector<int>{1, -1});
    CHECK(delta_chern(mid, after) == std::vector<int>{-1, 1});

    const auto b2 = chern_numbers(make(0.5, -2, 0, 1, 1), mesh());
    const auto a2 = chern_numbers(make(0.5, 0, 0, 1, 1), mesh());
    CHECK(delta_chern(b2, a2) == std::vector<int>{0, 0});

    CHECK_THROWS_AS(delta_chern(mid, chern_numbers(make(1, 0, 1, 0, 1), mesh())), ConfigError);
}

TEST_CASE("gauge phases do not change plaquette phases")
{
    const PhysParams p = make(1, 0.3, 1, 0.2, {1, 2});
    const auto eig = vertex_eigensystems(p, mesh());
    auto twisted = eig;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    for (auto& e : twisted) {
        for (std::size_t b = 0; b < e.dim(); ++b) {
            const Complex ph = std::polar(1.0, angle(rng));
            for (std::size_t r = 0; r < e.dim(); ++r) {
                e.vectors(r, b) *= ph;
            }
        }
    }
    for (std::size_t b = 0; b < 3; ++b) {
        const auto a = plaquette_phases(mesh(), eig, b);
        const auto t = plaquette_phases(mesh(), twisted, b);
        for (std::size_t f = 0; f < a.size(); ++f) {
            CHECK(std::abs(std::remainder(a[f] - t[f], 2 * std::numbers::pi)) < 1e-10);
        }
    }
}

TEST_CASE("results are independent of the worker count")
{
    ChernOptions opts;
    opts.threads = 3;
    const auto a = chern_numbers(make(2, 0, 1, 0, 1), mesh());
    const auto b = chern_numbers(make(2, 0, 1, 0, 1), mesh(), opts);
    CHECK(a.raw == b.raw);
}

TEST_CASE("counting relation against the rescaled counterpart")
{
    const SphereMesh m64 = SphereMesh::lat_long(64, 64);
    PhysParams q;
    q.S = HalfInt::from_twice(1);
    q.L = 5;
    q.delta = 3;
    q.d = 1;
    q.gamma = {1, 2};
    const auto c = semiquantum_counterpart(q);
    CHECK(c.delta == 15);
    CHECK(c.d == 25);
    CHECK(c.gamma == Complex(5, 10));

    for (const double A : {-60.0, -25.0, 0.0}) {
        const PhysParams p = q.with_A(A);
        const auto chern = chern_numbers(semiquantum_counterpart(p), m64);
        const auto bands = quantum::assign_bands(quantum::joint_spectrum(p));
        const auto r = verify_counting(p, chern, bands);
        CHECK(r.conclusive);
        CHECK(r.pass);
        for (const auto& row : r.rows) {
            CHECK(row.levels == 11 - row.chern);
        }
    }
    const PhysParams p = q.with_A(-25);
    const auto bands = quantum::assign_bands(quantum::joint_spectrum(p));
    CHECK_THROWS_AS(verify_counting(p, chern_numbers(p, m64), bands), ConfigError);

    // levels in transit at A = -12.5 leave the S=1 decomposition unclean
    const PhysParams transit = make(1, -12.5, 1, 0.5, {1, 2});
    const auto r = verify_counting(transit, chern_numbers(semiquantum_counterpart(transit), m64),
                                   quantum::assign_bands(quantum::joint_spectrum(transit)));
    CHECK_FALSE(r.conclusive);
    CHECK_FALSE(r.pass);
}
