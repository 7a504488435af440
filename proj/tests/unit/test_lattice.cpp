#include <doctest.h>

#include "bandflow/classical.hpp"
#include "bandflow/errors.hpp"
#include "bandflow/lattice.hpp"
#include "bandflow/quantum.hpp"

using namespace bandflow;
using namespace bandflow::lattice;

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

struct Defects {
    PhysParams params = make(5, 16, 0, 0, 0, 1);
    QuantumLattice lat = QuantumLattice::from_spectrum(quantum::joint_spectrum(params));
    std::vector<Waypoint> points;

    Defects()
    {
        for (const auto& c : classical::em_image(params, {}).critical_values) {
            if (c.location == classical::CriticalLocation::interior) {
                points.push_back({c.jz, c.energy});
            }
        }
    }

    MonodromyMatrix run(const std::vector<Waypoint>& loop) const
    {
        const auto r = transport_cell(lat, initial_cell(lat, loop.front()), loop);
        CHECK(r.matrix.det() == 1);
        CHECK(r.final.origin == r.start.origin);
        return r.matrix;
    }
};

const Defects& defects()
{
    static const Defects d;
    return d;
}

const MonodromyMatrix kSingle{{{{1, 0}, {-1, 1}}}};
const MonodromyMatrix kBoth{{{{1, 0}, {-2, 1}}}};

} // namespace

TEST_CASE("lattice columns follow the block dimensions")
{
    const auto half = QuantumLattice::from_spectrum(quantum::joint_spectrum(make(0.5, 5, 0, 1, 0, 1)));
    CHECK(half.columns().size() == 12);
    for (const auto& [jz, col] : half.columns()) {
        CHECK(col.size() == (abs(jz) == HalfInt::from_twice(11) ? 1u : 2u));
        CHECK(std::is_sorted(col.begin(), col.end()));
    }

    const auto& big = defects().lat;
    CHECK(big.columns().size() == 43);
    CHECK(big.column_size(HalfInt::from_int(21)) == 1);
    CHECK(big.column_size(HalfInt::from_int(16)) == 6);
    CHECK(big.column_size(HalfInt::from_int(0)) == 11);
    CHECK(big.column_size(HalfInt::from_int(30)) == 0);
    CHECK(big.typical_spacing() > 0);

    CHECK(QuantumLattice().empty());
    CHECK_THROWS_AS(big.energy({HalfInt::from_int(21), 1}), TransportError);
    CHECK_THROWS_AS(big.nearest_site(HalfInt::from_int(40), 0.0), TransportError);
}

TEST_CASE("nearest-site ties are refused")
{
    const auto& lat = defects().lat;
    const auto& col = lat.columns().at(HalfInt::from_int(0));
    const double mid = 0.5 * (col[3] + col[4]);
    CHECK_THROWS_AS(lat.nearest_site(HalfInt::from_int(0), mid), TransportError);
    CHECK(lat.nearest_site(HalfInt::from_int(0), col[3]).n == 3);
}

TEST_CASE("monodromy matrix algebra")
{
    CHECK(kSingle.det() == 1);
    CHECK(kSingle * kSingle == kBoth);
    CHECK(kSingle * kSingle.inverse() == MonodromyMatrix::identity());
    CHECK(kSingle.str() == "[[1,0],[-1,1]]");
    CHECK(kSingle.trace() == 2);
}

TEST_CASE("rectangle loops and their orientation")
{
    const auto cw = rectangle_loop(1, 2, 3, 4);
    REQUIRE(cw.size() == 4);
    CHECK(cw.front().jz == -2);
    CHECK(cw.front().energy == -2);
    CHECK(loop_orientation(cw) == Orientation::clockwise);
    CHECK(loop_orientation(rectangle_loop(1, 2, 3, 4, Orientation::counterclockwise)) == Orientation::counterclockwise);
}

TEST_CASE("two interior defects at jz = +-11")
{
    REQUIRE(defects().points.size() == 2);
    CHECK(defects().points[0].jz == -11);
    CHECK(defects().points[1].jz == 11);
    CHECK(std::abs(defects().points[0].energy) < 1e-12);
}

TEST_CASE("monodromy around one and both defects")
{
    const auto& d = defects();
    for (const auto& w : d.points) {
        CHECK(d.run(rectangle_loop(w.jz, w.energy, 2, 40)) == kSingle);
        CHECK(d.run(rectangle_loop(w.jz, w.energy, 2, 40, Orientation::counterclockwise)) == kSingle.inverse());
    }
    CHECK(d.run(rectangle_loop(0, 0, 13, 40)) == kBoth);
}

TEST_CASE("additivity: the two-defect loop is the product of single loops")
{
    const auto& d = defects();
    const auto left = d.run(rectangle_loop(d.points[0].jz, 0, 2, 40));
    const auto right = d.run(rectangle_loop(d.points[1].jz, 0, 2, 40));
    CHECK(d.run(rectangle_loop(0, 0, 13, 40)) == left * right);
}

TEST_CASE("base point changes keep the conjugacy class")
{
    const auto& d = defects();
    auto loop = rectangle_loop(d.points[1].jz, 0, 2, 40);
    for (int shift = 0; shift < 4; ++shift) {
        std::rotate(loop.begin(), loop.begin() + 1, loop.end());
        const auto m = d.run(loop);
        CHECK(m.trace() == kSingle.trace());
        CHECK(m != MonodromyMatrix::identity());
    }
}

TEST_CASE("refining a loop leaves the matrix unchanged")
{
    const auto& d = defects();
    const auto coarse = rectangle_loop(d.points[0].jz, 0, 2, 40);
    std::vector<Waypoint> fine;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const auto& a = coarse[i];
        const auto& b = coarse[(i + 1) % coarse.size()];
        for (int k = 0; k < 3; ++k) {
            fine.push_back({a.jz + (b.jz - a.jz) * k / 3.0, a.energy + (b.energy - a.energy) * k / 3.0});
        }
    }
    CHECK(d.run(fine) == d.run(coarse));
    TransportOptions opts;
    opts.step = 0.05;
    const auto r = transport_cell(d.lat, initial_cell(d.lat, coarse.front(), opts), coarse, opts);
    CHECK(r.matrix == kSingle);
}

TEST_CASE("contractible loops give the identity")
{
    const auto& d = defects();
    CHECK(d.run(rectangle_loop(0, 0, 5, 40)) == MonodromyMatrix::identity());
}

TEST_CASE("transport failures are reported")
{
    const auto& d = defects();
    // passes exactly between two levels of a column
    CHECK_THROWS_AS(d.run(rectangle_loop(d.points[1].jz, 0, 3, 20)), TransportError);
    // leaves the support of the joint spectrum
    CHECK_THROWS_AS(d.run(rectangle_loop(18, 0, 4, 60)), TransportError);
    const std::vector<Waypoint> one{{0, 0}};
    CHECK_THROWS_AS(transport_cell(d.lat, initial_cell(d.lat, one.front()), one), ConfigError);
}
