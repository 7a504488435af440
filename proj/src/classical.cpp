#include "bandflow/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bandflow/errors.hpp"
#include "bandflow/parallel.hpp"

namespace bandflow::classical {

ClassicalPoint ClassicalPoint::from_angles(double s_mag, double theta_s, double phi_s, double l_mag,
                                           double theta_l, double phi_l)
{
    auto vec = [](double r, double theta, double phi) {
        return Vec3{r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                    r * std::cos(theta)};
    };
    return ClassicalPoint{vec(s_mag, theta_s, phi_s), vec(l_mag, theta_l, phi_l)};
}

void ClassicalPoint::validate(double s_mag, double l_mag) const
{
    auto check = [](const Vec3& v, double r, const char* name) {
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (!std::isfinite(n) || std::abs(n - r) > 1e-12 * std::max(1.0, r)) {
            std::ostringstream msg;
            msg << name << " has norm " << n << ", expected " << r;
            throw ConfigError(msg.str());
        }
    };
    check(s, s_mag, "S vector");
    check(l, l_mag, "L vector");
}

double spin_amplitude(const PhysParams& params)
{
    return params.S.value();
}

double orbital_amplitude(const PhysParams& params)
{
    return static_cast<double>(params.L);
}

double ReducedPoint::syzygy_residual(double s_mag, double l_mag) const
{
    return sigma * sigma - ((s_mag * s_mag - sz * sz) * (l_mag * l_mag - lz * lz) - tau * tau);
}

ReducedPoint reduce(const ClassicalPoint& p)
{
    return ReducedPoint{p.s[2], p.l[2], p.s[0] * p.l[0] + p.s[1] * p.l[1],
                        p.s[0] * p.l[1] - p.s[1] * p.l[0]};
}

double h_classical(const ReducedPoint& r, const PhysParams& params)
{
    return 2.0 * r.sz * params.profile(r.lz) + 2.0 * params.gamma.real() * r.tau -
           2.0 * params.gamma.imag() * r.sigma;
}

double h_classical(const ClassicalPoint& p, const PhysParams& params)
{
    return h_classical(reduce(p), params);
}

const char* location_name(CriticalLocation loc)
{
    return loc == CriticalLocation::interior ? "interior" : "boundary";
}

namespace {

struct SliceBounds {
    double lo;
    double hi;
};

SliceBounds sz_interval(double s, double l, double jz)
{
    return SliceBounds{std::max(-s, jz - l), std::min(s, jz + l)};
}

void check_jz(double s, double l, double jz)
{
    const double top = s + l;
    if (!std::isfinite(jz) || std::abs(jz) > top + 1e-12 * std::max(1.0, top)) {
        std::ostringstream msg;
        msg << "jz = " << jz << " is outside [-" << top << ", " << top << "]: the slice is empty";
        throw ConfigError(msg.str());
    }
}

/// Maximizes g over [lo, hi]: dense scan, then golden-section search in the
/// bracket around the best sample.
template <typename G>
double maximize(G&& g, double lo, double hi, int scan_points)
{
    if (!(hi > lo)) {
        return g(lo);
    }
    const int n = std::max(scan_points, 3);
    const double h = (hi - lo) / (n - 1);
    int best = 0;
    double best_val = g(lo);
    for (int i = 1; i < n; ++i) {
        const double x = i == n - 1 ? hi : lo + i * h;
        const double v = g(x);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = std::max(lo, lo + (best - 1) * h);
    double b = std::min(hi, lo + (best + 1) * h);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + phi * (b - a);
            gd = g(d);
        }
    }
    return std::max({best_val, gc, gd});
}

} // namespace

std::pair<double, double> em_slice(const PhysParams& params, double jz, const EMOptions& options)
{
    const double s = spin_amplitude(params);
    const double l = orbital_amplitude(params);
    check_jz(s, l, jz);
    const auto [lo, hi] = sz_interval(s, l, jz);
    const double g = std::abs(params.gamma);
    auto rho = [&](double sz) {
        const double lz = jz - sz;
        return std::sqrt(std::max(0.0, (s * s - sz * sz) * (l * l - lz * lz)));
    };
    auto upper = [&](double sz) { return 2.0 * sz * params.profile(jz - sz) + 2.0 * g * rho(sz); };
    auto neg_lower = [&](double sz) { return -(2.0 * sz * params.profile(jz - sz) - 2.0 * g * rho(sz)); };
    const double e_max = maximize(upper, lo, std::max(lo, hi), options.scan_points);
    const double e_min = -maximize(neg_lower, lo, std::max(lo, hi), options.scan_points);
    return {e_min, e_max};
}

EMImage em_image(const PhysParams& params, std::span<const double> jz_samples, const EMOptions& options)
{
    params.validate();
    if (params.gamma == std::complex<double>{}) {
        throw ConfigError("energy-momentum image needs gamma != 0");
    }
    const double s = spin_amplitude(params);
    const double l = orbital_amplitude(params);
    for (double jz : jz_samples) {
        check_jz(s, l, jz);
    }

    EMImage image;
    image.jz.assign(jz_samples.begin(), jz_samples.end());
    image.e_min.resize(jz_samples.size());
    image.e_max.resize(jz_samples.size());
    parallel_for(jz_samples.size(), options.threads, [&](std::size_t i) {
        const auto [lo, hi] = em_slice(params, jz_samples[i], options);
        image.e_min[i] = lo;
        image.e_max[i] = hi;
    });

    for (double sz : {-s, s}) {
        for (double lz : {-l, l}) {
            CriticalValue cv;
            cv.sz = sz;
            cv.lz = lz;
            cv.jz = sz + lz;
            cv.energy = 2.0 * sz * params.profile(lz);
            const auto [lo, hi] = em_slice(params, cv.jz, options);
            const double margin = options.rel_margin * (hi - lo);
            cv.location = (hi > lo && lo + margin < cv.energy && cv.energy < hi - margin)
                              ? CriticalLocation::interior
                              : CriticalLocation::boundary;
            image.critical_values.push_back(cv);
        }
    }
    std::stable_sort(image.critical_values.begin(), image.critical_values.end(),
                     [](const CriticalValue& a, const CriticalValue& b) { return a.jz < b.jz; });
    return image;
}

std::pair<double, double> sampled_slice_range(const PhysParams& params, double jz, int samples,
                                              std::mt19937_64& rng)
{
    const double s = spin_amplitude(params);
    const double l = orbital_amplitude(params);
    check_jz(s, l, jz);
    if (samples < 1) {
        throw ConfigError("sampled slice range needs at least one sample");
    }
    const auto [lo, hi] = sz_interval(s, l, jz);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -e_min;
    for (int i = 0; i < samples; ++i) {
        const double sz = std::clamp(lo + (hi - lo) * unit(rng), -s, s);
        const double lz = std::clamp(jz - sz, -l, l);
        const double ps = two_pi * unit(rng);
        const double pl = two_pi * unit(rng);
        const double rs = std::sqrt(std::max(0.0, s * s - sz * sz));
        const double rl = std::sqrt(std::max(0.0, l * l - lz * lz));
        const ClassicalPoint p{{rs * std::cos(ps), rs * std::sin(ps), sz}, {rl * std::cos(pl), rl * std::sin(pl), lz}};
        const double e = h_classical(p, params);
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    return {e_min, e_max};
}

std::vector<double> uniform_jz_grid(const PhysParams& params, int count)
{
    if (count < 2) {
        throw ConfigError("jz grid needs at least two points");
    }
    const double top = spin_amplitude(params) + orbital_amplitude(params);
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[i] = -top + 2.0 * top * i / (count - 1);
    }
    grid.back() = top;
    return grid;
}

ReducedVolumeProfile dh_volume(double s_mag, double l_mag, std::span<const double> jz_samples)
{
    if (!(s_mag > 0.0) || !(l_mag > 0.0) || !std::isfinite(s_mag) || !std::isfinite(l_mag)) {
        throw ConfigError("reduced volume needs positive finite |S| and |L|");
    }
    ReducedVolumeProfile out;
    out.jz.assign(jz_samples.begin(), jz_samples.end());
    for (double jz : jz_samples) {
        if (!std::isfinite(jz)) {
            throw ConfigError("jz samples must be finite");
        }
        const auto [lo, hi] = sz_interval(s_mag, l_mag, jz);
        out.volume.push_back(std::max(0.0, hi - lo));
    }
    return out;
}

std::vector<double> dh_kinks(double s_mag, double l_mag)
{
    const double a = std::abs(l_mag - s_mag);
    const double b = l_mag + s_mag;
    std::vector<double> k{-b, -a, a, b};
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

OrbitSpaceReport orbit_space_check(std::span<const ClassicalPoint> points, double s_mag, double l_mag,
                                   double tol)
{
    OrbitSpaceReport r;
    r.samples = points.size();
    r.max_tau_excess = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const ReducedPoint q = reduce(p);
        r.max_syzygy_residual = std::max(r.max_syzygy_residual, std::abs(q.syzygy_residual(s_mag, l_mag)));
        r.max_tau_excess = std::max(r.max_tau_excess, q.tau * q.tau - (s_mag * s_mag - q.sz * q.sz) *
                                                                          (l_mag * l_mag - q.lz * q.lz));
    }
    if (points.empty()) {
        r.max_tau_excess = 0.0;
    }
    r.pass = r.max_syzygy_residual <= tol && r.max_tau_excess <= tol;
    return r;
}

} // namespace bandflow::classical
