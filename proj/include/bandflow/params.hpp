#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bandflow/half_integer.hpp"

namespace bandflow {

/// Control parameter A and the phenomenological constants of the model
///   H = 2 S_z (A + delta L_z + d L_z^2) + gamma S_- L_+ + conj(gamma) S_+ L_-
/// together with the quantum numbers L (orbital) and S (pseudo-spin).
struct PhysParams {
    double A = 0.0;
    double delta = 0.0;
    double d = 0.0;
    std::complex<double> gamma{1.0, 0.0};
    int L = 0;
    HalfInt S = HalfInt::from_twice(1);

    /// Throws ConfigError on non-finite numbers or negative L, S.
    void validate() const;

    /// Non-fatal remarks (e.g. S > L).
    std::vector<std::string> warnings() const;

    /// Diagonal profile f(x) = A + delta x + d x^2.
    double profile(double x) const { return A + delta * x + d * x * x; }

    PhysParams with_A(double a) const
    {
        PhysParams p = *this;
        p.A = a;
        return p;
    }

    int band_count() const { return S.twice() + 1; }
    int orbital_dim() const { return 2 * L + 1; }
};

} // namespace bandflow
