#include "bandflow/params.hpp"

#include <cmath>

#include "bandflow/errors.hpp"

namespace bandflow {

void PhysParams::validate() const
{
    for (double v : {A, delta, d, gamma.real(), gamma.imag()}) {
        if (!std::isfinite(v)) {
            throw ConfigError("model parameters must be finite");
        }
    }
    if (L < 0) {
        throw ConfigError("L must be non-negative, got " + std::to_string(L));
    }
    if (S.twice() < 0) {
        throw ConfigError("S must be non-negative, got " + S.str());
    }
}

std::vector<std::string> PhysParams::warnings() const
{
    std::vector<std::string> out;
    if (S.twice() > 2 * L) {
        out.push_back("S = " + S.str() + " exceeds L = " + std::to_string(L) +
                      "; band structure is not of the S << L type");
    }
    if (gamma == std::complex<double>{}) {
        out.push_back("gamma = 0 decouples the blocks; semi-quantum degeneracies are not isolated");
    }
    return out;
}

} // namespace bandflow
