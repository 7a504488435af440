#pragma once

#include <stdexcept>
#include <string>

namespace bandflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or malformed run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A computation refused to produce a result: an eigenvalue gap closed,
/// a point sits on a wall, or a mesh is too coarse to resolve an integer.
class NumericalRefusal : public Error {
public:
    using Error::Error;
};

class MeshTooCoarse : public NumericalRefusal {
public:
    using NumericalRefusal::NumericalRefusal;
};

/// Iterative eigensolver ran out of sweeps.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Lattice cell transport could not decide between two sites or left the
/// support of the joint spectrum.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace bandflow
