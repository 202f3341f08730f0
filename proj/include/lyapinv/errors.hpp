#pragma once

#include <stdexcept>
#include <string>

namespace lyapinv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix that must be invertible (or of full column rank) is numerically singular.
class DegenerateMatrix : public Error {
public:
    using Error::Error;
};

/// The subspace handed to the chart map is not fixed by the matrix.
class NotInvariant : public Error {
public:
    using Error::Error;
};

/// Two eigenvalues coincide within the collision tolerance.
class NonGenericSpectrum : public Error {
public:
    using Error::Error;
};

class InvalidPartition : public Error {
public:
    using Error::Error;
};

class OddPartition : public Error {
public:
    using Error::Error;
};

class InvalidPoint : public Error {
public:
    using Error::Error;
};

}  // namespace lyapinv
