#pragma once

#include <stdexcept>
#include <string>

namespace fracvem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid mesh topology or geometry, or a generator that cannot honour its constraints.
class MeshError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (mesh, dataset, fracture list).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Singular systems, failed residual checks and other numerical breakdowns.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace fracvem
