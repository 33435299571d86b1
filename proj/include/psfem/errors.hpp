#pragma once

#include <stdexcept>
#include <string>

namespace psfem {

// Invalid element geometry: non-convex, degenerate, or ill-oriented quads.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failed factorization, singular local system, or unconverged solve.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The mesh is valid but too coarse for the requested operation.
class UnsupportedMeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input (mesh files, parameters).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace psfem
