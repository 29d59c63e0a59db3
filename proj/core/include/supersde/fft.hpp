#pragma once

#include <complex>
#include <cstdint>

#include "supersde/grid.hpp"

namespace supersde::fft {

/// Unnormalised forward transform (sign -1 in the exponent), in place.
/// Thread-safe: plans are cached per (dim, N, direction) under a lock and
/// executed through the new-array interface.
void forward(const TorusGrid& g, std::complex<double>* data);

/// Unnormalised backward transform (sign +1), in place.
void backward(const TorusGrid& g, std::complex<double>* data);

}  // namespace supersde::fft
