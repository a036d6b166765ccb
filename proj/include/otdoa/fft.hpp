#pragma once

#include <span>

#include "otdoa/common.hpp"

namespace otdoa {

enum class FftDirection { forward, inverse };

/// Unnormalized DFT of size in.size() (FFTW backed). in and out may alias.
/// forward: X[k] = sum x[n] e^{-j2pi kn/N}; inverse uses e^{+j2pi kn/N}.
void dft(std::span<const cplx> in, std::span<cplx> out, FftDirection dir);

}  // namespace otdoa
