#pragma once

#include <cstddef>
#include <span>

#include "qmri/ndarray.hpp"
#include "qmri/types.hpp"

namespace qmri {

enum class FftDirection { forward, inverse };
enum class Exec { serial, parallel };

// Centered, unitary 2-D DFT of `slices` contiguous (ny, nx) planes, in place.
// DC sits at (ny/2, nx/2); both directions scale by 1/sqrt(ny*nx).
void fft2_centered(std::span<cplx> data, std::size_t slices, Grid grid, FftDirection dir,
                   Exec exec = Exec::parallel);

// Transform over the last two axes of an array of rank >= 2.
ComplexArray fft2_unitary(ComplexArray a);
ComplexArray ifft2_unitary(ComplexArray a);

}  // namespace qmri
