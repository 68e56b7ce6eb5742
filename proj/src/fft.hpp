#pragma once

#include "ppct/grid.hpp"

namespace ppct::detail {

enum class FftDirection { forward, backward };

/// Unnormalized in-place 2D DFT of a row-major rows x cols array.
/// forward uses exp(-2 pi i ...), backward exp(+2 pi i ...).
void fft2_inplace(Complex* data, int rows, int cols, FftDirection direction);

inline void fft2_inplace(ComplexGrid& grid, FftDirection direction)
{
    fft2_inplace(grid.storage().data(), grid.rows(), grid.cols(), direction);
}

}  // namespace ppct::detail
