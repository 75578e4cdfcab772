#pragma once

#include <cloudscope/field.hpp>

namespace cloudscope {

/// |F(k)|^2 of the unnormalized 2D DFT of a real grid, returned in the same
/// H x W shape with the usual FFT ordering (index 0 is DC, indices above N/2
/// are negative frequencies). The half spectrum is computed by a real-to-complex
/// transform and mirrored, so Hermitian pairs are bit-identical.
Grid<double> dft_squared_magnitude(const Grid<double>& values);

} // namespace cloudscope
