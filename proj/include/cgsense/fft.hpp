#pragma once

#include "cgsense/array.hpp"

namespace cgsense {

// Centered unitary FFT pair: DC sits at index n/2 on every axis, scaling is
// 1/sqrt(N) per direction so forward/inverse are exact adjoints. Sizes must
// be even (centered grids); 2D inputs must be square. Plans are cached per
// size behind a mutex; execution is reentrant.

Array2D<Cx> fft_centered(const Array2D<Cx>& image);
Array2D<Cx> ifft_centered(const Array2D<Cx>& kspace);

std::vector<Cx> fft_centered_1d(const std::vector<Cx>& x);
std::vector<Cx> ifft_centered_1d(const std::vector<Cx>& x);

}  // namespace cgsense
