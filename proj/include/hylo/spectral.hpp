#pragma once

// Fourier calculus on periodic grids, backed by FFTW.
//
// forward() is the unnormalized DFT, inverse() includes the 1/N factor, so
// inverse(forward(f)) == f up to roundoff. Plans are cached per thread and per
// grid shape; planning is serialized behind a global mutex.

#include <span>

#include "hylo/grid.hpp"

namespace hylo::spectral {

ComplexField forward(const Grid& grid, std::span<const cplx> f);
ComplexField inverse(const Grid& grid, std::span<const cplx> fhat);
void forward_inplace(const Grid& grid, std::span<cplx> f);
void inverse_inplace(const Grid& grid, std::span<cplx> fhat);

// (i k_axis)^order applied in Fourier space, order in {1, 2, 4}. The Nyquist
// bin is dropped for order 1 so real input stays real.
ComplexField derivative(const Grid& grid, std::span<const cplx> f, int axis, int order);
// Sum of second derivatives over all axes (multiplier -|k|^2).
ComplexField laplacian(const Grid& grid, std::span<const cplx> f);
// F^{-1}(m * F f) for a real multiplier in storage order.
ComplexField apply_multiplier(const Grid& grid, std::span<const cplx> f,
                              std::span<const double> multiplier);

// Discrete Parseval weight: sum_j |f_j|^2 == (1/N) sum_k |fhat_k|^2.
inline double parseval_factor(const Grid& grid) { return 1.0 / static_cast<double>(grid.size()); }

}  // namespace hylo::spectral
