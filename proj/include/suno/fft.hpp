#pragma once

#include "suno/types.hpp"

namespace suno::fft {

// All transforms are unitary (1/sqrt(N) per axis) and operate on the
// centered layout: DC lives at index (rows/2, cols/2). Parseval holds, so
// the adjoint of fft2c is ifft2c.

CxArray fft2c(const CxArray &x);
CxArray ifft2c(const CxArray &x);

// Centered unitary transform along the width (phase-encode) axis only.
// Zeroing whole k-space columns commutes with the height-axis transform,
// so the masked normal operator A^H M A needs nothing more than this.
CxArray fft_width_c(const CxArray &x);
CxArray ifft_width_c(const CxArray &x);

// Circular shifts along both axes; fftshift moves DC from 0 to floor(N/2).
CxArray fftshift2(const CxArray &x);
CxArray ifftshift2(const CxArray &x);

// Width-axis shifts only.
CxArray fftshift_width(const CxArray &x);
CxArray ifftshift_width(const CxArray &x);

// Unnormalized 1D transforms on contiguous buffers through the per-thread
// plan cache; building blocks for hot loops that manage their own layout
// and scaling.
void fwd_raw(Complex *dst, const Complex *src, int n);
void inv_raw(Complex *dst, const Complex *src, int n);

} // namespace suno::fft
