#pragma once

// Thin wrapper over FFTW's real-to-complex transforms. Plans are cached per
// size; planning is serialized, execution uses the new-array interface and
// is safe to call concurrently.

#include <complex>
#include <cstddef>
#include <span>

namespace gg::detail {

/// out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2. Unnormalized.
void forward_real(std::span<const double> in, std::span<std::complex<double>> out);

/// out[j] = sum over the Hermitian extension of in. Unnormalized; `in` is
/// not modified.
void inverse_real(std::span<const std::complex<double>> in, std::span<double> out);

/// Smallest size >= n that is even and has only the prime factors 2, 3, 5.
std::size_t fast_size(std::size_t n);

}  // namespace gg::detail
