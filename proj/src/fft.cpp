#include "fft.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

namespace tempo::detail
{
namespace
{

using cd = std::complex<double>;

bool is_pow2(std::size_t n)
{
  return n != 0 && (n & (n - 1)) == 0;
}

// In-place iterative Cooley-Tukey; sign = -1 forward, +1 inverse (unscaled).
void radix2(std::vector<cd>& a, int sign)
{
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(a[i], a[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles computed directly per index to avoid accumulated rounding from repeated multiplication.
    std::vector<cd> tw(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      tw[k] = cd(std::cos(ang), std::sin(ang));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

std::vector<cd> bluestein(const std::vector<cd>& x)
{
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) {
    m <<= 1;
  }
  // chirp[k] = exp(-i*pi*k^2/n); k^2 reduced mod 2n keeps the angle small and exact.
  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cd(std::cos(ang), std::sin(ang));
  }
  std::vector<cd> a(m, cd(0.0, 0.0));
  std::vector<cd> b(m, cd(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = x[k] * chirp[k];
  }
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    b[k] = std::conj(chirp[k]);
    b[m - k] = std::conj(chirp[k]);
  }
  radix2(a, -1);
  radix2(b, -1);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] *= b[i];
  }
  radix2(a, +1);
  std::vector<cd> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = a[k] * scale * chirp[k];
  }
  return out;
}

} // namespace

std::vector<cd> forward_dft(const std::vector<cd>& input)
{
  if (input.size() <= 1) {
    return input;
  }
  if (is_pow2(input.size())) {
    std::vector<cd> a = input;
    radix2(a, -1);
    return a;
  }
  return bluestein(input);
}

} // namespace tempo::detail
