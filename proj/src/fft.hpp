#pragma once

#include <complex>
#include <vector>

namespace tempo::detail
{

/// Forward DFT of arbitrary length: radix-2 for powers of two, Bluestein otherwise.
std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& input);

} // namespace tempo::detail
