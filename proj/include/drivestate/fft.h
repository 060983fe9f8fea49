// include/drivestate/fft.h

// Copyright 2026 The drivestate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DRIVESTATE_FFT_H_
#define DRIVESTATE_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace drivestate {

// In-place iterative radix-2 FFT. data.size() must be a power of two.
// The inverse transform is unscaled.
void Fft(std::span<std::complex<double>> data, bool inverse = false);

// Forward transform of a real signal zero-padded (or truncated) to n points;
// returns bins 0..n/2.
std::vector<std::complex<double>> RealFft(std::span<const double> input, size_t n);

bool IsPowerOfTwo(size_t n);

}  // namespace drivestate

#endif  // DRIVESTATE_FFT_H_
