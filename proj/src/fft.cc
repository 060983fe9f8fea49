// src/fft.cc

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

#include "drivestate/fft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace drivestate {
namespace {

// exp(-2*pi*i*k/n) for k < n/2, cached per size and thread.
const std::vector<std::complex<double>> &Twiddles(size_t n) {
  thread_local std::unordered_map<size_t, std::vector<std::complex<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> table(n / 2);
  for (size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / n;
    table[k] = {std::cos(angle), std::sin(angle)};
  }
  return cache.emplace(n, std::move(table)).first->second;
}

}  // namespace

bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void Fft(std::span<std::complex<double>> data, bool inverse) {
  const size_t n = data.size();
  if (!IsPowerOfTwo(n)) throw std::invalid_argument("FFT size must be a power of two");
  if (n == 1) return;

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const auto &tw = Twiddles(n);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    const size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < half; ++k) {
        std::complex<double> w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

std::vector<std::complex<double>> RealFft(std::span<const double> input, size_t n) {
  std::vector<std::complex<double>> buf(n);
  const size_t m = std::min(n, input.size());
  for (size_t i = 0; i < m; ++i) buf[i] = input[i];
  Fft(buf);
  buf.resize(n / 2 + 1);
  return buf;
}

}  // namespace drivestate
