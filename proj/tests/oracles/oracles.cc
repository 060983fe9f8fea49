// tests/oracles/oracles.cc

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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "drivestate/fft.h"
#include "drivestate/metrics.h"
#include "drivestate/pipeline.h"

namespace drivestate::oracle {

std::vector<std::complex<double>> NaiveDft(const std::vector<double> &x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t t = 0; t < n; ++t) {
      // Reduce the phase index first so the angle stays small and exact.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / n;
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

double PairCountAuc(const std::vector<double> &scores, const std::vector<int> &labels) {
  double good = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return pairs == 0 ? -1.0 : good / static_cast<double>(pairs);
}

double SortMedian(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

EigenPairs JacobiEigen(Matrix a) {
  const size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = 0; q < n; ++q) {
        total += a[p][q] * a[p][q];
        if (p != q) off += a[p][q] * a[p][q];
      }
    }
    if (off <= 1e-32 * std::max(total, 1e-300)) break;
    for (size_t p = 0; p + 1 < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return a[x][x] > a[y][y]; });
  EigenPairs out;
  for (size_t i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> vec(n);
    for (size_t k = 0; k < n; ++k) vec[k] = v[k][i];
    out.vectors.push_back(vec);
  }
  return out;
}

Matrix Covariance(const Matrix &rows) {
  const size_t n = rows.size();
  const size_t d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto &r : rows) {
    for (size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  }
  Matrix cov(d, std::vector<double>(d, 0.0));
  for (const auto &r : rows) {
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j < d; ++j) {
        cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / static_cast<double>(n - 1);
      }
    }
  }
  return cov;
}

double MaxPrincipalAngle(const Matrix &a, const Matrix &b) {
  // Residual of B after projecting onto span(A); its largest singular value
  // is the sine of the largest principal angle.
  const size_t d = a.size();
  const size_t k = b.front().size();
  const size_t ka = a.front().size();
  Matrix r(d, std::vector<double>(k, 0.0));
  for (size_t col = 0; col < k; ++col) {
    std::vector<double> coef(ka, 0.0);
    for (size_t c = 0; c < ka; ++c) {
      for (size_t i = 0; i < d; ++i) coef[c] += a[i][c] * b[i][col];
    }
    for (size_t i = 0; i < d; ++i) {
      double proj = 0.0;
      for (size_t c = 0; c < ka; ++c) proj += a[i][c] * coef[c];
      r[i][col] = b[i][col] - proj;
    }
  }
  Matrix gram(k, std::vector<double>(k, 0.0));
  for (size_t x = 0; x < k; ++x) {
    for (size_t y = 0; y < k; ++y) {
      for (size_t i = 0; i < d; ++i) gram[x][y] += r[i][x] * r[i][y];
    }
  }
  const double top = JacobiEigen(gram).values.front();
  return std::asin(std::min(1.0, std::sqrt(std::max(0.0, top))));
}

Matrix MelFilterbank(int n_mels, int fft_size, int sample_rate_hz, double fmin_hz,
                     double fmax_hz) {
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = hz(mel(fmin_hz) + (mel(fmax_hz) - mel(fmin_hz)) * i / (n_mels + 1.0));
  }
  const int bins = fft_size / 2 + 1;
  Matrix fb(n_mels, std::vector<double>(bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    for (int b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * sample_rate_hz / fft_size;
      const double up = (f - edges[m]) / (edges[m + 1] - edges[m]);
      const double down = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
      fb[m][b] = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

std::vector<double> SincResample(const std::vector<double> &x, int src_rate, int dst_rate) {
  const double fc = std::min(0.45 * src_rate, 0.45 * dst_rate) / src_rate;
  const double half = std::ceil(16.0 / (2.0 * fc));
  const size_t m = static_cast<size_t>(std::llround(static_cast<double>(x.size()) * dst_rate / src_rate));
  auto kernel = [&](double tau) {
    if (std::abs(tau) > half) return 0.0;
    const double arg = std::numbers::pi * 2.0 * fc * tau;
    const double sinc = tau == 0.0 ? 1.0 : std::sin(arg) / arg;
    return sinc * (0.5 + 0.5 * std::cos(std::numbers::pi * tau / (half + 1.0)));
  };
  std::vector<double> out(m);
  for (size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) * src_rate / dst_rate;
    double acc = 0.0, norm = 0.0;
    const long lo = static_cast<long>(std::floor(t - half));
    const long hi = static_cast<long>(std::ceil(t + half));
    for (long k = lo; k <= hi; ++k) {
      const double h = kernel(t - static_cast<double>(k));
      norm += h;
      if (k >= 0 && k < static_cast<long>(x.size())) acc += h * x[static_cast<size_t>(k)];
    }
    out[j] = std::clamp(acc / norm, -1.0, 1.0);
  }
  return out;
}

double SvmOptimum(const Matrix &x, const std::vector<int> &labels, double c,
                  std::vector<double> *w_out, double *b_out) {
  const size_t n = x.size();
  const size_t d = x.front().size();
  std::vector<double> alpha(n, 0.0), w(d + 1, 0.0);
  auto aug = [&](size_t i, size_t j) { return j < d ? x[i][j] : 1.0; };
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double max_change = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double y = labels[i] ? 1.0 : -1.0;
      double q = 0.0, g = 0.0;
      for (size_t j = 0; j <= d; ++j) {
        q += aug(i, j) * aug(i, j);
        g += w[j] * aug(i, j);
      }
      g = y * g - 1.0;
      const double next = std::clamp(alpha[i] - g / q, 0.0, c);
      const double delta = next - alpha[i];
      if (delta != 0.0) {
        for (size_t j = 0; j <= d; ++j) w[j] += delta * y * aug(i, j);
        alpha[i] = next;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change < 1e-15) break;
  }
  double objective = 0.0;
  for (double v : w) objective += 0.5 * v * v;
  for (size_t i = 0; i < n; ++i) {
    const double y = labels[i] ? 1.0 : -1.0;
    double m = w[d];
    for (size_t j = 0; j < d; ++j) m += w[j] * x[i][j];
    objective += c * std::max(0.0, 1.0 - y * m);
  }
  if (w_out) w_out->assign(w.begin(), w.begin() + static_cast<long>(d));
  if (b_out) *b_out = w[d];
  return objective;
}

namespace {

SuiteResult CheckFft(std::mt19937_64 &gen) {
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(512);
    for (double &v : x) v = normal(gen);
    const auto fast = RealFft(x, 512);
    const auto slow = NaiveDft(x);
    double err = 0.0, scale = 0.0;
    for (size_t k = 0; k < fast.size(); ++k) {
      err = std::max(err, std::abs(fast[k] - slow[k]));
      scale = std::max(scale, std::abs(slow[k]));
    }
    worst = std::max(worst, err / scale);
  }
  std::ostringstream detail;
  detail << "100 signals of length 512, max relative error " << worst;
  return {"fft_vs_dft", worst <= 1e-6, detail.str()};
}

SuiteResult CheckAuc(std::mt19937_64 &gen) {
  std::uniform_int_distribution<int> len(2, 8), coin(0, 1), level(0, 4);
  int mismatches = 0, checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(gen);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = level(gen) * 0.25;  // coarse levels force ties
      labels[i] = coin(gen);
    }
    const double expected = PairCountAuc(scores, labels);
    const auto got = MidrankAuc(scores, labels);
    ++checked;
    if (expected < 0.0 ? got.has_value() : (!got || *got != expected)) ++mismatches;
  }
  return {"auc_vs_pair_counting", mismatches == 0,
          std::to_string(checked) + " score sets, " + std::to_string(mismatches) + " mismatches"};
}

SuiteResult CheckPca(std::mt19937_64 &gen) {
  std::uniform_int_distribution<int> rows(2, 8), cols(1, 6);
  std::normal_distribution<double> normal;
  double worst_value = 0.0, worst_angle = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rows(gen), d = cols(gen);
    Eigen::MatrixXd x(n, d);
    Matrix plain(n, std::vector<double>(d));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) plain[i][j] = x(i, j) = normal(gen);
    }
    const PcaTransform pca = FitPca(x, kDefaultPcaCap);
    const EigenPairs ref = JacobiEigen(Covariance(plain));
    for (int j = 0; j < d; ++j) {
      worst_value = std::max(worst_value, std::abs(pca.eigenvalues[j] - ref.values[j]));
    }
    if (pca.k == 0) continue;
    Matrix a(d, std::vector<double>(pca.k)), b(d, std::vector<double>(pca.k));
    for (int i = 0; i < d; ++i) {
      for (int c = 0; c < pca.k; ++c) {
        a[i][c] = ref.vectors[c][i];
        b[i][c] = pca.components(i, c);
      }
    }
    worst_angle = std::max(worst_angle, MaxPrincipalAngle(a, b));
  }
  std::ostringstream detail;
  detail << "50 matrices up to 8x6, eigenvalue error " << worst_value << ", principal angle "
         << worst_angle;
  return {"pca_vs_jacobi", worst_value <= 1e-8 && worst_angle <= 1e-6, detail.str()};
}

SuiteResult CheckMedian() {
  long lists = 0, mismatches = 0;
  std::vector<double> values;
  // Every list of length 1..7 over {0, 0.1, ..., 1.0}.
  for (int len = 1; len <= 7; ++len) {
    std::vector<int> digits(len, 0);
    values.assign(len, 0.0);
    while (true) {
      for (int i = 0; i < len; ++i) values[i] = digits[i] / 10.0;
      ++lists;
      if (AggregateClipMedian(values) != SortMedian(values)) ++mismatches;
      int pos = 0;
      while (pos < len && ++digits[pos] == 11) digits[pos++] = 0;
      if (pos == len) break;
    }
  }
  return {"median_vs_sort", mismatches == 0,
          std::to_string(lists) + " lists, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

std::vector<SuiteResult> RunSelfTest(uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<SuiteResult> out;
  out.push_back(CheckFft(gen));
  out.push_back(CheckAuc(gen));
  out.push_back(CheckPca(gen));
  out.push_back(CheckMedian());
  return out;
}

}  // namespace drivestate::oracle
