#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace fsg {

// Branchless exp for non-positive arguments, relative error below 4e-9.
// Used on (1 +- eps)-budgeted paths only; exact paths keep std::exp.
inline double fast_exp_neg(double x) {
  if (x < -706.0) return 0.0;  // keep the scaled result in normal range
  // x = k ln2 + r with r in [-ln2/2, ln2/2].
  const double inv_ln2 = 1.4426950408889634074;
  const double shift = 6755399441055744.0;  // 1.5 * 2^52
  double t = x * inv_ln2 + shift;
  int64_t k;
  std::memcpy(&k, &t, 8);
  k = static_cast<int32_t>(k & 0xffffffff);
  double r = x - double(k) * 0.6931471805599452862;  // ln2 hi
  r -= double(k) * 2.3190468138462995584e-17;        // ln2 lo
  // Degree-8 Taylor of e^r on the reduced interval.
  double p = 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  int64_t bits;
  std::memcpy(&bits, &p, 8);
  bits += k << 52;  // scale by 2^k; safe for k >= -1021 given the clamp
  double out;
  std::memcpy(&out, &bits, 8);
  return out;
}

// out[i] = exp(-x[i]) for x[i] >= 0; the loop body is branch-light so the
// compiler can vectorize it.
inline void fast_exp_neg_batch(const double* x, double* out, uint32_t n) {
  for (uint32_t i = 0; i < n; ++i) out[i] = fast_exp_neg(-x[i]);
}

}  // namespace fsg

namespace detail_fastmath {
// log(x) for normal positive doubles with a small upward bias, so callers
// that need a conservative (never underestimated) logarithm can use it
// directly. |error| < 3e-7.
inline double fast_log_upper(double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, 8);
  int64_t e = int64_t((bits >> 52) & 0x7ff) - 1023;
  bits = (bits & 0xfffffffffffffULL) | 0x3ff0000000000000ULL;
  double m;
  std::memcpy(&m, &bits, 8);  // m in [1, 2)
  if (m > 1.4142135623730951) {
    m *= 0.5;
    e += 1;
  }
  double t = (m - 1.0) / (m + 1.0);  // atanh-based series
  double t2 = t * t;
  double p = 2.0 / 9.0;
  p = p * t2 + 2.0 / 7.0;
  p = p * t2 + 2.0 / 5.0;
  p = p * t2 + 2.0 / 3.0;
  p = p * t2 + 2.0;
  return p * t + double(e) * 0.6931471805599453 + 3e-7;
}
}  // namespace detail_fastmath

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace detail_fastmath {

// Four-lane exp(x) for x <= 0; same reduction as fast_exp_neg.
inline __m256d exp_neg4(__m256d x) {
  const __m256d lo_cut = _mm256_set1_pd(-706.0);
  const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
  const __m256d shift = _mm256_set1_pd(6755399441055744.0);
  const __m256d ln2_hi = _mm256_set1_pd(0.6931471805599452862);
  const __m256d ln2_lo = _mm256_set1_pd(2.3190468138462995584e-17);

  __m256d live = _mm256_cmp_pd(x, lo_cut, _CMP_GE_OQ);
  __m256d t = _mm256_fmadd_pd(x, inv_ln2, shift);
  __m256d kd = _mm256_sub_pd(t, shift);
  __m256i ki = _mm256_castpd_si256(t);
  // Only the low 12 bits of k survive << 52, so the garbage high bits of
  // the shifted mantissa do not matter for |k| < 2^11.
  __m256i expo = _mm256_slli_epi64(ki, 52);

  __m256d r = _mm256_fnmadd_pd(kd, ln2_hi, x);
  r = _mm256_fnmadd_pd(kd, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 40320.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m256d scaled =
      _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(p), expo));
  return _mm256_and_pd(scaled, live);
}

}  // namespace detail_fastmath

// Sum of exp(-x[i]) for x[i] >= 0.
inline double fast_exp_neg_sum(const double* x, uint32_t n) {
  __m256d acc = _mm256_setzero_pd();
  uint32_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc,
                        detail_fastmath::exp_neg4(_mm256_sub_pd(
                            _mm256_setzero_pd(), v)));
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, acc);
  double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) sum += fast_exp_neg(-x[i]);
  return sum;
}

#else

inline double fast_exp_neg_sum(const double* x, uint32_t n) {
  double sum = 0.0;
  for (uint32_t i = 0; i < n; ++i) sum += fast_exp_neg(-x[i]);
  return sum;
}

#endif
