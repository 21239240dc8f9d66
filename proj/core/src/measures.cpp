#include "entlab/measures.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "entlab/errors.hpp"

extern "C" {
// Present when LAPACK is backed by OpenBLAS.  The library's own threading is
// pinned to one thread: parallelism lives at the sample level, and nested
// BLAS threads would make timings erratic without helping throughput.
void openblas_set_num_threads(int) __attribute__((weak));
}

namespace entlab {
namespace {

void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  });
}

}  // namespace

spectrum schmidt_spectrum(const state_matrix& m) {
  if (m.n_a < 1 || m.n_b < 1 ||
      m.c.size() != static_cast<std::size_t>(m.n_a) * m.n_b)
    throw domain_error("schmidt_spectrum: inconsistent matrix dimensions");
  pin_blas_threads();

  const int mn = std::min(m.n_a, m.n_b);
  std::vector<std::complex<double>> a = m.c;  // zgesdd destroys its input
  std::vector<double> s(static_cast<std::size_t>(mn));

  // The row-major (n_a x n_b) buffer is handed to LAPACK as the column-major
  // (n_b x n_a) transpose: singular values are transpose-invariant and this
  // avoids the wrapper's layout conversion entirely.
  const int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'N', m.n_b, m.n_a,
      reinterpret_cast<lapack_complex_double*>(a.data()), m.n_b, s.data(),
      nullptr, 1, nullptr, 1);
  if (info != 0) {
    double fro = 0;
    for (const auto& z : m.c) fro += std::norm(z);
    std::ostringstream os;
    os << "schmidt_spectrum: zgesdd failed (info = " << info << ") on "
       << m.n_a << " x " << m.n_b
       << " matrix, squared Frobenius norm = " << fro;
    throw numerical_error(os.str());
  }

  spectrum sp;
  sp.lambda.resize(s.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sp.lambda[i] = s[i] * s[i];
    total += sp.lambda[i];
  }
  if (total <= 0.0)
    throw numerical_error("schmidt_spectrum: zero spectrum");
  for (auto& v : sp.lambda) v /= total;
  // zgesdd returns singular values descending already; keep the invariant
  // explicit in case of ties perturbed by the squaring.
  std::sort(sp.lambda.begin(), sp.lambda.end(), std::greater<double>());
  return sp;
}

entropy_record entropies(const spectrum& s) {
  entropy_record r;
  double s2 = 0.0, r0 = 0.0, r1 = 0.0;
  for (const double v : s.lambda) {
    s2 += v * v;
    if (v > 0.0) r1 -= v * std::log(v);
    if (v < k_r0_floor) {
      ++r.floored;
      r0 -= std::log(k_r0_floor);
    } else {
      r0 -= std::log(v);
    }
  }
  r.s2 = s2;
  r.r0 = r0;
  r.r1 = r1;
  r.r2 = -std::log(s2);
  r.q = 1.0 / s2;
  return r;
}

point_stats aggregate(std::span<const entropy_record> records) {
  if (records.size() < 2)
    throw domain_error("aggregate: need at least two records");
  point_stats st;
  st.n = static_cast<long long>(records.size());

  double s_r0 = 0, s_r1 = 0, s_r2 = 0, s_q = 0, s_q2 = 0;
  for (const auto& r : records) {
    s_r0 += r.r0;
    s_r1 += r.r1;
    s_r2 += r.r2;
    s_q += r.q;
    s_q2 += r.q * r.q;
    st.floored_total += r.floored;
  }
  const double n = static_cast<double>(st.n);
  st.r0_mean = s_r0 / n;
  st.r1_mean = s_r1 / n;
  st.r2_mean = s_r2 / n;
  st.q_mean = s_q / n;
  st.q2_mean = s_q2 / n;

  if (st.n > 1) {
    double v_r0 = 0, v_r1 = 0, v_r2 = 0, v_q = 0;
    for (const auto& r : records) {
      v_r0 += (r.r0 - st.r0_mean) * (r.r0 - st.r0_mean);
      v_r1 += (r.r1 - st.r1_mean) * (r.r1 - st.r1_mean);
      v_r2 += (r.r2 - st.r2_mean) * (r.r2 - st.r2_mean);
      v_q += (r.q - st.q_mean) * (r.q - st.q_mean);
    }
    const double scale = 1.0 / (n * (n - 1.0));
    st.r0_err = std::sqrt(v_r0 * scale);
    st.r1_err = std::sqrt(v_r1 * scale);
    st.r2_err = std::sqrt(v_r2 * scale);
    st.q_err = std::sqrt(v_q * scale);
  }
  return st;
}

}  // namespace entlab
