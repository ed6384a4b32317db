#include "floquet/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "floquet/errors.hpp"

namespace floquet {

using cd = std::complex<double>;

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

void reduce_to_hessenberg(ComplexMatrix& a) {
  const std::size_t n = a.size();
  if (n < 3) return;
  std::vector<cd> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(a(i, k));
    if (tail == 0.0) continue;

    const cd x0 = a(k + 1, k);
    const double xnorm = std::sqrt(tail + std::norm(x0));
    const cd phase = std::abs(x0) == 0.0 ? cd(1.0, 0.0) : x0 / std::abs(x0);
    const cd alpha = -phase * xnorm;

    // v = (x - alpha e1) / |x - alpha e1|, reflector I - 2 v v^H.
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    vnorm = std::sqrt(vnorm);
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

    for (std::size_t j = 0; j < n; ++j) {
      cd dot{};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
      dot *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * dot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cd dot{};
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      dot *= 2.0;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

namespace {

struct Givens {
  double c;
  cd s;
};

// [c s; -conj(s) c] [a; b] = [r; 0]
Givens make_givens(cd a, cd b) {
  const double babs = std::abs(b);
  if (babs == 0.0) return {1.0, 0.0};
  const double aabs = std::abs(a);
  if (aabs == 0.0) return {0.0, std::conj(b) / babs};
  const double r = std::hypot(aabs, babs);
  return {aabs / r, (a / aabs) * std::conj(b) / r};
}

void eig2x2(cd a, cd b, cd c, cd d, std::vector<cd>& out) {
  const cd mean = 0.5 * (a + d);
  const cd disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  cd l1 = mean + disc;
  if (std::abs(mean - disc) > std::abs(l1)) l1 = mean - disc;
  const cd det = a * d - b * c;
  const cd l2 = std::abs(l1) == 0.0 ? cd(0.0) : det / l1;
  out.push_back(l1);
  out.push_back(l2);
}

cd wilkinson_shift(cd a, cd b, cd c, cd d) {
  const cd mean = 0.5 * (a + d);
  const cd disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const cd l1 = mean + disc;
  const cd l2 = mean - disc;
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<cd> eigenvalues(ComplexMatrix h, const EigenOptions& opts) {
  const std::size_t n = h.size();
  std::vector<cd> out;
  out.reserve(n);
  if (n == 0) return out;
  // Triangular input: the eigenvalues are isolated on the diagonal. Iterating
  // would only perturb them, badly so when they are defective.
  bool upper = true, lower = true;
  for (std::size_t i = 0; i < n && (upper || lower); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (h(i, j) != cd(0.0)) upper = false;
      if (h(j, i) != cd(0.0)) lower = false;
    }
  }
  if (upper || lower) {
    for (std::size_t i = n; i-- > 0;) out.push_back(h(i, i));
    return out;
  }

  const double norm = h.frobenius_norm();
  reduce_to_hessenberg(h);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<Givens> rot(n);
  long hi = static_cast<long>(n) - 1;
  int iter = 0;
  int total = 0;

  while (hi >= 0) {
    if (hi == 0) {
      out.push_back(h(0, 0));
      break;
    }
    long lo = hi;
    while (lo > 0) {
      const auto l = static_cast<std::size_t>(lo);
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) <= eps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
      --lo;
    }
    const auto uhi = static_cast<std::size_t>(hi);
    if (lo == hi) {
      out.push_back(h(uhi, uhi));
      --hi;
      iter = 0;
      continue;
    }
    if (lo == hi - 1) {
      eig2x2(h(uhi - 1, uhi - 1), h(uhi - 1, uhi), h(uhi, uhi - 1), h(uhi, uhi), out);
      hi -= 2;
      iter = 0;
      continue;
    }

    if (++iter > opts.max_iterations_per_eigenvalue) {
      throw NumericalError("eigenvalues: QR iteration did not converge after " + std::to_string(total) +
                           " sweeps (dimension " + std::to_string(n) + ", |A|_F = " + std::to_string(norm) +
                           ", unconverged window " + std::to_string(lo) + ".." + std::to_string(hi) + ")");
    }
    ++total;

    cd mu;
    if (iter % 10 == 0) {
      // Exceptional shift to break cycles.
      mu = h(uhi, uhi) + 0.75 * std::abs(h(uhi, uhi - 1));
    } else {
      mu = wilkinson_shift(h(uhi - 1, uhi - 1), h(uhi - 1, uhi), h(uhi, uhi - 1), h(uhi, uhi));
    }

    const auto ulo = static_cast<std::size_t>(lo);
    for (std::size_t i = ulo; i <= uhi; ++i) h(i, i) -= mu;
    for (std::size_t i = ulo; i < uhi; ++i) {
      const Givens g = make_givens(h(i, i), h(i + 1, i));
      rot[i] = g;
      for (std::size_t j = i; j <= uhi; ++j) {
        const cd x = h(i, j);
        const cd y = h(i + 1, j);
        h(i, j) = g.c * x + g.s * y;
        h(i + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
      h(i + 1, i) = 0.0;
    }
    for (std::size_t i = ulo; i < uhi; ++i) {
      const Givens g = rot[i];
      const std::size_t last = std::min(i + 2, uhi);
      for (std::size_t r = ulo; r <= last; ++r) {
        const cd x = h(r, i);
        const cd y = h(r, i + 1);
        h(r, i) = x * g.c + y * std::conj(g.s);
        h(r, i + 1) = -x * g.s + y * g.c;
      }
    }
    for (std::size_t i = ulo; i <= uhi; ++i) h(i, i) += mu;
  }
  return out;
}

}  // namespace floquet
