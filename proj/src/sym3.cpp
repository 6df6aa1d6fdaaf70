#include "bsq/sym3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsq {

double Sym3::max_abs_entry() const {
  double m = 0.0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

double Sym3::determinant() const {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

double Sym3::asymmetry() const {
  return std::max({std::abs(a[0][1] - a[1][0]), std::abs(a[0][2] - a[2][0]), std::abs(a[1][2] - a[2][1])});
}

std::array<double, 3> eigenvalues_jacobi(const Sym3& m) {
  auto s = m.a;
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
    const double diag = s[0][0] * s[0][0] + s[1][1] * s[1][1] + s[2][2] * s[2][2];
    if (off <= 1e-36 * diag || off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (s[p][q] == 0.0) continue;
        const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < 3; ++k) {
          const double skp = s[k][p];
          const double skq = s[k][q];
          s[k][p] = c * skp - sn * skq;
          s[k][q] = sn * skp + c * skq;
        }
        for (int k = 0; k < 3; ++k) {
          const double spk = s[p][k];
          const double sqk = s[q][k];
          s[p][k] = c * spk - sn * sqk;
          s[q][k] = sn * spk + c * sqk;
        }
      }
    }
  }
  std::array<double, 3> ev{s[0][0], s[1][1], s[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::array<double, 3> eigenvalues(const Sym3& m) {
  const auto& a = m.a;
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  if (p1 == 0.0) {
    std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double d0 = a[0][0] - q;
  const double d1 = a[1][1] - q;
  const double d2 = a[2][2] - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double scale = std::max({std::abs(q), p, m.max_abs_entry()});
  if (p < 1e-6 * scale) return eigenvalues_jacobi(m);

  // B = (A - qI) / p, half its determinant is cos(3 phi).
  Sym3 b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double half_det = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  // acos loses half the digits near +-1, i.e. near a double root.
  if (std::abs(half_det) > 1.0 - 1e-4) return eigenvalues_jacobi(m);
  const double phi = std::acos(half_det) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double mid = 3.0 * q - hi - lo;
  std::array<double, 3> ev{lo, mid, hi};
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace bsq
