#pragma once

#include <vector>

#include "ags/crypto/curve.hpp"

namespace ags::testing::toy {

using crypto::ECPoint;

// Brute-force model of the toy curve y^2 = x^3 + 2x + 2 over F_17 in plain
// integers, written from the textbook chord-and-tangent formulas.
struct ToyPoint {
  bool inf = true;
  int x = 0, y = 0;
  bool operator==(const ToyPoint&) const = default;
};

inline int md(int v, int m) { return ((v % m) + m) % m; }

inline int inv_mod(int v, int m) {
  for (int i = 1; i < m; ++i) {
    if (md(v * i, m) == 1) return i;
  }
  return -1;
}

inline ToyPoint toy_add(ToyPoint a, ToyPoint b) {
  if (a.inf) return b;
  if (b.inf) return a;
  int l;
  if (a.x == b.x) {
    if (md(a.y + b.y, 17) == 0) return {};
    l = md((3 * a.x * a.x + 2) * inv_mod(md(2 * a.y, 17), 17), 17);
  } else {
    l = md((b.y - a.y) * inv_mod(md(b.x - a.x, 17), 17), 17);
  }
  const int x3 = md(l * l - a.x - b.x, 17);
  return {false, x3, md(l * (a.x - x3) - a.y, 17)};
}

inline std::vector<ToyPoint> toy_points() {
  std::vector<ToyPoint> pts{ToyPoint{}};
  for (int x = 0; x < 17; ++x) {
    for (int y = 0; y < 17; ++y) {
      if (md(y * y - (x * x * x + 2 * x + 2), 17) == 0) pts.push_back({false, x, y});
    }
  }
  return pts;
}

inline ECPoint to_ec(const ToyPoint& p) { return p.inf ? ECPoint::infinity() : ECPoint(p.x, p.y); }

// k*G on the toy curve by repeated addition.
inline ToyPoint toy_mul(int k) {
  ToyPoint acc;
  for (int i = 0; i < k; ++i) acc = toy_add(acc, {false, 5, 1});
  return acc;
}

// Signature verification evaluated directly on the brute-force model.
inline bool toy_verify(ToyPoint Q, int z, int r, int s) {
  if (r < 1 || r > 18 || s < 1 || s > 18) return false;
  const int w = inv_mod(s, 19);
  const int u1 = md(z * w, 19), u2 = md(r * w, 19);
  ToyPoint X = toy_mul(u1);
  ToyPoint Y;
  for (int i = 0; i < u2; ++i) Y = toy_add(Y, Q);
  X = toy_add(X, Y);
  return !X.inf && md(X.x, 19) == r;
}

}  // namespace ags::testing::toy
