// Copyright 2026 The flexmpc Authors
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

#ifndef FLEXMPC_MATH_DUAL_HPP_
#define FLEXMPC_MATH_DUAL_HPP_

#include <Eigen/Core>

#include <cmath>
#include <ostream>

namespace flexmpc {

/// Forward-mode dual number carrying a fixed-width block of W directional
/// derivatives. Full Jacobians are obtained by sweeping the input in chunks
/// of W seed directions (see diff/jacobians.hpp).
///
/// Arithmetic follows the product/chain rules exactly; comparisons act on the
/// value part only, so branchy code (abs, clamping) differentiates the taken
/// branch.
template <int W>
struct Dual {
  using Deriv = Eigen::Matrix<double, W, 1>;

  double val;
  Deriv dot;

  Dual() : val(0.0), dot(Deriv::Zero()) {}
  Dual(double v) : val(v), dot(Deriv::Zero()) {}  // NOLINT: implicit constant lift
  Dual(double v, const Deriv& d) : val(v), dot(d) {}

  static Dual Seed(double v, int direction) {
    Dual out(v);
    out.dot[direction] = 1.0;
    return out;
  }

  Dual operator-() const { return Dual(-val, -dot); }

  Dual& operator+=(const Dual& r) {
    val += r.val;
    dot += r.dot;
    return *this;
  }
  Dual& operator-=(const Dual& r) {
    val -= r.val;
    dot -= r.dot;
    return *this;
  }
  Dual& operator*=(const Dual& r) {
    dot = dot * r.val + r.dot * val;
    val *= r.val;
    return *this;
  }
  Dual& operator/=(const Dual& r) {
    const double inv = 1.0 / r.val;
    val *= inv;
    dot = (dot - r.dot * val) * inv;
    return *this;
  }
  Dual& operator+=(double r) {
    val += r;
    return *this;
  }
  Dual& operator-=(double r) {
    val -= r;
    return *this;
  }
  Dual& operator*=(double r) {
    val *= r;
    dot *= r;
    return *this;
  }
  Dual& operator/=(double r) {
    val /= r;
    dot /= r;
    return *this;
  }
};

template <int W>
inline Dual<W> operator+(Dual<W> a, const Dual<W>& b) { return a += b; }
template <int W>
inline Dual<W> operator+(Dual<W> a, double b) { return a += b; }
template <int W>
inline Dual<W> operator+(double a, Dual<W> b) { return b += a; }

template <int W>
inline Dual<W> operator-(Dual<W> a, const Dual<W>& b) { return a -= b; }
template <int W>
inline Dual<W> operator-(Dual<W> a, double b) { return a -= b; }
template <int W>
inline Dual<W> operator-(double a, const Dual<W>& b) { return Dual<W>(a - b.val, -b.dot); }

template <int W>
inline Dual<W> operator*(Dual<W> a, const Dual<W>& b) { return a *= b; }
template <int W>
inline Dual<W> operator*(Dual<W> a, double b) { return a *= b; }
template <int W>
inline Dual<W> operator*(double a, Dual<W> b) { return b *= a; }

template <int W>
inline Dual<W> operator/(Dual<W> a, const Dual<W>& b) { return a /= b; }
template <int W>
inline Dual<W> operator/(Dual<W> a, double b) { return a /= b; }
template <int W>
inline Dual<W> operator/(double a, const Dual<W>& b) {
  const double v = a / b.val;
  return Dual<W>(v, b.dot * (-v / b.val));
}

template <int W>
inline bool operator<(const Dual<W>& a, const Dual<W>& b) { return a.val < b.val; }
template <int W>
inline bool operator<(const Dual<W>& a, double b) { return a.val < b; }
template <int W>
inline bool operator<(double a, const Dual<W>& b) { return a < b.val; }
template <int W>
inline bool operator>(const Dual<W>& a, const Dual<W>& b) { return a.val > b.val; }
template <int W>
inline bool operator>(const Dual<W>& a, double b) { return a.val > b; }
template <int W>
inline bool operator>(double a, const Dual<W>& b) { return a > b.val; }
template <int W>
inline bool operator<=(const Dual<W>& a, const Dual<W>& b) { return a.val <= b.val; }
template <int W>
inline bool operator>=(const Dual<W>& a, const Dual<W>& b) { return a.val >= b.val; }
template <int W>
inline bool operator==(const Dual<W>& a, const Dual<W>& b) { return a.val == b.val; }
template <int W>
inline bool operator!=(const Dual<W>& a, const Dual<W>& b) { return a.val != b.val; }

template <int W>
inline Dual<W> sin(const Dual<W>& a) {
  return Dual<W>(std::sin(a.val), a.dot * std::cos(a.val));
}
template <int W>
inline Dual<W> cos(const Dual<W>& a) {
  return Dual<W>(std::cos(a.val), a.dot * (-std::sin(a.val)));
}
template <int W>
inline Dual<W> exp(const Dual<W>& a) {
  const double e = std::exp(a.val);
  return Dual<W>(e, a.dot * e);
}
template <int W>
inline Dual<W> sqrt(const Dual<W>& a) {
  const double s = std::sqrt(a.val);
  return Dual<W>(s, a.dot * (0.5 / s));
}
template <int W>
inline Dual<W> tanh(const Dual<W>& a) {
  const double t = std::tanh(a.val);
  return Dual<W>(t, a.dot * (1.0 - t * t));
}
template <int W>
inline Dual<W> abs(const Dual<W>& a) {
  return a.val < 0.0 ? -a : a;
}

template <int W>
inline double value(const Dual<W>& a) { return a.val; }
inline double value(double a) { return a; }

template <int W>
inline std::ostream& operator<<(std::ostream& os, const Dual<W>& a) {
  return os << a.val;
}

using std::abs;
using std::cos;
using std::exp;
using std::sin;
using std::sqrt;
using std::tanh;

}  // namespace flexmpc

namespace Eigen {

template <int W>
struct NumTraits<flexmpc::Dual<W>> : NumTraits<double> {
  using Real = flexmpc::Dual<W>;
  using NonInteger = flexmpc::Dual<W>;
  using Nested = flexmpc::Dual<W>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1 + W,
    AddCost = 1 + W,
    MulCost = 2 + 2 * W,
  };
};

// Mixed double/Dual expressions promote to Dual.
template <int W, typename BinaryOp>
struct ScalarBinaryOpTraits<flexmpc::Dual<W>, double, BinaryOp> {
  using ReturnType = flexmpc::Dual<W>;
};
template <int W, typename BinaryOp>
struct ScalarBinaryOpTraits<double, flexmpc::Dual<W>, BinaryOp> {
  using ReturnType = flexmpc::Dual<W>;
};

}  // namespace Eigen

#endif  // FLEXMPC_MATH_DUAL_HPP_
