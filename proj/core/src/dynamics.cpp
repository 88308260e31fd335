// Copyright 2026 The lowthrust Authors
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

#include "lowthrust/dynamics.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

constexpr double kMu = constants::kMu;

struct Trig {
  double sL;
  double cL;
  double w;
  double s2;
  double hk;  // h sin L - k cos L
};

Trig trig(const EquinoctialState& x) {
  Trig t{};
  t.sL = std::sin(x.L);
  t.cL = std::cos(x.L);
  t.w = 1.0 + x.f * t.cL + x.g * t.sL;
  t.s2 = 1.0 + x.h * x.h + x.k * x.k;
  t.hk = x.h * t.sL - x.k * t.cL;
  return t;
}

// Bracketed matrix M with B = sqrt(p/mu) M.
Mat63 bracket(const EquinoctialState& x, const Trig& t) {
  Mat63 m = Mat63::Zero();
  const double iw = 1.0 / t.w;
  m(0, 1) = 2.0 * x.p * iw;
  m(1, 0) = t.sL;
  m(1, 1) = ((1.0 + t.w) * t.cL + x.f) * iw;
  m(1, 2) = -x.g * t.hk * iw;
  m(2, 0) = -t.cL;
  m(2, 1) = ((1.0 + t.w) * t.sL + x.g) * iw;
  m(2, 2) = x.f * t.hk * iw;
  m(3, 2) = 0.5 * t.s2 * t.cL * iw;
  m(4, 2) = 0.5 * t.s2 * t.sL * iw;
  m(5, 2) = t.hk * iw;
  return m;
}

}  // namespace

Auxiliaries auxiliaries(const EquinoctialState& x) {
  return {1.0 + x.f * std::cos(x.L) + x.g * std::sin(x.L),
          1.0 + x.h * x.h + x.k * x.k};
}

void check_state(const EquinoctialState& x) {
  const double w = auxiliaries(x).w;
  if (!(x.p > 0.0) || !(w > 0.0) || !std::isfinite(x.L)) {
    std::ostringstream os;
    os << "degenerate equinoctial state: p=" << x.p << " w=" << w
       << " L=" << x.L;
    throw DegenerateStateError(os.str());
  }
}

Mat63 b_matrix(const EquinoctialState& x) {
  check_state(x);
  const Trig t = trig(x);
  return std::sqrt(x.p / kMu) * bracket(x, t);
}

Vec6 d_vector(const EquinoctialState& x) {
  check_state(x);
  const double w = auxiliaries(x).w;
  Vec6 d = Vec6::Zero();
  d[5] = std::sqrt(kMu * x.p) * (w / x.p) * (w / x.p);
  return d;
}

BPartials b_partials(const EquinoctialState& x) {
  check_state(x);
  const Trig t = trig(x);
  const double q = std::sqrt(x.p / kMu);
  const double w = t.w;
  const double w2 = w * w;
  const double iw = 1.0 / w;
  const double sL = t.sL;
  const double cL = t.cL;
  const double s2 = t.s2;
  const double hk = t.hk;
  const double wL = x.g * cL - x.f * sL;
  BPartials out;

  // 2 sqrt(mu p) dB/dp = M with the (0,1) entry replaced by 6p/w.
  Mat63 dp = bracket(x, t);
  dp(0, 1) = 6.0 * x.p * iw;
  out[0] = dp / (2.0 * std::sqrt(kMu * x.p));

  Mat63 df = Mat63::Zero();
  df(0, 1) = -2.0 * x.p * cL;
  df(1, 1) = w - (cL + x.f) * cL;
  df(1, 2) = x.g * cL * hk;
  df(2, 1) = -(sL + x.g) * cL;
  df(2, 2) = (w - x.f * cL) * hk;
  df(3, 2) = -0.5 * s2 * cL * cL;
  df(4, 2) = -0.5 * s2 * sL * cL;
  df(5, 2) = -hk * cL;
  out[1] = (q / w2) * df;

  Mat63 dg = Mat63::Zero();
  dg(0, 1) = -2.0 * x.p * sL;
  dg(1, 1) = -(cL + x.f) * sL;
  dg(1, 2) = -(w - x.g * sL) * hk;
  dg(2, 1) = w - (sL + x.g) * sL;
  dg(2, 2) = -x.f * sL * hk;
  dg(3, 2) = -0.5 * s2 * cL * sL;
  dg(4, 2) = -0.5 * s2 * sL * sL;
  dg(5, 2) = -hk * sL;
  out[2] = (q / w2) * dg;

  Mat63 dh = Mat63::Zero();
  dh(1, 2) = -x.g * sL * iw;
  dh(2, 2) = x.f * sL * iw;
  dh(3, 2) = x.h * cL * iw;
  dh(4, 2) = x.h * sL * iw;
  dh(5, 2) = sL * iw;
  out[3] = q * dh;

  Mat63 dk = Mat63::Zero();
  dk(1, 2) = x.g * cL * iw;
  dk(2, 2) = -x.f * cL * iw;
  dk(3, 2) = x.k * cL * iw;
  dk(4, 2) = x.k * sL * iw;
  dk(5, 2) = -cL * iw;
  out[4] = q * dk;

  // d/dL of hk / w, scaled by w^2.
  const double big_q = (w * x.h + wL * x.k) * cL + (w * x.k - wL * x.h) * sL;
  Mat63 dl = Mat63::Zero();
  dl(0, 1) = -2.0 * x.p * wL;
  dl(1, 0) = w2 * cL;
  dl(1, 1) = -(1.0 + w) * w * sL - wL * (cL + x.f);
  dl(1, 2) = -x.g * big_q;
  dl(2, 0) = w2 * sL;
  dl(2, 1) = (1.0 + w) * w * cL - wL * (sL + x.g);
  dl(2, 2) = x.f * big_q;
  dl(3, 2) = -0.5 * s2 * (w * sL + wL * cL);
  dl(4, 2) = 0.5 * s2 * (w * cL - wL * sL);
  dl(5, 2) = big_q;
  out[5] = (q / w2) * dl;
  return out;
}

Vec6 d_longitude_gradient(const EquinoctialState& x) {
  check_state(x);
  const double sL = std::sin(x.L);
  const double cL = std::cos(x.L);
  const double w = 1.0 + x.f * cL + x.g * sL;
  const double wL = x.g * cL - x.f * sL;
  const double r = std::sqrt(kMu / (x.p * x.p * x.p));
  Vec6 grad = Vec6::Zero();
  grad[0] = -1.5 * r / x.p * w * w;
  grad[1] = 2.0 * w * r * cL;
  grad[2] = 2.0 * w * r * sL;
  grad[5] = 2.0 * w * r * wL;
  return grad;
}

StateRates eom_rhs(const EquinoctialState& x, double m, const Control& control,
                   const ThrustConfig& cfg) {
  if (!(control.throttle >= 0.0 && control.throttle <= 1.0)) {
    throw DomainError("throttle outside [0, 1]");
  }
  if (std::abs(control.direction.norm() - 1.0) > 1e-12) {
    throw DomainError("thrust direction is not a unit vector");
  }
  if (!(m > 0.0)) throw DegenerateStateError("non-positive mass");
  StateRates rates;
  rates.x_dot = (cfg.c1 * control.throttle / m) * (b_matrix(x) * control.direction) +
                d_vector(x);
  rates.m_dot = -cfg.c2 * control.throttle;
  return rates;
}

CartesianState to_cartesian(const EquinoctialState& x, double mu) {
  check_state(x);
  const double sL = std::sin(x.L);
  const double cL = std::cos(x.L);
  const double alpha2 = x.h * x.h - x.k * x.k;
  const double s2 = 1.0 + x.h * x.h + x.k * x.k;
  const double w = 1.0 + x.f * cL + x.g * sL;
  const double radius = x.p / w;
  const double hk2 = 2.0 * x.h * x.k;
  const double sqrt_mu_p = std::sqrt(mu / x.p);

  CartesianState out;
  out.r = (radius / s2) * Vec3(cL + alpha2 * cL + hk2 * sL,
                               sL - alpha2 * sL + hk2 * cL,
                               2.0 * (x.h * sL - x.k * cL));
  out.v = (-sqrt_mu_p / s2) *
          Vec3(sL + alpha2 * sL - hk2 * cL + x.g - hk2 * x.f + alpha2 * x.g,
               -cL + alpha2 * cL + hk2 * sL - x.f + hk2 * x.g + alpha2 * x.f,
               -2.0 * (x.h * cL + x.k * sL + x.f * x.h + x.g * x.k));
  return out;
}

EquinoctialState from_cartesian(const Vec3& r, const Vec3& v, double mu) {
  const Vec3 hvec = r.cross(v);
  const double hnorm = hvec.norm();
  const double rnorm = r.norm();
  if (!(rnorm > 0.0) || !(hnorm > 1e-14 * rnorm * v.norm())) {
    throw DegenerateStateError("rectilinear or zero-radius orbit");
  }
  const Vec3 hhat = hvec / hnorm;
  if (!(1.0 + hhat.z() > 1e-12)) {
    throw DegenerateStateError("retrograde equatorial orbit (i = 180 deg)");
  }
  EquinoctialState x;
  x.p = hnorm * hnorm / mu;
  x.k = hhat.x() / (1.0 + hhat.z());
  x.h = -hhat.y() / (1.0 + hhat.z());

  const double s2 = 1.0 + x.h * x.h + x.k * x.k;
  const Vec3 fhat = Vec3(1.0 - x.k * x.k + x.h * x.h, 2.0 * x.k * x.h,
                         -2.0 * x.k) / s2;
  const Vec3 ghat = Vec3(2.0 * x.k * x.h, 1.0 + x.k * x.k - x.h * x.h,
                         2.0 * x.h) / s2;
  const Vec3 ecc = v.cross(hvec) / mu - r / rnorm;
  if (!(ecc.norm() < 1.0)) {
    throw DegenerateStateError("non-elliptic orbit (e >= 1)");
  }
  x.f = ecc.dot(fhat);
  x.g = ecc.dot(ghat);
  x.L = wrap_two_pi(std::atan2(r.dot(ghat), r.dot(fhat)));
  return x;
}

double wrap_two_pi(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double out = std::fmod(angle, kTwoPi);
  if (out < 0.0) out += kTwoPi;
  if (out >= kTwoPi) out -= kTwoPi;
  return out;
}

}  // namespace lowthrust
