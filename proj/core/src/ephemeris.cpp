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

#include "lowthrust/ephemeris.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// One row of the approximate Keplerian element table for 1800-2050 AD
// (E. M. Standish, JPL Solar System Dynamics, "Keplerian Elements for
// Approximate Positions of the Major Planets", Table 1). Units: AU, degrees,
// and per Julian century for the rates. "Earth" is the Earth-Moon barycenter.
struct ElementRow {
  double a, a_dot;
  double e, e_dot;
  double incl, incl_dot;
  double mean_long, mean_long_dot;
  double long_peri, long_peri_dot;
  double node, node_dot;
};

constexpr ElementRow kEarthMoonBary = {
    1.00000261,   0.00000562,     0.01671123,  -0.00004392,
    -0.00001531,  -0.01294668,    100.46457166, 35999.37244981,
    102.93768193, 0.32327364,     0.0,          0.0};

constexpr ElementRow kVenus = {
    0.72333566,   0.00000390,     0.00677672,   -0.00004107,
    3.39467605,   -0.00078890,    181.97909950, 58517.81538729,
    131.60246718, 0.00268329,     76.67984255,  -0.27769418};

const ElementRow& row(Planet planet) {
  switch (planet) {
    case Planet::kEarth:
      return kEarthMoonBary;
    case Planet::kVenus:
      return kVenus;
  }
  throw DomainError("unsupported planet");
}

double wrap_pi(double angle) {
  double out = wrap_two_pi(angle);
  if (out > std::numbers::pi) out -= 2.0 * std::numbers::pi;
  return out;
}

}  // namespace

Epoch epoch_from_date(int year, int month, int day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year},
                           std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (month < 1 || month > 12 || day < 1 || !ymd.ok()) {
    throw DomainError("invalid calendar date " + std::to_string(year) + "-" +
                      std::to_string(month) + "-" + std::to_string(day));
  }
  const sys_days origin{std::chrono::year{2000} / January / 1};
  return Epoch{static_cast<double>((sys_days{ymd} - origin).count())};
}

Epoch epoch_from_string(std::string_view iso_date) {
  int y = 0;
  int m = 0;
  int d = 0;
  char tail = 0;
  const std::string s(iso_date);
  if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail) != 3) {
    throw DomainError("expected a YYYY-MM-DD date, got '" + s + "'");
  }
  return epoch_from_date(y, m, d);
}

Planet planet_from_string(std::string_view name) {
  if (name == "earth" || name == "Earth") return Planet::kEarth;
  if (name == "venus" || name == "Venus") return Planet::kVenus;
  throw DomainError("unsupported planet '" + std::string(name) + "'");
}

std::string to_string(Planet planet) {
  return planet == Planet::kEarth ? "earth" : "venus";
}

KeplerianElements planet_elements(Planet planet, Epoch epoch) {
  const ElementRow& r = row(planet);
  // Julian centuries past J2000.0 (2000-01-01 12:00).
  const double t = (epoch.mjd2000 - 0.5) / 36525.0;
  const double node = (r.node + r.node_dot * t) * kDeg;
  const double peri = (r.long_peri + r.long_peri_dot * t) * kDeg;
  const double mean_long = (r.mean_long + r.mean_long_dot * t) * kDeg;
  KeplerianElements el;
  el.a = r.a + r.a_dot * t;
  el.e = r.e + r.e_dot * t;
  el.i = (r.incl + r.incl_dot * t) * kDeg;
  el.raan = node;
  el.argp = peri - node;
  el.mean_anomaly = wrap_pi(mean_long - peri);
  return el;
}

double solve_kepler(double mean_anomaly, double e) {
  if (!(e >= 0.0 && e < 1.0)) throw DomainError("eccentricity outside [0, 1)");
  const double m = wrap_pi(mean_anomaly);
  double ecc_anom = m + 0.85 * e * (std::sin(m) >= 0.0 ? 1.0 : -1.0);
  double residual = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    residual = ecc_anom - e * std::sin(ecc_anom) - m;
    if (std::abs(residual) < 1e-15) break;
    ecc_anom -= residual / (1.0 - e * std::cos(ecc_anom));
  }
  residual = ecc_anom - e * std::sin(ecc_anom) - m;
  if (!(std::abs(residual) < 1e-13)) {
    throw ConvergenceError("Kepler equation did not converge");
  }
  return ecc_anom + (mean_anomaly - m);
}

EquinoctialState keplerian_to_equinoctial(const KeplerianElements& el) {
  const double ecc_anom = solve_kepler(el.mean_anomaly, el.e);
  const double nu = 2.0 * std::atan2(std::sqrt(1.0 + el.e) *
                                         std::sin(0.5 * ecc_anom),
                                     std::sqrt(1.0 - el.e) *
                                         std::cos(0.5 * ecc_anom));
  const double peri = el.raan + el.argp;
  const double t = std::tan(0.5 * el.i);
  EquinoctialState x;
  x.p = el.a * (1.0 - el.e * el.e);
  x.f = el.e * std::cos(peri);
  x.g = el.e * std::sin(peri);
  x.h = t * std::cos(el.raan);
  x.k = t * std::sin(el.raan);
  x.L = wrap_two_pi(peri + nu);
  return x;
}

CartesianState keplerian_to_cartesian(const KeplerianElements& el, double mu) {
  const double ecc_anom = solve_kepler(el.mean_anomaly, el.e);
  const double ce = std::cos(ecc_anom);
  const double se = std::sin(ecc_anom);
  const double b = std::sqrt(1.0 - el.e * el.e);
  const double n = std::sqrt(mu / (el.a * el.a * el.a));
  const double denom = 1.0 - el.e * ce;
  const Vec3 r_pf(el.a * (ce - el.e), el.a * b * se, 0.0);
  const Vec3 v_pf(-el.a * n * se / denom, el.a * n * b * ce / denom, 0.0);

  const double cO = std::cos(el.raan), sO = std::sin(el.raan);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);
  const double ci = std::cos(el.i), si = std::sin(el.i);
  Eigen::Matrix3d rot;
  rot << cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si,
      sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si,
      sw * si, cw * si, ci;
  return {rot * r_pf, rot * v_pf};
}

PlanetState planet_state(Planet planet, Epoch epoch) {
  PlanetState s;
  s.keplerian = planet_elements(planet, epoch);
  s.cartesian = keplerian_to_cartesian(s.keplerian);
  s.elements = keplerian_to_equinoctial(s.keplerian);
  return s;
}

}  // namespace lowthrust
