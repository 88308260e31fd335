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

#ifndef LOWTHRUST_INTEGRATOR_HPP_
#define LOWTHRUST_INTEGRATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lowthrust/errors.hpp"
#include "lowthrust/pmp.hpp"

namespace lowthrust {

struct IntegratorConfig {
  double rel_tol = 1e-13;
  double abs_tol = 1e-13;
  std::size_t max_steps = 2'000'000;
  double initial_step = 0.0;  // 0 selects a starting step automatically
  double max_step = 0.0;      // 0 means unbounded
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// Dormand & Prince 8(5,3) embedded pair with Hairer's error estimator.
// Holds the step-size state so consecutive calls to advance() continue
// smoothly; each instance owns its workspace.
template <int N>
class Dop853 {
 public:
  using Vector = Eigen::Matrix<double, N, 1>;

  explicit Dop853(const IntegratorConfig& cfg) : cfg_(cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
      throw DomainError("integrator tolerances must be positive");
    }
  }

  [[nodiscard]] const IntegratorStats& stats() const { return stats_; }

  // Integrates y from t to t_end in place. Any lowthrust::Error raised by the
  // right-hand side during a trial stage rejects the step; failure to make
  // progress raises PropagationError.
  template <class Rhs>
  void advance(Rhs&& rhs, Vector& y, double t, double t_end) {
    if (t == t_end) return;
    const double dir = t_end > t ? 1.0 : -1.0;
    const double span = std::abs(t_end - t);
    double hmax = cfg_.max_step > 0.0 ? cfg_.max_step : span;
    hmax = std::min(hmax, span);

    Vector k1 = eval(rhs, t, y, /*trial=*/false);
    double h = h_ > 0.0 ? h_ : (cfg_.initial_step > 0.0
                                    ? cfg_.initial_step
                                    : initial_step(rhs, t, y, k1, dir, hmax));
    h = std::min(h, hmax);

    while (dir * (t_end - t) > 0.0) {
      if (stats_.accepted + stats_.rejected >= cfg_.max_steps) {
        fail("step budget exhausted", t);
      }
      bool last = false;
      double step = h;
      const double min_step =
          16.0 * std::numeric_limits<double>::epsilon() *
          std::max(1.0, std::abs(t));
      // Absorb a sliver that would otherwise be left before t_end.
      if (step >= std::abs(t_end - t) - min_step) {
        step = std::abs(t_end - t);
        last = true;
      }
      if (step < min_step) fail("step size underflow", t);

      Vector y_new;
      double err = 0.0;
      if (!attempt(rhs, t, y, k1, dir * step, y_new, err)) {
        ++stats_.rejected;
        h = step * 0.25;
        continue;
      }
      if (err > 1.0) {
        ++stats_.rejected;
        h = step * std::max(kMinScale, kSafety * std::pow(err, -0.125));
        continue;
      }
      Vector k_next;
      try {
        k_next = eval(rhs, last ? t_end : t + dir * step, y_new, true);
      } catch (const Error& e) {
        last_error_ = e.what();
        ++stats_.rejected;
        h = step * 0.25;
        continue;
      }
      ++stats_.accepted;
      const double scale =
          err == 0.0 ? kMaxScale
                     : std::clamp(kSafety * std::pow(err, -0.125), kMinScale,
                                  kMaxScale);
      t = last ? t_end : t + dir * step;
      y = y_new;
      k1 = k_next;
      // A step clipped to reach t_end says nothing about the natural size.
      const double next = last && step < h ? h : step * scale;
      h = std::min(next, hmax);
    }
    h_ = h;
  }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinScale = 0.333;
  static constexpr double kMaxScale = 6.0;

  [[noreturn]] void fail(const char* why, double t) const {
    std::ostringstream os;
    os << "propagation failed at t=" << t << ": " << why << " ("
       << stats_.accepted << " accepted, " << stats_.rejected << " rejected)";
    if (!last_error_.empty()) os << "; last rejected evaluation: " << last_error_;
    throw PropagationError(os.str());
  }

  template <class Rhs>
  Vector eval(Rhs& rhs, double t, const Vector& y, bool trial) {
    ++stats_.evaluations;
    if (trial) return checked_rhs(rhs, t, y);
    try {
      return checked_rhs(rhs, t, y);
    } catch (const Error& e) {
      throw PropagationError(std::string("invalid state: ") + e.what());
    }
  }

  template <class Rhs>
  static Vector checked_rhs(Rhs& rhs, double t, const Vector& y) {
    if (!y.allFinite()) throw DegenerateStateError("non-finite state");
    Vector out = rhs(t, y);
    if (!out.allFinite()) throw DegenerateStateError("non-finite rates");
    return out;
  }

  double error_norm(const Vector& y0, const Vector& y1, const Vector& e5,
                    const Vector& e3) const {
    double err5 = 0.0;
    double err3 = 0.0;
    for (int i = 0; i < y0.size(); ++i) {
      const double sk = cfg_.abs_tol +
                        cfg_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      err5 += (e5[i] / sk) * (e5[i] / sk);
      err3 += (e3[i] / sk) * (e3[i] / sk);
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return err5 * std::sqrt(1.0 / (deno * static_cast<double>(y0.size())));
  }

  template <class Rhs>
  double initial_step(Rhs& rhs, double t, const Vector& y, const Vector& f0,
                      double dir, double hmax) {
    Vector sk = (cfg_.abs_tol + cfg_.rel_tol * y.array().abs()).matrix();
    const double dnf = (f0.array() / sk.array()).square().sum();
    const double dny = (y.array() / sk.array()).square().sum();
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6
                                              : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    try {
      const Vector y1 = y + dir * h * f0;
      const Vector f1 = eval(rhs, t + dir * h, y1, true);
      const double der2 =
          std::sqrt(((f1 - f0).array() / sk.array()).square().sum()) / h;
      const double der12 = std::max(der2, std::sqrt(dnf));
      const double h1 = der12 <= 1e-15
                            ? std::max(1e-6, h * 1e-3)
                            : std::pow(0.01 / der12, 1.0 / 8.0);
      h = std::min({100.0 * h, h1, hmax});
    } catch (const Error&) {
      h *= 0.01;
    }
    return h;
  }

  // One trial step; returns false when a stage evaluation failed.
  template <class Rhs>
  bool attempt(Rhs& rhs, double t, const Vector& y, const Vector& k1, double h,
               Vector& y_new, double& err) {
    try {
      const Vector k2 = eval(rhs, t + c2 * h, y + h * (a21 * k1), true);
      const Vector k3 =
          eval(rhs, t + c3 * h, y + h * (a31 * k1 + a32 * k2), true);
      const Vector k4 =
          eval(rhs, t + c4 * h, y + h * (a41 * k1 + a43 * k3), true);
      const Vector k5 = eval(rhs, t + c5 * h,
                             y + h * (a51 * k1 + a53 * k3 + a54 * k4), true);
      const Vector k6 = eval(rhs, t + c6 * h,
                             y + h * (a61 * k1 + a64 * k4 + a65 * k5), true);
      const Vector k7 = eval(
          rhs, t + c7 * h,
          y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6), true);
      const Vector k8 = eval(
          rhs, t + c8 * h,
          y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7),
          true);
      const Vector k9 = eval(rhs, t + c9 * h,
                             y + h * (a91 * k1 + a94 * k4 + a95 * k5 +
                                      a96 * k6 + a97 * k7 + a98 * k8),
                             true);
      const Vector k10 = eval(rhs, t + c10 * h,
                              y + h * (a101 * k1 + a104 * k4 + a105 * k5 +
                                       a106 * k6 + a107 * k7 + a108 * k8 +
                                       a109 * k9),
                              true);
      const Vector k11 = eval(rhs, t + c11 * h,
                              y + h * (a111 * k1 + a114 * k4 + a115 * k5 +
                                       a116 * k6 + a117 * k7 + a118 * k8 +
                                       a119 * k9 + a1110 * k10),
                              true);
      const Vector k12 = eval(rhs, t + h,
                              y + h * (a121 * k1 + a124 * k4 + a125 * k5 +
                                       a126 * k6 + a127 * k7 + a128 * k8 +
                                       a129 * k9 + a1210 * k10 + a1211 * k11),
                              true);
      const Vector incr = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 +
                          b10 * k10 + b11 * k11 + b12 * k12;
      y_new = y + h * incr;
      const Vector e5 = h * (er1 * k1 + er6 * k6 + er7 * k7 + er8 * k8 +
                             er9 * k9 + er10 * k10 + er11 * k11 + er12 * k12);
      const Vector e3 = h * (incr - bhh1 * k1 - bhh2 * k9 - bhh3 * k12);
      err = error_norm(y, y_new, e5, e3);
      if (!y_new.allFinite() || !std::isfinite(err)) return false;
      return true;
    } catch (const PropagationError&) {
      throw;
    } catch (const Error& e) {
      last_error_ = e.what();
      return false;
    }
  }

  // Hairer's DOP853 tableau.
  static constexpr double c2 = 0.526001519587677318785587544488e-01;
  static constexpr double c3 = 0.789002279381515978178381316732e-01;
  static constexpr double c4 = 0.118350341907227396726757197510e+00;
  static constexpr double c5 = 0.281649658092772603273242802490e+00;
  static constexpr double c6 = 0.333333333333333333333333333333e+00;
  static constexpr double c7 = 0.25e+00;
  static constexpr double c8 = 0.307692307692307692307692307692e+00;
  static constexpr double c9 = 0.651282051282051282051282051282e+00;
  static constexpr double c10 = 0.6e+00;
  static constexpr double c11 = 0.857142857142857142857142857142e+00;

  static constexpr double a21 = 5.26001519587677318785587544488e-2;
  static constexpr double a31 = 1.97250569845378994544595329183e-2;
  static constexpr double a32 = 5.91751709536136983633785987549e-2;
  static constexpr double a41 = 2.95875854768068491816892993775e-2;
  static constexpr double a43 = 8.87627564304205475450678981324e-2;
  static constexpr double a51 = 2.41365134159266685502369798665e-1;
  static constexpr double a53 = -8.84549479328286085344864962717e-1;
  static constexpr double a54 = 9.24834003261792003115737966543e-1;
  static constexpr double a61 = 3.7037037037037037037037037037e-2;
  static constexpr double a64 = 1.70828608729473871279604482173e-1;
  static constexpr double a65 = 1.25467687566822425016691814123e-1;
  static constexpr double a71 = 3.7109375e-2;
  static constexpr double a74 = 1.70252211019544039314978060272e-1;
  static constexpr double a75 = 6.02165389804559606850219397283e-2;
  static constexpr double a76 = -1.7578125e-2;
  static constexpr double a81 = 3.70920001185047927108779319836e-2;
  static constexpr double a84 = 1.70383925712239993810214054705e-1;
  static constexpr double a85 = 1.07262030446373284651809199168e-1;
  static constexpr double a86 = -1.53194377486244017527936158236e-2;
  static constexpr double a87 = 8.27378916381402288758473766002e-3;
  static constexpr double a91 = 6.24110958716075717114429577812e-1;
  static constexpr double a94 = -3.36089262944694129406857109825e0;
  static constexpr double a95 = -8.68219346841726006818189891453e-1;
  static constexpr double a96 = 2.75920996994467083049415600797e1;
  static constexpr double a97 = 2.01540675504778934086186788979e1;
  static constexpr double a98 = -4.34898841810699588477366255144e1;
  static constexpr double a101 = 4.77662536438264365890433908527e-1;
  static constexpr double a104 = -2.48811461997166764192642586468e0;
  static constexpr double a105 = -5.90290826836842996371446475743e-1;
  static constexpr double a106 = 2.12300514481811942347288949897e1;
  static constexpr double a107 = 1.52792336328824235832596922938e1;
  static constexpr double a108 = -3.32882109689848629194453265587e1;
  static constexpr double a109 = -2.03312017085086261358222928593e-2;
  static constexpr double a111 = -9.3714243008598732571704021658e-1;
  static constexpr double a114 = 5.18637242884406370830023853209e0;
  static constexpr double a115 = 1.09143734899672957818500254654e0;
  static constexpr double a116 = -8.14978701074692612513997267357e0;
  static constexpr double a117 = -1.85200656599969598641566180701e1;
  static constexpr double a118 = 2.27394870993505042818970056734e1;
  static constexpr double a119 = 2.49360555267965238987089396762e0;
  static constexpr double a1110 = -3.0467644718982195003823669022e0;
  static constexpr double a121 = 2.27331014751653820792359768449e0;
  static constexpr double a124 = -1.05344954667372501984066689879e1;
  static constexpr double a125 = -2.00087205822486249909675718444e0;
  static constexpr double a126 = -1.79589318631187989172765950534e1;
  static constexpr double a127 = 2.79488845294199600508499808837e1;
  static constexpr double a128 = -2.85899827713502369474065508674e0;
  static constexpr double a129 = -8.87285693353062954433549289258e0;
  static constexpr double a1210 = 1.23605671757943030647266201528e1;
  static constexpr double a1211 = 6.43392746015763530355970484046e-1;

  static constexpr double b1 = 5.42937341165687622380535766363e-2;
  static constexpr double b6 = 4.45031289275240888144113950566e0;
  static constexpr double b7 = 1.89151789931450038304281599044e0;
  static constexpr double b8 = -5.8012039600105847814672114227e0;
  static constexpr double b9 = 3.1116436695781989440891606237e-1;
  static constexpr double b10 = -1.52160949662516078556178806805e-1;
  static constexpr double b11 = 2.01365400804030348374776537501e-1;
  static constexpr double b12 = 4.47106157277725905176885569043e-2;

  static constexpr double bhh1 = 0.244094488188976377952755905512e+00;
  static constexpr double bhh2 = 0.733846688281611857341361741547e+00;
  static constexpr double bhh3 = 0.220588235294117647058823529412e-01;

  static constexpr double er1 = 0.1312004499419488073250102996e-01;
  static constexpr double er6 = -0.1225156446376204440720569753e+01;
  static constexpr double er7 = -0.4957589496572501915214079952e+00;
  static constexpr double er8 = 0.1664377182454986536961530415e+01;
  static constexpr double er9 = -0.3503288487499736816886487290e+00;
  static constexpr double er10 = 0.3341791187130174790297318841e+00;
  static constexpr double er11 = 0.8192320648511571246570742613e-01;
  static constexpr double er12 = -0.2235530786388629525884427845e-01;

  IntegratorConfig cfg_;
  IntegratorStats stats_;
  double h_ = 0.0;
  std::string last_error_;
};

// Samples of an augmented trajectory; controls are recomputed from the
// sampled co-states, never integrated.
struct SampledTrajectory {
  std::vector<double> times;
  std::vector<AugmentedState> states;
  std::vector<Control> controls;
};

// Integrates augmented_rhs from t0 to t1 (t1 < t0 integrates backward).
AugmentedState propagate(const AugmentedState& aug0, double t0, double t1,
                         const ThrustConfig& thrust,
                         const IntegratorConfig& cfg = {},
                         IntegratorStats* stats = nullptr);

// States at t0 + i (t1 - t0) / (n - 1), i = 0..n-1, obtained by integrating
// exactly to each sample time.
SampledTrajectory propagate_sampled(const AugmentedState& aug0, double t0,
                                    double t1, std::size_t n_samples,
                                    const ThrustConfig& thrust,
                                    const IntegratorConfig& cfg = {},
                                    IntegratorStats* stats = nullptr);

// Equi-spaced sample times, endpoints exact.
std::vector<double> sample_times(double t0, double t1, std::size_t n_samples);

}  // namespace lowthrust

#endif  // LOWTHRUST_INTEGRATOR_HPP_
