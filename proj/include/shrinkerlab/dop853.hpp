#pragma once

// Dormand-Prince 8(5,3) embedded Runge-Kutta stepper with 7th order dense
// output. Coefficients from Hairer, Norsett & Wanner, "Solving Ordinary
// Differential Equations I", as distributed with DOP853.F.
//
// The stepper is deliberately low level: the caller owns the step-size loop
// and decides what to do with each accepted step (event detection, storage,
// termination). A right-hand side is any callable
//     bool f(double t, const State& y, State& dydt)
// returning false when y lies outside the region where the system is defined;
// such a step is reported as failed (infinite error) so the caller can shrink.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace shrinkerlab {

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Dense output for one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<OdeState<N>, 8> c{};

  double t1() const { return t0 + h; }

  double component(std::size_t i, double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return c[0][i] +
           s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * (c[4][i] + s * (c[5][i] + s1 * (c[6][i] + s * c[7][i]))))));
  }

  OdeState<N> operator()(double t) const {
    OdeState<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = component(i, t);
    return y;
  }
};

template <std::size_t N>
class Dop853 {
 public:
  using State = OdeState<N>;

  Dop853(double rel_tol, double abs_tol) : rtol_(rel_tol), atol_(abs_tol) {}

  static constexpr double kOrderExponent = 1.0 / 8.0;

  /// Attempts a step of size h from (t, y) with dy/dt(t) = k1. Returns the scaled
  /// error norm; the step is acceptable when the result is <= 1. Returns +inf if
  /// a stage left the domain of f.
  template <class F>
  double attempt(F&& f, double t, const State& y, const State& k1, double h) {
    t_ = t;
    h_ = h;
    y0_ = y;
    s1_ = k1;
    State w;
    auto stage = [&](double c, State& out, auto&&... terms) {
      for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * combine(i, terms...);
      return f(t + c * h, w, out);
    };

    if (!stage(c2, s2_, P{a21, &s1_})) return kFail;
    if (!stage(c3, s3_, P{a31, &s1_}, P{a32, &s2_})) return kFail;
    if (!stage(c4, s4_, P{a41, &s1_}, P{a43, &s3_})) return kFail;
    if (!stage(c5, s5_, P{a51, &s1_}, P{a53, &s3_}, P{a54, &s4_})) return kFail;
    if (!stage(c6, s6_, P{a61, &s1_}, P{a64, &s4_}, P{a65, &s5_})) return kFail;
    if (!stage(c7, s7_, P{a71, &s1_}, P{a74, &s4_}, P{a75, &s5_}, P{a76, &s6_})) return kFail;
    if (!stage(c8, s8_, P{a81, &s1_}, P{a84, &s4_}, P{a85, &s5_}, P{a86, &s6_}, P{a87, &s7_})) return kFail;
    if (!stage(c9, s9_, P{a91, &s1_}, P{a94, &s4_}, P{a95, &s5_}, P{a96, &s6_}, P{a97, &s7_}, P{a98, &s8_}))
      return kFail;
    if (!stage(c10, s10_, P{a101, &s1_}, P{a104, &s4_}, P{a105, &s5_}, P{a106, &s6_}, P{a107, &s7_},
               P{a108, &s8_}, P{a109, &s9_}))
      return kFail;
    if (!stage(c11, s11_, P{a111, &s1_}, P{a114, &s4_}, P{a115, &s5_}, P{a116, &s6_}, P{a117, &s7_},
               P{a118, &s8_}, P{a119, &s9_}, P{a1110, &s10_}))
      return kFail;
    if (!stage(1.0, s12_, P{a121, &s1_}, P{a124, &s4_}, P{a125, &s5_}, P{a126, &s6_}, P{a127, &s7_},
               P{a128, &s8_}, P{a129, &s9_}, P{a1210, &s10_}, P{a1211, &s11_}))
      return kFail;

    for (std::size_t i = 0; i < N; ++i) {
      slope_[i] = b1 * s1_[i] + b6 * s6_[i] + b7 * s7_[i] + b8 * s8_[i] + b9 * s9_[i] + b10 * s10_[i] +
                  b11 * s11_[i] + b12 * s12_[i];
      y1_[i] = y[i] + h * slope_[i];
      if (!std::isfinite(y1_[i])) return kFail;
    }

    double err5 = 0.0;
    double err3 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = 1.0 / (atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y1_[i])));
      double e = (slope_[i] - bhh1 * s1_[i] - bhh2 * s9_[i] - bhh3 * s12_[i]) * sk;
      err3 += e * e;
      e = (er1 * s1_[i] + er6 * s6_[i] + er7 * s7_[i] + er8 * s8_[i] + er9 * s9_[i] + er10 * s10_[i] +
           er11 * s11_[i] + er12 * s12_[i]) *
          sk;
      err5 += e * e;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err5 * std::sqrt(1.0 / (deno * static_cast<double>(N)));
  }

  const State& proposed() const { return y1_; }

  /// Finishes an accepted step: evaluates f at the new point (stored in k1_next)
  /// and builds the dense-output segment. Returns false if f fails there.
  template <class F>
  bool accept(F&& f, State& k1_next, DenseSegment<N>& seg) {
    if (!f(t_ + h_, y1_, s13_)) return false;
    k1_next = s13_;
    const double t = t_;
    const double h = h_;
    seg.t0 = t;
    seg.h = h;
    auto& rc = seg.c;
    for (std::size_t i = 0; i < N; ++i) {
      rc[0][i] = y0_[i];
      const double ydiff = y1_[i] - y0_[i];
      rc[1][i] = ydiff;
      const double bspl = h * s1_[i] - ydiff;
      rc[2][i] = bspl;
      rc[3][i] = ydiff - h * s13_[i] - bspl;
      rc[4][i] = d41 * s1_[i] + d46 * s6_[i] + d47 * s7_[i] + d48 * s8_[i] + d49 * s9_[i] + d410 * s10_[i] +
                 d411 * s11_[i] + d412 * s12_[i];
      rc[5][i] = d51 * s1_[i] + d56 * s6_[i] + d57 * s7_[i] + d58 * s8_[i] + d59 * s9_[i] + d510 * s10_[i] +
                 d511 * s11_[i] + d512 * s12_[i];
      rc[6][i] = d61 * s1_[i] + d66 * s6_[i] + d67 * s7_[i] + d68 * s8_[i] + d69 * s9_[i] + d610 * s10_[i] +
                 d611 * s11_[i] + d612 * s12_[i];
      rc[7][i] = d71 * s1_[i] + d76 * s6_[i] + d77 * s7_[i] + d78 * s8_[i] + d79 * s9_[i] + d710 * s10_[i] +
                 d711 * s11_[i] + d712 * s12_[i];
    }

    State w;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y0_[i] + h * (a141 * s1_[i] + a147 * s7_[i] + a148 * s8_[i] + a149 * s9_[i] + a1410 * s10_[i] +
                           a1411 * s11_[i] + a1412 * s12_[i] + a1413 * s13_[i]);
    if (!f(t + c14 * h, w, s14_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y0_[i] + h * (a151 * s1_[i] + a156 * s6_[i] + a157 * s7_[i] + a158 * s8_[i] + a1511 * s11_[i] +
                           a1512 * s12_[i] + a1513 * s13_[i] + a1514 * s14_[i]);
    if (!f(t + c15 * h, w, s15_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y0_[i] + h * (a161 * s1_[i] + a166 * s6_[i] + a167 * s7_[i] + a168 * s8_[i] + a169 * s9_[i] +
                           a1613 * s13_[i] + a1614 * s14_[i] + a1615 * s15_[i]);
    if (!f(t + c16 * h, w, s16_)) return false;

    for (std::size_t i = 0; i < N; ++i) {
      rc[4][i] = h * (rc[4][i] + d413 * s13_[i] + d414 * s14_[i] + d415 * s15_[i] + d416 * s16_[i]);
      rc[5][i] = h * (rc[5][i] + d513 * s13_[i] + d514 * s14_[i] + d515 * s15_[i] + d516 * s16_[i]);
      rc[6][i] = h * (rc[6][i] + d613 * s13_[i] + d614 * s14_[i] + d615 * s15_[i] + d616 * s16_[i]);
      rc[7][i] = h * (rc[7][i] + d713 * s13_[i] + d714 * s14_[i] + d715 * s15_[i] + d716 * s16_[i]);
    }
    return true;
  }

  /// Initial step heuristic of DOP853 (Hairer's hinit), capped at h_max.
  template <class F>
  double initial_step(F&& f, double t, const State& y, const State& k1, double h_max) const {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = atol_ + rtol_ * std::abs(y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_max);
    State w, k2;
    for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * k1[i];
    if (!f(t + h, w, k2)) return std::min(1e-6, h_max);
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = (k2[i] - k1[i]) / (atol_ + rtol_ * std::abs(y[i]));
      der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, kOrderExponent);
    return std::min({100.0 * h, h1, h_max});
  }

 private:
  static constexpr double kFail = std::numeric_limits<double>::infinity();

  struct P {
    double a;
    const State* k;
  };

  static double combine(std::size_t) { return 0.0; }
  template <class... Rest>
  static double combine(std::size_t i, const P& p, const Rest&... rest) {
    return p.a * (*p.k)[i] + combine(i, rest...);
  }

  double rtol_;
  double atol_;
  double t_ = 0.0;
  double h_ = 0.0;
  State y0_{}, y1_{}, slope_{};
  State s1_{}, s2_{}, s3_{}, s4_{}, s5_{}, s6_{}, s7_{}, s8_{}, s9_{}, s10_{}, s11_{}, s12_{}, s13_{}, s14_{},
      s15_{}, s16_{};

  static constexpr double c2 = 0.526001519587677318785587544488E-01;
  static constexpr double c3 = 0.789002279381515978178381316732E-01;
  static constexpr double c4 = 0.118350341907227396726757197510E+00;
  static constexpr double c5 = 0.281649658092772603273242802490E+00;
  static constexpr double c6 = 0.333333333333333333333333333333E+00;
  static constexpr double c7 = 0.25E+00;
  static constexpr double c8 = 0.307692307692307692307692307692E+00;
  static constexpr double c9 = 0.651282051282051282051282051282E+00;
  static constexpr double c10 = 0.6E+00;
  static constexpr double c11 = 0.857142857142857142857142857142E+00;
  static constexpr double c14 = 0.1E+00;
  static constexpr double c15 = 0.2E+00;
  static constexpr double c16 = 0.777777777777777777777777777778E+00;

  static constexpr double b1 = 5.42937341165687622380535766363E-2;
  static constexpr double b6 = 4.45031289275240888144113950566E0;
  static constexpr double b7 = 1.89151789931450038304281599044E0;
  static constexpr double b8 = -5.8012039600105847814672114227E0;
  static constexpr double b9 = 3.1116436695781989440891606237E-1;
  static constexpr double b10 = -1.52160949662516078556178806805E-1;
  static constexpr double b11 = 2.01365400804030348374776537501E-1;
  static constexpr double b12 = 4.47106157277725905176885569043E-2;

  static constexpr double bhh1 = 0.244094488188976377952755905512E+00;
  static constexpr double bhh2 = 0.733846688281611857341361741547E+00;
  static constexpr double bhh3 = 0.220588235294117647058823529412E-01;

  static constexpr double er1 = 0.1312004499419488073250102996E-01;
  static constexpr double er6 = -0.1225156446376204440720569753E+01;
  static constexpr double er7 = -0.4957589496572501915214079952E+00;
  static constexpr double er8 = 0.1664377182454986536961530415E+01;
  static constexpr double er9 = -0.3503288487499736816886487290E+00;
  static constexpr double er10 = 0.3341791187130174790297318841E+00;
  static constexpr double er11 = 0.8192320648511571246570742613E-01;
  static constexpr double er12 = -0.2235530786388629525884427845E-01;

  static constexpr double a21 = 5.26001519587677318785587544488E-2;
  static constexpr double a31 = 1.97250569845378994544595329183E-2;
  static constexpr double a32 = 5.91751709536136983633785987549E-2;
  static constexpr double a41 = 2.95875854768068491816892993775E-2;
  static constexpr double a43 = 8.87627564304205475450678981324E-2;
  static constexpr double a51 = 2.41365134159266685502369798665E-1;
  static constexpr double a53 = -8.84549479328286085344864962717E-1;
  static constexpr double a54 = 9.24834003261792003115737966543E-1;
  static constexpr double a61 = 3.7037037037037037037037037037E-2;
  static constexpr double a64 = 1.70828608729473871279604482173E-1;
  static constexpr double a65 = 1.25467687566822425016691814123E-1;
  static constexpr double a71 = 3.7109375E-2;
  static constexpr double a74 = 1.70252211019544039314978060272E-1;
  static constexpr double a75 = 6.02165389804559606850219397283E-2;
  static constexpr double a76 = -1.7578125E-2;
  static constexpr double a81 = 3.70920001185047927108779319836E-2;
  static constexpr double a84 = 1.70383925712239993810214054705E-1;
  static constexpr double a85 = 1.07262030446373284651809199168E-1;
  static constexpr double a86 = -1.53194377486244017527936158236E-2;
  static constexpr double a87 = 8.27378916381402288758473766002E-3;
  static constexpr double a91 = 6.24110958716075717114429577812E-1;
  static constexpr double a94 = -3.36089262944694129406857109825E0;
  static constexpr double a95 = -8.68219346841726006818189891453E-1;
  static constexpr double a96 = 2.75920996994467083049415600797E1;
  static constexpr double a97 = 2.01540675504778934086186788979E1;
  static constexpr double a98 = -4.34898841810699588477366255144E1;
  static constexpr double a101 = 4.77662536438264365890433908527E-1;
  static constexpr double a104 = -2.48811461997166764192642586468E0;
  static constexpr double a105 = -5.90290826836842996371446475743E-1;
  static constexpr double a106 = 2.12300514481811942347288949897E1;
  static constexpr double a107 = 1.52792336328824235832596922938E1;
  static constexpr double a108 = -3.32882109689848629194453265587E1;
  static constexpr double a109 = -2.03312017085086261358222928593E-2;
  static constexpr double a111 = -9.3714243008598732571704021658E-1;
  static constexpr double a114 = 5.18637242884406370830023853209E0;
  static constexpr double a115 = 1.09143734899672957818500254654E0;
  static constexpr double a116 = -8.14978701074692612513997267357E0;
  static constexpr double a117 = -1.85200656599969598641566180701E1;
  static constexpr double a118 = 2.27394870993505042818970056734E1;
  static constexpr double a119 = 2.49360555267965238987089396762E0;
  static constexpr double a1110 = -3.0467644718982195003823669022E0;
  static constexpr double a121 = 2.27331014751653820792359768449E0;
  static constexpr double a124 = -1.05344954667372501984066689879E1;
  static constexpr double a125 = -2.00087205822486249909675718444E0;
  static constexpr double a126 = -1.79589318631187989172765950534E1;
  static constexpr double a127 = 2.79488845294199600508499808837E1;
  static constexpr double a128 = -2.85899827713502369474065508674E0;
  static constexpr double a129 = -8.87285693353062954433549289258E0;
  static constexpr double a1210 = 1.23605671757943030647266201528E1;
  static constexpr double a1211 = 6.43392746015763530355970484046E-1;

  static constexpr double a141 = 5.61675022830479523392909219681E-2;
  static constexpr double a147 = 2.53500210216624811088794765333E-1;
  static constexpr double a148 = -2.46239037470802489917441475441E-1;
  static constexpr double a149 = -1.24191423263816360469010140626E-1;
  static constexpr double a1410 = 1.5329179827876569731206322685E-1;
  static constexpr double a1411 = 8.20105229563468988491666602057E-3;
  static constexpr double a1412 = 7.56789766054569976138603589584E-3;
  static constexpr double a1413 = -8.298E-3;
  static constexpr double a151 = 3.18346481635021405060768473261E-2;
  static constexpr double a156 = 2.83009096723667755288322961402E-2;
  static constexpr double a157 = 5.35419883074385676223797384372E-2;
  static constexpr double a158 = -5.49237485713909884646569340306E-2;
  static constexpr double a1511 = -1.08347328697249322858509316994E-4;
  static constexpr double a1512 = 3.82571090835658412954920192323E-4;
  static constexpr double a1513 = -3.40465008687404560802977114492E-4;
  static constexpr double a1514 = 1.41312443674632500278074618366E-1;
  static constexpr double a161 = -4.28896301583791923408573538692E-1;
  static constexpr double a166 = -4.69762141536116384314449447206E0;
  static constexpr double a167 = 7.68342119606259904184240953878E0;
  static constexpr double a168 = 4.06898981839711007970213554331E0;
  static constexpr double a169 = 3.56727187455281109270669543021E-1;
  static constexpr double a1613 = -1.39902416515901462129418009734E-3;
  static constexpr double a1614 = 2.9475147891527723389556272149E0;
  static constexpr double a1615 = -9.15095847217987001081870187138E0;

  static constexpr double d41 = -0.84289382761090128651353491142E+01;
  static constexpr double d46 = 0.56671495351937776962531783590E+00;
  static constexpr double d47 = -0.30689499459498916912797304727E+01;
  static constexpr double d48 = 0.23846676565120698287728149680E+01;
  static constexpr double d49 = 0.21170345824450282767155149946E+01;
  static constexpr double d410 = -0.87139158377797299206789907490E+00;
  static constexpr double d411 = 0.22404374302607882758541771650E+01;
  static constexpr double d412 = 0.63157877876946881815570249290E+00;
  static constexpr double d413 = -0.88990336451333310820698117400E-01;
  static constexpr double d414 = 0.18148505520854727256656404962E+02;
  static constexpr double d415 = -0.91946323924783554000451984436E+01;
  static constexpr double d416 = -0.44360363875948939664310572000E+01;
  static constexpr double d51 = 0.10427508642579134603413151009E+02;
  static constexpr double d56 = 0.24228349177525818288430175319E+03;
  static constexpr double d57 = 0.16520045171727028198505394887E+03;
  static constexpr double d58 = -0.37454675472269020279518312152E+03;
  static constexpr double d59 = -0.22113666853125306036270938578E+02;
  static constexpr double d510 = 0.77334326684722638389603898808E+01;
  static constexpr double d511 = -0.30674084731089398182061213626E+02;
  static constexpr double d512 = -0.93321305264302278729567221706E+01;
  static constexpr double d513 = 0.15697238121770843886131091075E+02;
  static constexpr double d514 = -0.31139403219565177677282850411E+02;
  static constexpr double d515 = -0.93529243588444783865713862664E+01;
  static constexpr double d516 = 0.35816841486394083752465898540E+02;
  static constexpr double d61 = 0.19985053242002433820987653617E+02;
  static constexpr double d66 = -0.38703730874935176555105901742E+03;
  static constexpr double d67 = -0.18917813819516756882830838328E+03;
  static constexpr double d68 = 0.52780815920542364900561016686E+03;
  static constexpr double d69 = -0.11573902539959630126141871134E+02;
  static constexpr double d610 = 0.68812326946963000169666922661E+01;
  static constexpr double d611 = -0.10006050966910838403183860980E+01;
  static constexpr double d612 = 0.77771377980534432092869265740E+00;
  static constexpr double d613 = -0.27782057523535084065932004339E+01;
  static constexpr double d614 = -0.60196695231264120758267380846E+02;
  static constexpr double d615 = 0.84320405506677161018159903784E+02;
  static constexpr double d616 = 0.11992291136182789328035130030E+02;
  static constexpr double d71 = -0.25693933462703749003312586129E+02;
  static constexpr double d76 = -0.15418974869023643374053993627E+03;
  static constexpr double d77 = -0.23152937917604549567536039109E+03;
  static constexpr double d78 = 0.35763911791061412378285349910E+03;
  static constexpr double d79 = 0.93405324183624310003907691704E+02;
  static constexpr double d710 = -0.37458323136451633156875139351E+02;
  static constexpr double d711 = 0.10409964950896230045147246184E+03;
  static constexpr double d712 = 0.29840293426660503123344363579E+02;
  static constexpr double d713 = -0.43533456590011143754432175058E+02;
  static constexpr double d714 = 0.96324553959188282948394950600E+02;
  static constexpr double d715 = -0.39177261675615439165231486172E+02;
  static constexpr double d716 = -0.14972683625798562581422125276E+03;
};

}  // namespace shrinkerlab
