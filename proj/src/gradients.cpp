#include "uiou/gradients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <stdexcept>

#include "uiou/losses.hpp"
#include "uiou/schedule.hpp"

namespace uiou {
namespace {

// Forward-mode tangent: a value together with its derivative with respect to
// the scaled prediction's (cx, cy, w, h). Selector ties propagate a zero
// tangent, which is the subgradient convention of the whole loss family.
struct D {
  double v = 0.0;
  double gx = 0.0, gy = 0.0, gw = 0.0, gh = 0.0;
  D() = default;
  D(double c) : v(c) {}  // NOLINT: constants convert implicitly
  D(double v_, double gx_, double gy_, double gw_, double gh_)
      : v(v_), gx(gx_), gy(gy_), gw(gw_), gh(gh_) {}
};

D operator+(const D& a, const D& b) {
  return {a.v + b.v, a.gx + b.gx, a.gy + b.gy, a.gw + b.gw, a.gh + b.gh};
}

D operator-(const D& a, const D& b) {
  return {a.v - b.v, a.gx - b.gx, a.gy - b.gy, a.gw - b.gw, a.gh - b.gh};
}

D operator-(const D& a) { return {-a.v, -a.gx, -a.gy, -a.gw, -a.gh}; }

D operator*(const D& a, const D& b) {
  return {a.v * b.v, a.gx * b.v + a.v * b.gx, a.gy * b.v + a.v * b.gy,
          a.gw * b.v + a.v * b.gw, a.gh * b.v + a.v * b.gh};
}

D operator/(const D& a, const D& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.gx - q * b.gx) * inv, (a.gy - q * b.gy) * inv,
          (a.gw - q * b.gw) * inv, (a.gh - q * b.gh) * inv};
}

D dmin(const D& a, const D& b) {
  if (a.v < b.v) return a;
  if (b.v < a.v) return b;
  return D{a.v};  // tie: zero subgradient
}

D dmax(const D& a, const D& b) {
  if (a.v > b.v) return a;
  if (b.v > a.v) return b;
  return D{a.v};
}

// max(0, x) with the same zero-at-boundary convention.
D relu(const D& x) {
  if (x.v > 0.0) return x;
  return D{0.0};
}

D dabs(const D& x) {
  if (x.v > 0.0) return x;
  if (x.v < 0.0) return -x;
  return D{0.0};
}

D chain(const D& x, double value, double deriv) {
  return {value, deriv * x.gx, deriv * x.gy, deriv * x.gw, deriv * x.gh};
}

D dsqrt(const D& x) {
  const double r = std::sqrt(x.v);
  return chain(x, r, 0.5 / r);
}

D dexp(const D& x) {
  const double e = std::exp(x.v);
  return chain(x, e, e);
}

// x^e for e >= 1; at x == 0 the tangent is zero (e > 1) or passes through
// unchanged (e == 1).
D dpow(const D& x, double e) {
  if (e == 1.0) return x;
  return chain(x, std::pow(x.v, e), e * std::pow(x.v, e - 1.0));
}

D datan2(const D& y, const D& x) {
  const double den = y.v * y.v + x.v * x.v;
  return {std::atan2(y.v, x.v), (x.v * y.gx - y.v * x.gx) / den,
          (x.v * y.gy - y.v * x.gy) / den, (x.v * y.gw - y.v * x.gw) / den,
          (x.v * y.gh - y.v * x.gh) / den};
}

D sdiv(const D& num, const D& den) {
  if (den.v > 0.0) return num / den;
  return D{0.0};
}

// Tangent of geometric_loss evaluated on an already scaled pair, with the
// trade-off and denominator factors held constant at their current values.
D loss_tangent(const LossKind& kind, const Box& p, const Box& g) {
  const D CX{p.cx, 1.0, 0.0, 0.0, 0.0};
  const D CY{p.cy, 0.0, 1.0, 0.0, 0.0};
  const D W{p.w, 0.0, 0.0, 1.0, 0.0};
  const D H{p.h, 0.0, 0.0, 0.0, 1.0};

  const D lp = CX - D{0.5} * W;
  const D rp = CX + D{0.5} * W;
  const D tp = CY - D{0.5} * H;
  const D bp = CY + D{0.5} * H;

  if (kind.variant == LossVariant::l2_vector) {
    const D dl = lp - D{g.left()};
    const D dr = rp - D{g.right()};
    const D dt = tp - D{g.top()};
    const D db = bp - D{g.bottom()};
    return dl * dl + dr * dr + dt * dt + db * db;
  }

  const D siw = dmin(rp, D{g.right()}) - dmax(lp, D{g.left()});
  const D sih = dmin(bp, D{g.bottom()}) - dmax(tp, D{g.top()});
  const D inter = relu(siw) * relu(sih);
  const D uni = W * H + D{area(g)} - inter;
  const D iou = uni.v > 0.0 ? inter / uni : D{0.0};

  const D cl = dmin(lp, D{g.left()});
  const D cr = dmax(rp, D{g.right()});
  const D ct = dmin(tp, D{g.top()});
  const D cb = dmax(bp, D{g.bottom()});
  const D cw = cr - cl;
  const D ch = cb - ct;
  const D carea = cw * ch;
  const D diag2 = cw * cw + ch * ch;

  const D dxc = CX - D{g.cx};
  const D dyc = CY - D{g.cy};
  const D rho2 = dxc * dxc + dyc * dyc;

  const double a = kind.alpha;
  const bool power_pen = kind.alpha_powers_penalties && a != 1.0;
  const auto pen_pow = [&](const D& x) { return power_pen ? dpow(x, a) : x; };
  const D iou_term = a == 1.0 ? D{1.0} - iou : D{1.0} - dpow(iou, a);

  D penalty{0.0};
  switch (kind.variant) {
    case LossVariant::iou:
      break;
    case LossVariant::giou:
      // Clamped like the loss; relu keeps the zero-at-boundary subgradient.
      penalty = pen_pow(sdiv(relu(carea - uni), carea));
      break;
    case LossVariant::diou:
      penalty = pen_pow(sdiv(rho2, diag2));
      break;
    case LossVariant::ciou: {
      const D dterm = D{std::atan2(g.w, g.h)} - datan2(W, H);
      const D v = D{4.0 / (std::numbers::pi * std::numbers::pi)} * dterm * dterm;
      const double den = (1.0 - iou.v) + v.v;
      const double tradeoff = den > 0.0 ? v.v / den : 0.0;
      penalty = pen_pow(sdiv(rho2, diag2)) + pen_pow(D{tradeoff} * v);
      break;
    }
    case LossVariant::eiou: {
      const D dw = W - D{g.w};
      const D dh = H - D{g.h};
      penalty = sdiv(rho2, diag2) + sdiv(dw * dw, cw * cw) + sdiv(dh * dh, ch * ch);
      break;
    }
    case LossVariant::siou: {
      const D dx = D{g.cx} - CX;
      const D dy = D{g.cy} - CY;
      D lambda{0.0};
      if (rho2.v > 0.0) {
        const D dist = dsqrt(rho2);
        const D x = dmin(dabs(dx), dabs(dy)) / dist;  // in [0, 1/sqrt(2)]
        lambda = D{2.0} * x * dsqrt(D{1.0} - x * x);
      }
      const D gamma = D{2.0} - lambda;
      const D rho_x = sdiv(dx, cw) * sdiv(dx, cw);
      const D rho_y = sdiv(dy, ch) * sdiv(dy, ch);
      const D dist_cost =
          (D{1.0} - dexp(-(gamma * rho_x))) + (D{1.0} - dexp(-(gamma * rho_y)));
      const D omega_w = sdiv(dabs(W - D{g.w}), dmax(W, D{g.w}));
      const D omega_h = sdiv(dabs(H - D{g.h}), dmax(H, D{g.h}));
      const D shape_cost = dpow(D{1.0} - dexp(-omega_w), 4.0) +
                           dpow(D{1.0} - dexp(-omega_h), 4.0);
      penalty = D{0.5} * (dist_cost + shape_cost);
      break;
    }
    case LossVariant::wiou_v1: {
      const double den = diag2.v;
      const D factor = den > 0.0 ? dexp(rho2 / D{den}) : D{1.0};
      penalty = (factor - D{1.0}) * (D{1.0} - iou);
      break;
    }
    case LossVariant::l2_vector:
      break;  // handled above
  }

  return iou_term + penalty;
}

}  // namespace

BoxGrad analytic_grad(const LossSpec& spec, const Prediction& pred,
                      const Box& gt, int epoch) {
  validate_loss_kind(spec.base);
  validate_box(pred.box, "analytic_grad pred");
  validate_box(gt, "analytic_grad gt");
  if (pred.box.w <= 0.0 || pred.box.h <= 0.0) {
    throw std::invalid_argument("analytic_grad: pred box must have w > 0 and h > 0");
  }
  const double ratio = ratio_at(spec.schedule, epoch);
  const Box sp = scale_box(pred.box, ratio);
  const Box sg = scale_box(gt, ratio);
  const D loss = loss_tangent(spec.base, sp, sg);
  // Both weighting targets rescale the loss by the same factor, so the
  // gradient picks up a single multiplier. Width and height derivatives
  // chain back through the scaling.
  const double w = confidence_weight(pred.confidence, spec.weight);
  return BoxGrad{w * loss.gx, w * loss.gy, w * loss.gw * ratio,
                 w * loss.gh * ratio};
}

BoxGrad finite_diff_grad(const LossSpec& spec, const Prediction& pred,
                         const Box& gt, int epoch, double step) {
  if (!std::isfinite(step) || step <= 0.0) {
    throw std::invalid_argument("finite_diff_grad: step must be finite and > 0");
  }
  const double ratio = ratio_at(spec.schedule, epoch);
  const FrozenFactors frozen = capture_frozen_factors(
      spec.base, scale_box(pred.box, ratio), scale_box(gt, ratio));
  const auto eval = [&](const Box& b) {
    return unified_loss(spec, Prediction{b, pred.confidence}, gt, epoch, frozen).loss;
  };
  const auto central = [&](auto nudge) {
    Box hi = pred.box;
    Box lo = pred.box;
    nudge(hi, step);
    nudge(lo, -step);
    return (eval(hi) - eval(lo)) / (2.0 * step);
  };
  BoxGrad g;
  g.d_cx = central([](Box& b, double s) { b.cx += s; });
  g.d_cy = central([](Box& b, double s) { b.cy += s; });
  g.d_w = central([](Box& b, double s) { b.w += s; });
  g.d_h = central([](Box& b, double s) { b.h += s; });
  return g;
}

namespace {

struct Sample {
  Prediction pred;
  Box gt;
  int epoch = 0;
  double step = 0.0;
};

double max_abs8(const Box& a, const Box& b) {
  return std::max({std::abs(a.cx), std::abs(a.cy), a.w, a.h, std::abs(b.cx),
                   std::abs(b.cy), b.w, b.h});
}

// Distances from every selector tie of the scaled pair. The finite-difference
// sweep must stay strictly on one side of each kink for the two gradient
// routes to agree.
void kink_margins(LossVariant variant, const Box& p, const Box& g,
                  std::array<double, 10>& m, int& n) {
  n = 0;
  if (variant == LossVariant::l2_vector) return;
  m[n++] = std::abs(p.left() - g.left());
  m[n++] = std::abs(p.right() - g.right());
  m[n++] = std::abs(p.top() - g.top());
  m[n++] = std::abs(p.bottom() - g.bottom());
  m[n++] = std::abs(std::min(p.right(), g.right()) - std::max(p.left(), g.left()));
  m[n++] = std::abs(std::min(p.bottom(), g.bottom()) - std::max(p.top(), g.top()));
  if (variant == LossVariant::siou) {
    const double dx = g.cx - p.cx;
    const double dy = g.cy - p.cy;
    m[n++] = std::abs(dx);
    m[n++] = std::abs(dy);
    m[n++] = std::abs(std::abs(dx) - std::abs(dy));
    m[n++] = std::sqrt(dx * dx + dy * dy);
  }
}

Sample draw_sample(const LossSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-20.0, 20.0);
  std::uniform_real_distribution<double> dim(2.0, 15.0);
  std::uniform_real_distribution<double> offset(-5.0, 5.0);
  std::uniform_real_distribution<double> logs(-0.5, 0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> conf(0.02, 0.98);
  std::uniform_int_distribution<int> epochs(0, spec.schedule.total_epochs);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    Sample s;
    s.gt = Box{center(rng), center(rng), dim(rng), dim(rng)};
    if (unit(rng) < 0.7) {
      s.pred.box = Box{s.gt.cx + offset(rng), s.gt.cy + offset(rng),
                       s.gt.w * std::exp(logs(rng)), s.gt.h * std::exp(logs(rng))};
    } else {
      s.pred.box = Box{center(rng), center(rng), dim(rng), dim(rng)};
    }
    s.pred.confidence = conf(rng);
    s.epoch = epochs(rng);
    s.step = 1.0e-5 * std::max(1.0, max_abs8(s.pred.box, s.gt));

    const double ratio = ratio_at(spec.schedule, s.epoch);
    const double thr = 25.0 * s.step * std::max(1.0, ratio);
    std::array<double, 10> m;
    int n = 0;
    kink_margins(spec.base.variant, scale_box(s.pred.box, ratio),
                 scale_box(s.gt, ratio), m, n);
    bool clear = true;
    for (int i = 0; i < n; ++i) clear = clear && m[i] > thr;
    if (clear) return s;
  }
  throw std::runtime_error("gradcheck: could not sample a pair clear of selector ties");
}

}  // namespace

GradCheckReport gradcheck(const LossSpec& spec, int trials, std::uint64_t seed,
                          double tol, ExecMode mode) {
  if (trials <= 0) throw std::invalid_argument("gradcheck: trials must be > 0");
  if (!std::isfinite(tol) || tol <= 0.0) {
    throw std::invalid_argument("gradcheck: tol must be finite and > 0");
  }
  validate_loss_kind(spec.base);
  validate_schedule(spec.schedule);

  // Samples are drawn serially from one stream; evaluations write disjoint
  // slots so serial and parallel runs agree bitwise.
  std::mt19937_64 rng(seed);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) samples.push_back(draw_sample(spec, rng));

  std::vector<BoxGrad> analytic(samples.size());
  std::vector<BoxGrad> numeric(samples.size());
  std::exception_ptr error = nullptr;
  const bool parallel = mode == ExecMode::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < trials; ++i) {
    try {
      const Sample& s = samples[static_cast<std::size_t>(i)];
      analytic[static_cast<std::size_t>(i)] =
          analytic_grad(spec, s.pred, s.gt, s.epoch);
      numeric[static_cast<std::size_t>(i)] =
          finite_diff_grad(spec, s.pred, s.gt, s.epoch, s.step);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  GradCheckReport report;
  report.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::array<double, 4> a{analytic[idx].d_cx, analytic[idx].d_cy,
                                  analytic[idx].d_w, analytic[idx].d_h};
    const std::array<double, 4> f{numeric[idx].d_cx, numeric[idx].d_cy,
                                  numeric[idx].d_w, numeric[idx].d_h};
    double norm = 1.0e-6;
    double worst_diff = 0.0;
    int worst_param = 0;
    for (int k = 0; k < 4; ++k) {
      norm = std::max({norm, std::abs(a[static_cast<std::size_t>(k)]),
                       std::abs(f[static_cast<std::size_t>(k)])});
      const double diff = std::abs(a[static_cast<std::size_t>(k)] -
                                   f[static_cast<std::size_t>(k)]);
      if (diff > worst_diff) {
        worst_diff = diff;
        worst_param = k;
      }
    }
    const double rel = worst_diff / norm;
    report.worst_rel_err = std::max(report.worst_rel_err, rel);
    if (rel <= tol) {
      ++report.passed;
    } else if (report.failures.size() < 10) {
      static constexpr char names[4] = {'x', 'y', 'w', 'h'};
      GradCheckFailure fail;
      fail.pred = samples[idx].pred.box;
      fail.gt = samples[idx].gt;
      fail.param = names[worst_param];
      fail.analytic = a[static_cast<std::size_t>(worst_param)];
      fail.fd = f[static_cast<std::size_t>(worst_param)];
      fail.rel_err = rel;
      report.failures.push_back(fail);
    }
  }
  report.pass_rate = static_cast<double>(report.passed) / trials;
  return report;
}

}  // namespace uiou
