#include "oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace emalg::oracle {

namespace {

const double kSqrtPi = std::sqrt(M_PI);

// Neumaier-compensated running sum.
struct Sum {
  double s = 0, c = 0;
  void add(double x) {
    double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  [[nodiscard]] double value() const { return s + c; }
};

void require_resolved(const RegularizedDelta& d, double h) {
  if (!(d.a > 0)) throw OracleError("delta width must be positive");
  if (d.a / h < 16) {
    throw OracleError("grid too coarse: a/h = " + std::to_string(d.a / h) + " < 16");
  }
}

}  // namespace

std::string to_string(Family f) { return f == Family::Rectangle ? "rectangle" : "gaussian"; }

double RegularizedDelta::operator()(double u) const {
  if (family == Family::Rectangle) return std::abs(u) <= a / 2 ? 1.0 / a : 0.0;
  return std::exp(-(u * u) / (a * a)) / (a * kSqrtPi);
}

double RegularizedDelta::derivative(double u) const {
  if (family == Family::Rectangle) return 0.0;
  return -2.0 * u / (a * a) * (*this)(u);
}

FlipResult check_delta_flip(const RegularizedDelta& d, const GridSpec& g) {
  const double h = g.h();
  require_resolved(d, h);
  const int n = g.points;
  auto t = [&](int i) { return -g.extent / 2 + i * h; };
  auto dd = [&](double lo, double hi) { return (d(hi) - d(lo)) / (2 * h); };

  FlipResult r;
  const int ix = n / 2 + n / 16;  // off-centre x so offsets of both signs occur
  const double x = t(ix);
  for (int j = 0; j <= n; ++j) {
    const double y = t(j);
    // d/dy delta(y - x) and d/dx delta(x - y), each by central differences
    const double dy = dd(y - h - x, y + h - x);
    const double dx = dd(x - h - y, x + h - y);
    const double err = std::abs(dy + dx);
    const double off = x - y;
    if (err > r.max_error) {
      r.max_error = err;
      r.worst_offset = off;
    }
    const bool near_edge =
        d.family == Family::Rectangle && std::abs(std::abs(off) - d.a / 2) <= 2 * h;
    if (!near_edge) r.off_edge_error = std::max(r.off_edge_error, err);
    if (j == ix) r.zero_offset_error = err;
    const double tr = std::abs(dx - d.derivative(off));
    if (tr > r.truncation) {
      r.truncation = tr;
      r.truncation_offset = off;
    }
  }
  return r;
}

TestFunction polynomial_bump(double center, double width) {
  return {[=](double x) {
            double s = (x - center) / width;
            return std::abs(s) < 1 ? std::pow(1 - s * s, 4) : 0.0;
          },
          [=](double x) {
            double s = (x - center) / width;
            return std::abs(s) < 1 ? -8 * s * std::pow(1 - s * s, 3) / width : 0.0;
          }};
}

TestFunction gaussian_bump(double center, double width) {
  return {[=](double x) {
            double s = (x - center) / width;
            return std::exp(-s * s);
          },
          [=](double x) {
            double s = (x - center) / width;
            return -2 * s / width * std::exp(-s * s);
          }};
}

TestFunction constant_function(double value) {
  return {[=](double) { return value; }, [](double) { return 0.0; }};
}

IbpResult check_integration_by_parts(const TestFunction& f, const TestFunction& g, const RegularizedDelta& d,
                                     const GridSpec& grid) {
  const double h = grid.h();
  require_resolved(d, h);
  const int n = grid.points;
  std::vector<double> t(n + 1), w(n + 1, h);
  for (int i = 0; i <= n; ++i) t[i] = -grid.extent / 2 + i * h;
  w[0] = w[n] = h / 2;

  double gmax = 0;
  for (double x : t) gmax = std::max(gmax, std::abs(g.f(x)));
  const double margin = d.family == Family::Gaussian ? 8 * d.a : d.a;
  for (double x : t) {
    if (std::abs(x) > grid.extent / 2 - margin && std::abs(g.f(x)) > 1e-12 * gmax) {
      throw OracleError("test function support touches the grid boundary");
    }
  }

  Sum left, middle, right, exact;
  if (d.family == Family::Gaussian) {
    const int reach = int(std::ceil(8 * d.a / h));
    std::vector<double> dl(2 * reach + 1), dp(2 * reach + 1);
    for (int k = -reach; k <= reach; ++k) {
      dl[k + reach] = d(k * h);
      dp[k + reach] = d.derivative(k * h);
    }
    for (int j = 0; j <= n; ++j) {
      const double gj = g.f(t[j]), gpj = g.df(t[j]);
      if (gj == 0 && gpj == 0) continue;
      Sum l, m, r;
      for (int i = std::max(0, j - reach); i <= std::min(n, j + reach); ++i) {
        const int k = i - j + reach;
        l.add(w[i] * f.f(t[i]) * dp[k]);
        m.add(w[i] * f.df(t[i]) * dl[k]);
        r.add(w[i] * f.f(t[i]) * dl[k]);
      }
      left.add(w[j] * gj * l.value());
      middle.add(-w[j] * gj * m.value());
      right.add(w[j] * gpj * r.value());
    }
  } else {
    // box of width a: jumps give the x-derivative exactly, interiors by an aligned sub-grid
    const int sub = 64;
    const double hs = d.a / sub;
    for (int j = 0; j <= n; ++j) {
      const double y = t[j];
      const double gj = g.f(y), gpj = g.df(y);
      if (gj == 0 && gpj == 0) continue;
      Sum m, r;
      for (int s = 0; s <= sub; ++s) {
        const double x = y - d.a / 2 + s * hs;
        const double ws = (s == 0 || s == sub) ? hs / 2 : hs;
        m.add(ws * f.df(x) / d.a);
        r.add(ws * f.f(x) / d.a);
      }
      left.add(w[j] * gj * (f.f(y - d.a / 2) - f.f(y + d.a / 2)) / d.a);
      middle.add(-w[j] * gj * m.value());
      right.add(w[j] * gpj * r.value());
    }
  }
  for (int i = 0; i <= n; ++i) exact.add(-w[i] * g.f(t[i]) * f.df(t[i]));

  IbpResult out;
  out.left = left.value();
  out.middle = middle.value();
  out.right = right.value();
  out.err1 = std::abs(out.left - out.middle);
  out.err2 = std::abs(out.left - out.right);
  out.limit_error = std::abs(out.middle - exact.value());
  return out;
}

OrderingResult check_ordering_residual(const RegularizedDelta& d) {
  if (!(d.a > 0)) throw OracleError("delta width must be positive");
  OrderingResult r;
  if (d.family == Family::Rectangle) {
    // nodes on [-a/2, a/2] with both edges on the grid
    const int m = 64;
    const double h = d.a / m;
    Sum self, axis;
    for (int k = 0; k <= m; ++k) {
      const double u = std::clamp((k - m / 2) * h, -d.a / 2, d.a / 2);
      const double wk = (k == 0 || k == m) ? h / 2 : h;
      self.add(wk * d(u) * d(u));
      axis.add(wk * d(u) * d.derivative(u));  // zero inside the box
    }
    // the jumps: delta delta' = (delta^2)'/2 contributes half the jump of delta^2 at each edge
    auto sq = [&](double u) { return d(u) * d(u); };
    axis.add(0.5 * (sq(-d.a / 2) - sq(-d.a)));  // rising edge
    axis.add(0.5 * (sq(d.a) - sq(d.a / 2)));    // falling edge
    r.axis_integral = axis.value();
    r.transverse = self.value();
    r.transverse_expected = 1.0 / d.a;
  } else {
    const double h = d.a / 64;
    const int reach = 64 * 12;
    Sum self, axis;
    for (int k = -reach; k <= reach; ++k) {
      const double u = k * h;
      const double wk = (k == -reach || k == reach) ? h / 2 : h;
      self.add(wk * d(u) * d(u));
      axis.add(wk * d(u) * d.derivative(u));
    }
    r.axis_integral = axis.value();
    r.transverse = self.value();
    r.transverse_expected = 1.0 / (d.a * std::sqrt(2 * M_PI));
  }
  r.transverse_error = std::abs(r.transverse - r.transverse_expected);
  return r;
}

}  // namespace emalg::oracle
