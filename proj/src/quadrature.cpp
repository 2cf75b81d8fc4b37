#include "sigdetect/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace sigdetect {

namespace {

// QUADPACK (G7,K15) nodes and weights on [-1,1], positive half.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    res_k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = res_k * h;
  p.error = std::fabs((res_k - res_g) * h);
  return p;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opts) {
  if (a == b) return 0.0;
  std::priority_queue<Panel> heap;
  double total = 0.0, toterr = 0.0;
  int initial = 1;
  if (opts.max_panel > 0.0) {
    initial = std::max<int>(1, static_cast<int>(std::ceil((b - a) / opts.max_panel)));
    initial = std::min(initial, opts.max_segments / 2 + 1);
  }
  for (int i = 0; i < initial; ++i) {
    double lo = a + (b - a) * i / initial;
    double hi = a + (b - a) * (i + 1) / initial;
    Panel p = gk15(f, lo, hi);
    total += p.value;
    toterr += p.error;
    heap.push(p);
  }
  int segments = initial;
  while (segments < opts.max_segments &&
         toterr > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
    Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted in doubles
      Panel stuck = worst;
      stuck.error = 0.0;
      heap.push(stuck);
      continue;
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    toterr += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  return total;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadOptions& opts) {
  // x = a - log(u) maps u in (0,1] onto [a, inf); dx = -du/u.
  auto g = [&](double u) { return f(a - std::log(u)) / u; };
  return integrate(g, 0.0, 1.0, opts);
}

}  // namespace sigdetect
