#include "odlab/potentials.hpp"

#include <cmath>
#include <limits>

#include "odlab/errors.hpp"

namespace odlab {

namespace {

std::size_t grid_points_per_dim(std::size_t dim) {
  switch (dim) {
    case 1: return std::size_t{1} << 14;
    case 2: return std::size_t{1} << 9;
    default: return std::size_t{1} << 6;
  }
}

constexpr int kGoldenSteps = 20;

// Golden-section maximization of g along coordinate `axis` in [x-h, x+h].
void polish_axis(const std::function<double(const TorusPosition&)>& g, Vec& x, std::size_t axis,
                 double h) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval_at = [&](double c) {
    Vec y = x;
    y[axis] = c;
    return g(wrap_unchecked(y).q);
  };
  double a = x[axis] - h;
  double b = x[axis] + h;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = eval_at(c);
  double gd = eval_at(d);
  for (int it = 0; it < kGoldenSteps; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = eval_at(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = eval_at(d);
    }
  }
  const double best = gc > gd ? c : d;
  if (std::max(gc, gd) > eval_at(x[axis])) x[axis] = best;
}

}  // namespace

Potential::Potential(FourierFunction base, std::string label)
    : base_(std::move(base)), label_(std::move(label)) {}

Potential Potential::shifted_to_min_zero() const {
  const Extremum lowest = maximize_on_torus([this](const TorusPosition& q) { return -value(q); }, dim());
  return Potential(base_.plus_constant(lowest.value), label_);
}

CrystalPotential::CrystalPotential(Potential base, FourierFunction chi, double alpha, int k)
    : base_(std::move(base)), chi_(std::move(chi)), alpha_(alpha), k_(k) {
  if (chi_.dim() != base_.dim()) throw ValidationError("crystal profile dimension mismatch");
  if (k_ <= 0) throw ValidationError("crystal wave number k must be a positive integer");
  if (!std::isfinite(alpha_)) throw ValidationError("crystal amplitude must be finite");
}

DerivativeBundle CrystalPotential::eval(const TorusPosition& q, int order) const {
  if (order < 0 || order > 1) throw ValidationError("crystal_eval supports order 0..1");
  DerivativeBundle out = base_.derivatives(q, order);
  Vec kq = q.coords() * static_cast<double>(k_);
  const DerivativeBundle inner = chi_.derivatives(wrap(kq), order);
  out.value += alpha_ * inner.value;
  if (order >= 1) out.gradient += inner.gradient * (alpha_ * k_);
  return out;
}

Potential CrystalPotential::expanded() const {
  return Potential(base_.function() + chi_.dilated(k_).scaled(alpha_), base_.label() + "_crystal");
}

DerivativeBundle crystal_eval(const CrystalPotential& c, const TorusPosition& q, int order) {
  return c.eval(q, order);
}

Extremum maximize_on_torus(const std::function<double(const TorusPosition&)>& g, std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) throw ValidationError("unsupported dimension");
  const std::size_t n = grid_points_per_dim(dim);
  const double h = 1.0 / static_cast<double>(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= n;

  Vec best_x(dim);
  double best = -std::numeric_limits<double>::infinity();
  Vec x(dim);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = static_cast<double>(r % n) * h;
      r /= n;
    }
    const double v = g(wrap_unchecked(x).q);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // Coordinate sweeps; one suffices in d = 1.
  const int sweeps = dim == 1 ? 1 : 3;
  for (int s = 0; s < sweeps; ++s)
    for (std::size_t i = 0; i < dim; ++i) polish_axis(g, best_x, i, h);

  Extremum e;
  e.at = wrap_unchecked(best_x).q;
  e.value = std::max(best, g(e.at));
  return e;
}

double oscillation(const FourierFunction& v) {
  if (v.terms().empty() || (v.terms().size() == 1 && v.max_frequency() == 0)) return 0.0;
  const double hi = maximize_on_torus([&](const TorusPosition& q) { return v.value(q); }, v.dim()).value;
  const double lo = -maximize_on_torus([&](const TorusPosition& q) { return -v.value(q); }, v.dim()).value;
  return std::max(0.0, hi - lo);
}

double oscillation(const Potential& v) { return oscillation(v.function()); }

double oscillation(const CrystalPotential& v) { return oscillation(v.expanded()); }

double sup_grad_distance(const Potential& a, const Potential& b) {
  if (a.dim() != b.dim()) throw ValidationError("sup_grad_distance: dimension mismatch");
  const FourierFunction diff = a.function() + b.function().scaled(-1.0);
  if (diff.max_frequency() == 0) return 0.0;
  const Extremum e = maximize_on_torus(
      [&](const TorusPosition& q) { return norm_sq(diff.gradient(q)); }, diff.dim());
  return std::sqrt(e.value);
}

double sup_grad_distance(const CrystalPotential& v_eps, const Potential& v) {
  return sup_grad_distance(v_eps.expanded(), v);
}

double sup_hessian_norm(const FourierFunction& f) {
  if (f.max_frequency() == 0) return 0.0;
  const Extremum e = maximize_on_torus(
      [&](const TorusPosition& q) {
        const DerivativeBundle b = f.derivatives(q, 2);
        double s = 0.0;
        for (std::size_t i = 0; i < f.dim(); ++i)
          for (std::size_t j = 0; j < f.dim(); ++j) s += b.hessian[i][j] * b.hessian[i][j];
        return s;
      },
      f.dim());
  return std::sqrt(e.value);
}

}  // namespace odlab
