#include "odlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "odlab/csv.hpp"
#include "odlab/errors.hpp"

namespace odlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase(const FourierTerm& t, const TorusPosition& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += t.k[i] * q[i];
  return kTwoPi * s;
}

// Representative of {k, -k}: first nonzero component positive.
bool is_canonical(const WaveVector& k) {
  for (int c : k) {
    if (c != 0) return c > 0;
  }
  return true;
}

std::vector<std::string_view> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find_first_of(seps, start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

double DerivativeBundle::laplacian() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += hessian[i][i];
  return s;
}

double DerivativeBundle::hessian_form(const Vec& u, const Vec& v) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) s += hessian[i][j] * u[i] * v[j];
  return s;
}

Vec DerivativeBundle::hessian_apply(const Vec& u) const noexcept {
  Vec out = u;
  for (std::size_t i = 0; i < dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) s += hessian[i][j] * u[j];
    out[i] = s;
  }
  return out;
}

double DerivativeBundle::third_form(const Vec& u) const noexcept {
  return dot(third_contract(u), u);
}

Vec DerivativeBundle::third_contract(const Vec& u) const noexcept {
  Vec out = u;
  for (std::size_t i = 0; i < dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j)
      for (std::size_t k = 0; k < dim(); ++k) s += third[i][j][k] * u[j] * u[k];
    out[i] = s;
  }
  return out;
}

FourierFunction::FourierFunction(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw ValidationError("Fourier function dimension must be in 1.." + std::to_string(kMaxDim));
  }
}

FourierFunction::FourierFunction(std::size_t dim, std::vector<FourierTerm> terms)
    : FourierFunction(dim) {
  for (const auto& t : terms) {
    for (std::size_t i = dim; i < kMaxDim; ++i) {
      if (t.k[i] != 0) throw ValidationError("wave vector has components beyond the dimension");
    }
    if (!std::isfinite(t.cos_coef) || !std::isfinite(t.sin_coef)) {
      throw ValidationError("Fourier coefficients must be finite");
    }
  }
  terms_ = std::move(terms);
  canonicalize();
}

FourierFunction FourierFunction::constant(std::size_t dim, double c) {
  return FourierFunction(dim, {FourierTerm{WaveVector{}, c, 0.0}});
}

void FourierFunction::canonicalize() {
  for (auto& t : terms_) {
    if (!is_canonical(t.k)) {
      for (int& c : t.k) c = -c;
      t.sin_coef = -t.sin_coef;
    }
    if (t.k == WaveVector{}) t.sin_coef = 0.0;
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const FourierTerm& a, const FourierTerm& b) { return a.k < b.k; });
  std::vector<FourierTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().k == t.k) {
      merged.back().cos_coef += t.cos_coef;
      merged.back().sin_coef += t.sin_coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const FourierTerm& t) { return t.cos_coef == 0.0 && t.sin_coef == 0.0; });
  terms_ = std::move(merged);
}

void FourierFunction::check_dim(const TorusPosition& q) const {
  if (q.size() != dim_) {
    throw ValidationError("position dimension " + std::to_string(q.size()) +
                          " does not match function dimension " + std::to_string(dim_));
  }
}

double FourierFunction::constant_term() const noexcept {
  if (!terms_.empty() && terms_.front().k == WaveVector{}) return terms_.front().cos_coef;
  return 0.0;
}

int FourierFunction::max_frequency() const noexcept {
  int m = 0;
  for (const auto& t : terms_)
    for (int c : t.k) m = std::max(m, std::abs(c));
  return m;
}

double FourierFunction::value(const TorusPosition& q) const {
  check_dim(q);
  double s = 0.0;
  for (const auto& t : terms_) {
    const double th = phase(t, q);
    s += t.cos_coef * std::cos(th) + t.sin_coef * std::sin(th);
  }
  return s;
}

Vec FourierFunction::gradient(const TorusPosition& q) const {
  check_dim(q);
  Vec g(dim_);
  value_and_gradient(q, g);
  return g;
}

double FourierFunction::value_and_gradient(const TorusPosition& q, Vec& grad) const noexcept {
  double v = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) grad[i] = 0.0;
  for (const auto& t : terms_) {
    const double th = phase(t, q);
    const double c = std::cos(th);
    const double s = std::sin(th);
    v += t.cos_coef * c + t.sin_coef * s;
    const double d = kTwoPi * (t.sin_coef * c - t.cos_coef * s);
    for (std::size_t i = 0; i < dim_; ++i) grad[i] += t.k[i] * d;
  }
  return v;
}

DerivativeBundle FourierFunction::derivatives(const TorusPosition& q, int order) const {
  check_dim(q);
  if (order < 0 || order > 3) throw ValidationError("derivative order must be in 0..3");
  DerivativeBundle b;
  b.order = order;
  b.gradient = Vec(dim_);
  for (const auto& t : terms_) {
    const double th = phase(t, q);
    const double c = std::cos(th);
    const double s = std::sin(th);
    b.value += t.cos_coef * c + t.sin_coef * s;
    if (order < 1) continue;
    std::array<double, kMaxDim> w{};
    for (std::size_t i = 0; i < dim_; ++i) w[i] = kTwoPi * t.k[i];
    const double d1 = t.sin_coef * c - t.cos_coef * s;
    const double d2 = -(t.cos_coef * c + t.sin_coef * s);
    const double d3 = t.cos_coef * s - t.sin_coef * c;
    // Only i <= j <= k is accumulated; the rest is mirrored below so the
    // tensors are symmetric bit for bit.
    for (std::size_t i = 0; i < dim_; ++i) {
      b.gradient[i] += w[i] * d1;
      if (order < 2) continue;
      for (std::size_t j = i; j < dim_; ++j) {
        b.hessian[i][j] += w[i] * w[j] * d2;
        if (order < 3) continue;
        for (std::size_t k = j; k < dim_; ++k) b.third[i][j][k] += w[i] * w[j] * w[k] * d3;
      }
    }
  }
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) {
      b.hessian[j][i] = b.hessian[i][j];
      for (std::size_t k = j; k < dim_; ++k) {
        const double v = b.third[i][j][k];
        b.third[i][k][j] = b.third[j][i][k] = b.third[j][k][i] = b.third[k][i][j] = b.third[k][j][i] = v;
      }
    }
  return b;
}

FourierFunction FourierFunction::scaled(double s) const {
  std::vector<FourierTerm> t = terms_;
  for (auto& x : t) {
    x.cos_coef *= s;
    x.sin_coef *= s;
  }
  return FourierFunction(dim_, std::move(t));
}

FourierFunction FourierFunction::plus_constant(double c) const {
  std::vector<FourierTerm> t = terms_;
  t.push_back(FourierTerm{WaveVector{}, c, 0.0});
  return FourierFunction(dim_, std::move(t));
}

FourierFunction FourierFunction::dilated(int m) const {
  if (m <= 0) throw ValidationError("dilation factor must be a positive integer");
  std::vector<FourierTerm> t = terms_;
  for (auto& x : t)
    for (int& c : x.k) c *= m;
  return FourierFunction(dim_, std::move(t));
}

FourierFunction operator+(const FourierFunction& a, const FourierFunction& b) {
  if (a.dim_ != b.dim_) throw ValidationError("cannot add Fourier functions of different dimension");
  std::vector<FourierTerm> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return FourierFunction(a.dim_, std::move(t));
}

FourierFunction FourierFunction::parse(std::string_view text, std::size_t dim) {
  FourierFunction probe(dim);
  std::vector<FourierTerm> terms;
  std::vector<std::string> errors;
  std::size_t lineno = 0;
  for (std::string_view line : split_any(text, "\n;")) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> fields;
    for (auto f : split_any(line, " \t\r")) {
      if (!f.empty()) fields.push_back(f);
    }
    if (fields.empty()) continue;
    if (fields.size() != dim + 2) {
      errors.push_back("term " + std::to_string(lineno) + ": expected " + std::to_string(dim + 2) +
                       " fields (k1..kd a b), got " + std::to_string(fields.size()));
      continue;
    }
    try {
      FourierTerm t;
      for (std::size_t i = 0; i < dim; ++i) t.k[i] = static_cast<int>(parse_int(fields[i]));
      t.cos_coef = parse_real(fields[dim]);
      t.sin_coef = parse_real(fields[dim + 1]);
      terms.push_back(t);
    } catch (const ValidationError& e) {
      errors.push_back("term " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return FourierFunction(dim, std::move(terms));
}

std::string FourierFunction::to_text(bool one_line) const {
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out << (one_line ? "; " : "\n");
    first = false;
    for (std::size_t i = 0; i < dim_; ++i) out << t.k[i] << ' ';
    out << ' ' << format_real_short(t.cos_coef) << ' ' << format_real_short(t.sin_coef);
  }
  if (terms_.empty()) {
    // The zero function still needs a parseable representation.
    for (std::size_t i = 0; i < dim_; ++i) out << "0 ";
    out << " 0 0";
  }
  if (!one_line) out << '\n';
  return out.str();
}

DerivativeBundle eval_derivatives(const FourierFunction& f, const TorusPosition& q, int order) {
  return f.derivatives(q, order);
}

}  // namespace odlab
