#include "harnack/taylor.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace harnack {

namespace {

void enumerate_monoms(int nvars, int order, std::vector<std::vector<int>>& out) {
  // all exponent vectors with total degree <= order, ordered by degree
  std::vector<int> e(nvars, 0);
  for (int deg = 0; deg <= order; ++deg) {
    // lexicographic walk over compositions of deg into nvars parts
    std::fill(e.begin(), e.end(), 0);
    e[0] = deg;
    while (true) {
      out.push_back(e);
      if (nvars == 1) break;
      // find rightmost position (except last) with a nonzero to move
      int i = nvars - 2;
      while (i >= 0 && e[i] == 0) --i;
      if (i < 0) break;
      --e[i];
      int rest = deg;
      for (int j = 0; j <= i; ++j) rest -= e[j];
      for (int j = i + 1; j < nvars; ++j) e[j] = 0;
      e[i + 1] = rest;
    }
  }
}

}  // namespace

JetBasis::JetBasis(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 1) throw std::invalid_argument("JetBasis: need nvars >= 1, order >= 1");
  enumerate_monoms(nvars, order, monoms_);
  const size_t sz = monoms_.size();

  prod_.assign(sz * sz, -1);
  std::vector<int> sum(nvars);
  for (size_t i = 0; i < sz; ++i) {
    for (size_t j = 0; j < sz; ++j) {
      int deg = 0;
      for (int v = 0; v < nvars; ++v) {
        sum[v] = monoms_[i][v] + monoms_[j][v];
        deg += sum[v];
      }
      if (deg <= order) prod_[i * sz + j] = index_of(sum);
    }
  }

  lower_.assign(sz * nvars, -1);
  for (size_t i = 0; i < sz; ++i) {
    for (int v = 0; v < nvars; ++v) {
      if (monoms_[i][v] > 0) {
        std::vector<int> e = monoms_[i];
        --e[v];
        lower_[i * nvars + v] = index_of(e);
      }
    }
  }
}

int JetBasis::index_of(const std::vector<int>& exps) const {
  // linear scan is fine: bases are tiny (126 monomials at nvars=5, order=4)
  for (size_t i = 0; i < monoms_.size(); ++i)
    if (monoms_[i] == exps) return static_cast<int>(i);
  return -1;
}

const JetBasis& JetBasis::shared(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_unique<JetBasis>(nvars, order);
  return *slot;
}

TaylorScalar TaylorScalar::constant(const JetBasis& basis, double v) {
  TaylorScalar t(basis);
  t.c[0] = v;
  return t;
}

TaylorScalar TaylorScalar::variable(const JetBasis& basis, int i, double x0) {
  TaylorScalar t(basis);
  t.c[0] = x0;
  std::vector<int> e(basis.nvars(), 0);
  e[i] = 1;
  t.c[basis.index_of(e)] = 1.0;
  return t;
}

Eigen::VectorXd TaylorScalar::grad() const {
  Eigen::VectorXd g(b->nvars());
  std::vector<int> e(b->nvars(), 0);
  for (int i = 0; i < b->nvars(); ++i) {
    e[i] = 1;
    g[i] = c[b->index_of(e)];
    e[i] = 0;
  }
  return g;
}

Eigen::MatrixXd TaylorScalar::hess() const {
  const int n = b->nvars();
  Eigen::MatrixXd H(n, n);
  std::vector<int> e(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      e[i] += 1;
      e[j] += 1;
      const double coef = c[b->index_of(e)];
      H(i, j) = H(j, i) = coef * (i == j ? 2.0 : 1.0);
      e[i] = 0;
      e[j] = 0;
    }
  }
  return H;
}

TaylorScalar TaylorScalar::deriv(int v) const {
  TaylorScalar out(*b);
  for (int i = 0; i < b->size(); ++i) {
    const double ci = c[i];
    if (ci == 0.0) continue;
    const int lo = b->lower(i, v);
    if (lo >= 0) out.c[lo] += b->monomial(i)[v] * ci;
  }
  return out;
}

TaylorScalar TaylorScalar::operator-() const {
  TaylorScalar out = *this;
  out.c = -out.c;
  return out;
}

TaylorScalar& TaylorScalar::operator+=(const TaylorScalar& o) {
  c += o.c;
  return *this;
}

TaylorScalar& TaylorScalar::operator-=(const TaylorScalar& o) {
  c -= o.c;
  return *this;
}

TaylorScalar& TaylorScalar::operator*=(double s) {
  c *= s;
  return *this;
}

TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b2) {
  const JetBasis* b = a.b;
  TaylorScalar out(*b);
  const int sz = b->size();
  for (int i = 0; i < sz; ++i) {
    const double ai = a.c[i];
    if (ai == 0.0) continue;
    for (int j = 0; j < sz; ++j) {
      const double bj = b2.c[j];
      if (bj == 0.0) continue;
      const int k = b->prod(i, j);
      if (k >= 0) out.c[k] += ai * bj;
    }
  }
  return out;
}

TaylorScalar TaylorScalar::series(const std::vector<double>& derivs) const {
  // u = self with the constant part removed; u^(order+1) = 0 in the algebra
  TaylorScalar u = *this;
  u.c[0] = 0.0;
  TaylorScalar acc = TaylorScalar::constant(*b, derivs[0]);
  TaylorScalar pw = TaylorScalar::constant(*b, 1.0);
  double fact = 1.0;
  for (size_t k = 1; k < derivs.size(); ++k) {
    pw = pw * u;
    fact *= static_cast<double>(k);
    acc += pw * (derivs[k] / fact);
  }
  return acc;
}

TaylorScalar TaylorScalar::recip() const {
  const double a0 = c[0];
  if (a0 == 0.0) throw std::domain_error("TaylorScalar::recip: zero constant part");
  std::vector<double> d(b->order() + 1);
  double p = 1.0 / a0, fact = 1.0;
  for (int k = 0; k <= b->order(); ++k) {
    // d^k/dx^k (1/x) = (-1)^k k! / x^{k+1}
    d[k] = (k % 2 == 0 ? 1.0 : -1.0) * fact * p;
    p /= a0;
    fact *= static_cast<double>(k + 1);
  }
  return series(d);
}

TaylorScalar TaylorScalar::sqrt() const {
  const double a0 = c[0];
  if (a0 <= 0.0) throw std::domain_error("TaylorScalar::sqrt: nonpositive constant part");
  const int m = b->order();
  // d^k/dx^k sqrt(x) = prod_{j<k}(1/2 - j) x^{1/2 - k}
  std::vector<double> d(m + 1);
  double fall = 1.0;
  for (int k = 0; k <= m; ++k) {
    d[k] = fall * std::pow(a0, 0.5 - k);
    fall *= 0.5 - k;
  }
  return series(d);
}

TaylorScalar TaylorScalar::exp() const {
  const double v = std::exp(c[0]);
  return series(std::vector<double>(b->order() + 1, v));
}

TaylorScalar TaylorScalar::sin() const {
  const double s0 = std::sin(c[0]), c0 = std::cos(c[0]);
  std::vector<double> d(b->order() + 1);
  const double cyc[4] = {s0, c0, -s0, -c0};
  for (int k = 0; k <= b->order(); ++k) d[k] = cyc[k % 4];
  return series(d);
}

TaylorScalar TaylorScalar::cos() const {
  const double s0 = std::sin(c[0]), c0 = std::cos(c[0]);
  std::vector<double> d(b->order() + 1);
  const double cyc[4] = {c0, -s0, -c0, s0};
  for (int k = 0; k <= b->order(); ++k) d[k] = cyc[k % 4];
  return series(d);
}

TaylorMatrix taylor_matrix_inverse(const TaylorMatrix& m, int n) {
  const JetBasis& b = *m[0].b;
  Eigen::MatrixXd G0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G0(i, j) = m[static_cast<size_t>(i) * n + j].val();
  Eigen::MatrixXd G0i = G0.inverse();

  auto at = [n](TaylorMatrix& a, int i, int j) -> TaylorScalar& {
    return a[static_cast<size_t>(i) * n + j];
  };
  auto cat = [n](const TaylorMatrix& a, int i, int j) -> const TaylorScalar& {
    return a[static_cast<size_t>(i) * n + j];
  };

  // X = G0^{-1} (m - G0) has no constant part, so the Neumann series is finite
  TaylorMatrix X(static_cast<size_t>(n) * n, TaylorScalar(b));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      TaylorScalar acc(b);
      for (int k = 0; k < n; ++k) {
        TaylorScalar d = cat(m, k, j);
        d.c[0] -= G0(k, j);
        acc += d * G0i(i, k);
      }
      at(X, i, j) = acc;
    }
  }

  auto matmul = [&](const TaylorMatrix& A, const TaylorMatrix& B) {
    TaylorMatrix C(static_cast<size_t>(n) * n, TaylorScalar(b));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        TaylorScalar acc(b);
        for (int k = 0; k < n; ++k) acc += cat(A, i, k) * cat(B, k, j);
        at(C, i, j) = acc;
      }
    return C;
  };

  TaylorMatrix acc(static_cast<size_t>(n) * n, TaylorScalar(b));
  TaylorMatrix pw(static_cast<size_t>(n) * n, TaylorScalar(b));
  for (int i = 0; i < n; ++i) {
    at(acc, i, i).c[0] = 1.0;
    at(pw, i, i).c[0] = 1.0;
  }
  for (int k = 1; k <= b.order(); ++k) {
    pw = matmul(pw, X);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (size_t idx = 0; idx < acc.size(); ++idx) acc[idx] += pw[idx] * sign;
  }

  // (I + X)^{-1} G0^{-1}
  TaylorMatrix out(static_cast<size_t>(n) * n, TaylorScalar(b));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      TaylorScalar a(b);
      for (int k = 0; k < n; ++k) a += cat(acc, i, k) * G0i(k, j);
      at(out, i, j) = a;
    }
  return out;
}

}  // namespace harnack
