#include "ddiff/linsolve.hpp"

#include "ddiff/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ddiff {

LinearOperator::LinearOperator(std::size_t dimension, ApplyFn apply, bool symmetric)
  : dim_(dimension), apply_(std::move(apply)), symmetric_(symmetric)
{
  if (!apply_)
    throw InvalidArgument("LinearOperator: empty apply function");
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const
{
  apply_(x, y);
}

std::vector<double> LinearOperator::operator()(std::span<const double> x) const
{
  std::vector<double> y(dim_);
  apply_(x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += a[k] * b[k];
  return s;
}

CgResult cg_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& opts,
                  std::optional<std::span<const double>> x0)
{
  if (!op.symmetric())
    throw InvalidArgument("cg_solve: operator must be symmetric");
  const std::size_t n = op.dimension();
  if (rhs.size() != n || (x0 && x0->size() != n))
    throw InvalidArgument("cg_solve: dimension mismatch");
  if (opts.jacobi_diag && opts.jacobi_diag->size() != n)
    throw InvalidArgument("cg_solve: preconditioner dimension mismatch");

  CgResult res;
  res.x.assign(n, 0.0);
  if (x0)
    res.x.assign(x0->begin(), x0->end());
  res.rhs_norm = std::sqrt(dot(rhs, rhs));
  const double target = opts.tol * res.rhs_norm;

  std::vector<double> r(n), p(n), ap(n), zbuf;
  if (opts.jacobi_diag)
    zbuf.resize(n);
  // Without a preconditioner z is r itself.
  std::span<const double> z = opts.jacobi_diag ? std::span<const double>(zbuf) : std::span<const double>(r);

  auto true_residual = [&] {
    op.apply(res.x, ap);
    for (std::size_t k = 0; k < n; ++k)
      r[k] = rhs[k] - ap[k];
    return std::sqrt(dot(r, r));
  };
  auto precondition = [&] {
    if (opts.jacobi_diag) {
      const auto& d = *opts.jacobi_diag;
      for (std::size_t k = 0; k < n; ++k)
        zbuf[k] = r[k] / d[k];
    }
  };

  double rnorm = true_residual();
  if (rnorm <= target) {
    res.residual = rnorm;
    res.converged = true;
    return res;
  }

  precondition();
  std::copy(z.begin(), z.end(), p.begin());
  double rz = dot(r, z);
  const std::size_t max_iter = opts.max_iter ? opts.max_iter : n;
  while (res.iters < max_iter) {
    op.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0))
      break; // breakdown: p in the null space or indefinite operator
    const double alpha = rz / pap;
    double rr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      res.x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
      rr += r[k] * r[k];
    }
    ++res.iters;
    rnorm = std::sqrt(rr);
    if (rnorm <= target) {
      // The recursive residual drifts from the true one; confirm and restart if needed.
      rnorm = true_residual();
      if (rnorm <= target) {
        res.residual = rnorm;
        res.converged = true;
        return res;
      }
      precondition();
      std::copy(z.begin(), z.end(), p.begin());
      rz = dot(r, z);
      continue;
    }
    precondition();
    const double rz_new = opts.jacobi_diag ? dot(r, z) : rr;
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k)
      p[k] = z[k] + beta * p[k];
  }
  res.residual = true_residual();
  res.converged = res.residual <= target;
  return res;
}

CgResult bicgstab_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& opts)
{
  const std::size_t n = op.dimension();
  if (rhs.size() != n)
    throw InvalidArgument("bicgstab_solve: dimension mismatch");

  CgResult res;
  res.x.assign(n, 0.0);
  res.rhs_norm = std::sqrt(dot(rhs, rhs));
  const double target = opts.tol * res.rhs_norm;
  std::vector<double> r(rhs.begin(), rhs.end()), r0(n), p(n), v(n), s(n), t(n);
  auto true_residual = [&] {
    op.apply(res.x, t);
    for (std::size_t k = 0; k < n; ++k)
      r[k] = rhs[k] - t[k];
    return std::sqrt(dot(r, r));
  };

  const std::size_t max_iter = opts.max_iter ? opts.max_iter : n;
  double rnorm = res.rhs_norm;
  // Each pass restarts from the true residual; the recursive one drifts.
  for (int pass = 0; pass < 4 && rnorm > target && res.iters < max_iter; ++pass) {
    std::copy(r.begin(), r.end(), r0.begin());
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (res.iters < max_iter) {
      const double rho_new = dot(r0, r);
      if (rho_new == 0.0 || omega == 0.0)
        break;
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t k = 0; k < n; ++k)
        p[k] = r[k] + beta * (p[k] - omega * v[k]);
      op.apply(p, v);
      const double r0v = dot(r0, v);
      if (r0v == 0.0)
        break;
      alpha = rho / r0v;
      for (std::size_t k = 0; k < n; ++k)
        s[k] = r[k] - alpha * v[k];
      ++res.iters;
      if (std::sqrt(dot(s, s)) <= target) {
        for (std::size_t k = 0; k < n; ++k)
          res.x[k] += alpha * p[k];
        break;
      }
      op.apply(s, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      double rr = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        res.x[k] += alpha * p[k] + omega * s[k];
        r[k] = s[k] - omega * t[k];
        rr += r[k] * r[k];
      }
      if (std::sqrt(rr) <= target)
        break;
    }
    rnorm = true_residual();
    if (!std::isfinite(rnorm))
      break;
  }
  res.residual = rnorm;
  res.converged = std::isfinite(rnorm) && rnorm <= target;
  return res;
}

} // namespace ddiff
