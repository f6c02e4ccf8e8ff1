#include "ddiff/stepper.hpp"

#include "ddiff/errors.hpp"
#include "ddiff/linsolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace ddiff {

void StepperConfig::validate() const
{
  if (!(tau_min > 0.0) || !(tau_min <= tau_init) || !(tau_init <= tau_max))
    throw InvalidArgument("stepper: need 0 < tau_min <= tau_init <= tau_max");
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0) || !(grow_factor > 1.0))
    throw InvalidArgument("stepper: need 0 < shrink_factor < 1 < grow_factor");
  if (!(picard_tol > 0.0) || picard_max < 0 || anderson_depth < 0)
    throw InvalidArgument("stepper: invalid Picard settings");
  if (!(accept_tol > 0.0) || !(lin_tol > 0.0))
    throw InvalidArgument("stepper: tolerances must be positive");
}

FaceCoefficients face_coefficients(const ScalarField& field, const FluxFunction& flux)
{
  const Grid2D& g = field.grid();
  const std::size_t nx = g.nx(), ny = g.ny();
  std::vector<double> d(g.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = flux.deriv(field[k]);

  FaceCoefficients c;
  c.ax.assign((nx + 1) * ny, 0.0);
  c.ay.assign(nx * (ny + 1), 0.0);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 1; i < nx; ++i)
      c.ax[j * (nx + 1) + i] = 0.5 * (d[g.index(i - 1, j)] + d[g.index(i, j)]);
  for (std::size_t j = 1; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      c.ay[j * nx + i] = 0.5 * (d[g.index(i, j - 1)] + d[g.index(i, j)]);
  return c;
}

namespace {

struct LinearStep
{
  std::vector<double> x;
  std::size_t iters = 0;
  bool converged = false;
};

// Rows of I + tau A restricted to the cells that touch at least one face with
// a nonzero coefficient. Every other row and column is the identity, so those
// cells are solved exactly and CG only sees the active block.
struct ActiveBlock
{
  std::vector<std::size_t> cells;                // grid index of each active cell
  std::vector<std::array<std::size_t, 4>> nb;    // compressed neighbour (self if no face)
  std::vector<std::array<double, 4>> w;          // tau * a / h^2 per face

  ActiveBlock(const Grid2D& g, const FaceCoefficients& c, double tau)
  {
    const std::size_t nx = g.nx(), ny = g.ny();
    const double wx = tau / (g.hx() * g.hx()), wy = tau / (g.hy() * g.hy());
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> pos(g.size(), none);
    auto faces = [&](std::size_t i, std::size_t j) {
      return std::array<double, 4>{wx * c.ax[j * (nx + 1) + i], wx * c.ax[j * (nx + 1) + i + 1],
                                   wy * c.ay[j * nx + i], wy * c.ay[(j + 1) * nx + i]};
    };
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const auto f = faces(i, j);
        if (f[0] > 0.0 || f[1] > 0.0 || f[2] > 0.0 || f[3] > 0.0) {
          pos[g.index(i, j)] = cells.size();
          cells.push_back(g.index(i, j));
        }
      }
    nb.resize(cells.size());
    w.resize(cells.size());
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const std::size_t k = cells[p], i = k % nx, j = k / nx;
      w[p] = faces(i, j);
      const std::array<std::size_t, 4> grid_nb{k - 1, k + 1, k - nx, k + nx};
      for (int q = 0; q < 4; ++q)
        nb[p][q] = w[p][q] > 0.0 ? pos[grid_nb[q]] : p;
    }
  }

  std::size_t size() const noexcept { return cells.size(); }

  void apply(std::span<const double> v, std::span<double> y) const
  {
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const auto& n = nb[p];
      const auto& a = w[p];
      const double vp = v[p];
      y[p] = vp + (a[0] * (vp - v[n[0]]) + a[1] * (vp - v[n[1]]) + a[2] * (vp - v[n[2]]) +
                   a[3] * (vp - v[n[3]]));
    }
  }
};

// Solves (I + tau A(frozen)) x = rhs as a correction to `guess`, so the CG
// tolerance is relative to the current defect rather than to |rhs|. Without
// this the iteration freezes once tau A rho drops below lin_tol |rho|. The
// correction has zero sum up to rounding because the columns of I + tau A
// sum to one; the guess always carries the mass of rhs.
LinearStep solve_frozen(const ScalarField& frozen, std::span<const double> rhs,
                        std::span<const double> guess, double tau, const StepperConfig& cfg,
                        const FluxFunction& flux)
{
  const Grid2D& g = frozen.grid();
  const ActiveBlock block(g, face_coefficients(frozen, flux), tau);
  std::vector<double> x(rhs.begin(), rhs.end());
  if (block.size() == 0)
    return {std::move(x), 0, true};

  const std::size_t n = block.size();
  std::vector<double> v(n), defect(n);
  for (std::size_t p = 0; p < n; ++p)
    v[p] = guess[block.cells[p]];
  block.apply(v, defect);
  for (std::size_t p = 0; p < n; ++p)
    defect[p] = rhs[block.cells[p]] - defect[p];
  LinearOperator op(n, [&](std::span<const double> in, std::span<double> out) { block.apply(in, out); });
  CgOptions opts;
  opts.tol = cfg.lin_tol;
  opts.max_iter = cfg.lin_max_iter_for(g);
  const CgResult r = cg_solve(op, defect, opts);
  // The exact solution is a convex combination of rhs values; clip the
  // rounding-level negatives CG can leave next to zero density.
  for (std::size_t p = 0; p < n; ++p)
    x[block.cells[p]] = std::max(v[p] + r.x[p], 0.0);
  return {std::move(x), r.iters, r.converged};
}

// Jacobian of x + tau A(x) x on the active block. Differentiating the face
// coefficient adds tau (x_p - x_q) f''/(2 h^2) terms, so the block is not
// symmetric; its columns still sum to one.
struct JacobianBlock
{
  std::vector<std::size_t> cells;
  std::vector<std::array<std::size_t, 4>> nb;
  std::vector<double> diag;
  std::vector<std::array<double, 4>> off;

  JacobianBlock(const ScalarField& x, double tau, const FluxFunction& flux)
  {
    const Grid2D& g = x.grid();
    ActiveBlock block(g, face_coefficients(x, flux), tau);
    cells = std::move(block.cells);
    nb = std::move(block.nb);
    diag.assign(cells.size(), 1.0);
    off.assign(cells.size(), {0.0, 0.0, 0.0, 0.0});
    const double cx = 0.5 * tau / (g.hx() * g.hx()), cy = 0.5 * tau / (g.hy() * g.hy());
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const double xp = x[cells[p]], d2p = flux.deriv2(xp);
      for (int q = 0; q < 4; ++q) {
        if (nb[p][q] == p)
          continue;
        const double xq = x[cells[nb[p][q]]];
        const double c = (q < 2 ? cx : cy) * (xp - xq);
        const double w = block.w[p][q];
        diag[p] += w + c * d2p;
        off[p][q] = -w + c * flux.deriv2(xq);
      }
    }
  }

  void apply(std::span<const double> v, std::span<double> y) const
  {
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const auto& n = nb[p];
      const auto& o = off[p];
      y[p] = diag[p] * v[p] + o[0] * v[n[0]] + o[1] * v[n[1]] + o[2] * v[n[2]] + o[3] * v[n[3]];
    }
  }
};

PicardResult newton_step(const ScalarField& rho_prev, double tau, const StepperConfig& cfg,
                         const FluxFunction& flux)
{
  PicardResult res;
  const Grid2D& g = rho_prev.grid();
  std::vector<double> x(rho_prev.values().begin(), rho_prev.values().end()), y(g.size());
  double first_defect = -1.0;
  for (int k = 1; k <= cfg.picard_max; ++k) {
    res.iters = k;
    const ScalarField current(g, x);
    apply_operator(g, face_coefficients(current, flux), 1.0, tau, x, y);
    for (std::size_t q = 0; q < y.size(); ++q)
      y[q] = rho_prev[q] - y[q];  // minus the nonlinear defect
    const double defect = l2_vec(y);
    if (first_defect < 0.0)
      first_defect = defect;
    else if (!(defect <= 1e3 * first_defect))
      return res;  // diverging; let the controller shrink tau

    // Outside the block the Jacobian is the identity.
    const JacobianBlock jac(current, tau, flux);
    std::vector<double> next(x.size());
    for (std::size_t q = 0; q < x.size(); ++q)
      next[q] = x[q] + y[q];
    if (!jac.cells.empty()) {
      const std::size_t n = jac.cells.size();
      std::vector<double> b(n);
      for (std::size_t p = 0; p < n; ++p)
        b[p] = y[jac.cells[p]];
      LinearOperator op(
          n, [&](std::span<const double> in, std::span<double> out) { jac.apply(in, out); }, false);
      CgOptions opts;
      opts.tol = cfg.lin_tol;
      opts.max_iter = cfg.lin_max_iter_for(g);
      const CgResult r = bicgstab_solve(op, b, opts);
      res.cg_iters += r.iters;
      if (!r.converged)
        return res;
      for (std::size_t p = 0; p < n; ++p)
        next[jac.cells[p]] = x[jac.cells[p]] + r.x[p];
    }
    double diff = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
      next[q] = std::max(next[q], 0.0);
      const double d = next[q] - x[q];
      diff += d * d;
    }
    x = std::move(next);
    if (!std::isfinite(diff))
      return res;
    if (std::sqrt(diff) <= cfg.picard_tol * l2_vec(x)) {
      res.field = ScalarField(g, std::move(x));
      res.converged = true;
      return res;
    }
  }
  return res;
}

} // namespace

ScalarField picard_first_iterate(const ScalarField& rho_prev, double tau, const StepperConfig& cfg,
                                 const FluxFunction& flux)
{
  LinearStep s = solve_frozen(rho_prev, rho_prev.values(), rho_prev.values(), tau, cfg, flux);
  if (!s.converged)
    throw NonConvergence("picard_first_iterate: linear solve did not converge");
  return ScalarField(rho_prev.grid(), std::move(s.x));
}

namespace {

// Least-squares mixing coefficients gamma = argmin |f - dF gamma| by modified
// Gram-Schmidt. Columns that are nearly dependent on earlier ones are given a
// zero coefficient.
std::vector<double> mixing_coefficients(const std::vector<std::vector<double>>& dF,
                                        std::span<const double> f)
{
  const std::size_t m = dF.size(), n = f.size();
  std::vector<std::vector<double>> q(m);
  std::vector<double> r(m * m, 0.0), qf(m, 0.0), gamma(m, 0.0);
  std::vector<bool> used(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    q[j] = dF[j];
    const double norm0 = l2_vec(q[j]);
    for (std::size_t i = 0; i < j; ++i) {
      if (!used[i])
        continue;
      r[i * m + j] = dot(q[i], q[j]);
      for (std::size_t k = 0; k < n; ++k)
        q[j][k] -= r[i * m + j] * q[i][k];
    }
    const double norm = l2_vec(q[j]);
    if (!(norm > 1e-10 * norm0))
      continue;
    used[j] = true;
    r[j * m + j] = norm;
    for (double& v : q[j])
      v /= norm;
    qf[j] = dot(q[j], f);
  }
  for (std::size_t j = m; j-- > 0;) {
    if (!used[j])
      continue;
    double v = qf[j];
    for (std::size_t i = j + 1; i < m; ++i)
      if (used[i])
        v -= r[j * m + i] * gamma[i];
    gamma[j] = v / r[j * m + j];
  }
  return gamma;
}

} // namespace

PicardResult picard_step(const ScalarField& rho_prev, double tau, const StepperConfig& cfg,
                         const FluxFunction& flux)
{
  if (!(tau > 0.0))
    throw InvalidArgument("picard_step: tau must be positive");
  if (cfg.newton)
    return newton_step(rho_prev, tau, cfg, flux);
  PicardResult res;
  const std::size_t n = rho_prev.grid().size();
  const std::size_t depth = static_cast<std::size_t>(cfg.anderson_depth);
  ScalarField current = rho_prev;
  // Anderson history: differences of successive residuals f = G(x) - x and
  // of successive images G(x), oldest first.
  std::vector<std::vector<double>> dF, dG;
  std::vector<double> f_last, g_last;
  for (int k = 1; k <= cfg.picard_max; ++k) {
    LinearStep s = solve_frozen(current, rho_prev.values(), current.values(), tau, cfg, flux);
    res.cg_iters += s.iters;
    res.iters = k;
    if (!s.converged)
      return res;
    std::vector<double> f(n);
    for (std::size_t q = 0; q < n; ++q)
      f[q] = s.x[q] - current[q];
    if (l2_vec(f) <= cfg.picard_tol * l2_vec(current.values())) {
      res.field = ScalarField(rho_prev.grid(), std::move(s.x));
      res.converged = true;
      return res;
    }
    if (depth == 0) {
      current = ScalarField(rho_prev.grid(), std::move(s.x));
      continue;
    }
    if (!f_last.empty()) {
      std::vector<double> df(n), dg(n);
      for (std::size_t q = 0; q < n; ++q) {
        df[q] = f[q] - f_last[q];
        dg[q] = s.x[q] - g_last[q];
      }
      dF.push_back(std::move(df));
      dG.push_back(std::move(dg));
      if (dF.size() > depth) {
        dF.erase(dF.begin());
        dG.erase(dG.begin());
      }
    }
    std::vector<double> next = s.x;
    if (!dF.empty()) {
      const std::vector<double> gamma = mixing_coefficients(dF, f);
      for (std::size_t j = 0; j < gamma.size(); ++j)
        for (std::size_t q = 0; q < n; ++q)
          next[q] -= gamma[j] * dG[j][q];
    }
    // Mixed iterates keep the mass of rho_prev (each dG column sums to zero)
    // but may dip below zero; coefficients are only defined for densities.
    for (double& v : next)
      if (!(v >= 0.0))
        v = 0.0;
    f_last = std::move(f);
    g_last = std::move(s.x);
    current = ScalarField(rho_prev.grid(), std::move(next));
  }
  return res;
}

double scheme_residual(const ScalarField& rho_next, const ScalarField& rho_prev, double tau,
                       const FluxFunction& flux)
{
  const Grid2D& g = rho_next.grid();
  const FaceCoefficients c = face_coefficients(rho_next, flux);
  std::vector<double> y(g.size());
  apply_operator(g, c, 1.0, tau, rho_next.values(), y);
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] -= rho_prev[k];
  return l2_vec(y);
}

std::pair<StepState, StepRecord> advance(const StepState& state, const StepperConfig& cfg,
                                         const FluxFunction& flux, std::optional<double> tau_cap)
{
  double tau = state.tau;
  if (!(tau >= cfg.tau_min) || !(tau <= cfg.tau_max * (1.0 + 1e-14)))
    throw InvalidArgument("advance: tau outside [tau_min, tau_max]");

  StepRecord rec;
  const double old_norm = l2_vec(state.rho.values());
  for (;;) {
    const bool capped = tau_cap && *tau_cap < tau;
    const double tau_try = capped ? *tau_cap : tau;
    PicardResult p = picard_step(state.rho, tau_try, cfg, flux);
    rec.cg_iters_total += p.cg_iters;
    double change = std::numeric_limits<double>::infinity();
    if (p.converged) {
      double diff = 0.0;
      for (std::size_t k = 0; k < state.rho.grid().size(); ++k) {
        const double d = (*p.field)[k] - state.rho[k];
        diff += d * d;
      }
      change = old_norm > 0.0 ? std::sqrt(diff) / old_norm : std::sqrt(diff);
    }
    if (!p.converged || change > cfg.accept_tol) {
      ++rec.rejected_attempts;
      // Retries restart from the previous accepted state.
      tau = (capped ? tau_try : tau) * cfg.shrink_factor;
      if (tau < cfg.tau_min)
        throw TimestepUnderflow("advance: tau " + std::to_string(tau) + " fell below tau_min at t = " +
                                std::to_string(state.t));
      continue;
    }
    rec.tau_used = tau_try;
    rec.picard_iters = p.iters;
    rec.rel_change = change;
    rec.t = state.t + tau_try;
    double tau_next = tau;
    if (p.iters < cfg.growth_iter_threshold)
      tau_next = std::min(tau * cfg.grow_factor, cfg.tau_max);
    StepState next{rec.t, tau_next, std::move(*p.field)};
    return {std::move(next), rec};
  }
}

namespace {

// Log-spaced retention times for the H^-1 post-pass.
std::vector<double> retention_times(double t_first, double t_end, std::size_t n)
{
  std::vector<double> out;
  if (n == 0 || !(t_end > 0.0))
    return out;
  const double lo = std::max(t_first, t_end * 1e-8);
  if (n == 1 || lo >= t_end) {
    out.push_back(t_end);
    return out;
  }
  const double a = std::log(lo), b = std::log(t_end);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1)));
  return out;
}

} // namespace

RunResult run(const ScalarField& ic, const StepperConfig& cfg, const FluxFunction& flux,
              const RunOptions& opts)
{
  cfg.validate();
  ic.validate();
  RunResult res{ic, {}, {}, {}, {}};
  if (!(opts.t_end > 0.0))
    return res;

  const double rho_inf = mean(ic);
  const double threshold = opts.segregation_threshold.value_or(0.5 * rho_inf);

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
    res.snapshots.push_back({snaps[next_snap], 0.0, ic});
    ++next_snap;
  }

  const std::vector<double> keep = retention_times(cfg.tau_init, opts.t_end, opts.hm1_samples);
  std::size_t next_keep = 0;

  StepState state{0.0, cfg.tau_init, ic};
  while (state.t < opts.t_end) {
    std::optional<double> cap;
    double target = opts.t_end;
    if (next_snap < snaps.size())
      target = std::min(target, snaps[next_snap]);
    // Targets closer than tau_min are reached by overshooting instead.
    if (opts.land_on_times && target - state.t >= cfg.tau_min)
      cap = target - state.t;
    auto [next, rec] = advance(state, cfg, flux, cap);
    if ((cap && rec.tau_used == *cap) || std::abs(next.t - target) <= 1e-12 * std::max(1.0, target)) {
      // Land exactly on the target instead of accumulating rounding.
      next.t = target;
      rec.t = target;
    }
    if (opts.observer)
      opts.observer(state.rho, next.rho, rec);
    res.series.push_back(record(next.rho, next.t, rec.tau_used, flux, rho_inf, threshold));
    res.steps.push_back(rec);
    while (next_snap < snaps.size() && next.t >= snaps[next_snap]) {
      res.snapshots.push_back({snaps[next_snap], next.t, next.rho});
      ++next_snap;
    }
    bool kept = false;
    while (next_keep < keep.size() && next.t >= keep[next_keep]) {
      if (!kept && next.t < opts.t_end)
        res.retained.emplace_back(res.series.size() - 1, next.rho);
      kept = true;
      ++next_keep;
    }
    state = std::move(next);
  }
  res.final_field = state.rho;
  if (opts.hm1_samples > 0)
    hm1_post_pass(res.series, res.retained, res.final_field);
  return res;
}

} // namespace ddiff
