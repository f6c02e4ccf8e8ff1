#ifndef DDIFF_LINSOLVE_HPP
#define DDIFF_LINSOLVE_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ddiff {

/// Matrix-free linear map y = A x on vectors of fixed length.
class LinearOperator
{
public:
  using ApplyFn = std::function<void(std::span<const double> x, std::span<double> y)>;

  LinearOperator(std::size_t dimension, ApplyFn apply, bool symmetric = true);

  std::size_t dimension() const noexcept { return dim_; }
  bool symmetric() const noexcept { return symmetric_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator()(std::span<const double> x) const;

private:
  std::size_t dim_;
  ApplyFn apply_;
  bool symmetric_;
};

struct CgOptions
{
  double tol = 1e-10;           ///< relative residual ||b - Ax|| / ||b||
  std::size_t max_iter = 0;     ///< 0 lets the caller pick; cg_solve itself uses the dimension
  /// Diagonal for Jacobi preconditioning. Note that preconditioning breaks
  /// the exact preservation of sum(x) that plain CG has for operators whose
  /// columns sum to one.
  std::optional<std::vector<double>> jacobi_diag;
};

struct CgResult
{
  std::vector<double> x;
  std::size_t iters = 0;
  double residual = 0.0;        ///< ||b - A x||, recomputed from x
  double rhs_norm = 0.0;
  bool converged = false;
};

/// Conjugate gradients for a symmetric positive (semi)definite operator.
///
/// For singular operators the right-hand side must lie in the range. Starts
/// from `x0` when given, else from zero. The loop always runs in the same
/// order, so results are bitwise reproducible. Does not throw on
/// non-convergence; callers inspect `converged`.
CgResult cg_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& opts,
                  std::optional<std::span<const double>> x0 = std::nullopt);

/// BiCGSTAB for a general nonsingular operator, started from zero. Uses
/// `tol` and `max_iter` from the options; the preconditioner is ignored.
/// Breakdown is reported as non-convergence.
CgResult bicgstab_solve(const LinearOperator& op, std::span<const double> rhs, const CgOptions& opts);

double dot(std::span<const double> a, std::span<const double> b);

} // namespace ddiff

#endif
