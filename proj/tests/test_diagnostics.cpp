#include "ddiff/diagnostics.hpp"
#include "ddiff/errors.hpp"
#include "ddiff/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ddiff;

namespace {

const FluxFunction kFlux(1.0, 2.0);

} // namespace

TEST_CASE("record on constant fields")
{
  const Grid2D g = Grid2D::unit_square(10);
  const SeriesRecord sub = record(ScalarField(g, 0.8), 0.0, 0.0, kFlux, 0.8);
  CHECK(sub.energy == 0.0);
  CHECK(sub.rel_energy == 0.0);
  CHECK(sub.pos_l1 == 0.0);
  CHECK(sub.mass == doctest::Approx(3.2).epsilon(1e-14));

  const SeriesRecord sup = record(ScalarField(g, 1.5), 0.0, 0.0, kFlux, 1.5);
  CHECK(sup.energy == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(sup.rel_energy == 0.0);
  CHECK(sup.pos_l1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sup.n_components == 1);
  CHECK(!sup.hm1_sq);
}

TEST_CASE("record is pure")
{
  const ExperimentConfig pc = preset_config("fig3");
  const Grid2D g = Grid2D::unit_square(30);
  const ScalarField f = build_ic(pc.ic, g).field;
  CHECK(record(f, 1.0, 0.1, kFlux, 0.3) == record(f, 1.0, 0.1, kFlux, 0.3));
}

TEST_CASE("exact fits")
{
  std::vector<double> t, pw, ex, c;
  for (int k = 1; k <= 10; ++k) {
    t.push_back(k);
    pw.push_back(std::pow(k, -3.0));
    ex.push_back(std::exp(-2.0 * k));
    c.push_back(5.0);
  }
  const std::pair<double, double> all{1.0, 10.0};
  const DecayFit p = fit_decay(t, pw, all, FitKind::LogLog);
  CHECK(p.slope == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(p.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.n_samples == 10);
  const DecayFit e = fit_decay(t, ex, all, FitKind::SemiLog);
  CHECK(e.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(e.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const DecayFit k = fit_decay(t, c, all, FitKind::LogLog);
  CHECK(std::abs(k.slope) <= 1e-14);

  // Default window is the last half of the time range: t in [5.5, 10].
  const DecayFit d = fit_decay(t, pw, std::nullopt, FitKind::LogLog);
  CHECK(d.n_samples == 5);
  CHECK(d.t_lo == 5.5);
  CHECK(d.t_hi == 10.0);
}

TEST_CASE("fit errors and scaling invariance")
{
  std::vector<double> t{1, 2, 3, 4, 5, 6}, y{1, 0.5, 0.3, 0.2, 0.1, 0.05};
  CHECK_THROWS_AS(fit_decay(t, y, std::make_pair(4.0, 6.0), FitKind::LogLog), InsufficientData);
  std::vector<double> z{1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(fit_decay(t, z, std::make_pair(1.0, 6.0), FitKind::LogLog), NonPositiveValues);
  std::vector<double> y7 = y;
  for (double& v : y7)
    v *= 7.0;
  const auto w = std::make_pair(1.0, 6.0);
  const DecayFit a = fit_decay(t, y, w, FitKind::LogLog), b = fit_decay(t, y7, w, FitKind::LogLog);
  CHECK(a.slope == doctest::Approx(b.slope).epsilon(1e-12));
  CHECK(b.intercept - a.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(a.r_squared >= 0.0);
  CHECK(a.r_squared <= 1.0);
}

TEST_CASE("monotonicity audit")
{
  const Grid2D g(0.0, 2.0, 0.0, 1.0, 2, 1);
  const ScalarField p(g, std::vector<double>{0.5, 1.5});
  CHECK(monotonicity_audit(p, p, 1.0, 1e-6).ok);
  CHECK(monotonicity_audit(p, p, 1.0, 1e-6).worst_violation == 0.0);
  const MonotonicityResult drop = monotonicity_audit(p, ScalarField(g, std::vector<double>{0.4, 1.5}), 1.0, 1e-6);
  CHECK(!drop.ok);
  CHECK(drop.worst_violation == doctest::Approx(0.1).epsilon(1e-12));
  const MonotonicityResult clip = monotonicity_audit(p, ScalarField(g, std::vector<double>{0.5, 1.2}), 1.0, 1e-6);
  CHECK(clip.ok);
  CHECK(clip.worst_violation == 0.0);
}

TEST_CASE("superlevel components")
{
  const Grid2D g = Grid2D::unit_square(60);
  CHECK(superlevel_components(ScalarField(g, 0.2), 0.5) == 0);

  const ScalarField one = build_ic(preset_config("fig1").ic, g).field;
  CHECK(superlevel_components(one, 0.75) == 1);
  CHECK(superlevel_components(one, max_value(one) + 1.0) == 0);
  CHECK(superlevel_components(one, min_value(one) - 1.0) == 1);

  const ScalarField two = build_ic(preset_config("fig3").ic, g).field;
  CHECK(superlevel_components(two, 0.15) == 2);

  // Diagonal neighbours are not connected.
  const Grid2D s = Grid2D::unit_square(2);
  CHECK(superlevel_components(ScalarField(s, std::vector<double>{1, 0, 0, 1}), 0.5) == 2);
}

TEST_CASE("invariant audit flags violations")
{
  const Grid2D g(0.0, 2.0, 0.0, 1.0, 2, 1);
  const ScalarField ic(g, std::vector<double>{0.5, 2.0});
  InvariantAudit audit(ic, kFlux);
  audit.observe(ic, ScalarField(g, std::vector<double>{0.6, 1.9}));
  CHECK(audit.report().all_ok());
  audit.observe(ic, ScalarField(g, std::vector<double>{0.4, 2.2}));
  const auto& r = audit.report();
  CHECK(!r.mass_ok);
  CHECK(!r.max_ok);
  CHECK(!r.monotonicity_ok);
  CHECK(!r.energy_ok);
  CHECK(r.steps == 2);
}
