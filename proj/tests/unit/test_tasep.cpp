#include "doctest.h"

#include <cmath>

#include "shocklab/errors.hpp"
#include "shocklab/experiments.hpp"
#include "shocklab/kernels.hpp"
#include "shocklab/tasep.hpp"

using namespace shocklab;

TEST_CASE("initial conditions") {
  SUBCASE("positions") {
    const auto hf = InitialCondition::half_flat();
    CHECK(hf.position(0) == 0);
    CHECK(hf.position(5) == -10);
    CHECK(hf.first_label() == 0);
    const auto f11 = InitialCondition::shock_f1f1();
    CHECK(f11.position(-3) == 6);
    CHECK(f11.first_label() == InitialCondition::kNone);
    const auto f21 = InitialCondition::shock_f2f1(-0.25, 100);
    CHECK(f21.position(1) == static_cast<Index>(std::floor(-25.0)) - 1);
    CHECK(f21.position(-2) == 4);
    const auto f22 = InitialCondition::shock_f2f2(0.5, 100);
    CHECK(f22.position(1) == -1 - 50);
    CHECK(f22.position(0) == 0);
    CHECK(f22.position(-50) == 50);
    CHECK(f22.first_label() == -50);
    const auto fm = InitialCondition::finite_m(3);
    CHECK(fm.position(1) == 4);
    CHECK(fm.first_label() == 1);
    CHECK(fm.position(3) == 0);
    CHECK(fm.position(4) == -1);
    CHECK(InitialCondition::step().position(1) == -1);
  }
  SUBCASE("strictly decreasing in the label") {
    for (const auto& ic : {InitialCondition::half_flat(), InitialCondition::shock_f1f1(),
                           InitialCondition::shock_f2f1(-0.25, 80), InitialCondition::shock_f2f2(0.5, 80),
                           InitialCondition::finite_m(4), InitialCondition::step()}) {
      const Index lo = ic.first_label() == InitialCondition::kNone ? -100 : ic.first_label();
      for (Index n = lo; n < lo + 200; ++n) CHECK(ic.position(n + 1) < ic.position(n));
    }
  }
  SUBCASE("rates") {
    CHECK(RateProfile::split(0.5).rate(0) == 0.5);
    CHECK(RateProfile::split(0.5).rate(1) == 1.0);
    CHECK(RateProfile::finite_m(0.5, 2).rate(2) == 0.5);
    CHECK(RateProfile::finite_m(0.5, 2).rate(3) == 1.0);
    CHECK(RateProfile::finite_m(0.5, 2).rate(0) == 1.0);
    CHECK_THROWS_AS(RateProfile::uniform(0.0).validate(), ParameterError);
  }
}

TEST_CASE("free particle is a Poisson counter") {
  const double t = 5;
  const int runs = 10000;
  double s = 0;
  for (int r = 0; r < runs; ++r) {
    const auto tr = simulate(InitialCondition::step(), RateProfile::uniform(1), t, 1, 1, derive_seed(3, r));
    s += static_cast<double>(tr.position(1, t) + 1);
  }
  const double m = s / runs;
  CHECK(std::abs(m - t) < 3 * std::sqrt(t / runs));
}

TEST_CASE("exclusion and order are preserved") {
  for (int r = 0; r < 10000; ++r) {
    const auto tr = simulate(InitialCondition::step(), RateProfile::uniform(1), 3.0, 1, 2, derive_seed(4, r));
    check_exclusion(tr);
    for (double tt : {0.5, 1.0, 2.0, 3.0}) REQUIRE(tr.position(2, tt) < tr.position(1, tt));
  }
  for (int r = 0; r < 200; ++r) {
    const auto tr = simulate(InitialCondition::shock_f1f1(), RateProfile::split(0.5), 10.0, -5, 5, derive_seed(5, r));
    CHECK_NOTHROW(check_exclusion(tr));
  }
}

TEST_CASE("simulation is reproducible and window independent") {
  const auto a = simulate(InitialCondition::half_flat(), RateProfile::uniform(1), 8.0, 3, 6, 99);
  const auto b = simulate(InitialCondition::half_flat(), RateProfile::uniform(1), 8.0, 3, 6, 99);
  CHECK(a.to_csv() == b.to_csv());
  SimOptions wide;
  wide.window = 400;
  const auto c = simulate(InitialCondition::half_flat(), RateProfile::uniform(1), 8.0, 3, 6, 99, wide);
  for (Index n = 3; n <= 6; ++n)
    for (double tt : {1.0, 4.0, 8.0}) CHECK(a.position(n, tt) == c.position(n, tt));
}

TEST_CASE("arrival table from a weight field") {
  SUBCASE("free particle: running sum of its own row") {
    const WeightField f = WeightField::sample(RegionSpec::uniform(), Bbox{0, 30, 0, 0}, 12);
    const auto tab = arrival_times_from_field(f, InitialCondition::half_flat(), 0, 0, 30);
    double s = 0;
    for (Index m = 1; m <= 30; ++m) {
      s += f.at(m, 0);
      CHECK(tab.at(m, 0) == s);
    }
    const auto tr = simulate_from_field(f, InitialCondition::half_flat(), 0, 0, 1e9);
    REQUIRE(tr.jumps[0].size() >= 30);
    for (std::size_t k = 0; k < 30; ++k) CHECK(tr.jumps[0][k] == tab.at(static_cast<Index>(k) + 1, 0));
  }
  SUBCASE("step initial condition equals corner passage") {
    // the corner cell counts here: particle 1 waits w(1,1) for its first jump (same sum, other order)
    for (int s = 0; s < 50; ++s) {
      const WeightField f = WeightField::sample(RegionSpec::uniform(), Bbox{0, 3, 1, 3}, derive_seed(13, s));
      const auto tab = arrival_times_from_field(f, InitialCondition::step(), 1, 3, 3);
      CHECK(tab.at(3, 3) == doctest::Approx(f.at(1, 1) + last_passage_value(f, {{1, 1}}, {3, 3})).epsilon(1e-14));
    }
  }
  SUBCASE("unrepresentable systems are rejected") {
    const WeightField f = WeightField::sample(RegionSpec::uniform(), Bbox{0, 3, 1, 3}, 1);
    CHECK_THROWS(arrival_times_from_field(f, InitialCondition::step(), 0, 3, 3));
  }
}

TEST_CASE("pathwise link between passage times and the particle system") {
  // x_n(t) + n >= m  iff  G(m, n) <= t, checked at every arrival time and just before it
  int mismatches = 0, checks = 0;
  for (int s = 0; s < 200; ++s) {
    const auto ic = InitialCondition::shock_f1f1();
    const Index first = -5, last = 10;
    const WeightField field = WeightField::sample(RegionSpec::row_split(0.5), Bbox{-30, 40, -5, 10}, derive_seed(1, s));
    const auto tab = arrival_times_from_field(field, ic, first, last, 20);
    const auto tr = simulate_from_field(field, ic, first, last, 1e9);
    for (Index n = 0; n <= 10; ++n)
      for (Index m = n + ic.position(n) + 1; m <= std::min<Index>(20, tab.exact_cap()); ++m) {
        const double g = tab.at(m, n);
        const bool at = tr.position(n, g) + n >= m;
        const bool before = tr.position(n, std::nextafter(g, 0.0)) + n >= m;
        ++checks;
        if (!at || before) ++mismatches;
      }
    // and the table equals the passage time from the full start set
    std::vector<Point> st;
    for (Index k = first; k <= last; ++k) st.push_back({k + ic.position(k), k});
    for (Index n = 0; n <= 4; ++n)
      for (Index m = n + ic.position(n) + 1; m <= std::min<Index>(8, tab.exact_cap()); ++m) {
        ++checks;
        if (tab.at(m, n) != last_passage_value(field, st, {m, n})) ++mismatches;
      }
  }
  CHECK(checks > 10000);
  CHECK(mismatches == 0);
}

TEST_CASE("density profiles") {
  SUBCASE("packed block") {
    const auto tr = simulate(InitialCondition::step(), RateProfile::uniform(1), 2.0, 1, 200, 3);
    const auto bins = density_profile(tr, 2.0, -150, -50, 10);
    for (const auto& b : bins) CHECK(b.density == 1.0);
  }
  SUBCASE("flat region has density one half") {
    const auto tr = simulate(InitialCondition::half_flat(), RateProfile::uniform(1), 1.0, 0, 600, 5);
    const auto bins = density_profile(tr, 1.0, -1000, -200, 100);
    for (const auto& b : bins) {
      CHECK(b.density >= 0.0);
      CHECK(b.density <= 1.0);
      CHECK(std::abs(b.density - 0.5) < 0.1);
    }
    double s = 0;
    for (const auto& b : bins) s += b.density;
    CHECK(std::abs(s / static_cast<double>(bins.size()) - 0.5) < 0.03);
  }
  SUBCASE("step estimator on a clean step") {
    std::vector<DensityBin> bins;
    for (int k = 0; k < 40; ++k) bins.push_back({static_cast<double>(k), k < 23 ? 0.5 : 0.75});
    CHECK(density_step_location(bins, 0.625) == doctest::Approx(22.5));
    CHECK(density_crossing(bins, 0.625).value() == doctest::Approx(22.5));
  }
}

TEST_CASE("shock moves with the predicted speed") {
  for (double t : {500.0, 1000.0}) {
    const auto r = run_shock_profile(Scenario::F1F1, 0.5, 0.0, t, 2, 21, 1);
    CHECK(r.vt == doctest::Approx(-0.25 * t));
    CHECK(r.max_location_offset < 5 * std::pow(t, 2.0 / 3.0));
  }
}

TEST_CASE("tagged particle law against the Fredholm determinant") {
  for (auto [n, t] : {std::pair{2, 2.0}, {4, 5.0}}) {
    const auto r = run_tagged_particle(KernelKind::Khat, n, t, 1.0, {}, 10000, 41, 1);
    REQUIRE(r.rows.size() == 7);
    for (const auto& row : r.rows) CHECK(std::abs(row.z) <= 3.0);
  }
  const auto k = run_tagged_particle(KernelKind::Ktilde, 3, 2.0, 0.5, {-2, -1, 0, 1, 2, 3, 4}, 10000, 43, 1);
  for (const auto& row : k.rows) CHECK(std::abs(row.z) <= 3.0);
  const auto fm = run_tagged_particle(KernelKind::FiniteM, 2, 1.0, 0.5, {}, 10000, 47, 1, 2);
  for (const auto& row : fm.rows) CHECK(std::abs(row.z) <= 3.0);
}
