#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nehari/functionals.hpp"
#include "support.hpp"

using namespace nehari;

namespace {

std::string admissibility_message(const ProblemSpec &s) {
  try {
    s.validate_system();
  } catch (const AdmissibilityError &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("admissibility failures name the violated condition") {
  ProblemSpec s;
  CHECK(admissibility_message(s).empty());

  ProblemSpec h1 = s;
  h1.p = 3.0;
  CHECK(admissibility_message(h1).find("(H1)") != std::string::npos);
  h1.p = 1.0;
  CHECK(admissibility_message(h1).find("(H1)") != std::string::npos);

  ProblemSpec h2 = s;
  h2.alpha = 3.0;
  CHECK(admissibility_message(h2).find("(H2)") != std::string::npos);

  // (alpha+1)/6 + (beta+1)/6 = 1 with beta + 1 = 2.5 >= q = 2
  ProblemSpec br = s;
  br.alpha = 2.5;
  br.beta = 1.5;
  CHECK(admissibility_message(br).find("beta + 1 < q") != std::string::npos);

  ProblemSpec gr = s;
  gr.perturbation_f = Perturbation::power(6.0);
  CHECK(admissibility_message(gr).find("growth") != std::string::npos);
  gr.perturbation_f = Perturbation::power(1.0);
  CHECK(admissibility_message(gr).find("growth") != std::string::npos);

  ProblemSpec lin;
  lin.dim = 3;
  lin.p = 1.2; // p* = 1.714 < 2
  lin.perturbation_f = Perturbation::linear();
  CHECK_THROWS_WITH_AS(lin.validate_scalar(), doctest::Contains("growth"), AdmissibilityError);

  CHECK_THROWS_AS(Perturbation::parse("cubic", 3.0), AdmissibilityError);
}

TEST_CASE("random admissible tuples validate and tiny (H2) defects are rejected") {
  gen::Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    ProblemSpec s = gen::admissible_system(rng);
    CHECK_NOTHROW(s.validate_system());
    s.alpha += 1e-9;
    CHECK_THROWS_AS(s.validate_system(), AdmissibilityError);
  }
}

TEST_CASE("energies are homogeneous along rays") {
  gen::Rng rng(17);
  auto g = build_radial_grid(4, 1.0, 300);
  ProblemSpec s;
  s.dim = 4;
  s.p = 1.7;
  s.perturbation_f = Perturbation::power(2.3);
  for (int k = 0; k < 10; ++k) {
    const Field u = gen::smooth_field(g, rng);
    const double t = gen::uniform(rng, 0.2, 3.0);
    CHECK(gradient_energy(t * u, s.p) == doctest::Approx(std::pow(t, s.p) * gradient_energy(u, s.p)).epsilon(1e-12));
    CHECK(power_integral(t * u, s.p_star()) ==
          doctest::Approx(std::pow(t, s.p_star()) * power_integral(u, s.p_star())).epsilon(1e-12));
    CHECK(primitive_integral(s.perturbation_f, t * u) ==
          doctest::Approx(std::pow(t, 2.3) * primitive_integral(s.perturbation_f, u)).epsilon(1e-12));
  }
}

TEST_CASE("gradient energy is exact for linear profiles") {
  auto g = build_radial_grid(3, 2.0, 40, 5.0);
  const Field u = Field::sample(g, [](double r) { return 3.0 * (2.0 - r); });
  CHECK(gradient_energy(u, 2.0) == doctest::Approx(9.0 * ball_volume(3, 2.0)).epsilon(1e-12));
  CHECK(gradient_energy(u, 1.5) == doctest::Approx(std::pow(3.0, 1.5) * ball_volume(3, 2.0)).epsilon(1e-12));
}

TEST_CASE("power integral against adaptive quadrature of the interpolated profile") {
  gen::Rng rng(23);
  for (int k = 0; k < 8; ++k) {
    const int dim = gen::pick(rng, 3, 6);
    const double s = gen::uniform(rng, 1.5, 6.0);
    const double a = gen::uniform(rng, 1.0, 4.0);
    auto g = build_radial_grid(dim, 1.0, 3000, 4.0);
    auto fn = [&](double r) { return (1.0 - r * r) / (1.0 + a * r * r); };
    const Field u = Field::sample(g, fn);
    const double ref = oracle::adaptive_simpson(
        [&](double r) { return oracle::sphere_area(dim) * std::pow(std::abs(fn(r)), s) * std::pow(r, dim - 1); }, 0.0, 1.0);
    CHECK(power_integral(u, s) == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("functional compositions") {
  gen::Rng rng(29);
  auto g = build_radial_grid(3, 1.0, 200);
  ProblemSpec s;
  s.lambda = 0.7;
  s.mu = -0.3;
  s.perturbation_f = Perturbation::linear();
  s.perturbation_g = Perturbation::power(1.5);
  const Field u = gen::smooth_field(g, rng), v = gen::smooth_field(g, rng);
  const double J = eval_P(s, u) / 2.0 - power_integral(u, 6.0) / 6.0 - 0.7 * primitive_integral(s.perturbation_f, u);
  CHECK(eval_J(s, u) == doctest::Approx(J).epsilon(1e-14));
  const double I = 4.5 * (eval_P(s, u) / 2.0 - 0.7 * primitive_integral(s.perturbation_f, u)) +
                   1.5 * (eval_Q(s, v) / 2.0 + 0.3 * primitive_integral(s.perturbation_g, v)) - eval_R(s, u, v);
  CHECK(eval_I(s, u, v) == doctest::Approx(I).epsilon(1e-14));
  CHECK(primitive_integral(Perturbation::none(), u) == 0.0);
}

TEST_CASE("Gateaux derivatives match central differences") {
  gen::Rng rng(31);
  const double h = 1e-5;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 10; ++k) {
      ProblemSpec s;
      s.dim = p < 3.0 ? gen::pick(rng, 3, 5) : gen::pick(rng, 4, 6);
      s.p = p;
      s.lambda = gen::uniform(rng, -1.0, 1.0);
      s.perturbation_f = k % 2 ? Perturbation::power(gen::uniform(rng, 1.2, s.p_star() - 0.1)) : Perturbation::none();
      auto g = build_radial_grid(s.dim, 1.0, 150);
      const Field u = gen::smooth_field(g, rng), d = gen::smooth_field(g, rng);
      const double fd = oracle::central_difference([&](double t) { return eval_J(s, u + t * d); }, h);
      const double an = gateaux_residual(s, u, d);
      CHECK(std::abs(an - fd) <= 1e-4 * std::abs(fd));
    }
  }
}

TEST_CASE("system partial derivatives match central differences") {
  gen::Rng rng(37);
  for (int k = 0; k < 20; ++k) {
    ProblemSpec s = gen::admissible_system(rng);
    s.lambda = gen::uniform(rng, -1.0, 1.0);
    s.mu = gen::uniform(rng, -1.0, 1.0);
    s.perturbation_f = Perturbation::power(0.5 * (1.0 + s.p_star()));
    auto g = build_radial_grid(s.dim, 1.0, 150);
    const Field u = gen::smooth_field(g, rng), v = gen::smooth_field(g, rng), d = gen::smooth_field(g, rng);
    const double fd1 = oracle::central_difference([&](double t) { return eval_I(s, u + t * d, v); }, 1e-5);
    const double fd2 = oracle::central_difference([&](double t) { return eval_I(s, u, v + t * d); }, 1e-5);
    CHECK(std::abs(gateaux_d1(s, u, v, d) - fd1) <= 1e-4 * std::abs(fd1));
    CHECK(std::abs(gateaux_d2(s, u, v, d) - fd2) <= 1e-4 * std::abs(fd2));
  }
}

TEST_CASE("dual norm surrogate is absolutely homogeneous") {
  gen::Rng rng(41);
  auto g = build_radial_grid(3, 1.0, 100);
  ProblemSpec s;
  const Field u = gen::smooth_field(g, rng);
  const Field grad = j_gradient(s, u);
  const double n1 = dual_norm_surrogate(grad, 2.0);
  CHECK(n1 > 0.0);
  CHECK(dual_norm_surrogate(-3.0 * grad, 2.0) == doctest::Approx(3.0 * n1).epsilon(1e-13));
  CHECK(dual_norm_surrogate(Field(g), 2.0) == 0.0);
}
