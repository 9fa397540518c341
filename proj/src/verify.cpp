#include "cdr/verify.hpp"

#include "cdr/error.hpp"
#include "cdr/estimators.hpp"
#include "cdr/fixtures.hpp"
#include "cdr/klr.hpp"
#include "cdr/metrics.hpp"
#include "cdr/shift.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

namespace cdr {

double threshold_vs_brute_force_gap(const JointDistribution& dist, const GnpProblem& problem) {
  const ThresholdClassifier g = solve_gnp_threshold(dist, problem);
  const RandomizedClassifierTable lp = brute_force_gnp(dist, problem);
  return std::abs(gnp_objective(dist, problem, g.on_nodes(dist.domain())) - lp.objective);
}

int ranking_inversions(const JointDistribution& dist, double theta0, double theta1, double tolerance) {
  const Eigen::VectorXd& eta = dist.posterior_table();
  const Eigen::VectorXd& q0 = dist.density0_table();
  const Eigen::VectorXd& q1 = dist.density1_table();
  const Eigen::VectorXd null = theta0 * q1 + (1.0 - theta0) * q0;
  const Eigen::VectorXd alt = theta1 * q1 + (1.0 - theta1) * q0;
  int inversions = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
      if (null[i] + alt[i] <= 0.0 || null[j] + alt[j] <= 0.0) continue;
      const bool eta_above = eta[i] - eta[j] > tolerance;
      const double lhs = alt[i] * null[j], rhs = alt[j] * null[i];
      const bool ratio_below = rhs - lhs > tolerance * std::max(lhs, rhs);
      inversions += eta_above && ratio_below;
    }
  return inversions;
}

ImmunityCheck immunity_check(const Scenario& scenario, double alpha, std::int64_t probe_points,
                             double level_tolerance) {
  const LevelSet gp = optimal_cdr_set(scenario.source, scenario.target, alpha);
  const LevelSet gq = optimal_cdr_set(scenario.target, scenario.target, alpha);
  ImmunityCheck check;
  check.threshold_p = gp.threshold;
  check.threshold_q = gq.threshold;
  const FeatureDomain& domain = scenario.target.domain();
  if (domain.is_grid()) {
    check.points = domain.size();
    check.disagreements = static_cast<std::int64_t>((gp.membership - gq.membership).cwiseAbs().sum());
    return check;
  }
  // uniform probe grid with about probe_points points
  const Eigen::Index d = domain.dimension();
  const int per_axis = std::max(2, static_cast<int>(std::round(std::pow(static_cast<double>(probe_points), 1.0 / d))));
  std::int64_t total = 1;
  for (Eigen::Index k = 0; k < d; ++k) total *= per_axis;
  Eigen::MatrixXd probes(d, total);
  for (std::int64_t p = 0; p < total; ++p) {
    std::int64_t rest = p;
    for (Eigen::Index k = 0; k < d; ++k) {
      const int idx = static_cast<int>(rest % per_axis);
      rest /= per_axis;
      const double lo = domain.lower()[k], hi = domain.upper()[k];
      probes(k, p) = lo + (hi - lo) * (idx + 0.5) / per_axis;
    }
  }
  const Eigen::VectorXd sp = gp.score->evaluate(probes);
  const Eigen::VectorXd sq = gq.score->evaluate(probes);
  check.points = total;
  for (std::int64_t p = 0; p < total; ++p) {
    if (std::abs(sq[p] - gq.threshold) <= level_tolerance) continue;
    check.disagreements += (sp[p] >= gp.threshold) != (sq[p] >= gq.threshold);
  }
  return check;
}

double sup_threshold_deviation(const Eigen::VectorXd& node_scores, const Eigen::VectorXd& node_masses,
                               std::vector<double> sample_scores) {
  std::vector<std::pair<double, double>> nodes;
  for (Eigen::Index i = 0; i < node_scores.size(); ++i) nodes.emplace_back(node_scores[i], node_masses[i]);
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::sort(sample_scores.begin(), sample_scores.end(), std::greater<>());
  const double n = static_cast<double>(sample_scores.size());

  // sweep breakpoints in descending order; both functions only change there
  std::size_t a = 0, b = 0;
  double mass = 0.0, count = 0.0, sup = 0.0;
  while (a < nodes.size() || b < sample_scores.size()) {
    double t = -std::numeric_limits<double>::infinity();
    if (a < nodes.size()) t = std::max(t, nodes[a].first);
    if (b < sample_scores.size()) t = std::max(t, sample_scores[b]);
    while (a < nodes.size() && nodes[a].first >= t) mass += nodes[a++].second;
    while (b < sample_scores.size() && sample_scores[b] >= t) {
      count += 1.0;
      ++b;
    }
    sup = std::max(sup, std::abs(mass - count / n));
  }
  return sup;
}

namespace {

double noisy_posterior(const ShiftSpec& noise, double eta) {
  switch (noise.kind) {
    case ShiftKind::LDLN: return (1.0 - noise.rho0 - noise.rho1) * eta + noise.rho0;
    case ShiftKind::SymmetricNoise: return 0.5 + (1.0 - 2.0 * noise.nu) * (eta - 0.5);
    case ShiftKind::OneSidedPD: return one_sided_noise_posterior(eta, (*noise.psi)(eta));
    default: throw Error(ErrorKind::InvalidArgument, "not a label-noise spec");
  }
}

}  // namespace

NoiseCheck noise_identity_check(const JointDistribution& target, const ShiftSpec& noise, std::int64_t n,
                                std::uint64_t seed) {
  require(target.domain().is_grid(), ErrorKind::UnsupportedDomain, "noise identities are checked on grids");
  const ShiftResult shifted = apply_shift(target, noise);
  const Eigen::VectorXd& eta_q = target.posterior_table();
  const Eigen::VectorXd& eta_p = shifted.source.posterior_table();
  NoiseCheck check;
  for (Eigen::Index i = 0; i < eta_q.size(); ++i)
    check.pointwise_error = std::max(check.pointwise_error, std::abs(eta_p[i] - noisy_posterior(noise, eta_q[i])));

  const auto draws = sample_noisy_labels(target, noise, n, seed);
  const Eigen::Index k = target.domain().size();
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(k), counts = Eigen::VectorXd::Zero(k);
  for (const auto& s : draws) {
    const Eigen::Index i = *target.domain().index_of(s.features);
    counts[i] += 1.0;
    ones[i] += s.label;
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (counts[i] < 1.0) continue;
    const double p = eta_p[i];
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) / counts[i]);
    check.max_z = std::max(check.max_z, std::abs(ones[i] / counts[i] - p) / sigma);
  }
  return check;
}

KlrNumericsCheck klr_numerics_check(std::uint64_t seed, int states, int triples, int m) {
  const Scenario s2 = builtin_scenario("S2");
  const auto data = s2.source.sample_labeled(m, derive_seed(seed, 1));
  Eigen::MatrixXd x(s2.source.domain().dimension(), m);
  Eigen::VectorXi y(m);
  for (int i = 0; i < m; ++i) {
    x.col(i) = data[static_cast<std::size_t>(i)].features;
    y[i] = data[static_cast<std::size_t>(i)].label;
  }
  const klr::KernelSpec<double> kernel{klr::KernelKind::Gaussian, klr::median_pairwise_distance<double>(x)};
  const double lambda = auto_lambda(static_cast<std::size_t>(m));
  Eigen::MatrixXd gram = klr::kernel_matrix<double>(x, x, kernel);
  gram.diagonal().array() += klr::kKernelJitter;
  const Eigen::VectorXd signs = (2.0 * y.cast<double>().array() - 1.0).matrix();
  const klr::KlrObjective<double> objective(gram, signs, lambda);

  KlrNumericsCheck check;
  Rng rng(derive_seed(seed, 2));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_state = [&] {
    Eigen::VectorXd c(m);
    const double scale = std::pow(10.0, -2.0 + 2.0 * uniform01(rng));
    for (int i = 0; i < m; ++i) c[i] = scale * normal(rng);
    return c;
  };

  for (int k = 0; k < states; ++k) {
    const Eigen::VectorXd c = random_state();
    const Eigen::VectorXd grad = objective.gradient(c);
    Eigen::VectorXd fd(m);
    for (int i = 0; i < m; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(c[i]));
      Eigen::VectorXd plus = c, minus = c;
      plus[i] += h;
      minus[i] -= h;
      fd[i] = (objective.value(plus) - objective.value(minus)) / (2.0 * h);
    }
    const double rel = (fd - grad).norm() / std::max(grad.norm(), 1e-12);
    check.max_gradient_error = std::max(check.max_gradient_error, rel);
  }

  for (int k = 0; k < triples; ++k) {
    const Eigen::VectorXd a = random_state(), b = random_state();
    const double t = uniform01(rng);
    const double lhs = objective.value(t * a + (1.0 - t) * b);
    const double rhs = t * objective.value(a) + (1.0 - t) * objective.value(b);
    check.convexity_violations += lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs));
  }

  const auto model = klr::fit_klr<double>(x, y, kernel, lambda, 1e-8, 100);
  const auto& trace = model.diagnostics().objective_trace;
  for (std::size_t i = 1; i < trace.size(); ++i) check.strictly_decreasing &= trace[i] < trace[i - 1];
  check.converged = model.diagnostics().converged;
  return check;
}

// ---------------------------------------------------------------------------

bool VerifyReport::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.failed(); });
}

namespace {

class Suite {
 public:
  void run(const std::string& fixture, const std::string& property, const std::function<CheckResult()>& body) {
    CheckResult result;
    try {
      result = body();
    } catch (const Error& e) {
      result.status = "fail";
      result.max_error = std::numeric_limits<double>::quiet_NaN();
      result.detail = e.what();
    } catch (const std::exception& e) {
      result.status = "fail";
      result.max_error = std::numeric_limits<double>::quiet_NaN();
      result.detail = std::string("unexpected exception: ") + e.what();
    }
    result.fixture = fixture;
    result.property = property;
    checks.push_back(std::move(result));
  }
  std::vector<CheckResult> checks;
};

CheckResult verdict(bool pass, double error, std::string detail = {}) {
  return {"", "", pass ? "pass" : "fail", error, std::move(detail)};
}

std::string format_alpha(double a) {
  std::ostringstream s;
  s << "alpha=" << a;
  return s.str();
}

}  // namespace

VerifyReport run_verify_suite(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Suite suite;
  const std::string random_name = "random_grid_x" + std::to_string(options.random_fixtures);

  // random fixtures for the oracle cross-checks
  std::vector<std::pair<JointDistribution, GnpProblem>> fixtures;
  {
    Rng rng(derive_seed(options.seed, 1));
    for (int k = 0; k < options.random_fixtures; ++k) {
      JointDistribution dist = random_grid_fixture(rng);
      fixtures.emplace_back(dist, random_gnp_problem(rng));
    }
  }

  suite.run(random_name, "threshold_matches_brute_force", [&] {
    double worst = 0.0;
    for (const auto& [dist, problem] : fixtures) worst = std::max(worst, threshold_vs_brute_force_gap(dist, problem));
    return verdict(worst <= 1e-9, worst);
  });
  suite.run(random_name, "brute_force_is_threshold_form", [&] {
    int bad = 0;
    for (const auto& [dist, problem] : fixtures) bad += !is_threshold_form(dist, problem, brute_force_gnp(dist, problem).acceptance);
    return verdict(bad == 0, bad, std::to_string(bad) + " non-threshold optima");
  });
  suite.run(random_name, "cdr_threshold_meets_level", [&] {
    double worst = 0.0;
    for (const auto& [dist, problem] : fixtures) {
      const GnpProblem cdr = GnpProblem::cdr(dist.prior(), problem.alpha);
      const Eigen::VectorXd g = solve_gnp_threshold(dist, cdr).on_nodes(dist.domain());
      worst = std::max(worst, std::abs(discovery_rate(dist, g) - std::min(problem.alpha, 1.0)));
    }
    return verdict(worst <= 1e-9, worst);
  });
  suite.run(random_name, "ranking_equivalence", [&] {
    int inversions = 0;
    for (const auto& [dist, problem] : fixtures) {
      inversions += ranking_inversions(dist, 0.0, 1.0);
      inversions += ranking_inversions(dist, problem.theta0, problem.theta1);
    }
    return verdict(inversions == 0, inversions);
  });
  suite.run(random_name, "lambda_gamma_roundtrip", [&] {
    double worst = 0.0;
    Rng rng(derive_seed(options.seed, 2));
    for (const auto& [dist, problem] : fixtures) {
      const double gamma = std::exp(4.0 * (uniform01(rng) - 0.5));
      const double lambda = lambda_gamma_map(problem.theta0, problem.theta1, gamma);
      const double back = inverse_lambda_gamma_map(problem.theta0, problem.theta1, lambda);
      worst = std::max(worst, std::abs(back - gamma) / gamma);
    }
    return verdict(worst <= 1e-9, worst);
  });

  // immunity and phi consistency on the shifted library scenarios
  for (const char* name : {"S3", "S4", "S5", "S6"}) {
    const Scenario scenario = builtin_scenario(name);
    for (double alpha : {0.1, 0.25, 0.5}) {
      suite.run(name, "immunity_" + format_alpha(alpha), [&] {
        const ImmunityCheck c = immunity_check(scenario, alpha);
        return verdict(c.agree(), static_cast<double>(c.disagreements),
                       std::to_string(c.disagreements) + "/" + std::to_string(c.points) + " disagree");
      });
    }
    suite.run(name, "posterior_equals_phi_of_target", [&] {
      const Eigen::VectorXd& eq = scenario.target.posterior_table();
      const Eigen::VectorXd& ep = scenario.source.posterior_table();
      const Eigen::VectorXd mass = scenario.source.marginal_mass();
      double worst = 0.0;
      for (Eigen::Index i = 0; i < eq.size(); ++i)
        if (mass[i] > 0.0) worst = std::max(worst, std::abs(ep[i] - scenario.phi(eq[i])));
      return verdict(worst < 1e-9, worst);
    });
  }

  // label-noise identities
  const Scenario s1 = builtin_scenario("S1");
  const std::vector<std::pair<std::string, ShiftSpec>> noises = {
      {"S5", builtin_scenario("S5").shift.value()},
      {"S1+symmetric(0.15)", ShiftSpec::symmetric_noise(0.15)},
      {"S6", builtin_scenario("S6").shift.value()},
  };
  for (std::size_t k = 0; k < noises.size(); ++k) {
    const auto& [name, spec] = noises[k];
    NoiseCheck c;
    suite.run(name, "noise_identity_pointwise", [&] {
      c = noise_identity_check(s1.target, spec, 100'000, derive_seed(options.seed, 3, k));
      return verdict(c.pointwise_error <= 1e-12, c.pointwise_error);
    });
    suite.run(name, "noise_identity_sampled_4sigma", [&] { return verdict(c.max_z <= 4.0, c.max_z); });
  }
  suite.run("S6", "one_sided_noise_is_posterior_drift", [&] {
    const Scenario s6 = builtin_scenario("S6");
    const Eigen::VectorXd& eq = s6.target.posterior_table();
    const Eigen::VectorXd& ep = s6.source.posterior_table();
    int bad = 0;
    for (Eigen::Index i = 0; i < eq.size(); ++i)
      for (Eigen::Index j = 0; j < eq.size(); ++j) bad += eq[i] > eq[j] + 1e-12 && !(ep[i] > ep[j]);
    return verdict(bad == 0, bad);
  });

  // symmetric-difference bound on library grids and random fixtures
  suite.run("S1+S4+S5+S6+S7+" + random_name, "sym_diff_bound_500_pairs", [&] {
    std::vector<JointDistribution> dists;
    for (const char* name : {"S1", "S4", "S5", "S6", "S7"}) {
      const Scenario s = builtin_scenario(name);
      dists.push_back(s.source);
    }
    for (std::size_t k = 0; k < fixtures.size() && k < 20; ++k) dists.push_back(fixtures[k].first);
    Rng rng(derive_seed(options.seed, 4));
    int violations = 0;
    double tightest = 0.0;
    for (const auto& dist : dists) {
      for (int p = 0; p < 500; ++p) {
        const Eigen::VectorXd g = random_membership(rng, dist.domain().size());
        const Eigen::VectorXd h = p % 7 == 0 ? g : random_membership(rng, dist.domain().size());
        const double eps = p % 5 == 0 ? dist.prior() : (p % 5 == 1 ? 1.0 : uniform01(rng));
        const SymDiffBoundCheck c = sym_diff_bound_check(dist, eps, g, h);
        violations += !c.holds;
        if (c.rhs > 0.0) tightest = std::max(tightest, c.lhs / c.rhs);
      }
    }
    return verdict(violations == 0, tightest, std::to_string(violations) + " violations; max lhs/rhs reported");
  });

  // kernel logistic regression numerics
  KlrNumericsCheck klr_check;
  suite.run("S2_klr_m60", "gradient_matches_central_differences", [&] {
    klr_check = klr_numerics_check(derive_seed(options.seed, 5));
    return verdict(klr_check.max_gradient_error <= 1e-5, klr_check.max_gradient_error);
  });
  suite.run("S2_klr_m60", "newton_strict_decrease", [&] {
    return verdict(klr_check.strictly_decreasing && klr_check.converged, 0.0,
                   klr_check.converged ? "" : "did not converge");
  });
  suite.run("S2_klr_m60", "objective_convexity_witness", [&] {
    return verdict(klr_check.convexity_violations == 0, klr_check.convexity_violations);
  });

  // empirical-process event on the exact grid
  suite.run("S1_n2000_x100", "sup_threshold_deviation_within_eps", [&] {
    const std::int64_t n = 2000;
    const double eps = deviation_epsilon(n);
    const Eigen::VectorXd& eta = s1.target.posterior_table();
    const Eigen::VectorXd mass = s1.target.marginal_mass();
    int misses = 0;
    double worst = 0.0;
    for (int r = 0; r < 100; ++r) {
      const auto sample = s1.target.sample_unlabeled(n, derive_seed(options.seed, 6, r));
      std::vector<double> scores;
      for (const auto& u : sample) scores.push_back(s1.target.posterior_or_prior(u.features));
      const double dev = sup_threshold_deviation(eta, mass, scores);
      worst = std::max(worst, dev);
      misses += dev > eps;
    }
    return verdict(misses == 0, worst);
  });

  // degenerate inputs: declared errors or valid output
  suite.run("degenerate_inputs", "declared_errors_only", [&] {
    int undeclared = 0;
    auto attempt = [&](const std::function<void()>& f) {
      try {
        f();
      } catch (const Error&) {
      } catch (...) {
        ++undeclared;
      }
    };
    attempt([] { (void)threshold_order_statistic({0.5}, 0.5); });
    attempt([] { (void)threshold_order_statistic({0.3, 0.3, 0.3}, 0.2); });
    attempt([] { (void)threshold_deviation_rule({0.7}, 0.1, 0.05, 0.02); });
    attempt([] { (void)threshold_order_statistic({0.1, 0.2}, 1e-12); });
    attempt([] { (void)threshold_order_statistic({0.1, 0.2}, 1.0 - 1e-12); });
    attempt([&] {
      std::vector<LabeledSample> ones;
      for (int i = 0; i < 10; ++i) ones.push_back({scalar_feature(i * 0.1), 1});
      (void)fit_klr(ones, KlrConfig{});
    });
    attempt([&] {
      std::vector<LabeledSample> same;
      for (int i = 0; i < 10; ++i) same.push_back({scalar_feature(0.0), i % 2});
      (void)fit_klr(same, KlrConfig{});
    });
    return verdict(undeclared == 0, undeclared);
  });

  // negative test: a non-monotone drift must be rejected
  const MonotoneMap corrupted("corrupted(4u(1-u))", [](double u) { return 4.0 * u * (1.0 - u); });
  suite.run("S1+corrupted_phi", "non_monotone_phi_rejected", [&] {
    try {
      (void)apply_posterior_drift(s1.target, corrupted);
    } catch (const Error& e) {
      return verdict(e.kind() == ErrorKind::NonMonotoneMap, 0.0, e.what());
    }
    return verdict(false, 1.0, "corrupted phi accepted");
  });
  if (options.inject_corrupted_phi) {
    suite.run("S1+corrupted_phi", "posterior_drift_fixture", [&] {
      const ShiftResult r = apply_posterior_drift(s1.target, corrupted);
      return verdict(true, 0.0, r.phi.name());
    });
  }

  VerifyReport report;
  report.checks = std::move(suite.checks);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.checks.push_back({"suite", "runtime_budget", report.seconds <= options.runtime_budget_seconds ? "pass" : "warn",
                           report.seconds, "seconds"});
  return report;
}

void write_verify_csv(std::ostream& out, const VerifyReport& report) {
  out << "fixture,property,status,max_error\n";
  for (const auto& c : report.checks)
    out << c.fixture << ',' << c.property << ',' << c.status << ',' << format_number(c.max_error) << '\n';
}

}  // namespace cdr
