#include "cdr/distribution.hpp"

#include "cdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cdr {

namespace {

void check_normalized(const Density& density, const char* which) {
  const double mass = total_mass(density);
  const double tolerance = density.domain().is_grid() ? 1e-9 : 1e-3;
  if (std::abs(mass - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << which << " integrates to " << mass << " on the evaluation grid";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

}  // namespace

JointDistribution::JointDistribution(double prior, DensityPtr density0, DensityPtr density1) {
  require(density0 && density1, ErrorKind::InvalidArgument, "class-conditional densities are required");
  require(prior > 0.0 && prior < 1.0, ErrorKind::InvalidArgument, "prior must lie in the open interval (0,1)");
  require(density0->domain() == density1->domain(), ErrorKind::InvalidArgument,
          "class-conditional densities live on different domains");
  check_normalized(*density0, "density0");
  check_normalized(*density1, "density1");

  auto impl = std::make_shared<Impl>();
  impl->prior = prior;
  impl->density0 = density0;
  impl->density1 = density1;
  impl->marginal = std::make_shared<MixtureDensity>(prior, density1, density0);
  impl->density0_table = density0->on_nodes();
  impl->density1_table = density1->on_nodes();
  impl->marginal_table = prior * impl->density1_table + (1.0 - prior) * impl->density0_table;
  impl->posterior_table.resize(impl->marginal_table.size());
  for (Eigen::Index i = 0; i < impl->marginal_table.size(); ++i) {
    const double m = impl->marginal_table[i];
    impl->posterior_table[i] = m > 0.0 ? prior * impl->density1_table[i] / m : prior;
  }
  impl_ = std::move(impl);
}

JointDistribution JointDistribution::from_marginal_and_posterior(DensityPtr marginal,
                                                                 std::function<double(const Feature&)> posterior,
                                                                 const Eigen::VectorXd& posterior_on_nodes) {
  const FeatureDomain& domain = marginal->domain();
  require(posterior_on_nodes.size() == domain.size(), ErrorKind::InvalidArgument, "posterior table size mismatch");
  require((posterior_on_nodes.array() >= 0.0).all() && (posterior_on_nodes.array() <= 1.0).all(),
          ErrorKind::InvalidArgument, "posterior values must lie in [0,1]");
  const Eigen::VectorXd marginal_nodes = marginal->on_nodes();
  const Eigen::VectorXd marginal_mass = domain.weights().cwiseProduct(marginal_nodes);
  const double prior = marginal_mass.dot(posterior_on_nodes) / marginal_mass.sum();
  if (!(prior >= 1e-9 && prior <= 1.0 - 1e-9)) {
    throw Error(ErrorKind::DegeneratePrior, "implied prior " + std::to_string(prior) + " is outside (0,1)");
  }

  if (domain.is_grid()) {
    const Eigen::VectorXd m = marginal_nodes / marginal_nodes.sum();
    Eigen::VectorXd p1 = posterior_on_nodes.cwiseProduct(m) / prior;
    Eigen::VectorXd p0 = (1.0 - posterior_on_nodes.array()).matrix().cwiseProduct(m) / (1.0 - prior);
    p1 /= p1.sum();
    p0 /= p0.sum();
    return JointDistribution(prior, std::make_shared<TablePmf>(domain, std::move(p0)),
                             std::make_shared<TablePmf>(domain, std::move(p1)));
  }

  auto eta = std::move(posterior);
  auto one_minus = [eta](const Feature& x) { return 1.0 - eta(x); };
  auto p1 = std::make_shared<TiltedDensity>(marginal, eta, posterior_on_nodes, prior);
  auto p0 = std::make_shared<TiltedDensity>(marginal, one_minus,
                                            (1.0 - posterior_on_nodes.array()).matrix(), 1.0 - prior);
  return JointDistribution(prior, std::move(p0), std::move(p1));
}

double JointDistribution::marginal(const Feature& x) const {
  return prior() * (*density1())(x) + (1.0 - prior()) * (*density0())(x);
}

double JointDistribution::posterior(const Feature& x) const {
  const double q1 = (*density1())(x);
  const double m = prior() * q1 + (1.0 - prior()) * (*density0())(x);
  if (!(m > 0.0)) throw Error(ErrorKind::ZeroMarginalDensity, "marginal density vanishes at the query point");
  return prior() * q1 / m;
}

double JointDistribution::posterior_or_prior(const Feature& x) const {
  if (domain().is_grid()) {
    const auto index = domain().index_of(x);
    return index ? posterior_table()[*index] : prior();
  }
  const double q1 = (*density1())(x);
  const double m = prior() * q1 + (1.0 - prior()) * (*density0())(x);
  return m > 0.0 ? prior() * q1 / m : prior();
}

ScorePtr JointDistribution::posterior_score() const { return std::make_shared<PosteriorScore>(*this); }

std::vector<LabeledSample> JointDistribution::sample_labeled(std::int64_t count, std::uint64_t seed) const {
  require(count >= 1, ErrorKind::InvalidArgument, "sample count must be >= 1");
  Rng rng(seed);
  std::vector<LabeledSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const int label = bernoulli(rng, prior()) ? 1 : 0;
    out.push_back({(label == 1 ? density1() : density0())->sample(rng), label});
  }
  return out;
}

std::vector<UnlabeledSample> JointDistribution::sample_unlabeled(std::int64_t count, std::uint64_t seed) const {
  require(count >= 1, ErrorKind::InvalidArgument, "sample count must be >= 1");
  Rng rng(seed);
  std::vector<UnlabeledSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back({impl_->marginal->sample(rng)});
  return out;
}

Eigen::VectorXd PosteriorScore::on_nodes(const FeatureDomain& domain) const {
  if (domain == dist_.domain()) return dist_.posterior_table();
  return evaluate(domain.nodes());
}

// ---------------------------------------------------------------------------

double cdf_of_score(const JointDistribution& dist, const Eigen::VectorXd& scores, double t) {
  const Eigen::VectorXd mass = dist.marginal_mass();
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (scores[i] <= t) total += mass[i];
  return std::clamp(total, 0.0, 1.0);
}

double cdf_of_score(const JointDistribution& dist, const ScoreFunction& score, double t) {
  return cdf_of_score(dist, score.on_nodes(dist.domain()), t);
}

LevelSetSearch upper_level_set(const Eigen::VectorXd& scores, const Eigen::VectorXd& masses, double level,
                               DomainKind kind) {
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (masses[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

  LevelSetSearch result;
  double above = 0.0;
  std::size_t begin = 0;
  while (begin < order.size()) {
    const double leader = scores[order[begin]];
    std::size_t end = begin;
    double atom = 0.0;
    while (end < order.size() && leader - scores[order[end]] <= kTieTolerance) atom += masses[order[end++]];
    const double atom_score = scores[order[end - 1]];
    const double after = above + atom;
    const bool exact = std::abs(after - level) <= kMassTolerance;
    if (exact || after > level) {
      result.threshold = atom_score;
      result.mass_above = above;
      result.mass_at = atom;
      result.atom_size = static_cast<Eigen::Index>(end - begin);
      if (exact || (kind == DomainKind::ContinuousBox && result.atom_size == 1)) {
        result.found = true;
      } else {
        std::ostringstream msg;
        msg << "atom of mass " << atom << " at score " << atom_score << " straddles level " << level
            << " (mass strictly above: " << above << ")";
        result.reason = msg.str();
      }
      return result;
    }
    above = after;
    begin = end;
  }
  std::ostringstream msg;
  msg << "total mass " << above << " never reaches level " << level;
  result.reason = msg.str();
  return result;
}

AssumptionAResult check_assumption_A(const JointDistribution& source, const JointDistribution& target,
                                     double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  require(source.domain() == target.domain(), ErrorKind::InvalidArgument, "P and Q must share a domain");
  const auto search = upper_level_set(source.posterior_table(), target.marginal_mass(), alpha, target.domain().kind());
  return {search.found, search.threshold, search.reason};
}

AssumptionBResult check_assumption_B(const JointDistribution& source, const JointDistribution& target,
                                     double alpha, const std::vector<double>& probes) {
  require(probes.size() >= 2, ErrorKind::InvalidArgument, "need at least two probe offsets");
  AssumptionBResult result;
  const auto a = check_assumption_A(source, target, alpha);
  if (!a.holds) {
    result.reason = "assumption A fails: " + a.reason;
    return result;
  }
  const Eigen::VectorXd& scores = source.posterior_table();
  const double base = cdf_of_score(target, scores, a.threshold);

  std::vector<double> log_delta, log_up, log_down;
  for (double probe : probes) {
    const double delta = std::abs(probe);
    require(delta > 0.0, ErrorKind::InvalidArgument, "probe offsets must be nonzero");
    const double up = cdf_of_score(target, scores, a.threshold + delta) - base;
    const double down = base - cdf_of_score(target, scores, a.threshold - delta);
    if (!(up > 0.0) || !(down > 0.0)) {
      std::ostringstream msg;
      msg << "score CDF is flat on the " << (up > 0.0 ? "lower" : "upper") << " side at offset " << delta;
      result.reason = msg.str();
      return result;
    }
    log_delta.push_back(std::log(delta));
    log_up.push_back(std::log(up));
    log_down.push_back(std::log(down));
  }

  auto slope = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    const double mx = std::accumulate(log_delta.begin(), log_delta.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      sxy += (log_delta[i] - mx) * (y[i] - my);
      sxx += (log_delta[i] - mx) * (log_delta[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
  };
  result.kappa_upper = slope(log_up);
  result.kappa_lower = slope(log_down);
  result.kappa = std::max(result.kappa_upper, result.kappa_lower);

  result.b1 = std::numeric_limits<double>::infinity();
  result.b2 = 0.0;
  for (std::size_t i = 0; i < log_delta.size(); ++i) {
    for (double log_diff : {log_up[i], log_down[i]}) {
      const double ratio = std::exp(log_diff - result.kappa * log_delta[i]);
      result.b1 = std::min(result.b1, ratio);
      result.b2 = std::max(result.b2, ratio);
    }
  }
  result.holds = result.kappa > 0.0;
  if (!result.holds) result.reason = "nonpositive growth exponent";
  return result;
}

}  // namespace cdr
