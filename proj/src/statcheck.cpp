#include "smog/statcheck.hpp"

#include <cmath>
#include <limits>

#include "smog/rng.hpp"

namespace smog {

namespace {

void check_common(int m, double delta, long trials) {
  if (m < 1) throw ParameterError("statcheck: m must be at least 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("statcheck: delta must lie in (0,1)");
  if (trials < 100)
    throw ParameterError("statcheck: need at least 100 trials");
}

TailCheckResult finish(long trials, long violations, double delta,
                       double threshold) {
  TailCheckResult r;
  r.trials = trials;
  r.violations = violations;
  r.bound_delta = delta;
  r.violation_rate = double(violations) / double(trials);
  r.threshold = threshold;
  r.vacuous_threshold = threshold == 0.0;
  return r;
}

}  // namespace

TailCheckResult mc_tail_chi2(int m, double delta, long trials,
                             std::uint64_t seed) {
  check_common(m, delta, trials);
  const double log_inv = std::log(1.0 / delta);
  const double threshold = m + 2.0 * std::sqrt(m * log_inv) + 2.0 * log_inv;
  long violations = 0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (long t = 0; t < trials; ++t) {
    rng::Engine eng = rng::engine(rng::derive(seed, "chi2", t));
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      double z = normal(eng);
      sum += z * z;
    }
    if (sum > threshold) ++violations;
  }
  return finish(trials, violations, delta, threshold);
}

TailCheckResult mc_tail_cubes(int m, double delta, long trials,
                              std::uint64_t seed) {
  check_common(m, delta, trials);
  const double e3 = std::exp(3.0);
  const double lceil = std::ceil(std::log(1.0 / delta));
  const double threshold = std::sqrt(27.0 * e3 * m * lceil * lceil * lceil);
  long violations = 0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (long t = 0; t < trials; ++t) {
    rng::Engine eng = rng::engine(rng::derive(seed, "cubes", t));
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      double z = normal(eng);
      sum += z * z * z;
    }
    if (std::abs(sum) > threshold) ++violations;
  }
  return finish(trials, violations, delta, threshold);
}

TailCheckResult mc_anticoncentration(const Matrix& x,
                                     const std::vector<Vector>& q,
                                     double delta, long trials,
                                     std::uint64_t seed) {
  if (x.rows() != x.cols())
    throw ParameterError("mc_anticoncentration: X must be square");
  if (q.empty()) throw ParameterError("mc_anticoncentration: Q is empty");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("statcheck: delta must lie in (0,1)");
  if (trials < 100)
    throw ParameterError("statcheck: need at least 100 trials");
  const Index p = x.rows();

  double min_norm = std::numeric_limits<double>::infinity();
  std::vector<Vector> xq;
  xq.reserve(q.size());
  for (const Vector& v : q) {
    if (v.size() != p)
      throw ParameterError("mc_anticoncentration: Q vector dimension");
    xq.push_back(x * v);
    min_norm = std::min(min_norm, xq.back().norm());
  }
  const double threshold =
      min_norm * delta / (std::sqrt(std::exp(1.0) * double(p)) * double(q.size()));

  long violations = 0;
  for (long t = 0; t < trials; ++t) {
    rng::Engine eng = rng::engine(rng::derive(seed, "anticonc", t));
    Vector theta = rng::unit_sphere(eng, p);
    double min_proj = std::numeric_limits<double>::infinity();
    for (const Vector& v : xq)
      min_proj = std::min(min_proj, std::abs(theta.dot(v)));
    if (min_proj <= threshold) ++violations;
  }
  return finish(trials, violations, delta, threshold);
}

}  // namespace smog
