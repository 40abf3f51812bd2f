// Python bindings for the main estimation, ICA, multiview, and tail-check
// operations. Arrays cross the boundary as NumPy <-> Eigen copies.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "smog/estimator.hpp"
#include "smog/ica.hpp"
#include "smog/linalg.hpp"
#include "smog/model.hpp"
#include "smog/moments.hpp"
#include "smog/multiview.hpp"
#include "smog/statcheck.hpp"

namespace py = pybind11;
using namespace smog;

namespace {

MixtureModel model_from_args(const Matrix& means, const Vector& weights,
                             const Vector& variances) {
  return make_mixture_model(means, weights, variances);
}

py::dict report_to_dict(const EstimateReport& rep) {
  py::dict d;
  d["means"] = rep.means_hat;
  d["weights"] = rep.weights_hat;
  d["sigma2"] = rep.sigma2_hat;
  if (rep.sigma2_per_component.size() > 0)
    d["sigma2_per_component"] = rep.sigma2_per_component;
  py::dict diag;
  diag["sigma_k_M2_hat"] = rep.diag.sigma_k_m2_hat;
  diag["gamma"] = rep.diag.gamma;
  diag["n_used"] = rep.diag.n_used;
  diag["trial_gaps"] = rep.diag.trial_gaps;
  diag["chosen_trial"] = rep.diag.chosen_trial;
  diag["eta_attempts"] = rep.diag.eta_attempts;
  diag["negative_variance_components"] =
      rep.diag.negative_variance_components;
  d["diagnostics"] = diag;
  return d;
}

py::dict tail_to_dict(const TailCheckResult& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["violations"] = r.violations;
  d["bound_delta"] = r.bound_delta;
  d["violation_rate"] = r.violation_rate;
  d["threshold"] = r.threshold;
  d["vacuous_threshold"] = r.vacuous_threshold;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moment-based estimators for spherical Gaussian mixtures";

  py::register_exception<ParameterError>(m, "ParameterError",
                                         PyExc_ValueError);
  py::register_exception<DegeneracyError>(m, "DegeneracyError",
                                          PyExc_RuntimeError);
  py::register_exception<EtaCollisionError>(m, "EtaCollisionError",
                                            PyExc_RuntimeError);
  py::register_exception<KurtosisDegeneracyError>(m, "KurtosisDegeneracyError",
                                                  PyExc_RuntimeError);

  // linear algebra primitives
  m.def(
      "sym_eig",
      [](const Matrix& mat) {
        SymEigResult r = sym_eig(mat);
        return py::make_tuple(r.eigenvalues, r.eigenvectors);
      },
      py::arg("matrix"),
      "Symmetric eigendecomposition; (eigenvalues non-increasing, "
      "orthonormal eigenvector columns)");
  m.def("rank_k_approx", &rank_k_approx, py::arg("matrix"), py::arg("k"));
  m.def("pseudo_inverse", &pseudo_inverse, py::arg("matrix"),
        py::arg("rel_tol") = 1e-10);

  // model and sampling
  m.def(
      "validate_model",
      [](const Matrix& means, const Vector& weights, const Vector& variances) {
        ModelDiagnostics diag =
            validate_model(model_from_args(means, weights, variances));
        py::dict d;
        d["rank_ok"] = diag.rank_ok;
        d["sigma_k_M2"] = diag.sigma_k_M2;
        d["w_min"] = diag.w_min;
        return d;
      },
      py::arg("means"), py::arg("weights"), py::arg("variances"));
  m.def(
      "sample",
      [](const Matrix& means, const Vector& weights, const Vector& variances,
         Index n, std::uint64_t seed) {
        return sample(model_from_args(means, weights, variances), n, seed)
            .data;
      },
      py::arg("means"), py::arg("weights"), py::arg("variances"),
      py::arg("n"), py::arg("seed"),
      "Draw n rows from the mixture; deterministic given seed");
  m.def(
      "population_moments",
      [](const Matrix& means, const Vector& weights, const Vector& variances) {
        PopulationMoments pm =
            population_moments(model_from_args(means, weights, variances));
        py::dict d;
        d["mean"] = pm.mean;
        d["m1"] = pm.m1;
        d["m2"] = pm.m2;
        d["sigma_bar2"] = pm.sigma_bar2;
        return d;
      },
      py::arg("means"), py::arg("weights"), py::arg("variances"));

  // moment summaries
  m.def(
      "summarize",
      [](const Matrix& data, Index k) {
        MomentSummary s = summarize(data, k);
        py::dict d;
        d["mu_hat"] = s.mu_hat;
        d["raw2"] = s.raw2;
        d["sigma2_hat"] = s.sigma2_hat;
        d["n"] = s.n;
        return d;
      },
      py::arg("data"), py::arg("k"));

  // estimators
  m.def("gamma_threshold", &gamma_threshold, py::arg("k"), py::arg("w_max"));
  m.def(
      "learn_gmm",
      [](const Matrix& data, Index k, double delta, std::uint64_t seed,
         std::optional<int> trials) {
        SampleSet set;
        set.data = data;
        return report_to_dict(learn_gmm_common(set, k, delta, seed, trials));
      },
      py::arg("data"), py::arg("k"), py::arg("delta") = 0.01,
      py::arg("seed") = 0, py::arg("trials") = py::none(),
      "Split-sample whitened spectral estimator for a common spherical "
      "covariance");
  m.def(
      "learn_gmm_exact",
      [](const Matrix& means, const Vector& weights, const Vector& variances,
         double delta, std::uint64_t seed) {
        PopulationMoments pm =
            population_moments(model_from_args(means, weights, variances));
        Index k = means.cols();
        return report_to_dict(learn_gmm_from_moments(pm, k, delta, seed));
      },
      py::arg("means"), py::arg("weights"), py::arg("variances"),
      py::arg("delta") = 0.01, py::arg("seed") = 0,
      "Whitened pipeline driven by exact population moments (oracle)");
  m.def(
      "estimate_spherical",
      [](const Matrix& data, Index k, std::uint64_t seed) {
        auto shared = std::make_shared<const Matrix>(data);
        return report_to_dict(
            estimate_spherical_auto(spherical_from_samples(shared, k), seed));
      },
      py::arg("data"), py::arg("k"), py::arg("seed") = 0,
      "Plug-in spectral estimator with per-component variances");
  m.def(
      "estimate_spherical_exact",
      [](const Matrix& means, const Vector& weights, const Vector& variances,
         std::uint64_t seed) {
        PopulationMoments pm =
            population_moments(model_from_args(means, weights, variances));
        return report_to_dict(
            estimate_spherical_auto(spherical_from_population(pm), seed));
      },
      py::arg("means"), py::arg("weights"), py::arg("variances"),
      py::arg("seed") = 0, "Exact-moment estimator on population moments");
  m.def(
      "match_and_score",
      [](const Matrix& means_hat, const Matrix& true_means,
         const Vector& true_weights) {
        MixtureModel truth = make_mixture_model(
            true_means, true_weights, Vector::Zero(true_means.cols()));
        MatchScore s = match_and_score(means_hat, truth);
        py::dict d;
        d["permutation"] = s.permutation;
        d["per_component_l2"] = s.per_component_l2;
        d["max_rel"] = s.max_rel;
        return d;
      },
      py::arg("means_hat"), py::arg("true_means"), py::arg("true_weights"));

  // ICA
  m.def(
      "cumulant_hessian",
      [](const Matrix& data, const Vector& eta) {
        return cumulant_hessian(data, eta).h;
      },
      py::arg("data"), py::arg("eta"));
  m.def(
      "ica_estimate",
      [](const Matrix& data, std::uint64_t seed) {
        IcaEstimate est = ica_estimate(data, seed);
        py::dict d;
        d["columns"] = est.columns;
        d["eigenvalues"] = est.eigenvalues;
        d["attempts"] = est.attempts;
        return d;
      },
      py::arg("data"), py::arg("seed") = 0);

  // multiview utilities
  m.def("coherence", &coherence, py::arg("matrix"));
  m.def("random_rotation", &random_rotation, py::arg("d"), py::arg("seed"));
  m.def(
      "partition_and_check",
      [](const Matrix& a, std::uint64_t seed) {
        PartitionCheck pc = partition_and_check(a, seed);
        py::dict d;
        d["groups"] = pc.partition.groups;
        d["sigma_k_per_group"] = pc.sigma_k_per_group;
        d["all_full_rank"] = pc.all_full_rank;
        return d;
      },
      py::arg("matrix"), py::arg("seed"));

  // Monte Carlo tail checks
  m.def(
      "mc_tail_chi2",
      [](int mm, double delta, long trials, std::uint64_t seed) {
        return tail_to_dict(mc_tail_chi2(mm, delta, trials, seed));
      },
      py::arg("m"), py::arg("delta"), py::arg("trials") = 10000,
      py::arg("seed") = 0);
  m.def(
      "mc_tail_cubes",
      [](int mm, double delta, long trials, std::uint64_t seed) {
        return tail_to_dict(mc_tail_cubes(mm, delta, trials, seed));
      },
      py::arg("m"), py::arg("delta"), py::arg("trials") = 10000,
      py::arg("seed") = 0);
  m.def(
      "mc_anticoncentration",
      [](const Matrix& x, const std::vector<Vector>& q, double delta,
         long trials, std::uint64_t seed) {
        return tail_to_dict(mc_anticoncentration(x, q, delta, trials, seed));
      },
      py::arg("x"), py::arg("q"), py::arg("delta"), py::arg("trials") = 10000,
      py::arg("seed") = 0);
}
