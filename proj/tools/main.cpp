// smog: synthetic spherical-GMM benchmarks, moment-based estimation,
// ICA demo, and Monte Carlo tail-bound checks.
//
// Exit codes: 0 success, 2 usage/precondition, 3 numerical degeneracy, 4 IO.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <set>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smog/estimator.hpp"
#include "smog/ica.hpp"
#include "smog/io.hpp"
#include "smog/model.hpp"
#include "smog/multiview.hpp"
#include "smog/rng.hpp"
#include "smog/statcheck.hpp"

using nlohmann::json;
using namespace smog;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitIo = 4;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  std::uint64_t s = rng::entropy_seed();
  std::cerr << "seed " << s << "\n";
  return s;
}

void emit(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  out << body;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ParameterError("cannot parse number '" + cell + "'");
    }
  }
  return values;
}

// Columns separated by ';', entries by ','. Column i is mean i.
Matrix parse_means(const std::string& text, Index d, Index k) {
  Matrix means(d, k);
  std::stringstream ss(text);
  std::string col;
  Index i = 0;
  while (std::getline(ss, col, ';')) {
    if (i >= k) throw ParameterError("--means: more than k columns");
    std::vector<double> v = parse_csv_doubles(col);
    if (Index(v.size()) != d)
      throw ParameterError("--means: column length must equal d");
    for (Index a = 0; a < d; ++a) means(a, i) = v[a];
    ++i;
  }
  if (i != k) throw ParameterError("--means: expected k columns");
  return means;
}

struct ModelFlags {
  std::string model_path;
  Index d = 0;
  Index k = 0;
  double sigma = 1.0;
  std::string sigmas;
  std::string weights;
  std::string means;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--model", f.model_path, "Model JSON file (ground truth)");
  cmd->add_option("--d", f.d, "Ambient dimension");
  cmd->add_option("--k", f.k, "Number of components");
  cmd->add_option("--sigma", f.sigma,
                  "Common component standard deviation (default 1)");
  cmd->add_option("--sigmas", f.sigmas,
                  "Per-component standard deviations, comma separated");
  cmd->add_option("--weights", f.weights,
                  "Mixing weights, comma separated (default uniform)");
  cmd->add_option("--means", f.means,
                  "Explicit means: columns ';'-separated, entries ','");
}

MixtureModel resolve_model(const ModelFlags& f, std::uint64_t seed) {
  if (!f.model_path.empty()) return load_model_json(f.model_path);
  if (f.d < 1 || f.k < 1)
    throw ParameterError("either --model or both --d and --k are required");

  Matrix means;
  if (!f.means.empty()) {
    means = parse_means(f.means, f.d, f.k);
  } else {
    rng::Engine eng = rng::engine(rng::derive(seed, "model-means"));
    means.resize(f.d, f.k);
    for (Index i = 0; i < f.k; ++i) means.col(i) = rng::gaussian(eng, f.d);
  }

  Vector weights;
  if (!f.weights.empty()) {
    std::vector<double> v = parse_csv_doubles(f.weights);
    if (Index(v.size()) != f.k)
      throw ParameterError("--weights: expected k entries");
    weights = Eigen::Map<Vector>(v.data(), f.k);
  } else {
    weights = Vector::Constant(f.k, 1.0 / double(f.k));
  }

  Vector variances;
  if (!f.sigmas.empty()) {
    std::vector<double> v = parse_csv_doubles(f.sigmas);
    if (Index(v.size()) != f.k)
      throw ParameterError("--sigmas: expected k entries");
    variances.resize(f.k);
    for (Index i = 0; i < f.k; ++i) variances[i] = v[i] * v[i];
  } else {
    variances = Vector::Constant(f.k, f.sigma * f.sigma);
  }
  return make_mixture_model(std::move(means), std::move(weights),
                            std::move(variances));
}

SampleFormat parse_format(const std::string& name) {
  if (name == "csv") return SampleFormat::kCsv;
  if (name == "bin") return SampleFormat::kBinary;
  if (name == "auto") return SampleFormat::kAuto;
  throw ParameterError("--format must be csv, bin, or auto");
}

int worker_pool_size() {
  if (const char* env = std::getenv("SMOG_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const ModelFlags& mf, Index n,
                 const std::optional<std::uint64_t>& seed_flag,
                 const std::string& out, std::string model_out,
                 const std::string& format) {
  if (n < 1) throw ParameterError("--n must be at least 1");
  std::uint64_t seed = resolve_seed(seed_flag);
  MixtureModel model = resolve_model(mf, seed);
  ModelDiagnostics diag = validate_model(model);

  json jd;
  jd["rank_ok"] = diag.rank_ok;
  jd["sigma_k_M2"] = diag.sigma_k_M2;
  jd["w_min"] = diag.w_min;
  std::cout << jd.dump(2) << "\n";
  if (!diag.rank_ok) {
    std::cerr << "generate: model fails non-degeneracy, sigma_k[M2] = "
              << diag.sigma_k_M2 << "\n";
    return kExitUsage;
  }

  SampleSet data = sample(model, n, rng::derive(seed, "generate"));
  save_samples(data.data, out, parse_format(format));
  if (model_out.empty()) model_out = out + ".model.json";
  save_model_json(model, model_out);
  return 0;
}

// ---------------------------------------------------------------- estimate

EstimateReport run_estimate(const Matrix& data, Index k, double delta,
                            std::optional<int> trials, const std::string& mode,
                            std::uint64_t seed) {
  if (mode == "common") {
    SampleSet set;
    set.data = data;
    return learn_gmm_common(set, k, delta, seed, trials);
  }
  if (mode == "distinct-variance") {
    auto shared = std::make_shared<const Matrix>(data);
    return estimate_spherical_auto(spherical_from_samples(shared, k),
                                   rng::derive(seed, "estimate-exact"));
  }
  throw ParameterError("--mode must be common or distinct-variance");
}

int cmd_estimate(const std::string& data_path, Index k, double delta,
                 std::optional<int> trials, const std::string& mode,
                 const std::optional<std::uint64_t>& seed_flag,
                 const std::string& out) {
  if (k < 1) throw ParameterError("--k must be at least 1");
  std::uint64_t seed = resolve_seed(seed_flag);
  Matrix data = load_samples(data_path);
  EstimateReport rep =
      run_estimate(data, k, delta, trials, mode, rng::derive(seed, "estimate"));
  emit(estimate_to_json(rep), out);
  return 0;
}

// -------------------------------------------------------------------- eval

int cmd_eval(const std::string& estimate_path, const std::string& truth_path,
             const std::string& out) {
  EstimateReport rep = load_estimate_json(estimate_path);
  MixtureModel truth = load_model_json(truth_path);
  MatchScore score = match_and_score(rep.means_hat, truth);
  emit(score_to_json(score), out);
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepRow {
  Index n = 0;
  int seed_index = 0;
  double max_rel = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  std::string status = "ok";
};

std::string sweep_row_to_csv(const SweepRow& row) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << row.n << ',' << row.seed_index << ',';
  if (std::isnan(row.max_rel))
    os << "nan";
  else
    os << row.max_rel;
  os << ',' << row.wall_time_s << ',' << row.status << '\n';
  return os.str();
}

int cmd_sweep(const ModelFlags& mf, const std::string& n_grid_text, int seeds,
              double delta, const std::optional<std::uint64_t>& seed_flag,
              const std::string& out) {
  if (seeds < 1) throw ParameterError("--seeds must be at least 1");
  if (out.empty()) throw ParameterError("--out is required for sweep");
  std::vector<double> grid_values = parse_csv_doubles(n_grid_text);
  if (grid_values.empty()) throw ParameterError("--n-grid is empty");
  std::vector<Index> n_grid;
  for (double v : grid_values) {
    if (v < 2) throw ParameterError("--n-grid entries must be >= 2");
    n_grid.push_back(Index(v));
  }
  std::uint64_t seed = resolve_seed(seed_flag);
  MixtureModel model = resolve_model(mf, seed);
  Index k = model.k;

  // Resume support: collect already-completed (n, seed) cells.
  std::set<std::pair<Index, int>> done;
  bool have_file = false;
  {
    std::ifstream existing(out);
    if (existing && existing.peek() != std::ifstream::traits_type::eof()) {
      have_file = true;
      std::string line;
      std::getline(existing, line);  // header
      while (std::getline(existing, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string n_cell, seed_cell;
        if (std::getline(ss, n_cell, ',') && std::getline(ss, seed_cell, ','))
          done.insert({Index(std::stoll(n_cell)), std::stoi(seed_cell)});
      }
    }
  }

  struct Cell {
    Index n;
    int seed_index;
  };
  std::vector<Cell> cells;
  for (Index n : n_grid)
    for (int s = 0; s < seeds; ++s)
      if (!done.count({n, s})) cells.push_back({n, s});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      SweepRow row;
      row.n = cell.n;
      row.seed_index = cell.seed_index;
      std::uint64_t cell_tag =
          std::uint64_t(cell.n) * 1000003ULL + std::uint64_t(cell.seed_index);
      auto start = std::chrono::steady_clock::now();
      try {
        SampleSet data =
            sample(model, cell.n, rng::derive(seed, "sweep-data", cell_tag));
        EstimateReport rep = learn_gmm_common(
            data, k, delta, rng::derive(seed, "sweep-est", cell_tag));
        row.max_rel = match_and_score(rep.means_hat, model).max_rel;
      } catch (const DegeneracyError&) {
        row.status = "error:3";
      } catch (const std::exception&) {
        row.status = "error:1";
      }
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      rows[i] = std::move(row);
    }
  };
  int pool = std::min<int>(worker_pool_size(), int(cells.size()) > 0
                                                   ? int(cells.size())
                                                   : 1);
  std::vector<std::thread> threads;
  for (int t = 0; t < pool; ++t) threads.emplace_back(work);
  for (std::thread& t : threads) t.join();

  std::ofstream file(out, std::ios::app);
  if (!file) throw IoError("cannot open " + out + " for appending");
  if (!have_file) file << "n,seed,max_rel,wall_time_s,status\n";
  for (const SweepRow& row : rows) file << sweep_row_to_csv(row);
  file.close();

  // Fit log(median max_rel) against log(n) over all completed rows.
  std::map<Index, std::vector<double>> by_n;
  {
    std::ifstream all(out);
    std::string line;
    std::getline(all, line);
    while (std::getline(all, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string n_cell, seed_cell, rel_cell, wall_cell, status_cell;
      std::getline(ss, n_cell, ',');
      std::getline(ss, seed_cell, ',');
      std::getline(ss, rel_cell, ',');
      std::getline(ss, wall_cell, ',');
      std::getline(ss, status_cell, ',');
      if (status_cell == "ok")
        by_n[Index(std::stoll(n_cell))].push_back(std::stod(rel_cell));
    }
  }
  json summary;
  summary["cells_completed"] = rows.size();
  json medians = json::array();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int pts = 0;
  for (auto& [n, values] : by_n) {
    std::sort(values.begin(), values.end());
    double median = values[values.size() / 2];
    if (values.size() % 2 == 0)
      median = 0.5 * (median + values[values.size() / 2 - 1]);
    medians.push_back({{"n", n}, {"median_max_rel", median}});
    if (median > 0) {
      double x = std::log(double(n)), y = std::log(median);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++pts;
    }
  }
  summary["medians"] = std::move(medians);
  if (pts >= 2) {
    double denom = double(pts) * sxx - sx * sx;
    summary["log_log_slope"] = (double(pts) * sxy - sx * sy) / denom;
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- ica-demo

int cmd_ica_demo(Index k, Index n, double noise_sigma,
                 const std::optional<std::uint64_t>& seed_flag,
                 const std::string& out) {
  if (k < 1) throw ParameterError("--k must be at least 1");
  if (n < 2) throw ParameterError("--n must be at least 2");
  std::uint64_t seed = resolve_seed(seed_flag);

  Matrix mixing = random_rotation(k, rng::derive(seed, "ica-mixing"));
  rng::Engine eng = rng::engine(rng::derive(seed, "ica-sources"));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix data(n, k);
  for (Index j = 0; j < n; ++j) {
    Vector h(k);
    for (Index i = 0; i < k; ++i) h[i] = coin(eng) < 0.5 ? -1.0 : 1.0;
    Vector x = mixing * h;
    if (noise_sigma > 0)
      for (Index i = 0; i < k; ++i) x[i] += noise_sigma * normal(eng);
    else
      for (Index i = 0; i < k; ++i) normal(eng);  // keep the stream aligned
    data.row(j) = x.transpose();
  }

  IcaEstimate est = ica_estimate(data, rng::derive(seed, "ica-est"));

  // Greedy match by absolute inner product (both sides unit columns).
  std::vector<bool> used(k, false);
  Vector angular(k);
  for (Index i = 0; i < k; ++i) {
    int best = -1;
    double best_dot = -1.0;
    for (Index j = 0; j < k; ++j) {
      if (used[j]) continue;
      double dot = std::abs(est.columns.col(j).dot(mixing.col(i)));
      if (dot > best_dot) {
        best_dot = dot;
        best = int(j);
      }
    }
    used[best] = true;
    angular[i] = std::acos(std::min(1.0, best_dot));
  }

  json j;
  j["k"] = k;
  j["n"] = n;
  j["attempts"] = est.attempts;
  j["eigenvalues"] = std::vector<double>(est.eigenvalues.data(),
                                         est.eigenvalues.data() + k);
  json cols = json::array();
  for (Index i = 0; i < k; ++i) {
    json col = json::array();
    for (Index a = 0; a < k; ++a) col.push_back(est.columns(a, i));
    cols.push_back(std::move(col));
  }
  j["columns"] = std::move(cols);
  j["angular_errors"] =
      std::vector<double>(angular.data(), angular.data() + k);
  j["max_angular_error"] = angular.maxCoeff();
  emit(j.dump(2) + "\n", out);
  return 0;
}

// --------------------------------------------------------------- statcheck

json tail_to_json(const TailCheckResult& r) {
  json j;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  j["bound_delta"] = r.bound_delta;
  j["violation_rate"] = r.violation_rate;
  j["threshold"] = r.threshold;
  j["vacuous_threshold"] = r.vacuous_threshold;
  j["within_bound"] = r.violation_rate <= r.bound_delta;
  return j;
}

int cmd_statcheck(const std::string& which, int m, int p, double delta,
                  long trials, const std::optional<std::uint64_t>& seed_flag,
                  const std::string& out) {
  std::uint64_t seed = resolve_seed(seed_flag);
  TailCheckResult r;
  if (which == "chi2") {
    r = mc_tail_chi2(m, delta, trials, rng::derive(seed, "statcheck-chi2"));
  } else if (which == "cubes") {
    r = mc_tail_cubes(m, delta, trials, rng::derive(seed, "statcheck-cubes"));
  } else if (which == "anticonc") {
    if (p < 1) throw ParameterError("--p must be at least 1");
    Matrix x = Matrix::Identity(p, p);
    std::vector<Vector> q;
    for (int i = 0; i < p; ++i) q.push_back(Vector::Unit(p, i));
    r = mc_anticoncentration(x, q, delta, trials,
                             rng::derive(seed, "statcheck-anticonc"));
  } else {
    throw ParameterError("statcheck subcommand must be chi2, cubes, or "
                         "anticonc");
  }
  emit(tail_to_json(r).dump(2) + "\n", out);
  return 0;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Moment-based estimation for spherical Gaussian mixtures"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a synthetic data set");
  ModelFlags gen_model;
  add_model_flags(gen, gen_model);
  Index gen_n = 0;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out = "samples.csv", gen_model_out, gen_format = "auto";
  gen->add_option("--n", gen_n, "Number of samples")->required();
  gen->add_option("--seed", gen_seed, "Root seed (drawn from entropy if absent)");
  gen->add_option("--out", gen_out, "Sample file path");
  gen->add_option("--model-out", gen_model_out,
                  "Ground-truth model path (default <out>.model.json)");
  gen->add_option("--format", gen_format, "csv | bin | auto");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate mixture parameters");
  std::string est_data, est_mode = "common", est_out;
  Index est_k = 0;
  double est_delta = 0.01;
  std::optional<int> est_trials;
  std::optional<std::uint64_t> est_seed;
  est->add_option("--data", est_data, "Sample file")->required();
  est->add_option("--k", est_k, "Number of components")->required();
  est->add_option("--delta", est_delta, "Failure probability (default 0.01)");
  est->add_option("--trials", est_trials,
                  "Override the ceil(log2(1/delta)) trial count");
  est->add_option("--mode", est_mode, "common | distinct-variance");
  est->add_option("--seed", est_seed, "Root seed");
  est->add_option("--out", est_out, "Estimate JSON path (default stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Score an estimate against truth");
  std::string ev_est, ev_truth, ev_out;
  ev->add_option("--estimate", ev_est, "Estimate JSON")->required();
  ev->add_option("--truth", ev_truth, "Truth model JSON")->required();
  ev->add_option("--out", ev_out, "Score JSON path (default stdout)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Convergence sweep over n");
  ModelFlags sw_model;
  add_model_flags(sw, sw_model);
  std::string sw_grid, sw_out;
  int sw_seeds = 20;
  double sw_delta = 0.01;
  std::optional<std::uint64_t> sw_seed;
  sw->add_option("--n-grid", sw_grid, "Comma-separated sample sizes")
      ->required();
  sw->add_option("--seeds", sw_seeds, "Seeds per grid point (default 20)");
  sw->add_option("--delta", sw_delta, "Failure probability per estimate");
  sw->add_option("--seed", sw_seed, "Root seed");
  sw->add_option("--out", sw_out, "CSV output path")->required();

  // ica-demo
  auto* ica = app.add_subcommand("ica-demo",
                                 "Rademacher-source ICA recovery demo");
  Index ica_k = 3, ica_n = 100000;
  double ica_noise = 0.0;
  std::optional<std::uint64_t> ica_seed;
  std::string ica_out;
  ica->add_option("--k", ica_k, "Source dimension");
  ica->add_option("--n", ica_n, "Number of samples");
  ica->add_option("--noise-sigma", ica_noise,
                  "Additive Gaussian noise standard deviation");
  ica->add_option("--seed", ica_seed, "Root seed");
  ica->add_option("--out", ica_out, "JSON output path (default stdout)");

  // statcheck
  auto* sc = app.add_subcommand("statcheck", "Monte Carlo tail-bound checks");
  sc->require_subcommand(1);
  int sc_m = 10, sc_p = 2;
  double sc_delta = 0.01;
  long sc_trials = 10000;
  std::optional<std::uint64_t> sc_seed;
  std::string sc_out, sc_which;
  for (const char* name : {"chi2", "cubes", "anticonc"}) {
    auto* sub = sc->add_subcommand(name);
    sub->add_option("--m", sc_m, "Number of summands");
    sub->add_option("--p", sc_p, "Ambient dimension (anticonc)");
    sub->add_option("--delta", sc_delta, "Tail probability");
    sub->add_option("--trials", sc_trials, "Monte Carlo trials");
    sub->add_option("--seed", sc_seed, "Root seed");
    sub->add_option("--out", sc_out, "JSON output path (default stdout)");
    sub->callback([&sc_which, name]() { sc_which = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_model, gen_n, gen_seed, gen_out, gen_model_out,
                          gen_format);
    if (est->parsed())
      return cmd_estimate(est_data, est_k, est_delta, est_trials, est_mode,
                          est_seed, est_out);
    if (ev->parsed()) return cmd_eval(ev_est, ev_truth, ev_out);
    if (sw->parsed())
      return cmd_sweep(sw_model, sw_grid, sw_seeds, sw_delta, sw_seed, sw_out);
    if (ica->parsed())
      return cmd_ica_demo(ica_k, ica_n, ica_noise, ica_seed, ica_out);
    if (sc->parsed())
      return cmd_statcheck(sc_which, sc_m, sc_p, sc_delta, sc_trials, sc_seed,
                           sc_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const EtaCollisionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IllConditionedTrialError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const KurtosisDegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  } catch (...) {
    std::cerr << "internal error\n";
    return 1;
  }
}
