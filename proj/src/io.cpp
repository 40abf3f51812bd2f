#include "smog/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace smog {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'M', 'O', 'G'};
constexpr Index kBinaryCutover = 100000;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  if (!out) throw IoError("write failed on " + path);
}

}  // namespace

MixtureModel load_model_json(const std::string& path) {
  json j = load_json_file(path);
  try {
    Index d = j.at("d").get<Index>();
    Index k = j.at("k").get<Index>();
    const json& jw = j.at("weights");
    const json& jm = j.at("means");
    const json& jv = j.at("variances");
    if (Index(jw.size()) != k || Index(jm.size()) != k ||
        Index(jv.size()) != k)
      throw ParameterError("model JSON: weights/means/variances must have k "
                           "entries");
    Vector w(k), var(k);
    Matrix means(d, k);
    for (Index i = 0; i < k; ++i) {
      w[i] = jw.at(i).get<double>();
      var[i] = jv.at(i).get<double>();
      const json& col = jm.at(i);
      if (Index(col.size()) != d)
        throw ParameterError("model JSON: mean column length != d");
      for (Index a = 0; a < d; ++a) means(a, i) = col.at(a).get<double>();
    }
    return make_mixture_model(std::move(means), std::move(w), std::move(var));
  } catch (const json::exception& e) {
    throw IoError("malformed model JSON " + path + ": " + e.what());
  }
}

void save_model_json(const MixtureModel& m, const std::string& path) {
  json j;
  j["d"] = m.d;
  j["k"] = m.k;
  j["weights"] = std::vector<double>(m.weights.data(),
                                     m.weights.data() + m.k);
  json cols = json::array();
  for (Index i = 0; i < m.k; ++i) {
    json col = json::array();
    for (Index a = 0; a < m.d; ++a) col.push_back(m.means(a, i));
    cols.push_back(std::move(col));
  }
  j["means"] = std::move(cols);
  j["variances"] = std::vector<double>(m.variances.data(),
                                       m.variances.data() + m.k);
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

void save_samples_csv(const Matrix& data, const std::string& path) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  for (Index a = 0; a < data.cols(); ++a)
    os << (a ? "," : "") << 'x' << a;
  os << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index a = 0; a < data.cols(); ++a) {
      if (a) os << ',';
      os << data(r, a);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

void save_samples_binary(const Matrix& data, const std::string& path) {
  if (data.rows() > Index(UINT32_MAX) || data.cols() > Index(UINT32_MAX))
    throw IoError("binary sample format caps n and d at 2^32 - 1");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  std::uint32_t n = std::uint32_t(data.rows());
  std::uint32_t d = std::uint32_t(data.cols());
  std::uint32_t reserved = 0;
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  std::vector<double> row(d);
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index a = 0; a < data.cols(); ++a) row[a] = data(r, a);
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(sizeof(double) * d));
  }
  if (!out) throw IoError("write failed on " + path);
}

Matrix load_samples_csv(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty sample file " + path);
  Index d = Index(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> values;
  Index n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Index got = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++got;
    }
    if (got != d) throw IoError("ragged CSV row in " + path);
    ++n;
  }
  Matrix out(n, d);
  for (Index r = 0; r < n; ++r)
    for (Index a = 0; a < d; ++a) out(r, a) = values[r * d + a];
  return out;
}

}  // namespace

void save_samples(const Matrix& data, const std::string& path,
                  SampleFormat format) {
  if (format == SampleFormat::kAuto)
    format = data.rows() > kBinaryCutover ? SampleFormat::kBinary
                                          : SampleFormat::kCsv;
  if (format == SampleFormat::kCsv)
    save_samples_csv(data, path);
  else
    save_samples_binary(data, path);
}

Matrix load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
    std::uint32_t n = 0, d = 0, reserved = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&reserved), 4);
    if (!in || d == 0) throw IoError("corrupt binary header in " + path);
    const Index rows = Index(n), cols = Index(d);
    Matrix out(rows, cols);
    std::vector<double> row(d);
    for (std::uint32_t r = 0; r < n; ++r) {
      in.read(reinterpret_cast<char*>(row.data()),
              std::streamsize(sizeof(double) * d));
      if (!in) throw IoError("truncated binary sample file " + path);
      for (std::uint32_t a = 0; a < d; ++a) out(r, a) = row[a];
    }
    return out;
  }
  in.close();
  std::ifstream text(path);
  if (!text) throw IoError("cannot open " + path);
  return load_samples_csv(text, path);
}

namespace {

json report_to_json_obj(const EstimateReport& rep) {
  json j;
  const Index d = rep.means_hat.rows();
  const Index k = rep.means_hat.cols();
  j["d"] = d;
  j["k"] = k;
  json cols = json::array();
  for (Index i = 0; i < k; ++i) {
    json col = json::array();
    for (Index a = 0; a < d; ++a) col.push_back(rep.means_hat(a, i));
    cols.push_back(std::move(col));
  }
  j["means"] = std::move(cols);
  j["weights"] = std::vector<double>(rep.weights_hat.data(),
                                     rep.weights_hat.data() + k);
  j["sigma2"] = rep.sigma2_hat;
  if (rep.sigma2_per_component.size() > 0)
    j["sigma2_per_component"] = std::vector<double>(
        rep.sigma2_per_component.data(),
        rep.sigma2_per_component.data() + rep.sigma2_per_component.size());
  json diag;
  diag["sigma_k_M2_hat"] = rep.diag.sigma_k_m2_hat;
  diag["gamma"] = rep.diag.gamma;
  diag["n_used"] = rep.diag.n_used;
  diag["trial_gaps"] = rep.diag.trial_gaps;
  diag["chosen_trial"] = rep.diag.chosen_trial;
  diag["eta_attempts"] = rep.diag.eta_attempts;
  diag["negative_variance_components"] =
      rep.diag.negative_variance_components;
  j["diagnostics"] = std::move(diag);
  return j;
}

}  // namespace

std::string estimate_to_json(const EstimateReport& rep) {
  return report_to_json_obj(rep).dump(2) + "\n";
}

void save_estimate_json(const EstimateReport& rep, const std::string& path) {
  write_text_file(path, estimate_to_json(rep));
}

EstimateReport load_estimate_json(const std::string& path) {
  json j = load_json_file(path);
  try {
    Index d = j.at("d").get<Index>();
    Index k = j.at("k").get<Index>();
    EstimateReport rep;
    rep.means_hat.resize(d, k);
    const json& jm = j.at("means");
    for (Index i = 0; i < k; ++i)
      for (Index a = 0; a < d; ++a)
        rep.means_hat(a, i) = jm.at(i).at(a).get<double>();
    const json& jw = j.at("weights");
    rep.weights_hat.resize(k);
    for (Index i = 0; i < k; ++i) rep.weights_hat[i] = jw.at(i).get<double>();
    rep.sigma2_hat = j.at("sigma2").get<double>();
    if (j.contains("sigma2_per_component")) {
      const json& jv = j.at("sigma2_per_component");
      rep.sigma2_per_component.resize(jv.size());
      for (std::size_t i = 0; i < jv.size(); ++i)
        rep.sigma2_per_component[Index(i)] = jv.at(i).get<double>();
    }
    if (j.contains("diagnostics")) {
      const json& diag = j.at("diagnostics");
      rep.diag.sigma_k_m2_hat = diag.value("sigma_k_M2_hat", 0.0);
      rep.diag.gamma = diag.value("gamma", 0.0);
      rep.diag.n_used = diag.value("n_used", Index(0));
      rep.diag.chosen_trial = diag.value("chosen_trial", -1);
      rep.diag.eta_attempts = diag.value("eta_attempts", 0);
      if (diag.contains("trial_gaps"))
        rep.diag.trial_gaps = diag.at("trial_gaps").get<std::vector<double>>();
      if (diag.contains("negative_variance_components"))
        rep.diag.negative_variance_components =
            diag.at("negative_variance_components").get<std::vector<int>>();
    }
    return rep;
  } catch (const json::exception& e) {
    throw IoError("malformed estimate JSON " + path + ": " + e.what());
  }
}

std::string score_to_json(const MatchScore& score) {
  json j;
  j["permutation"] = score.permutation;
  j["per_component_l2"] = std::vector<double>(
      score.per_component_l2.data(),
      score.per_component_l2.data() + score.per_component_l2.size());
  j["max_rel"] = score.max_rel;
  return j.dump(2) + "\n";
}

}  // namespace smog
