#include "gpbold/paradigm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gpbold/stats.hpp"

namespace gpbold {

using nlohmann::json;

void Paradigm::validate() const {
  if (stimuli.empty()) throw ParameterError("paradigm: needs at least one stimulus type");
  if (tr <= 0.0) throw ParameterError("paradigm: tr must be positive");
  if (n_time < 1) throw ParameterError("paradigm: n_time must be >= 1");
  if (presample < 0) throw ParameterError("paradigm: presample must be >= 0");
  const double window = n_time * tr;
  for (const auto& events : stimuli) {
    for (const auto& e : events) {
      if (e.onset < 0.0) throw ParameterError("paradigm: onset must be >= 0");
      if (e.duration < 0.0) throw ParameterError("paradigm: duration must be >= 0");
      if (e.onset + e.duration > window + 1e-9)
        throw ParameterError("paradigm: event extends past n_time * tr");
    }
  }
}

Vector Paradigm::time_grid() const {
  Vector t(n_points());
  for (int i = 0; i < n_points(); ++i) t[i] = (first_index() + i) * tr;
  return t;
}

double Paradigm::indicator_at(int m, int sample_index) const {
  const double t = sample_index * tr;
  double total = 0.0;
  for (const auto& e : stimuli.at(m)) {
    if (e.duration <= 0.0) {
      // impulse: hits the sample whose time matches the onset
      if (std::abs(t - e.onset) < 0.5 * tr) total += 1.0;
    } else if (t >= e.onset - 1e-12 && t < e.onset + e.duration - 1e-12) {
      total += 1.0;
    }
  }
  return total;
}

Vector Paradigm::indicator(int m) const {
  Vector s(n_points());
  for (int i = 0; i < n_points(); ++i) s[i] = indicator_at(m, first_index() + i);
  return s;
}

Paradigm Paradigm::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("paradigm json: ") + e.what());
  }
  Paradigm p;
  p.tr = doc.at("tr").get<double>();
  p.n_time = doc.at("n_time").get<int>();
  p.presample = doc.value("presample", 0);
  for (const auto& events : doc.at("stimuli")) {
    std::vector<StimulusEvent> list;
    for (const auto& e : events)
      list.push_back({e.at("onset").get<double>(), e.at("duration").get<double>()});
    p.stimuli.push_back(std::move(list));
  }
  p.validate();
  return p;
}

Paradigm Paradigm::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("paradigm json: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Paradigm::to_json_text() const {
  json doc;
  doc["tr"] = tr;
  doc["n_time"] = n_time;
  doc["presample"] = presample;
  json stim = json::array();
  for (const auto& events : stimuli) {
    json list = json::array();
    for (const auto& e : events) list.push_back({{"onset", e.onset}, {"duration", e.duration}});
    stim.push_back(list);
  }
  doc["stimuli"] = stim;
  return doc.dump(2);
}

void HrfParams::validate() const {
  if (peak_dispersion <= 0.0 || undershoot_dispersion <= 0.0)
    throw ParameterError("hrf: dispersions must be positive");
  if (kernel_length <= 0.0) throw ParameterError("hrf: kernel_length must be positive");
}

namespace {

double gamma_pdf(double t, double shape, double scale) {
  if (t <= 0.0) return 0.0;
  return std::exp((shape - 1.0) * std::log(t) - t / scale - std::lgamma(shape) -
                  shape * std::log(scale));
}

}  // namespace

double double_gamma(double t, const HrfParams& params) {
  params.validate();
  if (!std::isfinite(t)) throw ParameterError("double_gamma: t must be finite");
  if (t <= 0.0) return 0.0;
  const double peak = gamma_pdf(t, params.peak_delay / params.peak_dispersion,
                                params.peak_dispersion);
  const double undershoot = gamma_pdf(t, params.undershoot_delay / params.undershoot_dispersion,
                                      params.undershoot_dispersion);
  return peak - params.undershoot_ratio * undershoot;
}

Vector sample_hrf(const HrfParams& params, double tr) {
  params.validate();
  if (tr <= 0.0) throw ParameterError("sample_hrf: tr must be positive");
  const int n_taps = static_cast<int>(std::floor(params.kernel_length / tr)) + 1;
  Vector h(n_taps);
  for (int i = 0; i < n_taps; ++i) h[i] = double_gamma(i * tr, params);
  return h;
}

MeanFunction build_mean_function(const Paradigm& paradigm, const HrfParams& params,
                                 bool standardize) {
  paradigm.validate();
  const Vector hrf = sample_hrf(params, paradigm.tr);
  const int n = paradigm.n_points();
  const int m_count = paradigm.n_stimuli();

  MeanFunction out;
  out.values.resize(n, m_count);
  for (int m = 0; m < m_count; ++m) {
    for (int i = 0; i < n; ++i) {
      const int idx = paradigm.first_index() + i;
      double acc = 0.0;
      for (int k = 0; k < hrf.size(); ++k) acc += hrf[k] * paradigm.indicator_at(m, idx - k);
      out.values(i, m) = acc;
    }
  }
  if (standardize) {
    for (int m = 0; m < m_count; ++m) {
      try {
        out.values.col(m) = standardized(out.values.col(m));
      } catch (const NumericalError&) {
        throw NumericalError("build_mean_function: stimulus " + std::to_string(m) +
                             " yields a constant mean function; cannot standardize");
      }
    }
    out.standardized = true;
  }
  return out;
}

}  // namespace gpbold
