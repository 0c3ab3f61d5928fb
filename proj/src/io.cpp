#include "gpbold/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpbold/json_support.hpp"

namespace gpbold {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& col_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  if (!col_names.empty() && static_cast<Index>(col_names.size()) != values.cols())
    throw ShapeError("write_csv: header/column count mismatch for " + path);
  for (Index c = 0; c < values.cols(); ++c) {
    if (c) out << ',';
    out << (col_names.empty() ? "c" + std::to_string(c) : col_names[c]);
  }
  out << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

Matrix read_csv(const std::string& path, std::vector<std::string>* col_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv " + path);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  if (names.empty()) throw IoError("csv header has no columns: " + path);
  const Index cols = static_cast<Index>(names.size());
  std::vector<double> data;
  Index rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    Index c = 0;
    while (std::getline(ss, tok, ',')) {
      if (c >= cols)
        throw IoError(path + ": row " + std::to_string(line_no) + " has more than " +
                      std::to_string(cols) + " columns");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        throw IoError(path + ": parse error at row " + std::to_string(line_no) + ", column " +
                      std::to_string(c + 1) + " ('" + tok + "')");
      data.push_back(v);
      ++c;
    }
    if (c != cols)
      throw IoError(path + ": row " + std::to_string(line_no) + " has " + std::to_string(c) +
                    " columns, expected " + std::to_string(cols));
    ++rows;
  }
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = data[r * cols + c];
  if (col_names) *col_names = names;
  return out;
}

namespace {

std::vector<std::string> flat_names(const std::string& base, Index fast, Index slow,
                                    const std::string& fast_tag, const std::string& slow_tag) {
  std::vector<std::string> names;
  names.reserve(fast * slow);
  for (Index s = 0; s < slow; ++s)
    for (Index f = 0; f < fast; ++f)
      names.push_back(base + "_" + fast_tag + std::to_string(f) + "_" + slow_tag +
                      std::to_string(s));
  return names;
}

}  // namespace

void save_draws(const std::string& dir, const PosteriorDraws& draws) {
  ensure_directory(dir);
  const Index t_star = draws.t_star;
  const Index mb = draws.n_bold;
  const Index j = draws.n_voxels;
  const Index p = draws.n_nuisance;
  const Index m_latent = t_star > 0 ? draws.f.cols() / t_star : 0;

  write_csv(dir + "/f.csv", draws.f, flat_names("f", t_star, m_latent, "t", "m"));
  write_csv(dir + "/b.csv", draws.b, flat_names("b", mb, j, "m", "j"));
  write_csv(dir + "/gamma.csv", draws.gamma, flat_names("gamma", p, j, "p", "j"));
  write_csv(dir + "/sigma2.csv", draws.sigma2, flat_names("sigma2", j, 1, "j", "x"));
  write_csv(dir + "/rho.csv", draws.rho, flat_names("rho", draws.rho.cols(), 1, "k", "x"));
  if (draws.h.size() > 0) {
    const Index taps = m_latent > 0 ? draws.h.cols() / m_latent : draws.h.cols();
    write_csv(dir + "/h.csv", draws.h, flat_names("h", taps, m_latent, "k", "m"));
  }

  json meta;
  meta["model"] = draws.model;
  meta["n_iter"] = draws.settings.n_iter;
  meta["burn_in"] = draws.settings.burn_in;
  meta["thin"] = draws.settings.thin;
  meta["seed"] = draws.settings.seed;
  meta["parcel_id"] = draws.parcel_id;
  meta["retained"] = draws.retained();
  meta["t_star"] = draws.t_star;
  meta["n_bold"] = draws.n_bold;
  meta["n_voxels"] = draws.n_voxels;
  meta["n_nuisance"] = draws.n_nuisance;
  meta["bold_step_skipped"] = (draws.model == "fixed" || draws.model == "fixed-deriv");
  meta["init"] = {{"iterations", draws.init.iterations},
                  {"ridge_lambda", draws.init.ridge_lambda},
                  {"final_mse", draws.init.final_mse},
                  {"converged", draws.init.converged}};
  meta["seconds"] = draws.seconds;
  write_json_file(dir + "/meta.json", meta);
}

PosteriorDraws load_draws(const std::string& dir) {
  PosteriorDraws draws;
  const json meta = load_json_file(dir + "/meta.json");
  draws.model = meta.at("model").get<std::string>();
  draws.settings.n_iter = meta.at("n_iter").get<int>();
  draws.settings.burn_in = meta.at("burn_in").get<int>();
  draws.settings.thin = meta.at("thin").get<int>();
  draws.settings.seed = meta.at("seed").get<std::uint64_t>();
  draws.parcel_id = meta.at("parcel_id").get<std::string>();
  draws.t_star = meta.at("t_star").get<Index>();
  draws.n_bold = meta.at("n_bold").get<Index>();
  draws.n_voxels = meta.at("n_voxels").get<Index>();
  draws.n_nuisance = meta.at("n_nuisance").get<Index>();
  draws.init.iterations = meta.at("init").value("iterations", 0);
  draws.init.ridge_lambda = meta.at("init").value("ridge_lambda", 0.0);
  draws.init.final_mse = meta.at("init").value("final_mse", 0.0);
  draws.init.converged = meta.at("init").value("converged", true);
  draws.seconds = meta.value("seconds", 0.0);

  draws.f = read_csv(dir + "/f.csv");
  draws.b = read_csv(dir + "/b.csv");
  draws.gamma = read_csv(dir + "/gamma.csv");
  draws.sigma2 = read_csv(dir + "/sigma2.csv");
  draws.rho = read_csv(dir + "/rho.csv");
  if (fs::exists(dir + "/h.csv")) draws.h = read_csv(dir + "/h.csv");
  return draws;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return doc;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

Matrix matrix_from_json(const json& rows) {
  const Index r = static_cast<Index>(rows.size());
  if (r == 0) return Matrix(0, 0);
  const Index c = static_cast<Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<Index>(row.size()) != c) throw IoError("matrix json: ragged rows");
    for (Index j = 0; j < c; ++j) m(i, j) = row.at(j).get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = arr.at(i).get<double>();
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace gpbold
