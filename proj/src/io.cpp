#include "onebit/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace onebit {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << std::setprecision(17);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return f;
}

Shape parse_dims_line(const std::string& line, const std::string& path) {
  const auto pos = line.find("dims:");
  if (pos == std::string::npos)
    throw std::runtime_error(path + ": expected 'dims:' header");
  std::vector<int> dims;
  for (const auto& tok : split(trim(line.substr(pos + 5)), ','))
    dims.push_back(std::stoi(trim(tok)));
  return Shape(dims);
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor& t) {
  auto f = open_out(path);
  f << "dims: ";
  for (int j = 0; j < t.shape().order(); ++j)
    f << (j ? "," : "") << t.shape().dims[j];
  f << "\n";
  for (Eigen::Index i = 0; i < t.data().size(); ++i) f << t.data()[i] << "\n";
}

DenseTensor read_tensor(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  const Shape shape = parse_dims_line(line, path);
  VectorXd data(shape.size());
  for (std::int64_t i = 0; i < shape.size(); ++i) {
    if (!std::getline(f, line))
      throw std::runtime_error(path + ": fewer entries than shape requires");
    data[i] = std::stod(trim(line));
  }
  return DenseTensor(shape, std::move(data));
}

void write_observations(const std::string& path, const ObservationSet& obs) {
  auto f = open_out(path);
  const int d = obs.shape.order();
  for (int j = 0; j < d; ++j) f << "i_" << (j + 1) << ",";
  f << "y\n";
  for (std::int64_t s = 0; s < obs.count(); ++s) {
    for (int j = 0; j < d; ++j) f << obs.indices(s, j) + 1 << ",";
    f << obs.signs[s] << "\n";
  }
}

ObservationSet read_observations(const std::string& path, const Shape& shape) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  const int d = static_cast<int>(split(line, ',').size()) - 1;
  if (d != shape.order())
    throw std::runtime_error(path + ": header order does not match declared shape");
  std::vector<std::array<int, 2>> dummy;
  std::vector<TensorIndex> idx;
  std::vector<int> signs;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto toks = split(line, ',');
    if (static_cast<int>(toks.size()) != d + 1)
      throw std::runtime_error(path + ": malformed row at line " + std::to_string(lineno));
    TensorIndex ix(d);
    for (int j = 0; j < d; ++j) ix[j] = std::stoi(trim(toks[j])) - 1;
    if (!shape.contains(ix))
      throw std::runtime_error(path + ": index out of range at line " + std::to_string(lineno));
    const int y = std::stoi(trim(toks[d]));
    if (y != 1 && y != -1)
      throw std::runtime_error(path + ": y must be -1 or 1 at line " + std::to_string(lineno));
    idx.push_back(std::move(ix));
    signs.push_back(y);
  }
  if (idx.empty()) throw std::runtime_error(path + ": no data rows");
  ObservationSet obs;
  obs.shape = shape;
  obs.indices.resize(idx.size(), d);
  obs.signs.resize(idx.size());
  for (std::size_t s = 0; s < idx.size(); ++s) {
    for (int j = 0; j < d; ++j) obs.indices(s, j) = idx[s][j];
    obs.signs[s] = signs[s];
  }
  return obs;
}

void write_checkpoint(const std::string& path, const FitResult& fit) {
  auto f = open_out(path);
  const Shape shape = fit.factors.shape();
  f << "onebit-fit v1\n";
  f << "dims: ";
  for (int j = 0; j < shape.order(); ++j) f << (j ? "," : "") << shape.dims[j];
  f << "\n";
  f << "k: " << fit.factors.rank() << "\n";
  f << "chosen_r: " << fit.chosen_r << "\n";
  f << "iterations: " << fit.iterations << "\n";
  f << "converged: " << (fit.converged ? 1 : 0) << "\n";
  for (int j = 0; j < fit.factors.order(); ++j) {
    const MatrixXd& v = fit.factors.factor(j);
    f << "factor " << j << "\n";
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) f << (c ? " " : "") << v(r, c);
      f << "\n";
    }
  }
  f << "trace:";
  for (double t : fit.objective_trace) f << " " << t;
  f << "\n";
}

FitResult read_checkpoint(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || trim(line) != "onebit-fit v1")
    throw std::runtime_error(path + ": not an onebit-fit v1 checkpoint");
  if (!std::getline(f, line)) throw std::runtime_error(path + ": truncated");
  const Shape shape = parse_dims_line(line, path);
  auto read_field = [&](const std::string& key) {
    if (!std::getline(f, line)) throw std::runtime_error(path + ": truncated");
    const auto pos = line.find(key + ":");
    if (pos == std::string::npos)
      throw std::runtime_error(path + ": expected field " + key);
    return trim(line.substr(pos + key.size() + 1));
  };
  const int k = std::stoi(read_field("k"));
  FitResult fit;
  fit.chosen_r = std::stod(read_field("chosen_r"));
  fit.iterations = std::stoi(read_field("iterations"));
  fit.converged = std::stoi(read_field("converged")) != 0;
  std::vector<MatrixXd> factors;
  for (int j = 0; j < shape.order(); ++j) {
    if (!std::getline(f, line) || line.rfind("factor", 0) != 0)
      throw std::runtime_error(path + ": expected factor block");
    MatrixXd v(shape.dims[j], k);
    for (int r = 0; r < shape.dims[j]; ++r) {
      if (!std::getline(f, line)) throw std::runtime_error(path + ": truncated factor");
      std::stringstream ss(line);
      for (int c = 0; c < k; ++c)
        if (!(ss >> v(r, c))) throw std::runtime_error(path + ": short factor row");
    }
    factors.push_back(std::move(v));
  }
  fit.factors = CpFactorSet(std::move(factors));
  if (std::getline(f, line) && line.rfind("trace:", 0) == 0) {
    std::stringstream ss(line.substr(6));
    double t;
    while (ss >> t) fit.objective_trace.push_back(t);
  }
  return fit;
}

RatingsTable ingest_csv(const std::string& path, const Shape& shape) {
  auto f = open_in(path);
  const int d = shape.order();
  RatingsTable table;
  table.shape = shape;
  std::unordered_map<std::int64_t, std::size_t> seen;
  std::string line;
  int lineno = 0;
  bool any = false;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto toks = split(t, ',');
    if (lineno == 1 && !toks.empty() &&
        t.find_first_not_of("0123456789,.-+eE \t") != std::string::npos)
      continue;  // header row
    if (static_cast<int>(toks.size()) != d + 1)
      throw std::runtime_error(path + ": malformed row at line " + std::to_string(lineno));
    TensorIndex idx(d);
    for (int j = 0; j < d; ++j) {
      int v;
      try {
        v = std::stoi(trim(toks[j]));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": malformed row at line " + std::to_string(lineno));
      }
      idx[j] = v - 1;  // file indices are 1-based
      if (idx[j] < 0 || idx[j] >= shape.dims[j])
        throw std::runtime_error(path + ": index out of range at line " + std::to_string(lineno));
    }
    double rating;
    try {
      rating = std::stod(trim(toks[d]));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": malformed row at line " + std::to_string(lineno));
    }
    if (!std::isfinite(rating))
      throw std::runtime_error(path + ": rating not finite at line " + std::to_string(lineno));
    any = true;
    const std::int64_t off = shape.offset(idx);
    auto it = seen.find(off);
    if (it != seen.end()) {
      table.rows[it->second].rating = rating;  // last wins
      ++table.duplicate_count;
    } else {
      seen[off] = table.rows.size();
      table.rows.push_back(RatingRow{std::move(idx), rating});
    }
  }
  if (!any) throw std::runtime_error(path + ": no data rows");
  return table;
}

std::map<std::string, std::string> read_keyvalue_file(const std::string& path) {
  auto f = open_in(path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": expected 'key = value' line: " + t);
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

}  // namespace onebit
