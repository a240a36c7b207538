#include "iwtl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iwtl {

namespace {

std::string format_double(double v) {
  char buf[40];
  int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("malformed numeric field at " + where + ": '" + std::string(s) +
                "'");
  return v;
}

}  // namespace

Eigen::Index Dataset::count_positive() const {
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) c += (y[i] == 1);
  return c;
}

void Dataset::validate() const {
  if (x.rows() != y.size())
    throw Error("dataset row/label count mismatch");
  if (!x.allFinite())
    throw Error("dataset contains non-finite feature values");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0 && y[i] != 1)
      throw Error("labels must be 0 or 1");
}

Dataset Dataset::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty file: " + path.string());

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = s.find(',', start);
      if (pos == std::string::npos) {
        out.push_back(s.substr(start));
        break;
      }
      out.push_back(s.substr(start, pos - start));
      start = pos + 1;
    }
    return out;
  };

  // Header row is row 1. Columns are located by name: exactly one `label`
  // column (anywhere), an optional `domain` column (values source/target,
  // not loaded as a feature), everything else a feature column.
  const auto header = split(line);
  std::size_t label_col = header.size();
  std::size_t domain_col = header.size();
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label") {
      if (label_col != header.size())
        throw Error("duplicate 'label' column in " + path.string());
      label_col = j;
    } else if (header[j] == "domain") {
      if (domain_col != header.size())
        throw Error("duplicate 'domain' column in " + path.string());
      domain_col = j;
    } else {
      feature_cols.push_back(j);
    }
  }
  if (label_col == header.size())
    throw Error("no 'label' column in header of " + path.string());
  if (feature_cols.empty())
    throw Error("no feature columns in header of " + path.string());
  const auto d = static_cast<Eigen::Index>(feature_cols.size());

  std::vector<double> xv;
  std::vector<int> yv;
  std::size_t row = 1;  // the header
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      throw Error("row " + std::to_string(row) + " of " + path.string() +
                  " has " + std::to_string(fields.size()) + " fields, header " +
                  "has " + std::to_string(header.size()));
    for (std::size_t j : feature_cols)
      xv.push_back(parse_double(fields[j], "row " + std::to_string(row) +
                                               ", column " + header[j] +
                                               " of " + path.string()));
    const double label =
        parse_double(fields[label_col], "row " + std::to_string(row) +
                                            ", column label of " +
                                            path.string());
    if (label != 0.0 && label != 1.0)
      throw Error("unknown label value '" + fields[label_col] + "' at row " +
                  std::to_string(row) + " of " + path.string());
    yv.push_back(static_cast<int>(label));
    if (domain_col != header.size() && fields[domain_col] != "source" &&
        fields[domain_col] != "target")
      throw Error("unknown domain value '" + fields[domain_col] + "' at row " +
                  std::to_string(row) + " of " + path.string());
  }

  Dataset out;
  const auto n = static_cast<Eigen::Index>(yv.size());
  out.x.resize(n, d);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      out.x(i, j) = xv[static_cast<std::size_t>(i * d + j)];
    out.y[i] = yv[static_cast<std::size_t>(i)];
  }
  out.validate();
  return out;
}

void Dataset::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (Eigen::Index j = 0; j < dim(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < n(); ++i) {
    for (Eigen::Index j = 0; j < dim(); ++j)
      out << format_double(x(i, j)) << ',';
    out << y[i] << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::uint64_t Dataset::digest() const {
  std::uint64_t h = fnv1a("dataset");
  const std::uint64_t rows = static_cast<std::uint64_t>(n());
  const std::uint64_t cols = static_cast<std::uint64_t>(dim());
  h = fnv1a(&rows, sizeof(rows), h);
  h = fnv1a(&cols, sizeof(cols), h);
  for (Eigen::Index i = 0; i < n(); ++i) {
    for (Eigen::Index j = 0; j < dim(); ++j) {
      const double v = x(i, j);
      h = fnv1a(&v, sizeof(v), h);
    }
    h = fnv1a(&y[i], sizeof(int), h);
  }
  return h;
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim() && !a.empty() && !b.empty())
    throw Error("concat: dimension mismatch");
  Dataset out;
  out.x.resize(a.n() + b.n(), a.empty() ? b.dim() : a.dim());
  out.y.resize(a.n() + b.n());
  out.x.topRows(a.n()) = a.x;
  out.x.bottomRows(b.n()) = b.x;
  out.y.head(a.n()) = a.y;
  out.y.tail(b.n()) = b.y;
  return out;
}

Standardizer Standardizer::fit(const std::vector<const Dataset*>& parts) {
  if (parts.empty()) throw Error("standardizer: no data");
  Eigen::Index d = parts.front()->dim();
  Eigen::Index total = 0;
  for (const auto* p : parts) {
    if (p->dim() != d) throw Error("standardizer: dimension mismatch");
    total += p->n();
  }
  if (total == 0) throw Error("standardizer: no rows");

  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(d);
  for (const auto* p : parts) s.mean += p->x.colwise().sum().transpose();
  s.mean /= static_cast<double>(total);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto* p : parts)
    var += (p->x.rowwise() - s.mean.transpose()).array().square().colwise().sum().matrix().transpose();
  var /= static_cast<double>(total);

  s.scale = var.array().sqrt();
  for (Eigen::Index j = 0; j < d; ++j)
    if (s.scale[j] == 0.0) s.scale[j] = 1.0;
  return s;
}

Dataset Standardizer::apply(const Dataset& d) const {
  if (d.dim() != mean.size()) throw Error("standardizer: dimension mismatch");
  Dataset out = d;
  out.x = (d.x.rowwise() - mean.transpose()).array().rowwise() /
          scale.transpose().array();
  return out;
}

std::vector<std::vector<Eigen::Index>> stratified_folds(
    const Eigen::VectorXi& y, int k, Rng& rng) {
  if (k < 2) throw Error("stratified_folds: k must be >= 2");
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw Error("stratified_folds: a class is absent; reduce k or add data");

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  for (auto* cls : {&neg, &pos}) {
    rng.shuffle(*cls);
    for (std::size_t i = 0; i < cls->size(); ++i)
      folds[i % static_cast<std::size_t>(k)].push_back((*cls)[i]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace iwtl
