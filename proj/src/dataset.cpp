#include "mauc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mauc/rng.hpp"

namespace mauc {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

int checked_label(double value, std::size_t line_no) {
  const int label = static_cast<int>(value);
  if (value < 0 || static_cast<double>(label) != value) {
    fail("row " + std::to_string(line_no) + ": label must be a nonnegative integer");
  }
  return label;
}

void check_no_label_gaps(const std::vector<int>& labels, int n_classes) {
  std::vector<int> counts(n_classes, 0);
  for (int y : labels) ++counts[y];
  for (int i = 0; i < n_classes; ++i) {
    if (counts[i] == 0) fail("class " + std::to_string(i) + " empty");
  }
}

std::vector<int> rounded_counts(std::size_t n, const std::vector<double>& rho) {
  if (rho.size() < 2) fail("rho needs at least 2 classes");
  double total = 0.0;
  for (double r : rho) {
    if (r <= 0.0) fail("rho entries must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("rho must sum to 1");

  const int nc = static_cast<int>(rho.size());
  std::vector<int> counts(nc);
  std::size_t assigned = 0;
  for (int i = 0; i < nc; ++i) {
    counts[i] = static_cast<int>(std::floor(rho[i] * static_cast<double>(n)));
    assigned += static_cast<std::size_t>(counts[i]);
  }
  // Remainder goes to classes in descending rho order, ties to lower index.
  std::vector<int> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rho[a] > rho[b]; });
  for (std::size_t r = assigned, k = 0; r < n; ++r, ++k) {
    ++counts[order[k % order.size()]];
  }
  for (int i = 0; i < nc; ++i) {
    if (counts[i] < 1) fail("class " + std::to_string(i) + " rounds to 0 samples");
  }
  return counts;
}

std::vector<int> block_labels(const std::vector<int>& counts) {
  std::vector<int> labels;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    labels.insert(labels.end(), static_cast<std::size_t>(counts[i]), static_cast<int>(i));
  }
  return labels;
}

}  // namespace

Dataset Dataset::create(Matrix features, std::vector<int> labels, int n_classes) {
  if (labels.size() != features.rows()) fail("label count does not match feature rows");
  if (labels.size() < 2) fail("dataset needs at least 2 samples");
  if (features.cols() < 1) fail("dataset needs at least 1 feature");
  if (n_classes < 2) fail("dataset needs at least 2 classes");
  int distinct = 0;
  std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
  for (int y : labels) {
    if (y < 0 || y >= n_classes) fail("label out of range");
    if (!seen[static_cast<std::size_t>(y)]) {
      seen[static_cast<std::size_t>(y)] = true;
      ++distinct;
    }
  }
  if (distinct < 2) fail("at least 2 distinct classes required");
  return Dataset{std::move(features), std::move(labels), n_classes};
}

ClassIndex build_index(const Dataset& ds) {
  ClassIndex idx = build_index_allow_empty(ds.labels, ds.n_classes);
  for (int i = 0; i < idx.n_classes(); ++i) {
    if (idx.counts[i] == 0) fail("class " + std::to_string(i) + " empty");
  }
  return idx;
}

ClassIndex build_index_allow_empty(const std::vector<int>& labels, int n_classes) {
  ClassIndex idx;
  const std::size_t n = labels.size();
  idx.n_samples = n;
  idx.members.resize(static_cast<std::size_t>(n_classes));
  idx.counts.assign(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t m = 0; m < n; ++m) {
    idx.members[static_cast<std::size_t>(labels[m])].push_back(static_cast<int>(m));
    ++idx.counts[static_cast<std::size_t>(labels[m])];
  }
  int present = 0;
  idx.proportions.resize(static_cast<std::size_t>(n_classes));
  for (int i = 0; i < n_classes; ++i) {
    idx.proportions[i] = static_cast<double>(idx.counts[i]) / static_cast<double>(n);
    if (idx.counts[i] > 0) ++present;
  }
  if (present < 2) fail("at least 2 classes must be present");

  idx.pair_weights.assign(static_cast<std::size_t>(n_classes),
                          std::vector<double>(n, 0.0));
  for (int i = 0; i < n_classes; ++i) {
    if (idx.counts[i] == 0) continue;
    const double ni = static_cast<double>(idx.counts[i]);
    for (std::size_t m = 0; m < n; ++m) {
      const double ny = static_cast<double>(idx.counts[static_cast<std::size_t>(labels[m])]);
      idx.pair_weights[i][m] = 1.0 / (ni * ny);
    }
  }
  return idx;
}

OneHot one_hot(const Dataset& ds) {
  OneHot oh;
  oh.columns.assign(static_cast<std::size_t>(ds.n_classes),
                    std::vector<double>(ds.size(), 0.0));
  for (std::size_t m = 0; m < ds.size(); ++m) {
    oh.columns[static_cast<std::size_t>(ds.labels[m])][m] = 1.0;
  }
  return oh;
}

std::pair<double, double> imbalance_factors(const ClassIndex& idx) {
  double xi_sq = 0.0;
  for (double rho : idx.proportions) xi_sq += 1.0 / rho;
  double chi_sq = 0.0;
  for (std::size_t i = 0; i < idx.proportions.size(); ++i) {
    for (std::size_t j = 0; j < idx.proportions.size(); ++j) {
      if (i == j) continue;
      chi_sq += 1.0 / (idx.proportions[i] * idx.proportions[j]);
    }
  }
  return {std::sqrt(xi_sq), std::sqrt(chi_sq)};
}

Dataset load_csv(const std::string& path, std::size_t label_col) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        fail("row " + std::to_string(line_no) + ": non-numeric field '" + cell + "'");
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) {
        fail("row " + std::to_string(line_no) + ": non-numeric field '" + cell + "'");
      }
      fields.push_back(v);
    }
    if (fields.size() < 2) fail("row " + std::to_string(line_no) + ": too few fields");
    if (width == 0) {
      width = fields.size();
      if (label_col >= width) fail("label column out of range");
    } else if (fields.size() != width) {
      fail("row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
           " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) fail("empty file " + path);

  const std::size_t n = rows.size();
  const std::size_t d = width - 1;
  Matrix features(n, d);
  std::vector<int> labels(n);
  int max_label = 0;
  for (std::size_t r = 0; r < n; ++r) {
    labels[r] = checked_label(rows[r][label_col], r + 1);
    max_label = std::max(max_label, labels[r]);
    std::size_t c = 0;
    for (std::size_t k = 0; k < width; ++k) {
      if (k == label_col) continue;
      features(r, c++) = rows[r][k];
    }
  }
  const int n_classes = max_label + 1;
  check_no_label_gaps(labels, n_classes);
  return Dataset::create(std::move(features), std::move(labels), n_classes);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);

  struct Row {
    int label;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  int max_index = 0;
  int max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::stringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank line
    Row row;
    try {
      std::size_t pos = 0;
      row.label = checked_label(std::stod(tok, &pos), line_no);
      if (pos != tok.size()) fail("");
    } catch (const std::exception&) {
      fail("row " + std::to_string(line_no) + ": bad label '" + tok + "'");
    }
    max_label = std::max(max_label, row.label);
    int prev_index = 0;
    while (ss >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        fail("row " + std::to_string(line_no) + ": expected idx:val, got '" + tok + "'");
      }
      int index = 0;
      double value = 0.0;
      try {
        index = std::stoi(tok.substr(0, colon));
        std::size_t pos = 0;
        const std::string vs = tok.substr(colon + 1);
        value = std::stod(vs, &pos);
        if (pos != vs.size()) fail("");
      } catch (const std::exception&) {
        fail("row " + std::to_string(line_no) + ": bad entry '" + tok + "'");
      }
      if (index <= prev_index) {
        fail("row " + std::to_string(line_no) + ": indices must be ascending and 1-based");
      }
      prev_index = index;
      max_index = std::max(max_index, index);
      row.entries.emplace_back(index, value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail("empty file " + path);
  if (max_index == 0) fail("no feature entries in " + path);

  Matrix features(rows.size(), static_cast<std::size_t>(max_index));
  std::vector<int> labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    labels[r] = rows[r].label;
    for (const auto& [index, value] : rows[r].entries) {
      features(r, static_cast<std::size_t>(index - 1)) = value;
    }
  }
  return Dataset::create(std::move(features), std::move(labels), max_label + 1);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path);
  char buf[64];
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out << ds.labels[r];
    for (std::size_t c = 0; c < ds.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

Dataset synth_uniform(std::size_t n, std::size_t d, const std::vector<double>& rho,
                      std::uint64_t seed) {
  const std::vector<int> counts = rounded_counts(n, rho);
  Rng rng(seed);
  Matrix features(n, d);
  for (double& v : features.data()) v = rng.uniform01();
  return Dataset::create(std::move(features), block_labels(counts),
                         static_cast<int>(rho.size()));
}

Dataset synth_blobs(std::size_t n, std::size_t d, const std::vector<double>& rho,
                    double separation, std::uint64_t seed) {
  if (separation < 0.0) fail("separation must be nonnegative");
  if (d < rho.size()) fail("blobs need d >= n_classes");
  const std::vector<int> counts = rounded_counts(n, rho);
  const std::vector<int> labels = block_labels(counts);
  // Means at (separation / sqrt(2)) * e_i are mutually `separation` apart.
  const double scale = separation / std::sqrt(2.0);
  Rng rng(seed);
  Matrix features(n, d);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t c = 0; c < d; ++c) {
      features(m, c) = rng.normal();
    }
    features(m, static_cast<std::size_t>(labels[m])) += scale;
  }
  return Dataset::create(std::move(features), labels, static_cast<int>(rho.size()));
}

std::array<Dataset, 3> split_stratified(const Dataset& ds,
                                        const std::array<double, 3>& fractions,
                                        std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (f <= 0.0) fail("split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("split fractions must sum to 1");

  const ClassIndex idx = build_index(ds);
  for (int i = 0; i < idx.n_classes(); ++i) {
    if (idx.counts[i] < 3) {
      fail("class " + std::to_string(i) + " too small to populate all splits");
    }
  }

  Rng rng(seed);
  std::array<std::vector<int>, 3> parts;
  for (int i = 0; i < idx.n_classes(); ++i) {
    std::vector<int> pool = idx.members[static_cast<std::size_t>(i)];
    rng.shuffle(pool);
    const int ni = idx.counts[i];
    int n_valid = static_cast<int>(std::floor(fractions[1] * ni));
    int n_test = static_cast<int>(std::floor(fractions[2] * ni));
    if (n_valid == 0) ++n_valid;
    if (n_test == 0) ++n_test;
    const int n_train = ni - n_valid - n_test;
    if (n_train < 1) fail("class " + std::to_string(i) + " too small to populate all splits");
    std::size_t at = 0;
    for (int k = 0; k < n_train; ++k) parts[0].push_back(pool[at++]);
    for (int k = 0; k < n_valid; ++k) parts[1].push_back(pool[at++]);
    for (int k = 0; k < n_test; ++k) parts[2].push_back(pool[at++]);
  }

  std::array<Dataset, 3> out;
  for (std::size_t p = 0; p < 3; ++p) {
    std::sort(parts[p].begin(), parts[p].end());
    Matrix features(parts[p].size(), ds.dim());
    std::vector<int> labels(parts[p].size());
    for (std::size_t r = 0; r < parts[p].size(); ++r) {
      const auto src = static_cast<std::size_t>(parts[p][r]);
      labels[r] = ds.labels[src];
      for (std::size_t c = 0; c < ds.dim(); ++c) features(r, c) = ds.features(src, c);
    }
    out[p] = Dataset::create(std::move(features), std::move(labels), ds.n_classes);
  }
  return out;
}

}  // namespace mauc
