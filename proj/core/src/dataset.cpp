#include "asaga/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace asaga {

std::size_t SparseDataset::max_row_nnz() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i)
    m = std::max(m, row_offsets[i + 1] - row_offsets[i]);
  return m;
}

namespace {

std::string read_gzip(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int got;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, got);
  const bool bad = got < 0;
  gzclose(f);
  if (bad) throw std::runtime_error("gzip read failed on " + path);
  return out;
}

bool ends_with(const std::string& s, const char* suf) {
  const std::size_t k = std::strlen(suf);
  return s.size() >= k && s.compare(s.size() - k, k, suf) == 0;
}

}  // namespace

SparseDataset parse_libsvm(const std::string& text) {
  SparseDataset ds;
  ds.row_offsets.push_back(0);
  std::vector<double> raw_labels;
  std::uint32_t max_index = 0;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++lineno;

    // skip blank / comment lines
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos || line[b] == '#') continue;

    const char* cur = line.data() + b;
    const char* end = line.data() + line.size();
    char* after = nullptr;
    errno = 0;
    double label = std::strtod(cur, &after);
    if (after == cur) throw ParseError("missing label", lineno);
    if (!std::isfinite(label)) throw ParseError("non-finite label", lineno);
    cur = after;

    entries.clear();
    while (cur < end) {
      while (cur < end && (*cur == ' ' || *cur == '\t' || *cur == '\r')) ++cur;
      if (cur >= end) break;
      long idx = std::strtol(cur, &after, 10);
      if (after == cur || *after != ':')
        throw ParseError("malformed index:value pair", lineno);
      if (idx < 1) throw ParseError("index must be >= 1", lineno);
      cur = after + 1;
      double val = std::strtod(cur, &after);
      if (after == cur) throw ParseError("malformed feature value", lineno);
      if (!std::isfinite(val)) throw ParseError("non-finite feature value", lineno);
      cur = after;
      entries.emplace_back(static_cast<std::uint32_t>(idx - 1), val);
    }

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < entries.size(); ++k)
      if (entries[k].first == entries[k - 1].first)
        throw ParseError("duplicate feature index", lineno);

    for (const auto& [idx, val] : entries) {
      ds.indices.push_back(idx);
      ds.values.push_back(val);
      max_index = std::max(max_index, idx);
    }
    ds.row_offsets.push_back(ds.indices.size());
    raw_labels.push_back(label);
  }

  ds.n = raw_labels.size();
  if (ds.n == 0) throw ParseError("empty dataset", lineno ? lineno : 1);
  ds.d = ds.indices.empty() ? 1 : static_cast<std::size_t>(max_index) + 1;

  std::set<double> classes(raw_labels.begin(), raw_labels.end());
  ds.labels.resize(ds.n);
  if (classes.size() == 2) {
    const double lo = *classes.begin();
    for (std::size_t i = 0; i < ds.n; ++i)
      ds.labels[i] = raw_labels[i] == lo ? -1.0 : 1.0;
  } else if (classes.size() == 1 &&
             (*classes.begin() == 1.0 || *classes.begin() == -1.0)) {
    ds.labels = raw_labels;
  } else {
    throw ParseError("expected exactly two label classes", 1);
  }

  bool dense = true;
  for (std::size_t i = 0; i < ds.n && dense; ++i)
    dense = (ds.row_offsets[i + 1] - ds.row_offsets[i]) == ds.d;
  ds.dense_flag = dense;
  return ds;
}

SparseDataset load_libsvm(const std::string& path) {
  if (ends_with(path, ".gz")) return parse_libsvm(read_gzip(path));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_libsvm(ss.str());
}

std::string format_libsvm(const SparseDataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < ds.n; ++i) {
    std::snprintf(buf, sizeof buf, "%g", ds.labels[i]);
    out += buf;
    const auto r = ds.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", r.indices[k] + 1, r.values[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void save_libsvm(const SparseDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_libsvm(ds);
}

StandardizeResult standardize(const SparseDataset& ds) {
  const std::size_t n = ds.n, d = ds.d;
  std::vector<double> mean(d, 0.0), sq(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = ds.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      mean[r.indices[k]] += r.values[k];
      sq[r.indices[k]] += r.values[k] * r.values[k];
    }
  }
  std::vector<double> scale(d, 0.0);
  StandardizeResult res;
  for (std::size_t v = 0; v < d; ++v) {
    mean[v] /= static_cast<double>(n);
    const double var = sq[v] / static_cast<double>(n) - mean[v] * mean[v];
    if (var > 0.0) {
      scale[v] = 1.0 / std::sqrt(var);
    } else {
      res.zero_variance.push_back(static_cast<std::uint32_t>(v));
    }
  }

  SparseDataset out;
  out.n = n;
  out.d = d;
  out.labels = ds.labels;
  out.dense_flag = true;
  out.row_offsets.reserve(n + 1);
  out.row_offsets.push_back(0);
  out.indices.reserve(n * d);
  out.values.reserve(n * d);
  std::vector<double> rowbuf(d);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(rowbuf.begin(), rowbuf.end(), 0.0);
    const auto r = ds.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) rowbuf[r.indices[k]] = r.values[k];
    for (std::size_t v = 0; v < d; ++v) {
      out.indices.push_back(static_cast<std::uint32_t>(v));
      out.values.push_back((rowbuf[v] - mean[v]) * scale[v]);
    }
    out.row_offsets.push_back(out.indices.size());
  }
  res.data = std::move(out);
  return res;
}

namespace {

// Smallest-adjustment reciprocal such that p * q rounds to exactly 1.0.
double exact_reciprocal(double p) {
  double q = 1.0 / p;
  for (int step = 0; step < 4; ++step) {
    const double prod = p * q;
    if (prod == 1.0) return q;
    q = std::nextafter(q, prod < 1.0 ? std::numeric_limits<double>::infinity()
                                     : 0.0);
  }
  return 1.0 / p;
}

}  // namespace

SupportStats support_stats(const SparseDataset& ds) {
  SupportStats st;
  st.col_nnz.assign(ds.d, 0);
  for (std::uint32_t idx : ds.indices) st.col_nnz[idx]++;
  st.p.resize(ds.d);
  st.inv_p.resize(ds.d);
  for (std::size_t v = 0; v < ds.d; ++v) {
    const std::size_t c = st.col_nnz[v];
    st.delta_r = std::max(st.delta_r, c);
    if (c == 0) {
      st.p[v] = 0.0;
      st.inv_p[v] = 0.0;
    } else {
      st.p[v] = static_cast<double>(c) / static_cast<double>(ds.n);
      st.inv_p[v] = exact_reciprocal(st.p[v]);
    }
  }
  st.delta = static_cast<double>(st.delta_r) / static_cast<double>(ds.n);
  return st;
}

ColumnView make_column_view(const SparseDataset& ds) {
  ColumnView cv;
  std::vector<std::size_t> counts(ds.d, 0);
  for (std::uint32_t idx : ds.indices) counts[idx]++;
  cv.col_offsets.assign(ds.d + 1, 0);
  for (std::size_t v = 0; v < ds.d; ++v)
    cv.col_offsets[v + 1] = cv.col_offsets[v] + counts[v];
  cv.sample_ids.resize(ds.nnz());
  cv.values.resize(ds.nnz());
  std::vector<std::size_t> cursor(cv.col_offsets.begin(),
                                  cv.col_offsets.end() - 1);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto r = ds.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const std::size_t slot = cursor[r.indices[k]]++;
      cv.sample_ids[slot] = static_cast<std::uint32_t>(i);
      cv.values[slot] = r.values[k];
    }
  }
  return cv;
}

double lipschitz_constant(const SparseDataset& ds, double mu) {
  double max_sq = 0.0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto r = ds.row(i);
    double sq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) sq += r.values[k] * r.values[k];
    max_sq = std::max(max_sq, sq);
  }
  return max_sq / 4.0 + mu;
}

}  // namespace asaga
