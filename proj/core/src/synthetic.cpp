#include "asaga/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "asaga/rng.hpp"

namespace asaga {

std::string SyntheticSpec::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "n=%zu,d=%zu,nnz=%zu,noise=%g,seed=%llu", n,
                d, nnz, noise, static_cast<unsigned long long>(seed));
  return buf;
}

SparseDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.nnz < 1)
    throw std::invalid_argument("synthetic spec requires n, d, nnz >= 1");
  if (spec.noise < 0.0 || spec.noise > 1.0)
    throw std::invalid_argument("synthetic noise must lie in [0, 1]");
  const std::size_t nnz = std::min(spec.nnz, spec.d);

  CounterRng rng(spec.seed);
  std::vector<double> w(spec.d);
  for (auto& wv : w) wv = 2.0 * rng.next_unit() - 1.0;

  SparseDataset ds;
  ds.n = spec.n;
  ds.d = spec.d;
  ds.row_offsets.reserve(spec.n + 1);
  ds.row_offsets.push_back(0);
  ds.labels.reserve(spec.n);

  std::vector<std::uint32_t> idx;
  for (std::size_t i = 0; i < spec.n; ++i) {
    // Floyd's sampling: nnz distinct dimensions, uniform without replacement
    idx.clear();
    for (std::size_t j = spec.d - nnz; j < spec.d; ++j) {
      const auto t = static_cast<std::uint32_t>(rng.next_index(j + 1));
      if (std::find(idx.begin(), idx.end(), t) != idx.end())
        idx.push_back(static_cast<std::uint32_t>(j));
      else
        idx.push_back(t);
    }
    std::sort(idx.begin(), idx.end());

    double margin = 0.0;
    for (std::uint32_t v : idx) {
      const double val = 2.0 * rng.next_unit() - 1.0;
      ds.indices.push_back(v);
      ds.values.push_back(val);
      margin += w[v] * val;
    }
    ds.row_offsets.push_back(ds.indices.size());

    double label = margin >= 0.0 ? 1.0 : -1.0;
    if (spec.noise > 0.0 && rng.next_bernoulli(spec.noise)) label = -label;
    ds.labels.push_back(label);
  }
  ds.dense_flag = nnz == spec.d;
  return ds;
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec spec;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;

    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("synthetic spec item '" + item +
                                  "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    char* after = nullptr;
    if (key == "n" || key == "d" || key == "nnz" || key == "seed") {
      const unsigned long long u = std::strtoull(val.c_str(), &after, 10);
      if (after != val.c_str() + val.size() || val.empty())
        throw std::invalid_argument("bad integer for '" + key + "'");
      if (key == "n")
        spec.n = u;
      else if (key == "d")
        spec.d = u;
      else if (key == "nnz")
        spec.nnz = u;
      else
        spec.seed = u;
    } else if (key == "noise") {
      spec.noise = std::strtod(val.c_str(), &after);
      if (after != val.c_str() + val.size() || val.empty())
        throw std::invalid_argument("bad number for 'noise'");
    } else {
      throw std::invalid_argument("unknown synthetic spec key '" + key + "'");
    }
  }
  return spec;
}

}  // namespace asaga
