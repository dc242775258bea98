#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asaga {

// Row-compressed sparse design matrix with {-1,+1} labels.
// Immutable after construction; shared read-only across workers.
struct SparseDataset {
  std::size_t n = 0;  // samples
  std::size_t d = 0;  // dimensions

  // CSR layout: row i occupies [row_offsets[i], row_offsets[i+1]).
  std::vector<std::size_t> row_offsets;  // n+1 entries
  std::vector<std::uint32_t> indices;    // 0-based, strictly increasing per row
  std::vector<double> values;
  std::vector<double> labels;  // exactly -1.0 or +1.0

  bool dense_flag = false;  // true when every row carries all d dimensions

  struct Row {
    std::span<const std::uint32_t> indices;
    std::span<const double> values;
    std::size_t size() const { return indices.size(); }
  };

  Row row(std::size_t i) const {
    const std::size_t lo = row_offsets[i], hi = row_offsets[i + 1];
    return {std::span(indices).subspan(lo, hi - lo),
            std::span(values).subspan(lo, hi - lo)};
  }

  std::size_t nnz() const { return values.size(); }
  std::size_t max_row_nnz() const;
};

// Per-dimension support statistics.
// inv_p[v] is chosen so that p[v] * inv_p[v] == 1.0 holds in double
// arithmetic (nudged by ulps from 1/p when the rounded product misses 1);
// dimensions with empty support get the 0 sentinel and are never read.
struct SupportStats {
  std::vector<double> p;
  std::vector<double> inv_p;
  std::vector<std::size_t> col_nnz;  // exact integer column counts
  std::size_t delta_r = 0;           // max_v col_nnz[v]
  double delta = 0.0;                // delta_r / n
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// libsvm text format, 1-based indices; ".gz" paths are inflated on the fly.
// Labels are mapped deterministically: {-1,+1} kept, otherwise the smaller
// of the two class values becomes -1.
SparseDataset load_libsvm(const std::string& path);
SparseDataset parse_libsvm(const std::string& text);
void save_libsvm(const SparseDataset& ds, const std::string& path);
std::string format_libsvm(const SparseDataset& ds);

struct StandardizeResult {
  SparseDataset data;                          // dense_flag = true
  std::vector<std::uint32_t> zero_variance;  // columns left all-zero
};

// Column-wise mean 0 / variance 1 (population variance); the result is
// materialized densely. Zero-variance columns stay zero and are reported.
StandardizeResult standardize(const SparseDataset& ds);

SupportStats support_stats(const SparseDataset& ds);

// Column-compressed companion view: column v lists the samples whose
// support contains v together with their entry values. Used where a
// per-dimension pass over the touching samples is needed (recomputing the
// memory average from scalars, auditing maintained accumulators).
struct ColumnView {
  std::vector<std::size_t> col_offsets;  // d+1 entries
  std::vector<std::uint32_t> sample_ids;
  std::vector<double> values;

  struct Column {
    std::span<const std::uint32_t> sample_ids;
    std::span<const double> values;
    std::size_t size() const { return sample_ids.size(); }
  };

  Column column(std::size_t v) const {
    const std::size_t lo = col_offsets[v], hi = col_offsets[v + 1];
    return {std::span(sample_ids).subspan(lo, hi - lo),
            std::span(values).subspan(lo, hi - lo)};
  }
};

ColumnView make_column_view(const SparseDataset& ds);

// L = max_i ||a_i||^2 / 4 + mu, the logistic-loss smoothness bound.
double lipschitz_constant(const SparseDataset& ds, double mu);

}  // namespace asaga
