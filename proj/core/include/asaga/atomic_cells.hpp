#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <vector>

namespace asaga {

enum class AtomicMode {
  CAS,     // lossless: compare-and-swap retry on the 64-bit pattern
  UNSAFE,  // racy read-then-store; loses concurrent updates by design
};

static_assert(std::atomic<double>::is_always_lock_free,
              "lock-free 64-bit atomics are required");

// Lossless concurrent addition: reread-and-retry until the swap lands, so
// the cell's final value is the initial value plus every delta exactly once
// (only the accumulation order is scheduling-dependent).
inline void atomic_add_cas(std::atomic<double>& cell, double delta) {
  double cur = cell.load(std::memory_order_relaxed);
  while (!cell.compare_exchange_weak(cur, cur + delta,
                                     std::memory_order_relaxed)) {
  }
}

// Plain read-modify-store; concurrent writers overwrite each other. Kept as
// a switchable mode to measure what the CAS discipline buys.
inline void atomic_add_unsafe(std::atomic<double>& cell, double delta) {
  cell.store(cell.load(std::memory_order_relaxed) + delta,
             std::memory_order_relaxed);
}

// Fixed-size array of shared real cells. All access is per-coordinate;
// whole-vector reads are inconsistent snapshots by construction.
class AtomicCells {
 public:
  explicit AtomicCells(std::size_t size, double init = 0.0)
      : size_(size), cells_(std::make_unique<std::atomic<double>[]>(size)) {
    for (std::size_t i = 0; i < size_; ++i)
      cells_[i].store(init, std::memory_order_relaxed);
  }

  std::size_t size() const { return size_; }

  double load(std::size_t i) const {
    return cells_[i].load(std::memory_order_relaxed);
  }

  void store(std::size_t i, double v) {
    cells_[i].store(v, std::memory_order_relaxed);
  }

  void add(std::size_t i, double delta, AtomicMode mode) {
    if (mode == AtomicMode::CAS)
      atomic_add_cas(cells_[i], delta);
    else
      atomic_add_unsafe(cells_[i], delta);
  }

  std::atomic<double>& cell(std::size_t i) { return cells_[i]; }

  void fill_from(const std::vector<double>& v) {
    for (std::size_t i = 0; i < size_; ++i)
      cells_[i].store(v[i], std::memory_order_relaxed);
  }

  std::vector<double> snapshot() const {
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = load(i);
    return out;
  }

 private:
  std::size_t size_;
  std::unique_ptr<std::atomic<double>[]> cells_;
};

}  // namespace asaga
