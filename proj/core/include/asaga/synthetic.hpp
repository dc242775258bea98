#pragma once

#include <cstdint>
#include <string>

#include "asaga/dataset.hpp"

namespace asaga {

// Generator for desk-scale problems with controlled size and sparsity.
// Labels come from a planted linear model; `noise` flips each label
// independently. All parameters are recorded so runs are reproducible.
struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t d = 100;
  std::size_t nnz = 5;   // nonzeros per row, min(nnz, d)
  double noise = 0.0;    // label flip probability
  std::uint64_t seed = 1;

  std::string describe() const;
};

SparseDataset make_synthetic(const SyntheticSpec& spec);

// Parses "n=1000,d=100,nnz=5[,noise=0.1][,seed=42]".
// Throws std::invalid_argument on unknown keys or malformed numbers.
SyntheticSpec parse_synthetic_spec(const std::string& text);

}  // namespace asaga
