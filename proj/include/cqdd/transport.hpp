#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cqdd {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  Matrix transposed() const;
};

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double total_cost = 0.0;  // sum of cost(i, column_of_row[i])
};

// Minimum-cost perfect matching on a square cost matrix (shortest
// augmenting path Hungarian method with potentials, O(n^3)).
Assignment solve_assignment(const Matrix& cost);

struct TransportPlan {
  Matrix flow;
  std::vector<double> row_marginals;
  std::vector<double> col_marginals;
  double cost = 0.0;
};

// Exact minimum-cost transport between two probability vectors, solved as
// a min-cost flow by successive shortest augmenting paths with node
// potentials. Marginals are renormalized to sum to 1.
TransportPlan solve_transport(const Matrix& cost, std::span<const double> row_marginals,
                              std::span<const double> col_marginals);

}  // namespace cqdd
