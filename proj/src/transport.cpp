#include "cqdd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cqdd/errors.hpp"

namespace cqdd {

Matrix Matrix::transposed() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Assignment solve_assignment(const Matrix& cost) {
  if (cost.rows != cost.cols) throw InvalidArgument("assignment needs a square cost matrix");
  const std::size_t n = cost.rows;
  Assignment out;
  if (n == 0) return out;

  // Shortest augmenting paths over column potentials v; a row's potential
  // is implied by its matched edge being tight.
  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  std::vector<double> v(n);
  std::vector<std::size_t> col_of_row(n, kFree);
  std::vector<std::size_t> row_of_col(n, kFree);

  // Column reduction, keeping tight edges whose row is still free.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (cost(i, j) < cost(best, j)) best = i;
    }
    v[j] = cost(best, j);
    if (col_of_row[best] == kFree) {
      col_of_row[best] = j;
      row_of_col[j] = best;
    }
  }

  // Reduction transfer: lower each matched column so its row's implied
  // potential reaches the second-best reduced cost.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = col_of_row[i];
    if (j == kFree) continue;
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (c != j) second = std::min(second, cost(i, c) - v[c]);
    }
    if (n > 1) v[j] -= second - (cost(i, j) - v[j]);
  }

  std::vector<std::size_t> free_rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (col_of_row[i] == kFree) free_rows.push_back(i);
  }

  std::vector<double> dist(n);
  std::vector<std::size_t> pred(n);
  std::vector<std::size_t> todo(n);
  std::vector<std::size_t> scanned;
  scanned.reserve(n);
  for (std::size_t f : free_rows) {
    const double* rf = &cost.data[f * n];
    for (std::size_t j = 0; j < n; ++j) {
      dist[j] = rf[j] - v[j];
      pred[j] = f;
      todo[j] = j;
    }
    std::size_t remaining = n;
    scanned.clear();
    std::size_t end = kFree;
    double mu = 0.0;
    while (end == kFree) {
      std::size_t pick = 0;
      for (std::size_t t = 1; t < remaining; ++t) {
        if (dist[todo[t]] < dist[todo[pick]]) pick = t;
      }
      const std::size_t j = todo[pick];
      todo[pick] = todo[--remaining];
      mu = dist[j];
      if (row_of_col[j] == kFree) {
        end = j;
        break;
      }
      scanned.push_back(j);
      const std::size_t i = row_of_col[j];
      const double* ri = &cost.data[i * n];
      const double h = ri[j] - v[j] - mu;
      for (std::size_t t = 0; t < remaining; ++t) {
        const std::size_t c = todo[t];
        const double d = ri[c] - v[c] - h;
        if (d < dist[c]) {
          dist[c] = d;
          pred[c] = i;
        }
      }
    }
    for (std::size_t j : scanned) v[j] += dist[j] - mu;
    for (std::size_t j = end;;) {
      const std::size_t i = pred[j];
      row_of_col[j] = i;
      const std::size_t prev = col_of_row[i];
      col_of_row[i] = j;
      if (i == f) break;
      j = prev;
    }
  }

  out.column_of_row = std::move(col_of_row);
  for (std::size_t i = 0; i < n; ++i) out.total_cost += cost(i, out.column_of_row[i]);
  return out;
}

namespace {

std::vector<double> normalized(std::span<const double> w, const char* what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument(std::string(what) + " marginal has a negative or non-finite entry");
    }
    total += x;
  }
  if (!(total > 0.0)) throw InvalidArgument(std::string(what) + " marginal sums to zero");
  std::vector<double> out(w.begin(), w.end());
  for (double& x : out) x /= total;
  return out;
}

}  // namespace

TransportPlan solve_transport(const Matrix& cost, std::span<const double> row_marginals,
                              std::span<const double> col_marginals) {
  const std::size_t n = cost.rows;
  const std::size_t m = cost.cols;
  if (row_marginals.size() != n || col_marginals.size() != m) {
    throw InvalidArgument("transport marginals do not match the cost matrix shape");
  }
  if (n == 0 || m == 0) throw InvalidArgument("transport between empty sets");

  TransportPlan plan;
  plan.row_marginals = normalized(row_marginals, "row");
  plan.col_marginals = normalized(col_marginals, "column");
  plan.flow = Matrix(n, m);

  std::vector<double> supply = plan.row_marginals;
  std::vector<double> demand = plan.col_marginals;
  // Node potentials keep reduced costs nonnegative: rows 0..n-1, cols n..n+m-1.
  std::vector<double> pot(n + m, 0.0);
  std::vector<double> dist(n + m);
  std::vector<std::ptrdiff_t> pred(n + m);
  std::vector<char> done(n + m);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Residual mass below this is treated as exhausted.
  constexpr double kEps = 1e-15;

  const auto remaining = [&] {
    double s = 0.0;
    for (double x : supply) s += x;
    return s;
  };

  // Every augmentation exhausts a supply, a demand, or a backward arc.
  const std::size_t max_rounds = 4 * (n + m) * (n + m) + 16;
  for (std::size_t round = 0; remaining() > kEps * static_cast<double>(n + m); ++round) {
    if (round > max_rounds) throw DegenerateError("transport solver failed to converge");
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (supply[i] > kEps) dist[i] = 0.0;
    }
    std::ptrdiff_t sink = -1;
    double sink_dist = kInf;
    for (;;) {
      std::size_t best = n + m;
      double bd = kInf;
      for (std::size_t k = 0; k < n + m; ++k) {
        if (!done[k] && dist[k] < bd) {
          bd = dist[k];
          best = k;
        }
      }
      if (best == n + m) break;
      done[best] = 1;
      if (best >= n && demand[best - n] > kEps) {
        sink = static_cast<std::ptrdiff_t>(best);
        sink_dist = bd;
        break;
      }
      if (best < n) {
        const std::size_t i = best;
        for (std::size_t j = 0; j < m; ++j) {
          if (done[n + j]) continue;
          const double rc = std::max(0.0, cost(i, j) + pot[i] - pot[n + j]);
          if (bd + rc < dist[n + j]) {
            dist[n + j] = bd + rc;
            pred[n + j] = static_cast<std::ptrdiff_t>(i);
          }
        }
      } else {
        const std::size_t j = best - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || plan.flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + pot[n + j] - pot[i]);
          if (bd + rc < dist[i]) {
            dist[i] = bd + rc;
            pred[i] = static_cast<std::ptrdiff_t>(best);
          }
        }
      }
    }
    if (sink < 0) throw DegenerateError("transport solver found no augmenting path");

    for (std::size_t k = 0; k < n + m; ++k) pot[k] += std::min(dist[k], sink_dist);

    // Bottleneck along the path sink <- ... <- source row.
    double amount = demand[static_cast<std::size_t>(sink) - n];
    std::ptrdiff_t node = sink;
    while (pred[static_cast<std::size_t>(node)] >= 0) {
      const auto prev = pred[static_cast<std::size_t>(node)];
      if (node < static_cast<std::ptrdiff_t>(n)) {
        // backward arc col prev -> row node
        amount = std::min(amount, plan.flow(static_cast<std::size_t>(node),
                                            static_cast<std::size_t>(prev) - n));
      }
      node = prev;
    }
    amount = std::min(amount, supply[static_cast<std::size_t>(node)]);
    const auto source = static_cast<std::size_t>(node);

    node = sink;
    while (pred[static_cast<std::size_t>(node)] >= 0) {
      const auto prev = pred[static_cast<std::size_t>(node)];
      if (node >= static_cast<std::ptrdiff_t>(n)) {
        plan.flow(static_cast<std::size_t>(prev), static_cast<std::size_t>(node) - n) += amount;
      } else {
        double& f = plan.flow(static_cast<std::size_t>(node), static_cast<std::size_t>(prev) - n);
        f -= amount;
        if (f < kEps * 1e-3) f = 0.0;
      }
      node = prev;
    }
    supply[source] -= amount;
    demand[static_cast<std::size_t>(sink) - n] -= amount;
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) plan.cost += plan.flow(i, j) * cost(i, j);
  }
  return plan;
}

}  // namespace cqdd
