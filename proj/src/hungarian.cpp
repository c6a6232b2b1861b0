#include "hvis/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hvis {

namespace {

struct SquareSolution {
    std::vector<int> col_of_row;
    std::vector<int> row_of_col;
    std::vector<double> u;
    std::vector<double> v;
};

// Shortest augmenting path with potentials, O(n^3). Returns optimal duals
// alongside the matching.
SquareSolution solve_square(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    SquareSolution s;
    s.col_of_row.assign(n, -1);
    s.row_of_col.assign(n, -1);
    s.u.assign(n, 0.0);
    s.v.assign(n, 0.0);
    for (int j = 1; j <= n; ++j) {
        s.col_of_row[p[j] - 1] = j - 1;
        s.row_of_col[j - 1] = p[j] - 1;
        s.v[j - 1] = v[j];
    }
    for (int i = 1; i <= n; ++i) {
        s.u[i - 1] = u[i];
    }
    return s;
}

// Every optimal matching uses only tight edges of an optimal dual, so the
// lexicographically smallest optimum is the lexicographically smallest
// perfect matching of the tight subgraph. Rows are fixed in order; row i
// moves to a smaller column c when an alternating path through the not yet
// fixed rows frees c.
void make_lexicographic(const Eigen::MatrixXd& a, SquareSolution& s, double eps) {
    const int n = static_cast<int>(a.rows());
    const auto tight = [&](int r, int c) { return a(r, c) - s.u[r] - s.v[c] <= eps; };

    std::vector<char> visited(n, 0);
    std::vector<int> path_cols;
    // Finds an alternating path from `row` (which needs a new column) to `target`.
    auto reroute = [&](auto&& self, int row, int fixed_upto, int target) -> bool {
        for (int d = 0; d < n; ++d) {
            if (visited[d] || !tight(row, d)) {
                continue;
            }
            visited[d] = 1;
            if (d == target) {
                path_cols.push_back(d);
                return true;
            }
            const int next = s.row_of_col[d];
            if (next > fixed_upto && self(self, next, fixed_upto, target)) {
                path_cols.push_back(d);
                return true;
            }
        }
        return false;
    };

    for (int i = 0; i < n; ++i) {
        const int old = s.col_of_row[i];
        for (int c = 0; c < old; ++c) {
            const int holder = s.row_of_col[c];
            if (holder <= i || !tight(i, c)) {
                continue;
            }
            std::fill(visited.begin(), visited.end(), 0);
            visited[c] = 1;
            path_cols.clear();
            if (!reroute(reroute, holder, i, old)) {
                continue;
            }
            // path_cols is reversed: last entry belongs to `holder`.
            int row = holder;
            for (auto it = path_cols.rbegin(); it != path_cols.rend(); ++it) {
                const int d = *it;
                const int displaced = s.row_of_col[d];
                s.col_of_row[row] = d;
                s.row_of_col[d] = row;
                row = displaced;
            }
            s.col_of_row[i] = c;
            s.row_of_col[c] = i;
            break;
        }
    }
}

}  // namespace

LinearAssignment hungarian(const Eigen::MatrixXd& cost, double forbidden) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    LinearAssignment out;
    out.row_to_col.assign(rows, -1);
    if (rows == 0 || cols == 0) {
        return out;
    }

    double finite_sum = 0.0;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (cost(i, j) < forbidden) {
                finite_sum += std::abs(cost(i, j));
            }
        }
    }
    // One forbidden pair outweighs any difference between finite totals.
    const double big = 2.0 * finite_sum + 1.0;
    const int n = std::max(rows, cols);
    Eigen::MatrixXd square = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            square(i, j) = cost(i, j) < forbidden ? cost(i, j) : big;
        }
    }

    SquareSolution s = solve_square(square);
    make_lexicographic(square, s, 1e-10 * (1.0 + big));

    for (int i = 0; i < rows; ++i) {
        const int j = s.col_of_row[i];
        if (j < cols && cost(i, j) < forbidden) {
            out.row_to_col[i] = j;
            out.total_cost += cost(i, j);
            ++out.matched;
        }
    }
    return out;
}

}  // namespace hvis
