#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace drayage::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

enum class SolveStatus { Optimal, Infeasible, Unbounded };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SparseRow {
    std::vector<int> cols;
    std::vector<double> vals;

    void push(int col, double val) {
        cols.push_back(col);
        vals.push_back(val);
    }
};

// Minimization problem  min c'x  s.t.  rows, lb <= x <= ub.
// Lower bounds default to 0; upper bounds default to +inf.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> col_labels;

    std::vector<SparseRow> rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;
    std::vector<std::string> row_labels;

    std::string name = "lp";

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_variable(double cost, double lb = 0.0, double ub = kInfinity, std::string label = "");
    void add_row(SparseRow row, Sense sense, double rhs_value, std::string label = "");

    // Structural consistency; throws ValidationError.
    void validate() const;
};

// Duals follow the right-hand-side sensitivity convention for a minimization:
// duals[r] is d(objective)/d(rhs[r]). The dual of a <= row is therefore <= 0.
struct LpSolution {
    SolveStatus status = SolveStatus::Optimal;
    std::vector<double> primal;
    double objective = 0.0;
    std::vector<double> duals;
};

struct SolverOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;  // reduced-cost threshold
    double pivot_tol = 1e-10;
    double duality_gap_tol = 1e-6; // relative, checked on every Optimal return
    int refactor_interval = 64;
    // Dantzig pricing until this many pivots, then Bland's rule.
    long bland_threshold = -1; // -1: derived from problem size
    long max_pivots = -1;      // -1: derived from problem size
};

// Bundled deterministic revised simplex (dense basis inverse, two phases).
LpSolution solve_lp(const LinearProgram& program, const SolverOptions& options = {});

// Fixed-column MPS dump for debugging; format documented in the README.
void write_mps(const LinearProgram& program, std::ostream& os);

} // namespace drayage::lp
