#include "drayage/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "drayage/errors.hpp"
#include "drayage/kernels.hpp"

namespace drayage::lp {

int LinearProgram::add_variable(double cost, double lb, double ub, std::string label) {
    objective.push_back(cost);
    lower.push_back(lb);
    upper.push_back(ub);
    col_labels.push_back(std::move(label));
    return num_vars() - 1;
}

void LinearProgram::add_row(SparseRow row, Sense sense, double rhs_value, std::string label) {
    rows.push_back(std::move(row));
    senses.push_back(sense);
    rhs.push_back(rhs_value);
    row_labels.push_back(std::move(label));
}

void LinearProgram::validate() const {
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n || col_labels.size() != n) {
        throw ValidationError("LinearProgram: column vectors have inconsistent sizes");
    }
    if (rows.size() != senses.size() || rows.size() != rhs.size() ||
        rows.size() != row_labels.size()) {
        throw ValidationError("LinearProgram: row vectors have inconsistent sizes");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(objective[j])) throw ValidationError("LinearProgram: non-finite objective");
        if (!std::isfinite(lower[j])) {
            throw ValidationError("LinearProgram: lower bounds must be finite");
        }
        if (lower[j] > upper[j]) throw ValidationError("LinearProgram: lower bound above upper bound");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!std::isfinite(rhs[r])) throw ValidationError("LinearProgram: non-finite rhs");
        if (rows[r].cols.size() != rows[r].vals.size()) {
            throw ValidationError("LinearProgram: sparse row with mismatched arrays");
        }
        for (std::size_t k = 0; k < rows[r].cols.size(); ++k) {
            int c = rows[r].cols[k];
            if (c < 0 || c >= static_cast<int>(n)) {
                throw ValidationError("LinearProgram: column index out of range in row " +
                                      std::to_string(r));
            }
            if (!std::isfinite(rows[r].vals[k])) {
                throw ValidationError("LinearProgram: non-finite coefficient");
            }
        }
    }
}

namespace {

struct Column {
    std::vector<int> rows;
    std::vector<double> vals;
};

// Two-phase primal revised simplex on the normalized system
//   min c'z   s.t.  A z = b,  z >= 0,  b >= 0,
// with a dense, column-major basis inverse.
class Simplex {
public:
    Simplex(const LinearProgram& user, const SolverOptions& opt) : user_(user), opt_(opt) {
        normalize();
    }

    LpSolution run() {
        if (m_ > 0 && !phase1()) {
            return LpSolution{SolveStatus::Infeasible, {}, 0.0, {}};
        }
        purge_artificials();
        if (!phase2()) {
            return LpSolution{SolveStatus::Unbounded, {}, 0.0, {}};
        }
        return extract();
    }

private:
    const LinearProgram& user_;
    SolverOptions opt_;

    int m_ = 0;               // rows in normalized system (user rows + upper-bound rows)
    int n_user_rows_ = 0;
    int n_struct_ = 0;        // shifted structural columns
    int artificial_begin_ = 0;
    std::vector<Column> cols_;
    std::vector<double> cost_;   // phase-2 cost per normalized column
    std::vector<double> b_;      // normalized rhs, >= 0
    std::vector<signed char> flip_;
    double obj_shift_ = 0.0;     // c'l from the lower-bound shift

    std::vector<int> basis_;         // column basic at each row position
    std::vector<unsigned char> in_basis_;
    std::vector<double> binv_;       // column-major m x m
    std::vector<double> xb_;
    std::vector<double> y_;          // row duals of the current basis
    std::vector<double> cb_;
    std::vector<double> w_;          // entering column in basis coordinates
    bool phase1_active_ = true;
    long pivots_ = 0;
    long pivots_since_refactor_ = 0;
    long bland_threshold_ = 0;
    long max_pivots_ = 0;
    double b_scale_ = 1.0;

    double* binv_col(int c) { return binv_.data() + static_cast<std::size_t>(c) * m_; }

    void normalize() {
        n_user_rows_ = user_.num_rows();
        n_struct_ = user_.num_vars();

        // rows from finite upper bounds: z_j <= u_j - l_j
        std::vector<std::pair<int, double>> ub_rows;
        for (int j = 0; j < n_struct_; ++j) {
            if (std::isfinite(user_.upper[j])) {
                ub_rows.emplace_back(j, user_.upper[j] - user_.lower[j]);
            }
            obj_shift_ += user_.objective[j] * user_.lower[j];
        }
        m_ = n_user_rows_ + static_cast<int>(ub_rows.size());

        b_.assign(m_, 0.0);
        flip_.assign(m_, 1);
        std::vector<Sense> senses(m_);
        cols_.assign(n_struct_, Column{});
        cost_.assign(n_struct_, 0.0);
        for (int j = 0; j < n_struct_; ++j) cost_[j] = user_.objective[j];

        for (int r = 0; r < n_user_rows_; ++r) {
            double shift = 0.0;
            const auto& row = user_.rows[r];
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                shift += row.vals[k] * user_.lower[row.cols[k]];
            }
            b_[r] = user_.rhs[r] - shift;
            senses[r] = user_.senses[r];
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                cols_[row.cols[k]].rows.push_back(r);
                cols_[row.cols[k]].vals.push_back(row.vals[k]);
            }
        }
        for (std::size_t u = 0; u < ub_rows.size(); ++u) {
            int r = n_user_rows_ + static_cast<int>(u);
            b_[r] = ub_rows[u].second;
            senses[r] = Sense::LessEqual;
            cols_[ub_rows[u].first].rows.push_back(r);
            cols_[ub_rows[u].first].vals.push_back(1.0);
        }

        // slacks, then flips so that b >= 0
        std::vector<int> slack_col(m_, -1);
        for (int r = 0; r < m_; ++r) {
            if (senses[r] == Sense::Equal) continue;
            double coef = senses[r] == Sense::LessEqual ? 1.0 : -1.0;
            slack_col[r] = static_cast<int>(cols_.size());
            Column col;
            col.rows.push_back(r);
            col.vals.push_back(coef);
            cols_.push_back(std::move(col));
            cost_.push_back(0.0);
        }
        for (int r = 0; r < m_; ++r) {
            if (b_[r] < 0.0) {
                b_[r] = -b_[r];
                flip_[r] = -1;
            }
        }
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            for (std::size_t k = 0; k < cols_[j].rows.size(); ++k) {
                if (flip_[cols_[j].rows[k]] < 0) cols_[j].vals[k] = -cols_[j].vals[k];
            }
        }

        b_scale_ = 1.0;
        for (int r = 0; r < m_; ++r) b_scale_ = std::max(b_scale_, std::abs(b_[r]));

        // initial basis: slack where it has coefficient +1, else artificial
        artificial_begin_ = static_cast<int>(cols_.size());
        basis_.assign(m_, -1);
        for (int r = 0; r < m_; ++r) {
            int sc = slack_col[r];
            bool slack_ok = sc >= 0 && cols_[sc].vals.front() > 0.0;
            if (slack_ok) {
                basis_[r] = sc;
            } else {
                Column art;
                art.rows.push_back(r);
                art.vals.push_back(1.0);
                basis_[r] = static_cast<int>(cols_.size());
                cols_.push_back(std::move(art));
                cost_.push_back(0.0);
            }
        }
        in_basis_.assign(cols_.size(), 0);
        for (int r = 0; r < m_; ++r) in_basis_[basis_[r]] = 1;

        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) binv_col(r)[r] = 1.0;
        xb_ = b_;
        y_.assign(m_, 0.0);
        cb_.assign(m_, 0.0);
        w_.assign(m_, 0.0);

        const long size_term = 10L * (m_ + static_cast<long>(cols_.size()));
        bland_threshold_ =
            opt_.bland_threshold >= 0 ? opt_.bland_threshold : 1000 + size_term;
        max_pivots_ = opt_.max_pivots >= 0 ? opt_.max_pivots : 20000 + 10 * size_term;
    }

    void compute_duals(const std::vector<double>& phase_cost) {
        for (int i = 0; i < m_; ++i) cb_[i] = phase_cost[basis_[i]];
        for (int c = 0; c < m_; ++c) y_[c] = kern::dot(cb_.data(), binv_col(c), m_);
    }

    double reduced_cost(int j, const std::vector<double>& phase_cost) const {
        const Column& col = cols_[j];
        double acc = phase_cost[j];
        for (std::size_t k = 0; k < col.rows.size(); ++k) {
            acc -= y_[col.rows[k]] * col.vals[k];
        }
        return acc;
    }

    // Most negative reduced cost (ties to lowest index), or Bland's rule
    // after the pivot budget for Dantzig pricing is exhausted.
    int choose_entering(const std::vector<double>& phase_cost, bool allow_artificials) {
        const bool bland = pivots_ > bland_threshold_;
        int best = -1;
        double best_val = -opt_.optimality_tol;
        const int limit = allow_artificials ? static_cast<int>(cols_.size()) : artificial_begin_;
        for (int j = 0; j < limit; ++j) {
            if (in_basis_[j]) continue;
            if (j >= artificial_begin_) continue; // artificials never re-enter
            double d = reduced_cost(j, phase_cost);
            if (d < best_val) {
                if (bland) return j;
                best_val = d;
                best = j;
            }
        }
        return best;
    }

    void compute_entering_column(int j) {
        std::fill(w_.begin(), w_.end(), 0.0);
        const Column& col = cols_[j];
        for (std::size_t k = 0; k < col.rows.size(); ++k) {
            kern::axpy(static_cast<std::size_t>(m_), col.vals[k], binv_col(col.rows[k]), w_.data());
        }
    }

    // Min-ratio row, ties broken by lowest basic variable index.
    int choose_leaving() const {
        int arg = -1;
        double best_t = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (w_[i] > opt_.pivot_tol) {
                double t = std::max(xb_[i], 0.0) / w_[i];
                if (arg < 0 || t < best_t - 1e-12 ||
                    (t <= best_t + 1e-12 && basis_[i] < basis_[arg])) {
                    arg = i;
                    best_t = t;
                }
            }
        }
        return arg;
    }

    void pivot(int entering, int p) {
        const double wp = w_[p];
        const double t = std::max(xb_[p], 0.0) / wp;
        kern::axpy(static_cast<std::size_t>(m_), -t, w_.data(), xb_.data());
        xb_[p] = t;

        // binv <- E binv with E the eta matrix sending w to e_p
        std::vector<double>& wtmp = w_;
        wtmp[p] = wp - 1.0;
        for (int c = 0; c < m_; ++c) {
            double* col = binv_col(c);
            double vp = col[p] / wp;
            if (vp != 0.0) {
                kern::axpy(static_cast<std::size_t>(m_), -vp, wtmp.data(), col);
                col[p] = vp;
            }
        }

        in_basis_[basis_[p]] = 0;
        basis_[p] = entering;
        in_basis_[entering] = 1;
        ++pivots_;
        if (++pivots_since_refactor_ >= opt_.refactor_interval) refactor();
    }

    void refactor() {
        pivots_since_refactor_ = 0;
        // row-major Gauss-Jordan of the basis matrix, then transpose
        std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int pos = 0; pos < m_; ++pos) {
            const Column& col = cols_[basis_[pos]];
            for (std::size_t k = 0; k < col.rows.size(); ++k) {
                a[static_cast<std::size_t>(col.rows[k]) * m_ + pos] = col.vals[k];
            }
            inv[static_cast<std::size_t>(pos) * m_ + pos] = 1.0;
        }
        for (int k = 0; k < m_; ++k) {
            int piv = k;
            double best = std::abs(a[static_cast<std::size_t>(k) * m_ + k]);
            for (int i = k + 1; i < m_; ++i) {
                double v = std::abs(a[static_cast<std::size_t>(i) * m_ + k]);
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best <= opt_.pivot_tol) throw SolverError("simplex: basis matrix became singular");
            if (piv != k) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(a[static_cast<std::size_t>(piv) * m_ + c],
                              a[static_cast<std::size_t>(k) * m_ + c]);
                    std::swap(inv[static_cast<std::size_t>(piv) * m_ + c],
                              inv[static_cast<std::size_t>(k) * m_ + c]);
                }
            }
            double* ak = a.data() + static_cast<std::size_t>(k) * m_;
            double* ik = inv.data() + static_cast<std::size_t>(k) * m_;
            const double scale = 1.0 / ak[k];
            for (int c = 0; c < m_; ++c) ak[c] *= scale;
            for (int c = 0; c < m_; ++c) ik[c] *= scale;
            for (int i = 0; i < m_; ++i) {
                if (i == k) continue;
                double f = a[static_cast<std::size_t>(i) * m_ + k];
                if (f == 0.0) continue;
                kern::axpy(static_cast<std::size_t>(m_), -f, ak,
                           a.data() + static_cast<std::size_t>(i) * m_);
                kern::axpy(static_cast<std::size_t>(m_), -f, ik,
                           inv.data() + static_cast<std::size_t>(i) * m_);
            }
        }
        for (int r = 0; r < m_; ++r) {
            for (int c = 0; c < m_; ++c) {
                binv_col(c)[r] = inv[static_cast<std::size_t>(r) * m_ + c];
            }
        }
        // refresh basic values
        std::fill(xb_.begin(), xb_.end(), 0.0);
        for (int c = 0; c < m_; ++c) {
            if (b_[c] != 0.0) kern::axpy(static_cast<std::size_t>(m_), b_[c], binv_col(c), xb_.data());
        }
        const double guard = 1e-6 * (1.0 + b_scale_);
        for (int i = 0; i < m_; ++i) {
            if (xb_[i] < -guard) {
                throw SolverError("simplex: numerical drift made the basis infeasible");
            }
            if (xb_[i] < 0.0) xb_[i] = 0.0;
        }
    }

    [[noreturn]] void pivot_budget_exceeded(const char* phase) {
        std::ostringstream os;
        os << "simplex: pivot budget exhausted in " << phase << " after " << pivots_
           << " pivots (rows=" << m_ << ", cols=" << cols_.size() << ")";
        throw SolverError(os.str());
    }

    // Returns false on infeasibility.
    bool phase1() {
        std::vector<double> cost1(cols_.size(), 0.0);
        for (std::size_t j = artificial_begin_; j < cols_.size(); ++j) cost1[j] = 1.0;
        bool any_artificial = cols_.size() > static_cast<std::size_t>(artificial_begin_);
        if (!any_artificial) return true;

        while (true) {
            compute_duals(cost1);
            int entering = choose_entering(cost1, false);
            if (entering < 0) break;
            compute_entering_column(entering);
            int leave = choose_leaving();
            if (leave < 0) {
                throw SolverError("simplex: phase-1 objective unbounded (internal error)");
            }
            pivot(entering, leave);
            if (pivots_ > max_pivots_) pivot_budget_exceeded("phase 1");
        }
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= artificial_begin_) infeas += xb_[i];
        }
        return infeas <= 10.0 * opt_.feasibility_tol * (1.0 + b_scale_);
    }

    // Degenerate pivots that remove artificials from the basis where possible.
    // Rows whose artificial cannot leave are linearly dependent; their
    // artificial stays basic at zero and is never touched again.
    void purge_artificials() {
        for (int p = 0; p < m_; ++p) {
            if (basis_[p] < artificial_begin_) continue;
            xb_[p] = 0.0;
            int entering = -1;
            for (int j = 0; j < artificial_begin_; ++j) {
                if (in_basis_[j]) continue;
                const Column& col = cols_[j];
                double wp = 0.0;
                for (std::size_t k = 0; k < col.rows.size(); ++k) {
                    wp += col.vals[k] * binv_col(col.rows[k])[p];
                }
                if (std::abs(wp) > 1e-7) {
                    entering = j;
                    break;
                }
            }
            if (entering >= 0) {
                compute_entering_column(entering);
                // direct degenerate pivot at row p
                in_basis_[basis_[p]] = 0;
                const double wp = w_[p];
                std::vector<double>& wtmp = w_;
                wtmp[p] = wp - 1.0;
                for (int c = 0; c < m_; ++c) {
                    double* col = binv_col(c);
                    double vp = col[p] / wp;
                    if (vp != 0.0) {
                        kern::axpy(static_cast<std::size_t>(m_), -vp, wtmp.data(), col);
                        col[p] = vp;
                    }
                }
                basis_[p] = entering;
                in_basis_[entering] = 1;
                xb_[p] = 0.0;
            }
        }
        phase1_active_ = false;
    }

    // Returns false when the problem is unbounded.
    bool phase2() {
        while (true) {
            compute_duals(cost_);
            int entering = choose_entering(cost_, false);
            if (entering < 0) return true;
            compute_entering_column(entering);
            int leave = choose_leaving();
            if (leave < 0) return false;
            pivot(entering, leave);
            if (pivots_ > max_pivots_) pivot_budget_exceeded("phase 2");
        }
    }

    LpSolution extract() {
        LpSolution sol;
        sol.status = SolveStatus::Optimal;
        std::vector<double> z(cols_.size(), 0.0);
        for (int i = 0; i < m_; ++i) z[basis_[i]] = xb_[i];

        sol.primal.resize(n_struct_);
        double obj = 0.0;
        for (int j = 0; j < n_struct_; ++j) {
            sol.primal[j] = user_.lower[j] + z[j];
            obj += user_.objective[j] * sol.primal[j];
        }
        sol.objective = obj;

        compute_duals(cost_);
        sol.duals.resize(n_user_rows_);
        for (int r = 0; r < n_user_rows_; ++r) {
            sol.duals[r] = flip_[r] < 0 ? -y_[r] : y_[r];
        }

        validate_solution(sol, z);
        return sol;
    }

    void validate_solution(const LpSolution& sol, const std::vector<double>& z) {
        // primal feasibility of the reported solution
        for (int r = 0; r < n_user_rows_; ++r) {
            const auto& row = user_.rows[r];
            double lhs = 0.0;
            for (std::size_t k = 0; k < row.cols.size(); ++k) {
                lhs += row.vals[k] * sol.primal[row.cols[k]];
            }
            const double tol = 100.0 * opt_.feasibility_tol * (1.0 + std::abs(user_.rhs[r]));
            const double diff = lhs - user_.rhs[r];
            bool ok = true;
            switch (user_.senses[r]) {
                case Sense::LessEqual: ok = diff <= tol; break;
                case Sense::GreaterEqual: ok = diff >= -tol; break;
                case Sense::Equal: ok = std::abs(diff) <= tol; break;
            }
            if (!ok) {
                std::ostringstream os;
                os << "simplex: reported solution violates row " << r;
                os << " (" << user_.row_labels[r] << ") by " << diff;
                throw SolverError(os.str());
            }
        }
        // duality gap on the normalized system
        double obj_norm = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) obj_norm += cost_[j] * z[j];
        double dual_norm = kern::dot(y_.data(), b_.data(), m_);
        if (std::abs(obj_norm - dual_norm) >
            opt_.duality_gap_tol * (1.0 + std::abs(obj_norm))) {
            std::ostringstream os;
            os << "simplex: duality gap " << obj_norm - dual_norm << " exceeds tolerance";
            throw SolverError(os.str());
        }
    }
};

} // namespace

LpSolution solve_lp(const LinearProgram& program, const SolverOptions& options) {
    program.validate();
    if (program.num_vars() == 0) {
        return LpSolution{SolveStatus::Optimal, {}, 0.0, std::vector<double>(program.num_rows(), 0.0)};
    }
    Simplex simplex(program, options);
    return simplex.run();
}

} // namespace drayage::lp
