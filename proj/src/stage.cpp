#include "drayage/stage.hpp"

#include <cmath>
#include <sstream>

#include "drayage/errors.hpp"
#include "drayage/kernels.hpp"

namespace drayage::stage {

StageLayout make_layout(const Instance& instance) {
    StageLayout lo;
    lo.num_entry = instance.num_entry();
    lo.num_exit = instance.num_exit();
    lo.num_lanes = instance.num_lanes();
    lo.num_carriers = instance.num_carriers();

    int col = 0;
    lo.contract_offset.resize(lo.num_carriers);
    for (int k = 0; k < lo.num_carriers; ++k) {
        lo.contract_offset[k] = col;
        col += static_cast<int>(instance.carriers[k].contract_lanes.size());
    }
    lo.spot_offset = col;
    col += lo.num_carriers * lo.num_lanes;
    lo.state_offset = col;
    col += lo.num_entry + 2 * lo.num_exit;
    lo.theta_col = col;
    lo.num_vars = col + 1;

    int row = 0;
    lo.row_contract_cap.resize(lo.num_carriers);
    lo.row_spot_cap.resize(lo.num_carriers);
    for (int k = 0; k < lo.num_carriers; ++k) lo.row_contract_cap[k] = row++;
    for (int k = 0; k < lo.num_carriers; ++k) lo.row_spot_cap[k] = row++;
    lo.row_availability = row;
    row += lo.num_entry;
    lo.row_exit_storage = row;
    row += lo.num_exit;
    lo.row_entry_balance = row;
    row += lo.num_entry;
    lo.row_exit_balance = row;
    row += lo.num_exit;
    lo.row_entry_cap = row;
    row += lo.num_entry;
    if (instance.shortage_limit) {
        lo.row_shortage_cap = row;
        row += lo.num_exit;
    }
    lo.row_cuts_begin = row;
    return lo;
}

double cut_value(const Cut& cut, std::span<const double> state) {
    if (cut.gradient.size() != state.size()) {
        throw ValidationError("cut gradient does not match the state layout");
    }
    return cut.intercept + kern::dot(cut.gradient.data(), state.data(), state.size());
}

lp::LinearProgram build_stage_subproblem(const Instance& instance, int t,
                                         const SystemState& incoming,
                                         const StageRealization& realization,
                                         const std::vector<Cut>& cuts) {
    if (t < 1 || t > instance.horizon) {
        throw ValidationError("stage index " + std::to_string(t) + " outside the horizon");
    }
    const StageLayout lo = make_layout(instance);
    const int nI = lo.num_entry;
    const int nJ = lo.num_exit;
    const int m = lo.num_lanes;

    for (const Cut& cut : cuts) {
        if (cut.stage != t) {
            throw ValidationError("cut for stage " + std::to_string(cut.stage) +
                                  " attached to stage " + std::to_string(t));
        }
        if (static_cast<int>(cut.gradient.size()) != instance.state_dim()) {
            throw ValidationError("cut gradient does not match the state layout");
        }
    }
    if (static_cast<int>(realization.spot_rate.size()) != lo.num_carriers * m) {
        throw ValidationError("realization does not cover all carrier-lane spot rates");
    }

    lp::LinearProgram prog;
    prog.name = "stage" + std::to_string(t);
    prog.objective.assign(lo.num_vars, 0.0);
    prog.lower.assign(lo.num_vars, 0.0);
    prog.upper.assign(lo.num_vars, lp::kInfinity);
    prog.col_labels.assign(lo.num_vars, "");

    for (int k = 0; k < lo.num_carriers; ++k) {
        const Carrier& carrier = instance.carriers[k];
        for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
            int col = lo.contract_offset[k] + static_cast<int>(idx);
            prog.objective[col] = carrier.contract_rate[idx];
            prog.col_labels[col] = "a_" + carrier.id + "_" + std::to_string(carrier.contract_lanes[idx]);
        }
        for (int lane = 0; lane < m; ++lane) {
            int col = lo.spot_offset + k * m + lane;
            prog.objective[col] = realization.spot_rate[static_cast<std::size_t>(k) * m + lane];
            prog.col_labels[col] = "b_" + carrier.id + "_" + std::to_string(lane);
        }
    }
    for (int i = 0; i < nI; ++i) {
        prog.objective[lo.entry_col(i)] = instance.cost.entry_holding[i];
        prog.col_labels[lo.entry_col(i)] = "S_" + instance.entry_hubs[i];
    }
    for (int j = 0; j < nJ; ++j) {
        prog.objective[lo.exit_stock_col(j)] = instance.cost.exit_holding[j];
        prog.objective[lo.exit_shortage_col(j)] = instance.cost.shortage_penalty[j];
        prog.col_labels[lo.exit_stock_col(j)] = "P_" + instance.exit_hubs[j];
        prog.col_labels[lo.exit_shortage_col(j)] = "N_" + instance.exit_hubs[j];
    }
    prog.objective[lo.theta_col] = 1.0;
    prog.col_labels[lo.theta_col] = "theta";

    // carrier capacity (contract and spot blocks)
    for (int k = 0; k < lo.num_carriers; ++k) {
        const Carrier& carrier = instance.carriers[k];
        lp::SparseRow row;
        for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
            row.push(lo.contract_offset[k] + static_cast<int>(idx), 1.0);
        }
        prog.add_row(std::move(row), lp::Sense::LessEqual, carrier.contract_capacity,
                     "cap_c_" + carrier.id);
    }
    for (int k = 0; k < lo.num_carriers; ++k) {
        lp::SparseRow row;
        for (int lane = 0; lane < m; ++lane) row.push(lo.spot_offset + k * m + lane, 1.0);
        prog.add_row(std::move(row), lp::Sense::LessEqual, instance.carriers[k].spot_capacity,
                     "cap_s_" + instance.carriers[k].id);
    }

    // entry availability: total shipped from i <= incoming stock + inflow
    for (int i = 0; i < nI; ++i) {
        lp::SparseRow row;
        for (int k = 0; k < lo.num_carriers; ++k) {
            const Carrier& carrier = instance.carriers[k];
            for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
                if (instance.lane_entry(carrier.contract_lanes[idx]) == i) {
                    row.push(lo.contract_offset[k] + static_cast<int>(idx), 1.0);
                }
            }
            for (int j = 0; j < nJ; ++j) {
                row.push(lo.spot_offset + k * m + instance.lane_index(i, j), 1.0);
            }
        }
        prog.add_row(std::move(row), lp::Sense::LessEqual,
                     incoming.entry_stock[i] + realization.inflow[i],
                     "avail_" + instance.entry_hubs[i]);
    }

    // exit storage: arrivals + incoming exit stock <= capacity
    for (int j = 0; j < nJ; ++j) {
        lp::SparseRow row;
        for (int k = 0; k < lo.num_carriers; ++k) {
            const Carrier& carrier = instance.carriers[k];
            for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
                if (instance.lane_exit(carrier.contract_lanes[idx]) == j) {
                    row.push(lo.contract_offset[k] + static_cast<int>(idx), 1.0);
                }
            }
            for (int i = 0; i < nI; ++i) {
                row.push(lo.spot_offset + k * m + instance.lane_index(i, j), 1.0);
            }
        }
        prog.add_row(std::move(row), lp::Sense::LessEqual,
                     instance.exit_capacity[j] - incoming.exit_stock[j],
                     "store_" + instance.exit_hubs[j]);
    }

    // entry balance: shipped + outgoing stock = incoming stock + inflow
    for (int i = 0; i < nI; ++i) {
        lp::SparseRow row;
        for (int k = 0; k < lo.num_carriers; ++k) {
            const Carrier& carrier = instance.carriers[k];
            for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
                if (instance.lane_entry(carrier.contract_lanes[idx]) == i) {
                    row.push(lo.contract_offset[k] + static_cast<int>(idx), 1.0);
                }
            }
            for (int j = 0; j < nJ; ++j) {
                row.push(lo.spot_offset + k * m + instance.lane_index(i, j), 1.0);
            }
        }
        row.push(lo.entry_col(i), 1.0);
        prog.add_row(std::move(row), lp::Sense::Equal,
                     incoming.entry_stock[i] + realization.inflow[i],
                     "bal_" + instance.entry_hubs[i]);
    }

    // exit balance: arrivals - outgoing net stock = outflow - incoming net stock
    for (int j = 0; j < nJ; ++j) {
        lp::SparseRow row;
        for (int k = 0; k < lo.num_carriers; ++k) {
            const Carrier& carrier = instance.carriers[k];
            for (std::size_t idx = 0; idx < carrier.contract_lanes.size(); ++idx) {
                if (instance.lane_exit(carrier.contract_lanes[idx]) == j) {
                    row.push(lo.contract_offset[k] + static_cast<int>(idx), 1.0);
                }
            }
            for (int i = 0; i < nI; ++i) {
                row.push(lo.spot_offset + k * m + instance.lane_index(i, j), 1.0);
            }
        }
        row.push(lo.exit_stock_col(j), -1.0);
        row.push(lo.exit_shortage_col(j), 1.0);
        prog.add_row(std::move(row), lp::Sense::Equal,
                     realization.outflow[j] - incoming.exit_stock[j] + incoming.exit_shortage[j],
                     "bal_" + instance.exit_hubs[j]);
    }

    // outgoing entry stock cap
    for (int i = 0; i < nI; ++i) {
        lp::SparseRow row;
        row.push(lo.entry_col(i), 1.0);
        prog.add_row(std::move(row), lp::Sense::LessEqual, instance.entry_capacity[i],
                     "ecap_" + instance.entry_hubs[i]);
    }
    if (instance.shortage_limit) {
        for (int j = 0; j < nJ; ++j) {
            lp::SparseRow row;
            row.push(lo.exit_shortage_col(j), 1.0);
            prog.add_row(std::move(row), lp::Sense::LessEqual, (*instance.shortage_limit)[j],
                         "scap_" + instance.exit_hubs[j]);
        }
    }

    // one row per cut: theta >= intercept + g' s_out
    int cut_no = 0;
    for (const Cut& cut : cuts) {
        lp::SparseRow row;
        row.push(lo.theta_col, 1.0);
        for (int d = 0; d < instance.state_dim(); ++d) {
            if (cut.gradient[d] != 0.0) row.push(lo.state_offset + d, -cut.gradient[d]);
        }
        prog.add_row(std::move(row), lp::Sense::GreaterEqual, cut.intercept,
                     "cut_" + std::to_string(cut_no++));
    }
    return prog;
}

namespace {

// Best-effort diagnosis of an infeasible stage solve: relatively complete
// recourse means this only triggers on a misconfigured instance.
std::string describe_infeasibility(const Instance& instance, const SystemState& incoming,
                                   const StageRealization& realization, int t) {
    double ship_capacity = 0.0;
    for (const auto& c : instance.carriers) ship_capacity += c.contract_capacity + c.spot_capacity;
    double exit_headroom = 0.0;
    for (int j = 0; j < instance.num_exit(); ++j) {
        exit_headroom += instance.exit_capacity[j] - incoming.exit_stock[j];
    }
    for (int i = 0; i < instance.num_entry(); ++i) {
        double must_ship = incoming.entry_stock[i] + realization.inflow[i] - instance.entry_capacity[i];
        if (must_ship > std::min(ship_capacity, exit_headroom)) {
            std::ostringstream os;
            os << "stage " << t << " infeasible: entry hub " << instance.entry_hubs[i]
               << " must ship " << must_ship << " TEU but capacity allows only "
               << std::min(ship_capacity, exit_headroom)
               << " (check carrier capacities and storage limits)";
            return os.str();
        }
    }
    for (int j = 0; j < instance.num_exit(); ++j) {
        if (incoming.exit_stock[j] > instance.exit_capacity[j]) {
            return "stage " + std::to_string(t) + " infeasible: exit hub " + instance.exit_hubs[j] +
                   " is above its storage capacity";
        }
    }
    return "stage " + std::to_string(t) + " subproblem infeasible (capacity configuration error)";
}

} // namespace

StageResult solve_stage(const Instance& instance, int t, const SystemState& incoming,
                        const StageRealization& realization, const std::vector<Cut>& cuts,
                        const lp::SolverOptions& options) {
    const StageLayout lo = make_layout(instance);
    lp::LinearProgram prog = build_stage_subproblem(instance, t, incoming, realization, cuts);
    lp::LpSolution sol = lp::solve_lp(prog, options);
    if (sol.status == lp::SolveStatus::Infeasible) {
        throw SolverError(describe_infeasibility(instance, incoming, realization, t));
    }
    if (sol.status == lp::SolveStatus::Unbounded) {
        throw SolverError("stage " + std::to_string(t) + " subproblem unbounded");
    }

    StageResult result;
    result.decision.contract_moves.resize(lo.num_carriers);
    result.decision.spot_moves.resize(lo.num_carriers);
    for (int k = 0; k < lo.num_carriers; ++k) {
        const auto& lanes = instance.carriers[k].contract_lanes;
        result.decision.contract_moves[k].resize(lanes.size());
        for (std::size_t idx = 0; idx < lanes.size(); ++idx) {
            result.decision.contract_moves[k][idx] =
                std::max(0.0, sol.primal[lo.contract_offset[k] + static_cast<int>(idx)]);
        }
        result.decision.spot_moves[k].resize(lo.num_lanes);
        for (int lane = 0; lane < lo.num_lanes; ++lane) {
            result.decision.spot_moves[k][lane] =
                std::max(0.0, sol.primal[lo.spot_offset + k * lo.num_lanes + lane]);
        }
    }

    // canonical stock/shortage split of the outgoing state
    result.outgoing.entry_stock.resize(lo.num_entry);
    result.outgoing.exit_stock.resize(lo.num_exit);
    result.outgoing.exit_shortage.resize(lo.num_exit);
    for (int i = 0; i < lo.num_entry; ++i) {
        result.outgoing.entry_stock[i] = std::max(0.0, sol.primal[lo.entry_col(i)]);
    }
    for (int j = 0; j < lo.num_exit; ++j) {
        double net = sol.primal[lo.exit_stock_col(j)] - sol.primal[lo.exit_shortage_col(j)];
        result.outgoing.exit_stock[j] = std::max(net, 0.0);
        result.outgoing.exit_shortage[j] = std::max(-net, 0.0);
    }

    result.stage_cost = holding_cost(result.outgoing, instance.cost) +
                        transport_cost(result.decision, instance.carriers, realization.spot_rate);
    result.total_cost = sol.objective;

    // Sensitivity to the incoming state, assembled from the rows whose
    // right-hand side carries it.
    result.state_duals.assign(instance.state_dim(), 0.0);
    for (int i = 0; i < lo.num_entry; ++i) {
        result.state_duals[i] =
            sol.duals[lo.row_availability + i] + sol.duals[lo.row_entry_balance + i];
    }
    for (int j = 0; j < lo.num_exit; ++j) {
        result.state_duals[lo.num_entry + j] =
            -sol.duals[lo.row_exit_storage + j] - sol.duals[lo.row_exit_balance + j];
        result.state_duals[lo.num_entry + lo.num_exit + j] = sol.duals[lo.row_exit_balance + j];
    }
    return result;
}

} // namespace drayage::stage
