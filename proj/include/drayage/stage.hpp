#pragma once

#include <vector>

#include "drayage/core.hpp"
#include "drayage/lp.hpp"

namespace drayage::stage {

// Affine lower bound on the expected cost-to-go, expressed over the
// outgoing state coordinates (entry stocks, exit stocks, exit shortages).
struct Cut {
    int stage = 0;
    double intercept = 0.0;
    std::vector<double> gradient;
};

// Column/row bookkeeping of a stage subproblem, fixed by the instance.
struct StageLayout {
    int num_entry = 0;
    int num_exit = 0;
    int num_lanes = 0;
    int num_carriers = 0;

    std::vector<int> contract_offset; // per carrier, into its contract_lanes
    int spot_offset = 0;              // + k * num_lanes + lane
    int state_offset = 0;             // entry stocks, exit stocks, shortages
    int theta_col = 0;
    int num_vars = 0;

    std::vector<int> row_contract_cap; // per carrier
    std::vector<int> row_spot_cap;     // per carrier
    int row_availability = 0;          // + entry index
    int row_exit_storage = 0;          // + exit index
    int row_entry_balance = 0;         // + entry index
    int row_exit_balance = 0;          // + exit index
    int row_entry_cap = 0;             // + entry index
    int row_shortage_cap = -1;         // + exit index, -1 when disabled
    int row_cuts_begin = 0;

    int entry_col(int i) const { return state_offset + i; }
    int exit_stock_col(int j) const { return state_offset + num_entry + j; }
    int exit_shortage_col(int j) const { return state_offset + num_entry + num_exit + j; }
};

StageLayout make_layout(const Instance& instance);

// Assembles the stage-t linear program: immediate transport cost plus
// holding on the outgoing state plus the cut-approximated cost-to-go.
lp::LinearProgram build_stage_subproblem(const Instance& instance, int t,
                                         const SystemState& incoming,
                                         const StageRealization& realization,
                                         const std::vector<Cut>& cuts);

struct StageResult {
    Decision decision;
    SystemState outgoing;
    double stage_cost = 0.0; // h(outgoing) + f_t(decision)
    double total_cost = 0.0; // stage_cost + theta
    // marginal value of one extra TEU in each incoming state coordinate
    std::vector<double> state_duals;
};

StageResult solve_stage(const Instance& instance, int t, const SystemState& incoming,
                        const StageRealization& realization, const std::vector<Cut>& cuts,
                        const lp::SolverOptions& options = {});

// Value of a cut at a flattened state.
double cut_value(const Cut& cut, std::span<const double> state);

} // namespace drayage::stage
