#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drayage {

using Money = double;
using Teu = double;

// Linear per-stage inventory cost coefficients, one entry per hub.
struct CostParams {
    std::vector<double> entry_holding;    // gamma_i, $/TEU held at an entry hub
    std::vector<double> exit_holding;     // alpha_j, $/TEU held at an exit hub
    std::vector<double> shortage_penalty; // beta_j, $/TEU of unmet outflow
};

// One carrier, seen both as a contract party (fixed rates on its awarded
// lanes) and as a spot-market counterparty (stochastic rates on all lanes).
struct Carrier {
    std::string id;
    std::vector<int> contract_lanes;   // lane indices it serves under contract
    std::vector<double> contract_rate; // $/TEU, parallel to contract_lanes
    double contract_capacity = 0.0;    // TEU per stage on the contract block
    double spot_capacity = 0.0;        // TEU per stage on the spot block
};

// Per-stage stock position. Exit hubs carry a nonnegative stock/shortage
// pair whose product must vanish (canonical decomposition of net stock).
struct SystemState {
    std::vector<Teu> entry_stock;
    std::vector<Teu> exit_stock;
    std::vector<Teu> exit_shortage;

    bool operator==(const SystemState&) const = default;
};

// Allocation for one stage: TEU moved per carrier and lane, split into the
// contract block (restricted to each carrier's contract lanes) and the spot
// block (all lanes).
struct Decision {
    // contract_moves[k] is parallel to carriers[k].contract_lanes
    std::vector<std::vector<Teu>> contract_moves;
    // spot_moves[k][lane] over all lanes
    std::vector<std::vector<Teu>> spot_moves;
};

// One realization of the exogenous data for a stage.
struct StageRealization {
    std::vector<Teu> inflow;       // per entry hub
    std::vector<Teu> outflow;      // per exit hub
    std::vector<Money> spot_rate;  // per (carrier, lane), carrier-major
};

// Full static problem description.
struct Instance {
    std::vector<std::string> entry_hubs;
    std::vector<std::string> exit_hubs;
    int horizon = 1; // number of stages tau
    std::vector<Carrier> carriers;
    CostParams cost;
    std::vector<Teu> entry_capacity;
    std::vector<Teu> exit_capacity;
    std::optional<std::vector<Teu>> shortage_limit; // disabled when absent
    SystemState initial_state;

    int num_entry() const { return static_cast<int>(entry_hubs.size()); }
    int num_exit() const { return static_cast<int>(exit_hubs.size()); }
    int num_lanes() const { return num_entry() * num_exit(); }
    int num_carriers() const { return static_cast<int>(carriers.size()); }
    // state vector layout: entry stocks, exit stocks, exit shortages
    int state_dim() const { return num_entry() + 2 * num_exit(); }

    int lane_index(int entry, int exit) const { return entry * num_exit() + exit; }
    int lane_entry(int lane) const { return lane / num_exit(); }
    int lane_exit(int lane) const { return lane % num_exit(); }

    // Throws ValidationError on any broken invariant.
    void validate() const;
};

// Tolerance used for the stock/shortage complementarity invariant.
inline constexpr double kComplementarityTol = 1e-9;

void validate_state(const SystemState& state, int num_entry, int num_exit);

// Sum of entry holding, exit holding and shortage penalties for one stage.
Money holding_cost(const SystemState& state, const CostParams& cost);

// Contract rates on the contract block plus realized spot rates on the spot
// block. spot_rates is carrier-major over all lanes.
Money transport_cost(const Decision& decision, const std::vector<Carrier>& carriers,
                     std::span<const Money> spot_rates);

// Deterministic balance update: entry stocks absorb inflow minus shipments,
// exit net stock absorbs arrivals minus outflow and is re-split into the
// canonical nonnegative stock/shortage pair.
SystemState state_transition(const SystemState& state, const Decision& decision,
                             const StageRealization& realization, const Instance& instance);

std::vector<double> flatten_state(const SystemState& state);
SystemState unflatten_state(std::span<const double> flat, int num_entry, int num_exit);

// TEU shipped out of each entry hub / into each exit hub by a decision.
std::vector<Teu> shipped_from_entries(const Decision& decision, const Instance& instance);
std::vector<Teu> shipped_into_exits(const Decision& decision, const Instance& instance);

Decision zero_decision(const Instance& instance);

} // namespace drayage
