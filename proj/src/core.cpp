#include "drayage/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "drayage/errors.hpp"

namespace drayage {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

void require_size(const std::vector<double>& v, std::size_t n, const char* name) {
    if (v.size() != n) {
        std::ostringstream os;
        os << name << " has dimension " << v.size() << ", expected " << n;
        throw ValidationError(os.str());
    }
}

void require_nonneg(const std::vector<double>& v, const char* name) {
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw ValidationError(std::string(name) + " must be finite and nonnegative");
        }
    }
}

} // namespace

void validate_state(const SystemState& state, int num_entry, int num_exit) {
    require_size(state.entry_stock, static_cast<std::size_t>(num_entry), "entry_stock");
    require_size(state.exit_stock, static_cast<std::size_t>(num_exit), "exit_stock");
    require_size(state.exit_shortage, static_cast<std::size_t>(num_exit), "exit_shortage");
    require_nonneg(state.entry_stock, "entry_stock");
    require_nonneg(state.exit_stock, "exit_stock");
    require_nonneg(state.exit_shortage, "exit_shortage");
    for (int j = 0; j < num_exit; ++j) {
        if (state.exit_stock[j] * state.exit_shortage[j] > kComplementarityTol) {
            std::ostringstream os;
            os << "exit hub " << j << " holds stock " << state.exit_stock[j] << " and shortage "
               << state.exit_shortage[j] << " simultaneously";
            throw ValidationError(os.str());
        }
    }
}

void Instance::validate() const {
    require(!entry_hubs.empty(), "instance needs at least one entry hub");
    require(!exit_hubs.empty(), "instance needs at least one exit hub");
    require(horizon >= 1, "horizon must be at least 1");

    std::set<std::string> ids(entry_hubs.begin(), entry_hubs.end());
    for (const auto& id : exit_hubs) {
        require(ids.insert(id).second, "duplicate or shared hub id: " + id);
    }
    require(ids.size() == entry_hubs.size() + exit_hubs.size(), "hub ids must be unique");

    const auto nI = static_cast<std::size_t>(num_entry());
    const auto nJ = static_cast<std::size_t>(num_exit());
    require_size(cost.entry_holding, nI, "entry_holding");
    require_size(cost.exit_holding, nJ, "exit_holding");
    require_size(cost.shortage_penalty, nJ, "shortage_penalty");
    require_nonneg(cost.entry_holding, "entry_holding");
    require_nonneg(cost.exit_holding, "exit_holding");
    require_nonneg(cost.shortage_penalty, "shortage_penalty");

    require_size(entry_capacity, nI, "entry_capacity");
    require_size(exit_capacity, nJ, "exit_capacity");
    require_nonneg(entry_capacity, "entry_capacity");
    require_nonneg(exit_capacity, "exit_capacity");
    if (shortage_limit) {
        require_size(*shortage_limit, nJ, "shortage_limit");
        require_nonneg(*shortage_limit, "shortage_limit");
    }

    for (const auto& c : carriers) {
        require(c.contract_lanes.size() == c.contract_rate.size(),
                "carrier " + c.id + ": contract_rate must be defined exactly on contract_lanes");
        require(c.contract_capacity >= 0 && c.spot_capacity >= 0,
                "carrier " + c.id + ": capacities must be nonnegative");
        require_nonneg(c.contract_rate, "contract_rate");
        std::set<int> seen;
        for (int lane : c.contract_lanes) {
            require(lane >= 0 && lane < num_lanes(), "carrier " + c.id + ": lane index out of range");
            require(seen.insert(lane).second, "carrier " + c.id + ": duplicate contract lane");
        }
    }

    validate_state(initial_state, num_entry(), num_exit());
    for (int i = 0; i < num_entry(); ++i) {
        require(initial_state.entry_stock[i] <= entry_capacity[i] + kComplementarityTol,
                "initial entry stock exceeds capacity at hub " + entry_hubs[i]);
    }
    for (int j = 0; j < num_exit(); ++j) {
        require(initial_state.exit_stock[j] <= exit_capacity[j] + kComplementarityTol,
                "initial exit stock exceeds capacity at hub " + exit_hubs[j]);
    }
}

Money holding_cost(const SystemState& state, const CostParams& cost) {
    if (state.entry_stock.size() != cost.entry_holding.size() ||
        state.exit_stock.size() != cost.exit_holding.size() ||
        state.exit_shortage.size() != cost.shortage_penalty.size()) {
        throw ValidationError("holding_cost: state and cost dimensions disagree");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < state.entry_stock.size(); ++i) {
        total += cost.entry_holding[i] * state.entry_stock[i];
    }
    for (std::size_t j = 0; j < state.exit_stock.size(); ++j) {
        total += cost.exit_holding[j] * state.exit_stock[j];
        total += cost.shortage_penalty[j] * state.exit_shortage[j];
    }
    return total;
}

Money transport_cost(const Decision& decision, const std::vector<Carrier>& carriers,
                     std::span<const Money> spot_rates) {
    if (decision.contract_moves.size() != carriers.size() ||
        decision.spot_moves.size() != carriers.size()) {
        throw ValidationError("transport_cost: decision does not cover every carrier");
    }
    std::size_t lanes = carriers.empty() ? 0 : decision.spot_moves.front().size();
    if (spot_rates.size() < carriers.size() * lanes) {
        throw ValidationError("transport_cost: spot_rates does not cover all carrier-lane pairs");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < carriers.size(); ++k) {
        const auto& moves = decision.contract_moves[k];
        if (moves.size() != carriers[k].contract_lanes.size()) {
            throw ValidationError("transport_cost: carrier " + carriers[k].id +
                                  " decision references lanes outside its contract set");
        }
        for (std::size_t idx = 0; idx < moves.size(); ++idx) {
            total += carriers[k].contract_rate[idx] * moves[idx];
        }
        const auto& spot = decision.spot_moves[k];
        if (spot.size() != lanes) {
            throw ValidationError("transport_cost: spot block has inconsistent lane count");
        }
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            total += spot_rates[k * lanes + lane] * spot[lane];
        }
    }
    return total;
}

std::vector<Teu> shipped_from_entries(const Decision& decision, const Instance& instance) {
    std::vector<Teu> out(instance.num_entry(), 0.0);
    for (int k = 0; k < instance.num_carriers(); ++k) {
        const auto& carrier = instance.carriers[k];
        for (std::size_t idx = 0; idx < decision.contract_moves[k].size(); ++idx) {
            out[instance.lane_entry(carrier.contract_lanes[idx])] += decision.contract_moves[k][idx];
        }
        for (int lane = 0; lane < instance.num_lanes(); ++lane) {
            out[instance.lane_entry(lane)] += decision.spot_moves[k][lane];
        }
    }
    return out;
}

std::vector<Teu> shipped_into_exits(const Decision& decision, const Instance& instance) {
    std::vector<Teu> in(instance.num_exit(), 0.0);
    for (int k = 0; k < instance.num_carriers(); ++k) {
        const auto& carrier = instance.carriers[k];
        for (std::size_t idx = 0; idx < decision.contract_moves[k].size(); ++idx) {
            in[instance.lane_exit(carrier.contract_lanes[idx])] += decision.contract_moves[k][idx];
        }
        for (int lane = 0; lane < instance.num_lanes(); ++lane) {
            in[instance.lane_exit(lane)] += decision.spot_moves[k][lane];
        }
    }
    return in;
}

SystemState state_transition(const SystemState& state, const Decision& decision,
                             const StageRealization& realization, const Instance& instance) {
    const int nI = instance.num_entry();
    const int nJ = instance.num_exit();
    const auto shipped_out = shipped_from_entries(decision, instance);
    const auto shipped_in = shipped_into_exits(decision, instance);

    SystemState next;
    next.entry_stock.resize(nI);
    next.exit_stock.resize(nJ);
    next.exit_shortage.resize(nJ);

    for (int i = 0; i < nI; ++i) {
        double s = state.entry_stock[i] + realization.inflow[i] - shipped_out[i];
        if (s < -kComplementarityTol) {
            std::ostringstream os;
            os << "state_transition: entry hub " << instance.entry_hubs[i]
               << " ships more than available (deficit " << -s << " TEU)";
            throw SolverError(os.str());
        }
        next.entry_stock[i] = std::max(s, 0.0);
    }
    for (int j = 0; j < nJ; ++j) {
        double net = state.exit_stock[j] - state.exit_shortage[j] + shipped_in[j] -
                     realization.outflow[j];
        next.exit_stock[j] = std::max(net, 0.0);
        next.exit_shortage[j] = std::max(-net, 0.0);
    }
    return next;
}

std::vector<double> flatten_state(const SystemState& state) {
    std::vector<double> flat;
    flat.reserve(state.entry_stock.size() + 2 * state.exit_stock.size());
    flat.insert(flat.end(), state.entry_stock.begin(), state.entry_stock.end());
    flat.insert(flat.end(), state.exit_stock.begin(), state.exit_stock.end());
    flat.insert(flat.end(), state.exit_shortage.begin(), state.exit_shortage.end());
    return flat;
}

SystemState unflatten_state(std::span<const double> flat, int num_entry, int num_exit) {
    if (flat.size() != static_cast<std::size_t>(num_entry + 2 * num_exit)) {
        throw ValidationError("unflatten_state: wrong dimension");
    }
    SystemState state;
    state.entry_stock.assign(flat.begin(), flat.begin() + num_entry);
    state.exit_stock.assign(flat.begin() + num_entry, flat.begin() + num_entry + num_exit);
    state.exit_shortage.assign(flat.begin() + num_entry + num_exit, flat.end());
    return state;
}

Decision zero_decision(const Instance& instance) {
    Decision d;
    d.contract_moves.resize(instance.num_carriers());
    d.spot_moves.resize(instance.num_carriers());
    for (int k = 0; k < instance.num_carriers(); ++k) {
        d.contract_moves[k].assign(instance.carriers[k].contract_lanes.size(), 0.0);
        d.spot_moves[k].assign(instance.num_lanes(), 0.0);
    }
    return d;
}

} // namespace drayage
