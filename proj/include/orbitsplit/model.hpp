#pragma once

// Physical model of the hybrid LEO-satellite / HAPS / gateway RAN:
// functional split catalog, per-side computational loads, processing and
// transmission power, feeder propagation latency and the per-configuration
// feasibility checks used by the optimizer and the learning environment.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitsplit {

enum class NodeId { GAT = 0, SAT = 1, HAP = 2 };

inline constexpr std::array<NodeId, 3> kAllNodes{NodeId::GAT, NodeId::SAT, NodeId::HAP};

inline const char* to_string(NodeId n) {
    switch (n) {
        case NodeId::GAT: return "GAT";
        case NodeId::SAT: return "SAT";
        case NodeId::HAP: return "HAP";
    }
    return "?";
}

// Protocol-stack functions distributed between DU and CU by a split option.
// MAC and RLC are divisible into low/high halves; PHY and PDCP are not.
enum class FunctionId { PHY, LowMac, HighMac, LowRlc, HighRlc, PDCP };

inline constexpr std::array<FunctionId, 6> kAllFunctions{
    FunctionId::PHY, FunctionId::LowMac, FunctionId::HighMac,
    FunctionId::LowRlc, FunctionId::HighRlc, FunctionId::PDCP};

// The five CU/DU placement options, in catalog order. Disaggregated pairs
// always anchor the CU at the gateway.
enum class Placement { MonoGat = 0, GatSat = 1, MonoSat = 2, GatHap = 3, MonoHap = 4 };

inline constexpr std::array<Placement, 5> kAllPlacements{
    Placement::MonoGat, Placement::GatSat, Placement::MonoSat,
    Placement::GatHap, Placement::MonoHap};

inline constexpr int kNumPlacements = 5;
inline constexpr int kNumSplits = 7;
inline constexpr int kNumConfigurations = kNumPlacements * kNumSplits;

inline NodeId cu_node(Placement p) {
    switch (p) {
        case Placement::MonoGat: return NodeId::GAT;
        case Placement::GatSat: return NodeId::GAT;
        case Placement::MonoSat: return NodeId::SAT;
        case Placement::GatHap: return NodeId::GAT;
        case Placement::MonoHap: return NodeId::HAP;
    }
    throw std::invalid_argument("bad placement");
}

inline NodeId du_node(Placement p) {
    switch (p) {
        case Placement::MonoGat: return NodeId::GAT;
        case Placement::GatSat: return NodeId::SAT;
        case Placement::MonoSat: return NodeId::SAT;
        case Placement::GatHap: return NodeId::HAP;
        case Placement::MonoHap: return NodeId::HAP;
    }
    throw std::invalid_argument("bad placement");
}

inline bool is_monolithic(Placement p) { return cu_node(p) == du_node(p); }

inline const char* to_string(Placement p) {
    switch (p) {
        case Placement::MonoGat: return "mono@GAT";
        case Placement::GatSat: return "CU@GAT/DU@SAT";
        case Placement::MonoSat: return "mono@SAT";
        case Placement::GatHap: return "CU@GAT/DU@HAP";
        case Placement::MonoHap: return "mono@HAP";
    }
    return "?";
}

// A (CU node, DU node, split option) assignment. Only the five placements
// above are valid: if CU and DU differ, the CU sits at the gateway.
struct Configuration {
    NodeId cu = NodeId::GAT;
    NodeId du = NodeId::GAT;
    int split = 0;

    bool monolithic() const { return cu == du; }
    bool operator==(const Configuration&) const = default;

    static Configuration from(Placement p, int split) {
        return Configuration{cu_node(p), du_node(p), split};
    }

    Placement placement() const {
        for (Placement p : kAllPlacements) {
            if (cu_node(p) == cu && du_node(p) == du) return p;
        }
        throw std::invalid_argument("invalid CU/DU pair");
    }
};

inline bool valid_split(int split) { return split >= 0 && split < kNumSplits; }

inline bool valid_configuration(const Configuration& c) {
    if (!valid_split(c.split)) return false;
    return c.cu == c.du || c.cu == NodeId::GAT;
}

// Feeder traffic demand as an affine function of the RU load (Mbps).
struct TrafficFormula {
    double slope = 1.0;
    double intercept_mbps = 0.0;

    double eval(double lambda_ru_mbps) const {
        return slope * lambda_ru_mbps + intercept_mbps;
    }
};

struct SplitOption {
    int index = 0;
    std::vector<FunctionId> du_functions;
    std::vector<FunctionId> cu_functions;
    double latency_req_ms = 10.0;
    TrafficFormula traffic;
};

// The seven canonical split options. Splits 1 and 2 carry the permissive
// 10 ms bound; tighter values can be set via ModelParams::split_latency_ms.
inline std::array<SplitOption, kNumSplits> split_catalog() {
    using F = FunctionId;
    std::array<SplitOption, kNumSplits> cat;
    const std::array<std::vector<F>, kNumSplits> du = {{
        {F::PHY, F::LowMac, F::HighMac, F::LowRlc, F::HighRlc, F::PDCP},
        {F::PHY, F::LowMac, F::HighMac, F::LowRlc, F::HighRlc},
        {F::PHY, F::LowMac, F::HighMac, F::LowRlc},
        {F::PHY, F::LowMac, F::HighMac},
        {F::PHY, F::LowMac},
        {F::PHY},
        {},
    }};
    const std::array<double, kNumSplits> latency = {10.0, 10.0, 10.0, 0.1, 0.1, 0.25, 0.25};
    const std::array<TrafficFormula, kNumSplits> traffic = {{
        {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0},
        {1.02, 1.5}, {1.02, 1.5}, {0.0, 2500.0},
    }};
    for (int o = 0; o < kNumSplits; ++o) {
        cat[o].index = o;
        cat[o].du_functions = du[o];
        for (F f : kAllFunctions) {
            bool in_du = false;
            for (F g : du[o]) in_du = in_du || (g == f);
            if (!in_du) cat[o].cu_functions.push_back(f);
        }
        cat[o].latency_req_ms = latency[o];
        cat[o].traffic = traffic[o];
    }
    return cat;
}

// Per-function computational loads (GOPS). MAC and RLC totals are divided
// between their low/high halves by the configured fractions.
struct FunctionLoads {
    double comp_phy_gops = 1280.0;
    double comp_mac_gops = 50.0;
    double comp_rlc_gops = 50.0;
    double comp_pdcp_gops = 100.0;
    double mac_low_fraction = 0.5;
    double rlc_low_fraction = 0.5;

    double load_gops(FunctionId f) const {
        switch (f) {
            case FunctionId::PHY: return comp_phy_gops;
            case FunctionId::LowMac: return mac_low_fraction * comp_mac_gops;
            case FunctionId::HighMac: return (1.0 - mac_low_fraction) * comp_mac_gops;
            case FunctionId::LowRlc: return rlc_low_fraction * comp_rlc_gops;
            case FunctionId::HighRlc: return (1.0 - rlc_low_fraction) * comp_rlc_gops;
            case FunctionId::PDCP: return comp_pdcp_gops;
        }
        throw std::invalid_argument("bad function id");
    }

    double total_gops() const {
        return comp_phy_gops + comp_mac_gops + comp_rlc_gops + comp_pdcp_gops;
    }
};

struct NodeParams {
    double idle_power_w = 0.0;
    double epo_j_per_to = 0.0;   // joules per tera-operation
    double comp_max_gops = 0.0;
};

struct LinkParams {
    NodeId a = NodeId::GAT;
    NodeId b = NodeId::SAT;
    double distance_m = 0.0;
    double capacity_mbps = 0.0;
    double tx_power_w = 0.0;     // power to transmit at the maximum link capacity
};

struct ModelParams {
    std::array<NodeParams, 3> nodes{};      // indexed by NodeId
    std::vector<LinkParams> links;
    FunctionLoads loads;
    std::array<double, kNumSplits> split_latency_ms{10.0, 10.0, 10.0, 0.1, 0.1, 0.25, 0.25};
    double speed_of_light_m_per_s = 2.998e8;
    // When on, monolithic NTN nodes are charged feeder transmission at
    // TRA = lambda_RU and their feeder capacity is enforced. Off keeps the
    // literal model where only disaggregated pairs use the feeder.
    bool backhaul_mode = false;

    const NodeParams& node(NodeId n) const { return nodes[static_cast<int>(n)]; }
    NodeParams& node(NodeId n) { return nodes[static_cast<int>(n)]; }

    const LinkParams* link_between(NodeId x, NodeId y) const {
        for (const auto& l : links) {
            if ((l.a == x && l.b == y) || (l.a == y && l.b == x)) return &l;
        }
        return nullptr;
    }

    static ModelParams defaults() {
        ModelParams p;
        p.node(NodeId::GAT) = {36.0, 0.0742, 485000.0};
        p.node(NodeId::SAT) = {10.0, 0.625, 32000.0};
        p.node(NodeId::HAP) = {7.5, 5.64, 1330.0};
        p.links = {
            {NodeId::SAT, NodeId::GAT, 600e3, 100.0, 35.0},
            {NodeId::HAP, NodeId::GAT, 20e3, 10000.0, 4.0},
        };
        return p;
    }
};

enum class Side { CU, DU };

// Sum of the per-function loads assigned to one side by the split option.
inline double computational_load(int split, Side side, const FunctionLoads& loads) {
    if (!valid_split(split)) throw std::invalid_argument("split index out of range");
    static const auto catalog = split_catalog();
    const auto& fns = (side == Side::DU) ? catalog[split].du_functions
                                         : catalog[split].cu_functions;
    double total = 0.0;
    for (FunctionId f : fns) total += loads.load_gops(f);
    return total;
}

// Feeder traffic demand (Mbps) induced by the split at RU load lambda.
inline double traffic_demand(int split, double lambda_ru_mbps) {
    if (!valid_split(split)) throw std::invalid_argument("split index out of range");
    if (lambda_ru_mbps < 0.0) throw std::invalid_argument("negative RU traffic");
    static const auto catalog = split_catalog();
    return catalog[split].traffic.eval(lambda_ru_mbps);
}

// Electromagnetic propagation delay over the CU-DU link; zero when the
// configuration is monolithic (no inter-node link).
inline double propagation_latency_ms(const Configuration& cfg, const ModelParams& params) {
    if (cfg.monolithic()) return 0.0;
    const LinkParams* link = params.link_between(cfg.cu, cfg.du);
    if (link == nullptr) {
        throw std::runtime_error(std::string("no link parameters between ") +
                                 to_string(cfg.cu) + " and " + to_string(cfg.du));
    }
    return link->distance_m / params.speed_of_light_m_per_s * 1e3;
}

// Idle plus per-operation power of the CU node and the DU node. Monolithic
// placements merge the two idle terms, halving each.
inline double processing_power_w(const Configuration& cfg, const ModelParams& params) {
    const double idle_weight = cfg.monolithic() ? 0.5 : 1.0;
    const double comp_cu_tops = computational_load(cfg.split, Side::CU, params.loads) / 1000.0;
    const double comp_du_tops = computational_load(cfg.split, Side::DU, params.loads) / 1000.0;
    const NodeParams& cu = params.node(cfg.cu);
    const NodeParams& du = params.node(cfg.du);
    const double p_cu = cu.idle_power_w * idle_weight + cu.epo_j_per_to * comp_cu_tops;
    const double p_du = du.idle_power_w * idle_weight + du.epo_j_per_to * comp_du_tops;
    return p_cu + p_du;
}

// Power to carry the split's feeder traffic, prorated against the link's
// max-capacity transmit power. Monolithic placements pay nothing unless
// backhaul_mode charges NTN nodes their feeder at TRA = lambda_RU.
inline double transmission_power_w(const Configuration& cfg, double lambda_ru_mbps,
                                   const ModelParams& params) {
    if (cfg.monolithic()) {
        if (!params.backhaul_mode || cfg.cu == NodeId::GAT) return 0.0;
        const LinkParams* feeder = params.link_between(cfg.cu, NodeId::GAT);
        if (feeder == nullptr) return 0.0;
        return feeder->tx_power_w / feeder->capacity_mbps * lambda_ru_mbps;
    }
    const LinkParams* link = params.link_between(cfg.cu, cfg.du);
    if (link == nullptr) {
        throw std::runtime_error(std::string("no link parameters between ") +
                                 to_string(cfg.cu) + " and " + to_string(cfg.du));
    }
    return link->tx_power_w / link->capacity_mbps * traffic_demand(cfg.split, lambda_ru_mbps);
}

struct PowerBreakdown {
    double processing_w = 0.0;
    double transmission_w = 0.0;
    double total_w = 0.0;
};

inline PowerBreakdown total_power(const Configuration& cfg, double lambda_ru_mbps,
                                  const ModelParams& params) {
    PowerBreakdown p;
    p.processing_w = processing_power_w(cfg, params);
    p.transmission_w = transmission_power_w(cfg, lambda_ru_mbps, params);
    p.total_w = p.processing_w + p.transmission_w;
    return p;
}

// Per-constraint outcome of the placement validity checks: propagation
// latency against the split's requirement, feeder traffic against link
// capacity, and combined computational load against the literal sum of the
// two nodes' capacities (a monolithic node counts twice).
struct FeasibilityReport {
    bool latency_ok = true;
    bool traffic_ok = true;
    bool compute_ok = true;
    double latency_ms = 0.0;
    double latency_req_ms = 0.0;
    double feeder_traffic_mbps = 0.0;    // demand actually checked (0 if no link applies)
    double feeder_capacity_mbps = 0.0;
    double comp_cu_gops = 0.0;
    double comp_du_gops = 0.0;
    double comp_capacity_gops = 0.0;

    bool all_ok() const { return latency_ok && traffic_ok && compute_ok; }
};

inline FeasibilityReport check_constraints(const Configuration& cfg, double lambda_ru_mbps,
                                           const ModelParams& params) {
    FeasibilityReport r;
    r.latency_req_ms = params.split_latency_ms[cfg.split];
    r.latency_ms = propagation_latency_ms(cfg, params);
    r.latency_ok = cfg.monolithic() || r.latency_ms <= r.latency_req_ms;

    if (!cfg.monolithic()) {
        const LinkParams* link = params.link_between(cfg.cu, cfg.du);
        r.feeder_traffic_mbps = traffic_demand(cfg.split, lambda_ru_mbps);
        r.feeder_capacity_mbps = link->capacity_mbps;
        r.traffic_ok = r.feeder_traffic_mbps <= r.feeder_capacity_mbps;
    } else if (params.backhaul_mode && cfg.cu != NodeId::GAT) {
        const LinkParams* feeder = params.link_between(cfg.cu, NodeId::GAT);
        if (feeder != nullptr) {
            r.feeder_traffic_mbps = lambda_ru_mbps;
            r.feeder_capacity_mbps = feeder->capacity_mbps;
            r.traffic_ok = r.feeder_traffic_mbps <= r.feeder_capacity_mbps;
        }
    }

    r.comp_cu_gops = computational_load(cfg.split, Side::CU, params.loads);
    r.comp_du_gops = computational_load(cfg.split, Side::DU, params.loads);
    r.comp_capacity_gops = params.node(cfg.cu).comp_max_gops + params.node(cfg.du).comp_max_gops;
    r.compute_ok = r.comp_cu_gops + r.comp_du_gops <= r.comp_capacity_gops;
    return r;
}

inline std::array<Configuration, kNumConfigurations> all_configurations() {
    std::array<Configuration, kNumConfigurations> out;
    int i = 0;
    for (Placement p : kAllPlacements) {
        for (int o = 0; o < kNumSplits; ++o) out[i++] = Configuration::from(p, o);
    }
    return out;
}

inline int configuration_index(const Configuration& cfg) {
    return static_cast<int>(cfg.placement()) * kNumSplits + cfg.split;
}

// Largest feasible total power at the given RU load, used to normalize
// power in reports and in the learning reward. Falls back to the largest
// total over all configurations if nothing is feasible.
inline double power_normalization_w(double lambda_ru_mbps, const ModelParams& params) {
    double max_feasible = 0.0;
    double max_any = 0.0;
    for (const Configuration& cfg : all_configurations()) {
        const double total = total_power(cfg, lambda_ru_mbps, params).total_w;
        max_any = std::max(max_any, total);
        if (check_constraints(cfg, lambda_ru_mbps, params).all_ok()) {
            max_feasible = std::max(max_feasible, total);
        }
    }
    return max_feasible > 0.0 ? max_feasible : max_any;
}

}  // namespace orbitsplit
