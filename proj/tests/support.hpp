#pragma once

// Shared helpers for the unit and acceptance suites: randomized model
// parameters in both the library's and the reference enumerator's formats.

#include <random>

#include "orbitsplit/model.hpp"
#include "reference_model.hpp"

namespace testsupport {

inline refmodel::RawParams randomized_raw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mult(0.2, 5.0);
    refmodel::RawParams raw;
    raw.idle_gat *= mult(rng);
    raw.idle_sat *= mult(rng);
    raw.idle_hap *= mult(rng);
    raw.epo_gat *= mult(rng);
    raw.epo_sat *= mult(rng);
    raw.epo_hap *= mult(rng);
    raw.cap_gat *= mult(rng);
    raw.cap_sat *= mult(rng);
    raw.cap_hap *= mult(rng);
    raw.link_cap_sat *= mult(rng);
    raw.link_cap_hap *= mult(rng);
    raw.link_pow_sat *= mult(rng);
    raw.link_pow_hap *= mult(rng);
    raw.dist_sat_m *= mult(rng);
    raw.dist_hap_m *= mult(rng);
    for (auto& l : raw.latency_req_ms) l *= mult(rng);
    raw.backhaul = (rng() % 2) == 0;
    if (rng() % 5 == 0) {
        // occasionally crush the compute capacities so nothing fits anywhere
        raw.cap_gat = mult(rng);
        raw.cap_sat = mult(rng);
        raw.cap_hap = mult(rng);
    }
    return raw;
}

inline orbitsplit::ModelParams params_from_raw(const refmodel::RawParams& raw) {
    using orbitsplit::NodeId;
    orbitsplit::ModelParams p = orbitsplit::ModelParams::defaults();
    p.node(NodeId::GAT).idle_power_w = raw.idle_gat;
    p.node(NodeId::SAT).idle_power_w = raw.idle_sat;
    p.node(NodeId::HAP).idle_power_w = raw.idle_hap;
    p.node(NodeId::GAT).epo_j_per_to = raw.epo_gat;
    p.node(NodeId::SAT).epo_j_per_to = raw.epo_sat;
    p.node(NodeId::HAP).epo_j_per_to = raw.epo_hap;
    p.node(NodeId::GAT).comp_max_gops = raw.cap_gat;
    p.node(NodeId::SAT).comp_max_gops = raw.cap_sat;
    p.node(NodeId::HAP).comp_max_gops = raw.cap_hap;
    p.links[0].capacity_mbps = raw.link_cap_sat;
    p.links[0].tx_power_w = raw.link_pow_sat;
    p.links[0].distance_m = raw.dist_sat_m;
    p.links[1].capacity_mbps = raw.link_cap_hap;
    p.links[1].tx_power_w = raw.link_pow_hap;
    p.links[1].distance_m = raw.dist_hap_m;
    for (int i = 0; i < 7; ++i) {
        p.split_latency_ms[static_cast<std::size_t>(i)] =
            raw.latency_req_ms[static_cast<std::size_t>(i)];
    }
    p.backhaul_mode = raw.backhaul;
    return p;
}

}  // namespace testsupport
