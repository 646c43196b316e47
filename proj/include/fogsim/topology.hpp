#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace fogsim {

enum class Tier { Iot, Fog, Cloud };

std::string to_string(Tier t);
Tier tier_from_string(const std::string& s);

struct NodeSpec {
    std::string id;
    Tier tier = Tier::Iot;
    double capacity = 0.0;    // work-units per second
    double busy_power = 0.0;  // watts while executing
    double idle_power = 0.0;  // watts otherwise
    bool compromised = false; // set by the attack model before a run
};

// Offload link from an IoT device to a fog node or the cloud. Transmission
// energy is attributed to the source device at tx_power * tx_time.
struct LinkSpec {
    std::string from;
    std::string to;
    double bandwidth = 0.0;    // work-units per second
    double propagation = 0.0;  // seconds
    double tx_power = 0.0;     // watts at the source device
};

struct TopologyConfig {
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
};

struct OffloadTarget {
    enum class Kind { Local, Fog, Cloud };
    Kind kind = Kind::Local;
    std::string node_id;

    bool operator==(const OffloadTarget&) const = default;
};

std::string to_string(OffloadTarget::Kind k);

// Three-tier offload topology. Immutable structure after build; fog nodes are
// kept sorted by id so action indices do not depend on config ordering.
class Topology {
public:
    // Validates the config and builds. Throws ConfigError listing every
    // violation: node counts per tier, cloud-dominates-fog capacity, the full
    // IoT->{fog,cloud} link set, and fog-before-cloud propagation per device.
    static Topology build(const TopologyConfig& config);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const NodeSpec& node(const std::string& id) const;
    bool has_node(const std::string& id) const { return index_.count(id) > 0; }

    const std::vector<std::string>& iot_ids() const { return iot_ids_; }
    const std::vector<std::string>& fog_ids() const { return fog_ids_; }
    const std::string& cloud_id() const { return cloud_id_; }

    const LinkSpec& link(const std::string& from, const std::string& to) const;
    size_t link_count() const { return links_.size(); }

    // Ordered action list for a device: [Local, Fog 1..N (sorted by id), Cloud].
    // The index into this list is the agent's action integer.
    std::vector<OffloadTarget> action_space(const std::string& device_id) const;
    size_t action_count() const { return fog_ids_.size() + 2; }

    // Copy with the given fog nodes flagged compromised.
    Topology with_compromised(const std::set<std::string>& ids) const;

private:
    Topology() = default;

    std::vector<NodeSpec> nodes_;
    std::map<std::string, size_t> index_;
    std::vector<std::string> iot_ids_;
    std::vector<std::string> fog_ids_;
    std::string cloud_id_;
    std::map<std::pair<std::string, std::string>, LinkSpec> links_;
};

Topology build_topology(const TopologyConfig& config);

}  // namespace fogsim
