#include "fogsim/topology.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

#include "fogsim/errors.hpp"

namespace fogsim {

std::string to_string(Tier t) {
    switch (t) {
        case Tier::Iot: return "iot";
        case Tier::Fog: return "fog";
        case Tier::Cloud: return "cloud";
    }
    return "unknown";
}

Tier tier_from_string(const std::string& s) {
    if (s == "iot") return Tier::Iot;
    if (s == "fog") return Tier::Fog;
    if (s == "cloud") return Tier::Cloud;
    throw std::invalid_argument("unknown tier: " + s);
}

std::string to_string(OffloadTarget::Kind k) {
    switch (k) {
        case OffloadTarget::Kind::Local: return "local";
        case OffloadTarget::Kind::Fog: return "fog";
        case OffloadTarget::Kind::Cloud: return "cloud";
    }
    return "unknown";
}

Topology Topology::build(const TopologyConfig& config) {
    std::vector<std::string> bad;

    Topology t;
    for (size_t i = 0; i < config.nodes.size(); ++i) {
        const auto& n = config.nodes[i];
        const std::string path = fmt::format("topology.nodes[{}]", i);
        if (n.id.empty()) bad.push_back(path + ".id: must be non-empty");
        if (t.index_.count(n.id)) bad.push_back(path + ".id: duplicate node id '" + n.id + "'");
        if (!(n.capacity > 0)) bad.push_back(path + ".capacity: must be > 0");
        if (n.busy_power < 0) bad.push_back(path + ".busy_power: must be >= 0");
        if (n.idle_power < 0) bad.push_back(path + ".idle_power: must be >= 0");
        t.index_[n.id] = t.nodes_.size();
        t.nodes_.push_back(n);
        switch (n.tier) {
            case Tier::Iot: t.iot_ids_.push_back(n.id); break;
            case Tier::Fog: t.fog_ids_.push_back(n.id); break;
            case Tier::Cloud:
                if (!t.cloud_id_.empty()) bad.push_back(path + ": more than one cloud node");
                t.cloud_id_ = n.id;
                break;
        }
    }
    std::sort(t.iot_ids_.begin(), t.iot_ids_.end());
    std::sort(t.fog_ids_.begin(), t.fog_ids_.end());

    if (t.cloud_id_.empty()) bad.push_back("topology: exactly one cloud node required, found 0");
    if (t.fog_ids_.empty()) bad.push_back("topology: at least one fog node required");
    if (t.iot_ids_.empty()) bad.push_back("topology: at least one iot node required");

    // Cloud is the most capable tier.
    if (!t.cloud_id_.empty()) {
        const double cloud_cap = t.nodes_[t.index_[t.cloud_id_]].capacity;
        for (const auto& f : t.fog_ids_) {
            const double fog_cap = t.nodes_[t.index_[f]].capacity;
            if (cloud_cap < fog_cap) {
                bad.push_back(fmt::format(
                    "topology: cloud capacity {} below fog node '{}' capacity {}", cloud_cap, f, fog_cap));
            }
        }
    }

    for (size_t i = 0; i < config.links.size(); ++i) {
        const auto& l = config.links[i];
        const std::string path = fmt::format("topology.links[{}]", i);
        const bool from_ok = t.index_.count(l.from) > 0;
        const bool to_ok = t.index_.count(l.to) > 0;
        if (!from_ok) bad.push_back(path + ".from: unknown node '" + l.from + "'");
        if (!to_ok) bad.push_back(path + ".to: unknown node '" + l.to + "'");
        if (!(l.bandwidth > 0)) bad.push_back(path + ".bandwidth: must be > 0");
        if (l.propagation < 0) bad.push_back(path + ".propagation: must be >= 0");
        if (l.tx_power < 0) bad.push_back(path + ".tx_power: must be >= 0");
        if (from_ok && to_ok) {
            const Tier from_tier = t.nodes_[t.index_[l.from]].tier;
            const Tier to_tier = t.nodes_[t.index_[l.to]].tier;
            if (from_tier != Tier::Iot || to_tier == Tier::Iot) {
                bad.push_back(path + ": offload links run from an iot device to a fog node or the cloud");
            } else if (t.links_.count({l.from, l.to})) {
                bad.push_back(path + ": duplicate link " + l.from + " -> " + l.to);
            } else {
                t.links_[{l.from, l.to}] = l;
            }
        }
    }

    // Offload graph must be complete: every device reaches every fog node and
    // the cloud.
    for (const auto& dev : t.iot_ids_) {
        for (const auto& fog : t.fog_ids_) {
            if (!t.links_.count({dev, fog})) {
                bad.push_back("topology: missing link " + dev + " -> " + fog);
            }
        }
        if (!t.cloud_id_.empty() && !t.links_.count({dev, t.cloud_id_})) {
            bad.push_back("topology: missing link " + dev + " -> " + t.cloud_id_);
        }
    }

    // Fog sits nearer the edge than the cloud.
    for (const auto& dev : t.iot_ids_) {
        if (t.cloud_id_.empty() || !t.links_.count({dev, t.cloud_id_})) continue;
        const double cloud_prop = t.links_[{dev, t.cloud_id_}].propagation;
        for (const auto& fog : t.fog_ids_) {
            auto it = t.links_.find({dev, fog});
            if (it == t.links_.end()) continue;
            if (!(it->second.propagation < cloud_prop)) {
                bad.push_back(fmt::format(
                    "topology: link {} -> {} propagation {} must be below the cloud link's {}",
                    dev, fog, it->second.propagation, cloud_prop));
            }
        }
    }

    if (!bad.empty()) throw ConfigError(std::move(bad));
    return t;
}

const NodeSpec& Topology::node(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown node: " + id);
    return nodes_[it->second];
}

const LinkSpec& Topology::link(const std::string& from, const std::string& to) const {
    auto it = links_.find({from, to});
    if (it == links_.end()) throw std::out_of_range("unknown link: " + from + " -> " + to);
    return it->second;
}

std::vector<OffloadTarget> Topology::action_space(const std::string& device_id) const {
    const auto& dev = node(device_id);
    if (dev.tier != Tier::Iot) throw std::out_of_range("not an iot device: " + device_id);
    std::vector<OffloadTarget> actions;
    actions.reserve(action_count());
    actions.push_back({OffloadTarget::Kind::Local, device_id});
    for (const auto& f : fog_ids_) actions.push_back({OffloadTarget::Kind::Fog, f});
    actions.push_back({OffloadTarget::Kind::Cloud, cloud_id_});
    return actions;
}

Topology Topology::with_compromised(const std::set<std::string>& ids) const {
    Topology t = *this;
    for (auto& n : t.nodes_) n.compromised = ids.count(n.id) > 0;
    return t;
}

Topology build_topology(const TopologyConfig& config) { return Topology::build(config); }

}  // namespace fogsim
