#include "dcmg/topology.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace dcmg {

void MicrogridTopology::add_node(NodeId id)
{
    nodes_.insert(id);
}

void MicrogridTopology::add_line(NodeId i, NodeId j, const LineParams& params)
{
    if (i == j) {
        throw TopologyError("self-loop line at node " + std::to_string(i));
    }
    if (!has_node(i) || !has_node(j)) {
        throw TopologyError("line (" + std::to_string(i) + "," + std::to_string(j) +
                            ") references an unknown node");
    }
    if (has_line(i, j)) {
        throw TopologyError("duplicate line (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    lines_.emplace(Edge(i, j), params);
}

void MicrogridTopology::remove_line(NodeId i, NodeId j)
{
    if (lines_.erase(Edge(i, j)) == 0) {
        throw TopologyError("no line (" + std::to_string(i) + "," + std::to_string(j) + ") to remove");
    }
}

const LineParams& MicrogridTopology::line(NodeId i, NodeId j) const
{
    auto it = lines_.find(Edge(i, j));
    if (it == lines_.end()) {
        throw TopologyError("no line (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    return it->second;
}

std::vector<NodeId> MicrogridTopology::neighbors(NodeId id) const
{
    std::vector<NodeId> out;
    for (const auto& [edge, params] : lines_) {
        if (edge.touches(id)) {
            out.push_back(edge.other(id));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t MicrogridTopology::degree(NodeId id) const
{
    return static_cast<std::size_t>(std::count_if(
        lines_.begin(), lines_.end(), [id](const auto& kv) { return kv.first.touches(id); }));
}

std::vector<std::set<NodeId>> MicrogridTopology::components() const
{
    // union-find over the line set
    std::map<NodeId, NodeId> parent;
    for (NodeId n : nodes_) {
        parent[n] = n;
    }
    auto find = [&](NodeId n) {
        while (parent[n] != n) {
            parent[n] = parent[parent[n]];
            n = parent[n];
        }
        return n;
    };
    for (const auto& [edge, params] : lines_) {
        NodeId ra = find(edge.a);
        NodeId rb = find(edge.b);
        if (ra != rb) {
            parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    }
    std::map<NodeId, std::set<NodeId>> groups;
    for (NodeId n : nodes_) {
        groups[find(n)].insert(n);
    }
    std::vector<std::set<NodeId>> out;
    for (auto& [root, members] : groups) {
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return *x.begin() < *y.begin(); });
    return out;
}

bool MicrogridTopology::is_connected() const
{
    return !nodes_.empty() && components().size() == 1;
}

MicrogridTopology MicrogridTopology::induced(const std::set<NodeId>& subset) const
{
    MicrogridTopology out;
    for (NodeId n : subset) {
        if (has_node(n)) {
            out.add_node(n);
        }
    }
    for (const auto& [edge, params] : lines_) {
        if (subset.count(edge.a) && subset.count(edge.b)) {
            out.lines_.emplace(edge, params);
        }
    }
    return out;
}

void MicrogridTopology::validate() const
{
    for (const auto& [edge, params] : lines_) {
        const std::string name = "line (" + std::to_string(edge.a) + "," + std::to_string(edge.b) + ")";
        if (!(params.resistance > 0.0)) {
            throw TopologyError(name + ": resistance must be positive");
        }
        if (!(params.comm_weight > 0.0)) {
            throw TopologyError(name + ": communication weight must be positive");
        }
        if (params.inductance < 0.0) {
            throw TopologyError(name + ": inductance must be non-negative");
        }
    }
}

Graph comm_graph(const MicrogridTopology& topology)
{
    Graph g;
    g.nodes = topology.nodes();
    for (const auto& [edge, params] : topology.lines()) {
        g.edges.insert(edge);
    }
    return g;
}

std::vector<DirectedEdge> find_cycle(const Graph& graph)
{
    std::map<NodeId, std::vector<NodeId>> adjacency;
    for (NodeId n : graph.nodes) {
        adjacency[n];
    }
    for (const Edge& e : graph.edges) {
        adjacency[e.a].push_back(e.b);
        adjacency[e.b].push_back(e.a);
    }
    for (auto& [n, list] : adjacency) {
        std::sort(list.begin(), list.end());
    }

    std::map<NodeId, NodeId> parent;
    struct Frame {
        NodeId node;
        std::size_t next;
    };

    for (const auto& [root, unused] : adjacency) {
        if (parent.count(root)) {
            continue;
        }
        parent[root] = root;
        std::vector<Frame> stack{{root, 0}};
        while (!stack.empty()) {
            Frame& top = stack.back();
            const auto& list = adjacency[top.node];
            if (top.next == list.size()) {
                stack.pop_back();
                continue;
            }
            const NodeId u = top.node;
            const NodeId v = list[top.next++];
            if (v == parent[u]) {
                continue;
            }
            if (parent.count(v)) {
                // back edge u -> v; v is an ancestor of u on the DFS stack
                std::vector<NodeId> path{u};
                for (NodeId x = u; x != v;) {
                    x = parent[x];
                    path.push_back(x);
                }
                std::reverse(path.begin(), path.end());
                std::vector<DirectedEdge> cycle;
                for (std::size_t k = 0; k + 1 < path.size(); ++k) {
                    cycle.push_back({path[k], path[k + 1]});
                }
                cycle.push_back({u, v});
                return cycle;
            }
            parent[v] = u;
            stack.push_back({v, 0});
        }
    }
    return {};
}

SpanningTreeSelection select_spanning_tree(const MicrogridTopology& topology)
{
    if (!topology.is_connected()) {
        throw TopologyError("communication graph is not connected");
    }
    SpanningTreeSelection sel;
    Graph remaining = comm_graph(topology);

    for (auto cycle = find_cycle(remaining); !cycle.empty(); cycle = find_cycle(remaining)) {
        auto removed = [&](NodeId n) { return sel.removed_nodes.count(n) != 0; };

        std::optional<Edge> pick;
        // Prefer an edge whose endpoints are both already removed (the removed
        // node set does not grow), then one sharing a single endpoint.
        for (const auto& de : cycle) {
            if (removed(de.from) && removed(de.to)) {
                pick = Edge(de.from, de.to);
                break;
            }
        }
        if (!pick) {
            for (const auto& de : cycle) {
                if (removed(de.from) || removed(de.to)) {
                    pick = Edge(de.from, de.to);
                    break;
                }
            }
        }
        if (!pick) {
            std::map<NodeId, std::size_t> degree;
            for (const Edge& e : remaining.edges) {
                ++degree[e.a];
                ++degree[e.b];
            }
            NodeId hub = cycle.front().from;
            for (const auto& de : cycle) {
                const NodeId n = de.from;
                if (degree[n] > degree[hub] || (degree[n] == degree[hub] && n < hub)) {
                    hub = n;
                }
            }
            // the two cycle edges at the hub; take the one toward the lower id
            NodeId best = -1;
            for (const auto& de : cycle) {
                const Edge e(de.from, de.to);
                if (!e.touches(hub)) {
                    continue;
                }
                const NodeId far = e.other(hub);
                if (best == -1 || far < best) {
                    best = far;
                }
            }
            pick = Edge(hub, best);
        }

        sel.removed_edges.insert(*pick);
        sel.removed_nodes.insert(pick->a);
        sel.removed_nodes.insert(pick->b);
        remaining.edges.erase(*pick);
    }
    sel.tree_edges = remaining.edges;
    return sel;
}

SensorPlan deploy_sensors(const MicrogridTopology& topology, const SpanningTreeSelection& selection)
{
    SensorPlan plan;
    plan.tree_edges = selection.tree_edges;
    plan.removed_edges = selection.removed_edges;
    plan.removed_nodes = selection.removed_nodes;

    for (const Edge& e : selection.tree_edges) {
        plan.sensors.insert({e.a, e.b});
        plan.sensors.insert({e.b, e.a});
    }
    for (NodeId i : topology.nodes()) {
        const auto nbrs = topology.neighbors(i);
        if (nbrs.empty()) {
            continue;
        }
        const bool all_sensed = std::all_of(nbrs.begin(), nbrs.end(),
                                            [&](NodeId j) { return plan.has_sensor(i, j); });
        if (all_sensed) {
            plan.sensors.erase({i, nbrs.front()});
        }
    }
    return plan;
}

SensorPlan plan_sensors(const MicrogridTopology& topology)
{
    return deploy_sensors(topology, select_spanning_tree(topology));
}

SensorPlan plan_sensors_per_component(const MicrogridTopology& topology)
{
    SensorPlan merged;
    for (const auto& members : topology.components()) {
        if (members.size() < 2) {
            continue;
        }
        const SensorPlan part = plan_sensors(topology.induced(members));
        merged.tree_edges.insert(part.tree_edges.begin(), part.tree_edges.end());
        merged.removed_edges.insert(part.removed_edges.begin(), part.removed_edges.end());
        merged.removed_nodes.insert(part.removed_nodes.begin(), part.removed_nodes.end());
        merged.sensors.insert(part.sensors.begin(), part.sensors.end());
    }
    return merged;
}

std::size_t expected_sensor_count(std::size_t node_count, std::size_t removed_node_count)
{
    if (node_count < 2) {
        return 0;
    }
    return node_count + removed_node_count - 2;
}

LineObservability line_observability(const MicrogridTopology& topology, const SensorPlan& plan,
                                     NodeId at, NodeId toward)
{
    if (plan.has_sensor(at, toward)) {
        return LineObservability::Sensed;
    }
    for (NodeId other : topology.neighbors(at)) {
        if (other != toward && !plan.has_sensor(at, other)) {
            return LineObservability::Unobservable;
        }
    }
    return LineObservability::Recovered;
}

std::string format_sensor_plan(const SensorPlan& plan, std::size_t node_count)
{
    std::ostringstream os;
    for (const auto& s : plan.sensors) {
        os << "sensor " << s.from << ' ' << s.to << '\n';
    }
    for (const auto& e : plan.tree_edges) {
        os << "tree " << e.a << ' ' << e.b << '\n';
    }
    for (const auto& e : plan.removed_edges) {
        os << "removed_edge " << e.a << ' ' << e.b << '\n';
    }
    for (NodeId n : plan.removed_nodes) {
        os << "removed_node " << n << '\n';
    }
    os << "summary nodes=" << node_count << " removed_edges=" << plan.removed_edges.size()
       << " removed_nodes=" << plan.removed_nodes.size() << " sensors=" << plan.sensors.size()
       << '\n';
    return os.str();
}

}  // namespace dcmg
