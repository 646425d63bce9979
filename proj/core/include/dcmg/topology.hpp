#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcmg {

using NodeId = int;

/// Undirected edge, stored with a < b.
struct Edge {
    NodeId a{};
    NodeId b{};

    Edge() = default;
    Edge(NodeId i, NodeId j) : a(i < j ? i : j), b(i < j ? j : i) {}

    bool touches(NodeId n) const { return a == n || b == n; }
    NodeId other(NodeId n) const { return n == a ? b : a; }

    auto operator<=>(const Edge&) const = default;
};

/// Directed pair. For a sensor, `from` is the DER hosting it and `to` is the
/// far end of the line. For a communication link, `from` is the receiver.
struct DirectedEdge {
    NodeId from{};
    NodeId to{};

    auto operator<=>(const DirectedEdge&) const = default;
};

struct LineParams {
    double resistance{};   // ohms
    double inductance{};   // henries, carried for completeness, not modelled
    double comm_weight{};  // consensus weight of the communication edge

    bool operator==(const LineParams&) const = default;
};

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Electrical and communication graph of the microgrid. The two graphs share
/// one edge set; every power line carries the parameters of its twin
/// communication link.
class MicrogridTopology {
public:
    void add_node(NodeId id);
    void add_line(NodeId i, NodeId j, const LineParams& params);
    void remove_line(NodeId i, NodeId j);

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
    bool has_line(NodeId i, NodeId j) const { return lines_.count(Edge(i, j)) != 0; }
    const LineParams& line(NodeId i, NodeId j) const;

    const std::set<NodeId>& nodes() const { return nodes_; }
    const std::map<Edge, LineParams>& lines() const { return lines_; }

    /// Sorted ascending.
    std::vector<NodeId> neighbors(NodeId id) const;
    std::size_t degree(NodeId id) const;

    bool is_connected() const;
    /// Connected components, each sorted, ordered by smallest member.
    std::vector<std::set<NodeId>> components() const;
    MicrogridTopology induced(const std::set<NodeId>& subset) const;

    /// Throws TopologyError on non-positive resistance or weight.
    void validate() const;

    bool operator==(const MicrogridTopology&) const = default;

private:
    std::set<NodeId> nodes_;
    std::map<Edge, LineParams> lines_;
};

/// Bare undirected graph used by the cycle search.
struct Graph {
    std::set<NodeId> nodes;
    std::set<Edge> edges;
};

Graph comm_graph(const MicrogridTopology& topology);

/// Depth-first search from the lowest node id, neighbours in ascending order.
/// Returns the first cycle closed by a back edge as a closed walk
/// (ancestor -> ... -> descendant -> ancestor); empty when the graph is a
/// forest. Linear in |V| + |E|.
std::vector<DirectedEdge> find_cycle(const Graph& graph);

struct SpanningTreeSelection {
    std::set<Edge> tree_edges;
    std::set<Edge> removed_edges;
    std::set<NodeId> removed_nodes;
};

/// Phase I of the cost-effective deployment: peel cycles until a spanning
/// tree remains, reusing already-removed nodes whenever a cycle allows it.
SpanningTreeSelection select_spanning_tree(const MicrogridTopology& topology);

struct SensorPlan {
    std::set<Edge> tree_edges;
    std::set<Edge> removed_edges;
    std::set<NodeId> removed_nodes;
    std::set<DirectedEdge> sensors;

    bool has_sensor(NodeId at, NodeId toward) const
    {
        return sensors.count(DirectedEdge{at, toward}) != 0;
    }

    bool operator==(const SensorPlan&) const = default;
};

/// Phase II: sense both directions of every tree edge, then drop one sensor
/// at each DER whose incident lines are all sensed locally (the current-sum
/// estimate recovers it).
SensorPlan deploy_sensors(const MicrogridTopology& topology, const SpanningTreeSelection& selection);

/// Phases I and II on a connected topology.
SensorPlan plan_sensors(const MicrogridTopology& topology);

/// Runs the planner on each connected component independently (isolated
/// nodes contribute nothing). Used after line cuts split the grid.
SensorPlan plan_sensors_per_component(const MicrogridTopology& topology);

/// |A| + |A_rm| - 2 for a connected graph with at least two nodes.
std::size_t expected_sensor_count(std::size_t node_count, std::size_t removed_node_count);

enum class LineObservability {
    Sensed,        // a sensor at `at` reads the line directly
    Recovered,     // every other incident line is sensed at `at`
    Unobservable,  // neither: the link falls back to discarding neighbour data
};

LineObservability line_observability(const MicrogridTopology& topology, const SensorPlan& plan,
                                     NodeId at, NodeId toward);

/// Line-oriented listing: `sensor <i> <j>` rows, tree/removed sets and counts.
std::string format_sensor_plan(const SensorPlan& plan, std::size_t node_count);

}  // namespace dcmg
