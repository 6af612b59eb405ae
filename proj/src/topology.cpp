#include "ehwsn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include <json.hpp>

namespace ehwsn {

namespace {

constexpr double kColumnSumTolerance = 1e-9;

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw; identical across standard libraries, unlike
    // std::uniform_real_distribution.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

} // namespace

std::string Violation::to_string() const {
    std::ostringstream os;
    os << code;
    if (!nodes.empty()) {
        os << "(";
        for (std::size_t i = 0; i < nodes.size(); ++i)
            os << (i ? "," : "") << nodes[i];
        os << ")";
    }
    if (!detail.empty())
        os << ": " << detail;
    return os.str();
}

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
    std::string msg = "topology validation failed:";
    for (const auto& v : vs)
        msg += " " + v.to_string() + ";";
    return msg;
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

double NetworkTopology::total_generation_rate() const {
    return std::accumulate(generation_rates.begin(), generation_rates.end(), 0.0);
}

std::vector<Violation> validate_topology(const NetworkTopology& t) {
    std::vector<Violation> out;
    const int v_count = t.node_count;
    if (v_count < 2) {
        out.push_back({"BadNodeCount", {v_count}, "need at least one sensor and a sink"});
        return out;
    }
    const auto n = static_cast<std::size_t>(v_count);
    if (t.routing.size() != n * n) {
        out.push_back({"BadDimensions", {}, "routing matrix is not V x V"});
        return out;
    }
    if (t.generation_rates.size() != n) {
        out.push_back({"BadDimensions", {}, "generation rate vector is not length V"});
        return out;
    }
    if (t.positions && t.positions->size() != n)
        out.push_back({"BadDimensions", {}, "positions list is not length V"});

    if (!(t.channel_loss >= 0.0 && t.channel_loss < 1.0))
        out.push_back({"ChannelLossOutOfRange", {}, "q must lie in [0,1)"});

    for (int i = 0; i < v_count; ++i) {
        for (int j = 0; j < v_count; ++j) {
            const double f = t.route_fraction(j, i);
            if (!(f >= 0.0 && f <= 1.0)) {
                out.push_back({"FractionOutOfRange", {j + 1, i + 1}, "routing fraction outside [0,1]"});
            }
        }
        if (t.route_fraction(i, i) > 0.0)
            out.push_back({"SelfLoop", {i + 1}, ""});
    }

    for (int i = 0; i < t.sensor_count(); ++i) {
        double col = 0.0;
        for (int j = 0; j < v_count; ++j)
            col += t.route_fraction(j, i);
        if (std::abs(col - 1.0) > kColumnSumTolerance) {
            std::ostringstream os;
            os << "column sums to " << col;
            out.push_back({"ColumnNotStochastic", {i + 1}, os.str()});
        }
    }
    for (int j = 0; j < v_count; ++j) {
        if (t.route_fraction(j, t.sink()) != 0.0)
            out.push_back({"SinkHasOutgoingLink", {j + 1}, ""});
    }

    for (int v = 0; v < v_count; ++v) {
        if (!(t.generation_rates[v] >= 0.0))
            out.push_back({"NegativeGenerationRate", {v + 1}, ""});
    }
    if (t.generation_rates[t.sink()] != 0.0)
        out.push_back({"SinkGeneratesTraffic", {v_count}, ""});

    // Acyclicity (equivalently R^V = 0): iterative three-color DFS over the
    // positive-fraction edges.
    enum class Color { White, Gray, Black };
    std::vector<Color> color(n, Color::White);
    bool cyclic = false;
    for (int start = 0; start < v_count && !cyclic; ++start) {
        if (color[start] != Color::White)
            continue;
        std::vector<std::pair<int, int>> stack{{start, 0}};
        color[start] = Color::Gray;
        while (!stack.empty() && !cyclic) {
            auto& [node, next] = stack.back();
            if (next < v_count) {
                const int j = next++;
                if (t.route_fraction(j, node) > 0.0) {
                    if (color[j] == Color::Gray)
                        cyclic = true;
                    else if (color[j] == Color::White) {
                        color[j] = Color::Gray;
                        stack.emplace_back(j, 0);
                    }
                }
            } else {
                color[node] = Color::Black;
                stack.pop_back();
            }
        }
    }
    if (cyclic)
        out.push_back({"NotNilpotent", {}, "routing graph contains a cycle"});

    return out;
}

std::vector<int> topological_order(const NetworkTopology& t) {
    const int v_count = t.node_count;
    // In-degree of node j counts upstream nodes i with r_{ji} > 0.
    std::vector<int> indegree(v_count, 0);
    for (int i = 0; i < v_count; ++i)
        for (int j = 0; j < v_count; ++j)
            if (t.route_fraction(j, i) > 0.0)
                ++indegree[j];

    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < v_count; ++v)
        if (indegree[v] == 0)
            ready.push(v);

    std::vector<int> order;
    order.reserve(v_count);
    while (!ready.empty()) {
        const int i = ready.top();
        ready.pop();
        order.push_back(i);
        for (int j = 0; j < v_count; ++j)
            if (t.route_fraction(j, i) > 0.0 && --indegree[j] == 0)
                ready.push(j);
    }
    if (static_cast<int>(order.size()) != v_count)
        throw CyclicRoutingError("routing graph has a cycle; no topological order exists");
    return order;
}

NetworkTopology generate_network(const GenerationConfig& config,
                                 const std::vector<double>& rates) {
    const int v_count = config.node_count;
    if (v_count < 2)
        throw DomainError("node_count must be at least 2");
    if (!(config.disk_radius > 0.0))
        throw DomainError("disk_radius must be positive");
    if (!(config.connectivity_radius > 0.0))
        throw DomainError("connectivity_radius must be positive");
    if (config.max_retries < 1)
        throw DomainError("max_retries must be at least 1");
    if (rates.size() != static_cast<std::size_t>(v_count))
        throw DomainError("rates must have length V");
    if (rates.back() != 0.0)
        throw DomainError("sink generation rate must be zero");
    for (double r : rates)
        if (!(r >= 0.0))
            throw DomainError("generation rates must be non-negative");

    std::mt19937_64 rng(config.rng_seed);
    const double r2 = config.connectivity_radius * config.connectivity_radius;
    const int sink = v_count - 1;

    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
        std::vector<std::array<double, 2>> pos(v_count);
        for (int v = 0; v < sink; ++v) {
            const double radius = config.disk_radius * std::sqrt(uniform01(rng));
            const double angle = 2.0 * M_PI * uniform01(rng);
            pos[v] = {radius * std::cos(angle), radius * std::sin(angle)};
        }
        pos[sink] = {0.0, 0.0};

        std::vector<std::vector<int>> adj(v_count);
        for (int a = 0; a < v_count; ++a)
            for (int b = a + 1; b < v_count; ++b)
                if (squared_distance(pos[a], pos[b]) < r2) {
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                }

        // Dijkstra from the sink over the undirected proximity graph with
        // squared-distance link costs.
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(v_count, inf);
        dist[sink] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, sink);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u])
                continue;
            for (int w : adj[u]) {
                const double nd = d + squared_distance(pos[u], pos[w]);
                if (nd < dist[w]) {
                    dist[w] = nd;
                    heap.emplace(nd, w);
                }
            }
        }

        const bool connected =
            std::all_of(dist.begin(), dist.end(), [&](double d) { return d < inf; });
        if (!connected)
            continue;

        NetworkTopology t;
        t.node_count = v_count;
        t.positions = pos;
        t.routing.assign(static_cast<std::size_t>(v_count) * v_count, 0.0);
        t.generation_rates = rates;
        t.channel_loss = 0.0;

        // Deterministic next hop: cheapest (cost to neighbor + neighbor's
        // distance), equal costs broken by the smaller node index.
        for (int v = 0; v < sink; ++v) {
            int best = -1;
            double best_cost = inf;
            for (int w : adj[v]) {
                const double c = squared_distance(pos[v], pos[w]) + dist[w];
                if (c < best_cost || (c == best_cost && w < best)) {
                    best = w;
                    best_cost = c;
                }
            }
            t.set_route_fraction(best, v, 1.0);
        }
        return t;
    }
    throw DisconnectedNetworkError("no connected deployment found within max_retries");
}

std::string save_topology(const NetworkTopology& t) {
    {
        auto violations = validate_topology(t);
        if (!violations.empty())
            throw ValidationError(std::move(violations));
    }
    nlohmann::json j;
    j["version"] = 1;
    j["node_count"] = t.node_count;
    j["channel_loss"] = t.channel_loss;
    j["generation_rates"] = t.generation_rates;
    if (t.positions) {
        auto arr = nlohmann::json::array();
        for (const auto& p : *t.positions)
            arr.push_back({p[0], p[1]});
        j["positions"] = std::move(arr);
    } else {
        j["positions"] = nullptr;
    }
    auto routing = nlohmann::json::array();
    for (int i = 0; i < t.node_count; ++i)
        for (int jj = 0; jj < t.node_count; ++jj) {
            const double f = t.route_fraction(jj, i);
            if (f > 0.0)
                routing.push_back({{"from", i + 1}, {"to", jj + 1}, {"fraction", f}});
        }
    j["routing"] = std::move(routing);
    return j.dump(2);
}

NetworkTopology load_topology(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }

    NetworkTopology t;
    try {
        if (!j.is_object())
            throw ParseError("topology file must be a JSON object");
        for (const char* key : {"version", "node_count", "channel_loss",
                                "generation_rates", "routing"})
            if (!j.contains(key))
                throw ParseError(std::string("missing required field \"") + key + "\"");
        if (j.at("version").get<int>() != 1)
            throw ParseError("unsupported topology schema version");
        t.node_count = j.at("node_count").get<int>();
        if (t.node_count < 2)
            throw ParseError("node_count must be at least 2");
        t.channel_loss = j.at("channel_loss").get<double>();
        t.generation_rates = j.at("generation_rates").get<std::vector<double>>();
        if (j.contains("positions") && !j.at("positions").is_null()) {
            std::vector<std::array<double, 2>> pos;
            for (const auto& p : j.at("positions")) {
                if (!p.is_array() || p.size() != 2)
                    throw ParseError("positions entries must be [x, y] pairs");
                pos.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            t.positions = std::move(pos);
        }
        const auto n = static_cast<std::size_t>(t.node_count);
        t.routing.assign(n * n, 0.0);
        for (const auto& e : j.at("routing")) {
            const int from = e.at("from").get<int>();
            const int to = e.at("to").get<int>();
            const double f = e.at("fraction").get<double>();
            if (from < 1 || from > t.node_count || to < 1 || to > t.node_count)
                throw ParseError("routing entry references a node outside 1..V");
            t.set_route_fraction(to - 1, from - 1, f);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed topology field: ") + e.what());
    }

    auto violations = validate_topology(t);
    if (!violations.empty())
        throw ValidationError(std::move(violations));
    return t;
}

} // namespace ehwsn
