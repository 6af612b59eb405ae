// ehwsn: analytic loss, harvesting resource allocation, and Monte Carlo
// validation for energy-harvesting sensor networks.
//
// Subcommands: generate | analyze | allocate | simulate | sweep
// Exit codes: 0 success, 1 runtime failure, 2 invalid input.

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehwsn/flow.hpp"
#include "ehwsn/simulator.hpp"

using nlohmann::json;

namespace {

// MICAz mote on solar harvesting with a supercapacitor store.
struct Profile {
    double q = 1e-5;
    double mu_avg = 0.2326;    // Hz, one energy unit per harvest
    double cap_avg = 2283.0;   // energy units in a full store
    double total_lambda = 0.4652; // Hz network-wide; per sensor: total/V
};

Profile lookup_profile(const std::string& name) {
    if (name == "micaz-solar")
        return {};
    throw ehwsn::DomainError("unknown profile: " + name);
}

std::string fmt(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ehwsn::ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ehwsn::Error("cannot write file: " + path);
    out << text;
}

ehwsn::NetworkTopology load_topology_file(const std::string& path) {
    return ehwsn::load_topology(read_file(path));
}

json allocation_to_json(const ehwsn::HarvestingAllocation& a) {
    return json{{"version", 1}, {"mu", a.mu}, {"cap", a.cap}};
}

ehwsn::HarvestingAllocation allocation_from_json(const json& j) {
    ehwsn::HarvestingAllocation a;
    try {
        a.mu = j.at("mu").get<std::vector<double>>();
        a.cap = j.at("cap").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ehwsn::ParseError(std::string("malformed allocation: ") + e.what());
    }
    return a;
}

json flow_to_json(const ehwsn::FlowSolution& s) {
    return json{{"theta", s.theta},
                {"node_loss", s.node_loss},
                {"network_loss", s.network_loss}};
}

json sim_to_json(const ehwsn::SimOutcome& o) {
    return json{{"generated", o.generated},
                {"delivered", o.delivered},
                {"lost_energy", o.lost_energy},
                {"lost_channel", o.lost_channel},
                {"empirical_loss", o.empirical_loss},
                {"ci_halfwidth", o.ci_halfwidth}};
}

void emit(const std::string& output, const std::string& text) {
    if (output.empty() || output == "-")
        std::cout << text << "\n";
    else
        write_file(output, text);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step on seed ^ stream, so per-task streams are independent.
    std::uint64_t z = (seed ^ (stream * 0x9e3779b97f4a7c15ULL)) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> per_sensor_rates(int v_count, double total_lambda) {
    std::vector<double> rates(v_count, total_lambda / v_count);
    rates.back() = 0.0;
    return rates;
}

int max_hop_depth(const ehwsn::NetworkTopology& t) {
    // Longest route to the sink over the deterministic/fractional DAG.
    const auto order = ehwsn::topological_order(t);
    std::vector<int> depth(t.node_count, 0);
    for (int v : order)
        for (int j = 0; j < t.node_count; ++j)
            if (t.route_fraction(j, v) > 0.0)
                depth[j] = std::max(depth[j], depth[v] + 1);
    return depth[t.sink()];
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    ehwsn::GenerationConfig cfg;
    double q = 1e-5;
    double rate = -1.0; // per-sensor lambda; <0 means profile default
    std::string profile = "micaz-solar";
    std::string output;
};

int cmd_generate(const GenerateArgs& ga) {
    const Profile prof = lookup_profile(ga.profile);
    const double lambda =
        ga.rate >= 0.0 ? ga.rate : prof.total_lambda / ga.cfg.node_count;
    std::vector<double> rates(ga.cfg.node_count, lambda);
    rates.back() = 0.0;
    auto t = ehwsn::generate_network(ga.cfg, rates);
    t.channel_loss = ga.q;

    int edges = 0;
    for (double f : t.routing)
        if (f > 0.0)
            ++edges;
    std::cerr << "generated network: V=" << t.node_count << " edges=" << edges
              << " max_hop_depth=" << max_hop_depth(t) << "\n";
    emit(ga.output, ehwsn::save_topology(t));
    return 0;
}

// ----------------------------------------------------------------- analyze

struct AllocSource {
    std::string allocation_file;
    double mu = -1.0, cap = -1.0; // uniform fallback when no file given
};

ehwsn::HarvestingAllocation resolve_allocation(const ehwsn::NetworkTopology& t,
                                               const AllocSource& src) {
    if (!src.allocation_file.empty()) {
        json j;
        try {
            j = json::parse(read_file(src.allocation_file));
        } catch (const json::parse_error& e) {
            throw ehwsn::ParseError(std::string("invalid JSON: ") + e.what());
        }
        return allocation_from_json(j);
    }
    if (src.mu > 0.0 && src.cap >= 1.0)
        return ehwsn::uniform_allocation(t.node_count, {src.mu, src.cap});
    throw ehwsn::DomainError("provide --allocation or both --mu and --cap");
}

int cmd_analyze(const std::string& topology_file, const AllocSource& src,
                const std::string& output) {
    const auto t = load_topology_file(topology_file);
    const auto a = resolve_allocation(t, src);
    const auto s = ehwsn::solve_flow(t, a);
    emit(output, flow_to_json(s).dump(2));
    return 0;
}

// ---------------------------------------------------------------- allocate

int cmd_allocate(const std::string& topology_file, const std::string& scheme,
                 double mu, double cap, std::uint64_t seed, int iterations,
                 const std::string& output) {
    const auto t = load_topology_file(topology_file);
    const ehwsn::ResourceBudget budget{mu, cap};
    ehwsn::HarvestingAllocation a;
    if (scheme == "uniform") {
        a = ehwsn::uniform_allocation(t.node_count, budget);
    } else if (scheme == "fair") {
        a = ehwsn::almost_fair_allocation(t, budget);
    } else if (scheme == "optimal") {
        ehwsn::OptimizerConfig opt;
        opt.seed = seed;
        if (iterations > 0)
            opt.iterations = iterations;
        a = ehwsn::optimal_allocation(t, budget, opt);
    } else {
        throw ehwsn::DomainError("scheme must be uniform, fair, or optimal");
    }
    const auto s = ehwsn::solve_flow(t, a);
    std::cerr << "predicted P_L = " << fmt(s.network_loss) << "\n";
    emit(output, allocation_to_json(a).dump(2));
    return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& topology_file, const AllocSource& src,
                 long long events, long long warmup, std::uint64_t seed,
                 const std::string& output) {
    const auto t = load_topology_file(topology_file);
    auto a = resolve_allocation(t, src);
    for (double& c : a.cap)
        c = std::llround(c);
    const ehwsn::SimConfig cfg{events, warmup, seed};
    const auto sim = ehwsn::simulate(t, a, cfg);
    const auto analytic = ehwsn::solve_flow(t, a);
    json out{{"simulation", sim_to_json(sim)}, {"analytic", flow_to_json(analytic)}};
    emit(output, out.dump(2));
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    int networks = 100;
    int nodes = 20;
    std::vector<double> mu_grid;
    std::vector<double> cap_grid;
    std::vector<std::string> schemes{"uniform", "fair", "optimal"};
    std::uint64_t seed = 0;
    long long sim_events = 0; // 0: analytic only
    double jitter = 0.0;      // +-fraction applied per node to lambda (and to
                              // mu/cap for the uniform scheme)
    int threads = 0;          // 0: hardware concurrency
    int iterations = 0;       // 0: optimizer default
    std::string profile = "micaz-solar";
    double disk_radius = 100.0;
    double connectivity_radius = 40.0;
    std::string output;
    std::string config_file;
};

void apply_config_file(SweepArgs& sa) {
    json j;
    try {
        j = json::parse(read_file(sa.config_file));
    } catch (const json::parse_error& e) {
        throw ehwsn::ParseError(std::string("invalid config JSON: ") + e.what());
    }
    try {
        if (j.contains("networks")) sa.networks = j["networks"].get<int>();
        if (j.contains("nodes")) sa.nodes = j["nodes"].get<int>();
        if (j.contains("mu_grid")) sa.mu_grid = j["mu_grid"].get<std::vector<double>>();
        if (j.contains("cap_grid")) sa.cap_grid = j["cap_grid"].get<std::vector<double>>();
        if (j.contains("schemes")) sa.schemes = j["schemes"].get<std::vector<std::string>>();
        if (j.contains("seed")) sa.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("sim_events")) sa.sim_events = j["sim_events"].get<long long>();
        if (j.contains("jitter")) sa.jitter = j["jitter"].get<double>();
        if (j.contains("threads")) sa.threads = j["threads"].get<int>();
        if (j.contains("iterations")) sa.iterations = j["iterations"].get<int>();
        if (j.contains("profile")) sa.profile = j["profile"].get<std::string>();
        if (j.contains("disk_radius")) sa.disk_radius = j["disk_radius"].get<double>();
        if (j.contains("connectivity_radius"))
            sa.connectivity_radius = j["connectivity_radius"].get<double>();
    } catch (const json::exception& e) {
        throw ehwsn::ParseError(std::string("malformed config field: ") + e.what());
    }
}

struct SweepRow {
    int network_id;
    std::string scheme;
    double mu_avg, cap_avg;
    std::optional<double> analytic_pl;
    std::optional<double> sim_pl, sim_ci;
    std::string status = "ok";
};

int cmd_sweep(SweepArgs sa) {
    if (!sa.config_file.empty())
        apply_config_file(sa);
    const Profile prof = lookup_profile(sa.profile);
    if (sa.mu_grid.empty())
        sa.mu_grid = {prof.mu_avg};
    if (sa.cap_grid.empty())
        sa.cap_grid = {prof.cap_avg};
    if (sa.schemes.empty())
        throw ehwsn::DomainError("scheme list must be non-empty");
    for (double m : sa.mu_grid)
        if (!(m >= 0.01 && m <= 10.0))
            throw ehwsn::DomainError("mu grid values must lie in [0.01, 10]");
    for (double n : sa.cap_grid)
        if (!(n >= 1.0 && n <= 10000.0))
            throw ehwsn::DomainError("cap grid values must lie in [1, 10000]");

    struct Task {
        int network_id;
        double mu, cap;
        std::string scheme;
    };
    std::vector<Task> tasks;
    for (int net = 0; net < sa.networks; ++net)
        for (double m : sa.mu_grid)
            for (double n : sa.cap_grid)
                for (const auto& s : sa.schemes)
                    tasks.push_back({net, m, n, s});

    // Topologies are shared across grid points of the same network.
    std::vector<ehwsn::NetworkTopology> topologies(sa.networks);
    std::vector<std::vector<double>> jitter_factor(sa.networks);
    for (int net = 0; net < sa.networks; ++net) {
        ehwsn::GenerationConfig gc;
        gc.node_count = sa.nodes;
        gc.disk_radius = sa.disk_radius;
        gc.connectivity_radius = sa.connectivity_radius;
        gc.rng_seed = mix_seed(sa.seed, 1000 + net);
        auto t = ehwsn::generate_network(
            gc, per_sensor_rates(sa.nodes, prof.total_lambda));
        t.channel_loss = prof.q;
        if (sa.jitter > 0.0) {
            std::mt19937_64 jrng(mix_seed(sa.seed, 5000 + net));
            auto factor = [&] {
                return 1.0 - sa.jitter +
                       2.0 * sa.jitter *
                           (static_cast<double>(jrng() >> 11) * 0x1.0p-53);
            };
            auto& jf = jitter_factor[net];
            for (int v = 0; v < t.sensor_count(); ++v) {
                t.generation_rates[v] *= factor();
                jf.push_back(factor()); // mu factor
                jf.push_back(factor()); // cap factor
            }
        }
        topologies[net] = std::move(t);
    }

    std::vector<SweepRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task& task = tasks[i];
            SweepRow row{task.network_id, task.scheme, task.mu, task.cap,
                         std::nullopt, std::nullopt, std::nullopt, "ok"};
            try {
                const auto& t = topologies[task.network_id];
                const ehwsn::ResourceBudget budget{task.mu, task.cap};
                ehwsn::HarvestingAllocation a;
                if (task.scheme == "uniform") {
                    a = ehwsn::uniform_allocation(t.node_count, budget);
                    if (sa.jitter > 0.0) {
                        const auto& jf = jitter_factor[task.network_id];
                        for (int v = 0; v < t.sensor_count(); ++v) {
                            a.mu[v] *= jf[2 * v];
                            a.cap[v] = std::max(1.0, a.cap[v] * jf[2 * v + 1]);
                        }
                    }
                } else if (task.scheme == "fair") {
                    a = ehwsn::almost_fair_allocation(t, budget);
                } else if (task.scheme == "optimal") {
                    ehwsn::OptimizerConfig opt;
                    opt.seed = mix_seed(sa.seed, 7000 + i);
                    if (sa.iterations > 0)
                        opt.iterations = sa.iterations;
                    a = ehwsn::optimal_allocation(t, budget, opt);
                } else {
                    throw ehwsn::DomainError("unknown scheme: " + task.scheme);
                }
                row.analytic_pl = ehwsn::solve_flow(t, a).network_loss;
                if (sa.sim_events > 0) {
                    auto rounded = a;
                    for (double& c : rounded.cap)
                        c = std::max<double>(1.0, std::llround(c));
                    ehwsn::SimConfig sc{sa.sim_events, -1, mix_seed(sa.seed, 9000 + i)};
                    const auto sim = ehwsn::simulate(t, rounded, sc);
                    row.sim_pl = sim.empirical_loss;
                    row.sim_ci = sim.ci_halfwidth;
                }
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            rows[i] = std::move(row);
        }
    };

    int thread_count = sa.threads > 0
                           ? sa.threads
                           : static_cast<int>(std::thread::hardware_concurrency());
    thread_count = std::max(1, thread_count);
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < thread_count; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    std::ostringstream csv;
    csv << "network_id,scheme,mu_avg,cap_avg,analytic_PL,sim_PL,sim_ci,status\n";
    for (const auto& r : rows) {
        csv << r.network_id << "," << r.scheme << "," << fmt(r.mu_avg) << ","
            << fmt(r.cap_avg) << ",";
        csv << (r.analytic_pl ? fmt(*r.analytic_pl) : "") << ",";
        csv << (r.sim_pl ? fmt(*r.sim_pl) : "") << ",";
        csv << (r.sim_ci ? fmt(*r.sim_ci) : "") << ",";
        std::string status = r.status;
        for (char& ch : status)
            if (ch == ',' || ch == '\n')
                ch = ';';
        csv << status << "\n";
    }
    emit(sa.output, csv.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-harvesting sensor network loss analysis and resource allocation"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "generate a random disk deployment");
    gen->add_option("--nodes", ga.cfg.node_count, "total node count V (sink included)")
        ->check(CLI::Range(2, 100000));
    gen->add_option("--seed", ga.cfg.rng_seed, "RNG seed");
    gen->add_option("--disk-radius", ga.cfg.disk_radius, "deployment disk radius (m)");
    gen->add_option("--radius", ga.cfg.connectivity_radius, "connectivity radius (m)");
    gen->add_option("--max-retries", ga.cfg.max_retries, "re-deployment attempts");
    gen->add_option("--loss", ga.q, "channel loss probability q");
    gen->add_option("--rate", ga.rate, "per-sensor report rate (Hz)");
    gen->add_option("--profile", ga.profile, "parameter profile");
    gen->add_option("-o,--output", ga.output, "topology file (default stdout)");

    std::string topology_file, output, scheme = "fair";
    AllocSource src;
    std::uint64_t seed = 0;
    int iterations = 0;
    double mu = 0.2326, cap = 2283;
    long long events = 1000000, warmup = -1;

    auto* ana = app.add_subcommand("analyze", "analytic flow and loss of a topology");
    ana->add_option("--topology", topology_file, "topology JSON file")->required();
    ana->add_option("--allocation", src.allocation_file, "allocation JSON file");
    ana->add_option("--mu", src.mu, "uniform per-node harvest rate");
    ana->add_option("--cap", src.cap, "uniform per-node capacity");
    ana->add_option("-o,--output", output, "report file (default stdout)");

    auto* alloc = app.add_subcommand("allocate", "compute a harvesting allocation");
    alloc->add_option("--topology", topology_file, "topology JSON file")->required();
    alloc->add_option("--scheme", scheme, "uniform | fair | optimal");
    alloc->add_option("--mu", mu, "budget average harvest rate");
    alloc->add_option("--cap", cap, "budget average capacity");
    alloc->add_option("--seed", seed, "optimizer seed");
    alloc->add_option("--iterations", iterations, "optimizer iteration budget");
    alloc->add_option("-o,--output", output, "allocation file (default stdout)");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo run with analytic reference");
    sim->add_option("--topology", topology_file, "topology JSON file")->required();
    sim->add_option("--allocation", src.allocation_file, "allocation JSON file");
    sim->add_option("--mu", src.mu, "uniform per-node harvest rate");
    sim->add_option("--cap", src.cap, "uniform per-node capacity");
    sim->add_option("--events", events, "counted generated reports");
    sim->add_option("--warmup", warmup, "warmup reports (-1: 10% of --events)");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("-o,--output", output, "result file (default stdout)");

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "scheme comparison over networks and budgets");
    sweep->add_option("--config", sa.config_file, "JSON experiment config");
    sweep->add_option("--networks", sa.networks, "number of random networks");
    sweep->add_option("--nodes", sa.nodes, "nodes per network");
    sweep->add_option("--mu-grid", sa.mu_grid, "budget harvest rates")->delimiter(',');
    sweep->add_option("--cap-grid", sa.cap_grid, "budget capacities")->delimiter(',');
    sweep->add_option("--schemes", sa.schemes, "schemes to run")->delimiter(',');
    sweep->add_option("--seed", sa.seed, "master seed");
    sweep->add_option("--sim-events", sa.sim_events, "simulated events per row (0: analytic only)");
    sweep->add_option("--jitter", sa.jitter, "per-node parameter jitter fraction");
    sweep->add_option("--threads", sa.threads, "worker threads (0: auto)");
    sweep->add_option("--iterations", sa.iterations, "optimizer iteration budget");
    sweep->add_option("--profile", sa.profile, "parameter profile");
    sweep->add_option("--disk-radius", sa.disk_radius, "deployment disk radius (m)");
    sweep->add_option("--radius", sa.connectivity_radius, "connectivity radius (m)");
    sweep->add_option("-o,--output", sa.output, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_generate(ga);
        if (ana->parsed())
            return cmd_analyze(topology_file, src, output);
        if (alloc->parsed())
            return cmd_allocate(topology_file, scheme, mu, cap, seed, iterations, output);
        if (sim->parsed())
            return cmd_simulate(topology_file, src, events, warmup, seed, output);
        if (sweep->parsed()) {
            sa.output = sa.output.empty() ? output : sa.output;
            return cmd_sweep(sa);
        }
    } catch (const ehwsn::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ehwsn::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ehwsn::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ehwsn::DisconnectedNetworkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
