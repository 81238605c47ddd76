#include "CLI11.hpp"

#include "arqsched/capacity.hpp"
#include "arqsched/channel.hpp"
#include "arqsched/counterexample.hpp"
#include "arqsched/csv.hpp"
#include "arqsched/delay.hpp"
#include "arqsched/evaluate.hpp"
#include "arqsched/exact.hpp"
#include "arqsched/harness.hpp"
#include "arqsched/problem.hpp"
#include "arqsched/rng.hpp"
#include "arqsched/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace arqsched;

std::string fmt(double value) { return csv::format_double(value); }

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    file << text;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        const std::string token =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + token + "'");
        }
        if (used != token.size()) throw std::invalid_argument("trailing characters in '" + token + "'");
        out.push_back(value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// "steady" or an explicit comma-separated list of length n.
std::vector<double> resolve_beliefs(const std::string& pi_text, const ChannelParams& params,
                                    int n_users) {
    if (pi_text == "steady") {
        return std::vector<double>(static_cast<std::size_t>(n_users), steady_state(params));
    }
    std::vector<double> beliefs = parse_double_list(pi_text);
    if (beliefs.size() != static_cast<std::size_t>(n_users)) {
        throw std::invalid_argument("--pi must list exactly --n beliefs (or be \"steady\")");
    }
    return beliefs;
}

// Value artifacts drop the runtime column so identical config + seed gives
// byte-identical output.
std::vector<std::string> report_header() {
    std::vector<std::string> header = value_csv_header();
    header.pop_back();
    return header;
}

std::vector<std::string> report_row(const ValueReport& report) {
    std::vector<std::string> row = value_csv_row(report);
    row.pop_back();
    return row;
}

int greedy_from_view(const InfoView& view) {
    int best = 0;
    for (std::size_t u = 1; u < view.beliefs.size(); ++u) {
        if (view.beliefs[u] > view.beliefs[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(u);
        }
    }
    return best;
}

struct CapacityArgs {
    double p = 0.0;
    double r = 0.0;
    int n = 2;
    std::string delay;
    std::string out;
};

void run_capacity(const CapacityArgs& args) {
    ChannelParams params(args.p, args.r);
    DelayPmf delay = DelayPmf::parse(args.delay);
    if (args.n < 1) throw std::invalid_argument("--n must be >= 1");

    TableArtifact art;
    art.comments = {"command=capacity", "p=" + fmt(args.p), "r=" + fmt(args.r),
                    "n=" + std::to_string(args.n), "delay=" + delay.text()};
    art.header = {"quantity", "value"};
    if (args.n == 1) {
        art.rows.push_back({"genie_sum_capacity", fmt(genie_sum_capacity(params, delay, 1).value)});
    } else if (args.n == 2) {
        art.rows.push_back(
            {"sum_capacity_two_user", fmt(sum_capacity_two_user(params, delay).value)});
        art.rows.push_back({"genie_sum_capacity", fmt(genie_sum_capacity(params, delay, 2).value)});
    } else {
        CapacityBounds bounds = sum_capacity_bounds(params, delay, args.n);
        art.rows.push_back({"sum_capacity_lower_two_user", fmt(bounds.lower)});
        art.rows.push_back({"sum_capacity_upper_genie", fmt(bounds.upper)});
    }
    write_text(art.to_csv(), args.out);
}

struct ValueArgs {
    double p = 0.0;
    double r = 0.0;
    int n = 2;
    int m = 4;
    std::string delay;
    std::string pi = "steady";
    std::string policy = "greedy";
    std::string out;
};

Instance make_instance(const ValueArgs& args) {
    ChannelParams params(args.p, args.r);
    DelayPmf delay = DelayPmf::parse(args.delay);
    return Instance::homogeneous(params, resolve_beliefs(args.pi, params, args.n), args.m, delay);
}

std::vector<std::string> echo_instance(const std::string& command, const ValueArgs& args) {
    return {"command=" + command, "p=" + fmt(args.p),    "r=" + fmt(args.r),
            "n=" + std::to_string(args.n), "m=" + std::to_string(args.m),
            "delay=" + args.delay,         "pi=" + args.pi};
}

void run_genie(const ValueArgs& args) {
    Instance instance = make_instance(args);
    TableArtifact art;
    art.comments = echo_instance("genie", args);
    art.header = report_header();
    art.rows.push_back(report_row(genie_value(instance)));
    write_text(art.to_csv(), args.out);
}

void run_optimal(const ValueArgs& args) {
    Instance instance = make_instance(args);
    ValueReport opt = optimal_value(instance);
    ValueReport greedy = policy_value_exact(instance, PolicySpec{});
    TableArtifact art;
    art.comments = echo_instance("optimal", args);
    art.comments.push_back(
        "pct_suboptimal=" + fmt((opt.total - greedy.total) / opt.total * 100.0));
    art.header = report_header();
    art.rows.push_back(report_row(opt));
    art.rows.push_back(report_row(greedy));
    write_text(art.to_csv(), args.out);
}

void run_value(const ValueArgs& args) {
    Instance instance = make_instance(args);
    ValueReport report = args.policy == "optimal"
                             ? optimal_value(instance)
                             : policy_value_exact(instance, PolicySpec::parse(args.policy));
    TableArtifact art;
    art.comments = echo_instance("value", args);
    art.comments.push_back("policy=" + args.policy);
    art.header = report_header();
    art.rows.push_back(report_row(report));
    write_text(art.to_csv(), args.out);
}

struct SimulateArgs {
    ValueArgs base;
    std::string mode = "arq";
    std::uint64_t episodes = 10000;
    std::uint64_t seed = 0;
    std::string log;
};

void run_simulate(const SimulateArgs& args) {
    Instance instance = make_instance(args.base);
    ObservationMode mode = parse_observation_mode(args.mode);
    PolicySpec policy = PolicySpec::parse(args.base.policy);
    ValueReport report = policy_value_mc(instance, mode, policy, args.episodes, args.seed);

    TableArtifact art;
    art.comments = echo_instance("simulate", args.base);
    art.comments.push_back("policy=" + args.base.policy);
    art.comments.push_back("mode=" + args.mode);
    art.comments.push_back("episodes=" + std::to_string(args.episodes));
    art.comments.push_back("seed=" + std::to_string(args.seed));
    art.header = report_header();
    art.rows.push_back(report_row(report));
    write_text(art.to_csv(), args.base.out);

    if (!args.log.empty()) {
        TableArtifact log;
        log.comments = art.comments;
        log.header = {"episode", "slot", "user", "success"};
        for (std::uint64_t e = 0; e < args.episodes; ++e) {
            Rng channel_rng = episode_rng(args.seed, e);
            Rng policy_rng = episode_rng(args.seed, e, 1);
            EpisodeResult episode = run_episode(instance, mode, policy, channel_rng, policy_rng);
            for (std::size_t i = 0; i < episode.decisions.size(); ++i) {
                log.rows.push_back({std::to_string(e),
                                    std::to_string(instance.horizon - static_cast<int>(i)),
                                    std::to_string(episode.decisions[i]),
                                    episode.successes[i] ? "1" : "0"});
            }
        }
        write_text(log.to_csv(), args.log);
    }
}

struct RegionArgs {
    double p = 0.0;
    double r = 0.0;
    int n = 2;
    std::string delay;
    std::string out;
};

void run_region(const RegionArgs& args) {
    ChannelParams params(args.p, args.r);
    DelayPmf delay = DelayPmf::parse(args.delay);
    RegionBounds bounds = region_bounds(params, delay, args.n);

    TableArtifact art;
    art.comments = {"command=region",
                    "p=" + fmt(args.p),
                    "r=" + fmt(args.r),
                    "n=" + std::to_string(args.n),
                    "delay=" + delay.text(),
                    "outer rows bound sums over 1-based user sets; inner coordinates are "
                    "per-user throughputs"};
    art.header = {"kind", "label", "users", "value", "coordinates"};
    for (const OuterConstraint& c : bounds.outer.constraints) {
        std::string users;
        for (std::size_t i = 0; i < c.users.size(); ++i) {
            if (i > 0) users += '+';
            users += std::to_string(c.users[i] + 1);
        }
        art.rows.push_back({"outer", "", users, fmt(c.bound), ""});
    }
    auto join_coords = [](const std::vector<double>& coords) {
        std::string text;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (i > 0) text += ';';
            text += fmt(coords[i]);
        }
        return text;
    };
    for (const RegionVertex& v : bounds.inner) {
        art.rows.push_back({"inner", v.label, "", "", join_coords(v.coordinates)});
    }
    write_text(art.to_csv(), args.out);

    // Plot-ready exact two-user genie polygon next to the main artifact.
    if (args.n == 2 && delay.deterministic() && !args.out.empty()) {
        std::string dat = "# exact two-user genie region, counterclockwise\n";
        for (const RegionVertex& v : genie_region_n2(params, delay)) {
            dat += fmt(v.coordinates[0]);
            dat += ' ';
            dat += fmt(v.coordinates[1]);
            dat += '\n';
        }
        write_text(dat, args.out + ".polygon.dat");
    }
}

struct CounterexampleArgs {
    std::string kind;
    double p = 0.0;
    double r = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    int m = 6;
    std::string pi;
    std::string out;
};

void run_counterexample(const CounterexampleArgs& args) {
    TableArtifact art;
    art.header = {"quantity", "value"};

    if (args.kind == "m4") {
        std::vector<double> pi =
            args.pi.empty() ? std::vector<double>{0.5, 0.5, 0.5} : parse_double_list(args.pi);
        if (pi.size() != 3) throw std::invalid_argument("m4 needs exactly 3 beliefs");
        M4Instance instance{ChannelParams(args.p, args.r), {pi[0], pi[1], pi[2]}};
        const double closed = greedy_vs_tilde_gap_m4(instance);
        M4Enumeration audit = m4_enumerate(instance);
        art.comments = {"command=counterexample", "kind=m4",
                        "p=" + fmt(args.p),       "r=" + fmt(args.r),
                        "pi=" + fmt(pi[0]) + "," + fmt(pi[1]) + "," + fmt(pi[2]),
                        "horizon=4 users=3 deterministic delay=1"};
        art.rows.push_back({"gap_closed_form", fmt(closed)});
        art.rows.push_back({"gap_enumeration", fmt(audit.gap)});
        art.rows.push_back({"oracle_abs_delta", fmt(std::fabs(audit.gap - closed))});
        art.rows.push_back({"greedy_suboptimal", closed > 0.0 ? "true" : "false"});
    } else if (args.kind == "general") {
        if (args.pi.empty()) throw std::invalid_argument("--pi is required for kind=general");
        std::vector<double> pi = parse_double_list(args.pi);
        GeneralGapInstance instance{ChannelParams(args.p, args.r), args.m, pi};
        const double closed = greedy_vs_tilde_gap_general(instance);
        art.comments = {"command=counterexample",
                        "kind=general",
                        "p=" + fmt(args.p),
                        "r=" + fmt(args.r),
                        "m=" + std::to_string(args.m),
                        "pi=" + args.pi,
                        "users=" + std::to_string(pi.size()) + " deterministic delay=1"};
        art.rows.push_back({"gap_closed_form", fmt(closed)});
        const int n_users = static_cast<int>(pi.size());
        if (n_users * args.m <= 22) {
            Instance full = Instance::homogeneous(ChannelParams(args.p, args.r), pi, args.m,
                                                  DelayPmf::point_mass(1));
            auto stayed_on = [&](const PathView& view) {
                for (int t = 5; t <= args.m; ++t) {
                    if (view.states[0][static_cast<std::size_t>(t - 1)] != ChannelState::on ||
                        view.states[1][static_cast<std::size_t>(t - 1)] != ChannelState::on) {
                        return false;
                    }
                }
                return true;
            };
            const double greedy = path_enumeration_value(
                full, [](const PathView& view) { return view.tracker.greedy_user(view.slot); });
            const double tilde = path_enumeration_value(full, [&](const PathView& view) {
                if (view.slot == 3 && stayed_on(view)) return 1;
                return view.tracker.greedy_user(view.slot);
            });
            art.rows.push_back({"gap_path_enumeration", fmt(tilde - greedy)});
            art.rows.push_back({"oracle_abs_delta", fmt(std::fabs((tilde - greedy) - closed))});
        } else {
            art.comments.push_back("path oracle skipped: users*m exceeds 22");
        }
        art.rows.push_back({"greedy_suboptimal", closed > 0.0 ? "true" : "false"});
    } else if (args.kind == "nonidentical") {
        if (args.pi.empty()) throw std::invalid_argument("--pi is required for kind=nonidentical");
        std::vector<double> pi = parse_double_list(args.pi);
        if (pi.size() != 2) throw std::invalid_argument("nonidentical needs exactly 2 beliefs");
        NonidenticalInstance instance{args.p, args.r1, args.r2, {pi[0], pi[1]}};
        const double closed = nonidentical_gap(instance);
        Instance full{std::vector<ChannelParams>{ChannelParams(args.p, args.r1),
                                                 ChannelParams(args.p, args.r2)},
                      pi, 2, DelayPmf::point_mass(0)};
        const double greedy = exact_value(full, EnginePolicy::greedy()).total;
        const double swapped = exact_value(full, EnginePolicy::custom([](const InfoView& view) {
                                               return view.slot == 2 ? 1 : greedy_from_view(view);
                                           }))
                                   .total;
        art.comments = {"command=counterexample", "kind=nonidentical",
                        "p=" + fmt(args.p),       "r1=" + fmt(args.r1),
                        "r2=" + fmt(args.r2),     "pi=" + args.pi,
                        "horizon=2 users=2 instantaneous feedback"};
        art.rows.push_back({"gap_closed_form", fmt(closed)});
        art.rows.push_back({"gap_exact_engine", fmt(greedy - swapped)});
        art.rows.push_back({"oracle_abs_delta", fmt(std::fabs((greedy - swapped) - closed))});
        art.rows.push_back({"greedy_suboptimal", closed < 0.0 ? "true" : "false"});
    } else {
        throw std::invalid_argument("--kind must be m4, general, or nonidentical");
    }
    write_text(art.to_csv(), args.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Opportunistic multiuser scheduling over two-state Markov downlink channels "
                 "with randomly delayed ARQ feedback"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI-style config file");

    CapacityArgs cap;
    auto* cap_cmd = app.add_subcommand("capacity", "Closed-form sum-capacity values and bounds");
    cap_cmd->add_option("--p", cap.p, "P(ON stays ON)")->required();
    cap_cmd->add_option("--r", cap.r, "P(OFF turns ON)")->required();
    cap_cmd->add_option("--n", cap.n, "user count (default 2)");
    cap_cmd->add_option("--delay", cap.delay, "feedback delay pmf, e.g. 0.5,0.5")->required();
    cap_cmd->add_option("--out", cap.out, "output file (default stdout)");
    cap_cmd->callback([&cap] { run_capacity(cap); });

    ValueArgs genie;
    auto* genie_cmd =
        app.add_subcommand("genie", "Exact value of the genie-aided (full feedback) scheduler");
    genie_cmd->add_option("--p", genie.p)->required();
    genie_cmd->add_option("--r", genie.r)->required();
    genie_cmd->add_option("--n", genie.n)->required();
    genie_cmd->add_option("--m", genie.m)->required();
    genie_cmd->add_option("--delay", genie.delay)->required();
    genie_cmd->add_option("--pi", genie.pi, "initial beliefs or \"steady\"");
    genie_cmd->add_option("--out", genie.out);
    genie_cmd->callback([&genie] { run_genie(genie); });

    ValueArgs opt;
    auto* opt_cmd =
        app.add_subcommand("optimal", "Exact optimal vs greedy value under ARQ feedback");
    opt_cmd->add_option("--p", opt.p)->required();
    opt_cmd->add_option("--r", opt.r)->required();
    opt_cmd->add_option("--n", opt.n)->required();
    opt_cmd->add_option("--m", opt.m)->required();
    opt_cmd->add_option("--delay", opt.delay)->required();
    opt_cmd->add_option("--pi", opt.pi, "initial beliefs or \"steady\"");
    opt_cmd->add_option("--out", opt.out);
    opt_cmd->callback([&opt] { run_optimal(opt); });

    ValueArgs val;
    auto* val_cmd = app.add_subcommand("value", "Exact value of one policy under ARQ feedback");
    val_cmd->add_option("--p", val.p)->required();
    val_cmd->add_option("--r", val.r)->required();
    val_cmd->add_option("--n", val.n)->required();
    val_cmd->add_option("--m", val.m)->required();
    val_cmd->add_option("--delay", val.delay)->required();
    val_cmd->add_option("--pi", val.pi, "initial beliefs or \"steady\"");
    val_cmd->add_option("--policy", val.policy,
                        "optimal | greedy | greedy-queue | random | fixed:<i>");
    val_cmd->add_option("--out", val.out);
    val_cmd->callback([&val] { run_value(val); });

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
    sim_cmd->add_option("--p", sim.base.p)->required();
    sim_cmd->add_option("--r", sim.base.r)->required();
    sim_cmd->add_option("--n", sim.base.n)->required();
    sim_cmd->add_option("--m", sim.base.m)->required();
    sim_cmd->add_option("--delay", sim.base.delay)->required();
    sim_cmd->add_option("--pi", sim.base.pi, "initial beliefs or \"steady\"");
    sim_cmd->add_option("--policy", sim.base.policy,
                        "greedy | greedy-queue | random | fixed:<i> | alpha:<a0,a1,a2,a3>");
    sim_cmd->add_option("--mode", sim.mode, "arq | genie");
    sim_cmd->add_option("--episodes", sim.episodes, "number of episodes (default 10000)");
    auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "rng seed (required)");
    sim_cmd->add_option("--log", sim.log, "also write a per-slot decision log CSV here");
    sim_cmd->add_option("--out", sim.base.out);
    sim_cmd->callback([&sim, sim_seed] {
        if (sim_seed->count() == 0) {
            throw std::invalid_argument("--seed is required for stochastic runs");
        }
        run_simulate(sim);
    });

    RegionArgs reg;
    auto* reg_cmd =
        app.add_subcommand("region", "Throughput region bounds (and exact polygon for n=2)");
    reg_cmd->add_option("--p", reg.p)->required();
    reg_cmd->add_option("--r", reg.r)->required();
    reg_cmd->add_option("--n", reg.n, "user count (default 2)");
    reg_cmd->add_option("--delay", reg.delay)->required();
    reg_cmd->add_option("--out", reg.out, "output file; also writes <out>.polygon.dat for n=2");
    reg_cmd->callback([&reg] { run_region(reg); });

    CounterexampleArgs cex;
    auto* cex_cmd =
        app.add_subcommand("counterexample", "Greedy suboptimality gap certificates");
    cex_cmd->add_option("--kind", cex.kind, "m4 | general | nonidentical")->required();
    cex_cmd->add_option("--p", cex.p)->required();
    cex_cmd->add_option("--r", cex.r, "common r (m4, general)");
    cex_cmd->add_option("--r1", cex.r1, "user 0 r (nonidentical)");
    cex_cmd->add_option("--r2", cex.r2, "user 1 r (nonidentical)");
    cex_cmd->add_option("--m", cex.m, "horizon (general, >= 5)");
    cex_cmd->add_option("--pi", cex.pi, "initial beliefs, comma separated");
    cex_cmd->add_option("--out", cex.out);
    cex_cmd->callback([&cex] { run_counterexample(cex); });

    int table_id = 1;
    std::uint64_t table_episodes = 100000;
    std::uint64_t table_seed = 0;
    std::string table_out;
    auto* table_cmd = app.add_subcommand("table", "Reproduce one of the reference tables");
    table_cmd->add_option("id", table_id, "table id")->required()->check(CLI::Range(1, 4));
    table_cmd->add_option("--episodes", table_episodes, "MC episodes per row (tables 2-4)");
    auto* table_seed_opt = table_cmd->add_option("--seed", table_seed, "rng seed (tables 2-4)");
    table_cmd->add_option("--out", table_out);
    table_cmd->callback([&] {
        if (table_id != 1 && table_seed_opt->count() == 0) {
            throw std::invalid_argument("--seed is required for stochastic runs");
        }
        write_text(run_table(table_id, table_episodes, table_seed).to_csv(), table_out);
    });

    int fig_max_m = 8;
    std::string fig_out;
    auto* fig_cmd = app.add_subcommand("figure1", "Sum-rate sweep of the motivating instance");
    fig_cmd->add_option("--max-m", fig_max_m, "largest horizon (default 8, max 10)");
    fig_cmd->add_option("--out", fig_out);
    fig_cmd->callback([&] { write_text(run_figure1(fig_max_m).to_csv(), fig_out); });

    // Config files address subcommand options through a [subcommand] section;
    // CLI11 only reads those sections for subcommands marked configurable.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->configurable();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
