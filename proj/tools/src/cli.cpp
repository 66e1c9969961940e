// Copyright 2026 The Mindroom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mindroom/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <mutex>
#include <set>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"
#include "mindroom/llm/cassette.hpp"
#include "mindroom/orchestrator.hpp"
#include "mindroom/report.hpp"
#include "mindroom/run_config.hpp"
#include "mindroom/service.hpp"

namespace mindroom::cli {
namespace {

struct Flags {
    int sessions = 20;
    int turns = 5;
    int agents = 4;
    std::uint64_t seed = 7;
    int jobs = 1;
    int top_n = 3;
    int k = 5;
    int max_turns = 5;
    std::string config;
    std::string cassette;
    std::string out = "out";
    std::string backend;
    std::string profile;
    std::string counts = "1,2,3,4";
    std::string transcripts;
    std::string record;
    std::string listen = "127.0.0.1:8080";
    std::string static_dir;
    std::string token;
    bool lenient = false;
    bool debug = false;
    std::string log_level = "warn";
};

// Options that were passed explicitly; they override the config file.
struct Given {
    std::map<std::string, CLI::Option*> opts;
    bool has(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_run_options(CLI::App& cmd, Flags& f, Given& g, bool with_sessions = true) {
    if (with_sessions) g.opts["sessions"] = cmd.add_option("--sessions", f.sessions, "Sessions to run (default 20)");
    g.opts["turns"] = cmd.add_option("--turns", f.turns, "Dialogue turns per session (default 5)");
    g.opts["agents"] = cmd.add_option("--agents", f.agents, "Companion agents, drawn cyclically from the persona catalog (default 4)");
    g.opts["seed"] = cmd.add_option("--seed", f.seed, "Base seed (default 7)");
    g.opts["jobs"] = cmd.add_option("--jobs", f.jobs, "Sessions run in parallel (default 1)");
    g.opts["top_n"] = cmd.add_option("--top-n", f.top_n, "Speaker is drawn from the n highest intention scores (default 3)");
    g.opts["k"] = cmd.add_option("--k", f.k, "Initial ToM hypotheses per turn (default 5)");
    cmd.add_option("--config", f.config, "JSON run configuration");
    g.opts["cassette"] = cmd.add_option("--cassette", f.cassette, "Cassette to replay (implies --backend cassette)");
    g.opts["backend"] = cmd.add_option("--backend", f.backend, "live | cassette | synthetic");
    g.opts["profile"] = cmd.add_option("--profile", f.profile, "Synthetic backend profile: default | figure-rounds | volatile");
    g.opts["lenient"] = cmd.add_flag("--lenient", f.lenient, "On a cassette miss, replay the nearest recorded reply instead of failing");
    cmd.add_option("--record", f.record, "Also record every reply into this cassette");
    cmd.add_option("--out", f.out, "Output directory (default ./out)");
}

std::vector<int> parse_counts(const std::string& text) {
    std::vector<int> counts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            counts.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("--counts must be a comma-separated list of integers (got '" + text + "')");
        }
    }
    if (counts.empty()) throw ValidationError("--counts must not be empty");
    return counts;
}

RunConfig resolve_config(const Flags& f, const Given& g) {
    RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (g.has("sessions")) c.sessions = f.sessions;
    if (g.has("turns")) c.session.turns = f.turns;
    if (g.has("seed")) c.session.seed = f.seed;
    if (g.has("jobs")) c.jobs = f.jobs;
    if (g.has("top_n")) c.session.top_n = f.top_n;
    if (g.has("k")) c.session.pipeline.k = f.k;
    if (g.has("agents")) {
        if (f.agents < 1) throw ValidationError("--agents must be >= 1 (got " + std::to_string(f.agents) + ")");
        c.session.agent_personas = cycle_personas(c.session.agent_personas, static_cast<std::size_t>(f.agents));
    }
    if (g.has("cassette")) {
        c.backend.cassette = f.cassette;
        c.backend.kind = BackendKind::Cassette;
    }
    if (g.has("backend")) {
        const auto kind = parse_backend_kind(f.backend);
        if (!kind) throw ValidationError("--backend must be live, cassette or synthetic (got '" + f.backend + "')");
        c.backend.kind = *kind;
    }
    if (g.has("profile")) {
        const auto profile = llm::parse_synthetic_profile(f.profile);
        if (!profile) throw ValidationError("unknown --profile '" + f.profile + "'");
        c.backend.profile = *profile;
    }
    if (g.has("lenient")) c.backend.lenient = f.lenient;
    c.validate();
    return c;
}

std::vector<SessionConfig> batch_configs(const RunConfig& c) {
    std::vector<SessionConfig> configs;
    for (int i = 0; i < c.sessions; ++i) configs.push_back(batch_session_config(c.session, i));
    return configs;
}

void print_summary(const RunSummary& s, std::ostream& out) {
    out << "sessions: " << s.session_count << " (failed: " << s.failed_count << ")\n";
    out << "mean cognitive level per turn:";
    for (double m : s.mean_cognitive_per_turn) out << ' ' << format_number(m);
    out << "\nfinal mean emotion: " << format_number(s.final_mean_emotion) << "\n";
}

int cmd_simulate(const Flags& f, const Given& g, std::ostream& out, bool recording) {
    if (recording && f.cassette.empty()) throw ValidationError("record needs --cassette <output path>");
    Given given = g;
    if (recording) given.opts.erase("cassette");  // the cassette is the output here
    auto config = resolve_config(f, given);
    if (recording && config.backend.kind == BackendKind::Cassette) {
        throw ValidationError("record needs a live or synthetic backend");
    }
    const std::filesystem::path record_to = recording ? f.cassette : f.record;
    auto backend = make_backend(config.backend, record_to);
    const auto batch = run_batch(batch_configs(config), *backend, config.jobs);
    if (auto* rec = dynamic_cast<llm::RecordingBackend*>(backend.get())) rec->flush();
    write_batch_outputs(batch, f.out);
    print_summary(batch.summary, out);
    out << "wrote " << (std::filesystem::path(f.out) / "summary.csv").string() << "\n";
    if (recording) out << "recorded " << record_to.string() << "\n";
    return batch.summary.failed_count > 0 ? kExitRuntime : kExitOk;
}

int cmd_sweep_rounds(const Flags& f, const Given& g, std::ostream& out) {
    auto config = resolve_config(f, g);
    if (f.max_turns < 1) throw ValidationError("--max-turns must be >= 1");
    auto backend = make_backend(config.backend, f.record);
    const auto rows = sweep_rounds(config.session, f.max_turns, config.sessions, *backend, config.jobs);
    if (auto* rec = dynamic_cast<llm::RecordingBackend*>(backend.get())) rec->flush();
    const auto path = std::filesystem::path(f.out) / "rounds.csv";
    write_text_file(path, rounds_to_csv(rows));
    out << rounds_to_csv(rows) << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_sweep_agents(const Flags& f, const Given& g, std::ostream& out) {
    const auto counts = parse_counts(f.counts);
    for (int c : counts) {
        if (c < 1) throw ValidationError("every agent count must be >= 1");
    }
    auto config = resolve_config(f, g);
    auto backend = make_backend(config.backend, f.record);
    const auto catalog = f.config.empty() ? default_personas() : load_run_config(f.config).session.agent_personas;
    const auto rows = sweep_agents(config.session, counts, config.sessions, catalog, *backend, config.jobs);
    if (auto* rec = dynamic_cast<llm::RecordingBackend*>(backend.get())) rec->flush();
    const auto path = std::filesystem::path(f.out) / "agents.csv";
    write_text_file(path, agents_to_csv(rows));
    out << agents_to_csv(rows) << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out) {
    if (f.transcripts.empty()) throw ValidationError("report needs --transcripts <dir of .ndjson transcripts>");
    const auto transcripts = load_transcripts(f.transcripts);
    if (transcripts.empty()) throw ValidationError("no .ndjson transcripts found in " + f.transcripts);
    const auto summary = summarize(transcripts);
    export_report(summary, transcripts, f.out);
    print_summary(summary, out);
    out << "wrote " << transcripts.size() << " transcript(s) and summary.csv under " << f.out << "\n";
    return kExitOk;
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ValidationError("--listen must be host:port (got '" + listen + "')");
    int port = -1;
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
    }
    if (port < 0 || port > 65535) throw ValidationError("invalid port in --listen '" + listen + "'");
    return {listen.substr(0, colon), port};
}

int cmd_serve(const Flags& f, const Given& g, std::ostream& out) {
    auto config = resolve_config(f, g);
    ServiceConfig sc;
    std::tie(sc.host, sc.port) = parse_listen(f.listen);
    sc.session_defaults = config.session;
    sc.seed = config.session.seed;
    sc.debug = f.debug;
    sc.static_dir = f.static_dir;
    sc.bearer_token = f.token;
    if (sc.bearer_token.empty()) {
        if (const char* t = std::getenv("MINDROOM_SERVICE_TOKEN")) sc.bearer_token = t;
    }

    // Block the stop signals before any thread starts so sigwait below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Service service(sc, make_backend(config.backend, f.record));
    const int port = service.start();
    out << "listening on http://" << sc.host << ":" << port << " (Ctrl-C to stop)" << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
    return kExitOk;
}

void setup_logging(const std::string& level, std::ostream& err) {
    static std::mutex mu;
    std::lock_guard lock(mu);
    // spdlog maps unknown names to "off"; reject them instead.
    static const std::set<std::string> kLevels{"trace", "debug", "info", "warn", "warning", "err", "error", "critical", "off"};
    if (!kLevels.count(level)) throw ValidationError("unknown log level");
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    sink->set_pattern("[%l] %v");
    auto logger = std::make_shared<spdlog::logger>("mindroom", sink);
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-agent classroom simulation with theory-of-mind companions", "mindroom"};
    app.require_subcommand(1);
    Flags f;
    // One option map per subcommand; only the parsed subcommand's map is consulted.
    std::map<const CLI::App*, Given> given;
    app.add_option("--log-level", f.log_level, "trace | debug | info | warn | error | off (default warn)");

    auto* simulate = app.add_subcommand("simulate", "Run a batch of simulated sessions");
    add_run_options(*simulate, f, given[simulate]);
    auto* record = app.add_subcommand("record", "Run a batch against a live or synthetic backend and record a cassette");
    add_run_options(*record, f, given[record]);
    auto* rounds = app.add_subcommand("sweep-rounds", "Mean cognitive level at each dialogue turn");
    add_run_options(*rounds, f, given[rounds]);
    rounds->add_option("--max-turns", f.max_turns, "Turns per session (default 5)");
    auto* agents = app.add_subcommand("sweep-agents", "Mean per-session maximum cognitive level for each agent count");
    add_run_options(*agents, f, given[agents]);
    agents->add_option("--counts", f.counts, "Comma-separated agent counts (default 1,2,3,4)");
    auto* report = app.add_subcommand("report", "Summary and rubric-ready transcripts from saved transcripts");
    report->add_option("--transcripts", f.transcripts, "Directory holding .ndjson transcripts")->required();
    report->add_option("--out", f.out, "Output directory (default ./out)");
    auto* serve = app.add_subcommand("serve", "HTTP service for live sessions");
    add_run_options(*serve, f, given[serve], false);
    serve->add_option("--listen", f.listen, "host:port (default 127.0.0.1:8080)");
    serve->add_option("--static", f.static_dir, "Directory served at /");
    serve->add_flag("--debug", f.debug, "Emit Debug events with pipeline internals by default");
    serve->add_option("--token", f.token, "Require this bearer token (default $MINDROOM_SERVICE_TOKEN)");

    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitValidation;
    }

    // The logger writes to `err`, which may not outlive this call.
    struct RestoreLogger {
        std::shared_ptr<spdlog::logger> previous = spdlog::default_logger();
        ~RestoreLogger() { spdlog::set_default_logger(previous); }
    } restore_logger;
    try {
        setup_logging(f.log_level, err);
    } catch (const std::exception&) {
        err << "error: invalid --log-level '" << f.log_level << "'\n";
        return kExitValidation;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(f, given[simulate], out, false);
        if (record->parsed()) return cmd_simulate(f, given[record], out, true);
        if (rounds->parsed()) return cmd_sweep_rounds(f, given[rounds], out);
        if (agents->parsed()) return cmd_sweep_agents(f, given[agents], out);
        if (report->parsed()) return cmd_report(f, out);
        if (serve->parsed()) return cmd_serve(f, given[serve], out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace mindroom::cli
