#include "tissue/cli.hpp"

#include "tissue/dataset.hpp"
#include "tissue/error.hpp"
#include "tissue/net.hpp"
#include "tissue/plotdata.hpp"
#include "tissue/policy.hpp"
#include "tissue/replay.hpp"
#include "tissue/text.hpp"
#include "tissue/twocell.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

namespace fs = std::filesystem;

namespace tissue {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Files created by one subcommand. Unless keep() is called they are
// deleted again when the subcommand unwinds.
class Outputs {
public:
    Outputs() = default;
    Outputs(const Outputs&) = delete;
    Outputs& operator=(const Outputs&) = delete;
    ~Outputs() {
        if (kept_) return;
        for (auto it = files_.rbegin(); it != files_.rend(); ++it) {
            it->second->close();
            std::error_code ec;
            fs::remove(it->first, ec);
        }
    }

    std::ofstream& open(const fs::path& path) {
        auto stream = std::make_unique<std::ofstream>(path);
        if (!*stream) throw Error("cannot write '" + path.string() + "'");
        files_.emplace_back(path, std::move(stream));
        return *files_.back().second;
    }

    void keep() {
        for (auto& [path, stream] : files_) {
            stream->flush();
            if (!*stream) throw Error("write to '" + path.string() + "' failed");
            stream->close();
        }
        kept_ = true;
    }

private:
    std::vector<std::pair<fs::path, std::unique_ptr<std::ofstream>>> files_;
    bool kept_ = false;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return exit_ok;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const TransportError& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    } catch (const TickError& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    } catch (const ProtocolError& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    } catch (const Error& e) {  // bad parameters, unreadable or malformed inputs
        err << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

double parse_rate(const std::string& text) {
    if (text == "inf" || text == "unlimited") return unlimited_rate;
    const auto r = to_double(text);
    if (!r || !(*r > 0)) throw UsageError("--rate must be a positive number or 'inf', got '" + text + "'");
    return *r;
}

SyscallMap names_from(const std::string& map_path) {
    return map_path.empty() ? SyscallMap::builtin() : SyscallMap::load(map_path);
}

TwocellConfig config_from(const std::string& path) {
    return path.empty() ? validate_config(TwocellConfig{}) : load_twocell_config(path);
}

std::uint64_t seconds_to_us(double s, const char* what) {
    if (!(s >= 0) || !std::isfinite(s)) throw UsageError(std::string(what) + " must be >= 0");
    return static_cast<std::uint64_t>(std::llround(s * 1e6));
}

std::vector<std::uint32_t> antigen_trace(const std::vector<ReplayEvent>& events) {
    std::vector<std::uint32_t> out;
    for (const auto& e : events)
        if (const auto* a = std::get_if<Antigen>(&e.payload)) out.push_back(a->value);
    return out;
}

std::vector<fs::path> run_response_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: '" + dir.string() + "'");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("run_") && name.ends_with(".responses.csv")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Report name of an input file: its file name without data suffixes.
std::string display_name(const std::string& path) {
    auto name = fs::path(path).filename().string();
    for (const char* suffix : {".labels", ".policy", ".log"})
        if (name.size() > std::strlen(suffix) && name.ends_with(suffix)) name.resize(name.size() - std::strlen(suffix));
    return name;
}

std::string run_stem(std::uint32_t run) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03u", run);
    return buf;
}

std::atomic<bool> interrupted{false};

extern "C" void on_signal(int) { interrupted.store(true); }

struct ReplayArgs {
    std::string log;
    bool strace = false;
    std::string rate = "1";
    std::string addr;
    std::string map;
    std::uint64_t gap_us = 1000;
};

void add_replay_options(CLI::App& app, ReplayArgs& a) {
    app.add_option("--log", a.log, "replay log (or strace output with --strace)")->required();
    app.add_flag("--strace", a.strace, "read the log as strace output");
    app.add_option("--rate", a.rate, "speed-up factor, or 'inf' to send back to back")->capture_default_str();
    app.add_option("--addr", a.addr, "server address (default $TISSUE_ADDR or 127.0.0.1:7170)");
    app.add_option("--map", a.map, "syscall name map for --strace (default: built-in table)");
    app.add_option("--gap-us", a.gap_us, "spacing of strace lines without timestamps")->capture_default_str();
}

void do_replay(const ReplayArgs& a, std::ostream& out, std::ostream& err) {
    const double rate = parse_rate(a.rate);
    std::vector<ReplayEvent> events;
    if (a.strace) {
        auto r = load_strace_log(a.log, names_from(a.map), a.gap_us);
        for (const auto& [name, n] : r.skipped_names) err << "skipped unmapped syscall " << name << " x" << n << '\n';
        if (r.skipped_lines) err << "skipped " << r.skipped_lines << " non-call lines\n";
        events = std::move(r.events);
    } else {
        events = load_replay_log(a.log);
    }
    const auto addr = a.addr.empty() ? default_address() : a.addr;
    const auto sent = replay_to_server(events, rate, addr);
    out << "sent " << sent << " events to " << addr << '\n';
}

}  // namespace

int run_tcreplay(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Replays a recorded antigen/signal log to a tissue server", "tcreplay"};
    ReplayArgs a;
    add_replay_options(app, a);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }
    return guarded(err, [&] { do_replay(a, out, err); });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"libtissue experiment harness", "tissue"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "run a twocell server in real time");
    std::string serve_config, serve_addr, serve_responses, serve_probes;
    std::optional<std::uint64_t> serve_ticks;
    bool serve_counters = false, serve_locks = false;
    serve->add_option("--config", serve_config, "twocell config file");
    serve->add_option("--addr", serve_addr, "listen address (default $TISSUE_ADDR or 127.0.0.1:7170)");
    serve->add_option("--ticks", serve_ticks, "stop after this many ticks (default: until SIGINT/SIGTERM)");
    serve->add_option("--responses", serve_responses, "write the response log here on exit");
    serve->add_option("--probes", serve_probes, "write probe samples here");
    serve->add_flag("--record-locks", serve_locks, "include VR locks in probe samples");
    serve->add_flag("--debug-counters", serve_counters, "print server and turnover counters at every probe");

    // replay
    auto* replay = app.add_subcommand("replay", "replay a log to a server (tcreplay)");
    ReplayArgs replay_args;
    add_replay_options(*replay, replay_args);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset and its label file");
    std::string gen_label = "normal", gen_out, gen_labels;
    std::uint64_t gen_seed = 1, gen_events = 1000;
    gen->add_option("--label", gen_label, "normal, success or failure")
        ->check(CLI::IsMember({"normal", "success", "failure"}))
        ->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--events", gen_events, "antigen events")->capture_default_str();
    gen->add_option("--out", gen_out, "replay log to write")->required();
    gen->add_option("--labels", gen_labels, "label file (default: <out>.labels)");

    // run-twocell
    auto* run = app.add_subcommand("run-twocell", "run repeated twocell experiments on a dataset");
    std::string run_config, run_data, run_dir, run_rate = "1", run_addr = "127.0.0.1:0", run_map;
    std::uint32_t run_repeats = 1;
    std::optional<std::uint64_t> run_seed_opt;
    std::optional<std::uint32_t> run_action_time;
    std::optional<double> run_lead_in, run_tail;
    bool run_realtime = false, run_signal = false, run_no_signal = false, run_locks = false;
    run->add_option("--config", run_config, "twocell config file");
    run->add_option("--data", run_data, "replay log")->required();
    run->add_option("--out-dir", run_dir, "directory for run logs and policies")->required();
    run->add_option("--repeats", run_repeats)->capture_default_str();
    run->add_option("--rate", run_rate, "replay speed-up, or 'inf'")->capture_default_str();
    run->add_option("--seed", run_seed_opt, "base seed (overrides rng_seed)");
    run->add_option("--action-time", run_action_time, "fixed antigen producer action time");
    run->add_flag("--signal", run_signal, "drive action time from the CPU signal");
    run->add_flag("--no-signal", run_no_signal, "fixed action time even if the config enables signals");
    run->add_flag("--realtime", run_realtime, "real server and replay over loopback");
    run->add_option("--lead-in-s", run_lead_in, "seconds before replay starts (default 0, or 10 with --realtime)");
    run->add_option("--tail-s", run_tail, "seconds to keep running after the last event (default 60)");
    run->add_option("--addr", run_addr, "server address for --realtime")->capture_default_str();
    run->add_flag("--record-locks", run_locks, "add VR locks to the probe logs");
    run->add_option("--map", run_map, "syscall name map for policy comments");

    // naive-policy
    auto* naive = app.add_subcommand("naive-policy", "permit every syscall seen in normal logs");
    std::vector<std::string> naive_data;
    std::string naive_out, naive_map;
    naive->add_option("--data", naive_data, "replay logs of normal usage")->required();
    naive->add_option("--out", naive_out)->required();
    naive->add_option("--map", naive_map);

    // merge-policy
    auto* merge = app.add_subcommand("merge-policy", "union of policy files");
    std::vector<std::string> merge_in;
    std::string merge_dir, merge_out, merge_map;
    merge->add_option("policies", merge_in, "policy files");
    merge->add_option("--in-dir", merge_dir, "also merge every *.policy in this directory");
    merge->add_option("--out", merge_out)->required();
    merge->add_option("--map", merge_map);

    // stats
    auto* stats = app.add_subcommand("stats", "per-syscall response mean, sd and cv across runs");
    std::vector<std::string> stats_in;
    std::string stats_dir, stats_data, stats_out, stats_map;
    stats->add_option("responses", stats_in, "response logs, one per run");
    stats->add_option("--runs-dir", stats_dir, "use every run_*.responses.csv in this directory");
    stats->add_option("--data", stats_data, "dataset, for input frequencies");
    stats->add_option("--out", stats_out)->required();
    stats->add_option("--map", stats_map);

    // eval-policy
    auto* eval = app.add_subcommand("eval-policy", "permit/deny percentages of policies on labelled traces");
    std::vector<std::string> eval_policies, eval_labels;
    std::string eval_out;
    eval->add_option("--policy", eval_policies, "policy files")->required();
    eval->add_option("--labels", eval_labels, "label files")->required();
    eval->add_option("--out", eval_out)->required();

    // plotdata
    auto* plot = app.add_subcommand("plotdata", "CSV series for plotting");
    std::string plot_kind, plot_out, plot_data, plot_responses, plot_probes, plot_signal_dir, plot_fixed_dir,
        plot_config, plot_rate = "1";
    double plot_lead_in = 0.0, plot_bin = 1.0;
    plot->add_option("--kind", plot_kind)
        ->required()
        ->check(CLI::IsMember({"response-rate", "vr-locks", "signal-compare"}));
    plot->add_option("--out", plot_out)->required();
    plot->add_option("--data", plot_data, "dataset (response-rate)");
    plot->add_option("--responses", plot_responses, "response log (response-rate, vr-locks)");
    plot->add_option("--probes", plot_probes, "probe log with locks (vr-locks)");
    plot->add_option("--signal-dir", plot_signal_dir, "run directory with signal (signal-compare)");
    plot->add_option("--fixed-dir", plot_fixed_dir, "run directory with fixed action time (signal-compare)");
    plot->add_option("--config", plot_config, "config the runs used (tick length)");
    plot->add_option("--rate", plot_rate, "replay rate the run used")->capture_default_str();
    plot->add_option("--lead-in-s", plot_lead_in, "lead-in the run used")->capture_default_str();
    plot->add_option("--bin-s", plot_bin, "bin width in seconds")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    if (*serve) {
        return guarded(err, [&] {
            const auto config = config_from(serve_config);
            Twocell model(config);
            auto& tissue = model.tissue();
            ServerOptions so;
            so.antigen_alphabet = config.tissue.antigen_alphabet;
            Server server(serve_addr.empty() ? default_address() : serve_addr, tissue.queue(), so);
            tissue.set_response_sink([&](const ResponseRecord& r) { server.publish(r); });
            out << "listening on " << server.address() << std::endl;

            Outputs files;
            std::optional<ProbeCsvWriter> probes;
            if (!serve_probes.empty()) probes.emplace(files.open(serve_probes));
            std::ostream* responses_out = serve_responses.empty() ? nullptr : &files.open(serve_responses);

            interrupted = false;
            auto old_int = std::signal(SIGINT, on_signal);
            auto old_term = std::signal(SIGTERM, on_signal);
            std::stop_source stop;
            const auto activity = activity_probe(model);
            const auto locks = serve_locks ? lock_probe(model) : ProbeFn{};

            RunOptions ro;
            ro.mode = RunMode::realtime;
            ro.ticks = serve_ticks;
            ro.stop = stop.get_token();
            ro.before_tick = [&](Tissue&, std::uint64_t) {
                if (interrupted) stop.request_stop();
            };
            ro.probe = [&](const Compartment& c) {
                auto f = activity(c);
                if (locks) {
                    auto more = locks(c);
                    f.insert(f.end(), more.begin(), more.end());
                }
                return f;
            };
            ro.on_probe = [&](const ProbeSample& s) {
                if (probes) probes->append(s);
                if (serve_counters) {
                    const auto st = server.stats();
                    const auto& tc = tissue.compartment().counters;
                    err << "tick=" << s.tick << " sessions=" << st.sessions_active
                        << " antigen_received=" << st.antigen_received << " signals_received=" << st.signals_received
                        << " protocol_errors=" << st.protocol_errors << " role_violations=" << st.role_violations
                        << " created=" << tc.created << " destroyed=" << tc.destroyed()
                        << " rejected=" << tc.rejected_antigen + tc.rejected_signals
                        << " responses=" << tissue.responses().size() << '\n';
                }
            };
            try {
                tissue.run(ro);
            } catch (...) {
                std::signal(SIGINT, old_int);
                std::signal(SIGTERM, old_term);
                throw;
            }
            std::signal(SIGINT, old_int);
            std::signal(SIGTERM, old_term);
            server.stop();
            if (responses_out) write_response_log(*responses_out, tissue.responses());
            files.keep();
            out << "ticks=" << tissue.compartment().tick_count << " responses=" << tissue.responses().size() << '\n';
        });
    }

    if (*replay) return guarded(err, [&] { do_replay(replay_args, out, err); });

    if (*gen) {
        return guarded(err, [&] {
            auto spec = preset_scenario(*parse_label(gen_label), gen_seed, gen_events);
            const auto data = generate_dataset(spec);
            Outputs files;
            write_replay_log(files.open(gen_out), data.events);
            write_label_file(files.open(gen_labels.empty() ? gen_out + ".labels" : gen_labels), data.labels);
            files.keep();
        });
    }

    if (*run) {
        return guarded(err, [&] {
            if (run_signal && run_no_signal) throw UsageError("--signal and --no-signal are exclusive");
            auto config = config_from(run_config);
            if (run_seed_opt) config.tissue.rng_seed = *run_seed_opt;
            if (run_signal) config.signal_enabled = true;
            if (run_no_signal) config.signal_enabled = false;
            if (run_action_time) config.antigen_producer_action_time = *run_action_time;
            config = validate_config(config);
            ExperimentOptions o;
            o.mode = run_realtime ? RunMode::realtime : RunMode::virtual_time;
            o.repeats = run_repeats;
            o.rate = parse_rate(run_rate);
            if (run_realtime && std::isinf(o.rate)) throw UsageError("--realtime needs a finite --rate");
            o.lead_in_us = seconds_to_us(run_lead_in.value_or(run_realtime ? 10.0 : 0.0), "--lead-in-s");
            o.tail_us = seconds_to_us(run_tail.value_or(60.0), "--tail-s");
            o.record_locks = run_locks;
            o.address = run_addr;
            const auto names = names_from(run_map);
            const auto events = load_replay_log(run_data);

            fs::create_directories(run_dir);
            Outputs files;
            const auto results = run_experiment(config, events, o);
            auto& summary = files.open(fs::path(run_dir) / "summary.csv");
            summary << "run,seed,ticks,responses,policy_size,mean_action_time,error\n";
            std::size_t failed = 0;
            for (const auto& r : results) {
                const auto stem = fs::path(run_dir) / run_stem(r.run);
                summary << r.run << ',' << r.seed << ',' << r.ticks << ',' << r.responses.size() << ',';
                if (r.error) {
                    ++failed;
                    std::string why = *r.error;
                    std::replace(why.begin(), why.end(), ',', ';');
                    summary << ",," << why << '\n';
                    err << run_stem(r.run) << " failed: " << *r.error << '\n';
                    continue;
                }
                const auto policy = policy_from_responses(r.responses);
                summary << policy.permitted.size() << ',' << format_fixed(r.mean_action_time, 4) << ",\n";
                write_response_log(files.open(stem.string() + ".responses.csv"), r.responses);
                ProbeCsvWriter probes(files.open(stem.string() + ".probes.csv"));
                for (const auto& s : r.probes) probes.append(s);
                write_policy(files.open(stem.string() + ".policy"), policy, names);
            }
            files.keep();
            double mean_at = 0.0;
            for (const auto& r : results)
                if (!r.error) mean_at += r.mean_action_time;
            if (results.size() > failed) mean_at /= double(results.size() - failed);
            out << results.size() - failed << " of " << results.size() << " runs completed; mean action time "
                << format_fixed(mean_at, 2) << '\n';
            if (failed) throw std::runtime_error(std::to_string(failed) + " run(s) failed");
        });
    }

    if (*naive) {
        return guarded(err, [&] {
            std::vector<std::vector<std::uint32_t>> traces;
            for (const auto& path : naive_data) traces.push_back(antigen_trace(load_replay_log(path)));
            const auto policy = naive_policy(traces);
            Outputs files;
            write_policy(files.open(naive_out), policy, names_from(naive_map));
            files.keep();
        });
    }

    if (*merge) {
        return guarded(err, [&] {
            std::vector<std::string> paths = merge_in;
            if (!merge_dir.empty()) {
                if (!fs::is_directory(merge_dir)) throw Error("not a directory: '" + merge_dir + "'");
                std::vector<std::string> found;
                for (const auto& e : fs::directory_iterator(merge_dir))
                    if (e.path().extension() == ".policy") found.push_back(e.path().string());
                std::sort(found.begin(), found.end());
                paths.insert(paths.end(), found.begin(), found.end());
            }
            if (paths.empty()) throw UsageError("no policies to merge");
            std::vector<Policy> policies;
            for (const auto& p : paths) policies.push_back(load_policy(p));
            Outputs files;
            write_policy(files.open(merge_out), merge_policies(policies), names_from(merge_map));
            files.keep();
        });
    }

    if (*stats) {
        return guarded(err, [&] {
            std::vector<std::string> paths = stats_in;
            if (!stats_dir.empty())
                for (const auto& p : run_response_files(stats_dir)) paths.push_back(p.string());
            if (paths.empty()) throw UsageError("no response logs given");
            std::vector<RunCounts> runs;
            for (const auto& p : paths) runs.push_back(count_responses(load_response_log(p)));
            std::map<std::uint32_t, std::uint64_t> freq;
            std::set<std::uint32_t> universe;
            if (!stats_data.empty())
                for (auto s : antigen_trace(load_replay_log(stats_data))) {
                    ++freq[s];
                    universe.insert(s);
                }
            const auto table = response_stats(runs, universe);
            const auto names = names_from(stats_map);
            std::vector<std::uint32_t> order;
            for (const auto& [k, v] : table) order.push_back(k);
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return freq[a] > freq[b]; });

            Outputs files;
            auto& o = files.open(stats_out);
            o << "syscall,name,freq,mean,sd,cv\n";
            for (auto k : order) {
                const auto& s = table.at(k);
                o << k << ',' << names.name(k).value_or("") << ',' << freq[k] << ',' << format_fixed(s.mean, 2) << ','
                  << format_fixed(s.sd, 2) << ',' << (s.cv ? std::to_string(*s.cv) : std::string()) << '\n';
            }
            files.keep();
        });
    }

    if (*eval) {
        return guarded(err, [&] {
            std::vector<std::pair<std::string, Policy>> policies;
            for (const auto& p : eval_policies) policies.emplace_back(display_name(p), load_policy(p));
            std::vector<std::pair<std::string, LabeledTrace>> traces;
            for (const auto& p : eval_labels) traces.emplace_back(display_name(p), load_label_file(p));
            Outputs files;
            auto& o = files.open(eval_out);
            write_report_header(o);
            for (const auto& [dname, trace] : traces)
                for (const auto& [pname, policy] : policies)
                    write_report_row(o, dname, pname, evaluate_policy(policy, trace));
            files.keep();
        });
    }

    if (*plot) {
        return guarded(err, [&] {
            const auto config = config_from(plot_config);
            if (!(plot_bin > 0)) throw UsageError("--bin-s must be > 0");
            const auto bin_us = seconds_to_us(plot_bin, "--bin-s");
            if (bin_us == 0) throw UsageError("--bin-s is below one microsecond");
            const auto tick_us = config.tissue.cell_update_rate;
            Series series;
            if (plot_kind == "response-rate") {
                if (plot_data.empty() || plot_responses.empty())
                    throw UsageError("response-rate needs --data and --responses");
                SeriesTiming t;
                t.tick_us = tick_us;
                t.rate = parse_rate(plot_rate);
                t.lead_in_us = seconds_to_us(plot_lead_in, "--lead-in-s");
                t.bin_us = bin_us;
                series = response_rate_series(load_replay_log(plot_data), load_response_log(plot_responses), t);
            } else if (plot_kind == "vr-locks") {
                if (plot_probes.empty()) throw UsageError("vr-locks needs --probes");
                std::ifstream in(plot_probes);
                if (!in) throw Error("cannot open probe log '" + plot_probes + "'");
                std::set<std::uint32_t> responded;
                if (!plot_responses.empty()) responded = policy_from_responses(load_response_log(plot_responses)).permitted;
                series = vr_lock_series(read_probe_csv(in), tick_us, responded);
            } else {
                if (plot_signal_dir.empty() || plot_fixed_dir.empty())
                    throw UsageError("signal-compare needs --signal-dir and --fixed-dir");
                std::vector<std::vector<ResponseRecord>> a, b;
                for (const auto& p : run_response_files(plot_signal_dir)) a.push_back(load_response_log(p.string()));
                for (const auto& p : run_response_files(plot_fixed_dir)) b.push_back(load_response_log(p.string()));
                if (a.empty() || b.empty()) throw Error("no run_*.responses.csv files found");
                series = signal_compare_series(a, b, tick_us, bin_us);
                out << "total response duration (ticks): signal " << format_fixed(total_response_duration(a), 2)
                    << " fixed " << format_fixed(total_response_duration(b), 2) << '\n';
            }
            Outputs files;
            write_series_csv(files.open(plot_out), series);
            files.keep();
        });
    }

    return exit_usage;
}

}  // namespace tissue
