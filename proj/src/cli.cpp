#include "protoseq/cli.hpp"

#include "protoseq/cpc_rs.hpp"
#include "protoseq/crt_construct.hpp"
#include "protoseq/errors.hpp"
#include "protoseq/geo_alloc.hpp"
#include "protoseq/netsim.hpp"
#include "protoseq/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#ifndef PROTOSEQ_VERSION
#define PROTOSEQ_VERSION "0.0.0"
#endif

namespace protoseq {

using nlohmann::json;

std::string fnv1a_hex(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    std::string out;
    std::string format = "json";
    bool timestamps = false;
};

class Runner {
public:
    Runner(const std::vector<std::string>& args, const Globals& g, std::ostream& out)
        : args_(args), g_(g), out_(out), seed_(g.seed)
    {
    }

    // Commands call this only when they consume randomness; a seed is
    // generated on first use when --seed is absent and then recorded.
    std::uint64_t seed()
    {
        if (!seed_) {
            std::random_device rd;
            seed_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            generated_ = true;
        }
        return *seed_;
    }

    // Digest input: the command line minus output paths, plus any config text.
    void add_config(const std::string& text) { config_ += text; }

    json manifest(const std::vector<std::string>& outputs) const
    {
        std::string cmd, inputs;
        bool skip = false;
        for (const auto& a : args_) {
            cmd += (cmd.empty() ? "" : " ") + a;
            const bool path_flag = a == "--out" || a == "--log";
            if (!skip && !path_flag && a.rfind("--out=", 0) != 0 && a.rfind("--log=", 0) != 0)
                inputs += a + "\n";
            skip = path_flag;
        }
        json m = {{"tool", "protoseq"},
                  {"version", PROTOSEQ_VERSION},
                  {"command", cmd},
                  {"config_digest", fnv1a_hex(inputs + config_)},
                  {"seed", seed_ ? json(*seed_) : json(nullptr)},
                  {"seed_generated", generated_},
                  {"outputs", outputs}};
        if (g_.timestamps) {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::ostringstream t;
            t << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
            m["started_utc"] = t.str();
        }
        return m;
    }

    // Writes `doc` (with manifest) to --out, or prints it.
    void emit(json doc, std::vector<std::string> extra_outputs = {}) const
    {
        if (!g_.out.empty()) extra_outputs.insert(extra_outputs.begin(), g_.out);
        doc["manifest"] = manifest(extra_outputs);
        if (g_.out.empty()) {
            out_ << doc.dump(2) << '\n';
            return;
        }
        write_file(g_.out, doc.dump(2) + "\n");
    }

    static void write_file(const std::string& path, const std::string& text)
    {
        std::ofstream f(path, std::ios::binary);
        require(f.good(), "cannot write '" + path + "'");
        f << text;
    }

private:
    std::vector<std::string> args_;
    Globals g_;
    std::ostream& out_;
    std::optional<std::uint64_t> seed_;
    bool generated_ = false;
    std::string config_;
};

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "cannot open '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string weight_profile(const SequenceSet& set)
{
    std::map<std::size_t, std::size_t> hist;
    for (const auto& m : set.members()) ++hist[m.weight()];
    std::string s;
    for (const auto& [w, c] : hist)
        s += (s.empty() ? "" : ",") + std::to_string(c) + "x" + std::to_string(w);
    return s;
}

BinarySequence parse_sequence_arg(const std::string& v)
{
    if (!v.empty() && v.find_first_not_of("01") == std::string::npos) return BinarySequence::from_string(v);
    const auto set = load_sequence_set(v);
    require(set.size() == 1, "'" + v + "' must hold exactly one sequence");
    return set[0];
}

std::string set_csv(const SequenceSet& set)
{
    std::ostringstream s;
    s << "label,period,weight,ones\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        s << set.label(i) << ',' << set[i].period() << ',' << set[i].weight() << ',';
        for (std::size_t j = 0; j < set[i].ones().size(); ++j) s << (j ? " " : "") << set[i].ones()[j];
        s << '\n';
    }
    return s.str();
}

// --- gen --------------------------------------------------------------------

struct GenOpts {
    std::string kind;
    std::uint64_t p = 0, q = 0, n = 0, k = 0, G = 0, delta = 0, M = 0, pad = 0;
    std::optional<std::uint64_t> count;
    std::string x, y, base;
    std::vector<std::string> split;
};

int cmd_gen(const GenOpts& o, const Globals& g, Runner& run, std::ostream& out)
{
    SequenceSet set;
    const RsCpcParams rs{o.n, o.p, o.k};
    if (o.kind == "crt") {
        set = crt_set(o.p, o.q);
    } else if (o.kind == "crt0") {
        set = crt0_set(o.p, o.q);
    } else if (o.kind == "rs_cpc") {
        set = rs_cpc(rs, o.count);
    } else if (o.kind == "rs_sched") {
        set = rs_schedule(rs, o.count);
    } else if (o.kind == "tdma") {
        set = tdma_set(o.G, o.delta);
    } else if (o.kind == "product") {
        require(!o.x.empty() && !o.y.empty(), "product needs --x and --y");
        const auto x = parse_sequence_arg(o.x);
        const auto y = parse_sequence_arg(o.y);
        set = SequenceSet({"x(x)y"}, {product(x, y)},
                          {{"construction", "product"}, {"x_period", x.period()}, {"y_period", y.period()}});
    } else if (o.kind == "expanded") {
        require(!o.base.empty(), "expanded needs --base");
        run.add_config(read_file(o.base));
        set = expanded_set({load_sequence_set(o.base), o.split, o.p, o.M});
    } else {
        throw InputError("unknown kind '" + o.kind + "'");
    }
    if (o.pad > 0) set = pad_silent(set, o.pad);

    if (g.format == "csv") {
        if (g.out.empty()) out << set_csv(set);
        else Runner::write_file(g.out, set_csv(set));
    } else {
        run.emit(to_json(set));
    }
    if (!g.out.empty() || g.format == "csv")
        out << "count=" << set.size() << " period=" << set.period()
            << " weights=" << weight_profile(set) << '\n';
    return kExitHolds;
}

// --- verify -----------------------------------------------------------------

struct VerifyOpts {
    std::string property;
    std::string input;
    std::uint64_t p = 0, q = 0;
    std::string mode = "exhaustive";
    std::uint64_t samples = 10000;
    std::uint64_t cap = 100'000'000;
    std::optional<std::uint64_t> bound, window, threshold, M;
    std::vector<std::string> protected_labels;
};

int cmd_verify(const VerifyOpts& o, const Globals& g, Runner& run)
{
    SequenceSet set;
    if (!o.input.empty()) {
        run.add_config(read_file(o.input));
        set = load_sequence_set(o.input);
    } else {
        require(o.p > 0, "give --input or --p [--q] for a crt0 set");
        set = crt0_set(o.p, o.q ? o.q : 2 * o.p - 1);
    }
    require(o.mode == "exhaustive" || o.mode == "random", "--mode is exhaustive or random");
    ModeSpec mode = o.mode == "exhaustive" ? ModeSpec::exhaustive_mode(o.cap)
                                           : ModeSpec::random_mode(o.samples, run.seed());
    mode.jobs = g.jobs;

    const auto& meta = set.meta();
    auto meta_u = [&](const char* key) -> std::optional<std::uint64_t> {
        if (meta.contains(key) && meta.at(key).is_number_unsigned()) return meta.at(key).get<std::uint64_t>();
        return std::nullopt;
    };

    VerifyReport rep;
    if (o.property == "ui") {
        rep = is_ui(set, mode);
    } else if (o.property == "xcorr") {
        rep = xcorr_bound_audit(set, o.bound.value_or(1));
    } else if (o.property == "separation") {
        const auto b = o.bound ? o.bound : meta_u("p");
        require(b.has_value(), "separation needs --bound");
        rep = separation_audit(set, *b);
    } else if (o.property == "window") {
        const auto p = meta_u("p");
        require(o.window || p, "window needs --window");
        rep = zero_column_window_audit(set, o.window ? *o.window : 2 * *p, mode);
    } else if (o.property == "cf-count" || o.property == "cf-gap") {
        SequenceSet target = set;
        std::vector<std::string> prot = o.protected_labels;
        std::optional<std::uint64_t> limit = o.property == "cf-count" ? o.threshold : o.bound;
        if (meta.contains("p1_labels")) {
            require(o.M.has_value(), "expanded sets need --M");
            auto [sel, labels] = expanded_selection(set, *o.M);
            target = std::move(sel);
            if (prot.empty()) prot = std::move(labels);
            const auto p = meta.at("p").get<std::uint64_t>();
            if (!limit)
                limit = o.property == "cf-count"
                            ? split_cf_count_threshold(p)
                            : split_cf_gap_bound(p, meta.at("base_period").get<std::uint64_t>());
        }
        require(!prot.empty(), "give --protected labels");
        require(limit.has_value(), o.property == "cf-count" ? "give --threshold" : "give --bound");
        rep = o.property == "cf-count" ? min_conflict_free_count(target, prot, *limit, mode)
                                       : max_conflict_free_gap(target, prot, *limit, mode);
    } else {
        throw InputError("unknown property '" + o.property + "'");
    }
    run.emit(to_json(rep));
    return rep.holds() ? kExitHolds : kExitViolated;
}

// --- alloc ------------------------------------------------------------------

struct AllocOpts {
    double R = 0.0, h = 0.0;
    std::string cell;
    std::string plan;
    std::int64_t audit = 0;
    bool assignment = false;
};

int cmd_alloc(const AllocOpts& o, Runner& run, std::ostream& out)
{
    ReusePlan plan = [&] {
        if (!o.plan.empty()) {
            const auto text = read_file(o.plan);
            run.add_config(text);
            return plan_from_json(json::parse(text));
        }
        require(o.R > 0.0 && o.h > 0.0, "alloc needs --R and --h (or --plan)");
        return ReusePlan::for_radius(o.R, o.h);
    }();

    const double ratio = 2.0 * plan.R() / lattice_spacing(plan.h());
    const double target = ratio * ratio;
    json doc = {{"G", plan.G()},
                {"b1", plan.b1()},
                {"b2", plan.b2()},
                {"target", target},
                {"min_cochannel_distance", plan.min_cochannel_distance()},
                {"plan", to_json(plan, o.assignment)}};
    const auto rounded = static_cast<std::uint64_t>(std::floor(target));
    if (rounded != plan.G()) {
        doc["note"] = "target (2R/d)^2 = " + std::to_string(target) + "; truncating it gives "
                      + std::to_string(rounded) + ", but the smallest Loeschian number at or above"
                      " the target is " + std::to_string(plan.G());
    }
    if (!o.cell.empty()) {
        const auto comma = o.cell.find(',');
        require(comma != std::string::npos, "--cell takes m,n");
        const HexCell c{std::stoll(o.cell.substr(0, comma)), std::stoll(o.cell.substr(comma + 1))};
        doc["cell"] = {c.m, c.n};
        doc["coset"] = plan.coset(c);
        doc["index"] = plan.allocate(c);
    }
    int code = kExitHolds;
    if (o.audit > 0) {
        const auto a = audit_cochannel(plan, o.audit);
        json aj = {{"cells", a.cells}, {"pairs_checked", a.pairs_checked},
                   {"verdict", a.violation ? "violated" : "holds"}};
        if (a.min_distance) aj["min_distance"] = *a.min_distance;
        if (a.violation)
            aj["counterexample"] = {{a.violation->first.m, a.violation->first.n},
                                    {a.violation->second.m, a.violation->second.n}};
        doc["cochannel_audit"] = std::move(aj);
        if (a.violation) code = kExitViolated;
    }
    run.emit(doc);
    (void)out;
    return code;
}

// --- params / compare -------------------------------------------------------

struct ParamsOpts {
    std::string rule;
    std::uint64_t M = 0, G = 0, delta = 0;
    bool simulate = false;
};

int cmd_params(const ParamsOpts& o, Runner& run)
{
    require(o.rule == "prop1" || o.rule == "prop2", "rule is prop1 or prop2");
    const auto c = o.rule == "prop1" ? select_params_prop1(o.M, o.G, o.delta) : select_params_prop2(o.M, o.G);
    run.emit({{"rule", o.rule},
              {"M", o.M},
              {"G", o.G},
              {"delta", o.delta},
              {"n", c.params.n},
              {"p", c.params.p},
              {"k", c.params.k},
              {"L", c.period}});
    return kExitHolds;
}

int cmd_compare(const ParamsOpts& o, const Globals& g, Runner& run, std::ostream& out)
{
    const auto table = baseline_compare(o.M, o.G, o.delta);
    auto doc = to_json(table);
    bool ok = true;
    for (const auto& r : table.rows) ok = ok && (!r.ui_scheme || r.meets_floor);
    if (o.simulate) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto s = baseline_scenario(table, table.rows[i]);
            const auto log = simulate(s, run.seed());
            const auto bf = check_block_free(log, s);
            const auto fo = frame_offset_audit(log, s);
            doc["rows"][i]["simulation"] = {{"users", s.users.size()},
                                            {"block_free", bf.verdict ? "holds" : "violated"},
                                            {"frame_offset", fo.holds ? "holds" : "violated"}};
            ok = ok && fo.holds;
        }
    }
    if (g.format == "csv") {
        std::ostringstream s;
        s << "scheme,L,n,p,k,ui_scheme,meets_floor\n";
        for (const auto& r : table.rows) {
            s << r.scheme << ',' << r.period << ',';
            if (r.params) s << r.params->n << ',' << r.params->p << ',' << r.params->k;
            else s << ",,";
            s << ',' << r.ui_scheme << ',' << r.meets_floor << '\n';
        }
        s << "floor," << table.floor << ",,,,,\n";
        if (g.out.empty()) out << s.str();
        else Runner::write_file(g.out, s.str());
    } else {
        run.emit(doc);
    }
    return ok ? kExitHolds : kExitViolated;
}

// --- sim --------------------------------------------------------------------

struct SimOpts {
    std::string config;
    std::string log;
    bool adversarial = false;
    std::uint64_t steps = 2;
    std::uint64_t budget = 20000;
};

int cmd_sim(const SimOpts& o, const Globals& g, Runner& run, std::ostream& out)
{
    const auto text = read_file(o.config);
    run.add_config(text);
    const auto base_dir = std::filesystem::path(o.config).parent_path().string();
    const auto s = scenario_from_json(json::parse(text), base_dir.empty() ? "." : base_dir);

    if (o.adversarial) {
        const auto res = adversarial_offsets(s, {o.steps, o.budget, run.seed()});
        json doc = {{"property", "block_free"},
                    {"mode", "adversarial"},
                    {"evaluated", res.evaluated},
                    {"verdict", res.violation_found ? "violated" : "holds"}};
        if (res.violation_found) {
            doc["offsets_slots"] = res.offsets_slots;
            doc["report"] = to_json(*res.report, s);
        }
        run.emit(doc);
        return res.violation_found ? kExitViolated : kExitHolds;
    }

    const auto log = simulate(s, run.seed());
    const auto bf = check_block_free(log, s);
    const auto fo = frame_offset_audit(log, s);
    std::string log_path = o.log;
    if (log_path.empty() && !g.out.empty())
        log_path = std::filesystem::path(g.out).replace_extension(".csv").string();

    std::vector<std::string> extra;
    if (!log_path.empty()) {
        Runner::write_file(log_path, reception_csv(log, s));
        extra.push_back(log_path);
    }
    if (g.format == "csv" && log_path.empty()) {
        out << reception_csv(log, s);
    } else {
        auto doc = to_json(bf, s);
        doc["frame_offset"] = to_json(fo);
        doc["users"] = s.users.size();
        doc["receptions"] = log.receptions.size();
        run.emit(doc, extra);
    }
    return bf.verdict ? kExitHolds : kExitViolated;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Protocol-sequence construction, verification, allocation and simulation"};
    app.require_subcommand(1);
    // "--h" is the cell radius, so help is long-form only.
    app.set_help_flag("--help", "print help");
    app.fallthrough(); // global flags may follow the subcommand
    app.set_version_flag("--version", PROTOSEQ_VERSION);

    Globals g;
    app.add_option("--seed", g.seed, "RNG seed (generated and recorded when absent)");
    app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)");
    app.add_option("--out", g.out, "output file (default: stdout)");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timestamps", g.timestamps, "record wall-clock start time in the manifest");

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen", "construct a sequence set");
    gen_cmd->add_option("kind", gen.kind, "crt | crt0 | rs_cpc | rs_sched | product | expanded | tdma")
        ->required();
    gen_cmd->add_option("--p", gen.p);
    gen_cmd->add_option("--q", gen.q);
    gen_cmd->add_option("--n", gen.n);
    gen_cmd->add_option("--k", gen.k);
    gen_cmd->add_option("--count", gen.count, "number of codewords");
    gen_cmd->add_option("--G", gen.G);
    gen_cmd->add_option("--delta", gen.delta, "TDMA silent slots");
    gen_cmd->add_option("--M", gen.M);
    gen_cmd->add_option("--pad", gen.pad, "silent slots after each slot");
    gen_cmd->add_option("--x", gen.x, "product: first factor (bit string or set file)");
    gen_cmd->add_option("--y", gen.y, "product: second factor");
    gen_cmd->add_option("--base", gen.base, "expanded: base set file");
    gen_cmd->add_option("--split", gen.split, "expanded: labels to split")->delimiter(',');

    VerifyOpts ver;
    auto* ver_cmd = app.add_subcommand("verify", "check a property of a sequence set");
    ver_cmd->add_option("property", ver.property, "ui | xcorr | separation | window | cf-count | cf-gap")
        ->required();
    ver_cmd->add_option("--input", ver.input, "sequence set file");
    ver_cmd->add_option("--p", ver.p, "use crt0_set(p, q) instead of a file");
    ver_cmd->add_option("--q", ver.q, "default 2p - 1");
    ver_cmd->add_option("--mode", ver.mode, "exhaustive or random");
    ver_cmd->add_option("--samples", ver.samples);
    ver_cmd->add_option("--cap", ver.cap, "exhaustive state limit");
    ver_cmd->add_option("--bound", ver.bound);
    ver_cmd->add_option("--window", ver.window);
    ver_cmd->add_option("--threshold", ver.threshold);
    ver_cmd->add_option("--M", ver.M);
    ver_cmd->add_option("--protected", ver.protected_labels)->delimiter(',');

    AllocOpts alloc;
    auto* alloc_cmd = app.add_subcommand("alloc", "cluster size, reuse plan and cell lookup");
    alloc_cmd->add_option("--R", alloc.R);
    alloc_cmd->add_option("--h", alloc.h);
    alloc_cmd->add_option("--cell", alloc.cell, "m,n");
    alloc_cmd->add_option("--plan", alloc.plan, "plan file");
    alloc_cmd->add_option("--audit", alloc.audit, "side of the cochannel audit patch");
    alloc_cmd->add_flag("--assignment", alloc.assignment, "include the coset assignment");

    ParamsOpts params;
    auto* params_cmd = app.add_subcommand("params", "RS parameter search");
    params_cmd->add_option("rule", params.rule, "prop1 | prop2")->required();
    params_cmd->add_option("--M", params.M)->required();
    params_cmd->add_option("--G", params.G)->required();
    params_cmd->add_option("--delta", params.delta);

    ParamsOpts cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "baseline frame-length table");
    cmp_cmd->add_option("--M", cmp.M)->required();
    cmp_cmd->add_option("--G", cmp.G)->required();
    cmp_cmd->add_option("--delta", cmp.delta);
    cmp_cmd->add_flag("--simulate", cmp.simulate, "simulate a clique scenario per row");

    SimOpts sim;
    auto* sim_cmd = app.add_subcommand("sim", "run a scenario and audit block-free service");
    sim_cmd->add_option("--config", sim.config)->required();
    sim_cmd->add_option("--log", sim.log, "reception CSV path");
    sim_cmd->add_flag("--adversarial", sim.adversarial, "grid-search clock offsets for a violation");
    sim_cmd->add_option("--steps", sim.steps, "adversarial grid points per slot");
    sim_cmd->add_option("--budget", sim.budget, "adversarial evaluation limit");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForVersion&) {
        out << PROTOSEQ_VERSION << '\n';
        return kExitHolds;
    } catch (const CLI::Success&) {
        out << app.help();
        return kExitHolds;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        Runner run(args, g, out);
        if (*gen_cmd) return cmd_gen(gen, g, run, out);
        if (*ver_cmd) return cmd_verify(ver, g, run);
        if (*alloc_cmd) return cmd_alloc(alloc, run, out);
        if (*params_cmd) return cmd_params(params, run);
        if (*cmp_cmd) return cmd_compare(cmp, g, run, out);
        if (*sim_cmd) return cmd_sim(sim, g, run, out);
    } catch (const CapExceededError& e) {
        err << "error: " << e.what() << "; rerun with --mode random --samples N\n";
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace protoseq
