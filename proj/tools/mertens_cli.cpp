// Command-line front end. Exit codes: 0 ok, 1 verification failure or
// nothing found, 2 usage or input error, 3 resource limit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <new>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mertens/engine.hpp"
#include "mertens/errors.hpp"
#include "mertens/explicit_formula.hpp"
#include "mertens/parallel.hpp"
#include "mertens/quasiperiod.hpp"
#include "mertens/scanner.hpp"
#include "mertens/zeros.hpp"

using namespace mertens;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_resource = 3;

struct Settings {
    std::string memory_budget;
    unsigned workers = 0;
    double u_alpha = 1.0;
    std::string u;
    u64 block_len = 0;
    double c1 = 2.0, c2 = 20.0, c3 = 2.0;
    std::string checkpoint;
    double checkpoint_seconds = 60;
    bool naive_sieve = false;
    bool json = false;
};

u64 parse_bytes(const std::string& text) {
    if (text.empty()) throw ParseError("empty memory budget");
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    double scale = 1;
    const std::string suffix = text.substr(pos);
    if (suffix == "" || suffix == "B") scale = 1;
    else if (suffix == "K" || suffix == "KiB") scale = 1024.0;
    else if (suffix == "M" || suffix == "MiB") scale = 1024.0 * 1024;
    else if (suffix == "G" || suffix == "GiB") scale = 1024.0 * 1024 * 1024;
    else throw ParseError("bad memory budget '" + text + "' (use bytes or a K/M/G suffix)");
    if (!(v > 0)) throw ParseError("memory budget must be positive");
    return static_cast<u64>(v * scale);
}

EngineConfig engine_config(const Settings& s) {
    EngineConfig cfg;
    if (!s.memory_budget.empty()) cfg.memory_budget = parse_bytes(s.memory_budget);
    cfg.u_alpha = s.u_alpha;
    if (!(cfg.u_alpha > 0)) throw PreconditionError("--u-alpha must be positive");
    if (!s.u.empty()) {
        const u128 u = parse_u128(s.u);
        if (u >> 64) throw PreconditionError("--u must fit 64 bits");
        cfg.u = static_cast<u64>(u);
    }
    cfg.block_len = s.block_len;
    cfg.regions = {s.c1, s.c2, s.c3};
    cfg.regions.validate();
    cfg.sieve = s.naive_sieve ? MoebiusSieve::Strategy::naive : MoebiusSieve::Strategy::logprime;
    cfg.checkpoint_path = s.checkpoint;
    cfg.checkpoint_seconds = s.checkpoint_seconds;
    return cfg;
}

void apply_environment(Settings& s) {
    if (const char* b = std::getenv("MERTENS_MEMORY_BUDGET"); b && s.memory_budget.empty()) s.memory_budget = b;
    if (const char* w = std::getenv("MERTENS_WORKERS"); w && s.workers == 0) s.workers = static_cast<unsigned>(std::stoul(w));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

// Output stream: a file if a path is given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) file_ = open_out(path);
    }
    std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            header = cells;
            first = false;
        } else {
            rows.push_back(std::move(cells));
        }
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name, const std::string& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("'" + path + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

// ---- mertens -------------------------------------------------------------

int cmd_mertens(const Settings& s, const std::string& n_text, bool all_quotients, const std::string& csv_path) {
    const u128 n = parse_u128(n_text);
    EngineConfig cfg = engine_config(s);
    cfg.capture_small_quotients = all_quotients;
    const auto t0 = std::chrono::steady_clock::now();
    const MertensResult r = mertens_exact(n, cfg);
    const double secs = seconds_since(t0);
    const double ratio = static_cast<double>(r.value) / std::sqrt(static_cast<double>(n));

    if (s.json) {
        json j;
        j["n"] = to_string(n);
        j["M"] = r.value;
        j["ratio"] = ratio;
        j["u"] = r.u;
        j["block_len"] = r.block_len;
        j["seconds"] = secs;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "n      " << to_string(n) << '\n'
                  << "M(n)   " << r.value << '\n'
                  << "ratio  " << fmt(ratio, 3) << "   (M/sqrt(n) = " << fmt(ratio, 6) << ")\n"
                  << "u      " << r.u << "   block " << r.block_len << '\n'
                  << "time   " << fmt(secs, 3) << " s\n";
    }
    if (all_quotients) {
        Sink sink(csv_path);
        std::ostream& out = sink.get();
        out << "c,n_over_c,M\n";
        // quotients from the array (c <= K), then the captured small ones
        for (u64 c = 1; c <= r.by_index.size(); ++c) out << c << ',' << to_string(n / c) << ',' << r.by_index[c - 1] << '\n';
        for (auto it = r.small_values.rbegin(); it != r.small_values.rend(); ++it) {
            const u128 c_lo = n / (it->first + 1) + 1;
            out << to_string(c_lo) << ',' << it->first << ',' << it->second << '\n';
        }
    }
    return exit_ok;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const Settings& s, u64 n_max, u64 samples, u64 seed, bool inject_fault, const char* argv0) {
    if (n_max < 1) throw PreconditionError("--n-max must be at least 1");
    std::vector<u64> ns;
    if (samples == 0) {
        for (u64 n = 1; n <= n_max; ++n) ns.push_back(n);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<u64> pick(1, n_max);
        for (u64 i = 0; i < samples; ++i) ns.push_back(pick(rng));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<i64> naive = mertens_naive_many(ns);
    const EngineConfig cfg = engine_config(s);
    std::vector<i64> exact;
    exact.reserve(ns.size());
    for (u64 n : ns) exact.push_back(mertens_exact(n, cfg).value);
    if (inject_fault && !exact.empty()) exact[exact.size() / 2] += 1;

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < ns.size(); ++i)
        if (exact[i] != naive[i]) bad.push_back(i);
    const double secs = seconds_since(t0);
    std::ostringstream repro;
    repro << argv0 << " verify --n-max " << n_max << " --samples " << samples << " --seed " << seed
          << (inject_fault ? " --inject-fault" : "");

    if (s.json) {
        json j;
        j["checked"] = ns.size();
        j["mismatches"] = json::array();
        for (std::size_t i : bad) j["mismatches"].push_back({{"n", ns[i]}, {"exact", exact[i]}, {"naive", naive[i]}});
        j["seconds"] = secs;
        j["reproduce"] = repro.str();
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "checked " << ns.size() << " values in " << fmt(secs, 2) << " s, " << bad.size() << " mismatches\n";
        for (std::size_t i : bad)
            std::cout << "MISMATCH n=" << ns[i] << " exact=" << exact[i] << " naive=" << naive[i] << '\n';
        if (!bad.empty()) std::cout << "reproduce: " << repro.str() << '\n';
    }
    return bad.empty() ? exit_ok : exit_failed;
}

// ---- zeros ---------------------------------------------------------------

int cmd_zeros_validate(const Settings& s, const std::string& path) {
    ZeroTable t;
    try {
        t = load_table(path);
    } catch (const ParseError& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return exit_failed;
    }
    int min_digits = 1000;
    for (const ZeroEntry& e : t.entries) min_digits = std::min(min_digits, significant_digits(e.z_dec));
    if (t.empty()) min_digits = 0;
    if (s.json) {
        json j;
        j["entries"] = t.size();
        j["source"] = t.source;
        j["min_z_digits"] = min_digits;
        if (!t.empty()) {
            j["z_first"] = t.entries.front().z_dec;
            j["z_last"] = t.entries.back().z_dec;
            j["sigma"] = q_sigma(t, t.size());
        }
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << path << ": " << t.size() << " zeros, ok\n";
        if (!t.source.empty()) std::cout << "source      " << t.source << '\n';
        if (!t.empty()) {
            std::cout << "z range     " << t.entries.front().z_dec << " .. " << t.entries.back().z_dec << '\n'
                      << "min digits  " << min_digits << " (z)\n"
                      << "q sigma     " << fmt(q_sigma(t, t.size()), 6) << '\n';
        }
    }
    return exit_ok;
}

int cmd_zeros_rebase(const std::string& path, const std::string& x0, const std::string& out_path) {
    const ZeroTable t = load_table(path);
    const ShiftedTable s = rebase(t, x0);
    ZeroTable shifted = s.masters;
    shifted.source = (t.source.empty() ? path : t.source) + "; phases rebased to x0 = " + s.x0;
    Sink sink(out_path);
    save_table(sink.get(), shifted);
    return exit_ok;
}

// ---- approx --------------------------------------------------------------

std::size_t terms_or_all(const ZeroTable& t, std::size_t terms) {
    if (terms == 0) return t.size();
    if (terms > t.size()) throw PreconditionError("--terms exceeds the table size " + std::to_string(t.size()));
    return terms;
}

int cmd_approx_eval(const Settings& s, const std::string& zeros, const std::string& lnx, std::size_t terms) {
    const ZeroTable t = load_table(zeros);
    terms = terms_or_all(t, terms);
    const double q = q_at(t, terms, lnx);
    if (s.json) {
        json j;
        j["ln_x"] = lnx;
        j["terms"] = terms;
        j["q"] = q;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << fmt(q, 9) << '\n';
    }
    return exit_ok;
}

int cmd_approx_grid(const std::string& zeros, const std::string& from, double step, u64 count, std::size_t terms,
                    const std::string& out_path) {
    const ZeroTable t = load_table(zeros);
    terms = terms_or_all(t, terms);
    Sink sink(out_path);
    std::ostream& out = sink.get();
    out << "ln_x,q\n";
    constexpr u64 frame = u64{1} << 20;
    for (u64 c0 = 0; c0 < count; c0 += frame) {
        const u64 c1 = std::min(count, c0 + frame);
        const ShiftedTable shifted = rebase(t, decimal_add_scaled(from, c0, step));
        const auto qs = q_batch(shifted, terms, 0.0, step, c1 - c0);
        for (u64 j = 0; j < qs.size(); ++j) out << round_decimal(decimal_add_scaled(from, c0 + j, step), 15) << ',' << fmt(qs[j], 9) << '\n';
    }
    return exit_ok;
}

// ---- scan ----------------------------------------------------------------

void write_grid_csv(std::ostream& out, const GridResult& g) {
    out << "n,M,ratio\n";
    for (const GridPoint& p : g.points) out << to_string(p.n) << ',' << p.m << ',' << fmt(p.ratio, 9) << '\n';
}

int cmd_scan_extremes(const Settings& s, const std::string& from, const std::string& to, u64 grid, double refine_p,
                      u64 gap_ceiling, int sign, const std::string& grid_out) {
    ExtremeSearchConfig cfg;
    cfg.initial_grid = grid;
    cfg.refine_threshold = refine_p;
    cfg.sieve_gap_ceiling = gap_ceiling;
    cfg.sign = sign;
    cfg.engine = engine_config(s);
    const auto t0 = std::chrono::steady_clock::now();
    const ExtremeResult r = extreme_search(parse_u128(from), parse_u128(to), cfg);
    const double secs = seconds_since(t0);
    if (!grid_out.empty()) {
        std::ofstream out = open_out(grid_out);
        write_grid_csv(out, r.grid);
    }
    if (s.json) {
        json j;
        j["n"] = to_string(r.best.n);
        j["M"] = r.best.m;
        j["ratio"] = r.best.ratio;
        j["exact_evaluations"] = r.exact_evaluations;
        j["swept"] = r.swept;
        j["rounds"] = r.rounds;
        j["residual_probability"] = r.residual_probability;
        j["seconds"] = secs;
        j["caveat"] = r.caveat;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "best n    " << to_string(r.best.n) << '\n'
                  << "M(n)      " << r.best.m << '\n'
                  << "ratio     " << fmt(r.best.ratio, 6) << '\n'
                  << "grid      " << r.exact_evaluations << " exact values, " << r.swept << " integers swept, "
                  << r.rounds << " rounds\n"
                  << "residual  " << r.residual_probability << " (aggregate estimate over unswept gaps)\n"
                  << "time      " << fmt(secs, 2) << " s\n"
                  << "note      " << r.caveat << '\n';
    }
    return exit_ok;
}

int cmd_scan_counterexample(const Settings& s, const std::string& zeros, const std::string& from,
                            const std::string& to, double step, ScanConfig cfg, const std::string& bitmap_out,
                            const std::string& hits_out) {
    const ZeroTable t = load_table(zeros);
    if (!(step > 0)) throw PreconditionError("--step must be positive");
    const double span = std::strtod(decimal_add(to, "-" + from).c_str(), nullptr);
    if (span < 0) throw PreconditionError("--lnx-to must not be below --lnx-from");
    cfg.ln_start = from;
    cfg.step = step;
    cfg.count = static_cast<u64>(std::floor(span / step)) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    const ScanResult r = threshold_scan(t, cfg);
    const double secs = seconds_since(t0);
    if (!bitmap_out.empty()) write_bitmap(bitmap_out, r.flags);
    {
        Sink sink(hits_out);
        std::ostream& out = sink.get();
        if (!hits_out.empty() || !s.json) {
            out << "index,ln_x,q_head,q_full\n";
            for (const ScanHit& h : r.hits)
                out << h.index << ',' << round_decimal(h.ln_x, 15) << ',' << fmt(h.q_head, 9) << ',' << fmt(h.q_full, 9) << '\n';
        }
    }
    const ScanStats& st = r.stats;
    if (s.json) {
        json j;
        j["points"] = st.points;
        j["flagged"] = st.flagged;
        j["hits"] = r.hits.size();
        j["reused"] = st.reused;
        j["head_direct"] = st.head_direct;
        j["reanchors"] = st.reanchors;
        j["seconds"] = secs;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cerr << st.points << " points, " << st.flagged << " flagged, " << r.hits.size() << " hits, " << st.reused
                  << " head values reused, " << fmt(secs, 2) << " s\n";
    }
    return exit_ok;
}

// ---- figure --------------------------------------------------------------

int cmd_figure_mgrid(const Settings& s, const std::string& input, const std::string& from, const std::string& to,
                     u64 points, const std::string& out_path) {
    GridResult g;
    if (!input.empty()) {
        std::vector<std::string> header;
        const auto rows = read_csv(input, header);
        const std::size_t cn = column(header, "n", input), cm = column(header, "M", input);
        for (const auto& row : rows) {
            const u128 n = parse_u128(row.at(cn));
            const i64 m = std::stoll(row.at(cm));
            g.points.push_back({n, m, static_cast<double>(m) / std::sqrt(static_cast<double>(n))});
        }
        std::sort(g.points.begin(), g.points.end(), [](const GridPoint& a, const GridPoint& b) { return a.n < b.n; });
    } else {
        if (from.empty() || to.empty() || points < 1) throw PreconditionError("m-grid needs --input or --from/--to/--points");
        const double lo = std::log(static_cast<double>(parse_u128(from)));
        const double hi = std::log(static_cast<double>(parse_u128(to)));
        std::vector<u128> ns;
        for (u64 i = 0; i < points; ++i) {
            const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
            ns.push_back(static_cast<u128>(std::llround(std::exp(lo + (hi - lo) * f))));
        }
        g = exact_grid(ns, engine_config(s));
    }
    Sink sink(out_path);
    write_grid_csv(sink.get(), g);
    return exit_ok;
}

std::vector<std::pair<std::string, double>> read_q_stream(const std::string& input) {
    std::vector<std::string> header;
    const auto rows = read_csv(input, header);
    const std::size_t cx = column(header, "ln_x", input);
    const std::string qcol = std::find(header.begin(), header.end(), "q_full") != header.end() ? "q_full" : "q";
    const std::size_t cq = column(header, qcol, input);
    std::vector<std::pair<std::string, double>> stream;
    for (const auto& row : rows) stream.push_back({row.at(cx), std::stod(row.at(cq))});
    return stream;
}

int cmd_figure_records(const std::string& input, const std::string& out_path) {
    const Records r = running_extremes(read_q_stream(input));
    Sink sink(out_path);
    std::ostream& out = sink.get();
    out << "ln_x,q,sign\n";
    for (const Record& x : r.positive) out << x.ln_x << ',' << fmt(x.q, 9) << ",+\n";
    for (const Record& x : r.negative) out << x.ln_x << ',' << fmt(x.q, 9) << ",-\n";
    return exit_ok;
}

int cmd_figure_histogram(const std::string& input, const std::string& edges_text, const std::string& out_path) {
    std::vector<double> edges;
    std::stringstream ss(edges_text);
    std::string cell;
    while (std::getline(ss, cell, ',')) edges.push_back(std::stod(cell));
    std::vector<double> values;
    for (const auto& [x, q] : read_q_stream(input)) values.push_back(q);
    const Histogram h = tail_histogram(values, edges);
    Sink sink(out_path);
    std::ostream& out = sink.get();
    out << "bin_lo,bin_hi,pos,neg\n";
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        out << edges[i] << ',' << edges[i + 1] << ',' << h.positive[i] << ',' << h.negative[i] << '\n';
    return exit_ok;
}

// ---- sieve ---------------------------------------------------------------

int cmd_sieve_dump(const Settings& s, const std::string& from, const std::string& to, const std::string& out_path) {
    const u128 y1 = parse_u128(from), y2 = parse_u128(to);
    if (y1 < 1 || y2 < y1) throw PreconditionError("sieve dump needs 1 <= from <= to");
    if (y2 - y1 >= (u128{1} << 32)) throw PreconditionError("sieve dump range too long");
    const EngineConfig cfg = engine_config(s);
    i64 m = y1 > 1 ? mertens_exact(y1 - 1, cfg).value : 0;
    const MoebiusSieve sieve(y2, cfg.sieve, cfg.memory_budget);
    Sink sink(out_path);
    std::ostream& out = sink.get();
    constexpr u64 block = u64{1} << 20;
    for (u128 a = y1; a <= y2; a += block) {
        const u128 b = std::min<u128>(y2, a + block - 1);
        MoebiusBlock blk = sieve.sieve(a, b);
        accumulate_mertens(blk, m);
        out << dump_block(blk);
        m = blk.m_end;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and approximate computation of the Mertens function"};
    app.require_subcommand(1);
    app.fallthrough();
    Settings s;
    app.add_option("--memory-budget", s.memory_budget, "Memory budget, bytes or K/M/G suffix (env MERTENS_MEMORY_BUDGET)");
    app.add_option("--workers", s.workers, "Worker threads, 0 = all (env MERTENS_WORKERS)");
    app.add_flag("--json", s.json, "Machine-readable report");
    auto engine_opts = [&](CLI::App* c) {
        c->add_option("--u", s.u, "Sieve limit u (default: chosen from n and the budget)");
        c->add_option("--u-alpha", s.u_alpha, "Scale of the automatic u");
        c->add_option("--block-len", s.block_len, "Sieve block length");
        c->add_option("--c1", s.c1, "Region boundary c1");
        c->add_option("--c2", s.c2, "Region boundary c2");
        c->add_option("--c3", s.c3, "Region boundary c3");
        c->add_flag("--naive-sieve", s.naive_sieve, "Use the 64-bit product sieve");
    };

    // mertens
    std::string n_text, csv_path;
    bool all_quotients = false;
    auto* c_m = app.add_subcommand("mertens", "Exact M(n)");
    c_m->add_option("n", n_text, "n as a decimal (1e16 and 10^16 accepted)")->required();
    c_m->add_flag("--all-quotients", all_quotients, "Also emit M(floor(n/c)) for every c as CSV");
    c_m->add_option("--csv", csv_path, "Write the quotient CSV here instead of stdout");
    c_m->add_option("--checkpoint", s.checkpoint, "Checkpoint file (resumed if present)");
    c_m->add_option("--checkpoint-seconds", s.checkpoint_seconds, "Seconds between checkpoints");
    engine_opts(c_m);

    // verify
    u64 n_max = 10000, samples = 0, seed = 42;
    bool inject = false;
    auto* c_v = app.add_subcommand("verify", "Compare the engine against the naive sieve");
    c_v->add_option("--n-max", n_max, "Largest n checked");
    c_v->add_option("--samples", samples, "Random samples, 0 = every n up to n-max");
    c_v->add_option("--seed", seed, "Sample seed");
    c_v->add_flag("--inject-fault", inject, "Corrupt one engine value (tests the failure path)");
    engine_opts(c_v);

    // zeros
    auto* c_z = app.add_subcommand("zeros", "Zero tables");
    c_z->require_subcommand(1);
    std::string zeros_path, x0, out_path;
    auto* c_zv = c_z->add_subcommand("validate", "Check a zeros file");
    c_zv->add_option("file", zeros_path, "Zeros file")->required();
    auto* c_zr = c_z->add_subcommand("rebase", "Write a table with phases moved to x0");
    c_zr->add_option("file", zeros_path, "Zeros file")->required();
    c_zr->add_option("--x0", x0, "Origin in ln x (decimal)")->required();
    c_zr->add_option("-o,--output", out_path, "Output file (default stdout)");

    // approx
    auto* c_a = app.add_subcommand("approx", "Explicit-formula approximation q_n");
    c_a->require_subcommand(1);
    std::string lnx, from, to;
    std::size_t terms = 0;
    double step = 0;
    u64 count = 0;
    auto* c_ae = c_a->add_subcommand("eval", "q at one ln x");
    c_ae->add_option("--lnx", lnx, "ln x (decimal)")->required();
    c_ae->add_option("--terms", terms, "Number of zeros, 0 = all");
    c_ae->add_option("--zeros", zeros_path, "Zeros file")->required();
    auto* c_ag = c_a->add_subcommand("grid", "q over ln x = from + j step as CSV");
    c_ag->add_option("--from", from, "First ln x (decimal)")->required();
    c_ag->add_option("--step", step, "Grid step")->required();
    c_ag->add_option("--count", count, "Number of points")->required();
    c_ag->add_option("--terms", terms, "Number of zeros, 0 = all");
    c_ag->add_option("--zeros", zeros_path, "Zeros file")->required();
    c_ag->add_option("-o,--output", out_path, "Output CSV (default stdout)");

    // scan
    auto* c_s = app.add_subcommand("scan", "Searches");
    c_s->require_subcommand(1);
    u64 grid = 64, gap_ceiling = u64{1} << 24;
    double refine_p = 0.05;
    int sign = 0;
    std::string grid_out;
    auto* c_se = c_s->add_subcommand("extremes", "Largest |M(n)|/sqrt(n) in a range");
    c_se->add_option("--from", from, "Smallest n")->required();
    c_se->add_option("--to", to, "Largest n")->required();
    c_se->add_option("--grid", grid, "Initial grid points");
    c_se->add_option("--refine-p", refine_p, "Refine gaps whose crossing estimate exceeds this");
    c_se->add_option("--gap-ceiling", gap_ceiling, "Sweep gaps up to this width");
    c_se->add_option("--sign", sign, "0 = |ratio|, 1 = largest, -1 = smallest");
    c_se->add_option("--grid-csv", grid_out, "Write the evaluated grid (n,M,ratio)");
    engine_opts(c_se);

    ScanConfig scfg;
    std::string bitmap_out, hits_out;
    std::size_t head_terms = 7;
    auto* c_sc = c_s->add_subcommand("counterexample", "Threshold scan of q over ln x");
    c_sc->add_option("--lnx-from", from, "First ln x (decimal)")->required();
    c_sc->add_option("--lnx-to", to, "Last ln x (decimal, inclusive)")->required();
    c_sc->add_option("--step", step, "Grid step in ln x")->required();
    c_sc->add_option("--head-terms", head_terms, "Terms in the head filter");
    c_sc->add_option("--head-split", scfg.n_a, "Head split point (terms in the first part)");
    c_sc->add_option("--head-threshold", scfg.t_head, "Flag points with |q_head| at or above this");
    c_sc->add_option("--full-terms", scfg.n_full, "Terms in the full evaluation, 0 = all");
    c_sc->add_option("--full-threshold", scfg.t_full, "Report flagged points with |q_full| at or above this");
    c_sc->add_option("--period-a", scfg.m_a, "Near-period multiplier for the first head part");
    c_sc->add_option("--period-b", scfg.m_b, "Near-period multiplier for the second head part");
    c_sc->add_option("--zeros", zeros_path, "Zeros file")->required();
    c_sc->add_option("--bitmap", bitmap_out, "Write the flag bitmap here");
    c_sc->add_option("--hits", hits_out, "Write hits CSV here (default stdout)");

    // figure
    auto* c_f = app.add_subcommand("figure", "Plot-ready CSV");
    c_f->require_subcommand(1);
    std::string input, edges = "0.88,0.89,0.90,0.91,0.92,0.93,0.94,0.95";
    u64 points = 0;
    auto* c_fg = c_f->add_subcommand("m-grid", "n,M,ratio over a grid");
    c_fg->add_option("--input", input, "Grid CSV from scan extremes");
    c_fg->add_option("--from", from, "Smallest n");
    c_fg->add_option("--to", to, "Largest n");
    c_fg->add_option("--points", points, "Log-spaced points between --from and --to");
    c_fg->add_option("-o,--output", out_path, "Output file (default stdout)");
    engine_opts(c_fg);
    auto* c_fr = c_f->add_subcommand("records", "ln_x,q,sign records from a scan");
    c_fr->add_option("--input", input, "Hits CSV or approx grid CSV")->required();
    c_fr->add_option("-o,--output", out_path, "Output file (default stdout)");
    auto* c_fh = c_f->add_subcommand("histogram", "bin_lo,bin_hi,pos,neg of |q|");
    c_fh->add_option("--input", input, "Hits CSV or approx grid CSV")->required();
    c_fh->add_option("--edges", edges, "Comma-separated ascending bin edges");
    c_fh->add_option("-o,--output", out_path, "Output file (default stdout)");

    // sieve
    auto* c_sv = app.add_subcommand("sieve", "Moebius sieve");
    c_sv->require_subcommand(1);
    auto* c_sd = c_sv->add_subcommand("dump", "y mu(y) M(y) lines");
    c_sd->add_option("--from", from, "First y")->required();
    c_sd->add_option("--to", to, "Last y")->required();
    c_sd->add_option("-o,--output", out_path, "Output file (default stdout)");
    engine_opts(c_sd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        apply_environment(s);
        set_worker_count(s.workers);
        if (*c_m) return cmd_mertens(s, n_text, all_quotients, csv_path);
        if (*c_v) return cmd_verify(s, n_max, samples, seed, inject, argv[0]);
        if (*c_zv) return cmd_zeros_validate(s, zeros_path);
        if (*c_zr) return cmd_zeros_rebase(zeros_path, x0, out_path);
        if (*c_ae) return cmd_approx_eval(s, zeros_path, lnx, terms);
        if (*c_ag) return cmd_approx_grid(zeros_path, from, step, count, terms, out_path);
        if (*c_se) return cmd_scan_extremes(s, from, to, grid, refine_p, gap_ceiling, sign, grid_out);
        if (*c_sc) {
            scfg.n_b = head_terms;
            return cmd_scan_counterexample(s, zeros_path, from, to, step, scfg, bitmap_out, hits_out);
        }
        if (*c_fg) return cmd_figure_mgrid(s, input, from, to, points, out_path);
        if (*c_fr) return cmd_figure_records(input, out_path);
        if (*c_fh) return cmd_figure_histogram(input, edges, out_path);
        if (*c_sd) return cmd_sieve_dump(s, from, to, out_path);
    } catch (const ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_resource;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return exit_resource;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
