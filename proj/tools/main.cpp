// mcfinite: model counting, constant elimination, counterexample and sequence workflows.

#include "mcf/builtins.hpp"
#include "mcf/counter.hpp"
#include "mcf/counterexample.hpp"
#include "mcf/eliminator.hpp"
#include "mcf/error.hpp"
#include "mcf/formula_text.hpp"
#include "mcf/recurrence.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUserError = 1;
constexpr int kBudget = 2;
constexpr int kMismatch = 3;

struct Mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Range {
    int from = 0;
    int to = 0;
};

Range parse_range(const std::string& text)
{
    Range r;
    const auto dots = text.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            r.from = r.to = std::stoi(text, &used);
            if (used != text.size())
                throw std::invalid_argument(text);
        } else {
            const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
            r.from = std::stoi(a, &used);
            if (used != a.size())
                throw std::invalid_argument(text);
            r.to = std::stoi(b, &used);
            if (used != b.size())
                throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw mcf::ValidationError("bad range '" + text + "' (expected A..B)");
    }
    if (r.from < 0 || r.to < r.from)
        throw mcf::ValidationError("empty or negative range '" + text + "'");
    return r;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw mcf::ValidationError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw mcf::ValidationError("cannot write " + path.string());
    out << text;
}

/// Primary output goes to --out or stdout; timings go to a sidecar next to --out.
void emit(const std::string& out_path, const std::string& text, const json& timing)
{
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    write_file(out_path, text);
    write_file(out_path + ".timing.json", timing.dump(2) + "\n");
}

struct Source {
    std::string builtin;
    std::string spec_path;

    bool given() const { return !builtin.empty() || !spec_path.empty(); }

    mcf::ClassSpec load() const
    {
        if (!builtin.empty() && !spec_path.empty())
            throw mcf::ValidationError("give either --builtin or --spec, not both");
        if (!builtin.empty())
            return mcf::builtin_class_from_text(builtin);
        if (!spec_path.empty())
            return mcf::parse_class_spec(read_file(spec_path));
        throw mcf::ValidationError("a class is required: --builtin NAME[:params] or --spec PATH");
    }

    std::string name() const
    {
        return !builtin.empty() ? builtin : fs::path(spec_path).stem().string();
    }
};

void add_source(CLI::App* cmd, Source& src)
{
    cmd->add_option("--builtin", src.builtin, "builtin class NAME[:params]");
    cmd->add_option("--spec", src.spec_path, "class specification file");
}

struct Common {
    int workers = 1;
    std::int64_t budget = 40;
    std::string out;
    std::string format = "csv";

    mcf::CountOptions options() const
    {
        mcf::CountOptions o;
        o.workers = workers;
        o.budget_bits = budget;
        return o;
    }
};

/// Manifests and verdicts are JSON only; tables also come as csv or text.
void add_common(CLI::App* cmd, Common& c, const std::string& default_format, bool tables = true)
{
    c.format = default_format;
    const std::vector<std::string> formats = tables ? std::vector<std::string>{"json", "csv", "text"}
                                                    : std::vector<std::string>{"json"};
    cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", c.budget, "largest interpretation size in bits")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output path");
    cmd->add_option("--format", c.format, tables ? "json, csv or text" : "json")->check(CLI::IsMember(formats));
}

/// Renders rows of string cells in the requested format.
std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                   const std::string& format, const json& extra = json::object())
{
    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i];
            os << '\n';
        }
    } else if (format == "json") {
        json j = extra;
        j["rows"] = json::array();
        for (const auto& row : rows) {
            json r;
            for (std::size_t i = 0; i < header.size(); ++i) {
                // Counts stay strings (they can be huge); other integer cells become numbers.
                const bool small_int = header[i] != "count" && !row[i].empty() && row[i].size() <= 18 &&
                                       row[i].find_first_not_of("0123456789") == std::string::npos;
                if (small_int)
                    r[header[i]] = std::stoll(row[i]);
                else
                    r[header[i]] = row[i];
            }
            j["rows"].push_back(r);
        }
        os << j.dump(2) << '\n';
    } else {
        std::vector<std::size_t> width(header.size());
        for (std::size_t i = 0; i < header.size(); ++i) {
            width[i] = header[i].size();
            for (const auto& row : rows)
                width[i] = std::max(width[i], row[i].size());
        }
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << cells[i];
            os << '\n';
        };
        line(header);
        for (const auto& row : rows)
            line(row);
    }
    return os.str();
}

// count ---------------------------------------------------------------------------------

struct CountArgs {
    Source src;
    Common common;
    std::string range = "1..5";
    std::uint64_t mod = 0;
};

int run_count(const CountArgs& a)
{
    const mcf::ClassSpec spec = a.src.load();
    const Range r = parse_range(a.range);
    std::vector<std::string> header{"n", "universeSize", "count"};
    if (a.mod)
        header.push_back("residue");
    std::vector<std::vector<std::string>> rows;
    json timing{{"command", "count"}, {"elapsedMs", json::array()}};
    for (int n = r.from; n <= r.to; ++n) {
        const mcf::CountResult res = mcf::count_models(spec, n, a.common.options(), a.src.name());
        std::vector<std::string> row{std::to_string(n), std::to_string(res.universe), res.count.str()};
        if (a.mod)
            row.push_back(mcf::BigInt(res.count % a.mod).str());
        rows.push_back(std::move(row));
        timing["elapsedMs"].push_back({{"n", n}, {"ms", res.elapsed.count()}});
    }
    json extra{{"class", a.src.name()}, {"method", "enumeration"}};
    if (a.mod)
        extra["modulus"] = a.mod;
    emit(a.common.out, render(header, rows, a.common.format, extra), timing);
    return 0;
}

// eliminate -----------------------------------------------------------------------------

struct EliminateArgs {
    Source src;
    Common common;
    std::string mode = "manyOne";
    bool all = false;
    std::string verify;
    bool allow_noop = false;
};

/// Largest n (at most 6) for which every class fits the bit budget.
int default_verify_max(const std::vector<const mcf::ClassSpec*>& specs, std::int64_t budget)
{
    int best = 0;
    for (int n = 1; n <= 6; ++n) {
        for (const auto* s : specs) {
            const int universe = n + s->vocab.num_constants;
            try {
                if (mcf::BitLayout(s->vocab, universe).total_bits() > budget)
                    return best;
            } catch (const mcf::BudgetExceeded&) {
                return best;
            }
        }
        best = n;
    }
    return best;
}

int run_eliminate(const EliminateArgs& a)
{
    const mcf::ClassSpec spec = a.src.load();
    const mcf::EliminationMode mode = mcf::parse_elimination_mode(a.mode);
    const fs::path dir = a.common.out.empty() ? fs::path("eliminated") : fs::path(a.common.out);

    json manifest{{"mode", mcf::to_string(mode)}, {"input", a.src.name()}, {"inputConstants", spec.vocab.num_constants}};
    if (spec.vocab.num_constants == 0) {
        if (!a.allow_noop) {
            std::cerr << "warning: no-op, the class has no constants (pass --allow-noop to copy it through)\n";
            return kUserError;
        }
        manifest["noop"] = true;
    }

    std::vector<mcf::ClassSpec> outputs;
    json provenance = json::array();
    if (spec.vocab.num_constants == 0) {
        outputs.push_back(spec);
    } else if (a.all && mode != mcf::EliminationMode::Sum) {
        mcf::ClassSpec current = spec;
        while (current.vocab.num_constants > 0) {
            mcf::EliminationResult step = mcf::eliminate(current, mode);
            for (const auto& g : step.relations)
                provenance.push_back({{"name", g.name}, {"source", g.source}, {"positions", g.positions},
                                      {"arity", g.arity}, {"role", g.role},
                                      {"removedConstant", current.vocab.num_constants}});
            current = step.outputs.front();
        }
        outputs.push_back(current);
    } else {
        if (a.all)
            throw mcf::ValidationError("--all is not available in sum mode");
        mcf::EliminationResult result = mcf::eliminate(spec, mode);
        for (const auto& g : result.relations)
            provenance.push_back({{"name", g.name}, {"source", g.source}, {"positions", g.positions},
                                  {"arity", g.arity}, {"role", g.role},
                                  {"removedConstant", spec.vocab.num_constants}});
        outputs = result.outputs;
        if (mode == mcf::EliminationMode::Sum) {
            json sets = json::array();
            for (const auto& ctx : result.contexts)
                sets.push_back(ctx.with_a);
            manifest["withA"] = sets;
        }
    }
    manifest["provenance"] = provenance;

    json files = json::array();
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const std::string text = mcf::print_class_spec(outputs[i]);
        // Every emitted file must parse back to the same class.
        if (!(mcf::parse_class_spec(text) == outputs[i]))
            throw Mismatch("output " + std::to_string(i) + " does not round-trip through the text format");
        const std::string file = "out" + std::to_string(i) + ".sexp";
        write_file(dir / file, text);
        files.push_back({{"file", file}, {"constants", outputs[i].vocab.num_constants},
                         {"relations", outputs[i].vocab.relations.size()}});
    }
    manifest["outputs"] = files;

    Range r{1, 0};
    std::vector<const mcf::ClassSpec*> all_specs{&spec};
    for (const auto& o : outputs)
        all_specs.push_back(&o);
    if (!a.verify.empty()) {
        r = parse_range(a.verify);
        for (int n = r.from; n <= r.to; ++n)
            for (const auto* s : all_specs)
                if (mcf::BitLayout(s->vocab, n + s->vocab.num_constants).total_bits() > a.common.budget)
                    throw mcf::BudgetExceeded("verification at n=" + std::to_string(n) + " exceeds the budget");
    } else {
        r.to = default_verify_max(all_specs, a.common.budget);
    }

    // n excludes constants, so the input over [n + k] and each output over [n + k'] share n.
    json rows = json::array();
    json timing{{"command", "eliminate"}, {"elapsedMs", json::array()}};
    bool verified = true;
    for (int n = r.from; n <= r.to; ++n) {
        const auto in = mcf::count_models(spec, n, a.common.options());
        mcf::BigInt sum = 0;
        json parts = json::array();
        std::int64_t ms = in.elapsed.count();
        for (const auto& o : outputs) {
            const auto c = mcf::count_models(o, n, a.common.options());
            sum += c.count;
            parts.push_back(c.count.str());
            ms += c.elapsed.count();
        }
        const bool ok = sum == in.count;
        verified = verified && ok;
        rows.push_back({{"n", n}, {"input", in.count.str()}, {"outputs", parts}, {"equal", ok}});
        timing["elapsedMs"].push_back({{"n", n}, {"ms", ms}});
    }
    manifest["verification"] = {{"range", {r.from, r.to}}, {"rows", rows}, {"verified", verified}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_file(dir / "manifest.json.timing.json", timing.dump(2) + "\n");
    std::cout << "wrote " << outputs.size() << " class(es) to " << dir.string() << " (verified: "
              << (verified ? "true" : "false") << ")\n";
    if (!verified)
        throw Mismatch("model counts differ between input and output");
    return 0;
}

// witness -------------------------------------------------------------------------------

struct WitnessArgs {
    Common common;
    int p = 2;
    int max_n = 8;
    std::string stage_sizes;
};

int run_witness(const WitnessArgs& a)
{
    if (!mcf::is_prime(a.p))
        throw mcf::ValidationError(std::to_string(a.p) + " is not prime");
    if (a.max_n < 1)
        throw mcf::ValidationError("--max-n must be positive");
    const fs::path dir = a.common.out.empty() ? fs::path("witness") : fs::path(a.common.out);
    const mcf::ClassSpec phi = a.p == 2 ? mcf::build_phi_m() : mcf::build_phi_mp(a.p);
    write_file(dir / "phi.sexp", mcf::print_class_spec(phi));

    const mcf::ClassSpec spec8 = mcf::eliminate_higher_arity(phi).outputs.front();
    const auto stages = mcf::trim_pipeline(spec8);
    for (const auto& st : stages) {
        const std::string text = mcf::print_class_spec(st.spec);
        if (!(mcf::parse_class_spec(text) == st.spec))
            throw Mismatch("stage " + std::to_string(st.stage) + " does not round-trip");
        write_file(dir / ("stage" + std::to_string(st.stage) + ".sexp"), text);
    }

    const std::string mod_col = "countMod" + std::to_string(a.p);
    std::vector<std::vector<std::string>> rows;
    for (int n = 1; n <= a.max_n; ++n) {
        const mcf::BigInt c = mcf::oracle_iterated_matchings(n, a.p);
        rows.push_back({std::to_string(n), c.str(), mcf::BigInt(c % a.p).str()});
    }
    const std::string& format = a.common.format;
    const std::string ext = format == "json" ? ".json" : format == "csv" ? ".csv" : ".txt";
    write_file(dir / ("oracle" + ext), render({"universeSize", "count", mod_col}, rows, format, {{"p", a.p}}));

    json timing{{"command", "witness"}, {"elapsedMs", json::array()}};
    if (!a.stage_sizes.empty()) {
        const Range r = parse_range(a.stage_sizes);
        std::vector<std::string> header{"universeSize"};
        for (const auto& st : stages)
            header.push_back("stage" + std::to_string(st.stage));
        std::vector<std::vector<std::string>> counts;
        mcf::CountOptions opts = a.common.options();
        for (int u = std::max(1, r.from); u <= r.to; ++u) {
            std::vector<std::string> row{std::to_string(u)};
            mcf::BigInt first;
            for (std::size_t i = 0; i < stages.size(); ++i) {
                const auto c = mcf::count_models(stages[i].spec, u, opts);
                if (i == 0)
                    first = c.count;
                else if (c.count != first)
                    throw Mismatch("stage counts differ at universe size " + std::to_string(u));
                row.push_back(c.count.str());
                timing["elapsedMs"].push_back({{"universeSize", u}, {"stage", stages[i].stage}, {"ms", c.elapsed.count()}});
            }
            counts.push_back(std::move(row));
        }
        write_file(dir / ("stages" + ext), render(header, counts, format));
    }
    write_file(dir / "timing.json", timing.dump(2) + "\n");
    std::cout << "wrote sentence, " << stages.size() << " stages and the oracle table to " << dir.string() << "\n";
    return 0;
}

// analyze -------------------------------------------------------------------------------

struct AnalyzeArgs {
    Source src;
    Common common;
    std::string csv;
    std::string oracle;
    std::string range;
    std::uint64_t mod = 2;
    int threshold = 2;
    int max_order = -1;
    std::string bound;
};

int run_analyze(const AnalyzeArgs& a)
{
    mcf::ResidueSequence seq;
    const int sources = (!a.csv.empty()) + (!a.oracle.empty()) + a.src.given();
    if (sources != 1)
        throw mcf::ValidationError("give exactly one of --csv, --oracle, --builtin or --spec");
    if (a.mod < 2)
        throw mcf::ValidationError("--mod must be at least 2");
    if (!a.csv.empty()) {
        seq = mcf::sequence_from_csv(read_file(a.csv), a.mod);
        seq.source = a.csv;
    } else {
        if (a.range.empty())
            throw mcf::ValidationError("--n A..B is required with --oracle, --builtin or --spec");
        const Range r = parse_range(a.range);
        if (!a.oracle.empty())
            seq = mcf::oracle_series(a.oracle, r.from, r.to, a.mod);
        else
            seq = mcf::residue_series(a.src.load(), r.from, r.to, a.mod, a.common.options(), a.src.name());
    }

    std::optional<mcf::PeriodBound> bound;
    if (!a.bound.empty()) {
        const auto comma = a.bound.find(',');
        if (comma == std::string::npos)
            throw mcf::ValidationError("--bound expects PREPERIOD,PERIOD");
        bound = mcf::PeriodBound{std::stoi(a.bound.substr(0, comma)), std::stoi(a.bound.substr(comma + 1))};
    }
    const mcf::PeriodicityVerdict verdict = mcf::detect_ultimate_periodicity(seq, a.threshold, bound);

    json out{{"source", seq.source},
             {"modulus", seq.modulus},
             {"startIndex", seq.start_index},
             {"length", seq.values.size()},
             {"truncated", seq.truncated},
             {"verdict", verdict.to_json()},
             {"primePowers", mcf::decompose_modulus(seq.modulus)}};
    if (seq.truncated)
        out["truncation"] = seq.truncation;
    if (mcf::is_prime(static_cast<int>(seq.modulus))) {
        const int len = static_cast<int>(seq.values.size());
        const int max_order = a.max_order >= 0 ? a.max_order : std::min(6, (len - 2) / 2);
        const auto rec = mcf::find_linear_recurrence_mod_prime(seq, seq.modulus, max_order);
        json r{{"maxOrder", max_order}};
        if (rec) {
            r["order"] = rec->size();
            r["coefficients"] = *rec;
        } else {
            r["order"] = nullptr;
            r["coefficients"] = nullptr;
        }
        out["recurrence"] = r;
    }
    emit(a.common.out, out.dump(2) + "\n", json{{"command", "analyze"}});
    return 0;
}

// oracle --------------------------------------------------------------------------------

struct OracleArgs {
    Common common;
    std::string name = "iteratedMatchings";
    int p = 2;
    std::string range = "1..16";
    std::uint64_t mod = 0;
};

int run_oracle(const OracleArgs& a)
{
    const Range r = parse_range(a.range);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"n"};
    if (a.name == "iteratedMatchings") {
        if (!mcf::is_prime(a.p))
            throw mcf::ValidationError(std::to_string(a.p) + " is not prime");
        header.push_back("count");
        if (a.mod)
            header.push_back("residue");
        for (int n = std::max(1, r.from); n <= r.to; ++n) {
            const mcf::BigInt c = mcf::oracle_iterated_matchings(n, a.p);
            std::vector<std::string> row{std::to_string(n), c.str()};
            if (a.mod)
                row.push_back(mcf::BigInt(c % a.mod).str());
            rows.push_back(std::move(row));
        }
    } else {
        if (a.mod < 2)
            throw mcf::ValidationError("oracle " + a.name + " needs --mod");
        const auto seq = mcf::oracle_series(a.name, r.from, r.to, a.mod);
        header.push_back("residue");
        for (std::size_t i = 0; i < seq.values.size(); ++i)
            rows.push_back({std::to_string(seq.start_index + static_cast<int>(i)), std::to_string(seq.values[i])});
    }
    emit(a.common.out, render(header, rows, a.common.format, {{"oracle", a.name}}), json{{"command", "oracle"}});
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Count finite models, eliminate hard-wired constants, and analyze residue sequences."};
    app.require_subcommand(1);

    CountArgs count;
    auto* c = app.add_subcommand("count", "count models over [n + constants] for each n");
    add_source(c, count.src);
    add_common(c, count.common, "csv");
    c->add_option("--n", count.range, "range A..B");
    c->add_option("--mod", count.mod, "also report the count modulo M")->check(CLI::Range(2ULL, ~0ULL));

    EliminateArgs elim;
    auto* e = app.add_subcommand("eliminate", "remove the last constant and check model counts");
    add_source(e, elim.src);
    add_common(e, elim.common, "json", false);
    e->add_option("--mode", elim.mode, "sum, manyOne or higherArity")
        ->check(CLI::IsMember({"sum", "manyOne", "higherArity"}));
    e->add_flag("--all", elim.all, "remove every constant");
    e->add_option("--verify", elim.verify, "n range A..B for the count check");
    e->add_flag("--allow-noop", elim.allow_noop, "accept classes without constants");

    WitnessArgs wit;
    wit.common.budget = 64; // stage 8 at universe size 3 has 64 bits
    auto* w = app.add_subcommand("witness", "emit the ternary counterexample, its trim stages and oracle counts");
    add_common(w, wit.common, "csv");
    w->add_option("--p", wit.p, "prime");
    w->add_option("--max-n", wit.max_n, "largest vertex count for the oracle table");
    w->add_option("--stage-sizes", wit.stage_sizes, "universe sizes A..B at which to count every stage");

    AnalyzeArgs an;
    auto* z = app.add_subcommand("analyze", "periodicity and recurrence of a residue sequence");
    add_source(z, an.src);
    add_common(z, an.common, "json", false);
    z->add_option("--csv", an.csv, "sequence file with columns n,residue");
    z->add_option("--oracle", an.oracle, "fibonacci, bell, powersOfTwo, iteratedMatchings[:p]");
    z->add_option("--n", an.range, "range A..B");
    z->add_option("--mod", an.mod, "modulus");
    z->add_option("--threshold", an.threshold, "times a period must be seen")->check(CLI::PositiveNumber);
    z->add_option("--max-order", an.max_order, "largest recurrence order to try");
    z->add_option("--bound", an.bound, "PREPERIOD,PERIOD a periodic sequence must respect");

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "exact counts from combinatorial oracles");
    add_common(o, orc.common, "csv");
    o->add_option("--name", orc.name, "iteratedMatchings, fibonacci, bell, powersOfTwo");
    o->add_option("--p", orc.p, "prime for iteratedMatchings");
    o->add_option("--n", orc.range, "range A..B");
    o->add_option("--mod", orc.mod, "modulus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kUserError;
    }

    try {
        if (c->parsed())
            return run_count(count);
        if (e->parsed())
            return run_eliminate(elim);
        if (w->parsed())
            return run_witness(wit);
        if (z->parsed())
            return run_analyze(an);
        if (o->parsed())
            return run_oracle(orc);
    } catch (const mcf::BudgetExceeded& ex) {
        std::cerr << "budget exceeded: " << ex.what() << "\n";
        return kBudget;
    } catch (const Mismatch& ex) {
        std::cerr << "internal mismatch: " << ex.what() << "\n";
        return kMismatch;
    } catch (const mcf::ParseError& ex) {
        std::cerr << "parse error at " << ex.what() << "\n";
        return kUserError;
    } catch (const mcf::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUserError;
    } catch (const fs::filesystem_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUserError;
    }
    return kUserError;
}
