// walkbounds CLI: validate chain documents, run exact analysis, evaluate
// bounds, run seeded simulations, and cross-check exact against simulated.
//
// Exit codes: 0 success; 1 invalid input; 2 theorem violation or
// inconsistent simulation comparison; 3 internal solver error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "walkbounds/bounds.hpp"
#include "walkbounds/chain.hpp"
#include "walkbounds/exact.hpp"
#include "walkbounds/generators.hpp"
#include "walkbounds/io.hpp"
#include "walkbounds/numfmt.hpp"
#include "walkbounds/rng.hpp"
#include "walkbounds/simulate.hpp"

namespace wb = walkbounds;

namespace {

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows,
                         std::size_t text_columns) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << "  ";
            const auto pad = width[c] - cells[c].size();
            if (c < text_columns) {
                out << cells[c] << std::string(pad, ' ');
            } else {
                out << std::string(pad, ' ') << cells[c];
            }
        }
        out << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out.str();
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw wb::IoError("cannot open '" + output_path + "' for writing");
    out << text;
    if (!out) throw wb::IoError("failed writing '" + output_path + "'");
}

void require_absorption(const wb::Generated& doc) {
    const auto report = wb::validate_absorption(doc.chain, doc.partition);
    if (report.ok) return;
    std::string states;
    for (std::size_t i = 0; i < report.offending_states.size() && i < 8; ++i) {
        if (i) states += ", ";
        states += doc.chain.label(report.offending_states[i]);
    }
    if (report.offending_states.size() > 8) states += ", ...";
    throw wb::AbsorptionError("no support path to C from: " + states);
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string input;
};

int do_validate(const ValidateArgs& args) {
    const wb::Generated doc = wb::read_document(args.input);
    const auto report = wb::validate_absorption(doc.chain, doc.partition);
    std::cout << "states: " << doc.chain.size()
              << "  A: " << doc.partition.a_states().size()
              << "  B: " << doc.partition.b_states().size()
              << "  C: " << doc.partition.c_states().size() << "\n";
    if (report.ok) {
        std::cout << "absorption: ok (every A/B state reaches C)\n";
        return 0;
    }
    std::cout << "absorption: FAILED for " << report.offending_states.size() << " state(s):";
    for (int s : report.offending_states) std::cout << ' ' << doc.chain.label(s);
    std::cout << "\n";
    std::cerr << "error:absorption:no support path to C from "
              << doc.chain.label(report.offending_states.front()) << " (and "
              << report.offending_states.size() - 1 << " more)\n";
    return 1;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string input, output;
    std::string format = "table";
};

int do_analyze(const AnalyzeArgs& args) {
    const wb::Generated doc = wb::read_document(args.input);
    require_absorption(doc);
    const auto& chain = doc.chain;
    const auto& part = doc.partition;

    const wb::ExcursionStats stats = wb::excursion_stats(chain, part);
    const auto time_c = wb::expected_hitting_time(chain, wb::StoppingSpec::of(chain, part.c_states()));
    std::vector<int> bc = part.b_states();
    bc.insert(bc.end(), part.c_states().begin(), part.c_states().end());
    const auto time_bc = wb::expected_hitting_time(chain, wb::StoppingSpec::of(chain, bc));
    std::vector<int> ac = part.a_states();
    ac.insert(ac.end(), part.c_states().begin(), part.c_states().end());
    const auto time_ac = wb::expected_hitting_time(chain, wb::StoppingSpec::of(chain, ac));

    const bool csv = args.format == "csv";
    auto fmt = [&](double v) { return csv ? wb::format_g17(v) : wb::format_f10(v); };

    std::vector<std::vector<std::string>> rows;
    for (int a : part.a_states()) {
        rows.push_back({chain.label(a), "A", fmt(stats.cross_a(a)), fmt(stats.round_trip_a(a)),
                        fmt(time_bc.at(a)), fmt(time_c.at(a))});
    }
    for (int b : part.b_states()) {
        rows.push_back({chain.label(b), "B", fmt(stats.cross_b(b)), fmt(stats.round_trip_b(b)),
                        fmt(time_ac.at(b)), fmt(time_c.at(b))});
    }

    const std::vector<std::string> header = {"state",       "class",        "p_cross",
                                             "p_round_trip", "e_exit_class", "e_absorb"};
    std::string text;
    if (csv) {
        std::string s = "state,class,p_cross,p_round_trip,e_exit_class,e_absorb\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) s += ',';
                s += row[c];
            }
            s += '\n';
        }
        text = std::move(s);
    } else {
        text = render_table(header, rows, 2);
        std::ostringstream sum;
        sum << "\nsup p_cross(A) = " << wb::format_f10(stats.cross_sup_a)
            << "   sup p_cross(B) = " << wb::format_f10(stats.cross_sup_b)
            << "   product = " << wb::format_f10(stats.cross_sup_a * stats.cross_sup_b) << '\n'
            << "sup e_exit(A)  = " << wb::format_f10(stats.exit_time_sup_a)
            << "   sup e_exit(B)  = " << wb::format_f10(stats.exit_time_sup_b) << '\n';
        text += sum.str();
    }
    emit(text, args.output);
    return 0;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
    std::string input, output;
    std::string format = "table";
    int report_cap = 500;
    int sample = 0;
    std::uint64_t seed = 0;
};

std::string render_report(const wb::FullReport& report, const std::string& format) {
    if (format == "csv") return wb::to_csv(report);

    const std::vector<std::string> header = {"quantity", "pair", "x",           "y",
                                             "lower",    "exact", "upper",       "slack_lower",
                                             "slack_upper", "tight", "vacuous"};
    std::vector<std::vector<std::string>> rows;
    auto push_bound = [&rows](const wb::BoundReport& r) {
        rows.push_back({r.quantity, r.class_pair, r.x_label, r.y_label, wb::format_f10(r.lower),
                        wb::format_f10(r.exact), wb::format_f10(r.upper), wb::format_f10(r.slack_lower),
                        wb::format_f10(r.slack_upper), r.tight ? "true" : "false",
                        r.vacuous ? "true" : "false"});
    };
    for (const auto& r : report.greens) push_bound(r);
    for (const auto& r : report.hitting_times) push_bound(r);
    for (const auto& r : report.separations) {
        rows.push_back({"separation", "BC", r.b_label, r.c_label, wb::format_f10(0.0),
                        wb::format_f10(r.defect_p), wb::format_f10(r.bound), wb::format_f10(r.defect_p),
                        wb::format_f10(r.bound - r.defect_p),
                        (r.bound - r.defect_p <= wb::kTightTolerance) ? "true" : "false", "false"});
    }
    return render_table(header, rows, 4);
}

int do_bounds(const BoundsArgs& args) {
    const wb::Generated doc = wb::read_document(args.input);
    require_absorption(doc);

    wb::ReportOptions options;
    options.cap = args.report_cap;
    options.sample = args.sample;
    options.sample_seed = args.seed;

    const wb::FullReport report = wb::full_report(doc.chain, doc.partition, options);
    emit(render_report(report, args.format), args.output);
    if (!report.all_hold()) {
        std::cerr << "error:bound-violation:some report rows fall outside [lower, upper]\n";
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string input, output;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::int64_t n_paths = 100000;
    std::int64_t cap = 1000000;
    double confidence = 0.99;
    std::vector<std::string> states;
};

int do_simulate(const SimulateArgs& args) {
    const wb::Generated doc = wb::read_document(args.input);
    require_absorption(doc);
    const auto& chain = doc.chain;
    const auto& part = doc.partition;

    std::set<std::string> filter(args.states.begin(), args.states.end());
    for (const auto& label : filter) chain.index_of(label);  // reject unknown names early

    std::vector<int> targets;
    for (int a : part.a_states()) {
        if (filter.empty() || filter.count(chain.label(a))) targets.push_back(a);
    }
    for (int b : part.b_states()) {
        if (filter.empty() || filter.count(chain.label(b))) targets.push_back(b);
    }
    if (targets.empty()) throw wb::InvalidArgumentError("no A/B states selected for simulation");

    const wb::StoppingSpec to_c = wb::StoppingSpec::of(chain, part.c_states());
    const bool csv = args.format == "csv";
    auto fmt = [&](double v) { return csv ? wb::format_g17(v) : wb::format_f10(v); };

    std::vector<std::vector<std::string>> rows;
    std::uint64_t estimate_index = 0;
    auto push_row = [&](const char* quantity, int state, const wb::SimulationEstimate& est) {
        rows.push_back({quantity, chain.label(state), fmt(est.mean), fmt(est.ci_half_width),
                        std::to_string(est.n_paths), std::to_string(est.n_truncated),
                        std::to_string(est.seed), fmt(est.confidence_level)});
    };

    for (int x : targets) {
        wb::SimOptions opt;
        opt.n_paths = args.n_paths;
        opt.cap = args.cap;
        opt.confidence_level = args.confidence;

        opt.seed = wb::rng::derive_stream(args.seed, estimate_index++);
        const auto events = wb::estimate_excursion_events(chain, part, x, opt);
        push_row("p_cross", x, events.cross);
        push_row("p_round_trip", x, events.cross_return);

        opt.seed = wb::rng::derive_stream(args.seed, estimate_index++);
        push_row("hit_time_c", x, wb::estimate_hitting_time(chain, to_c, x, opt));
    }

    const std::vector<std::string> header = {"quantity", "state",       "mean",       "ci_half_width",
                                             "n_paths",  "n_truncated", "seed",       "confidence"};
    std::string text;
    if (csv) {
        std::string s = "quantity,state,mean,ci_half_width,n_paths,n_truncated,seed,confidence\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) s += ',';
                s += row[c];
            }
            s += '\n';
        }
        text = std::move(s);
    } else {
        text = render_table(header, rows, 2);
    }
    emit(text, args.output);
    return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string input, output;
    std::string format = "table";
    std::uint64_t seed = 0;
    std::int64_t n_paths = 100000;
    std::int64_t cap = 1000000;
    double confidence = 0.99;
    double z = 4.0;
};

int do_compare(const CompareArgs& args) {
    const wb::Generated doc = wb::read_document(args.input);
    require_absorption(doc);
    const auto& chain = doc.chain;
    const auto& part = doc.partition;

    const wb::ExcursionStats stats = wb::excursion_stats(chain, part);
    const wb::StoppingSpec to_c = wb::StoppingSpec::of(chain, part.c_states());
    const auto time_c = wb::expected_hitting_time(chain, to_c);
    std::vector<int> ab = part.a_states();
    ab.insert(ab.end(), part.b_states().begin(), part.b_states().end());
    wb::GreensSolver greens_ab(chain, ab);

    const bool csv = args.format == "csv";
    auto fmt = [&](double v) { return csv ? wb::format_g17(v) : wb::format_f10(v); };

    bool any_inconsistent = false;
    std::vector<std::vector<std::string>> rows;
    std::uint64_t estimate_index = 0;
    auto push_row = [&](const char* quantity, int x, const std::string& y, double exact,
                        const wb::SimulationEstimate& est) {
        const wb::Verdict verdict = wb::compare(exact, est, args.z);
        any_inconsistent = any_inconsistent || verdict == wb::Verdict::inconsistent;
        rows.push_back({quantity, chain.label(x), y, fmt(exact), fmt(est.mean),
                        fmt(est.ci_half_width), fmt(args.z), wb::to_string(verdict)});
    };

    std::vector<int> targets = ab;  // A states then B states
    for (int x : targets) {
        wb::SimOptions opt;
        opt.n_paths = args.n_paths;
        opt.cap = args.cap;
        opt.confidence_level = args.confidence;
        const bool in_a = part.label(x) == wb::StateClass::A;

        opt.seed = wb::rng::derive_stream(args.seed, estimate_index++);
        push_row("green_diag", x, chain.label(x), greens_ab.entry(x, x),
                 wb::estimate_green(chain, ab, x, x, opt));

        opt.seed = wb::rng::derive_stream(args.seed, estimate_index++);
        push_row("hit_time_c", x, "", time_c.at(x), wb::estimate_hitting_time(chain, to_c, x, opt));

        opt.seed = wb::rng::derive_stream(args.seed, estimate_index++);
        const auto events = wb::estimate_excursion_events(chain, part, x, opt);
        push_row("p_cross", x, "", in_a ? stats.cross_a(x) : stats.cross_b(x), events.cross);
        push_row("p_round_trip", x, "", in_a ? stats.round_trip_a(x) : stats.round_trip_b(x),
                 events.cross_return);
    }

    const std::vector<std::string> header = {"quantity", "x", "y", "exact", "mean", "ci_half_width",
                                             "z",        "verdict"};
    std::string text;
    if (csv) {
        std::string s = "quantity,x,y,exact,mean,ci_half_width,z,verdict\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) s += ',';
                s += row[c];
            }
            s += '\n';
        }
        text = std::move(s);
    } else {
        text = render_table(header, rows, 3);
    }
    emit(text, args.output);
    if (any_inconsistent) {
        std::cerr << "error:compare-inconsistent:some estimates disagree with exact values at z="
                  << wb::format_g17(args.z) << "\n";
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string family;
    std::string output;
    // path
    int n = 5;
    double p_right = 0.5;
    std::vector<int> class_a, class_b, class_c;
    bool absorbing_ends = false;
    // grid
    int width = 11, height = 11;
    double laziness = 0.2;
    int inner_radius = 2, outer_radius = 4;
    int gap = 1;
    // random
    std::uint64_t seed = 0;
    double sparsity = 0.5;
    double frac_a = 0.3, frac_b = 0.4, frac_c = 0.3;
};

int do_generate(const GenerateArgs& args) {
    wb::Generated doc = [&]() -> wb::Generated {
        if (args.family == "triad") return wb::triad();
        if (args.family == "path") {
            return wb::path_chain(args.n, args.p_right, args.class_a, args.class_b, args.class_c,
                                  !args.absorbing_ends);
        }
        wb::GridSpec spec;
        spec.width = args.width;
        spec.height = args.height;
        spec.laziness = args.laziness;
        spec.inner_radius = args.inner_radius;
        spec.outer_radius = args.outer_radius;
        if (args.family == "grid-annulus") return wb::grid_annulus(spec);
        if (args.family == "punctured-annulus") return wb::punctured_annulus(spec, args.gap);
        if (args.family == "random") {
            return wb::random_chain(args.n, args.seed, args.sparsity,
                                    wb::ClassFractions{args.frac_a, args.frac_b, args.frac_c});
        }
        throw wb::InvalidArgumentError("unknown family '" + args.family + "'");
    }();
    emit(wb::document_to_json(doc.chain, doc.partition), args.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Green's functions, hitting times, and excursion bounds for tripartitioned random walks"};
    app.require_subcommand(1);

    ValidateArgs validate_args;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a chain document and its absorption");
    validate_cmd->add_option("--input", validate_args.input, "chain JSON document")->required();

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "Exact excursion statistics and hitting times");
    analyze_cmd->add_option("--input", analyze_args.input)->required();
    analyze_cmd->add_option("--output", analyze_args.output, "write to file instead of stdout");
    analyze_cmd->add_option("--format", analyze_args.format)->check(CLI::IsMember({"table", "csv"}));

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate every bound and report lower/exact/upper");
    bounds_cmd->add_option("--input", bounds_args.input)->required();
    bounds_cmd->add_option("--output", bounds_args.output);
    bounds_cmd->add_option("--format", bounds_args.format)->check(CLI::IsMember({"table", "csv"}));
    bounds_cmd->add_option("--report-cap", bounds_args.report_cap, "max |A|+|B| for the full report");
    bounds_cmd->add_option("--sample", bounds_args.sample, "evaluate this many uniformly sampled rows");
    bounds_cmd->add_option("--seed", bounds_args.seed, "row-sampling seed");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimates with confidence intervals");
    simulate_cmd->add_option("--input", simulate_args.input)->required();
    simulate_cmd->add_option("--output", simulate_args.output);
    simulate_cmd->add_option("--format", simulate_args.format)->check(CLI::IsMember({"table", "csv"}));
    simulate_cmd->add_option("--seed", simulate_args.seed);
    simulate_cmd->add_option("--n-paths", simulate_args.n_paths)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--cap", simulate_args.cap)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--confidence", simulate_args.confidence);
    simulate_cmd->add_option("--states", simulate_args.states, "restrict to these start states")
        ->delimiter(',');

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "Check simulation estimates against exact values");
    compare_cmd->add_option("--input", compare_args.input)->required();
    compare_cmd->add_option("--output", compare_args.output);
    compare_cmd->add_option("--format", compare_args.format)->check(CLI::IsMember({"table", "csv"}));
    compare_cmd->add_option("--seed", compare_args.seed);
    compare_cmd->add_option("--n-paths", compare_args.n_paths)->check(CLI::PositiveNumber);
    compare_cmd->add_option("--cap", compare_args.cap)->check(CLI::PositiveNumber);
    compare_cmd->add_option("--confidence", compare_args.confidence);
    compare_cmd->add_option("--z", compare_args.z, "consistency threshold in sample-sd units");

    GenerateArgs generate_args;
    auto* generate_cmd = app.add_subcommand("generate", "Emit a chain document from a built-in family");
    generate_cmd
        ->add_option("--family", generate_args.family,
                     "triad | path | grid-annulus | punctured-annulus | random")
        ->required()
        ->check(CLI::IsMember({"triad", "path", "grid-annulus", "punctured-annulus", "random"}));
    generate_cmd->add_option("--output", generate_args.output);
    generate_cmd->add_option("--n", generate_args.n, "state count (path, random)");
    generate_cmd->add_option("--p-right", generate_args.p_right, "right-step probability (path)");
    generate_cmd->add_option("--class-a", generate_args.class_a, "A indices (path)")->delimiter(',');
    generate_cmd->add_option("--class-b", generate_args.class_b, "B indices (path)")->delimiter(',');
    generate_cmd->add_option("--class-c", generate_args.class_c, "C indices (path)")->delimiter(',');
    generate_cmd->add_flag("--absorbing-ends", generate_args.absorbing_ends,
                           "endpoints keep off-edge mass instead of bouncing (path)");
    generate_cmd->add_option("--width", generate_args.width);
    generate_cmd->add_option("--height", generate_args.height);
    generate_cmd->add_option("--laziness", generate_args.laziness);
    generate_cmd->add_option("--inner-radius", generate_args.inner_radius);
    generate_cmd->add_option("--outer-radius", generate_args.outer_radius);
    generate_cmd->add_option("--gap", generate_args.gap, "corridor width (punctured-annulus)");
    generate_cmd->add_option("--seed", generate_args.seed, "generation seed (random)");
    generate_cmd->add_option("--sparsity", generate_args.sparsity, "support density (random)");
    generate_cmd->add_option("--frac-a", generate_args.frac_a);
    generate_cmd->add_option("--frac-b", generate_args.frac_b);
    generate_cmd->add_option("--frac-c", generate_args.frac_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error:usage:" << e.what() << "\n";
        return 1;
    }

    try {
        if (validate_cmd->parsed()) return do_validate(validate_args);
        if (analyze_cmd->parsed()) return do_analyze(analyze_args);
        if (bounds_cmd->parsed()) return do_bounds(bounds_args);
        if (simulate_cmd->parsed()) return do_simulate(simulate_args);
        if (compare_cmd->parsed()) return do_compare(compare_args);
        if (generate_cmd->parsed()) return do_generate(generate_args);
        std::cerr << "error:usage:no subcommand given\n";
        return 1;
    } catch (const wb::SolverError& e) {
        std::cerr << "error:" << e.kind() << ":" << e.what() << "\n";
        return 3;
    } catch (const wb::Error& e) {
        std::cerr << "error:" << e.kind() << ":" << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error:internal:" << e.what() << "\n";
        return 3;
    }
}
