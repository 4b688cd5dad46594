#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <sinnls/sinnls.hpp>

namespace {

using namespace sinnls;

enum exit_status { ok = 0, failure = 1, exhausted = 2 };

struct options
{
    std::vector<std::string> input;
    std::string format;
    std::vector<std::string> synth;
    std::string mode = "nonnegative";
    double epsilon = 0.01;
    double target_residual = 1e-6;
    std::uint64_t seed = 0;
    std::size_t max_epochs = 10000;
    bool no_restart = false;
    std::size_t batch_size = 1;
    std::string out_solution;
    std::string out_metrics;
};

synth_params parse_synth(const std::vector<std::string>& items)
{
    synth_params p;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw error(error_code::invalid_argument, "--synth expects key=value, got " + item);
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        try {
            if (key == "m") {
                p.m = std::stoul(value);
            } else if (key == "n") {
                p.n = std::stoul(value);
            } else if (key == "density") {
                p.density = std::stod(value);
            } else if (key == "cond") {
                p.cond = std::stod(value);
            } else if (key == "noise") {
                p.noise = std::stod(value);
            } else if (key == "seed") {
                p.seed = std::stoull(value);
            } else {
                throw error(error_code::invalid_argument, "unknown --synth key " + key);
            }
        } catch (const std::logic_error&) {
            throw error(error_code::invalid_argument, "bad --synth value " + item);
        }
    }
    return p;
}

std::string infer_format(const options& opt)
{
    if (!opt.format.empty()) return opt.format;
    if (opt.input.size() == 2) return "mtx";
    const auto& path = opt.input.front();
    if (path.ends_with(".mtx")) return "mtx";
    if (path.ends_with(".csv")) return "csv";
    return "libsvm";
}

dataset load(const options& opt)
{
    if (!opt.synth.empty()) return make_synthetic(parse_synth(opt.synth));
    if (opt.input.empty()) throw error(error_code::invalid_argument, "need --input or --synth");
    const auto format = infer_format(opt);
    if (format == "mtx") {
        if (opt.input.size() != 2) throw error(error_code::invalid_argument, "mtx input needs matrix and labels paths");
        return read_matrix_market(opt.input[0], opt.input[1]);
    }
    if (opt.input.size() != 1) throw error(error_code::invalid_argument, format + " input takes a single path");
    return format == "csv" ? read_dense_csv(opt.input[0]) : read_libsvm(opt.input[0]);
}

data_mode parse_mode(const std::string& mode)
{
    return mode == "general" ? data_mode::general : data_mode::nonnegative;
}

problem_instance prepare(const options& opt, const dataset& data)
{
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    const auto mode = parse_mode(opt.mode);
    auto vm = validate(data.matrix, mode);
    if (vm.removed_rows() > 0) std::cerr << "warning: removed " << vm.removed_rows() << " empty rows\n";
    auto inst = preprocess(vm, data.labels, mode);
    if (inst.n() >= 2 && inst.n() < 4) {
        std::cerr << "warning: " << inst.n() << " retained columns; the step schedule is analyzed for n >= 4\n";
    }
    return inst;
}

std::size_t epoch_units(const problem_instance& inst, std::size_t batch_size)
{
    return (inst.n() + batch_size - 1) / batch_size;
}

std::size_t iteration_budget(const options& opt, const problem_instance& inst)
{
    const auto units = epoch_units(inst, opt.batch_size);
    if (opt.max_epochs > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(units, 1)) {
        return std::numeric_limits<std::size_t>::max();
    }
    return opt.max_epochs * units;
}

solve_result run_plain(const options& opt, const problem_instance& inst)
{
    plain_options p;
    p.epsilon = opt.epsilon;
    p.seed = opt.seed;
    p.block_size = opt.batch_size;
    p.max_iters = iteration_budget(opt, inst);
    return solve_plain(inst, {}, p);
}

solve_result run_restarted(const options& opt, const problem_instance& inst)
{
    restart_config cfg;
    cfg.target_residual = opt.target_residual;
    cfg.seed = opt.seed;
    cfg.block_size = opt.batch_size;
    cfg.max_total_iters = iteration_budget(opt, inst);
    return solve_restarted(inst, {}, cfg);
}

solve_result run_base(const options& opt, const problem_instance& inst, baseline_method method)
{
    baseline_config cfg;
    cfg.method = method;
    cfg.tolerance = opt.target_residual;
    cfg.max_iters = opt.max_epochs;
    return run_baseline(inst, {}, cfg);
}

void print_summary(const solution& sol)
{
    std::cout << "f_obj=" << format_double(sol.objective) << " residual=" << format_double(sol.residual)
              << " iters=" << sol.iterations << " restarts=" << sol.restarts
              << " data_passes=" << format_double(sol.data_passes) << '\n';
}

int cmd_solve(const options& opt)
{
    const auto data = load(opt);
    const auto inst = prepare(opt, data);
    if (inst.all_dropped()) std::cout << "all columns dropped: trivial solution x = 0\n";
    const auto res = opt.no_restart ? run_plain(opt, inst) : run_restarted(opt, inst);
    if (!opt.out_solution.empty()) write_solution(res.sol, opt.out_solution);
    if (!opt.out_metrics.empty()) write_metrics(res.metrics, opt.out_metrics);
    print_summary(res.sol);
    if (res.sol.budget_exhausted) {
        std::cerr << "budget exhausted before reaching the target\n";
        return exhausted;
    }
    return ok;
}

int cmd_bench(const options& opt)
{
    const auto data = load(opt);
    const auto inst = prepare(opt, data);
    const std::vector<std::string> names{"plain", "restart", "fista", "pgd"};
    std::vector<solve_result> results(names.size());
    std::vector<std::exception_ptr> failures(names.size());
    {
        const std::vector<std::function<solve_result()>> jobs{
            [&] { return run_plain(opt, inst); },
            [&] { return run_restarted(opt, inst); },
            [&] { return run_base(opt, inst, baseline_method::fista); },
            [&] { return run_base(opt, inst, baseline_method::pgd); },
        };
        std::vector<std::jthread> workers;
        for (std::size_t s = 0; s < jobs.size(); ++s) {
            workers.emplace_back([&, s] {
                try {
                    results[s] = jobs[s]();
                } catch (...) {
                    failures[s] = std::current_exception();
                }
            });
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    const auto prefix = opt.out_metrics.empty() ? std::string("bench") : opt.out_metrics;
    struct row
    {
        std::size_t solver;
        const metrics_record* rec;
    };
    std::vector<row> combined;
    for (std::size_t s = 0; s < names.size(); ++s) {
        write_metrics(results[s].metrics, prefix + "_" + names[s] + ".csv");
        for (const auto& rec : results[s].metrics.records) combined.push_back({s, &rec});
    }
    std::stable_sort(combined.begin(), combined.end(),
        [](const row& a, const row& b) { return a.rec->data_passes < b.rec->data_passes; });
    {
        std::ofstream out(prefix + "_combined.csv");
        if (!out) throw error(error_code::io_error, "cannot write " + prefix + "_combined.csv");
        out << "solver," << metrics_header << '\n';
        for (const auto& r : combined) {
            out << names[r.solver] << ',' << r.rec->iter << ',' << format_double(r.rec->data_passes) << ','
                << format_double(r.rec->wall_s) << ',' << format_double(r.rec->objective) << ','
                << format_double(r.rec->natural_residual) << ','
                << (r.rec->event == metric_event::restart ? "restart" : "") << '\n';
        }
    }

    for (std::size_t s = 0; s < names.size(); ++s) {
        std::optional<double> reached;
        for (const auto& rec : results[s].metrics.records) {
            if (rec.natural_residual <= opt.target_residual) {
                reached = rec.data_passes;
                break;
            }
        }
        std::cout << names[s] << ": ";
        print_summary(results[s].sol);
        std::cout << "  passes_to_target="
                  << (reached ? format_double(*reached) : std::string("not reached")) << '\n';
    }
    return ok;
}

int cmd_validate(const options& opt)
{
    const auto data = load(opt);
    const auto inst = prepare(opt, data);
    std::cout << "m=" << inst.m() << " n=" << inst.original_cols() << " nnz=" << data.matrix.nnz()
              << " dropped=" << inst.dropped() << '\n';
    if (inst.all_dropped()) {
        std::cout << "all columns dropped: trivial solution x = 0\n";
        return ok;
    }
    const auto [lo, hi] = std::minmax_element(inst.lambda().begin(), inst.lambda().end());
    std::cout << "min_col_norm=" << format_double(std::sqrt(*lo)) << " max_col_norm=" << format_double(std::sqrt(*hi))
              << '\n';
    return ok;
}

void add_common(CLI::App* cmd, options& opt, bool solver)
{
    cmd->add_option("--input", opt.input, "Input file (mtx: matrix then labels)")->expected(1, 2);
    cmd->add_option("--format", opt.format, "libsvm | mtx | csv (default: by extension)")
        ->check(CLI::IsMember({"libsvm", "mtx", "csv"}));
    cmd->add_option("--synth", opt.synth, "Synthetic instance, e.g. m=50 n=100 density=0.3 cond=1e4 seed=0");
    cmd->add_option("--mode", opt.mode, "nonnegative | general")->check(CLI::IsMember({"nonnegative", "general"}));
    if (!solver) return;
    cmd->add_option("--epsilon", opt.epsilon, "Multiplicative accuracy for the plain method")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--target-residual", opt.target_residual, "Natural residual target")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", opt.seed, "Sampling seed");
    cmd->add_option("--max-epochs", opt.max_epochs, "Budget in epochs (n coordinate steps or one full pass)");
    cmd->add_option("--batch-size", opt.batch_size, "Columns per sampled block")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonnegative least squares with nonnegative data"};
    app.require_subcommand(1);
    options opt;

    auto* solve = app.add_subcommand("solve", "Solve one instance");
    add_common(solve, opt, true);
    solve->add_flag("--no-restart", opt.no_restart, "Run the plain method for horizon(n, epsilon) iterations");
    solve->add_option("--out-solution", opt.out_solution, "Solution CSV path");
    solve->add_option("--out-metrics", opt.out_metrics, "Metrics CSV path");

    auto* bench = app.add_subcommand("bench", "Compare plain, restarted, FISTA and PGD");
    add_common(bench, opt, true);
    bench->add_option("--out-metrics", opt.out_metrics, "Output prefix (default: bench)");

    auto* check = app.add_subcommand("validate", "Parse and validate without solving");
    add_common(check, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : failure;
    }

    try {
        if (solve->parsed()) return cmd_solve(opt);
        if (bench->parsed()) return cmd_bench(opt);
        return cmd_validate(opt);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
