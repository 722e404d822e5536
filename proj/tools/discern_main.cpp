// discern: deterministic clustering toolkit.
//
// Subcommands: estimate-k, cluster, compare, curve, eval. All outputs are
// byte-reproducible for fixed inputs and seeds. Exit codes: 0 success,
// 2 input error, 3 numeric domain error. DISCERN_THREADS caps the worker
// count (default: hardware concurrency).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discern/discern.hpp"
#include "discern/io.hpp"
#include "discern/kestimate.hpp"
#include "discern/kmeans.hpp"
#include "discern/metrics.hpp"
#include "discern/parallel.hpp"
#include "discern/rng.hpp"

namespace {

using namespace discern;

struct DatasetArgs {
    std::string data;
    std::string labels;
    int label_column = -1;
    std::string metric = "euclidean";
    std::string delimiter = ",";
    bool force_header = false;
    bool force_no_header = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetArgs& args) {
    cmd->add_option("--data", args.data, "feature CSV")->required();
    cmd->add_option("--labels", args.labels, "ground-truth labels file");
    cmd->add_option("--label-column", args.label_column,
                    "0-based column of --data holding the ground truth");
    cmd->add_option("--metric", args.metric, "euclidean or cosine")
        ->default_str("euclidean");
    cmd->add_option("--delimiter", args.delimiter, "field delimiter")->default_str(",");
    cmd->add_flag("--header", args.force_header, "treat the first row as a header");
    cmd->add_flag("--no-header", args.force_no_header, "treat the first row as data");
}

Dataset load_from_args(const DatasetArgs& args) {
    if (args.delimiter.size() != 1) throw InputError("--delimiter must be a single character");
    if (args.force_header && args.force_no_header)
        throw InputError("--header and --no-header are mutually exclusive");

    DatasetSpec spec;
    spec.features_path = args.data;
    if (!args.labels.empty()) spec.labels_path = args.labels;
    if (args.label_column >= 0) spec.label_column = args.label_column;
    spec.delimiter = args.delimiter[0];
    spec.metric = metric_from_string(args.metric);
    spec.has_header = args.force_header ||
                      (!args.force_no_header && sniff_header(args.data, spec.delimiter));
    return load_dataset(spec);
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

std::string three_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void print_report(const EvaluationReport& report) {
    std::cout << "silhouette: " << three_decimals(report.silhouette) << "\n";
    std::cout << "sse: " << three_decimals(report.sse) << "\n";
    if (report.ari) std::cout << "ari: " << three_decimals(*report.ari) << "\n";
    if (report.purity) std::cout << "purity: " << three_decimals(*report.purity) << "\n";
}

// ---- estimate-k ------------------------------------------------------------

struct EstimateArgs {
    DatasetArgs dataset;
    std::string method = "discern";
    int k_min = 2;
    int k_max = -1;
    int runs_per_k = 10;
    std::uint64_t seed = 0;
    bool full_range = false;
    std::string out_dir = ".";
};

int run_estimate(const EstimateArgs& args) {
    const Dataset data = load_from_args(args.dataset);
    const int n = static_cast<int>(data.size());

    if (args.method == "discern") {
        DiscernOptions options;
        if (args.k_max > 0) options.k_max = args.k_max;
        const DiscernResult result = discern_init(data, options);
        save_curve_csv(result.curve, out_path(args.out_dir, "curve.csv"));
        std::cout << result.curve.estimated_k << "\n";
        return 0;
    }

    const int k_hi = args.k_max > 0 ? args.k_max
                                    : (args.full_range ? n - 1 : default_k_hi(data.size()));
    ScanResult scan;
    std::string file;
    if (args.method == "elbow") {
        scan = elbow_scan(data, args.k_min, k_hi, args.runs_per_k, args.seed);
        file = "elbow_scan.csv";
    } else if (args.method == "silhouette") {
        scan = silhouette_scan(data, args.k_min, k_hi, args.runs_per_k, args.seed);
        file = "silhouette_scan.csv";
    } else {
        throw InputError("unknown method '" + args.method +
                         "' (expected discern, elbow or silhouette)");
    }
    save_result(scan, out_path(args.out_dir, file), OutputFormat::Csv);
    std::cout << scan.chosen_k << "\n";
    return 0;
}

// ---- cluster ---------------------------------------------------------------

struct ClusterArgs {
    DatasetArgs dataset;
    std::string init = "discern";
    int k = 0;
    bool estimate = false;
    std::uint64_t seed = 0;
    int max_iter = 300;
    double tol = 0.0;
    std::string out_dir = ".";
    std::string format = "csv";
};

CentroidSet initial_centroids(const Dataset& data, const std::string& init, int k,
                              std::uint64_t seed) {
    if (init == "discern") {
        DiscernOptions options;
        options.fixed_k = k;
        return discern_init(data, options).centroids;
    }
    if (init == "pp") return kmeanspp_init(data, k, seed);
    if (init == "random") return random_init(data, k, seed);
    throw InputError("unknown init '" + init + "' (expected discern, pp or random)");
}

int run_cluster(const ClusterArgs& args) {
    if (args.estimate == (args.k != 0))
        throw InputError("exactly one of --k or --estimate is required");
    const Dataset data = load_from_args(args.dataset);

    int k = args.k;
    if (args.estimate) {
        k = discern_init(data).curve.estimated_k;
    } else if (k < 2) {
        throw InputError("k must be ≥ 2");
    }

    KMeansConfig config;
    config.k = k;
    config.max_iterations = args.max_iter;
    config.metric = data.metric();
    config.init = InitMethod::Provided;
    config.provided_centroids = initial_centroids(data, args.init, k, args.seed);
    config.convergence_tol = args.tol;
    const ClusteringResult result = kmeans_run(data, config);
    const EvaluationReport report = evaluate(data, result.labels, result.centroids, data.labels());

    const OutputFormat format = format_from_string(args.format);
    const std::string labels_file = out_path(args.out_dir, "labels.csv");
    const std::string centroids_file = out_path(args.out_dir, "centroids.csv");
    const std::string report_file =
        out_path(args.out_dir, format == OutputFormat::Csv ? "report.csv" : "report.json");
    save_labels_csv(result.labels, labels_file);
    save_matrix_csv(result.centroids.centers, centroids_file);
    save_result(report, report_file, format);

    std::cout << "k: " << k << "\n";
    std::cout << "iterations: " << result.iterations_run << "\n";
    std::cout << "converged: " << (result.converged ? "yes" : "no") << "\n";
    print_report(report);
    std::cerr << "wrote " << labels_file << " " << centroids_file << " " << report_file << "\n";
    return 0;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
    DatasetArgs dataset;
    std::string methods = "discern,kmeans-pp,kmeans-random";
    int k = 0;
    bool estimate = false;
    int repeats = 10;
    std::uint64_t seed = 0;
    int max_iter = 300;
    std::string out_dir = ".";
};

struct MethodScores {
    std::string method;
    double asc = 0.0;
    double purity = 0.0;
    double ari = 0.0;
};

MethodScores score_once(const Dataset& data, const std::string& method, const CentroidSet& init,
                        int k, int max_iter) {
    KMeansConfig config;
    config.k = k;
    config.max_iterations = max_iter;
    config.metric = data.metric();
    config.init = InitMethod::Provided;
    config.provided_centroids = init;
    const ClusteringResult result = kmeans_run(data, config);
    MethodScores scores;
    scores.method = method;
    scores.asc = silhouette_score(data, result.labels, data.metric());
    scores.purity = purity(result.labels, *data.labels());
    scores.ari = adjusted_rand_index(result.labels, *data.labels());
    return scores;
}

int run_compare(const CompareArgs& args) {
    if (args.k != 0 && args.estimate)
        throw InputError("--k and --estimate are mutually exclusive");
    if (args.repeats < 1) throw InputError("--repeats must be at least 1");
    const Dataset data = load_from_args(args.dataset);
    if (!data.labels())
        throw InputError("compare needs ground truth (--labels or --label-column)");

    int k = 0;
    std::string k_source;
    if (args.estimate) {
        k = discern_init(data).curve.estimated_k;
        k_source = "discern estimate";
    } else if (args.k != 0) {
        if (args.k < 2) throw InputError("k must be ≥ 2");
        k = args.k;
        k_source = "requested";
    } else {
        k = data.num_classes();
        k_source = "true k";
        if (k < 2) throw InputError("ground truth has fewer than 2 classes; pass --k");
    }

    std::vector<std::string> methods;
    for (std::size_t pos = 0; pos < args.methods.size();) {
        const std::size_t comma = args.methods.find(',', pos);
        const std::size_t end = comma == std::string::npos ? args.methods.size() : comma;
        if (end > pos) methods.push_back(args.methods.substr(pos, end - pos));
        pos = end + 1;
    }
    if (methods.empty()) throw InputError("--methods is empty");

    std::vector<MethodScores> table;
    for (const auto& method : methods) {
        if (method == "discern") {
            DiscernOptions options;
            options.fixed_k = k;
            table.push_back(
                score_once(data, method, discern_init(data, options).centroids, k, args.max_iter));
        } else if (method == "kmeans-pp" || method == "kmeans-random") {
            const std::uint64_t tag = method == "kmeans-pp" ? 1 : 2;
            const auto repeats = static_cast<std::size_t>(args.repeats);
            std::vector<MethodScores> runs(repeats);
            parallel_for(0, repeats, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t r = lo; r < hi; ++r) {
                    const std::uint64_t run_seed = rng::derive_seed(args.seed, tag, r);
                    const CentroidSet init = tag == 1 ? kmeanspp_init(data, k, run_seed)
                                                      : random_init(data, k, run_seed);
                    runs[r] = score_once(data, method, init, k, args.max_iter);
                }
            });
            MethodScores mean;
            mean.method = method;
            for (const auto& r : runs) {
                mean.asc += r.asc;
                mean.purity += r.purity;
                mean.ari += r.ari;
            }
            mean.asc /= static_cast<double>(repeats);
            mean.purity /= static_cast<double>(repeats);
            mean.ari /= static_cast<double>(repeats);
            table.push_back(mean);
        } else {
            throw InputError("unknown method '" + method +
                             "' (expected discern, kmeans-pp or kmeans-random)");
        }
    }

    std::string csv = "method,asc,purity,ari\n";
    for (const auto& row : table)
        csv += row.method + "," + format_double(row.asc) + "," + format_double(row.purity) + "," +
               format_double(row.ari) + "\n";
    const std::string csv_file = out_path(args.out_dir, "compare.csv");
    {
        std::ofstream out(csv_file, std::ios::binary);
        if (!out) throw InputError("cannot open " + csv_file + " for writing");
        out << csv;
    }

    std::cout << "k: " << k << " (" << k_source << ")\n";
    std::cout << "repeats: " << args.repeats << "\n";
    std::size_t width = 6;
    for (const auto& row : table) width = std::max(width, row.method.size());
    std::printf("%-*s  %6s  %6s  %6s\n", static_cast<int>(width), "method", "asc", "purity", "ari");
    for (const auto& row : table)
        std::printf("%-*s  %6.3f  %6.3f  %6.3f\n", static_cast<int>(width), row.method.c_str(),
                    row.asc, row.purity, row.ari);
    std::cerr << "wrote " << csv_file << "\n";
    return 0;
}

// ---- curve -----------------------------------------------------------------

struct CurveArgs {
    DatasetArgs dataset;
    int k_max = -1;
    std::string out_dir = ".";
};

int run_curve(const CurveArgs& args) {
    const Dataset data = load_from_args(args.dataset);
    DiscernOptions options;
    if (args.k_max > 0) options.k_max = args.k_max;
    const DiscernResult result = discern_init(data, options);
    const std::string file = out_path(args.out_dir, "curve.csv");
    save_curve_csv(result.curve, file);
    std::cerr << "wrote " << file << "\n";
    return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    DatasetArgs dataset;
    std::string pred;
    std::string out_dir = ".";
    std::string format = "csv";
};

int run_eval(const EvalArgs& args) {
    const Dataset data = load_from_args(args.dataset);
    const LabelVector pred = load_labels(args.pred);
    if (pred.size() != data.size())
        throw InputError("prediction file has " + std::to_string(pred.size()) +
                         " labels but the dataset has " + std::to_string(data.size()) + " rows");
    int k = 0;
    for (int c : pred) k = std::max(k, c + 1);
    const CentroidSet centers = update_centroids(data, pred, k, data.metric());
    const EvaluationReport report = evaluate(data, pred, centers, data.labels());

    const OutputFormat format = format_from_string(args.format);
    const std::string file =
        out_path(args.out_dir, format == OutputFormat::Csv ? "report.csv" : "report.json");
    save_result(report, file, format);
    print_report(report);
    std::cerr << "wrote " << file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic clustering toolkit"};
    app.require_subcommand(1);

    EstimateArgs estimate;
    auto* cmd_estimate = app.add_subcommand("estimate-k", "estimate the number of clusters");
    add_dataset_flags(cmd_estimate, estimate.dataset);
    cmd_estimate->add_option("--method", estimate.method, "discern, elbow or silhouette")
        ->default_str("discern");
    cmd_estimate->add_option("--k-min", estimate.k_min, "scan floor (elbow/silhouette)");
    cmd_estimate->add_option("--k-max", estimate.k_max, "scan ceiling");
    cmd_estimate->add_option("--runs-per-k", estimate.runs_per_k, "restarts per k in scans");
    cmd_estimate->add_option("--seed", estimate.seed, "base seed for scans");
    cmd_estimate->add_flag("--full-range", estimate.full_range, "scan up to k = n-1");
    cmd_estimate->add_option("--out-dir", estimate.out_dir, "where to write curve files");

    ClusterArgs cluster;
    auto* cmd_cluster = app.add_subcommand("cluster", "cluster a dataset");
    add_dataset_flags(cmd_cluster, cluster.dataset);
    cmd_cluster->add_option("--init", cluster.init, "discern, pp or random")
        ->default_str("discern");
    cmd_cluster->add_option("--k", cluster.k, "number of clusters");
    cmd_cluster->add_flag("--estimate", cluster.estimate, "let discern pick k");
    cmd_cluster->add_option("--seed", cluster.seed, "seed for pp/random init");
    cmd_cluster->add_option("--max-iter", cluster.max_iter, "iteration cap");
    cmd_cluster->add_option("--tol", cluster.tol, "relative SSE stop threshold");
    cmd_cluster->add_option("--out-dir", cluster.out_dir, "where to write result files");
    cmd_cluster->add_option("--format", cluster.format, "report format: csv or json");

    CompareArgs compare;
    auto* cmd_compare = app.add_subcommand("compare", "compare init methods against ground truth");
    add_dataset_flags(cmd_compare, compare.dataset);
    cmd_compare->add_option("--methods", compare.methods, "comma list of methods");
    cmd_compare->add_option("--k", compare.k, "fixed k (default: ground-truth class count)");
    cmd_compare->add_flag("--estimate", compare.estimate, "use the discern estimate for k");
    cmd_compare->add_option("--repeats", compare.repeats, "runs per stochastic method");
    cmd_compare->add_option("--seed", compare.seed, "base seed");
    cmd_compare->add_option("--max-iter", compare.max_iter, "iteration cap");
    cmd_compare->add_option("--out-dir", compare.out_dir, "where to write compare.csv");

    CurveArgs curve;
    auto* cmd_curve = app.add_subcommand("curve", "emit the selection/curvature trace");
    add_dataset_flags(cmd_curve, curve.dataset);
    cmd_curve->add_option("--k-max", curve.k_max, "sweep cap");
    cmd_curve->add_option("--out-dir", curve.out_dir, "where to write curve.csv");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "score an existing labeling");
    add_dataset_flags(cmd_eval, eval.dataset);
    cmd_eval->add_option("--pred", eval.pred, "predicted labels file")->required();
    cmd_eval->add_option("--out-dir", eval.out_dir, "where to write the report");
    cmd_eval->add_option("--format", eval.format, "report format: csv or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_estimate->parsed()) return run_estimate(estimate);
        if (cmd_cluster->parsed()) return run_cluster(cluster);
        if (cmd_compare->parsed()) return run_compare(compare);
        if (cmd_curve->parsed()) return run_curve(curve);
        if (cmd_eval->parsed()) return run_eval(eval);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
