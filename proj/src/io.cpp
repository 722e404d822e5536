#include "discern/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace discern {

namespace {

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;  // physical line the row starts on (1-based)
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw InputError("failed writing " + path);
}

// RFC-4180-style reader: quoted fields with "" escapes, CRLF or LF rows,
// quoted fields may span lines. Fully blank lines are skipped.
std::vector<CsvRow> parse_csv(const std::string& path, char delimiter) {
    const std::string text = read_file(path);
    std::vector<CsvRow> rows;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content) rows.push_back({std::move(fields), row_line});
        fields.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            row_has_content = true;
        } else if (c == delimiter) {
            end_field();
            row_has_content = true;
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            // swallow the CR; the LF ends the row
        } else if (c == '\n') {
            end_row();
            ++line;
            row_line = line;
        } else {
            field += c;
            row_has_content = true;
        }
    }
    if (in_quotes)
        throw ParseError(path, row_line, fields.size() + 1, "unterminated quoted field");
    if (row_has_content || !field.empty() || !fields.empty()) end_row();
    return rows;
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !token.empty();
}

bool parse_int(const std::string& token, long long& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !token.empty();
}

// Contiguous 0-based integer ids pass through unchanged; anything else is
// mapped to ids in first-appearance order.
LabelVector normalize_labels(const std::vector<std::string>& tokens) {
    std::vector<long long> ints(tokens.size());
    bool all_int = true;
    long long max_id = -1;
    for (std::size_t i = 0; i < tokens.size() && all_int; ++i) {
        all_int = parse_int(tokens[i], ints[i]) && ints[i] >= 0;
        if (all_int) max_id = std::max(max_id, ints[i]);
    }
    if (all_int && max_id < static_cast<long long>(tokens.size())) {
        std::vector<char> seen(static_cast<std::size_t>(max_id) + 1, 0);
        for (long long v : ints) seen[static_cast<std::size_t>(v)] = 1;
        if (std::find(seen.begin(), seen.end(), 0) == seen.end()) {
            LabelVector keep(tokens.size());
            for (std::size_t i = 0; i < tokens.size(); ++i) keep[i] = static_cast<int>(ints[i]);
            return keep;
        }
    }
    std::map<std::string, int> ids;
    LabelVector labels;
    labels.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto [it, inserted] = ids.try_emplace(t, static_cast<int>(ids.size()));
        labels.push_back(it->second);
    }
    return labels;
}

}  // namespace

Dataset load_dataset(const DatasetSpec& spec) {
    if (spec.labels_path && spec.label_column)
        throw InputError("labels_path and label_column are mutually exclusive");

    const auto rows = parse_csv(spec.features_path, spec.delimiter);
    const std::size_t start = spec.has_header ? 1 : 0;
    if (rows.size() <= start) throw InputError(spec.features_path + ": no data rows");

    const std::size_t ncols = rows[start].fields.size();
    int label_col = -1;
    if (spec.label_column) {
        label_col = *spec.label_column;
        if (label_col < 0 || static_cast<std::size_t>(label_col) >= ncols)
            throw InputError("label column " + std::to_string(label_col) +
                             " out of range for " + std::to_string(ncols) + " columns");
    }
    const std::size_t d = ncols - (label_col >= 0 ? 1 : 0);
    if (d == 0) throw InputError(spec.features_path + ": no feature columns");

    Matrix features(rows.size() - start, d);
    std::vector<std::string> label_tokens;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != ncols)
            throw ParseError(spec.features_path, row.line, 1,
                             "expected " + std::to_string(ncols) + " fields, got " +
                                 std::to_string(row.fields.size()));
        std::size_t out = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (static_cast<int>(c) == label_col) {
                label_tokens.push_back(row.fields[c]);
                continue;
            }
            double value = 0.0;
            if (!parse_double(row.fields[c], value))
                throw ParseError(spec.features_path, row.line, c + 1,
                                 "not a number: '" + row.fields[c] + "'");
            if (!std::isfinite(value))
                throw DomainError(spec.features_path + ": non-finite value in data row " +
                                  std::to_string(r - start));
            features(r - start, out++) = value;
        }
    }

    std::optional<LabelVector> labels;
    if (label_col >= 0) {
        labels = normalize_labels(label_tokens);
    } else if (spec.labels_path) {
        LabelVector side = load_labels(*spec.labels_path);
        if (side.size() != features.rows())
            throw InputError("labels file has " + std::to_string(side.size()) +
                             " labels but features file has " + std::to_string(features.rows()) +
                             " rows");
        labels = std::move(side);
    }
    return {std::move(features), spec.metric, std::move(labels)};
}

LabelVector load_labels(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.empty()) throw InputError(path + ": no rows");

    std::vector<std::string> tokens;
    if (rows[0].fields == std::vector<std::string>{"index", "label"}) {
        std::vector<std::string> by_index(rows.size() - 1);
        std::vector<char> seen(rows.size() - 1, 0);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].fields.size() != 2)
                throw ParseError(path, rows[r].line, 1, "expected index,label");
            long long idx = 0;
            if (!parse_int(rows[r].fields[0], idx) || idx < 0 ||
                idx >= static_cast<long long>(by_index.size()) || seen[static_cast<std::size_t>(idx)])
                throw InputError(path + ": indices must cover 0.." +
                                 std::to_string(by_index.size() - 1) + " exactly once");
            seen[static_cast<std::size_t>(idx)] = 1;
            by_index[static_cast<std::size_t>(idx)] = rows[r].fields[1];
        }
        tokens = std::move(by_index);
    } else {
        tokens.reserve(rows.size());
        for (const auto& row : rows) {
            if (row.fields.size() != 1)
                throw ParseError(path, row.line, 1, "expected a single label per line");
            tokens.push_back(row.fields[0]);
        }
    }
    return normalize_labels(tokens);
}

bool sniff_header(const std::string& path, char delimiter) {
    const auto rows = parse_csv(path, delimiter);
    if (rows.empty()) return false;
    for (const auto& f : rows[0].fields) {
        double v = 0.0;
        if (parse_double(f, v)) return false;
    }
    return true;
}

OutputFormat format_from_string(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw InputError("unknown format '" + name + "' (expected 'csv' or 'json')");
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string json_numbers(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out + "]";
}

std::string json_ints(const std::vector<int>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(values[i]);
    }
    return out + "]";
}

std::string json_matrix(const Matrix& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) out += ", ";
        std::string row = "[";
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) row += ", ";
            row += format_double(m(i, j));
        }
        out += row + "]";
    }
    return out + "]";
}

std::string labels_csv(const LabelVector& labels) {
    std::string out = "index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    return out;
}

std::string curve_csv(const KEstimationCurve& curve) {
    std::string out = "l,R,kappa\n";
    for (std::size_t i = 0; i < curve.r_values.size(); ++i) {
        out += std::to_string(i) + "," + format_double(curve.r_values[i]) + ",";
        if (i < curve.kappa.size()) out += format_double(curve.kappa[i]);
        out += "\n";
    }
    return out;
}

}  // namespace

void save_labels_csv(const LabelVector& labels, const std::string& path) {
    write_file(path, labels_csv(labels));
}

void save_matrix_csv(const Matrix& matrix, const std::string& path) {
    std::string out;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            if (j) out += ",";
            out += format_double(matrix(i, j));
        }
        out += "\n";
    }
    write_file(path, out);
}

void save_curve_csv(const KEstimationCurve& curve, const std::string& path) {
    write_file(path, curve_csv(curve));
}

void save_result(const ClusteringResult& result, const std::string& path, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_file(path, labels_csv(result.labels));
        return;
    }
    std::string out = "{\n";
    out += "  \"labels\": " + json_ints(result.labels) + ",\n";
    out += "  \"centroids\": " + json_matrix(result.centroids.centers) + ",\n";
    if (result.centroids.source_indices)
        out += "  \"centroid_sources\": " + json_ints(*result.centroids.source_indices) + ",\n";
    out += "  \"sse_trace\": " + json_numbers(result.sse_trace) + ",\n";
    out += "  \"iterations_run\": " + std::to_string(result.iterations_run) + ",\n";
    out += std::string("  \"converged\": ") + (result.converged ? "true" : "false") + "\n";
    out += "}\n";
    write_file(path, out);
}

void save_result(const DiscernResult& result, const std::string& path, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_file(path, curve_csv(result.curve));
        return;
    }
    std::string out = "{\n";
    out += "  \"estimated_k\": " + std::to_string(result.curve.estimated_k) + ",\n";
    out += "  \"centroid_indices\": " + json_ints(result.centroid_indices) + ",\n";
    out += "  \"centroids\": " + json_matrix(result.centroids.centers) + ",\n";
    out += "  \"r_values\": " + json_numbers(result.curve.r_values) + ",\n";
    out += "  \"kappa\": " + json_numbers(result.curve.kappa) + "\n";
    out += "}\n";
    write_file(path, out);
}

void save_result(const ScanResult& result, const std::string& path, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        std::string out = "k,score\n";
        for (std::size_t i = 0; i < result.k_values.size(); ++i)
            out += std::to_string(result.k_values[i]) + "," + format_double(result.scores[i]) + "\n";
        out += "chosen," + std::to_string(result.chosen_k) + "\n";
        write_file(path, out);
        return;
    }
    std::string out = "{\n";
    out += "  \"k_values\": " + json_ints(result.k_values) + ",\n";
    out += "  \"scores\": " + json_numbers(result.scores) + ",\n";
    out += "  \"chosen_k\": " + std::to_string(result.chosen_k) + ",\n";
    out += "  \"runs_per_k\": " + std::to_string(result.runs_per_k) + ",\n";
    out += "  \"seed\": " + std::to_string(result.seed) + ",\n";
    out += std::string("  \"low_confidence\": ") + (result.low_confidence ? "true" : "false") + "\n";
    out += "}\n";
    write_file(path, out);
}

void save_result(const EvaluationReport& report, const std::string& path, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        std::string out = "silhouette,sse,ari,purity\n";
        out += format_double(report.silhouette) + "," + format_double(report.sse) + ",";
        out += (report.ari ? format_double(*report.ari) : "") + std::string(",");
        out += (report.purity ? format_double(*report.purity) : "") + std::string("\n");
        write_file(path, out);
        return;
    }
    std::string out = "{\n";
    out += "  \"silhouette\": " + format_double(report.silhouette) + ",\n";
    out += "  \"sse\": " + format_double(report.sse) + ",\n";
    out += "  \"ari\": " + (report.ari ? format_double(*report.ari) : "null") + ",\n";
    out += "  \"purity\": " + (report.purity ? format_double(*report.purity) : "null") + "\n";
    out += "}\n";
    write_file(path, out);
}

namespace {

nlohmann::json parse_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix::from_rows(j.get<std::vector<std::vector<double>>>());
}

}  // namespace

LabelVector load_labels_csv(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"index", "label"})
        throw InputError(path + ": expected an index,label header");
    return load_labels(path);
}

Matrix load_matrix_csv(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.empty()) throw InputError(path + ": no rows");
    Matrix m(rows.size(), rows[0].fields.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].fields.size() != m.cols())
            throw ParseError(path, rows[i].line, 1, "ragged row");
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!parse_double(rows[i].fields[j], m(i, j)))
                throw ParseError(path, rows[i].line, j + 1,
                                 "not a number: '" + rows[i].fields[j] + "'");
        }
    }
    return m;
}

KEstimationCurve load_curve_csv(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"l", "R", "kappa"})
        throw InputError(path + ": expected an l,R,kappa header");
    KEstimationCurve curve;
    bool any_kappa = false;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].fields.size() != 3)
            throw ParseError(path, rows[r].line, 1, "expected 3 fields");
        double value = 0.0;
        if (!parse_double(rows[r].fields[1], value))
            throw ParseError(path, rows[r].line, 2, "not a number: '" + rows[r].fields[1] + "'");
        curve.r_values.push_back(value);
        if (!rows[r].fields[2].empty()) {
            if (!parse_double(rows[r].fields[2], value))
                throw ParseError(path, rows[r].line, 3, "not a number: '" + rows[r].fields[2] + "'");
            curve.kappa.push_back(value);
            any_kappa = true;
        } else if (any_kappa) {
            throw InputError(path + ": kappa column must be all-empty or fully populated");
        }
    }
    return curve;
}

ClusteringResult load_clustering_json(const std::string& path) {
    const auto j = parse_json_file(path);
    ClusteringResult result;
    result.labels = j.at("labels").get<LabelVector>();
    result.centroids.centers = matrix_from_json(j.at("centroids"));
    if (j.contains("centroid_sources"))
        result.centroids.source_indices = j.at("centroid_sources").get<std::vector<int>>();
    result.sse_trace = j.at("sse_trace").get<std::vector<double>>();
    result.iterations_run = j.at("iterations_run").get<int>();
    result.converged = j.at("converged").get<bool>();
    return result;
}

DiscernResult load_discern_json(const std::string& path) {
    const auto j = parse_json_file(path);
    DiscernResult result;
    result.curve.estimated_k = j.at("estimated_k").get<int>();
    result.centroid_indices = j.at("centroid_indices").get<std::vector<int>>();
    result.centroids.centers = matrix_from_json(j.at("centroids"));
    result.centroids.source_indices = result.centroid_indices;
    result.curve.r_values = j.at("r_values").get<std::vector<double>>();
    result.curve.kappa = j.at("kappa").get<std::vector<double>>();
    return result;
}

ScanResult load_scan_json(const std::string& path) {
    const auto j = parse_json_file(path);
    ScanResult result;
    result.k_values = j.at("k_values").get<std::vector<int>>();
    result.scores = j.at("scores").get<std::vector<double>>();
    result.chosen_k = j.at("chosen_k").get<int>();
    result.runs_per_k = j.at("runs_per_k").get<int>();
    result.seed = j.at("seed").get<std::uint64_t>();
    result.low_confidence = j.at("low_confidence").get<bool>();
    return result;
}

ScanResult load_scan_csv(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"k", "score"})
        throw InputError(path + ": expected a k,score header");
    ScanResult result;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].fields.size() != 2)
            throw ParseError(path, rows[r].line, 1, "expected 2 fields");
        if (rows[r].fields[0] == "chosen") {
            long long chosen = 0;
            if (!parse_int(rows[r].fields[1], chosen))
                throw ParseError(path, rows[r].line, 2, "bad chosen-k record");
            result.chosen_k = static_cast<int>(chosen);
            continue;
        }
        long long k = 0;
        double score = 0.0;
        if (!parse_int(rows[r].fields[0], k))
            throw ParseError(path, rows[r].line, 1, "not an integer: '" + rows[r].fields[0] + "'");
        if (!parse_double(rows[r].fields[1], score))
            throw ParseError(path, rows[r].line, 2, "not a number: '" + rows[r].fields[1] + "'");
        result.k_values.push_back(static_cast<int>(k));
        result.scores.push_back(score);
    }
    return result;
}

EvaluationReport load_report_json(const std::string& path) {
    const auto j = parse_json_file(path);
    EvaluationReport report;
    report.silhouette = j.at("silhouette").get<double>();
    report.sse = j.at("sse").get<double>();
    if (!j.at("ari").is_null()) report.ari = j.at("ari").get<double>();
    if (!j.at("purity").is_null()) report.purity = j.at("purity").get<double>();
    return report;
}

EvaluationReport load_report_csv(const std::string& path) {
    const auto rows = parse_csv(path, ',');
    if (rows.size() != 2 ||
        rows[0].fields != std::vector<std::string>{"silhouette", "sse", "ari", "purity"})
        throw InputError(path + ": expected a silhouette,sse,ari,purity header and one row");
    const auto& f = rows[1].fields;
    if (f.size() != 4) throw ParseError(path, rows[1].line, 1, "expected 4 fields");
    EvaluationReport report;
    if (!parse_double(f[0], report.silhouette))
        throw ParseError(path, rows[1].line, 1, "not a number: '" + f[0] + "'");
    if (!parse_double(f[1], report.sse))
        throw ParseError(path, rows[1].line, 2, "not a number: '" + f[1] + "'");
    double value = 0.0;
    if (!f[2].empty()) {
        if (!parse_double(f[2], value)) throw ParseError(path, rows[1].line, 3, "not a number");
        report.ari = value;
    }
    if (!f[3].empty()) {
        if (!parse_double(f[3], value)) throw ParseError(path, rows[1].line, 4, "not a number");
        report.purity = value;
    }
    return report;
}

}  // namespace discern
