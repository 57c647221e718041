#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace clfkit {

/// One classified sample.
struct PredictionRecord {
    int sample_id = 0;
    int predicted = 0;
    int actual = 0;
};

/// L x L count matrix. Orientation is fixed: rows index the predicted class,
/// columns the actual class.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<long long> counts;  // row-major, counts[p * L + a]

    int num_labels() const { return static_cast<int>(labels.size()); }

    long long& at(int predicted, int actual) {
        return counts[static_cast<std::size_t>(predicted) * labels.size() + actual];
    }
    long long at(int predicted, int actual) const {
        return counts[static_cast<std::size_t>(predicted) * labels.size() + actual];
    }

    long long total() const {
        long long s = 0;
        for (const long long c : counts) s += c;
        return s;
    }
    long long diagonal_sum() const {
        long long s = 0;
        for (int i = 0; i < num_labels(); ++i) s += at(i, i);
        return s;
    }
    long long row_sum(int p) const {
        long long s = 0;
        for (int a = 0; a < num_labels(); ++a) s += at(p, a);
        return s;
    }
    long long col_sum(int a) const {
        long long s = 0;
        for (int p = 0; p < num_labels(); ++p) s += at(p, a);
        return s;
    }

    void validate() const {
        if (labels.empty()) {
            throw std::invalid_argument("ConfusionMatrix: needs at least one label");
        }
        if (counts.size() != labels.size() * labels.size()) {
            throw std::invalid_argument("ConfusionMatrix: counts must be L x L");
        }
        for (const long long c : counts) {
            if (c < 0) {
                throw std::invalid_argument("ConfusionMatrix: counts must be non-negative");
            }
        }
    }
};

inline ConfusionMatrix make_confusion(std::vector<std::string> labels) {
    ConfusionMatrix cm;
    cm.counts.assign(labels.size() * labels.size(), 0);
    cm.labels = std::move(labels);
    return cm;
}

inline std::vector<std::string> index_labels(int num_classes) {
    std::vector<std::string> labels;
    labels.reserve(num_classes);
    for (int i = 0; i < num_classes; ++i) {
        labels.push_back(std::to_string(i));
    }
    return labels;
}

struct PerLabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0;
    bool zero_division = false;  ///< some ratio hit 0/0 and was resolved to 0
};

struct PrfAverage {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MccResult {
    double value = 0.0;
    bool defined = true;  ///< false when the denominator vanished; value is 0
};

/// Everything the evaluation pipeline reports for one confusion matrix.
struct MetricsReport {
    std::vector<std::string> labels;
    std::vector<PerLabelMetrics> per_label;
    PrfAverage micro;
    PrfAverage macro;
    PrfAverage weighted;
    std::optional<PrfAverage> samples;  ///< present only when built from records
    double accuracy = 0.0;
    MccResult mcc;
};

namespace detail {

inline double safe_ratio(long long num, long long den, bool* hit_zero = nullptr) {
    if (den == 0) {
        if (hit_zero != nullptr && num == 0) {
            *hit_zero = true;
        }
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

inline double f1_of(double precision, double recall) {
    const double denom = precision + recall;
    return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

inline void require_nonempty(const ConfusionMatrix& cm) {
    cm.validate();
    if (cm.total() == 0) {
        throw std::invalid_argument("metrics: confusion matrix has no samples");
    }
}

}  // namespace detail

inline ConfusionMatrix confusion_from_predictions(const std::vector<PredictionRecord>& records,
                                                  int num_classes) {
    if (num_classes < 1) {
        throw std::invalid_argument("confusion_from_predictions: need at least one class");
    }
    ConfusionMatrix cm = make_confusion(index_labels(num_classes));
    for (const PredictionRecord& r : records) {
        if (r.predicted < 0 || r.predicted >= num_classes || r.actual < 0 ||
            r.actual >= num_classes) {
            throw std::invalid_argument("confusion_from_predictions: class index out of range");
        }
        ++cm.at(r.predicted, r.actual);
    }
    return cm;
}

/// Per-label precision, recall, F1 and support (actual-class count).
/// Any 0/0 ratio resolves to 0 and sets the zero_division flag.
inline std::vector<PerLabelMetrics> per_label_prf(const ConfusionMatrix& cm) {
    detail::require_nonempty(cm);
    std::vector<PerLabelMetrics> out(cm.num_labels());
    for (int l = 0; l < cm.num_labels(); ++l) {
        PerLabelMetrics& m = out[l];
        const long long tp = cm.at(l, l);
        m.support = cm.col_sum(l);
        m.precision = detail::safe_ratio(tp, cm.row_sum(l), &m.zero_division);
        m.recall = detail::safe_ratio(tp, m.support, &m.zero_division);
        m.f1 = detail::f1_of(m.precision, m.recall);
    }
    return out;
}

/// Pooled counts. For single-label data each prediction contributes one pair,
/// so precision = recall = F1 = accuracy.
inline PrfAverage micro_prf(const ConfusionMatrix& cm) {
    detail::require_nonempty(cm);
    const long long tp = cm.diagonal_sum();
    const long long total = cm.total();
    PrfAverage avg;
    avg.precision = detail::safe_ratio(tp, total);
    avg.recall = detail::safe_ratio(tp, total);
    avg.f1 = detail::f1_of(avg.precision, avg.recall);
    return avg;
}

/// Unweighted mean of the per-label metrics.
inline PrfAverage macro_prf(const ConfusionMatrix& cm) {
    const std::vector<PerLabelMetrics> per = per_label_prf(cm);
    PrfAverage avg;
    for (const PerLabelMetrics& m : per) {
        avg.precision += m.precision;
        avg.recall += m.recall;
        avg.f1 += m.f1;
    }
    const double n = static_cast<double>(per.size());
    avg.precision /= n;
    avg.recall /= n;
    avg.f1 /= n;
    return avg;
}

/// Support-weighted mean of the per-label metrics.
inline PrfAverage weighted_prf(const ConfusionMatrix& cm) {
    const std::vector<PerLabelMetrics> per = per_label_prf(cm);
    PrfAverage avg;
    long long total_support = 0;
    for (const PerLabelMetrics& m : per) {
        avg.precision += static_cast<double>(m.support) * m.precision;
        avg.recall += static_cast<double>(m.support) * m.recall;
        avg.f1 += static_cast<double>(m.support) * m.f1;
        total_support += m.support;
    }
    if (total_support == 0) {
        return PrfAverage{};
    }
    const double w = static_cast<double>(total_support);
    avg.precision /= w;
    avg.recall /= w;
    avg.f1 /= w;
    return avg;
}

/// Mean of per-sample precision/recall/F1. With one label per sample each
/// term is 1 on a match and 0 otherwise.
inline PrfAverage samples_prf(const std::vector<PredictionRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("samples_prf: no records");
    }
    std::unordered_set<int> seen;
    long long matches = 0;
    for (const PredictionRecord& r : records) {
        if (!seen.insert(r.sample_id).second) {
            throw std::invalid_argument("samples_prf: duplicate sample id " +
                                        std::to_string(r.sample_id));
        }
        if (r.predicted == r.actual) {
            ++matches;
        }
    }
    const double frac = static_cast<double>(matches) / static_cast<double>(records.size());
    return PrfAverage{frac, frac, frac};
}

inline double accuracy(const ConfusionMatrix& cm) {
    detail::require_nonempty(cm);
    return static_cast<double>(cm.diagonal_sum()) / static_cast<double>(cm.total());
}

/// Multiclass correlation between predicted and actual labels:
///   (c*s − Σ p_k t_k) / sqrt((s² − Σ p_k²)(s² − Σ t_k²))
/// with c the diagonal sum, s the total, p_k row sums and t_k column sums.
/// A vanishing denominator yields value 0 with defined = false.
inline MccResult mcc_multiclass(const ConfusionMatrix& cm) {
    detail::require_nonempty(cm);
    const double s = static_cast<double>(cm.total());
    const double c = static_cast<double>(cm.diagonal_sum());
    double pt = 0.0, pp = 0.0, tt = 0.0;
    for (int k = 0; k < cm.num_labels(); ++k) {
        const double pk = static_cast<double>(cm.row_sum(k));
        const double tk = static_cast<double>(cm.col_sum(k));
        pt += pk * tk;
        pp += pk * pk;
        tt += tk * tk;
    }
    const double denom_sq = (s * s - pp) * (s * s - tt);
    if (denom_sq <= 0.0) {
        return MccResult{0.0, false};
    }
    return MccResult{(c * s - pt) / std::sqrt(denom_sq), true};
}

/// Assembles the full report. The samples average is only computable from
/// per-record data, so it is present only when records are supplied.
inline MetricsReport report(const ConfusionMatrix& cm,
                            const std::vector<PredictionRecord>* records = nullptr) {
    detail::require_nonempty(cm);
    MetricsReport rep;
    rep.labels = cm.labels;
    rep.per_label = per_label_prf(cm);
    rep.micro = micro_prf(cm);
    rep.macro = macro_prf(cm);
    rep.weighted = weighted_prf(cm);
    if (records != nullptr) {
        rep.samples = samples_prf(*records);
    }
    rep.accuracy = accuracy(cm);
    rep.mcc = mcc_multiclass(cm);
    return rep;
}

// ---------------------------------------------------------------------------
// Confusion-matrix CSV: a header comment pinning the orientation, a label
// row, then L rows of L counts.
//
//   # rows=predicted cols=actual
//   A,B,C
//   5,0,1
//   ...
// ---------------------------------------------------------------------------

inline constexpr const char* kConfusionCsvHeader = "# rows=predicted cols=actual";

inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
    cm.validate();
    out << kConfusionCsvHeader << "\n";
    for (int a = 0; a < cm.num_labels(); ++a) {
        out << (a == 0 ? "" : ",") << cm.labels[a];
    }
    out << "\n";
    for (int p = 0; p < cm.num_labels(); ++p) {
        for (int a = 0; a < cm.num_labels(); ++a) {
            out << (a == 0 ? "" : ",") << cm.at(p, a);
        }
        out << "\n";
    }
}

inline void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_confusion_csv(out, cm);
}

namespace detail {

[[noreturn]] inline void csv_fail(int line, const std::string& what) {
    throw std::runtime_error("confusion csv, line " + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (const char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

}  // namespace detail

inline ConfusionMatrix read_confusion_csv(std::istream& in) {
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) {
        detail::csv_fail(lineno, "empty input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kConfusionCsvHeader) {
        detail::csv_fail(lineno, std::string("expected header '") + kConfusionCsvHeader + "'");
    }
    ++lineno;
    if (!std::getline(in, line)) {
        detail::csv_fail(lineno, "missing label row");
    }
    ConfusionMatrix cm;
    cm.labels = detail::split_csv_line(line);
    for (const std::string& l : cm.labels) {
        if (l.empty()) {
            detail::csv_fail(lineno, "empty label name");
        }
    }
    const int n = static_cast<int>(cm.labels.size());
    cm.counts.assign(static_cast<std::size_t>(n) * n, 0);
    for (int p = 0; p < n; ++p) {
        ++lineno;
        if (!std::getline(in, line)) {
            detail::csv_fail(lineno, "expected " + std::to_string(n) + " count rows, got " +
                                         std::to_string(p));
        }
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (static_cast<int>(fields.size()) != n) {
            detail::csv_fail(lineno, "expected " + std::to_string(n) + " fields, got " +
                                         std::to_string(fields.size()));
        }
        for (int a = 0; a < n; ++a) {
            long long value = 0;
            const char* first = fields[a].data();
            const char* last = first + fields[a].size();
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last || value < 0) {
                detail::csv_fail(lineno, "bad count '" + fields[a] + "'");
            }
            cm.at(p, a) = value;
        }
    }
    return cm;
}

inline ConfusionMatrix read_confusion_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_confusion_csv(in);
}

}  // namespace clfkit
