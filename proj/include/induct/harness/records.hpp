#pragma once

// Prediction records and the tidy CSV files written from them.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "induct/errors.hpp"
#include "induct/io.hpp"

namespace induct::harness {

struct PredictionRecord {
    std::string id;
    std::string group;  // example-set id or concept id
    int item = 0;       // test number, or trial index within the curve
    int batch = -1;     // online batch, -1 for the number domain
    double prediction = 0.0;
    std::optional<double> human;
    std::optional<bool> label;
    std::string split = "holdout";
    int fold = -1;
};

/// Round-trip text for a double.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void require_finite(const std::vector<PredictionRecord>& records) {
    for (const auto& r : records)
        if (!std::isfinite(r.prediction)) throw NonFinite("prediction for " + r.id + " is not finite");
}

inline std::string predictions_csv(const std::vector<PredictionRecord>& records) {
    require_finite(records);
    std::string out = "id,group,item,batch,prediction,human,label,split,fold\n";
    for (const auto& r : records) {
        out += io::csv_escape(r.id) + "," + io::csv_escape(r.group) + "," + std::to_string(r.item) + "," +
               std::to_string(r.batch) + "," + fmt(r.prediction) + "," + (r.human ? fmt(*r.human) : "") + "," +
               (r.label ? (*r.label ? "1" : "0") : "") + "," + r.split + "," + std::to_string(r.fold) + "\n";
    }
    return out;
}

/// Model vs human per test number, one row per (group, test number) present.
inline std::string number_bars_csv(const std::vector<PredictionRecord>& records) {
    std::map<std::pair<std::string, int>, const PredictionRecord*> rows;
    for (const auto& r : records) rows[{r.group, r.item}] = &r;
    std::string out = "group,test_number,model,human\n";
    for (const auto& [key, r] : rows)
        out += io::csv_escape(key.first) + "," + std::to_string(key.second) + "," + fmt_short(r->prediction) + "," +
               (r->human ? fmt_short(*r->human) : "") + "\n";
    return out;
}

struct BatchSummary {
    std::string group;
    int batch = 0;
    std::size_t trials = 0;
    double accuracy = 0.0;  // fraction with round(prediction) == label
    double model_mean = 0.0;
    std::optional<double> human_mean;
    std::string map_nl;
};

/// Per-batch accuracy and means for labelled online records, ordered by group then batch.
inline std::vector<BatchSummary> summarize_batches(const std::vector<PredictionRecord>& records,
                                                   const std::map<std::pair<std::string, int>, std::string>& map_nl = {}) {
    struct Acc {
        std::size_t n = 0, correct = 0, n_human = 0;
        double model = 0.0, human = 0.0;
    };
    std::map<std::pair<std::string, int>, Acc> acc;
    for (const auto& r : records) {
        if (r.batch < 0 || !r.label) continue;
        auto& a = acc[{r.group, r.batch}];
        ++a.n;
        a.correct += (r.prediction >= 0.5) == *r.label;
        a.model += r.prediction;
        if (r.human) {
            ++a.n_human;
            a.human += *r.human;
        }
    }
    std::vector<BatchSummary> out;
    for (const auto& [key, a] : acc) {
        BatchSummary s;
        s.group = key.first;
        s.batch = key.second;
        s.trials = a.n;
        s.accuracy = static_cast<double>(a.correct) / static_cast<double>(a.n);
        s.model_mean = a.model / static_cast<double>(a.n);
        if (a.n_human) s.human_mean = a.human / static_cast<double>(a.n_human);
        if (auto it = map_nl.find(key); it != map_nl.end()) s.map_nl = it->second;
        out.push_back(std::move(s));
    }
    return out;
}

inline std::string learning_curves_csv(const std::vector<BatchSummary>& rows) {
    std::string out = "group,batch,trials,accuracy,model_mean,human_mean,map_nl\n";
    for (const auto& s : rows)
        out += io::csv_escape(s.group) + "," + std::to_string(s.batch) + "," + std::to_string(s.trials) + "," +
               fmt_short(s.accuracy) + "," + fmt_short(s.model_mean) + "," +
               (s.human_mean ? fmt_short(*s.human_mean) : "") + "," + io::csv_escape(s.map_nl) + "\n";
    return out;
}

struct BudgetPoint {
    int budget = 0;
    std::vector<double> r2;  // one per seed

    double mean() const {
        double s = 0.0;
        for (double v : r2) s += v;
        return r2.empty() ? 0.0 : s / static_cast<double>(r2.size());
    }
    /// Standard error of the mean with the n - 1 sample deviation; 0 for a single run.
    double sem() const {
        if (r2.size() < 2) return 0.0;
        const double m = mean();
        double ss = 0.0;
        for (double v : r2) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(r2.size() - 1)) / std::sqrt(static_cast<double>(r2.size()));
    }
};

inline std::string budget_csv(const std::vector<BudgetPoint>& points) {
    std::string out = "budget,runs,mean_r2,sem_r2\n";
    for (const auto& p : points)
        out += std::to_string(p.budget) + "," + std::to_string(p.r2.size()) + "," + fmt_short(p.mean()) + "," +
               fmt_short(p.sem()) + "\n";
    return out;
}

/// Writes the plot tables that apply to `records` under `dir`.
inline std::vector<std::filesystem::path> emit_plot_data(const std::vector<PredictionRecord>& records,
                                                         const std::filesystem::path& dir,
                                                         const std::map<std::pair<std::string, int>, std::string>& map_nl = {}) {
    if (records.empty()) throw ConfigError("no prediction records to plot");
    std::vector<std::filesystem::path> written;
    const bool online = records.front().batch >= 0;
    if (online) {
        written.push_back(dir / "learning_curves.csv");
        io::write_text(written.back(), learning_curves_csv(summarize_batches(records, map_nl)));
    } else {
        written.push_back(dir / "number_bars.csv");
        io::write_text(written.back(), number_bars_csv(records));
    }
    return written;
}

}  // namespace induct::harness
