#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iqbench/evalbench.hpp"

namespace iqbench {

// One benchmarked classifier, ready to render. Rates live in [0,1], times
// are non-negative; `name` is the display name shown in the report table.
struct BenchmarkRecord {
    ModelKind kind = ModelKind::FidelityFit;
    std::string name;
    double accuracy = 0.0;
    double test_time_us_per_shot = 0.0;
    double train_time_s = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    double auc = 0.0;
    std::vector<RocPoint> roc;
    BoundaryGrid grid;
    nlohmann::json hyperparams;  // normalized values the final fit used
    nlohmann::json extra;        // tuning summaries, timing detail, provenance
};

struct ReportBundle {
    // host, build flags, standardization flag, seed, dataset facts.
    nlohmann::json environment = nlohmann::json::object();
    std::vector<BenchmarkRecord> records;
};

// Rows in the published table's order; kinds not benchmarked are skipped.
std::vector<const BenchmarkRecord*> canonical_order(const std::vector<BenchmarkRecord>& records);

// The exact report.csv header.
extern const char* const kReportCsvHeader;

// Emits into out_dir:
//   report.csv          one row per record, canonical order, floats as %.17g
//   report.md           the same table with fixed decimals, plus environment
//   roc_<model>.csv     fpr,tpr,threshold per record
//   roc_ratio.csv       TPR ratio vs the Ada Boost baseline on a fixed FPR
//                       grid (0.01..1.00 step 0.01); written when the
//                       baseline is among the records
//   grid_<model>.csv    i,q,label[,proba] boundary rasters
//   roc.svg             ROC curves + the ratio panel
//   boundaries_<model>.svg
//   records.json        the full bundle, for `report`-mode re-rendering
// Throws ConfigError on empty records before touching any file, IoError on
// write failures.
void render_report(const ReportBundle& bundle, const std::filesystem::path& out_dir);

nlohmann::json bundle_to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(const nlohmann::json& doc);

// Helper shared with the CLI: machine id for file suffixes ("rbf_svm").
std::string report_file_id(ModelKind kind);

}  // namespace iqbench
