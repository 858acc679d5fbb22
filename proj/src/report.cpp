#include "iqbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iqbench/errors.hpp"
#include "iqbench/util.hpp"

namespace iqbench {

namespace {

using nlohmann::json;

// Published table row order.
constexpr ModelKind kCanonicalOrder[] = {
    ModelKind::AdaBoost,    ModelKind::LinearSvm,    ModelKind::GaussianProcess,
    ModelKind::NaiveBayes,  ModelKind::FidelityFit,  ModelKind::RandomForest,
    ModelKind::RbfSvm,      ModelKind::NeuralNet,
};

// Series colors, one per canonical row.
const char* series_color(ModelKind kind) {
    switch (kind) {
        case ModelKind::AdaBoost: return "#1f77b4";
        case ModelKind::LinearSvm: return "#ff7f0e";
        case ModelKind::GaussianProcess: return "#2ca02c";
        case ModelKind::NaiveBayes: return "#d62728";
        case ModelKind::FidelityFit: return "#9467bd";
        case ModelKind::RandomForest: return "#8c564b";
        case ModelKind::RbfSvm: return "#e377c2";
        case ModelKind::NeuralNet: return "#7f7f7f";
    }
    return "#000000";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing " + path.string());
}

std::string csv_row(const BenchmarkRecord& r) {
    std::string row = csv_quote(r.name);
    for (const double v : {r.accuracy, r.test_time_us_per_shot, r.train_time_s, r.tpr, r.fpr,
                           r.auc}) {
        row += ',';
        row += format_double(v);
    }
    row += '\n';
    return row;
}

std::string render_report_csv(const std::vector<const BenchmarkRecord*>& rows) {
    std::string out = kReportCsvHeader;
    out += '\n';
    for (const auto* r : rows) out += csv_row(*r);
    return out;
}

std::string render_report_md(const ReportBundle& bundle,
                             const std::vector<const BenchmarkRecord*>& rows) {
    std::string md = "# Readout classifier benchmark\n\n";
    md += "Positive class is the excited state. Times are medians over repeated runs;\n";
    md += "the companion `report.csv` carries the same rows with full float precision.\n\n";

    md += "| Name | Accuracy | Test Time (\xc2\xb5s) | Train Time (s) | TPR | FPR | AUC |\n";
    md += "|---|---|---|---|---|---|---|\n";
    for (const auto* r : rows) {
        md += "| " + r->name + " | " + format_fixed(r->accuracy, 3) + " | " +
              format_fixed(r->test_time_us_per_shot, 2) + " | " +
              format_fixed(r->train_time_s, 3) + " | " + format_fixed(r->tpr, 2) + " | " +
              format_fixed(r->fpr, 2) + " | " + format_fixed(r->auc, 3) + " |\n";
    }

    md += "\n## Selected hyperparameters\n\n";
    for (const auto* r : rows)
        md += "- **" + r->name + "**: `" + r->hyperparams.dump() + "`\n";

    md += "\n## Environment\n\n";
    for (auto it = bundle.environment.begin(); it != bundle.environment.end(); ++it)
        md += "- " + it.key() + ": " + (it->is_string() ? it->get<std::string>() : it->dump()) +
              "\n";

    md += "\n## Artifacts\n\n";
    md += "- `roc.svg` — ROC curves with the TPR ratio panel (baseline: Ada Boost)\n";
    md += "- `roc_<model>.csv`, `roc_ratio.csv` — curve and ratio data\n";
    md += "- `grid_<model>.csv`, `boundaries_<model>.svg` — decision-boundary rasters\n";
    md += "- `records.json` — full bundle; re-render with the `report` subcommand\n";
    return md;
}

std::string render_roc_csv(const BenchmarkRecord& r) {
    std::string out = "fpr,tpr,threshold\n";
    for (const auto& p : r.roc)
        out += format_double(p.fpr) + "," + format_double(p.tpr) + "," +
               format_double(p.threshold) + "\n";
    return out;
}

std::string render_grid_csv(const BenchmarkRecord& r) {
    const BoundaryGrid& g = r.grid;
    const bool with_proba = !g.proba.empty();
    std::string out = with_proba ? "i,q,label,proba\n" : "i,q,label\n";
    for (std::size_t row = 0; row < g.ys.size(); ++row) {
        for (std::size_t col = 0; col < g.xs.size(); ++col) {
            const std::size_t idx = row * g.xs.size() + col;
            out += format_double(g.xs[col]) + "," + format_double(g.ys[row]) + "," +
                   std::to_string(to_int(g.labels[idx]));
            if (with_proba) out += "," + format_double(g.proba[idx]);
            out += '\n';
        }
    }
    return out;
}

std::vector<double> ratio_fpr_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 100; ++k) grid.push_back(static_cast<double>(k) / 100.0);
    return grid;
}

std::string render_ratio_csv(const std::vector<const BenchmarkRecord*>& rows,
                             const BenchmarkRecord& baseline) {
    std::string out = "fpr";
    for (const auto* r : rows) out += "," + csv_quote(r->name);
    out += '\n';
    for (const double f : ratio_fpr_grid()) {
        out += format_double(f);
        const double base = roc_interpolate_tpr(baseline.roc, f);
        for (const auto* r : rows)
            out += "," + format_double(roc_interpolate_tpr(r->roc, f) / base);
        out += '\n';
    }
    return out;
}

// --- SVG ----------------------------------------------------------------

struct PlotFrame {
    double x0, y0, w, h;       // pixel rect of the plot area
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

std::string fmt_px(double v) { return format_fixed(v, 2); }

void svg_line(std::string& svg, double x1, double y1, double x2, double y2, const char* stroke,
              double width) {
    svg += "<line x1=\"" + fmt_px(x1) + "\" y1=\"" + fmt_px(y1) + "\" x2=\"" + fmt_px(x2) +
           "\" y2=\"" + fmt_px(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           format_fixed(width, 2) + "\"/>\n";
}

void svg_text(std::string& svg, double x, double y, const std::string& text, int size,
              const char* anchor = "middle", const char* fill = "#333333") {
    svg += "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(y) + "\" font-size=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
           "\" fill=\"" + fill + "\">" + text + "</text>\n";
}

void svg_polyline(std::string& svg, const std::vector<std::pair<double, double>>& pts,
                  const char* stroke) {
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
           "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [x, y] : pts) svg += fmt_px(x) + "," + fmt_px(y) + " ";
    svg += "\"/>\n";
}

void svg_axes(std::string& svg, const PlotFrame& f, const std::string& x_label,
              const std::string& y_label, int ticks) {
    svg += "<rect x=\"" + fmt_px(f.x0) + "\" y=\"" + fmt_px(f.y0) + "\" width=\"" + fmt_px(f.w) +
           "\" height=\"" + fmt_px(f.h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (int t = 0; t <= ticks; ++t) {
        const double xv = f.xmin + (f.xmax - f.xmin) * t / ticks;
        const double yv = f.ymin + (f.ymax - f.ymin) * t / ticks;
        svg_line(svg, f.px(xv), f.y0 + f.h, f.px(xv), f.y0 + f.h + 4, "#333333", 1.0);
        svg_text(svg, f.px(xv), f.y0 + f.h + 16, format_fixed(xv, 2), 10);
        svg_line(svg, f.x0 - 4, f.py(yv), f.x0, f.py(yv), "#333333", 1.0);
        svg_text(svg, f.x0 - 8, f.py(yv) + 3, format_fixed(yv, 2), 10, "end");
    }
    svg_text(svg, f.x0 + f.w / 2, f.y0 + f.h + 32, x_label, 12);
    svg += "<text x=\"" + fmt_px(f.x0 - 38) + "\" y=\"" + fmt_px(f.y0 + f.h / 2) +
           "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\" "
           "fill=\"#333333\" transform=\"rotate(-90 " +
           fmt_px(f.x0 - 38) + " " + fmt_px(f.y0 + f.h / 2) + ")\">" + y_label + "</text>\n";
}

std::string render_roc_svg(const std::vector<const BenchmarkRecord*>& rows,
                           const BenchmarkRecord* baseline) {
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"860\" "
        "viewBox=\"0 0 760 860\">\n<rect width=\"760\" height=\"860\" fill=\"#ffffff\"/>\n";

    // top panel: ROC curves
    PlotFrame top{70, 40, 470, 330, 0.0, 1.0, 0.0, 1.0};
    svg_text(svg, top.x0 + top.w / 2, 24, "ROC curves", 14);
    svg_axes(svg, top, "false positive rate", "true positive rate", 4);
    svg_line(svg, top.px(0), top.py(0), top.px(1), top.py(1), "#bbbbbb", 1.0);
    for (const auto* r : rows) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(r->roc.size());
        for (const auto& p : r->roc) pts.emplace_back(top.px(p.fpr), top.py(p.tpr));
        svg_polyline(svg, pts, series_color(r->kind));
    }
    // legend
    double ly = 48;
    for (const auto* r : rows) {
        svg_line(svg, 560, ly - 4, 584, ly - 4, series_color(r->kind), 2.0);
        svg_text(svg, 590, ly, r->name, 11, "start");
        ly += 18;
    }

    // bottom panel: TPR ratio vs baseline
    PlotFrame bottom{70, 470, 470, 330, 0.0, 1.0, 0.0, 2.0};
    if (baseline != nullptr) {
        const auto grid = ratio_fpr_grid();
        std::vector<std::vector<double>> ratios(rows.size());
        double rmin = 1.0, rmax = 1.0;
        for (std::size_t s = 0; s < rows.size(); ++s) {
            for (const double f : grid) {
                const double base = roc_interpolate_tpr(baseline->roc, f);
                const double v = roc_interpolate_tpr(rows[s]->roc, f) / base;
                ratios[s].push_back(v);
                if (std::isfinite(v)) {
                    rmin = std::min(rmin, v);
                    rmax = std::max(rmax, v);
                }
            }
        }
        const double pad = std::max((rmax - rmin) * 0.08, 0.01);
        bottom.ymin = rmin - pad;
        bottom.ymax = rmax + pad;
        svg_text(svg, bottom.x0 + bottom.w / 2, 456, "TPR ratio vs " + baseline->name, 14);
        svg_axes(svg, bottom, "false positive rate", "TPR ratio", 4);
        svg_line(svg, bottom.px(0), bottom.py(1.0), bottom.px(1), bottom.py(1.0), "#bbbbbb",
                 1.0);
        for (std::size_t s = 0; s < rows.size(); ++s) {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t k = 0; k < grid.size(); ++k)
                if (std::isfinite(ratios[s][k]))
                    pts.emplace_back(bottom.px(grid[k]), bottom.py(ratios[s][k]));
            svg_polyline(svg, pts, series_color(rows[s]->kind));
        }
    } else {
        svg_text(svg, bottom.x0 + bottom.w / 2, 456,
                 "TPR ratio panel skipped: baseline not benchmarked", 12);
    }

    svg += "</svg>\n";
    return svg;
}

std::string render_boundary_svg(const BenchmarkRecord& r) {
    const BoundaryGrid& g = r.grid;
    const double plot = 480.0;
    PlotFrame f{60, 40, plot, plot, g.bbox.i_min, g.bbox.i_max, g.bbox.q_min, g.bbox.q_max};

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"580\" "
        "viewBox=\"0 0 600 580\">\n<rect width=\"600\" height=\"580\" fill=\"#ffffff\"/>\n";
    svg_text(svg, f.x0 + plot / 2, 24, r.name + " decision regions", 14);

    // raster cells, run-length merged along each row
    const std::size_t res = g.xs.size();
    const double cw = plot / static_cast<double>(res);
    for (std::size_t row = 0; row < res; ++row) {
        // rows sweep q upward; SVG y grows downward
        std::size_t col = 0;
        while (col < res) {
            std::size_t run = col + 1;
            const StateLabel label = g.labels[row * res + col];
            while (run < res && g.labels[row * res + run] == label) ++run;
            const char* fill = label == StateLabel::Excited ? "#fdae6b" : "#9ecae1";
            svg += "<rect x=\"" + fmt_px(f.x0 + static_cast<double>(col) * cw) + "\" y=\"" +
                   fmt_px(f.y0 + plot - static_cast<double>(row + 1) * cw) + "\" width=\"" +
                   fmt_px(static_cast<double>(run - col) * cw) + "\" height=\"" + fmt_px(cw) +
                   "\" fill=\"" + fill + "\"/>\n";
            col = run;
        }
    }
    svg_axes(svg, f, "I", "Q", 4);
    svg += "</svg>\n";
    return svg;
}

// --- bundle (de)serialization --------------------------------------------

json grid_to_json(const BoundaryGrid& g) {
    json labels = json::array();
    for (const auto l : g.labels) labels.push_back(to_int(l));
    return json{{"bbox", json::array({g.bbox.i_min, g.bbox.i_max, g.bbox.q_min, g.bbox.q_max})},
                {"resolution", g.resolution},
                {"labels", std::move(labels)},
                {"proba", g.proba}};
}

BoundaryGrid grid_from_json(const json& doc) {
    BoundaryGrid g;
    g.bbox.i_min = doc.at("bbox").at(0).get<double>();
    g.bbox.i_max = doc.at("bbox").at(1).get<double>();
    g.bbox.q_min = doc.at("bbox").at(2).get<double>();
    g.bbox.q_max = doc.at("bbox").at(3).get<double>();
    g.resolution = doc.at("resolution").get<int>();
    g.xs.resize(static_cast<std::size_t>(g.resolution));
    g.ys.resize(static_cast<std::size_t>(g.resolution));
    for (int k = 0; k < g.resolution; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(g.resolution - 1);
        g.xs[static_cast<std::size_t>(k)] = g.bbox.i_min + t * (g.bbox.i_max - g.bbox.i_min);
        g.ys[static_cast<std::size_t>(k)] = g.bbox.q_min + t * (g.bbox.q_max - g.bbox.q_min);
    }
    for (const auto& v : doc.at("labels")) g.labels.push_back(label_from_int(v.get<int>()));
    g.proba = doc.at("proba").get<std::vector<double>>();
    return g;
}

}  // namespace

const char* const kReportCsvHeader =
    "Name,Accuracy,Test Time (\xc2\xb5s),Train Time (s),TPR,FPR,AUC";

std::string report_file_id(ModelKind kind) { return kind_id(kind); }

std::vector<const BenchmarkRecord*> canonical_order(
    const std::vector<BenchmarkRecord>& records) {
    std::vector<const BenchmarkRecord*> rows;
    for (const ModelKind kind : kCanonicalOrder)
        for (const auto& r : records)
            if (r.kind == kind) rows.push_back(&r);
    return rows;
}

void render_report(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
    if (bundle.records.empty())
        throw ConfigError("render_report: no benchmark records to render");
    // Per-model artifacts are keyed by kind id, so duplicates would clobber
    // each other silently.
    for (std::size_t a = 0; a < bundle.records.size(); ++a)
        for (std::size_t b = a + 1; b < bundle.records.size(); ++b)
            if (bundle.records[a].kind == bundle.records[b].kind)
                throw ConfigError("render_report: duplicate records for model '" +
                                  kind_id(bundle.records[a].kind) + "'");
    const auto rows = canonical_order(bundle.records);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    const BenchmarkRecord* baseline = nullptr;
    for (const auto* r : rows)
        if (r->kind == ModelKind::AdaBoost) baseline = r;

    write_file(out_dir / "report.csv", render_report_csv(rows));
    write_file(out_dir / "report.md", render_report_md(bundle, rows));
    for (const auto* r : rows) {
        write_file(out_dir / ("roc_" + report_file_id(r->kind) + ".csv"), render_roc_csv(*r));
        write_file(out_dir / ("grid_" + report_file_id(r->kind) + ".csv"),
                   render_grid_csv(*r));
        write_file(out_dir / ("boundaries_" + report_file_id(r->kind) + ".svg"),
                   render_boundary_svg(*r));
    }
    if (baseline != nullptr)
        write_file(out_dir / "roc_ratio.csv", render_ratio_csv(rows, *baseline));
    write_file(out_dir / "roc.svg", render_roc_svg(rows, baseline));
    write_file(out_dir / "records.json", bundle_to_json(bundle).dump(2) + "\n");
}

nlohmann::json bundle_to_json(const ReportBundle& bundle) {
    json records = json::array();
    for (const auto& r : bundle.records) {
        json roc = json::array();
        for (const auto& p : r.roc) {
            // JSON has no infinity literal; the +inf sentinel crosses as null.
            json t;
            if (std::isfinite(p.threshold)) t = p.threshold;
            roc.push_back(json::array({p.fpr, p.tpr, std::move(t)}));
        }
        records.push_back(json{{"kind", kind_id(r.kind)},
                               {"name", r.name},
                               {"accuracy", r.accuracy},
                               {"test_time_us_per_shot", r.test_time_us_per_shot},
                               {"train_time_s", r.train_time_s},
                               {"tpr", r.tpr},
                               {"fpr", r.fpr},
                               {"auc", r.auc},
                               {"roc", std::move(roc)},
                               {"grid", grid_to_json(r.grid)},
                               {"hyperparams", r.hyperparams},
                               {"extra", r.extra}});
    }
    return json{{"format_version", 1},
                {"environment", bundle.environment},
                {"records", std::move(records)}};
}

ReportBundle bundle_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format_version", 0) != 1)
        throw ConfigError("records document is not a format_version 1 bundle");
    ReportBundle bundle;
    bundle.environment = doc.at("environment");
    for (const auto& rj : doc.at("records")) {
        BenchmarkRecord r;
        r.kind = kind_from_id(rj.at("kind").get<std::string>());
        r.name = rj.at("name").get<std::string>();
        r.accuracy = rj.at("accuracy").get<double>();
        r.test_time_us_per_shot = rj.at("test_time_us_per_shot").get<double>();
        r.train_time_s = rj.at("train_time_s").get<double>();
        r.tpr = rj.at("tpr").get<double>();
        r.fpr = rj.at("fpr").get<double>();
        r.auc = rj.at("auc").get<double>();
        for (const auto& p : rj.at("roc"))
            // JSON has no infinity literal; the +inf threshold sentinel
            // round-trips through null
            r.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                             p.at(2).is_null() ? std::numeric_limits<double>::infinity()
                                               : p.at(2).get<double>()});
        r.grid = grid_from_json(rj.at("grid"));
        r.hyperparams = rj.at("hyperparams");
        r.extra = rj.at("extra");
        bundle.records.push_back(std::move(r));
    }
    return bundle;
}

}  // namespace iqbench
