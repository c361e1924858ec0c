#include "graspdec/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace graspdec {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Error::Code::unwritable_path, "cannot write " + path);
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_folds_csv(const std::vector<EvalResult>& results, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "combo,pair,model,pipeline,fold,n_test,accuracy,f1,precision,chance_level,class_dis\n";
  for (const EvalResult& r : results) {
    for (std::size_t f = 0; f < r.report.folds.size(); ++f) {
      const FoldMetrics& fold = r.report.folds[f];
      out << r.combo_id << ',' << pair_name(r.report.pair) << ','
          << model_kind_name(r.report.model) << ',' << pipeline_name(r.report.pipeline) << ','
          << f << ',' << fold.n_test << ',' << format_number(fold.accuracy) << ','
          << format_number(fold.f1) << ',' << format_number(fold.precision) << ','
          << format_number(r.chance) << ',' << format_number(r.class_dis) << '\n';
    }
  }
}

void write_results_csv(const std::vector<EvalResult>& results, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "combo,pair,model,pipeline,folds,n_test_total,mean_accuracy,mean_f1,mean_precision,"
         "chance_level,class_dis\n";
  for (const EvalResult& r : results) {
    int n_test = 0;
    for (const FoldMetrics& fold : r.report.folds) n_test += fold.n_test;
    out << r.combo_id << ',' << pair_name(r.report.pair) << ','
        << model_kind_name(r.report.model) << ',' << pipeline_name(r.report.pipeline) << ','
        << r.report.folds.size() << ',' << n_test << ','
        << format_number(r.report.mean_accuracy) << ',' << format_number(r.report.mean_f1) << ','
        << format_number(r.report.mean_precision) << ',' << format_number(r.chance) << ','
        << format_number(r.class_dis) << '\n';
  }
}

void write_summary_json(const std::vector<EvalResult>& results, const std::string& path) {
  nlohmann::json j;
  j["results"] = nlohmann::json::array();
  for (const EvalResult& r : results) {
    nlohmann::json folds = nlohmann::json::array();
    for (const FoldMetrics& fold : r.report.folds) {
      folds.push_back({{"accuracy", fold.accuracy},
                       {"f1", fold.f1},
                       {"precision", fold.precision},
                       {"n_test", fold.n_test}});
    }
    j["results"].push_back({{"combo", r.combo_id},
                            {"pair", pair_name(r.report.pair)},
                            {"model", model_kind_name(r.report.model)},
                            {"pipeline", pipeline_name(r.report.pipeline)},
                            {"mean_accuracy", r.report.mean_accuracy},
                            {"mean_f1", r.report.mean_f1},
                            {"mean_precision", r.report.mean_precision},
                            {"chance_level", r.chance},
                            {"class_dis", r.class_dis},
                            {"folds", folds}});
  }
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_ablation_csv(const AblationTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "combo,pair,model,mean_accuracy,class_dis,drop_vs_baseline\n";
  for (const AblationRow& row : table.rows) {
    out << row.combo_id << ',' << pair_name(row.pair) << ',' << model_kind_name(row.model) << ','
        << format_number(row.mean_accuracy) << ',' << format_number(row.class_dis) << ','
        << format_number(row.drop_vs_baseline) << '\n';
  }
}

void write_ablation_svg(const AblationTable& table, const std::string& path) {
  std::vector<int> combos;
  std::vector<PairId> pairs;
  for (const AblationRow& row : table.rows) {
    if (std::find(combos.begin(), combos.end(), row.combo_id) == combos.end()) {
      combos.push_back(row.combo_id);
    }
    if (std::find(pairs.begin(), pairs.end(), row.pair) == pairs.end()) {
      pairs.push_back(row.pair);
    }
  }
  std::sort(combos.begin(), combos.end());

  // mean accuracy per (combo, pair), averaged over models
  auto mean_acc = [&](int combo, PairId pair) {
    double sum = 0.0;
    int count = 0;
    for (const AblationRow& row : table.rows) {
      if (row.combo_id == combo && row.pair == pair) {
        sum += row.mean_accuracy;
        ++count;
      }
    }
    return count > 0 ? sum / count : 0.0;
  };

  static const char* kColors[6] = {"#4e79a7", "#f28e2b", "#59a14f",
                                   "#e15759", "#b07aa1", "#76b7b2"};
  const double bar_w = 18.0, bar_gap = 4.0, group_gap = 28.0;
  const double plot_h = 240.0, margin_left = 56.0, margin_top = 40.0, margin_bottom = 56.0;
  const double group_w = pairs.size() * (bar_w + bar_gap) + group_gap;
  const double width = margin_left + combos.size() * group_w + 150.0;
  const double height = margin_top + plot_h + margin_bottom;

  std::ofstream out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width)
      << "\" height=\"" << format_number(height) << "\" viewBox=\"0 0 " << format_number(width)
      << " " << format_number(height) << "\">\n";
  out << "  <text x=\"" << format_number(margin_left) << "\" y=\"24\" font-size=\"15\" "
         "font-family=\"sans-serif\">Mean accuracy per electrode combination</text>\n";

  for (int grid = 0; grid <= 4; ++grid) {
    const double frac = grid / 4.0;
    const double y = margin_top + plot_h * (1.0 - frac);
    out << "  <line x1=\"" << format_number(margin_left) << "\" y1=\"" << format_number(y)
        << "\" x2=\"" << format_number(width - 130.0) << "\" y2=\"" << format_number(y)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "  <text x=\"" << format_number(margin_left - 34.0) << "\" y=\""
        << format_number(y + 4.0) << "\" font-size=\"11\" font-family=\"sans-serif\">"
        << format_number(frac) << "</text>\n";
  }

  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    const double gx = margin_left + ci * group_w;
    out << "  <g class=\"combo\" data-combo=\"" << combos[ci] << "\">\n";
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      const double acc = mean_acc(combos[ci], pairs[pi]);
      const double h = plot_h * std::clamp(acc, 0.0, 1.0);
      const double x = gx + pi * (bar_w + bar_gap);
      const double y = margin_top + plot_h - h;
      out << "    <rect class=\"bar\" x=\"" << format_number(x) << "\" y=\"" << format_number(y)
          << "\" width=\"" << format_number(bar_w) << "\" height=\"" << format_number(h)
          << "\" fill=\"" << kColors[pi % 6] << "\"/>\n";
    }
    out << "    <text x=\"" << format_number(gx) << "\" y=\""
        << format_number(margin_top + plot_h + 18.0)
        << "\" font-size=\"12\" font-family=\"sans-serif\">combo " << combos[ci] << "</text>\n";
    out << "  </g>\n";
  }

  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const double y = margin_top + 16.0 * pi;
    out << "  <rect x=\"" << format_number(width - 120.0) << "\" y=\"" << format_number(y)
        << "\" width=\"12\" height=\"12\" fill=\"" << kColors[pi % 6] << "\"/>\n";
    out << "  <text x=\"" << format_number(width - 102.0) << "\" y=\"" << format_number(y + 10.0)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << pair_name(pairs[pi])
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace graspdec
