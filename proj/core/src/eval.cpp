#include "hohmm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hohmm/io_util.hpp"

namespace hohmm {

void validate_score_set(const ScoreSet& scores) {
  if (scores.genuine.empty() || scores.imposter.empty())
    throw std::invalid_argument("score set: both genuine and imposter scores are required");
  for (double s : scores.genuine)
    if (!std::isfinite(s)) throw std::invalid_argument("score set: non-finite genuine score");
  for (double s : scores.imposter)
    if (!std::isfinite(s)) throw std::invalid_argument("score set: non-finite imposter score");
}

namespace {

DetPoint rates_at(const ScoreSet& scores, double threshold) {
  std::size_t false_accepts = 0;
  for (double s : scores.imposter)
    if (s >= threshold) ++false_accepts;
  std::size_t false_rejects = 0;
  for (double s : scores.genuine)
    if (s < threshold) ++false_rejects;
  DetPoint p;
  p.threshold = threshold;
  p.far = static_cast<double>(false_accepts) / static_cast<double>(scores.imposter.size());
  p.frr = static_cast<double>(false_rejects) / static_cast<double>(scores.genuine.size());
  return p;
}

}  // namespace

std::vector<DetPoint> sweep(const ScoreSet& scores) {
  validate_score_set(scores);
  std::set<double> distinct(scores.genuine.begin(), scores.genuine.end());
  distinct.insert(scores.imposter.begin(), scores.imposter.end());

  std::vector<double> thresholds;
  thresholds.reserve(distinct.size() + 2);
  thresholds.push_back(*distinct.begin() - 1.0);
  thresholds.insert(thresholds.end(), distinct.begin(), distinct.end());
  thresholds.push_back(*distinct.rbegin() + 1.0);

  std::vector<DetPoint> points;
  points.reserve(thresholds.size());
  for (double t : thresholds) points.push_back(rates_at(scores, t));
  return points;
}

EerResult compute_eer(const ScoreSet& scores) {
  const std::vector<DetPoint> points = sweep(scores);
  // far - frr starts at -... no: below the minimum, far = 1 and frr = 0, so
  // the difference starts positive and ends negative; find the sign change.
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double d0 = points[i].far - points[i].frr;
    const double d1 = points[i + 1].far - points[i + 1].frr;
    if (d0 == 0.0) {
      return {(points[i].far + points[i].frr) / 2.0, points[i].threshold};
    }
    if (d0 > 0.0 && d1 <= 0.0) {
      if (d1 == 0.0)
        return {(points[i + 1].far + points[i + 1].frr) / 2.0, points[i + 1].threshold};
      const double lambda = d0 / (d0 - d1);
      const double eer = points[i].far + lambda * (points[i + 1].far - points[i].far);
      const double threshold =
          points[i].threshold + lambda * (points[i + 1].threshold - points[i].threshold);
      return {eer, threshold};
    }
  }
  throw std::logic_error("compute_eer: no far/frr crossing found");
}

// Acklam's rational approximation to the inverse normal CDF, relative
// error below 1.2e-9 across (0, 1).
double probit(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("probit: p must be in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

namespace {

double clamped_probit(double rate, std::size_t n) {
  const double lo = 1.0 / (2.0 * static_cast<double>(n));
  const double clamped = std::clamp(rate, lo, 1.0 - lo);
  return probit(clamped);
}

}  // namespace

std::vector<std::pair<double, double>> det_points(const ScoreSet& scores) {
  const std::vector<DetPoint> points = sweep(scores);
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  for (const DetPoint& p : points)
    out.emplace_back(clamped_probit(p.far, scores.imposter.size()),
                     clamped_probit(p.frr, scores.genuine.size()));
  return out;
}

TTestResult t_test(const std::vector<double>& sample1, const std::vector<double>& sample2) {
  if (sample1.size() != sample2.size())
    throw std::invalid_argument("t_test: samples must have the same size");
  const std::size_t n = sample1.size();
  if (n < 2) throw std::invalid_argument("t_test: need at least two values per sample");

  const auto mean = [n](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(n);
  };
  const auto sample_variance = [n](const std::vector<double>& xs, double mu) {
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return acc / static_cast<double>(n - 1);
  };

  TTestResult r;
  r.mean1 = mean(sample1);
  r.mean2 = mean(sample2);
  r.sd_pooled =
      std::sqrt((sample_variance(sample1, r.mean1) + sample_variance(sample2, r.mean2)) / 2.0);
  if (r.sd_pooled == 0.0) {
    if (r.mean1 != r.mean2)
      throw std::domain_error("t_test: zero pooled deviation with different means (infinite t)");
    r.t_value = 0.0;
  } else {
    r.t_value = (r.mean1 - r.mean2) / r.sd_pooled;
  }
  r.significant_at_0_05 = r.t_value > kTCritical005;
  return r;
}

std::string format_report_table(const std::vector<LabeledEer>& results,
                               const std::vector<LabeledTTest>& ttests) {
  std::string out;
  char buf[128];
  out += "Classifier            EER %    threshold\n";
  out += "---------------------------------------------\n";
  for (const LabeledEer& r : results) {
    std::snprintf(buf, sizeof(buf), "%-20s %6.1f    %.6g\n", r.label.c_str(),
                  100.0 * r.result.eer, r.result.threshold_at_eer);
    out += buf;
  }
  if (!ttests.empty()) {
    out += "\nt test                t value    significant (> 1.645)\n";
    out += "------------------------------------------------------\n";
    for (const LabeledTTest& t : ttests) {
      std::snprintf(buf, sizeof(buf), "%-20s %8.3f    %s\n", t.label.c_str(), t.result.t_value,
                    t.result.significant_at_0_05 ? "yes" : "no");
      out += buf;
    }
  }
  return out;
}

void emit_report(const std::vector<LabeledEer>& results, const std::vector<LabeledTTest>& ttests,
                 const std::filesystem::path& out_json) {
  if (results.empty()) throw std::invalid_argument("emit_report: no classifier results");
  for (const LabeledEer& r : results)
    if (r.label.empty()) throw std::invalid_argument("emit_report: empty classifier label");

  nlohmann::ordered_json doc;
  doc["classifiers"] = nlohmann::ordered_json::array();
  for (const LabeledEer& r : results)
    doc["classifiers"].push_back({{"label", r.label},
                                  {"eer", r.result.eer},
                                  {"threshold", r.result.threshold_at_eer}});
  doc["ttests"] = nlohmann::ordered_json::array();
  for (const LabeledTTest& t : ttests)
    doc["ttests"].push_back({{"label", t.label},
                             {"t", t.result.t_value},
                             {"critical", kTCritical005},
                             {"significant", t.result.significant_at_0_05}});

  atomic_write_file(out_json, doc.dump(2) + "\n");
  std::filesystem::path table_path = out_json;
  table_path.replace_extension(".txt");
  atomic_write_file(table_path, format_report_table(results, ttests));
}

DetCurve build_det_curve(const std::string& label, const ScoreSet& scores) {
  if (label.empty()) throw std::invalid_argument("det curve: empty classifier label");
  DetCurve curve;
  curve.label = label;
  const std::vector<DetPoint> points = sweep(scores);
  const std::vector<std::pair<double, double>> xy = det_points(scores);
  curve.rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    curve.rows.push_back(
        {points[i].threshold, points[i].far, points[i].frr, xy[i].first, xy[i].second});
  return curve;
}

namespace {

constexpr const char* kDetHeader = "label,threshold,far,frr,x,y";

// Tick marks on both DET axes, in percent.
constexpr double kDetTicks[] = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string render_det_svg(const std::vector<DetCurve>& curves) {
  const double size = 640.0;
  const double margin = 80.0;
  const double lo = probit(0.001);   // 0.1%
  const double hi = probit(0.45);    // just past the 40% tick
  const auto to_px = [&](double v) {
    const double clamped = std::clamp(v, lo, hi);
    return margin + (clamped - lo) / (hi - lo) * (size - 2.0 * margin);
  };
  const auto x_px = [&](double v) { return to_px(v); };
  const auto y_px = [&](double v) { return size - to_px(v); };

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                size, size, size, size);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (double tick : kDetTicks) {
    const double v = probit(tick / 100.0);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                  x_px(v), y_px(hi), x_px(v), y_px(lo));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                  x_px(lo), y_px(v), x_px(hi), y_px(v));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">%g</text>\n",
                  x_px(v), size - margin + 18.0, tick);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">%g</text>\n",
                  margin - 8.0, y_px(v) + 4.0, tick);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                margin, margin, size - 2.0 * margin, size - 2.0 * margin);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" text-anchor=\"middle\">"
                "false acceptance rate (%%)</text>\n",
                size / 2.0, size - margin + 44.0);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 %.1f %.1f)\">false rejection rate (%%)</text>\n",
                margin - 44.0, size / 2.0, margin - 44.0, size / 2.0);
  svg += buf;

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    for (const DetCsvRow& row : curves[i].rows) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_px(row.x), y_px(row.y));
      pts += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" fill=\"%s\">%s</text>\n",
                  size - margin - 140.0, margin + 20.0 + 18.0 * static_cast<double>(i), color,
                  curves[i].label.c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

void emit_det(const std::vector<DetCurve>& curves, const std::filesystem::path& out_csv,
              const std::filesystem::path& out_svg) {
  if (curves.empty()) throw std::invalid_argument("emit_det: no curves");
  for (const DetCurve& c : curves) {
    if (c.label.empty()) throw std::invalid_argument("emit_det: empty classifier label");
    if (c.rows.empty()) throw std::invalid_argument("emit_det: empty curve " + c.label);
    if (c.label.find(',') != std::string::npos)
      throw std::invalid_argument("emit_det: label must not contain a comma");
  }

  std::string csv(kDetHeader);
  csv.push_back('\n');
  for (const DetCurve& c : curves)
    for (const DetCsvRow& row : c.rows) {
      csv += c.label;
      csv += ',';
      csv += format_double(row.threshold);
      csv += ',';
      csv += format_double(row.far);
      csv += ',';
      csv += format_double(row.frr);
      csv += ',';
      csv += format_double(row.x);
      csv += ',';
      csv += format_double(row.y);
      csv.push_back('\n');
    }
  atomic_write_file(out_csv, csv);
  atomic_write_file(out_svg, render_det_svg(curves));
}

std::vector<DetCurve> load_det_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_text_lines(path);
  if (lines.empty() || lines[0] != kDetHeader)
    throw std::runtime_error("det csv " + path.string() + ": missing header");
  std::vector<DetCurve> curves;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string context = "det csv " + path.string() + " line " + std::to_string(i + 1);
    const std::vector<std::string> fields = split_csv_row(lines[i]);
    if (fields.size() != 6) throw std::runtime_error(context + ": expected 6 fields");
    if (curves.empty() || curves.back().label != fields[0]) {
      curves.push_back({fields[0], {}});
    }
    curves.back().rows.push_back({parse_double(fields[1], context), parse_double(fields[2], context),
                                  parse_double(fields[3], context), parse_double(fields[4], context),
                                  parse_double(fields[5], context)});
  }
  return curves;
}

}  // namespace hohmm
