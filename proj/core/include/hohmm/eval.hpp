#ifndef HOHMM_EVAL_HPP
#define HOHMM_EVAL_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hohmm {

struct ScoreSet {
  std::vector<double> genuine;   // llr of target trials
  std::vector<double> imposter;  // llr of non-target trials
};

void validate_score_set(const ScoreSet& scores);

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;  // fraction of imposter scores >= threshold
  double frr = 0.0;  // fraction of genuine scores < threshold
};

// Thresholds are the sorted distinct scores plus sentinels below the
// minimum and above the maximum; far is non-increasing and frr
// non-decreasing along the sweep.
std::vector<DetPoint> sweep(const ScoreSet& scores);

struct EerResult {
  double eer = 0.0;
  double threshold_at_eer = 0.0;
};

// Linear interpolation between the sweep points bracketing the far/frr
// crossing.
EerResult compute_eer(const ScoreSet& scores);

// Inverse standard-normal CDF.
double probit(double p);

// Sweep points mapped to normal-deviate scale; rates of exactly 0 or 1 are
// clamped to [1/(2n), 1 - 1/(2n)] first, n being the relevant trial count.
std::vector<std::pair<double, double>> det_points(const ScoreSet& scores);

struct TTestResult {
  double t_value = 0.0;
  double mean1 = 0.0;
  double mean2 = 0.0;
  double sd_pooled = 0.0;
  bool significant_at_0_05 = false;
};

inline constexpr double kTCritical005 = 1.645;  // one-sided, 0.05 level

// t = (mean1 - mean2) / sqrt((SD1^2 + SD2^2) / 2), sample standard
// deviations with the n-1 denominator; samples must have equal size n >= 2.
TTestResult t_test(const std::vector<double>& sample1, const std::vector<double>& sample2);

struct LabeledEer {
  std::string label;
  EerResult result;
};

struct LabeledTTest {
  std::string label;
  TTestResult result;
};

// JSON report plus a plain-text table next to it (same path with a .txt
// extension).
void emit_report(const std::vector<LabeledEer>& results, const std::vector<LabeledTTest>& ttests,
                 const std::filesystem::path& out_json);

std::string format_report_table(const std::vector<LabeledEer>& results,
                               const std::vector<LabeledTTest>& ttests);

struct DetCsvRow {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct DetCurve {
  std::string label;
  std::vector<DetCsvRow> rows;
};

DetCurve build_det_curve(const std::string& label, const ScoreSet& scores);

// CSV columns `label,threshold,far,frr,x,y` and an SVG with one polyline
// per classifier on probit axes.
void emit_det(const std::vector<DetCurve>& curves, const std::filesystem::path& out_csv,
              const std::filesystem::path& out_svg);

std::vector<DetCurve> load_det_csv(const std::filesystem::path& path);

}  // namespace hohmm

#endif
