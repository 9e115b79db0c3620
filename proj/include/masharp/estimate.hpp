#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "masharp/hessian.hpp"
#include "masharp/problem.hpp"

namespace masharp {

/// Open interval used as an acceptance band.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
};

/// Least-squares fit of log(value) against log(distance).
struct GrowthFit {
  double exponent = 0.0;
  double band = 0.0;  ///< half-width of the 95% confidence interval of the slope
  double r2 = 0.0;
  double intercept = 0.0;
  std::vector<double> distance;
  std::vector<double> value;
};

/// Throws FitError for fewer than 6 samples, nonpositive entries, or a
/// distance spread max/min below 4.
GrowthFit fit_growth_exponent(const std::vector<double>& distance, const std::vector<double>& value);

struct ExponentCheck {
  std::string name;
  GrowthFit fit;
  double reference = std::numeric_limits<double>::quiet_NaN();  ///< predicted exponent
  std::optional<Interval> band;                                 ///< verdict band, if any
  bool pass = true;
};

/// Sup statistics per distance band.
struct BandTable {
  std::vector<double> lo, hi;   ///< band edges in distance
  std::vector<double> distance; ///< representative distance of each band
  std::vector<int> count;
  std::vector<double> sup_u, sup_grad, sup_hessian, max_dnn;
};

struct GrowthOptions {
  double band_ratio = 1.189207115002721;  ///< 2^(1/4)
  double inner_factor = 4.0;              ///< innermost band edge in grid spacings
  double gamma = 1.1;
  std::optional<Interval> u_band, grad_band, hessian_band;
  std::optional<Interval> flat_u_band, flat_hessian_band, flat_dnn_band;
};

struct GrowthReport {
  BandTable bands;                  ///< whole domain, distance to the boundary
  std::optional<BandTable> flat;    ///< box domains: rows above the lower face
  std::vector<ExponentCheck> checks;
  double M1 = 0.0;                  ///< sup |u|
  double diameter = 0.0;
  double alpha = 0.0;               ///< 2/(1+gamma) in 2D, 2/n otherwise
  double C_alpha = 0.0;             ///< sup |u| / dist^alpha
  double C_log = 0.0;               ///< sup |u| / (dist (1 + |log dist|))
  double lower_sandwich_min = 0.0;  ///< min |u| diam / (dist M1) over interior nodes
  int lower_sandwich_violations = 0;
  double gradient_ratio_max = 0.0;  ///< max |Du| dist / |u| over eligible nodes
  bool pass = false;

  const ExponentCheck* find(const std::string& name) const;
};

/// Distance bands [r^k * inner, r^(k+1) * inner) over the whole domain and,
/// for boxes, one band per grid row above the lower face of the last axis
/// (see flat_face_table).
GrowthReport growth_suite(const GridField& u, const HessianField& H, const GrowthOptions& options = {});

/// One sample per grid row above the lower face of the last axis, taken on
/// the grid line(s) within h/2 of the face's central normal, for heights
/// from inner_factor * h up to a quarter of the smallest box side. Keeping
/// to the central normal keeps the lateral faces at least twice as far
/// away as the flat one.
BandTable flat_face_table(const GridField& u, const HessianField& H, double inner_factor = 4.0);

struct PogorelovLevel {
  double h = 0.0;
  int sublevel_nodes = 0;      ///< |A_h| in nodes
  int eligible_nodes = 0;      ///< nodes of A_h with a Hessian
  double P = 0.0;              ///< sup (|u + h| |D^2 u|)
  double G = 0.0;              ///< 1 + sup |Du|^2
  double ratio = 0.0;          ///< P / G
  double shrink_distance = 0.0;  ///< diam h / M1
  bool inclusion = false;      ///< A_h contains Omega_{diam h / M1}
};

struct PogorelovReport {
  std::vector<PogorelovLevel> levels;
  double M1 = 0.0;
  double diameter = 0.0;
  double ratio_spread = 0.0;  ///< max ratio / min ratio
  double spread_limit = 10.0;
  bool nested = false;        ///< A_h and Omega_h decrease in h
  bool pass = false;
};

/// `h_list` must lie in [4 h_grid M1 / diam, M1 / 2]; throws SpecError
/// otherwise and ResolutionError when some A_h is empty.
PogorelovReport pogorelov_suite(const GridField& u, const HessianField& H, std::vector<double> h_list,
                                double spread_limit = 10.0);

/// h = M1 / 2, M1 / 4, ... (`levels` values).
std::vector<double> dyadic_levels(double M1, int levels);

enum class Integrability { convergent, divergent, inconclusive };
const char* to_string(Integrability c);

struct IntegrabilityReport {
  std::vector<double> delta;
  std::vector<double> h;            ///< usable levels, decreasing
  std::vector<std::vector<double>> I;  ///< I[delta][h]
  std::vector<double> beta;
  std::vector<double> beta_band;
  std::vector<Integrability> classification;
  double beta_threshold = 0.05;
  double delta_star = std::numeric_limits<double>::quiet_NaN();
  double delta_star_band = std::numeric_limits<double>::quiet_NaN();  ///< half the bracketing delta gap
  std::string delta_star_status;  ///< "crossing", "below_range", "above_range"
  bool monotone = false;          ///< beta nondecreasing up to fit bands
};

/// I(delta, h) = h_grid^n sum over eligible nodes with dist > h of
/// |D^2 u|^delta, and beta(delta) the slope of log I against log(1/h).
/// Levels below 4 h_grid are dropped; throws ResolutionError when fewer
/// than 4 remain.
IntegrabilityReport integrability_sweep(const HessianField& H, const std::vector<double>& delta_list,
                                        const std::vector<double>& h_list);

struct SlicingReport {
  double xn = 0.0;         ///< requested normalized height
  double row = 0.0;        ///< grid row used (normalized)
  double alpha = 0.0;
  double weight = 0.0;     ///< x^alpha, or x |log x| in 2D
  double threshold = 0.0;
  int slice_nodes = 0;
  int set_nodes = 0;
  double fraction = 0.0;
  double min_dnn = std::numeric_limits<double>::quiet_NaN();
  double median_dnn = std::numeric_limits<double>::quiet_NaN();
  double bound = 0.0;
  int soundness_violations = 0;
  bool pass = false;
};

struct SlicingSuite {
  std::vector<SlicingReport> slices;
  double lambda = 0.0;  ///< after normalization
  double C0 = 0.0;
  double C1 = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  std::array<double, 3> scale{1.0, 1.0, 1.0};  ///< affine factor per axis
  bool pass = false;
};

double slicing_exponent_a(int n);
/// Threshold below which the tangential second derivatives must stay.
double slicing_threshold(int n, double C1, double x);
/// Lower bound on D_nn over the slicing set.
double slicing_bound(int n, double lambda, double C1, double x);

/// Affinely normalizes the box to (-1,1)^(n-1) x (0,2) and builds the
/// slicing sets at the heights `xn_list` (normalized). Throws GeometryError
/// for non-box domains and ResolutionError when a slice has no eligible
/// Hessian node.
SlicingSuite slicing_suite(const GridField& u, const HessianField& H, double lambda,
                           const std::vector<double>& xn_list);

struct DegenerateOptions {
  double inner_factor = 4.0;
  std::optional<Interval> u_band, dnn_band;
};

struct DegenerateReport {
  double s = 0.0;
  double mu1 = 0.0, mu2 = 0.0;
  BandTable flat;
  ExponentCheck u_fit;
  ExponentCheck dnn_fit;
  double implied_threshold = 0.0;  ///< (n-s) / (2(n-s) - 2)
  bool pass = false;
};

/// Flat-face exponents of a box solution of det D^2 u = f |u|^s.
DegenerateReport degenerate_exponent_suite(const GridField& u, const HessianField& H, double s, double mu1,
                                           double mu2, const DegenerateOptions& options = {});

/// Measured constants shared by the reports.
struct Constants {
  double M1 = 0.0;        ///< sup |u|
  double M2 = 0.0;        ///< |Omega|
  double volume_ratio = 0.0;  ///< |Omega| / M1^(n/2)
  double C0 = std::numeric_limits<double>::quiet_NaN();
  double C1 = std::numeric_limits<double>::quiet_NaN();
  double a = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
};

}  // namespace masharp
