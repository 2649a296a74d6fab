#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace walkaudit::ratings {

/// Complete Likert rating block: every (criterion, rater, item) cell present
/// exactly once, scores in 1..5.
struct RatingMatrix {
  std::vector<std::string> criteria;
  std::vector<std::string> raters;
  int items = 0;
  /// scores[criterion][rater][item-1]
  std::map<std::string, std::map<std::string, std::vector<int>>> scores;

  /// Parses "criterion,rater,item,score" CSV; throws SchemaError on missing
  /// cells, duplicates, or out-of-range scores.
  static RatingMatrix from_csv(std::istream& in);
};

struct DescriptiveStats {
  double mean = 0.0;
  double sd = 0.0; ///< sample SD (n-1 denominator); 0 when n == 1
  double min = 0.0;
  double max = 0.0;
  int n = 0;
};

/// Mean / sample SD / extrema over all cells. Throws ValidationError when
/// empty.
DescriptiveStats descriptive_stats(std::span<const double> values);

/// rho and two-sided p, or empty optionals when either vector is constant
/// (the correlation is undefined; reported as "n/a").
struct SpearmanResult {
  std::optional<double> rho;
  std::optional<double> p;
};

/// Spearman rank correlation with average ranks for ties. p comes from the
/// t approximation t = rho * sqrt((n-2)/(1-rho^2)) against Student-t with
/// n-2 degrees of freedom (two-sided); |rho| = 1 reports p = 0. Requires
/// equal lengths >= 3.
SpearmanResult spearman(std::span<const double> r1, std::span<const double> r2);

/// Exact permutation p-value for tiny samples (n <= 8): the fraction of
/// permutations of r2 whose |rho| reaches the observed |rho|. Undefined for
/// constant vectors (returns nullopt).
std::optional<double> spearman_permutation_p(std::span<const double> r1,
                                             std::span<const double> r2);

/// Quadratic-weighted Cohen's kappa on categories 1..k:
/// kappa = 1 - sum(w*O)/sum(w*E) with w_ij = (i-j)^2/(k-1)^2. When both
/// raters are constant and identical the expected disagreement is zero and
/// the convention is kappa = 0. Requires equal lengths >= 1 and ratings in
/// 1..k.
double weighted_kappa(std::span<const int> r1, std::span<const int> r2,
                      int categories = 5);

/// "criterion,mean,sd,min,max,n" rows, one per criterion, over all cells.
std::string descriptive_report_csv(const RatingMatrix& matrix);

/// "criterion,pair,rho,p,kappa" rows for every rater pair, with "n/a"
/// markers where the correlation is undefined.
std::string agreement_report_csv(const RatingMatrix& matrix);

} // namespace walkaudit::ratings
