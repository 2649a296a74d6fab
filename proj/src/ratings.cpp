#include "walkaudit/ratings.hpp"

#include "walkaudit/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

namespace walkaudit::ratings {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, sep))
    out.push_back(field);
  return out;
}

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]])
      ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool is_constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v.front())
      return false;
  }
  return true;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

} // namespace

RatingMatrix RatingMatrix::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw SchemaError("ratings CSV: empty file");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.pop_back();
  if (line != "criterion,rater,item,score")
    throw SchemaError("ratings CSV: unexpected header row");

  struct Cell {
    std::string criterion, rater;
    int item, score;
  };
  std::vector<Cell> cells;
  std::set<std::string> criteria, raters;
  int max_item = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty())
      continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw SchemaError("ratings CSV line " + std::to_string(line_no) +
                        ": expected 4 fields");
    Cell cell{fields[0], fields[1], std::stoi(fields[2]), std::stoi(fields[3])};
    if (cell.item < 1)
      throw SchemaError("ratings CSV line " + std::to_string(line_no) +
                        ": item must be >= 1");
    if (cell.score < 1 || cell.score > 5)
      throw SchemaError("ratings CSV line " + std::to_string(line_no) +
                        ": score outside 1-5");
    criteria.insert(cell.criterion);
    raters.insert(cell.rater);
    max_item = std::max(max_item, cell.item);
    cells.push_back(std::move(cell));
  }
  if (cells.empty())
    throw SchemaError("ratings CSV: no rating rows");

  RatingMatrix matrix;
  matrix.criteria.assign(criteria.begin(), criteria.end());
  matrix.raters.assign(raters.begin(), raters.end());
  matrix.items = max_item;
  for (const auto& c : matrix.criteria) {
    for (const auto& r : matrix.raters)
      matrix.scores[c][r].assign(static_cast<std::size_t>(max_item), 0);
  }
  std::set<std::string> filled;
  for (const auto& cell : cells) {
    const std::string key =
        cell.criterion + "|" + cell.rater + "|" + std::to_string(cell.item);
    if (!filled.insert(key).second)
      throw SchemaError("ratings CSV: duplicate cell " + key);
    matrix.scores[cell.criterion][cell.rater][static_cast<std::size_t>(cell.item - 1)] =
        cell.score;
  }
  const std::size_t expected = criteria.size() * raters.size() *
                               static_cast<std::size_t>(max_item);
  if (filled.size() != expected)
    throw SchemaError("ratings CSV: incomplete matrix (" +
                      std::to_string(filled.size()) + " of " +
                      std::to_string(expected) + " cells)");
  return matrix;
}

DescriptiveStats descriptive_stats(std::span<const double> values) {
  if (values.empty())
    throw ValidationError("descriptive_stats: empty sample");
  DescriptiveStats s;
  s.n = static_cast<int>(values.size());
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values)
      ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

SpearmanResult spearman(std::span<const double> r1, std::span<const double> r2) {
  if (r1.size() != r2.size())
    throw ValidationError("spearman: length mismatch");
  if (r1.size() < 3)
    throw ValidationError("spearman: need length >= 3");
  if (is_constant(r1) || is_constant(r2))
    return {}; // undefined: reported as "n/a"

  const auto ranks1 = average_ranks(r1);
  const auto ranks2 = average_ranks(r2);
  double rho = pearson(ranks1, ranks2);
  rho = std::clamp(rho, -1.0, 1.0);

  SpearmanResult result;
  result.rho = rho;
  const double n = static_cast<double>(r1.size());
  if (std::abs(rho) >= 1.0 - 1e-15) {
    result.p = 0.0;
    return result;
  }
  const double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
  const boost::math::students_t dist(n - 2.0);
  result.p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  return result;
}

std::optional<double> spearman_permutation_p(std::span<const double> r1,
                                             std::span<const double> r2) {
  if (r1.size() != r2.size())
    throw ValidationError("spearman permutation: length mismatch");
  if (r1.size() < 3 || r1.size() > 8)
    throw ValidationError("spearman permutation: supported for 3 <= n <= 8");
  if (is_constant(r1) || is_constant(r2))
    return std::nullopt;

  const auto ranks1 = average_ranks(r1);
  const auto ranks2 = average_ranks(r2);
  const double observed = std::abs(pearson(ranks1, ranks2));

  std::vector<double> perm(ranks2.begin(), ranks2.end());
  std::sort(perm.begin(), perm.end());
  long total = 0;
  long at_least = 0;
  do {
    ++total;
    if (std::abs(pearson(ranks1, perm)) >= observed - 1e-12)
      ++at_least;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(at_least) / static_cast<double>(total);
}

double weighted_kappa(std::span<const int> r1, std::span<const int> r2,
                      int categories) {
  if (r1.size() != r2.size())
    throw ValidationError("weighted_kappa: length mismatch");
  if (r1.empty())
    throw ValidationError("weighted_kappa: empty input");
  if (categories < 2)
    throw ValidationError("weighted_kappa: need at least 2 categories");
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (r1[i] < 1 || r1[i] > categories || r2[i] < 1 || r2[i] > categories)
      throw ValidationError("weighted_kappa: rating outside 1.." +
                            std::to_string(categories));
  }

  const std::size_t k = static_cast<std::size_t>(categories);
  const double n = static_cast<double>(r1.size());
  std::vector<std::vector<double>> observed(k, std::vector<double>(k, 0.0));
  std::vector<double> marg1(k, 0.0), marg2(k, 0.0);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    const std::size_t a = static_cast<std::size_t>(r1[i] - 1);
    const std::size_t b = static_cast<std::size_t>(r2[i] - 1);
    observed[a][b] += 1.0 / n;
    marg1[a] += 1.0 / n;
    marg2[b] += 1.0 / n;
  }

  const double denom_scale =
      static_cast<double>(categories - 1) * static_cast<double>(categories - 1);
  double weighted_observed = 0.0;
  double weighted_expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      const double w = d * d / denom_scale;
      weighted_observed += w * observed[i][j];
      weighted_expected += w * marg1[i] * marg2[j];
    }
  }
  if (weighted_expected <= 0.0)
    return 0.0; // both raters constant and identical
  return 1.0 - weighted_observed / weighted_expected;
}

std::string descriptive_report_csv(const RatingMatrix& matrix) {
  std::ostringstream os;
  os << "criterion,mean,sd,min,max,n\n";
  for (const auto& criterion : matrix.criteria) {
    std::vector<double> cells;
    for (const auto& rater : matrix.raters) {
      for (int v : matrix.scores.at(criterion).at(rater))
        cells.push_back(static_cast<double>(v));
    }
    const auto s = descriptive_stats(cells);
    os << criterion << "," << fmt(s.mean) << "," << fmt(s.sd) << ","
       << static_cast<int>(s.min) << "," << static_cast<int>(s.max) << ","
       << s.n << "\n";
  }
  return os.str();
}

std::string agreement_report_csv(const RatingMatrix& matrix) {
  std::ostringstream os;
  os << "criterion,pair,rho,p,kappa\n";
  for (const auto& criterion : matrix.criteria) {
    for (std::size_t i = 0; i < matrix.raters.size(); ++i) {
      for (std::size_t j = i + 1; j < matrix.raters.size(); ++j) {
        const auto& a = matrix.scores.at(criterion).at(matrix.raters[i]);
        const auto& b = matrix.scores.at(criterion).at(matrix.raters[j]);
        std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
        const auto sp = spearman(da, db);
        const double kappa = weighted_kappa(a, b, 5);
        os << criterion << "," << matrix.raters[i] << "-" << matrix.raters[j]
           << "," << (sp.rho ? fmt(*sp.rho) : "n/a") << ","
           << (sp.p ? fmt(*sp.p) : "n/a") << "," << fmt(kappa) << "\n";
      }
    }
  }
  return os.str();
}

} // namespace walkaudit::ratings
