#include "ghosteval/evalmerge.h"

#include <algorithm>
#include <cmath>

#include "ghosteval/csv.h"
#include "ghosteval/error.h"

namespace ghosteval {

RegressionLine fit_line(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw Error(ErrorKind::kDegenerateFit,
                "fit_line: need at least two points");
  }
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::kDegenerateFit, "fit_line: all x values are equal");
  }
  RegressionLine line;
  line.slope = sxy / sxx;
  line.intercept = mean_y - line.slope * mean_x;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
      const double r = y - line.at(x);
      ss_res += r * r;
    }
    line.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return line;
}

MergedScore merged_similarity(const std::vector<CheckpointPoint>& series,
                              double target_rhyme_density) {
  std::vector<std::pair<double, double>> rd;
  std::vector<std::pair<double, double>> sim;
  for (const auto& p : series) {
    rd.emplace_back(p.x, p.avg_rhyme_density);
    sim.emplace_back(p.x, p.avg_max_similarity);
  }
  // Fit on x-sorted points so the result does not depend on input order.
  std::sort(rd.begin(), rd.end());
  std::sort(sim.begin(), sim.end());

  MergedScore out;
  out.target_rhyme_density = target_rhyme_density;
  out.rhyme_line = fit_line(rd);
  out.similarity_line = fit_line(sim);
  if (out.rhyme_line.slope == 0.0) {
    const double scale = std::max(1.0, std::abs(target_rhyme_density));
    if (std::abs(out.rhyme_line.intercept - target_rhyme_density) <= 1e-12 * scale) {
      throw Error(ErrorKind::kUnderdetermined,
                  "rhyme density line is flat at the target value");
    }
    throw Error(ErrorKind::kNoIntersection,
                "rhyme density line is flat and never reaches the target");
  }
  out.intersection_x =
      (target_rhyme_density - out.rhyme_line.intercept) / out.rhyme_line.slope;
  out.similarity_at_target = out.similarity_line.at(out.intersection_x);
  out.extrapolated = out.intersection_x < rd.front().first ||
                     out.intersection_x > rd.back().first;
  return out;
}

std::optional<double> CorrelationMatrix::at(const std::string& row,
                                            const std::string& column) const {
  auto r = std::find(row_names.begin(), row_names.end(), row);
  auto c = std::find(column_names.begin(), column_names.end(), column);
  if (r == row_names.end() || c == column_names.end()) {
    throw Error(ErrorKind::kNotFound, "no correlation cell " + row + "/" + column);
  }
  return values[static_cast<std::size_t>(r - row_names.begin())]
               [static_cast<std::size_t>(c - column_names.begin())];
}

std::string CorrelationMatrix::to_csv(const std::string& provenance) const {
  std::vector<std::string> header = {""};
  header.insert(header.end(), column_names.begin(), column_names.end());
  csv::Writer out(header);
  out.set_comment(provenance);
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    out.field(row_names[r]);
    for (const auto& v : values[r]) out.field(v);
    out.end_row();
  }
  return out.str();
}

std::optional<double> pearson(const std::vector<double>& x,
                              const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) return std::nullopt;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

void check_columns(const std::vector<NamedColumn>& columns, std::size_t rows) {
  for (const auto& c : columns) {
    if (c.values.size() != rows) {
      throw Error(ErrorKind::kDomain,
                  "correlation column '" + c.name + "' has " +
                      std::to_string(c.values.size()) + " rows, expected " +
                      std::to_string(rows));
    }
  }
  if (rows < 3) {
    throw Error(ErrorKind::kDomain, "correlations need at least three rows");
  }
}

}  // namespace

CorrelationMatrix metric_correlations(const std::vector<NamedColumn>& columns) {
  if (columns.empty()) {
    throw Error(ErrorKind::kDomain, "metric_correlations: no columns");
  }
  check_columns(columns, columns.front().values.size());
  CorrelationMatrix m;
  for (const auto& c : columns) {
    m.row_names.push_back(c.name);
    m.column_names.push_back(c.name);
  }
  const std::size_t k = columns.size();
  m.values.assign(k, std::vector<std::optional<double>>(k));
  for (std::size_t i = 0; i < k; ++i) {
    m.values[i][i] = pearson(columns[i].values, columns[i].values);
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto r = pearson(columns[i].values, columns[j].values);
      m.values[i][j] = r;
      m.values[j][i] = r;
    }
  }
  return m;
}

CorrelationMatrix cross_correlations(const std::vector<NamedColumn>& rows,
                                     const std::vector<NamedColumn>& columns) {
  if (rows.empty() || columns.empty()) {
    throw Error(ErrorKind::kDomain, "cross_correlations: no columns");
  }
  const std::size_t n = columns.front().values.size();
  check_columns(rows, n);
  check_columns(columns, n);
  CorrelationMatrix m;
  for (const auto& r : rows) m.row_names.push_back(r.name);
  for (const auto& c : columns) m.column_names.push_back(c.name);
  for (const auto& r : rows) {
    std::vector<std::optional<double>> row;
    for (const auto& c : columns) row.push_back(pearson(r.values, c.values));
    m.values.push_back(std::move(row));
  }
  return m;
}

std::optional<StructureRow> verse_structure_report(
    const std::string& artist_id, const std::vector<Verse>& verses,
    std::optional<std::int64_t> total_iterations) {
  if (verses.empty()) return std::nullopt;
  const Verse* longest = nullptr;
  for (const auto& verse : verses) {
    if (longest == nullptr || verse.token_count() > longest->token_count() ||
        (verse.token_count() == longest->token_count() &&
         verse.provenance.checkpoint < longest->provenance.checkpoint)) {
      longest = &verse;
    }
  }
  StructureRow row;
  row.artist_id = artist_id;
  row.max_len = longest->token_count();
  row.checkpoint = longest->provenance.checkpoint;
  if (total_iterations && *total_iterations > 0) {
    row.percent_of_training = 100.0 * static_cast<double>(row.checkpoint) /
                              static_cast<double>(*total_iterations);
  }
  return row;
}

std::string structure_report_csv(const std::vector<StructureRow>& rows,
                                 const std::string& provenance) {
  csv::Writer out({"artist", "max_len", "checkpoint", "percent_of_training"});
  out.set_comment(provenance);
  for (const auto& row : rows) {
    out.field(row.artist_id)
        .field(static_cast<std::int64_t>(row.max_len))
        .field(row.checkpoint);
    if (row.percent_of_training) {
      out.field(*row.percent_of_training);
    } else {
      out.empty();
    }
    out.end_row();
  }
  return out.str();
}

std::string merged_table_csv(const std::vector<MergedRow>& rows,
                             const std::string& provenance) {
  csv::Writer out({"artist", "avg_rhyme_density", "baseline_similarity",
                   "baseline_n", "lstm_similarity", "lstm_iteration"});
  out.set_comment(provenance);
  auto part = [&out](const std::optional<MergedScore>& m) {
    if (m) {
      out.field(m->similarity_at_target).field(m->intersection_x);
    } else {
      out.field(std::optional<double>()).field(std::optional<double>());
    }
  };
  for (const auto& row : rows) {
    out.field(row.artist_id).field(row.avg_rhyme_density);
    part(row.baseline);
    part(row.neural);
    out.end_row();
  }
  return out.str();
}

}  // namespace ghosteval
