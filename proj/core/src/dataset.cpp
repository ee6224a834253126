#include "twsbench/dataset.hpp"

#include <cmath>

#include "twsbench/errors.hpp"

namespace twsbench {

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

void BasinSeries::validate() const {
  const auto n = static_cast<Eigen::Index>(axis.length());
  if (n < 1) fail(ErrorKind::Schema, "basin " + basin_id + " has an empty axis");
  if (dynamic.rows() != n || dynamic.cols() != static_cast<Eigen::Index>(kDynamicChannels))
    fail(ErrorKind::Schema, "basin " + basin_id + " dynamic block has wrong shape");
  if (target.size() != n) fail(ErrorKind::Schema, "basin " + basin_id + " target length mismatch");
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index c = 0; c < dynamic.cols(); ++c) {
      if (!std::isfinite(dynamic(t, c)))
        fail(ErrorKind::MissingValue, "basin " + basin_id + " date " + format_date(axis.date_at(t)) +
                                          " column " + std::string(kDynamicNames[c]));
    }
    if (!std::isfinite(target[t]))
      fail(ErrorKind::MissingValue,
           "basin " + basin_id + " date " + format_date(axis.date_at(t)) + " column tws");
  }
  for (std::size_t k = 0; k < kStaticFeatures; ++k)
    if (!std::isfinite(statics[k]))
      fail(ErrorKind::MissingValue,
           "basin " + basin_id + " static column " + std::string(kStaticNames[k]));
}

void SplitSpec::validate() const {
  auto check = [](const DateRange& r, std::string_view name) {
    if (!r.start.ok() || !r.end.ok() || r.end < r.start)
      fail(ErrorKind::InvalidConfig, std::string(name) + " range is empty or malformed");
  };
  check(train, "train");
  check(test, "test");
  if (validation) {
    check(*validation, "validation");
    if (!(train.end < validation->start) || !(validation->end < test.start))
      fail(ErrorKind::InvalidConfig, "split ranges must be disjoint and ordered train < validation < test");
  } else if (!(train.end < test.start)) {
    fail(ErrorKind::InvalidConfig, "split ranges must be disjoint and ordered train < test");
  }
}

SplitSpec SplitSpec::linear_default() {
  return SplitSpec{{make_date(2003, 1, 1), make_date(2015, 12, 31)},
                   std::nullopt,
                   {make_date(2016, 1, 1), make_date(2020, 12, 31)}};
}

SplitSpec SplitSpec::neural_default() {
  return SplitSpec{{make_date(2003, 1, 1), make_date(2012, 12, 31)},
                   DateRange{make_date(2013, 1, 1), make_date(2015, 12, 31)},
                   {make_date(2016, 1, 1), make_date(2020, 12, 31)}};
}

Eigen::MatrixXd SeriesView::channels() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(size), kDynamicChannels + 1);
  const auto b = static_cast<Eigen::Index>(begin);
  const auto n = static_cast<Eigen::Index>(size);
  out.leftCols(kDynamicChannels) = series->dynamic.middleRows(b, n);
  out.col(kDynamicChannels) = series->target.segment(b, n);
  return out;
}

namespace {

SeriesView view_for(const BasinSeries& s, const DateRange& r, std::string_view name) {
  const auto& axis = s.axis;
  if (r.start < axis.start() || axis.end() < r.start)
    fail(ErrorKind::OutOfRange, std::string(name) + " range starts outside the axis of basin " + s.basin_id);
  // The range end may fall mid-step for monthly data (e.g. 12-31); it must not extend past the
  // last covered step.
  const Date after_last = advance(axis.end(), 1, axis.resolution());
  if (!(r.end < after_last))
    fail(ErrorKind::OutOfRange, std::string(name) + " range ends after the axis of basin " + s.basin_id);
  const std::size_t b = axis.lower_bound(r.start);
  std::size_t e = axis.lower_bound(r.end);
  if (e < axis.length() && !(r.end < axis.date_at(e))) ++e;
  if (e <= b) fail(ErrorKind::EmptySplit, std::string(name) + " split is empty for basin " + s.basin_id);
  return SeriesView{&s, b, e - b};
}

}  // namespace

SplitViews split_series(const BasinSeries& series, const SplitSpec& spec) {
  spec.validate();
  SplitViews v;
  v.train = view_for(series, spec.train, "train");
  if (spec.validation) v.validation = view_for(series, *spec.validation, "validation");
  v.test = view_for(series, spec.test, "test");
  return v;
}

}  // namespace twsbench
