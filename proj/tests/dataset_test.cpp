#include <gtest/gtest.h>

#include <sstream>

#include "barron/dataset.hpp"
#include "barron/errors.hpp"
#include "barron/sampler.hpp"

namespace barron {
namespace {

TEST(Dataset, CsvRoundTripIsExact) {
  const auto ds = sphere_shell_dataset(4, 200, 12);
  std::stringstream buf;
  write_csv(ds, buf);
  const auto back = read_csv(buf);
  ASSERT_EQ(back.d, 4U);
  ASSERT_EQ(back.size(), 200U);
  EXPECT_EQ(back.points, ds.points);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.distances, ds.distances);
}

TEST(Dataset, HeaderNamesColumns) {
  const auto ds = sphere_shell_dataset(2, 2, 1);
  std::stringstream buf;
  write_csv(ds, buf);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "x_0,x_1,label,dist");
}

TEST(Dataset, MissingDistancesStayMissing) {
  auto ds = sphere_shell_dataset(2, 10, 1);
  ds.distances.clear();
  std::stringstream buf;
  write_csv(ds, buf);
  const auto back = read_csv(buf);
  EXPECT_FALSE(back.has_distances());
}

TEST(Dataset, RejectsMalformedCsv) {
  std::stringstream no_header("0.1,0.2,1,0.3\n");
  EXPECT_THROW(read_csv(no_header), FormatError);
  std::stringstream bad_label("x_0,x_1,label,dist\n0.1,0.2,7,0.3\n");
  EXPECT_THROW(read_csv(bad_label), FormatError);
  std::stringstream short_row("x_0,x_1,label,dist\n0.1,1,0.3\n");
  EXPECT_THROW(read_csv(short_row), FormatError);
}

TEST(Dataset, SelectAndConcatenate) {
  const auto ds = sphere_shell_dataset(3, 10, 2);
  const std::vector<std::size_t> idx{1, 3, 5};
  const auto sub = ds.select(idx);
  ASSERT_EQ(sub.size(), 3U);
  EXPECT_EQ(sub.labels[1], ds.labels[3]);
  EXPECT_EQ(sub.points.col(2), ds.points.col(5));
  const auto both = concatenate(sub, sub);
  EXPECT_EQ(both.size(), 6U);
  EXPECT_EQ(both.points.col(4), ds.points.col(3));
}

TEST(Dataset, FormatDoubleRoundTrips) {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace barron
