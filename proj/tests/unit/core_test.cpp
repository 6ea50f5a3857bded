#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "actorcast/csv.hpp"
#include "actorcast/rng.hpp"
#include "actorcast/time.hpp"

using namespace actorcast;
using namespace std::chrono;

TEST(Time, ParsesIsoVariants) {
  const Timestamp base = sys_days{year{2024} / 1 / 2} + hours(3) + minutes(4) + seconds(5);
  EXPECT_EQ(parse_iso8601("2024-01-02T03:04:05Z"), base);
  EXPECT_EQ(parse_iso8601("2024-01-02 03:04:05"), base);
  EXPECT_EQ(parse_iso8601("2024-01-02T05:04:05+02:00"), base);
  EXPECT_EQ(parse_iso8601("2024-01-01T23:04:05-0400"), base);
  EXPECT_EQ(parse_iso8601("2024-01-02T03:04:05.250Z"), base + milliseconds(250));
  EXPECT_EQ(parse_iso8601("2024-01-02"), Timestamp(sys_days{year{2024} / 1 / 2}));
}

TEST(Time, NaiveOffsetShiftsToUtc) {
  const Timestamp utc = sys_days{year{2024} / 1 / 2} + hours(1);
  EXPECT_EQ(parse_iso8601("2024-01-02T02:00:00", 60), utc);
  EXPECT_EQ(parse_iso8601("2024-01-02T01:00:00Z", 60), utc);
}

TEST(Time, RejectsGarbage) {
  EXPECT_FALSE(parse_iso8601("not-a-date"));
  EXPECT_FALSE(parse_iso8601("2024-13-01T00:00:00"));
  EXPECT_FALSE(parse_iso8601("2024-02-30"));
  EXPECT_FALSE(parse_iso8601("2024-01-02T03:04:05Zjunk"));
}

TEST(Time, FormatRoundTrips) {
  const Timestamp t = sys_days{year{2011} / 10 / 1} + hours(11) + microseconds(123400);
  EXPECT_EQ(format_timestamp(t), "2011-10-01T11:00:00.1234Z");
  EXPECT_EQ(parse_iso8601(format_timestamp(t)), t);
  EXPECT_EQ(format_timestamp(sys_days{year{2011} / 10 / 1}), "2011-10-01T00:00:00Z");
}

TEST(Time, CustomFormat) {
  const auto t = parse_with_format("02/01/2024 03:04", "%d/%m/%Y %H:%M");
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, Timestamp(sys_days{year{2024} / 1 / 2} + hours(3) + minutes(4)));
}

TEST(Time, DateOfNegativeEpoch) {
  const Timestamp t = sys_days{year{1969} / 12 / 31} + hours(23);
  EXPECT_EQ(format_date(date_of(t)), "1969-12-31");
}

TEST(Csv, ReadsQuotedFieldsAndCrlf) {
  std::istringstream in("\xEF\xBB\xBF" "a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",z\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(f, (std::vector<std::string>{"a", "b"}));
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(f, (std::vector<std::string>{"x,1", "say \"hi\""}));
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(f, (std::vector<std::string>{"multi\nline", "z"}));
  EXPECT_EQ(r.line(), 3u);
  EXPECT_FALSE(r.next(f));
}

TEST(Csv, EscapeRoundTrip) {
  std::ostringstream out;
  const std::vector<std::string> row = {"plain", "com,ma", "quo\"te", ""};
  csv::write_row(out, row);
  std::istringstream in(out.str());
  csv::Reader r(in);
  std::vector<std::string> f;
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(f, row);
}

TEST(Csv, DoubleFormattingIsExact) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0}) {
    EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
  }
  EXPECT_EQ(csv::format_double(2.0), "2");
  EXPECT_THROW(csv::parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(csv::parse_int("7.0"), std::invalid_argument);
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) seen.insert(derive_seed(42, "gbt_round", a));
  seen.insert(derive_seed(42, "importance", 0));
  seen.insert(derive_seed(43, "gbt_round", 0));
  EXPECT_EQ(seen.size(), 52u);
  EXPECT_EQ(derive_seed(7, "x", 1, 2, 3), derive_seed(7, "x", 1, 2, 3));
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[rng.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Rng, SampleWithoutReplacement) {
  Rng rng(3);
  const auto s = rng.sample_without_replacement(20, 8);
  ASSERT_EQ(s.size(), 8u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<size_t>(s.begin(), s.end()).size(), 8u);
  EXPECT_LT(s.back(), 20u);
  EXPECT_EQ(rng.sample_without_replacement(5, 5), (std::vector<size_t>{0, 1, 2, 3, 4}));
}

TEST(Rng, NormalMoments) {
  Rng rng(11);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
