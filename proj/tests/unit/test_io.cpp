#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

#include "regspec/io.hpp"

using namespace regspec;

TEST(FormatNumber, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
  EXPECT_EQ(format_number(printed_value(std::numbers::pi)), format_number(std::numbers::pi));
}

TEST(FormatNumber, IgnoresLocale) {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous ? previous : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "locale not installed";
  EXPECT_EQ(format_number(1.5), "1.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(SignalCsv, ReadsWithAndWithoutImaginaryColumn) {
  std::istringstream full("index,re,im\n0,1,2\n1,-0.5,0\r\n\n2,3e-2,+1\n");
  const auto y = read_signal_csv(full);
  ASSERT_EQ(y.size(), 3u);
  EXPECT_EQ(y[0], Complex(1, 2));
  EXPECT_EQ(y[2], Complex(0.03, 1));
  std::istringstream real_only("index,re\n0,4\n1,5\n");
  const auto r = read_signal_csv(real_only);
  EXPECT_EQ(r[1], Complex(5, 0));
}

TEST(SignalCsv, RejectsMalformedInput) {
  for (const char* text : {"", "idx,re\n0,1\n", "index,re,im\n1,1,1\n", "index,re,im\n0,1\n", "index,re,im\n0,abc,1\n",
                           "index,re,im\n0,nan,1\n", "index,re,im\n", "index,re,im\n0,1,1\n0,1,1\n"}) {
    std::istringstream in(text);
    try {
      read_signal_csv(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_input) << text;
    }
  }
}

TEST(SignalCsv, RoundTrip) {
  const TimeSeries y({{1.0 / 3.0, -2.0}, {0.0, 1e-7}});
  std::ostringstream first;
  write_signal_csv(first, y);
  std::istringstream in(first.str());
  std::ostringstream second;
  write_signal_csv(second, read_signal_csv(in));
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(first.str(), "index,re,im\n0,0.333333333333,-2\n1,0,1e-07\n");
}

namespace {

SpectrumRecord sample_record() {
  SpectrumRecord r;
  r.grid = {0.0, 0.25, 0.5, 0.75};
  r.values = {{1.0 / 7.0, 0.0}, {-3.25, 2.0 / 3.0}, {1e-300, -1e12}, {0.0, 0.0}};
  for (const auto& v : r.values) r.power.push_back(std::norm(v));
  r.meta.lambda = 0.5;
  r.meta.window = "cauchy";
  r.meta.penalty = "cauchy";
  return r;
}

}  // namespace

TEST(SpectrumCsv, RoundTripIsByteIdentical) {
  std::ostringstream first;
  write_spectrum_csv(first, sample_record());
  std::istringstream in(first.str());
  std::ostringstream second;
  write_spectrum_csv(second, read_spectrum_csv(in));
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(first.str().substr(0, 15), "nu,re,im,power\n");
}

TEST(SpectrumCsv, ValidatesGrid) {
  std::istringstream bad("nu,re,im,power\n0.5,1,1,2\n0.25,1,1,2\n");
  EXPECT_THROW(read_spectrum_csv(bad), Error);
  std::istringstream out_of_range("nu,re,im,power\n1,1,1,2\n");
  EXPECT_THROW(read_spectrum_csv(out_of_range), Error);
}

TEST(SpectrumJson, RoundTrip) {
  std::ostringstream first;
  write_spectrum_json(first, sample_record());
  std::istringstream in(first.str());
  const auto back = read_spectrum_json(in);
  EXPECT_EQ(back.meta.window, "cauchy");
  EXPECT_EQ(*back.meta.lambda, 0.5);
  EXPECT_FALSE(back.meta.seed.has_value());
  std::ostringstream second;
  write_spectrum_json(second, back);
  EXPECT_EQ(first.str(), second.str());
  std::istringstream broken("{\"grid\": [0.1]}");
  EXPECT_THROW(read_spectrum_json(broken), Error);
  std::istringstream garbage("not json");
  EXPECT_THROW(read_spectrum_json(garbage), Error);
}

TEST(Reports, TableLayout) {
  ExperimentReport report;
  report.median_usual = {2, 4, 8, 16};
  report.median_rls = {1, 3, 4, 4};
  report.gain = {0.5, 0.25, 0.5, 0.75};
  std::ostringstream out;
  write_table_csv(out, report);
  EXPECT_EQ(out.str(), "method,L1,L2,ISD,SIS\nUP,2,4,8,16\nRLS+ML,1,3,4,4\nGain,50,25,50,75\n");
}

TEST(Reports, FitJson) {
  FitReport fit{};
  fit.hyperparams = {2.0, 0.5};
  fit.cll_value = -1.0 / 3.0;
  fit.window_index = 2;
  fit.flat_objective = true;
  const auto j = fit_to_json(fit, "hanning");
  EXPECT_EQ(j["window"], "hanning");
  EXPECT_EQ(j["r_b"].get<double>(), 1.0);
  EXPECT_EQ(j["cll"].get<double>(), printed_value(-1.0 / 3.0));
  EXPECT_TRUE(j["flat_objective"].get<bool>());
  EXPECT_FALSE(j.contains("alpha0"));
}
