#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gridcast/data.hpp"
#include "gridcast/error.hpp"

using namespace gridcast;
using namespace gridcast::data;
using Catch::Approx;

namespace {

std::filesystem::path write_temp(const std::string &name, const std::string &contents) {
	auto dir = std::filesystem::temp_directory_path() / "gridcast_test_data";
	std::filesystem::create_directories(dir);
	auto path = dir / name;
	std::ofstream(path) << contents;
	return path;
}

LoadSeries hourly_series(std::size_t n, double start_value = 100.0) {
	LoadSeries s;
	const auto t0 = parse_timestamp("2020-01-01T00:00:00Z");
	for (std::size_t i = 0; i < n; ++i) {
		s.timestamps.push_back(t0 + std::chrono::hours(i));
		s.values.push_back(start_value + static_cast<double>(i));
	}
	return s;
}

} // namespace

TEST_CASE("timestamps parse to UTC", "[data][time]") {
	const auto utc = parse_timestamp("2015-01-01T00:00:00Z");
	CHECK(parse_timestamp("2015-01-01 01:00:00+01:00") == utc);
	CHECK(parse_timestamp("2014-12-31 23:00:00") == utc - std::chrono::hours(1));
	CHECK(parse_timestamp("2015-01-01 00:00") == utc);
	CHECK(parse_timestamp("2015-01-01") == utc);
	CHECK(parse_timestamp("2015-01-01T05:30:00-05:30") == utc + std::chrono::hours(11));
	CHECK(format_timestamp(utc) == "2015-01-01T00:00:00Z");
	CHECK_THROWS_AS(parse_timestamp("yesterday"), std::invalid_argument);
	CHECK_THROWS_AS(parse_timestamp("2015-13-01 00:00"), std::invalid_argument);
}

TEST_CASE("csv parser follows RFC 4180 quoting", "[data][csv]") {
	std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,\"multi\nline\",\r\n");
	const auto rows = parse_csv(in);
	REQUIRE(rows.size() == 2);
	CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "say \"hi\""});
	CHECK(rows[1] == std::vector<std::string>{"1", "multi\nline", ""});
	CHECK(quote_csv_field("plain") == "plain");
	CHECK(quote_csv_field("total load, actual") == "\"total load, actual\"");
}

TEST_CASE("load_csv maps empty and unparseable cells to missing", "[data][csv]") {
	const auto path = write_temp("gaps.csv", "time,load,other\n"
	                                         "2020-01-01 00:00:00+00:00,100,1\n"
	                                         "2020-01-01 01:00:00+00:00,,2\n"
	                                         "2020-01-01 02:00:00+00:00,120,n/a\n");
	const std::vector<std::string> cols{"load"};
	const auto table = load_csv(path, cols);
	REQUIRE(table.rows() == 3);
	REQUIRE(table.names == cols);
	const auto &load = table.column("load");
	CHECK(load[0] == 100.0);
	CHECK_FALSE(load[1].has_value());
	CHECK(load[2] == 120.0);

	const auto all = load_csv(path);
	CHECK(all.names == std::vector<std::string>{"load", "other"});
	CHECK_FALSE(all.column("other")[2].has_value());
}

TEST_CASE("load_csv rejects bad inputs", "[data][csv]") {
	CHECK_THROWS_AS(load_csv("/definitely/not/here.csv"), IoError);

	const auto unordered = write_temp("unordered.csv", "time,load\n2020-01-01 01:00,1\n2020-01-01 00:00,2\n");
	CHECK_THROWS_AS(load_csv(unordered), IoError);

	const auto duplicate = write_temp("dup.csv", "time,load\n2020-01-01 01:00,1\n2020-01-01 02:00+01:00,2\n");
	CHECK_THROWS_AS(load_csv(duplicate), IoError);

	const auto header_only = write_temp("empty.csv", "time,load\n");
	CHECK_THROWS_AS(load_csv(header_only), IoError);

	const auto ok = write_temp("ok.csv", "time,load\n2020-01-01 00:00,1\n");
	const std::vector<std::string> missing{"nope"};
	CHECK_THROWS_AS(load_csv(ok, missing), IoError);
}

TEST_CASE("write_csv output reloads to the same table", "[data][csv]") {
	TimeSeriesTable table;
	const auto t0 = parse_timestamp("2021-06-01T00:00:00Z");
	table.timestamps = {t0, t0 + std::chrono::hours(1), t0 + std::chrono::hours(2)};
	table.names = {"total load actual", "price, day ahead"};
	table.columns = {{1.5, std::nullopt, 0.1 + 0.2}, {-3.0, 4.0, 1e-17}};
	std::ostringstream out;
	write_csv(table, out);
	const auto path = write_temp("roundtrip.csv", out.str());
	const auto back = load_csv(path);
	CHECK(back.timestamps == table.timestamps);
	CHECK(back.names == table.names);
	CHECK(back.columns == table.columns);
}

TEST_CASE("summarize", "[data][summary]") {
	SECTION("constant series") {
		const std::vector<std::optional<double>> v{5.0, 5.0, 5.0};
		const auto s = summarize(v);
		CHECK(s.mean == 5.0);
		CHECK(s.std_dev == 0.0);
		CHECK(s.min == 5.0);
		CHECK(s.max == 5.0);
		CHECK(s.missing_count == 0);
		CHECK(s.valid_count == 3);
	}
	SECTION("missing values are excluded") {
		const std::vector<std::optional<double>> v{1.0, std::nullopt, 3.0};
		const auto s = summarize(v);
		CHECK(s.valid_count == 2);
		CHECK(s.missing_count == 1);
		CHECK(s.mean == 2.0);
		// sample std of {1, 3}: sqrt(((1-2)^2 + (3-2)^2) / 1)
		CHECK(s.std_dev == Approx(std::sqrt(2.0)).epsilon(1e-15));
	}
	SECTION("errors") {
		const std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
		CHECK_THROWS(summarize(none));
		CHECK_THROWS(summarize(std::vector<std::optional<double>>{}));
	}
	SECTION("json shape") {
		const std::vector<std::optional<double>> v{1.0, std::nullopt, 3.0};
		const auto j = to_json(summarize(v));
		CHECK(j.at("valid") == 2);
		CHECK(j.at("missing") == 1);
		for (const char *key : {"mean", "std", "min", "max"}) {
			CHECK(j.contains(key));
		}
	}
}

TEST_CASE("summarize invariants on random columns", "[data][summary][property]") {
	std::mt19937_64 gen(11);
	std::uniform_real_distribution<double> value(-50.0, 50.0);
	std::bernoulli_distribution gap(0.2);
	for (int trial = 0; trial < 50; ++trial) {
		std::vector<std::optional<double>> column(2 + trial);
		for (auto &c : column) {
			c = gap(gen) ? std::nullopt : std::optional<double>(value(gen));
		}
		column[0] = value(gen);
		const auto s = summarize(column);
		CHECK(s.valid_count + s.missing_count == column.size());
		CHECK(s.min <= s.mean + 1e-12);
		CHECK(s.mean <= s.max + 1e-12);
		CHECK(s.std_dev >= 0.0);

		auto shuffled = column;
		std::shuffle(shuffled.begin(), shuffled.end(), gen);
		const auto t = summarize(shuffled);
		CHECK(t.mean == Approx(s.mean).margin(1e-12));
		CHECK(t.std_dev == Approx(s.std_dev).margin(1e-12));
		CHECK(t.min == s.min);
		CHECK(t.max == s.max);
	}
}

TEST_CASE("drop_missing", "[data]") {
	TimeSeriesTable table;
	const auto t0 = parse_timestamp("2020-01-01T00:00:00Z");
	table.timestamps = {t0, t0 + std::chrono::hours(1), t0 + std::chrono::hours(2)};
	table.names = {"load", "full"};
	table.columns = {{100.0, std::nullopt, 120.0}, {1.0, 2.0, 3.0}};

	const auto s = drop_missing(table, "load");
	CHECK(s.values == std::vector<double>{100.0, 120.0});
	CHECK(s.timestamps == std::vector<TimePoint>{t0, t0 + std::chrono::hours(2)});

	const auto full = drop_missing(table, "full");
	CHECK(full.values == std::vector<double>{1.0, 2.0, 3.0});
	CHECK(full.timestamps == table.timestamps);

	table.columns[0] = {std::nullopt, std::nullopt, 5.0};
	CHECK_THROWS(drop_missing(table, "load"));
	CHECK_THROWS(drop_missing(table, "absent"));
}

TEST_CASE("scaler", "[data][scale]") {
	const std::vector<double> train{10.0, 20.0, 30.0};
	const auto p = fit_scaler(train);
	CHECK(p.min == 10.0);
	CHECK(p.max == 30.0);
	CHECK(scale(10.0, p) == 0.0);
	CHECK(scale(30.0, p) == 1.0);
	CHECK(scale(35.0, p) == 1.25);

	CHECK_THROWS(fit_scaler(std::vector<double>{5.0, 5.0}));
	CHECK_THROWS(fit_scaler(std::vector<double>{5.0}));

	const ScalerParams load{18000.0, 41000.0};
	const std::vector<double> mwh{18000.0, 28700.0, 41000.0};
	const auto back = inverse_scale(scale(mwh, load), load);
	for (std::size_t i = 0; i < mwh.size(); ++i) {
		CHECK(std::abs(back[i] - mwh[i]) <= 1e-9 * std::abs(mwh[i]));
	}
}

TEST_CASE("scale round trip holds for arbitrary finite values", "[data][scale][property]") {
	std::mt19937_64 gen(3);
	std::uniform_real_distribution<double> bound(-1e5, 1e5);
	std::uniform_real_distribution<double> unit(-3.0, 3.0);
	for (int trial = 0; trial < 200; ++trial) {
		double a = bound(gen), b = bound(gen);
		if (a == b) {
			continue;
		}
		const ScalerParams p{std::min(a, b), std::max(a, b)};
		const double x = p.min + unit(gen) * (p.max - p.min);
		const double back = inverse_scale(scale(x, p), p);
		CHECK(std::abs(back - x) <= 1e-9 * std::max(std::abs(x), 1.0));
	}
}

TEST_CASE("train_test_split is chronological", "[data][split]") {
	const auto [train, test] = train_test_split(hourly_series(100), 0.8);
	CHECK(train.size() == 80);
	CHECK(test.size() == 20);
	CHECK(train.timestamps.back() < test.timestamps.front());
	CHECK(train.values.front() == 100.0);
	CHECK(test.values.front() == 180.0);

	// 35064 rows minus 36 missing values.
	const auto [big_train, big_test] = train_test_split(hourly_series(35028), 0.8);
	CHECK(big_train.size() == 28022);
	CHECK(big_test.size() == 7006);

	CHECK_THROWS(train_test_split(hourly_series(10), 1.0));
	CHECK_THROWS(train_test_split(hourly_series(10), 0.0));
	CHECK_THROWS(train_test_split(hourly_series(10), 0.01));
}

TEST_CASE("make_windows", "[data][window]") {
	const std::vector<double> v{1, 2, 3, 4};
	const auto w = make_windows(v, 2);
	REQUIRE(w.size() == 2);
	CHECK(std::vector<double>(w.input(0).begin(), w.input(0).end()) == std::vector<double>{1, 2});
	CHECK(std::vector<double>(w.input(1).begin(), w.input(1).end()) == std::vector<double>{2, 3});
	CHECK(w.targets == std::vector<double>{3, 4});

	std::vector<double> long_series(28022);
	std::iota(long_series.begin(), long_series.end(), 0.0);
	CHECK(make_windows(long_series, 25).size() == 27997);

	CHECK_THROWS(make_windows(std::vector<double>(25, 0.0), 25));
	CHECK_THROWS(make_windows(v, 0));
}

TEST_CASE("window targets reproduce the series tail", "[data][window][property]") {
	std::mt19937_64 gen(5);
	std::uniform_real_distribution<double> value(0.0, 1.0);
	for (std::size_t lookback : {1u, 3u, 25u}) {
		std::vector<double> v(lookback + 40);
		for (auto &x : v) {
			x = value(gen);
		}
		const auto w = make_windows(v, lookback);
		CHECK(w.targets == std::vector<double>(v.begin() + static_cast<long>(lookback), v.end()));
		for (std::size_t i = 0; i < w.size(); ++i) {
			for (std::size_t k = 0; k < lookback; ++k) {
				REQUIRE(w.input(i)[k] == v[i + k]);
			}
		}
	}
}
